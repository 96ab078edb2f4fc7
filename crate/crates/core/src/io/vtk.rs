//! Legacy ASCII VTK: tetrahedral unstructured grids and polydata.

use std::io::{BufRead, Write};

use super::IoError;
use crate::mesh::{Point, TetMesh};
use crate::ScalarField;

pub const VTK_TETRA: u32 = 10;

fn header(w: &mut impl Write, title: &str, dataset: &str) -> std::io::Result<()> {
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{title}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET {dataset}")
}

fn points(w: &mut impl Write, pts: &[Point]) -> std::io::Result<()> {
    writeln!(w, "POINTS {} double", pts.len())?;
    for p in pts {
        writeln!(w, "{} {} {}", p.x, p.y, p.z)?;
    }
    Ok(())
}

/// Writes the mesh, optionally with one named point scalar.
pub fn write_unstructured(
    w: &mut impl Write,
    mesh: &TetMesh,
    scalars: Option<(&str, &ScalarField)>,
) -> std::io::Result<()> {
    header(w, "sweeptopo tetrahedral mesh", "UNSTRUCTURED_GRID")?;
    points(w, mesh.positions())?;
    let nt = mesh.num_tets();
    writeln!(w, "CELLS {nt} {}", nt * 5)?;
    for t in mesh.tets() {
        writeln!(w, "4 {} {} {} {}", t[0], t[1], t[2], t[3])?;
    }
    writeln!(w, "CELL_TYPES {nt}")?;
    for _ in 0..nt {
        writeln!(w, "{VTK_TETRA}")?;
    }
    if let Some((name, f)) = scalars {
        writeln!(w, "POINT_DATA {}", f.len())?;
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for x in f.values() {
            writeln!(w, "{x}")?;
        }
    }
    Ok(())
}

/// Writes triangles as `POLYGONS` and polylines as `LINES`.
pub fn write_polydata(
    w: &mut impl Write,
    pts: &[Point],
    triangles: &[[usize; 3]],
    lines: &[Vec<usize>],
) -> std::io::Result<()> {
    header(w, "sweeptopo polydata", "POLYDATA")?;
    points(w, pts)?;
    if !triangles.is_empty() {
        writeln!(w, "POLYGONS {} {}", triangles.len(), triangles.len() * 4)?;
        for t in triangles {
            writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
        }
    }
    if !lines.is_empty() {
        let size: usize = lines.iter().map(|l| l.len() + 1).sum();
        writeln!(w, "LINES {} {size}", lines.len())?;
        for l in lines {
            write!(w, "{}", l.len())?;
            for v in l {
                write!(w, " {v}")?;
            }
            writeln!(w)?;
        }
    }
    Ok(())
}

struct Tokens {
    toks: Vec<(usize, String)>,
    pos: usize,
}

impl Tokens {
    fn next(&mut self, what: &str) -> Result<(usize, &str), IoError> {
        let last_line = self.toks.last().map_or(1, |t| t.0);
        let (line, tok) = self
            .toks
            .get(self.pos)
            .ok_or_else(|| IoError::parse(last_line, format!("unexpected end of file, expected {what}")))?;
        self.pos += 1;
        Ok((*line, tok.as_str()))
    }

    fn parse<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, IoError> {
        let (line, tok) = self.next(what)?;
        tok.parse()
            .map_err(|_| IoError::parse(line, format!("expected {what}, found {tok:?}")))
    }

    fn done(&self) -> bool {
        self.pos >= self.toks.len()
    }
}

/// Reads a tetrahedral unstructured grid and its first point scalar, if any.
pub fn read_unstructured(r: impl BufRead) -> Result<(TetMesh, Option<ScalarField>), IoError> {
    let mut lines = r.lines();
    let mut head = Vec::new();
    for i in 0..4 {
        let l = lines
            .next()
            .ok_or_else(|| IoError::parse(i + 1, "truncated VTK header"))??;
        head.push(l);
    }
    if !head[0].starts_with("# vtk DataFile") {
        return Err(IoError::parse(1, "missing '# vtk DataFile' signature"));
    }
    if head[2].trim() != "ASCII" {
        return Err(IoError::parse(3, "only ASCII VTK files are supported"));
    }
    if head[3].split_whitespace().collect::<Vec<_>>() != ["DATASET", "UNSTRUCTURED_GRID"] {
        return Err(IoError::parse(4, "expected DATASET UNSTRUCTURED_GRID"));
    }
    let mut toks = Vec::new();
    for (i, l) in lines.enumerate() {
        let l = l?;
        toks.extend(l.split_whitespace().map(|t| (i + 5, t.to_string())));
    }
    let mut tk = Tokens { toks, pos: 0 };

    let mut positions = Vec::new();
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut types: Vec<u32> = Vec::new();
    let mut scalars: Option<ScalarField> = None;
    let mut point_data = None;
    while !tk.done() {
        let (line, kw) = tk.next("section keyword")?;
        match kw.to_ascii_uppercase().as_str() {
            "POINTS" => {
                let n: usize = tk.parse("point count")?;
                let _ty = tk.next("point data type")?;
                positions.reserve(n);
                for _ in 0..n {
                    let x = tk.parse("coordinate")?;
                    let y = tk.parse("coordinate")?;
                    let z = tk.parse("coordinate")?;
                    positions.push(Point::new(x, y, z));
                }
            }
            "CELLS" => {
                let n: usize = tk.parse("cell count")?;
                let _size: usize = tk.parse("cell list size")?;
                for _ in 0..n {
                    let k: usize = tk.parse("cell arity")?;
                    let mut c = Vec::with_capacity(k);
                    for _ in 0..k {
                        c.push(tk.parse("vertex index")?);
                    }
                    cells.push(c);
                }
            }
            "CELL_TYPES" => {
                let n: usize = tk.parse("cell type count")?;
                for _ in 0..n {
                    types.push(tk.parse("cell type")?);
                }
            }
            "POINT_DATA" => {
                point_data = Some(tk.parse::<usize>("point data count")?);
            }
            "SCALARS" => {
                let n = point_data.ok_or_else(|| IoError::parse(line, "SCALARS outside POINT_DATA"))?;
                let _name = tk.next("scalar name")?;
                let _ty = tk.next("scalar type")?;
                // Optional component count, then a LOOKUP_TABLE line.
                let save = tk.pos;
                if tk.parse::<usize>("component count").map_or(true, |c| c != 1) {
                    tk.pos = save;
                }
                let (l2, lt) = tk.next("LOOKUP_TABLE")?;
                if !lt.eq_ignore_ascii_case("LOOKUP_TABLE") {
                    return Err(IoError::parse(l2, "expected LOOKUP_TABLE"));
                }
                tk.next("lookup table name")?;
                let mut v = Vec::with_capacity(n);
                for _ in 0..n {
                    v.push(tk.parse("scalar value")?);
                }
                if scalars.is_none() {
                    scalars = Some(ScalarField::new(v));
                }
            }
            other => {
                return Err(IoError::parse(line, format!("unsupported section {other:?}")));
            }
        }
    }
    if types.len() != cells.len() {
        return Err(IoError::parse(1, format!("{} cells but {} cell types", cells.len(), types.len())));
    }
    let mut tets = Vec::with_capacity(cells.len());
    for (i, (c, &ty)) in cells.iter().zip(&types).enumerate() {
        if ty != VTK_TETRA || c.len() != 4 {
            return Err(IoError::UnsupportedCell { cell: i, kind: ty });
        }
        tets.push([c[0], c[1], c[2], c[3]]);
    }
    let mesh = TetMesh::new(positions, tets)?;
    if let Some(f) = &scalars {
        if f.len() != mesh.num_vertices() {
            return Err(IoError::FieldLength {
                expected: mesh.num_vertices(),
                found: f.len(),
            });
        }
    }
    Ok((mesh, scalars))
}
