//! The native plain-text mesh and field formats.

use std::io::{BufRead, Write};

use super::IoError;
use crate::mesh::{Point, TetMesh};
use crate::ScalarField;

pub fn write_mesh(w: &mut impl Write, mesh: &TetMesh) -> std::io::Result<()> {
    writeln!(w, "{} {}", mesh.num_vertices(), mesh.num_tets())?;
    for p in mesh.positions() {
        writeln!(w, "{} {} {}", p.x, p.y, p.z)?;
    }
    for t in mesh.tets() {
        writeln!(w, "{} {} {} {}", t[0], t[1], t[2], t[3])?;
    }
    Ok(())
}

/// Non-empty lines with their 1-based line numbers.
fn content_lines(r: impl BufRead) -> impl Iterator<Item = Result<(usize, String), IoError>> {
    r.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(l) if l.trim().is_empty() => None,
        Ok(l) => Some(Ok((i + 1, l))),
        Err(e) => Some(Err(e.into())),
    })
}

fn parse_all<T: std::str::FromStr, const N: usize>(line: usize, text: &str) -> Result<[T; N], IoError>
where
    T::Err: std::fmt::Display,
{
    let mut it = text.split_whitespace();
    let mut out = Vec::with_capacity(N);
    for _ in 0..N {
        let tok = it
            .next()
            .ok_or_else(|| IoError::parse(line, format!("expected {N} values")))?;
        out.push(tok.parse::<T>().map_err(|e| IoError::parse(line, format!("{tok:?}: {e}")))?);
    }
    if it.next().is_some() {
        return Err(IoError::parse(line, format!("expected {N} values, found more")));
    }
    out.try_into()
        .map_err(|_| IoError::parse(line, "internal arity error"))
}

/// Reads raw positions and tetrahedra without validation.
pub fn read_raw(r: impl BufRead) -> Result<(Vec<Point>, Vec<[usize; 4]>), IoError> {
    let mut lines = content_lines(r);
    let (hl, header) = lines.next().ok_or_else(|| IoError::parse(1, "empty file"))??;
    let [nv, nt] = parse_all::<usize, 2>(hl, &header)?;
    let mut positions = Vec::with_capacity(nv);
    let mut tets = Vec::with_capacity(nt);
    for k in 0..nv + nt {
        let (ln, text) = lines
            .next()
            .ok_or_else(|| IoError::parse(hl, format!("header promises {nv} vertices and {nt} tets; file ends after {k} records")))??;
        if k < nv {
            let [x, y, z] = parse_all::<f64, 3>(ln, &text)?;
            positions.push(Point::new(x, y, z));
        } else {
            tets.push(parse_all::<usize, 4>(ln, &text)?);
        }
    }
    if let Some(extra) = lines.next() {
        let (ln, _) = extra?;
        return Err(IoError::parse(ln, "trailing data after last tetrahedron"));
    }
    Ok((positions, tets))
}

pub fn read_mesh(r: impl BufRead) -> Result<TetMesh, IoError> {
    let (p, t) = read_raw(r)?;
    Ok(TetMesh::new(p, t)?)
}

pub fn write_field(w: &mut impl Write, field: &ScalarField) -> std::io::Result<()> {
    for x in field.values() {
        writeln!(w, "{x}")?;
    }
    Ok(())
}

pub fn read_field(r: impl BufRead) -> Result<ScalarField, IoError> {
    let mut values = Vec::new();
    for l in content_lines(r) {
        let (ln, text) = l?;
        let [x] = parse_all::<f64, 1>(ln, &text)?;
        values.push(x);
    }
    Ok(ScalarField::new(values))
}
