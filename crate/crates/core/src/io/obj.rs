//! Wavefront OBJ output (1-based indices).

use std::io::Write;

use crate::mesh::Point;

pub fn write_triangles(w: &mut impl Write, pts: &[Point], triangles: &[[usize; 3]]) -> std::io::Result<()> {
    for p in pts {
        writeln!(w, "v {} {} {}", p.x, p.y, p.z)?;
    }
    for t in triangles {
        writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}

/// Each polyline becomes one `l` record over its own run of vertices.
pub fn write_polylines(w: &mut impl Write, lines: &[Vec<Point>]) -> std::io::Result<()> {
    let mut base = 1;
    for l in lines {
        for p in l {
            writeln!(w, "v {} {} {}", p.x, p.y, p.z)?;
        }
        if l.len() >= 2 {
            write!(w, "l")?;
            for k in 0..l.len() {
                write!(w, " {}", base + k)?;
            }
            writeln!(w)?;
        }
        base += l.len();
    }
    Ok(())
}
