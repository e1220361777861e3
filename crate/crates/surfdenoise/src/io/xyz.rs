//! Plain-text point lists: `x y z` or `x y z nx ny nz` per line.

use std::io::{BufRead, Write};

use surfdenoise_core::cloud::PointCloud;
use surfdenoise_core::Vec3;

use super::format_significant;
use crate::error::{Error, Result};

const DIGITS: usize = 12;

/// Reads points; normals are kept only when every line carries them.
pub fn read_xyz<R: BufRead>(reader: R) -> Result<PointCloud> {
    let mut points = Vec::new();
    let mut normals = Vec::new();
    let mut with_normals = None;
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let vals = content
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::parse(lineno, format!("bad number `{t}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let has = match vals.len() {
            3 => false,
            6 => true,
            k => return Err(Error::parse(lineno, format!("expected 3 or 6 values, found {k}"))),
        };
        match with_normals {
            None => with_normals = Some(has),
            Some(h) if h != has => return Err(Error::parse(lineno, "mixed lines with and without normals")),
            _ => {}
        }
        points.push(Vec3::new(vals[0], vals[1], vals[2]));
        if has {
            normals.push(Vec3::new(vals[3], vals[4], vals[5]));
        }
    }
    if with_normals == Some(true) {
        Ok(PointCloud::with_normals(points, normals)?)
    } else {
        Ok(PointCloud::new(points))
    }
}

/// Writes one line per point, with normals when given.
pub fn write_xyz<W: Write>(points: &[Vec3], normals: Option<&[Vec3]>, w: &mut W) -> Result<()> {
    let f = |x: f64| format_significant(x, DIGITS);
    for (i, p) in points.iter().enumerate() {
        match normals {
            Some(n) => {
                let q = n[i];
                writeln!(w, "{} {} {} {} {} {}", f(p.x), f(p.y), f(p.z), f(q.x), f(q.y), f(q.z))?
            }
            None => writeln!(w, "{} {} {}", f(p.x), f(p.y), f(p.z))?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_normals() {
        let pts = vec![Vec3::new(0.1, 0.2, 0.3), Vec3::new(-1.0, 2.5, 1e-3)];
        let nrm = vec![Vec3::Z, Vec3::X];
        let mut buf = Vec::new();
        write_xyz(&pts, Some(&nrm), &mut buf).unwrap();
        let c = read_xyz(&buf[..]).unwrap();
        assert_eq!(c.points(), &pts[..]);
        assert_eq!(c.normals().unwrap(), &nrm[..]);
    }

    #[test]
    fn malformed() {
        assert!(read_xyz("1 2\n".as_bytes()).is_err());
        assert!(read_xyz("1 2 3\n1 2 3 0 0 1\n".as_bytes()).is_err());
        assert!(read_xyz("1 2 3\n\n# c\n4 5 6\n".as_bytes())
            .unwrap()
            .normals()
            .is_none());
    }
}
