//! Structured grids, field I/O and OBJ polyline export.
//!
//! Fields are sampled on a uniform cubic lattice, values stored x-fastest.
//! The on-disk format is a short ASCII header (origin, spacing, dims)
//! followed by the raw little-endian f64 payload.

use crate::error::{Error, Result};
use crate::vec3::{vec3, Vec3};
use serde::Serialize;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

/// Certificates attached to constructed scalar fields.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    /// Worst `|xi(x)-xi(y)| - d(x,y)` over the random node pairs tested;
    /// must stay below the allowance of two grid spacings.
    pub lipschitz_metric_slack: f64,
    pub lipschitz_pairs: usize,
    /// Allowed slack, two grid spacings.
    pub lipschitz_allowance: f64,
    /// Signed sum over the matched singularities, sampled from the grid.
    pub gap: f64,
    /// Required lower bound for the gap.
    pub gap_target: f64,
    /// Worst finite-difference edge increment relative to its certified
    /// allowance (at most 1 when the bound holds).
    pub gradient_worst_ratio: f64,
    pub gradient_edges: usize,
    pub eta: f64,
    pub delta: f64,
    /// Mollifier radius and shrink factor used in construction.
    pub t: f64,
    pub beta: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalarFieldGrid {
    pub origin: Vec3,
    pub h: f64,
    pub dims: [usize; 3],
    /// x-fastest: `values[(k*ny + j)*nx + i]`.
    #[serde(skip)]
    pub values: Vec<f64>,
    pub certificate: Option<Certificate>,
}

impl ScalarFieldGrid {
    pub fn new(origin: Vec3, h: f64, dims: [usize; 3]) -> ScalarFieldGrid {
        ScalarFieldGrid {
            origin,
            h,
            dims,
            values: vec![0.0; dims[0] * dims[1] * dims[2]],
            certificate: None,
        }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.dims[1] + j) * self.dims[0] + i
    }

    #[inline]
    pub fn pos(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.origin + vec3(i as f64, j as f64, k as f64) * self.h
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_corner(&self) -> Vec3 {
        self.pos(self.dims[0] - 1, self.dims[1] - 1, self.dims[2] - 1)
    }

    /// Trilinear interpolation; errors outside the grid hull.
    pub fn sample(&self, p: Vec3) -> Result<f64> {
        let rel = (p - self.origin) / self.h;
        let (fx, fy, fz) = (rel.x, rel.y, rel.z);
        let tol = 1e-9;
        let (nx, ny, nz) = (self.dims[0], self.dims[1], self.dims[2]);
        if fx < -tol
            || fy < -tol
            || fz < -tol
            || fx > (nx - 1) as f64 + tol
            || fy > (ny - 1) as f64 + tol
            || fz > (nz - 1) as f64 + tol
        {
            return Err(Error::OutOfBox(format!("sample point {p:?} outside grid")));
        }
        let clampf = |f: f64, n: usize| f.clamp(0.0, (n - 1) as f64);
        let (fx, fy, fz) = (clampf(fx, nx), clampf(fy, ny), clampf(fz, nz));
        let i = (fx.floor() as usize).min(nx.saturating_sub(2));
        let j = (fy.floor() as usize).min(ny.saturating_sub(2));
        let k = (fz.floor() as usize).min(nz.saturating_sub(2));
        let (tx, ty, tz) = (fx - i as f64, fy - j as f64, fz - k as f64);
        let v = |di: usize, dj: usize, dk: usize| -> f64 {
            self.values[self.idx(
                (i + di).min(nx - 1),
                (j + dj).min(ny - 1),
                (k + dk).min(nz - 1),
            )]
        };
        let c00 = v(0, 0, 0) * (1.0 - tx) + v(1, 0, 0) * tx;
        let c10 = v(0, 1, 0) * (1.0 - tx) + v(1, 1, 0) * tx;
        let c01 = v(0, 0, 1) * (1.0 - tx) + v(1, 0, 1) * tx;
        let c11 = v(0, 1, 1) * (1.0 - tx) + v(1, 1, 1) * tx;
        let c0 = c00 * (1.0 - ty) + c10 * ty;
        let c1 = c01 * (1.0 - ty) + c11 * ty;
        Ok(c0 * (1.0 - tz) + c1 * tz)
    }

    /// Write the field: ASCII header, then little-endian f64 payload in
    /// x-fastest order.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        self.write_binary_with_meta(path, &[])
    }

    /// Same format with `#`-prefixed annotation lines after the magic
    /// (readers skip them).
    pub fn write_binary_with_meta(&self, path: &Path, meta: &[String]) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = BufWriter::new(f);
        writeln!(w, "sfield 1")?;
        for m in meta {
            writeln!(w, "# {m}")?;
        }
        writeln!(w, "origin {:.17e} {:.17e} {:.17e}", self.origin.x, self.origin.y, self.origin.z)?;
        writeln!(w, "h {:.17e}", self.h)?;
        writeln!(w, "dims {} {} {}", self.dims[0], self.dims[1], self.dims[2])?;
        writeln!(w, "data")?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary(path: &Path) -> Result<ScalarFieldGrid> {
        let f = std::fs::File::open(path)?;
        let mut r = BufReader::new(f);
        let mut line = String::new();

        let mut read_line = |r: &mut BufReader<std::fs::File>| -> Result<String> {
            loop {
                line.clear();
                r.read_line(&mut line)?;
                if !line.starts_with('#') {
                    return Ok(line.trim_end().to_string());
                }
            }
        };
        let magic = read_line(&mut r)?;
        if magic != "sfield 1" {
            return Err(Error::Parse(format!("bad field magic {magic:?}")));
        }
        let parse_floats = |s: &str, key: &str, n: usize| -> Result<Vec<f64>> {
            let mut it = s.split_whitespace();
            if it.next() != Some(key) {
                return Err(Error::Parse(format!("expected {key} line, got {s:?}")));
            }
            let vals: Vec<f64> = it.map(|t| t.parse::<f64>()).collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("{key}: {e}")))?;
            if vals.len() != n {
                return Err(Error::Parse(format!("{key}: expected {n} values")));
            }
            Ok(vals)
        };
        let o = parse_floats(&read_line(&mut r)?, "origin", 3)?;
        let h = parse_floats(&read_line(&mut r)?, "h", 1)?[0];
        let dline = read_line(&mut r)?;
        let mut it = dline.split_whitespace();
        if it.next() != Some("dims") {
            return Err(Error::Parse(format!("expected dims line, got {dline:?}")));
        }
        let dims: Vec<usize> = it
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("dims: {e}")))?;
        if dims.len() != 3 {
            return Err(Error::Parse("dims: expected 3 values".into()));
        }
        if read_line(&mut r)? != "data" {
            return Err(Error::Parse("expected data line".into()));
        }
        let n = dims[0] * dims[1] * dims[2];
        let mut payload = vec![0u8; n * 8];
        r.read_exact(&mut payload)
            .map_err(|e| Error::Parse(format!("field payload short: {e}")))?;
        let values: Vec<f64> = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(ScalarFieldGrid {
            origin: vec3(o[0], o[1], o[2]),
            h,
            dims: [dims[0], dims[1], dims[2]],
            values,
            certificate: None,
        })
    }
}

/// Complex-valued field on the same layout (two reals per node).
#[derive(Clone, Debug)]
pub struct GridField3D {
    pub origin: Vec3,
    pub h: f64,
    pub dims: [usize; 3],
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl GridField3D {
    pub fn new(origin: Vec3, h: f64, dims: [usize; 3]) -> GridField3D {
        let n = dims[0] * dims[1] * dims[2];
        GridField3D {
            origin,
            h,
            dims,
            re: vec![0.0; n],
            im: vec![0.0; n],
        }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.dims[1] + j) * self.dims[0] + i
    }

    #[inline]
    pub fn pos(&self, i: usize, j: usize, k: usize) -> Vec3 {
        self.origin + vec3(i as f64, j as f64, k as f64) * self.h
    }

    /// Fill from a complex-valued function of position.
    pub fn fill(&mut self, mut f: impl FnMut(Vec3) -> (f64, f64)) {
        for k in 0..self.dims[2] {
            for j in 0..self.dims[1] {
                for i in 0..self.dims[0] {
                    let (re, im) = f(self.pos(i, j, k));
                    let id = self.idx(i, j, k);
                    self.re[id] = re;
                    self.im[id] = im;
                }
            }
        }
    }
}

/// Write polylines as an OBJ file (`v` vertices, `l` line elements).
pub fn write_obj_polylines(path: &Path, polylines: &[Vec<Vec3>]) -> Result<()> {
    write_obj_polylines_with_meta(path, polylines, &[])
}

/// OBJ polylines with `#` annotation lines first.
pub fn write_obj_polylines_with_meta(
    path: &Path,
    polylines: &[Vec<Vec3>],
    meta: &[String],
) -> Result<()> {
    let f = std::fs::File::create(path)?;
    let mut w = BufWriter::new(f);
    for m in meta {
        writeln!(w, "# {m}")?;
    }
    let mut base = 1usize; // OBJ indices are 1-based
    for pl in polylines {
        for p in pl {
            writeln!(w, "v {:.12} {:.12} {:.12}", p.x, p.y, p.z)?;
        }
        if pl.len() >= 2 {
            write!(w, "l")?;
            for i in 0..pl.len() {
                write!(w, " {}", base + i)?;
            }
            writeln!(w)?;
        }
        base += pl.len();
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trilinear_reproduces_affine() {
        let mut g = ScalarFieldGrid::new(vec3(-1.0, -1.0, -1.0), 0.25, [9, 9, 9]);
        let f = |p: Vec3| 1.5 + 2.0 * p.x - 0.5 * p.y + 3.0 * p.z;
        for k in 0..9 {
            for j in 0..9 {
                for i in 0..9 {
                    let id = g.idx(i, j, k);
                    g.values[id] = f(g.pos(i, j, k));
                }
            }
        }
        for p in [
            vec3(0.0, 0.0, 0.0),
            vec3(0.123, -0.456, 0.789),
            vec3(-1.0, -1.0, -1.0),
            vec3(1.0, 1.0, 1.0),
        ] {
            assert!((g.sample(p).unwrap() - f(p)).abs() < 1e-12);
        }
        assert!(matches!(
            g.sample(vec3(1.2, 0.0, 0.0)),
            Err(Error::OutOfBox(_))
        ));
    }

    #[test]
    fn binary_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.sfield");
        let mut g = ScalarFieldGrid::new(vec3(0.25, -0.5, 1.0), 0.125, [4, 3, 5]);
        for (i, v) in g.values.iter_mut().enumerate() {
            *v = (i as f64).sin() * 1e3 + 1e-17;
        }
        g.write_binary(&path).unwrap();
        let g2 = ScalarFieldGrid::read_binary(&path).unwrap();
        assert_eq!(g2.dims, g.dims);
        assert_eq!(g2.h, g.h);
        assert_eq!(g2.origin, g.origin);
        assert_eq!(g2.values, g.values); // bitwise
    }

    #[test]
    fn obj_writer_emits_vertices_and_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("link.obj");
        write_obj_polylines(
            &path,
            &[
                vec![vec3(0.0, 0.0, 0.0), vec3(1.0, 0.0, 0.0)],
                vec![vec3(0.0, 1.0, 0.0), vec3(0.0, 1.0, 1.0), vec3(1.0, 1.0, 1.0)],
            ],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 5);
        let lines: Vec<&str> = text.lines().filter(|l| l.starts_with("l")).collect();
        assert_eq!(lines, vec!["l 1 2", "l 3 4 5"]);
    }
}
