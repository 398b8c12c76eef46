//! Mask files and output formats: field CSV, PGM heatmaps, matrix triplets and cost CSV.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use qufem_core::mesh::DomainMask;
use qufem_core::sparse::SparseMat;

/// Bitmap mask: one row of '0'/'1' per grid line, top row (largest y) first. Blank lines
/// and lines starting with '#' are skipped. The grid size fixes n.
pub fn parse_mask(text: &str) -> Result<DomainMask> {
    let rows: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    let nn = rows.len();
    if nn < 2 || !nn.is_power_of_two() {
        bail!("mask needs a power-of-two number of rows, got {nn}");
    }
    let n = nn.trailing_zeros() as usize;
    Ok(DomainMask::from_bitmap(n, &rows)?)
}

pub fn load_mask(path: &Path) -> Result<DomainMask> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_mask(&text).with_context(|| format!("parsing mask {}", path.display()))
}

/// "x_index,y_index,value" rows for a field stored with x on the low bits.
pub fn field_csv(v: &[f64], n: usize) -> String {
    let nn = 1usize << n;
    let mut s = String::from("x_index,y_index,value\n");
    for y in 0..nn {
        for x in 0..nn {
            writeln!(s, "{x},{y},{:e}", v[(y << n) | x]).unwrap();
        }
    }
    s
}

/// Binary greyscale PGM, min-max normalized, top row = largest y.
pub fn field_pgm(v: &[f64], n: usize) -> Vec<u8> {
    let nn = 1usize << n;
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = format!("P5\n{nn} {nn}\n255\n").into_bytes();
    for y in (0..nn).rev() {
        for x in 0..nn {
            out.push(((v[(y << n) | x] - lo) / span * 255.0).round() as u8);
        }
    }
    out
}

/// "row,col,value" rows of the real parts, in column-major order.
pub fn triplets_csv(m: &SparseMat) -> String {
    let mut s = String::from("row,col,value\n");
    for (i, j, z) in m.triplets() {
        writeln!(s, "{i},{j},{:e}", z.re).unwrap();
    }
    s
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CostRow {
    pub construct: String,
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub toffoli: u64,
    pub ancillas: usize,
}

pub fn cost_csv(rows: &[CostRow]) -> String {
    let mut s = String::from("construct,n,m,p,toffoli,ancillas\n");
    for r in rows {
        writeln!(s, "{},{},{},{},{},{}", r.construct, r.n, r.m, r.p, r.toffoli, r.ancillas).unwrap();
    }
    s
}

pub fn write(dir: &Path, name: &str, bytes: impl AsRef<[u8]>) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_round_trip() {
        let text = "# letter\n0110\n1111\n\n1001\n0000\n";
        let m = parse_mask(text).unwrap();
        assert_eq!((m.d, m.n), (2, 2));
        assert!(m.active[(3 << 2) | 1] && !m.active[3 << 2]);
        assert!(!m.active[1]);
        assert!(parse_mask("01\n10\n11\n").is_err());
        assert!(parse_mask("0120\n1111\n1111\n1111\n").is_err());
    }

    #[test]
    fn pgm_layout() {
        let v = [0.0, 1.0, 2.0, 3.0];
        let img = field_pgm(&v, 1);
        let header = b"P5\n2 2\n255\n";
        assert_eq!(&img[..header.len()], header);
        assert_eq!(&img[header.len()..], &[170, 255, 0, 85]);
        assert_eq!(field_pgm(&[1.0; 4], 1)[header.len()..], [0, 0, 0, 0]);
    }

    #[test]
    fn csv_headers() {
        let s = field_csv(&[1.0, 2.0, 3.0, 4.0], 1);
        assert_eq!(s.lines().next(), Some("x_index,y_index,value"));
        assert_eq!(s.lines().nth(3), Some("0,1,3e0"));
        let t = triplets_csv(&SparseMat::identity(2));
        assert_eq!(t, "row,col,value\n0,0,1e0\n1,1,1e0\n");
    }
}
