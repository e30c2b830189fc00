//! Grayscale heatmaps: a plain PGM image, an exact CSV twin and a sidecar
//! holding the value range the gray levels were scaled from.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Gray levels run from 0 (matrix minimum) to this value (maximum).
pub const MAX_GRAY: u16 = 255;

/// Row-major matrix with every row the same length.
#[derive(Clone, Debug, PartialEq)]
pub struct Heatmap {
    pub values: Vec<Vec<f64>>,
}

/// Paths written by [`Heatmap::write`].
#[derive(Clone, Debug, PartialEq)]
pub struct HeatmapFiles {
    pub image: PathBuf,
    pub csv: PathBuf,
    pub range: PathBuf,
}

impl Heatmap {
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self> {
        let cols = values.first().map_or(0, Vec::len);
        if values.is_empty() || cols == 0 || values.iter().any(|r| r.len() != cols) {
            return Err(Error::Config("heatmap needs a non-empty rectangular matrix".into()));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Config("heatmap values must be finite".into()));
        }
        Ok(Self { values })
    }

    pub fn rows(&self) -> usize {
        self.values.len()
    }

    pub fn cols(&self) -> usize {
        self.values[0].len()
    }

    pub fn range(&self) -> (f64, f64) {
        self.values
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Gray level of `v`; a constant matrix maps to 0.
    pub fn gray(&self, v: f64) -> u16 {
        let (lo, hi) = self.range();
        if hi <= lo {
            0
        } else {
            ((v - lo) / (hi - lo) * MAX_GRAY as f64).round() as u16
        }
    }

    /// Plain (P2) PGM text.
    pub fn to_pgm(&self) -> String {
        let mut out = format!("P2\n{} {}\n{}\n", self.cols(), self.rows(), MAX_GRAY);
        for row in &self.values {
            let line: Vec<String> = row.iter().map(|&v| self.gray(v).to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// One CSV line per row; floats use their shortest exact form.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.values {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let row = line
                .split(',')
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("line {}: `{f}`: {e}", n + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            values.push(row);
        }
        Self::new(values).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Sidecar text recording the scale of the image.
    pub fn range_text(&self) -> String {
        let (lo, hi) = self.range();
        let mut out = String::new();
        let _ = writeln!(out, "min {lo:?}");
        let _ = writeln!(out, "max {hi:?}");
        let _ = writeln!(out, "rows {}", self.rows());
        let _ = writeln!(out, "cols {}", self.cols());
        out
    }

    /// Writes `<stem>.pgm`, `<stem>.csv` and `<stem>.range.txt` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<HeatmapFiles> {
        std::fs::create_dir_all(dir)?;
        let files = HeatmapFiles {
            image: dir.join(format!("{stem}.pgm")),
            csv: dir.join(format!("{stem}.csv")),
            range: dir.join(format!("{stem}.range.txt")),
        };
        std::fs::write(&files.image, self.to_pgm())?;
        std::fs::write(&files.csv, self.to_csv())?;
        std::fs::write(&files.range, self.range_text())?;
        Ok(files)
    }

    /// Elementwise mean of equally shaped heatmaps.
    pub fn mean(maps: &[Heatmap]) -> Result<Self> {
        let first = maps.first().ok_or_else(|| Error::Config("no heatmaps to average".into()))?;
        let (r, c) = (first.rows(), first.cols());
        let mut acc = vec![vec![0.0; c]; r];
        for m in maps {
            if m.rows() != r || m.cols() != c {
                return Err(Error::Dimension {
                    expected: r * c,
                    got: m.rows() * m.cols(),
                });
            }
            for (a, row) in acc.iter_mut().zip(&m.values) {
                for (x, v) in a.iter_mut().zip(row) {
                    *x += v;
                }
            }
        }
        let n = maps.len() as f64;
        acc.iter_mut().flatten().for_each(|x| *x /= n);
        Self::new(acc)
    }
}

/// Parsed plain PGM image.
#[derive(Clone, Debug, PartialEq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub max_gray: u16,
    pub pixels: Vec<u16>,
}

/// Parses a plain (P2) PGM. Comments start with `#` and run to end of line.
pub fn parse_pgm(text: &str) -> Result<Pgm> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    if tokens.next() != Some("P2") {
        return Err(Error::Parse("missing P2 magic".into()));
    }
    let mut num = |what: &str| -> Result<usize> {
        let t = tokens.next().ok_or_else(|| Error::Parse(format!("missing {what}")))?;
        t.parse().map_err(|_| Error::Parse(format!("bad {what} `{t}`")))
    };
    let width = num("width")?;
    let height = num("height")?;
    let max_gray = num("maximum gray value")?;
    if width == 0 || height == 0 || max_gray == 0 || max_gray > u16::MAX as usize {
        return Err(Error::Parse("image dimensions and maximum gray value must be positive".into()));
    }
    let n = width
        .checked_mul(height)
        .filter(|&n| n <= 1 << 24)
        .ok_or_else(|| Error::Parse("image too large".into()))?;
    let mut pixels = Vec::with_capacity(n);
    for _ in 0..n {
        let v = num("pixel")?;
        if v > max_gray {
            return Err(Error::Parse(format!("pixel {v} exceeds {max_gray}")));
        }
        pixels.push(v as u16);
    }
    if tokens.next().is_some() {
        return Err(Error::Parse("trailing data after pixels".into()));
    }
    Ok(Pgm {
        width,
        height,
        max_gray: max_gray as u16,
        pixels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_scales_between_extremes() {
        let h = Heatmap::new(vec![vec![-1.0, 0.0], vec![0.5, 1.0]]).unwrap();
        let pgm = parse_pgm(&h.to_pgm()).unwrap();
        assert_eq!((pgm.width, pgm.height, pgm.max_gray), (2, 2, 255));
        assert_eq!(pgm.pixels, vec![0, 128, 191, 255]);
        assert_eq!(h.range(), (-1.0, 1.0));
        assert!(h.range_text().starts_with("min -1.0\nmax 1.0\n"));
    }

    #[test]
    fn constant_matrix_is_black() {
        let h = Heatmap::new(vec![vec![0.3; 3]; 2]).unwrap();
        assert!(parse_pgm(&h.to_pgm()).unwrap().pixels.iter().all(|&p| p == 0));
    }

    #[test]
    fn csv_twin_is_exact() {
        let h = Heatmap::new(vec![vec![0.1 + 0.2, 1e-300], vec![-3.5, 2.0 / 3.0]]).unwrap();
        assert_eq!(Heatmap::parse_csv(&h.to_csv()).unwrap(), h);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(Heatmap::new(vec![]).is_err());
        assert!(Heatmap::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(Heatmap::new(vec![vec![f64::NAN]]).is_err());
        assert!(Heatmap::parse_csv("1,x\n").is_err());
        assert!(parse_pgm("P5\n1 1\n255\n0\n").is_err());
        assert!(parse_pgm("P2\n2 1\n255\n0\n").is_err());
        assert!(parse_pgm("P2\n1 1\n255\n300\n").is_err());
        assert!(parse_pgm("P2\n1 1\n255\n3 4\n").is_err());
        assert_eq!(parse_pgm("P2 # c\n1 1\n9\n7\n").unwrap().pixels, vec![7]);
    }

    #[test]
    fn mean_of_maps() {
        let a = Heatmap::new(vec![vec![1.0, 3.0]]).unwrap();
        let b = Heatmap::new(vec![vec![3.0, 5.0]]).unwrap();
        assert_eq!(Heatmap::mean(&[a.clone(), b]).unwrap().values, vec![vec![2.0, 4.0]]);
        let c = Heatmap::new(vec![vec![1.0]]).unwrap();
        assert!(Heatmap::mean(&[a, c]).is_err());
    }
}
