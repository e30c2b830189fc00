//! Dense CSV weight snapshots: header `target,<source indices>`, one row per
//! target neuron. Absent synapses are written as 0.

use std::io::{Read, Write};

use crate::error::{Error, Result};

use super::topology::Projection;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub sources: Vec<usize>,
    pub targets: Vec<usize>,
    /// `values[r][c]` is the weight from `sources[c]` onto `targets[r]`.
    pub values: Vec<Vec<f64>>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            sources: (0..cols).collect(),
            targets: (0..rows).collect(),
            values: vec![vec![0.0; cols]; rows],
        }
    }

    pub fn rows(&self) -> usize {
        self.values.len()
    }

    pub fn cols(&self) -> usize {
        self.sources.len()
    }

    pub fn from_projection(p: &Projection, source_size: usize, target_size: usize) -> Self {
        let mut m = Self::zeros(target_size, source_size);
        for (s, t, w) in p.synapses() {
            m.values[t][s] = w;
        }
        m
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header = std::iter::once("target".to_string()).chain(self.sources.iter().map(|s| s.to_string()));
        w.write_record(header).map_err(csv_err)?;
        for (t, row) in self.targets.iter().zip(&self.values) {
            // `{:?}` keeps the shortest round-tripping representation
            let rec = std::iter::once(t.to_string()).chain(row.iter().map(|v| format!("{v:?}")));
            w.write_record(rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let header = r.headers().map_err(csv_err)?.clone();
        if header.get(0).map(str::trim) != Some("target") {
            return Err(Error::Parse("weight csv must start with a `target` column".into()));
        }
        let sources = header
            .iter()
            .skip(1)
            .map(|s| parse_index(s))
            .collect::<Result<Vec<_>>>()?;
        let mut targets = Vec::new();
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            if rec.len() != sources.len() + 1 {
                return Err(Error::Parse(format!(
                    "row has {} fields, expected {}",
                    rec.len(),
                    sources.len() + 1
                )));
            }
            targets.push(parse_index(&rec[0])?);
            let row = rec
                .iter()
                .skip(1)
                .map(|v| {
                    let x: f64 = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("invalid weight `{v}`")))?;
                    if x.is_finite() {
                        Ok(x)
                    } else {
                        Err(Error::Parse(format!("non-finite weight `{v}`")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            values.push(row);
        }
        Ok(Self {
            sources,
            targets,
            values,
        })
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        Self::read_csv(text.as_bytes())
    }
}

fn parse_index(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid neuron index `{s}`")))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::topology::ProjectionKind;

    #[test]
    fn round_trip_is_exact() {
        let p = Projection::new(
            "p",
            0,
            1,
            3,
            2,
            ProjectionKind::Feedforward,
            1,
            true,
            vec![(0, 0, 0.1), (2, 1, 1.0 / 3.0), (1, 1, 0.7)],
        )
        .unwrap();
        let m = DenseMatrix::from_projection(&p, 3, 2);
        let text = m.to_csv_string();
        assert!(text.starts_with("target,0,1,2\n"));
        assert_eq!(DenseMatrix::parse_csv(&text).unwrap(), m);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(DenseMatrix::parse_csv("source,0\n0,1\n").is_err());
        assert!(DenseMatrix::parse_csv("target,0,1\n0,1\n").is_err());
        assert!(DenseMatrix::parse_csv("target,a\n0,1\n").is_err());
        assert!(DenseMatrix::parse_csv("target,0\n0,NaN\n").is_err());
    }
}
