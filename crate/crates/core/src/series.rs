//! Time-indexed correlation data and its CSV/JSON serialization.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which time axis the samples live on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeAxis {
    Real,
    Imaginary,
}

/// Metadata carried alongside every correlator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub method: String,
    pub beta: f64,
    /// Power `n` of the operator `q̂ⁿ`.
    pub order: u32,
    pub axis: TimeAxis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<crate::spectral::GridSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSeries {
    pub meta: SeriesMeta,
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
}

#[derive(Serialize)]
struct CsvRow {
    t: f64,
    re: f64,
    im: f64,
}

impl CorrelationSeries {
    pub fn new(meta: SeriesMeta, times: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::param(
                "values",
                format!("{} values for {} times", values.len(), times.len()),
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("times", "must be strictly increasing"));
        }
        if values
            .iter()
            .any(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::param("values", "non-finite correlator value"));
        }
        Ok(Self {
            meta,
            times,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Largest pointwise modulus of the difference to `other` on the same grid.
    pub fn max_abs_diff(&self, other: &CorrelationSeries) -> f64 {
        assert_eq!(self.len(), other.len(), "series lengths differ");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Writes `t,re,im` rows; an optional leading `# key: value` comment line
    /// tags the file with the producing configuration.
    pub fn write_csv<W: Write>(&self, mut out: W, tag: Option<&str>) -> Result<()> {
        if let Some(tag) = tag {
            writeln!(out, "# {tag}")?;
        }
        let mut writer = csv::Writer::from_writer(out);
        for (&t, v) in self.times.iter().zip(&self.values) {
            writer.serialize(CsvRow {
                t,
                re: v.re,
                im: v.im,
            })?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path, tag: Option<&str>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?, tag)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `n` uniformly spaced points on `[start, end]` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (n - 1) as f64;
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        end
                    } else {
                        start + step * i as f64
                    }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> SeriesMeta {
        SeriesMeta {
            method: "test".into(),
            beta: 1.0,
            order: 2,
            axis: TimeAxis::Real,
            potential_hash: None,
            grid: None,
        }
    }

    #[test]
    fn rejects_unsorted_times() {
        let v = vec![Complex64::new(1.0, 0.0); 2];
        assert!(CorrelationSeries::new(meta(), vec![1.0, 0.5], v).is_err());
    }

    #[test]
    fn csv_has_full_precision() {
        let s = CorrelationSeries::new(
            meta(),
            vec![0.0, 0.1],
            vec![Complex64::new(1.0 / 3.0, -0.25), Complex64::new(2.0, 0.0)],
        )
        .unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf, Some("config_sha256: abc")).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# config_sha256: abc"));
        assert_eq!(lines.next(), Some("t,re,im"));
        let row: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|x| x.parse().unwrap())
            .collect();
        assert_eq!(row[1], 1.0 / 3.0);
    }

    #[test]
    fn linspace_hits_endpoints() {
        let x = linspace(0.0, 25.0, 1001);
        assert_eq!(x.len(), 1001);
        assert_eq!(x[0], 0.0);
        assert_eq!(x[1000], 25.0);
        assert!((x[1] - 0.025).abs() < 1e-15);
    }
}
