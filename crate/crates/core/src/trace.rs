//! Receiver time series and their CSV / JSON sidecar formats.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{Point, FOCUS};

/// Receiver location: at the source, or at `e = (1, 0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Receiver {
    Origin,
    Focus,
}

impl Receiver {
    pub fn position(self) -> Point {
        match self {
            Receiver::Origin => [0.0; 3],
            Receiver::Focus => FOCUS,
        }
    }

    /// First arrival of the direct wave.
    pub fn arrival_time(self) -> f64 {
        match self {
            Receiver::Origin => 0.0,
            Receiver::Focus => 1.0,
        }
    }
}

/// Sampled receiver data: `U = δ(t − |a|)/(4π|a|)·c + H(t − |a|) R(t, a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub receiver: Receiver,
    pub arrival_time: f64,
    pub singular_coefficient: [f64; 2],
    pub times: Vec<f64>,
    pub regular: Vec<[f64; 2]>,
}

/// Everything in a [`Trace`] except the samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMetadata {
    pub receiver: Receiver,
    pub arrival_time: f64,
    pub singular_coefficient: [f64; 2],
    pub samples: usize,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub extra: serde_json::Value,
}

pub fn check_times(times: &[f64], after: f64) -> Result<()> {
    if let Some(i) = times.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::NonmonotoneTimes(i + 1));
    }
    if let Some(&t0) = times.first() {
        if !(t0 > after) {
            return Err(Error::NonmonotoneTimes(0));
        }
    }
    Ok(())
}

impl Trace {
    pub fn new(receiver: Receiver, times: Vec<f64>, regular: Vec<[f64; 2]>) -> Result<Self> {
        if times.len() != regular.len() {
            return Err(Error::Format(format!(
                "{} times but {} samples",
                times.len(),
                regular.len()
            )));
        }
        check_times(&times, receiver.arrival_time())?;
        Ok(Self {
            receiver,
            arrival_time: receiver.arrival_time(),
            singular_coefficient: [1.0, 1.0],
            times,
            regular,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `R₁ + R₂` per sample.
    pub fn component_sum(&self) -> Vec<f64> {
        self.regular.iter().map(|r| r[0] + r[1]).collect()
    }

    /// Largest absolute difference of the regular parts over both components.
    pub fn sup_distance(&self, other: &Trace) -> f64 {
        self.regular
            .iter()
            .zip(&other.regular)
            .map(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs()))
            .fold(0.0, f64::max)
    }

    pub fn metadata(&self) -> TraceMetadata {
        TraceMetadata {
            receiver: self.receiver,
            arrival_time: self.arrival_time,
            singular_coefficient: self.singular_coefficient,
            samples: self.len(),
            extra: serde_json::Value::Null,
        }
    }

    /// Writes `t,u1_reg,u2_reg` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,u1_reg,u2_reg")?;
        for (t, r) in self.times.iter().zip(&self.regular) {
            writeln!(w, "{t:.16e},{:.16e},{:.16e}", r[0], r[1])?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, receiver: Receiver) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["t", "u1_reg", "u2_reg"];
        if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h != e) {
            return Err(Error::Format(format!(
                "unexpected trace header {headers:?}"
            )));
        }
        let mut times = Vec::new();
        let mut regular = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let num = |k: usize| {
                rec[k]
                    .parse::<f64>()
                    .map_err(|_| Error::Format(format!("row {row}: bad number {:?}", &rec[k])))
            };
            times.push(num(0)?);
            regular.push([num(1)?, num(2)?]);
        }
        Self::new(receiver, times, regular)
    }

    /// Writes `<stem>.csv` and the `<stem>.json` sidecar.
    pub fn write_files(&self, dir: &Path, stem: &str, extra: serde_json::Value) -> Result<()> {
        self.write_csv(std::fs::File::create(dir.join(format!("{stem}.csv")))?)?;
        let mut meta = self.metadata();
        meta.extra = extra;
        let json = serde_json::to_string_pretty(&meta)?;
        std::fs::write(dir.join(format!("{stem}.json")), json + "\n")?;
        Ok(())
    }

    /// Reads a trace CSV; the receiver comes from the sidecar when present.
    pub fn read_files(csv_path: &Path, default_receiver: Receiver) -> Result<Self> {
        let sidecar = csv_path.with_extension("json");
        let receiver = if sidecar.exists() {
            let meta: TraceMetadata = serde_json::from_str(&std::fs::read_to_string(sidecar)?)?;
            meta.receiver
        } else {
            default_receiver
        };
        Self::read_csv(std::fs::File::open(csv_path)?, receiver)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let times: Vec<f64> = (1..=20).map(|k| 1.0 + k as f64 / 7.0).collect();
        let regular = times
            .iter()
            .map(|t| [t.sin() / 3.0, (t * 1e-9).exp()])
            .collect();
        let tr = Trace::new(Receiver::Focus, times, regular).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let back = Trace::read_csv(&buf[..], Receiver::Focus).unwrap();
        assert_eq!(tr, back);
    }

    #[test]
    fn rejects_unsorted_or_early_times() {
        let r = Trace::new(Receiver::Origin, vec![0.1, 0.1], vec![[0.0; 2]; 2]);
        assert!(matches!(r, Err(Error::NonmonotoneTimes(1))));
        let r = Trace::new(Receiver::Focus, vec![0.9, 1.2], vec![[0.0; 2]; 2]);
        assert!(matches!(r, Err(Error::NonmonotoneTimes(0))));
    }

    #[test]
    fn bad_header_is_a_format_error() {
        let r = Trace::read_csv("a,b,c\n1,2,3\n".as_bytes(), Receiver::Origin);
        assert!(matches!(r, Err(Error::Format(_))));
    }
}
