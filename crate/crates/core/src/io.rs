//! File formats: signals and grid values as CSV, configurations and reports as JSON.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::GridEvaluation;
use crate::signal::{NoiseSpec, SampledSignal, SignalModel};

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| io_err(path, e))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| io_err(path, e))
}

#[derive(Debug, Serialize, Deserialize)]
struct SignalRow {
    t: usize,
    re: f64,
    im: f64,
}

/// Reads a `t,re,im` table with `t = 1, 2, …` in order.
pub fn read_signal<R: Read>(input: R) -> Result<SampledSignal> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("signal header: {e}")))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["t", "re", "im"] {
        return Err(Error::Parse(format!(
            "signal header must be `t,re,im`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut samples = Vec::new();
    for (i, row) in reader.deserialize::<SignalRow>().enumerate() {
        let row = row.map_err(|e| Error::Parse(format!("signal row {}: {e}", i + 1)))?;
        if row.t != i + 1 {
            return Err(Error::Parse(format!(
                "signal row {}: field `t` must be {}, got {}",
                i + 1,
                i + 1,
                row.t
            )));
        }
        samples.push(Complex64::new(row.re, row.im));
    }
    if samples.is_empty() {
        return Err(Error::Parse("signal file has no samples".into()));
    }
    SampledSignal::new(samples)
}

pub fn read_signal_file(path: &Path) -> Result<SampledSignal> {
    read_signal(open(path)?)
}

pub fn write_signal<W: Write>(out: W, signal: &SampledSignal) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (i, x) in signal.samples().iter().enumerate() {
        w.serialize(SignalRow {
            t: i + 1,
            re: x.re,
            im: x.im,
        })
        .map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush().map_err(|e| io_err(Path::new("<signal output>"), e))
}

pub fn write_signal_file(path: &Path, signal: &SampledSignal) -> Result<()> {
    write_signal(create(path)?, signal)
}

#[derive(Serialize)]
struct GridRow {
    j: usize,
    theta: f64,
    re: f64,
    im: f64,
    abs: f64,
}

/// Writes `j,theta,re,im,abs` rows.
pub fn write_grid<W: Write>(out: W, eval: &GridEvaluation) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (j, v) in eval.values.iter().enumerate() {
        w.serialize(GridRow {
            j,
            theta: eval.theta(j),
            re: v.re,
            im: v.im,
            abs: v.norm(),
        })
        .map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush().map_err(|e| io_err(Path::new("<grid output>"), e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_reader(open(path)?)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{}", to_json(value)?).map_err(|e| io_err(path, e))?;
    w.flush().map_err(|e| io_err(path, e))
}

/// Input of `periodik synth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub model: SignalModel,
    #[serde(default = "NoiseSpec::none")]
    pub noise: NoiseSpec,
    pub m: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{synthesize, NoiseFamily};

    #[test]
    fn signal_round_trip_is_exact() {
        let model = SignalModel::new(vec![0.3], vec![Complex64::new(1.0, -0.5)]).unwrap();
        let s = synthesize(&model, &NoiseSpec::new(NoiseFamily::StudentT { dof: 2.5, scale: 1.0 }, 4), 50)
            .unwrap();
        let mut buf = Vec::new();
        write_signal(&mut buf, &s).unwrap();
        assert!(buf.starts_with(b"t,re,im\n1,"));
        let back = read_signal(buf.as_slice()).unwrap();
        assert_eq!(back.samples(), s.samples());
    }

    #[test]
    fn malformed_signals() {
        let bad_header = "time,re,im\n1,0,0\n";
        assert!(matches!(read_signal(bad_header.as_bytes()), Err(Error::Parse(_))));
        let bad_value = "t,re,im\n1,0,zero\n";
        let err = read_signal(bad_value.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("row 1"), "{err}");
        let gap = "t,re,im\n1,0,0\n3,0,0\n";
        let err = read_signal(gap.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("`t`"), "{err}");
        assert!(read_signal("t,re,im\n".as_bytes()).is_err());
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read_signal_file(Path::new("/nonexistent/signal.csv")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn grid_rows() {
        let eval = GridEvaluation {
            values: vec![Complex64::new(3.0, 4.0), Complex64::new(0.0, 0.0)],
            m: 1,
            grid: 2,
        };
        let mut buf = Vec::new();
        write_grid(&mut buf, &eval).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "j,theta,re,im,abs");
        assert_eq!(lines[1], "0,0.0,3.0,4.0,5.0");
    }
}
