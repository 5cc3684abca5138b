//! Labeled clearance datasets and their on-disk text format.
//!
//! A dataset is an ordered list of extended configurations with their exact
//! signed clearance labels, split into a training prefix and an evaluation
//! suffix. Collection draws every configuration sequentially from the
//! seeded stream, then labels them with the oracle in fixed-size chunks;
//! the chunking is a pure performance detail and never changes the result.
//!
//! The file format is a single header line
//!
//! ```text
//! neuroclear-dataset v1 env=<name> d_r=<k> d_w=<m> n=<count> split=<idx>
//! ```
//!
//! followed by one CSV row per sample: robot coordinates, workspace
//! coordinates, then the label, each printed with 17 significant digits so
//! a load reproduces the saved doubles bit for bit.

use crate::cspace::{Environment, ExtendedConfig, Rng};
use crate::error::{Error, Result};
use crate::exec;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Samples labeled per parallel chunk during collection.
const LABEL_CHUNK: usize = 512;

/// One labeled point: extended configuration and its clamped signed
/// clearance.
#[derive(Debug, Clone, PartialEq)]
pub struct ClearanceSample {
    pub cfg: ExtendedConfig,
    pub d: f64,
}

/// An ordered, split, labeled collection tied to one environment.
#[derive(Debug, Clone, PartialEq)]
pub struct ClearanceDataset {
    env_name: String,
    d_r: usize,
    d_w: usize,
    samples: Vec<ClearanceSample>,
    split_index: usize,
}

impl ClearanceDataset {
    pub fn new(
        env_name: impl Into<String>,
        d_r: usize,
        d_w: usize,
        samples: Vec<ClearanceSample>,
        split_index: usize,
    ) -> Result<Self> {
        let env_name = env_name.into();
        if env_name.is_empty() || env_name.contains(char::is_whitespace) {
            return Err(Error::InvalidConstruction(format!(
                "dataset environment name {env_name:?} must be a nonempty token"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InvalidConstruction(
                "dataset needs at least one sample".into(),
            ));
        }
        if split_index > samples.len() {
            return Err(Error::InvalidConstruction(format!(
                "split index {split_index} past the end of {} samples",
                samples.len()
            )));
        }
        for (i, s) in samples.iter().enumerate() {
            if s.cfg.robot().len() != d_r || s.cfg.workspace().len() != d_w {
                return Err(Error::InvalidConstruction(format!(
                    "sample {i} has shape ({}, {}), dataset declares ({d_r}, {d_w})",
                    s.cfg.robot().len(),
                    s.cfg.workspace().len()
                )));
            }
        }
        Ok(ClearanceDataset {
            env_name,
            d_r,
            d_w,
            samples,
            split_index,
        })
    }

    pub fn env_name(&self) -> &str {
        &self.env_name
    }

    pub fn d_r(&self) -> usize {
        self.d_r
    }

    pub fn d_w(&self) -> usize {
        self.d_w
    }

    pub fn d_e(&self) -> usize {
        self.d_r + self.d_w
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn split_index(&self) -> usize {
        self.split_index
    }

    pub fn samples(&self) -> &[ClearanceSample] {
        &self.samples
    }

    pub fn train_split(&self) -> &[ClearanceSample] {
        &self.samples[..self.split_index]
    }

    pub fn eval_split(&self) -> &[ClearanceSample] {
        &self.samples[self.split_index..]
    }
}

/// Draw and label `n_train + n_eval` uniform samples of the extended
/// space; the first `n_train` form the training split.
pub fn collect(
    env: &Environment,
    n_train: usize,
    n_eval: usize,
    rng: &mut Rng,
) -> Result<ClearanceDataset> {
    collect_with_chunk(env, n_train, n_eval, rng, LABEL_CHUNK)
}

fn collect_with_chunk(
    env: &Environment,
    n_train: usize,
    n_eval: usize,
    rng: &mut Rng,
    chunk: usize,
) -> Result<ClearanceDataset> {
    let n = n_train + n_eval;
    if n == 0 {
        return Err(Error::InvalidConstruction(
            "collection request for zero samples".into(),
        ));
    }
    // Draws come off the stream one by one before any labeling starts, so
    // the configurations depend only on the seed, not on the chunking.
    let configs: Vec<ExtendedConfig> = (0..n).map(|_| env.space().sample(rng)).collect();
    let label_chunks = exec::map_chunks(n, chunk, |range| {
        range
            .map(|i| env.clearance(&configs[i]).map(|c| c.value()))
            .collect::<Result<Vec<f64>>>()
    });
    let mut samples = Vec::with_capacity(n);
    for (chunk_index, labels) in label_chunks.into_iter().enumerate() {
        let labels = labels?;
        let base = chunk_index * chunk;
        for (offset, d) in labels.into_iter().enumerate() {
            samples.push(ClearanceSample {
                cfg: configs[base + offset].clone(),
                d,
            });
        }
    }
    ClearanceDataset::new(env.name(), env.d_r(), env.d_w(), samples, n_train)
}

/// Save in the versioned text format, 17 significant digits per value.
pub fn save(dataset: &ClearanceDataset, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    writeln!(
        w,
        "neuroclear-dataset v1 env={} d_r={} d_w={} n={} split={}",
        dataset.env_name,
        dataset.d_r,
        dataset.d_w,
        dataset.samples.len(),
        dataset.split_index
    )?;
    let mut row = String::new();
    for sample in &dataset.samples {
        row.clear();
        for v in sample.cfg.robot().iter().chain(sample.cfg.workspace()) {
            row.push_str(&format!("{v:.16e}"));
            row.push(',');
        }
        row.push_str(&format!("{:.16e}", sample.d));
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    Ok(())
}

fn header_field<'a>(token: Option<&'a str>, key: &str, line: usize) -> Result<&'a str> {
    let token = token.ok_or_else(|| Error::MalformedFile {
        what: "dataset",
        line,
        msg: format!("missing header field {key}"),
    })?;
    token.strip_prefix(key).and_then(|t| t.strip_prefix('=')).ok_or_else(|| {
        Error::MalformedFile {
            what: "dataset",
            line,
            msg: format!("expected {key}=<value>, got {token:?}"),
        }
    })
}

fn parse_count(text: &str, key: &str, line: usize) -> Result<usize> {
    text.parse().map_err(|_| Error::MalformedFile {
        what: "dataset",
        line,
        msg: format!("{key} value {text:?} is not a count"),
    })
}

/// Load a dataset saved by [`save`], reproducing every double bit-exactly.
pub fn load(path: impl AsRef<Path>) -> Result<ClearanceDataset> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or(Error::MalformedFile {
        what: "dataset",
        line: 1,
        msg: "file is empty".into(),
    })?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("neuroclear-dataset") {
        return Err(Error::MalformedFile {
            what: "dataset",
            line: 1,
            msg: "missing neuroclear-dataset magic".into(),
        });
    }
    match tokens.next() {
        Some("v1") => {}
        other => {
            return Err(Error::MalformedFile {
                what: "dataset",
                line: 1,
                msg: format!("unsupported version {other:?}"),
            })
        }
    }
    let env_name = header_field(tokens.next(), "env", 1)?.to_string();
    let d_r = parse_count(header_field(tokens.next(), "d_r", 1)?, "d_r", 1)?;
    let d_w = parse_count(header_field(tokens.next(), "d_w", 1)?, "d_w", 1)?;
    let n = parse_count(header_field(tokens.next(), "n", 1)?, "n", 1)?;
    let split = parse_count(header_field(tokens.next(), "split", 1)?, "split", 1)?;

    let width = d_r + d_w + 1;
    let mut samples = Vec::with_capacity(n);
    for (i, row) in lines.enumerate() {
        let line_no = i + 2;
        if i >= n {
            return Err(Error::MalformedFile {
                what: "dataset",
                line: line_no,
                msg: format!("more rows than the declared n={n}"),
            });
        }
        let mut values = Vec::with_capacity(width);
        for field in row.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| Error::MalformedFile {
                what: "dataset",
                line: line_no,
                msg: format!("field {field:?} is not a number"),
            })?;
            values.push(v);
        }
        if values.len() != width {
            return Err(Error::MalformedFile {
                what: "dataset",
                line: line_no,
                msg: format!("expected {width} fields, got {}", values.len()),
            });
        }
        let d = values.pop().expect("width is at least one");
        let workspace = values.split_off(d_r);
        samples.push(ClearanceSample {
            cfg: ExtendedConfig::new(values, workspace),
            d,
        });
    }
    if samples.len() != n {
        return Err(Error::MalformedFile {
            what: "dataset",
            line: samples.len() + 2,
            msg: format!("expected {n} rows, found {}", samples.len()),
        });
    }
    ClearanceDataset::new(env_name, d_r, d_w, samples, split)
}
