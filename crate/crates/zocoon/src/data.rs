//! LIBSVM-format dataset loading, label normalization, and subsetting.
//!
//! The accepted text format is one example per line:
//!
//! ```text
//! <label> <index>:<value> <index>:<value> ...
//! ```
//!
//! with 1-based, strictly ascending indices, optional `+` on the label,
//! scientific notation in values, blank lines skipped, and everything from
//! `#` to the end of a line treated as a comment. Labels are normalized to
//! `{+1, -1}`: files using `{1, 2}` (covtype convention) map 2 to -1, files
//! using `{0, 1}` map 0 to -1, anything else is rejected.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::vector::SparseExample;

/// An in-memory sparse dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    examples: Vec<SparseExample>,
    dimension: usize,
    name: String,
}

impl Dataset {
    pub fn new(examples: Vec<SparseExample>, dimension: usize, name: impl Into<String>) -> Result<Self> {
        for ex in &examples {
            if let Some(max) = ex.max_index() {
                if max as usize >= dimension {
                    return Err(Error::Dimension {
                        expected: max as usize + 1,
                        got: dimension,
                    });
                }
            }
        }
        Ok(Dataset {
            examples,
            dimension,
            name: name.into(),
        })
    }

    pub fn examples(&self) -> &[SparseExample] {
        &self.examples
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Sample `n` examples without replacement, reproducibly under the seed
    /// of `rng`. `n` equal to the full size yields a permutation.
    pub fn subset(&self, n: usize, rng: &mut RngStream) -> Result<Dataset> {
        if n == 0 || n > self.examples.len() {
            return Err(Error::parameter(
                "n",
                format!("subset size {} out of range 1..={}", n, self.examples.len()),
            ));
        }
        let mut order: Vec<usize> = (0..self.examples.len()).collect();
        for i in 0..n {
            let j = i + rng.below(order.len() - i);
            order.swap(i, j);
        }
        let examples = order[..n]
            .iter()
            .map(|&i| self.examples[i].clone())
            .collect();
        Ok(Dataset {
            examples,
            dimension: self.dimension,
            name: self.name.clone(),
        })
    }

    /// Copy with every feature divided by its max absolute value over the
    /// dataset (features never seen are left untouched). Off by default in
    /// the pipeline; provided for experiments that want normalized inputs.
    pub fn scale_max_abs(&self) -> Dataset {
        let mut max_abs = vec![0.0f64; self.dimension];
        for ex in &self.examples {
            for (&i, &v) in ex.indices().iter().zip(ex.values()) {
                let a = v.abs();
                if a > max_abs[i as usize] {
                    max_abs[i as usize] = a;
                }
            }
        }
        let examples = self
            .examples
            .iter()
            .map(|ex| {
                let values = ex
                    .indices()
                    .iter()
                    .zip(ex.values())
                    .map(|(&i, &v)| {
                        let m = max_abs[i as usize];
                        if m > 0.0 {
                            v / m
                        } else {
                            v
                        }
                    })
                    .collect();
                SparseExample::new(ex.indices().to_vec(), values, ex.label())
                    .expect("scaling preserves validity")
            })
            .collect();
        Dataset {
            examples,
            dimension: self.dimension,
            name: self.name.clone(),
        }
    }

    /// Write in LIBSVM text form: label first (`+1`/`-1`), then ascending
    /// 1-based `index:value` pairs. Values use shortest round-trip decimal
    /// formatting, so `parse(serialize(d)) == d`.
    pub fn serialize<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for ex in &self.examples {
            if ex.label() > 0.0 {
                out.write_all(b"+1")?;
            } else {
                out.write_all(b"-1")?;
            }
            for (&i, &v) in ex.indices().iter().zip(ex.values()) {
                write!(out, " {}:{}", i + 1, v)?;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn serialize_to_string(&self) -> String {
        let mut buf = Vec::new();
        self.serialize(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("serialized dataset is ASCII")
    }
}

/// Raw labels found in a file, before normalization.
fn normalize_labels(raw: &[f64]) -> Result<Vec<f64>> {
    let mut distinct: Vec<f64> = Vec::new();
    for &l in raw {
        if !distinct.contains(&l) {
            distinct.push(l);
        }
    }
    let set_ok = |allowed: &[f64]| distinct.iter().all(|l| allowed.contains(l));
    let map: fn(f64) -> f64 = if set_ok(&[-1.0, 1.0]) {
        |l| l
    } else if set_ok(&[1.0, 2.0]) {
        // covtype.binary convention
        |l| if l == 2.0 { -1.0 } else { 1.0 }
    } else if set_ok(&[0.0, 1.0]) {
        |l| if l == 0.0 { -1.0 } else { 1.0 }
    } else {
        distinct.sort_by(f64::total_cmp);
        return Err(Error::Labels(
            distinct.iter().map(|l| format!("{l}")).collect(),
        ));
    };
    Ok(raw.iter().map(|&l| map(l)).collect())
}

/// Parse LIBSVM text. With `declared_dimension` set, that dimension wins and
/// any larger feature index is an error; otherwise the dimension is the
/// maximum index plus one.
pub fn parse_libsvm<R: BufRead>(
    reader: R,
    name: &str,
    declared_dimension: Option<usize>,
) -> Result<Dataset> {
    let mut rows: Vec<(Vec<u32>, Vec<f64>)> = Vec::new();
    let mut raw_labels: Vec<f64> = Vec::new();
    let mut max_index: Option<u32> = None;

    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line?;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let mut tokens = content.split_whitespace();
        let label_tok = match tokens.next() {
            Some(t) => t,
            None => continue, // blank or comment-only line
        };
        let label: f64 = label_tok.parse().map_err(|_| {
            Error::parse(line_no, format!("non-numeric label token `{label_tok}`"))
        })?;
        if !label.is_finite() {
            return Err(Error::parse(line_no, format!("non-finite label `{label_tok}`")));
        }

        let mut indices: Vec<u32> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        for tok in tokens {
            let (idx_s, val_s) = tok.split_once(':').ok_or_else(|| {
                Error::parse(line_no, format!("expected `index:value`, got `{tok}`"))
            })?;
            let idx: u64 = idx_s.parse().map_err(|_| {
                Error::parse(line_no, format!("non-numeric feature index `{idx_s}`"))
            })?;
            if idx == 0 {
                return Err(Error::parse(line_no, "feature indices are 1-based"));
            }
            if idx > u32::MAX as u64 {
                return Err(Error::parse(line_no, format!("feature index {idx} too large")));
            }
            let val: f64 = val_s.parse().map_err(|_| {
                Error::parse(line_no, format!("non-numeric feature value `{val_s}`"))
            })?;
            let zero_based = (idx - 1) as u32;
            if let Some(&last) = indices.last() {
                if zero_based <= last {
                    return Err(Error::parse(
                        line_no,
                        format!("feature indices not ascending at index {idx}"),
                    ));
                }
            }
            if let Some(dim) = declared_dimension {
                if zero_based as usize >= dim {
                    return Err(Error::parse(
                        line_no,
                        format!("feature index {idx} exceeds declared dimension {dim}"),
                    ));
                }
            }
            indices.push(zero_based);
            values.push(val);
        }
        max_index = match (max_index, indices.last()) {
            (Some(m), Some(&l)) => Some(m.max(l)),
            (None, Some(&l)) => Some(l),
            (m, None) => m,
        };
        rows.push((indices, values));
        raw_labels.push(label);
    }

    if rows.is_empty() {
        return Err(Error::parse(0, "no examples found"));
    }
    let labels = normalize_labels(&raw_labels)?;
    let dimension = declared_dimension
        .unwrap_or_else(|| max_index.map(|m| m as usize + 1).unwrap_or(1));
    let examples = rows
        .into_iter()
        .zip(labels)
        .map(|((indices, values), label)| {
            SparseExample::new(indices, values, label).expect("validated during parse")
        })
        .collect();
    Dataset::new(examples, dimension, name)
}

/// Load a LIBSVM file from disk; the dataset name is the file stem.
pub fn load_libsvm(path: impl AsRef<Path>, declared_dimension: Option<usize>) -> Result<Dataset> {
    let path = path.as_ref();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    let file = File::open(path)?;
    parse_libsvm(BufReader::new(file), &name, declared_dimension)
}

/// Generate a synthetic binary classification dataset with a planted sparse
/// linear separator and flip noise. Feature values are binary (1.0), roughly
/// `nnz_per_row` per example, mirroring the shape of the common benchmark
/// files. Deterministic under the seed of `rng`.
pub fn synthetic_classification(
    num_examples: usize,
    dimension: usize,
    nnz_per_row: usize,
    label_flip_prob: f64,
    rng: &mut RngStream,
) -> Result<Dataset> {
    if num_examples == 0 || dimension == 0 {
        return Err(Error::parameter("num_examples", "need a nonempty dataset"));
    }
    if nnz_per_row == 0 || nnz_per_row > dimension {
        return Err(Error::parameter(
            "nnz_per_row",
            format!("must be in 1..={dimension}"),
        ));
    }
    // Planted separator with a mild bias so classes are unbalanced.
    let separator: Vec<f64> = (0..dimension).map(|_| rng.standard_normal()).collect();
    let bias = -0.5;
    let mut examples = Vec::with_capacity(num_examples);
    let mut pool: Vec<u32> = (0..dimension as u32).collect();
    for _ in 0..num_examples {
        // Partial shuffle to pick nnz distinct features.
        for i in 0..nnz_per_row {
            let j = i + rng.below(dimension - i);
            pool.swap(i, j);
        }
        let mut indices: Vec<u32> = pool[..nnz_per_row].to_vec();
        indices.sort_unstable();
        let margin: f64 = indices.iter().map(|&i| separator[i as usize]).sum::<f64>() + bias;
        let mut label = if margin >= 0.0 { 1.0 } else { -1.0 };
        if rng.uniform() < label_flip_prob {
            label = -label;
        }
        let values = vec![1.0; nnz_per_row];
        examples.push(SparseExample::new(indices, values, label)?);
    }
    Dataset::new(examples, dimension, "synthetic")
}
