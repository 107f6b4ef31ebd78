//! Core data containers: feature matrices, expert knowledge, fitted weights and
//! feature-group annotations.

use std::ops::Range;

use ndarray::{Array1, Array2, ArrayView1, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_len, Error, Result};

/// Expert indicator `r`: one entry per feature in `[0, 1]`, where 1 marks a
/// feature the expert considers a known important factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeVector(Array1<f64>);

impl KnowledgeVector {
    pub fn new(values: Array1<f64>) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "knowledge entry {i} = {v} is outside [0, 1]"
                )));
            }
        }
        Ok(Self(values))
    }

    pub fn from_vec(values: Vec<f64>) -> Result<Self> {
        Self::new(Array1::from(values))
    }

    pub fn from_mask(known: &[bool]) -> Self {
        Self(known.iter().map(|&k| if k { 1.0 } else { 0.0 }).collect())
    }

    pub fn zeros(d: usize) -> Self {
        Self(Array1::zeros(d))
    }

    pub fn ones(d: usize) -> Self {
        Self(Array1::ones(d))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn view(&self) -> ArrayView1<'_, f64> {
        self.0.view()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice().expect("knowledge vector is contiguous")
    }

    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Number of entries equal to 1.
    pub fn known_count(&self) -> usize {
        self.0.iter().filter(|&&v| v == 1.0).count()
    }

    pub fn slice(&self, range: Range<usize>) -> KnowledgeVector {
        Self(self.0.slice(ndarray::s![range]).to_owned())
    }
}

/// Linear model parameters. The intercept is never penalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub theta: Array1<f64>,
    pub intercept: f64,
}

impl WeightVector {
    pub fn new(theta: Array1<f64>, intercept: f64) -> Result<Self> {
        check_finite("weights", theta.iter().chain(std::iter::once(&intercept)))?;
        Ok(Self { theta, intercept })
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            theta: Array1::zeros(d),
            intercept: 0.0,
        }
    }

    pub fn from_theta(theta: Array1<f64>) -> Self {
        Self {
            theta,
            intercept: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }
}

/// Design matrix with targets. Rows are observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(x: Array2<f64>, y: Array1<f64>) -> Result<Self> {
        let names = (0..x.ncols()).map(|j| format!("x{j}")).collect();
        Self::with_names(x, y, names)
    }

    pub fn with_names(x: Array2<f64>, y: Array1<f64>, feature_names: Vec<String>) -> Result<Self> {
        if x.nrows() == 0 {
            return Err(Error::EmptyDataset);
        }
        check_len("dataset targets", x.nrows(), y.len())?;
        check_len("feature names", x.ncols(), feature_names.len())?;
        check_finite("design matrix", x.iter())?;
        check_finite("targets", y.iter())?;
        Ok(Self {
            x,
            y,
            feature_names,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            x: self.x.select(Axis(0), rows),
            y: self.y.select(Axis(0), rows),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Fits a column standardizer on this dataset and returns the transformed copy.
    pub fn standardized(&self) -> (Dataset, Standardizer) {
        let scaler = Standardizer::fit(&self.x);
        (scaler.apply(self), scaler)
    }
}

/// Zero-mean, unit-variance column scaling (population variance). Constant
/// columns are centered and left unscaled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Array1<f64>,
    pub scales: Array1<f64>,
}

impl Standardizer {
    pub fn fit(x: &Array2<f64>) -> Self {
        let n = x.nrows() as f64;
        let means = x.mean_axis(Axis(0)).expect("non-empty matrix");
        let mut scales = Array1::ones(x.ncols());
        for (j, col) in x.axis_iter(Axis(1)).enumerate() {
            let var = col.iter().map(|v| (v - means[j]).powi(2)).sum::<f64>() / n;
            if var > 1e-24 {
                scales[j] = var.sqrt();
            }
        }
        Self { means, scales }
    }

    pub fn apply(&self, data: &Dataset) -> Dataset {
        let mut x = data.x.clone();
        for (j, mut col) in x.axis_iter_mut(Axis(1)).enumerate() {
            let (m, s) = (self.means[j], self.scales[j]);
            col.mapv_inplace(|v| (v - m) / s);
        }
        Dataset {
            x,
            y: data.y.clone(),
            feature_names: data.feature_names.clone(),
        }
    }
}

/// Row indices of a deterministic train / validation / test partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

impl SplitIndices {
    /// Shuffles `0..n` with `seed` and cuts it 60/20/20.
    pub fn shuffled(n: usize, seed: u64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!(
                "need at least 3 rows to split, got {n}"
            )));
        }
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let n_train = (n * 3 / 5).max(1);
        let n_val = (n / 5).max(1);
        let test = idx.split_off(n_train + n_val);
        let validation = idx.split_off(n_train);
        Ok(Self {
            train: idx,
            validation,
            test,
        })
    }
}

/// The three partitions of one dataset.
#[derive(Debug, Clone)]
pub struct DataSplits {
    pub train: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
}

impl DataSplits {
    /// Splits `data` by `indices`, standardizing all three parts with the
    /// statistics of the training part.
    pub fn standardized(data: &Dataset, indices: &SplitIndices) -> Self {
        let train = data.select_rows(&indices.train);
        let scaler = Standardizer::fit(&train.x);
        Self {
            train: scaler.apply(&train),
            validation: scaler.apply(&data.select_rows(&indices.validation)),
            test: scaler.apply(&data.select_rows(&indices.test)),
        }
    }

    pub fn raw(data: &Dataset, indices: &SplitIndices) -> Self {
        Self {
            train: data.select_rows(&indices.train),
            validation: data.select_rows(&indices.validation),
            test: data.select_rows(&indices.test),
        }
    }
}

/// Contiguous feature groups that partition `0..d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupLayout {
    ranges: Vec<Range<usize>>,
}

impl GroupLayout {
    pub fn new(ranges: Vec<Range<usize>>) -> Self {
        Self { ranges }
    }

    /// Builds consecutive groups from their sizes.
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let mut start = 0;
        let ranges = sizes
            .iter()
            .map(|&s| {
                let r = start..start + s;
                start += s;
                r
            })
            .collect();
        Self { ranges }
    }

    pub fn ranges(&self) -> &[Range<usize>] {
        &self.ranges
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// Checks that the groups are nonempty, ordered and cover exactly `0..d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        let mut expected_start = 0;
        for (g, r) in self.ranges.iter().enumerate() {
            if r.start != expected_start {
                return Err(Error::MalformedGroups(format!(
                    "group {g} starts at {} but previous group ended at {expected_start}",
                    r.start
                )));
            }
            if r.is_empty() {
                return Err(Error::MalformedGroups(format!("group {g} is empty")));
            }
            expected_start = r.end;
        }
        if expected_start != d {
            return Err(Error::MalformedGroups(format!(
                "groups cover 0..{expected_start} but there are {d} features"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn knowledge_rejects_out_of_range() {
        assert!(KnowledgeVector::from_vec(vec![0.0, 1.5]).is_err());
        assert!(KnowledgeVector::from_vec(vec![-0.1]).is_err());
        let r = KnowledgeVector::from_vec(vec![0.0, 0.5, 1.0]).unwrap();
        assert!(!r.is_binary());
        assert_eq!(r.known_count(), 1);
    }

    #[test]
    fn dataset_validation() {
        assert_eq!(
            Dataset::new(Array2::zeros((0, 2)), Array1::zeros(0)),
            Err(Error::EmptyDataset)
        );
        assert!(Dataset::new(array![[1.0], [2.0]], array![1.0]).is_err());
        assert!(Dataset::new(array![[f64::NAN]], array![1.0]).is_err());
    }

    #[test]
    fn standardizer_gives_zero_mean_unit_variance() {
        let d = Dataset::new(array![[1.0, 5.0], [2.0, 5.0], [6.0, 5.0]], array![0.0, 1.0, 0.0])
            .unwrap();
        let (s, _) = d.standardized();
        let col = s.x.column(0);
        let mean = col.sum() / 3.0;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-12);
        assert!(s.x.column(1).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn split_is_a_deterministic_partition() {
        let a = SplitIndices::shuffled(100, 9).unwrap();
        let b = SplitIndices::shuffled(100, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.train.len(), a.validation.len(), a.test.len()), (60, 20, 20));
        let mut all: Vec<usize> = a
            .train
            .iter()
            .chain(&a.validation)
            .chain(&a.test)
            .copied()
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn group_layout_validation() {
        assert!(GroupLayout::from_sizes(&[2, 3]).validate(5).is_ok());
        assert!(GroupLayout::from_sizes(&[2, 3]).validate(6).is_err());
        assert!(GroupLayout::new(vec![0..2, 3..5]).validate(5).is_err());
        assert!(GroupLayout::new(vec![0..2, 2..2, 2..5]).validate(5).is_err());
    }
}
