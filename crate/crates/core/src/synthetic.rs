//! Seeded generators for block-correlated benchmark data.
//!
//! Every generator is a pure function of its seed. Features come in
//! contiguous groups; within a group the known members are listed first
//! unless the generator samples the expert indicator itself.

use std::ops::Range;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, Normal, Poisson, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, GroupLayout, KnowledgeVector};
use crate::error::{Error, Result};
use crate::optimizer::sigmoid;

/// Rows drawn by the high-dimensional generators.
pub const DEFAULT_ROWS: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub size: usize,
    /// Pairwise correlation between members of the group.
    pub correlation: f64,
    pub n_known: usize,
    /// Total true relevance shared among the group's members.
    pub group_weight: f64,
}

impl GroupSpec {
    pub fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::InvalidParameter("group size must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.correlation) {
            return Err(Error::InvalidParameter(format!(
                "group correlation must lie in [0, 1], got {}",
                self.correlation
            )));
        }
        if self.n_known > self.size {
            return Err(Error::InvalidParameter(format!(
                "group has {} known members but only {} features",
                self.n_known, self.size
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub dataset: Dataset,
    pub r: KnowledgeVector,
    pub true_theta: Array1<f64>,
    pub groups: Vec<(GroupSpec, Range<usize>)>,
}

impl SyntheticDataset {
    pub fn layout(&self) -> GroupLayout {
        GroupLayout::new(self.groups.iter().map(|(_, r)| r.clone()).collect())
    }

    /// Number of groups without any known member, whose relevance was spread
    /// over every member.
    pub fn groups_without_knowledge(&self) -> usize {
        self.groups.iter().filter(|(g, _)| g.n_known == 0).count()
    }
}

/// `n` i.i.d. rows from `Normal(0, C)` where `C` has unit diagonal, the group
/// correlation inside each block and zeros across blocks.
///
/// Each block uses the one-factor construction `x_j = √ρ·f + √(1−ρ)·e_j`;
/// a block with `ρ = 1` is a single column copied `size` times.
pub fn sample_block_gaussian(groups: &[GroupSpec], n: usize, rng: &mut impl Rng) -> Result<Array2<f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be positive".into()));
    }
    for g in groups {
        g.validate()?;
    }
    let d: usize = groups.iter().map(|g| g.size).sum();
    let mut x = Array2::zeros((n, d));
    for i in 0..n {
        let mut col = 0;
        for g in groups {
            let factor: f64 = rng.sample(StandardNormal);
            if g.correlation == 1.0 {
                for j in col..col + g.size {
                    x[[i, j]] = factor;
                }
            } else {
                let (a, b) = (g.correlation.sqrt(), (1.0 - g.correlation).sqrt());
                for j in col..col + g.size {
                    let noise: f64 = rng.sample(StandardNormal);
                    x[[i, j]] = a * factor + b * noise;
                }
            }
            col += g.size;
        }
    }
    Ok(x)
}

/// Spreads `weight` uniformly over the known entries of `known`, or over all
/// entries when none is known.
pub fn distribute_weight(weight: f64, known: &[bool]) -> Vec<f64> {
    let k = known.iter().filter(|&&b| b).count();
    if k == 0 {
        vec![weight / known.len() as f64; known.len()]
    } else {
        known
            .iter()
            .map(|&b| if b { weight / k as f64 } else { 0.0 })
            .collect()
    }
}

fn bernoulli_labels(x: &Array2<f64>, theta: &Array1<f64>, rng: &mut impl Rng) -> Array1<f64> {
    x.dot(theta)
        .iter()
        .map(|&z| {
            let p = sigmoid(z);
            if rng.random::<f64>() < p {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// Assembles a dataset from groups whose known members come first.
fn grouped_dataset(groups: Vec<GroupSpec>, n: usize, rng: &mut ChaCha8Rng) -> Result<SyntheticDataset> {
    let mut known = Vec::new();
    for g in &groups {
        known.extend((0..g.size).map(|j| j < g.n_known));
    }
    assemble(groups, known, n, rng)
}

fn assemble(groups: Vec<GroupSpec>, known: Vec<bool>, n: usize, rng: &mut ChaCha8Rng) -> Result<SyntheticDataset> {
    let mut theta = Vec::with_capacity(known.len());
    let mut ranges = Vec::with_capacity(groups.len());
    let mut start = 0;
    for g in &groups {
        let range = start..start + g.size;
        theta.extend(distribute_weight(g.group_weight, &known[range.clone()]));
        ranges.push(range);
        start += g.size;
    }
    let true_theta = Array1::from(theta);
    let x = sample_block_gaussian(&groups, n, rng)?;
    let y = bernoulli_labels(&x, &true_theta, rng);
    Ok(SyntheticDataset {
        dataset: Dataset::new(x, y)?,
        r: KnowledgeVector::from_mask(&known),
        true_theta,
        groups: groups.into_iter().zip(ranges).collect(),
    })
}

/// Two perfectly correlated features, the first one known.
///
/// `v ~ Uniform(−2.5, 1.5)^100`, `X = [v, v]`, `θ = [1, 1]`, `y = 1{θᵀx > 0}`.
pub fn gen_two_feature_perfect(seed: u64) -> SyntheticDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unif = Uniform::new(-2.5, 1.5).expect("valid range");
    let n = 100;
    let mut x = Array2::zeros((n, 2));
    for i in 0..n {
        let v = unif.sample(&mut rng);
        x[[i, 0]] = v;
        x[[i, 1]] = v;
    }
    let theta = Array1::from(vec![1.0, 1.0]);
    let y = x.dot(&theta).mapv(|z| if z > 0.0 { 1.0 } else { 0.0 });
    let spec = GroupSpec {
        size: 2,
        correlation: 1.0,
        n_known: 1,
        group_weight: 2.0,
    };
    SyntheticDataset {
        dataset: Dataset::new(x, y).expect("finite data"),
        r: KnowledgeVector::from_mask(&[true, false]),
        true_theta: theta,
        groups: vec![(spec, 0..2)],
    }
}

/// Ten groups of 30 features with 15 known members each; group `g` has
/// intra-group correlation `g / 10`.
pub fn gen_correlation_sweep(seed: u64) -> SyntheticDataset {
    let groups = (0..10)
        .map(|g| GroupSpec {
            size: 30,
            correlation: g as f64 / 10.0,
            n_known: 15,
            group_weight: 1.0,
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    grouped_dataset(groups, DEFAULT_ROWS, &mut rng).expect("valid fixed design")
}

/// Eleven perfectly correlated groups of 10 features; group `i` has `i`
/// known members.
pub fn gen_known_fraction_sweep(seed: u64) -> SyntheticDataset {
    let groups = (0..=10)
        .map(|i| GroupSpec {
            size: 10,
            correlation: 1.0,
            n_known: i,
            group_weight: 1.0,
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    grouped_dataset(groups, DEFAULT_ROWS, &mut rng).expect("valid fixed design")
}

fn positive_poisson(mean: f64, rng: &mut ChaCha8Rng) -> usize {
    let dist = Poisson::new(mean).expect("positive mean");
    loop {
        let k = dist.sample(rng) as usize;
        if k > 0 {
            return k;
        }
    }
}

/// Groups, weights and expert indicators drawn at random, so the expert may
/// flag irrelevant groups:
///
/// 1. group count `~ Poisson(10)`;
/// 2. per group: weight `~ Normal(0, 1)`, size `~ Poisson(20)`, indicator
///    entries `~ Bernoulli(0.5)`, weight spread over the known members;
/// 3. intra-group correlation 0.95, none across groups;
/// 4. 5000 rows, labels `~ Bernoulli(sigmoid(θᵀx))`.
///
/// Zero draws of the Poisson counts are redrawn.
pub fn gen_expert_mistake_process(seed: u64) -> SyntheticDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_groups = positive_poisson(10.0, &mut rng);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let coin = Bernoulli::new(0.5).expect("fair coin");
    let mut groups = Vec::with_capacity(n_groups);
    let mut known = Vec::new();
    for _ in 0..n_groups {
        let group_weight = normal.sample(&mut rng);
        let size = positive_poisson(20.0, &mut rng);
        let flags: Vec<bool> = (0..size).map(|_| coin.sample(&mut rng)).collect();
        groups.push(GroupSpec {
            size,
            correlation: 0.95,
            n_known: flags.iter().filter(|&&b| b).count(),
            group_weight,
        });
        known.extend(flags);
    }
    assemble(groups, known, DEFAULT_ROWS, &mut rng).expect("valid sampled design")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_distribution_example() {
        assert_eq!(distribute_weight(3.0, &[false, true, true]), vec![0.0, 1.5, 1.5]);
        assert_eq!(distribute_weight(2.0, &[false, false]), vec![1.0, 1.0]);
    }

    #[test]
    fn perfect_correlation_duplicates_columns() {
        let spec = GroupSpec {
            size: 2,
            correlation: 1.0,
            n_known: 0,
            group_weight: 0.0,
        };
        let x = sample_block_gaussian(&[spec], 50, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(x.column(0), x.column(1));
    }

    #[test]
    fn invalid_requests() {
        let spec = GroupSpec {
            size: 2,
            correlation: 0.5,
            n_known: 3,
            group_weight: 0.0,
        };
        assert!(sample_block_gaussian(&[spec], 10, &mut ChaCha8Rng::seed_from_u64(1)).is_err());
        let ok = GroupSpec { n_known: 1, ..spec };
        assert!(sample_block_gaussian(&[ok], 0, &mut ChaCha8Rng::seed_from_u64(1)).is_err());
        let bad_rho = GroupSpec { correlation: 1.5, ..ok };
        assert!(bad_rho.validate().is_err());
    }

    #[test]
    fn two_feature_labels() {
        let s = gen_two_feature_perfect(3);
        assert_eq!(s.dataset.x.column(0), s.dataset.x.column(1));
        for (row, &y) in s.dataset.x.outer_iter().zip(&s.dataset.y) {
            assert_eq!(y, if row[0] > 0.0 { 1.0 } else { 0.0 });
            assert!((-2.5..1.5).contains(&row[0]));
        }
        assert_eq!(s.r.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn fixed_designs_have_expected_shape() {
        let s = gen_correlation_sweep(0);
        assert_eq!(s.dataset.n_features(), 300);
        assert_eq!(s.r.known_count(), 150);
        let s = gen_known_fraction_sweep(0);
        assert_eq!(s.dataset.n_features(), 110);
        assert_eq!(s.r.known_count(), 55);
        assert_eq!(s.groups[0].0.n_known, 0);
        assert_eq!(s.groups[10].0.n_known, 10);
    }
}
