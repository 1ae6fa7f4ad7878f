//! Labelled binary-classification datasets: construction, scaling,
//! resampling, label corruption and the two synthetic generators.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

/// Binary class label, canonically encoded as −1 / +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Neg,
    Pos,
}

impl Label {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Label::Pos => 1.0,
            Label::Neg => -1.0,
        }
    }

    #[inline]
    pub fn as_i8(self) -> i8 {
        match self {
            Label::Pos => 1,
            Label::Neg => -1,
        }
    }

    pub fn from_i8(v: i8) -> Option<Label> {
        match v {
            1 => Some(Label::Pos),
            -1 => Some(Label::Neg),
            _ => None,
        }
    }

    #[inline]
    pub fn flipped(self) -> Label {
        match self {
            Label::Pos => Label::Neg,
            Label::Neg => Label::Pos,
        }
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let v = i8::deserialize(d)?;
        Label::from_i8(v).ok_or_else(|| serde::de::Error::custom("label must be -1 or 1"))
    }
}

/// Feature matrix (one row per sample) with ±1 labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Matrix,
    labels: Vec<Label>,
    names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(features: Matrix, labels: Vec<Label>) -> Result<Self> {
        if features.nrows() == 0 {
            return Err(Error::InvalidDataset("no samples".into()));
        }
        if features.ncols() == 0 {
            return Err(Error::InvalidDataset("no features".into()));
        }
        if features.nrows() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} rows but {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        if let Some(pos) = features.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset(format!(
                "non-finite value at row {}, column {}",
                pos / features.ncols(),
                pos % features.ncols()
            )));
        }
        Ok(Dataset {
            features,
            labels,
            names: None,
        })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                found: names.len(),
            });
        }
        self.names = Some(names);
        Ok(self)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    #[inline]
    pub fn features(&self) -> &Matrix {
        &self.features
    }

    #[inline]
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn has_both_classes(&self) -> bool {
        let first = self.labels[0];
        self.labels.iter().any(|&l| l != first)
    }

    /// Rows in the given order (indices may repeat).
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_rows(idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            names: self.names.clone(),
        }
    }

    /// Same features, replaced labels.
    pub fn with_labels(&self, labels: Vec<Label>) -> Result<Dataset> {
        if labels.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: labels.len(),
            });
        }
        Ok(Dataset {
            features: self.features.clone(),
            labels,
            names: self.names.clone(),
        })
    }

    /// Splits the feature rows by class, preserving row order: `(A, B)` with
    /// `A` holding the +1 rows.
    pub fn class_matrices(&self) -> (Matrix, Matrix) {
        let (pos, neg): (Vec<usize>, Vec<usize>) = (0..self.len()).partition(|&i| self.labels[i] == Label::Pos);
        (self.features.select_rows(&pos), self.features.select_rows(&neg))
    }

    pub fn negated_labels(&self) -> Dataset {
        Dataset {
            features: self.features.clone(),
            labels: self.labels.iter().map(|l| l.flipped()).collect(),
            names: self.names.clone(),
        }
    }
}

/// Per-feature ranges recorded by [`minmax_normalize`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormParams {
    pub fn fit(features: &Matrix) -> NormParams {
        let n = features.ncols();
        let mut min = alloc::vec![f64::INFINITY; n];
        let mut max = alloc::vec![f64::NEG_INFINITY; n];
        for r in features.rows() {
            for j in 0..n {
                min[j] = min[j].min(r[j]);
                max[j] = max[j].max(r[j]);
            }
        }
        NormParams { min, max }
    }

    /// Maps each column affinely; constant columns go to 0.
    pub fn apply(&self, features: &Matrix) -> Result<Matrix> {
        self.check(features)?;
        let mut out = features.clone();
        for i in 0..out.nrows() {
            for (j, v) in out.row_mut(i).iter_mut().enumerate() {
                let range = self.max[j] - self.min[j];
                *v = if range > 0.0 { (*v - self.min[j]) / range } else { 0.0 };
            }
        }
        Ok(out)
    }

    /// Inverse of [`NormParams::apply`]; constant columns come back as their value.
    pub fn invert(&self, scaled: &Matrix) -> Result<Matrix> {
        self.check(scaled)?;
        let mut out = scaled.clone();
        for i in 0..out.nrows() {
            for (j, v) in out.row_mut(i).iter_mut().enumerate() {
                *v = self.min[j] + *v * (self.max[j] - self.min[j]);
            }
        }
        Ok(out)
    }

    fn check(&self, m: &Matrix) -> Result<()> {
        if m.ncols() != self.min.len() {
            return Err(Error::DimensionMismatch {
                expected: self.min.len(),
                found: m.ncols(),
            });
        }
        Ok(())
    }
}

pub fn minmax_normalize(d: &Dataset) -> (Dataset, NormParams) {
    let params = NormParams::fit(&d.features);
    let features = params.apply(&d.features).expect("params fitted on the same matrix");
    (
        Dataset {
            features,
            labels: d.labels.clone(),
            names: d.names.clone(),
        },
        params,
    )
}

/// Random train/test index partition; both sides sorted ascending.
pub fn split_indices(m: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::param("train_fraction", "must lie strictly between 0 and 1"));
    }
    let n_train = math::round(train_fraction * m as f64) as usize;
    if n_train == 0 || n_train >= m {
        return Err(Error::param(
            "train_fraction",
            format!("{train_fraction} of {m} samples leaves one side empty"),
        ));
    }
    let mut idx: Vec<usize> = (0..m).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut test = idx.split_off(n_train);
    idx.sort_unstable();
    test.sort_unstable();
    Ok((idx, test))
}

pub fn train_test_split(d: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let (train, test) = split_indices(d.len(), train_fraction, seed)?;
    Ok((d.subset(&train), d.subset(&test)))
}

/// Number of labels [`inject_label_noise`] flips for `m` samples.
pub fn noise_count(m: usize, rate: f64) -> usize {
    // tolerance keeps products like 0.29 * 100 from rounding down a whole label
    math::floor(rate * m as f64 + 1e-9) as usize
}

/// Flips exactly `floor(rate · m)` labels at distinct random positions.
pub fn inject_label_noise(d: &Dataset, rate: f64, seed: u64) -> Result<Dataset> {
    Ok(inject_label_noise_indexed(d, rate, seed)?.0)
}

/// As [`inject_label_noise`], also returning the sorted flipped indices.
pub fn inject_label_noise_indexed(d: &Dataset, rate: f64, seed: u64) -> Result<(Dataset, Vec<usize>)> {
    if !(0.0..=0.5).contains(&rate) {
        return Err(Error::param("rate", "label noise rate must lie in [0, 0.5]"));
    }
    let count = noise_count(d.len(), rate);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut flipped = rand::seq::index::sample(&mut rng, d.len(), count).into_vec();
    flipped.sort_unstable();
    let mut labels = d.labels.clone();
    for &i in &flipped {
        labels[i] = labels[i].flipped();
    }
    Ok((
        Dataset {
            features: d.features.clone(),
            labels,
            names: d.names.clone(),
        },
        flipped,
    ))
}

/// Slopes of the two crossing lines: class +1 lies on `y = x`, class −1 on `y = −x`.
pub const CROSSPLANE_SLOPES: [f64; 2] = [1.0, -1.0];

/// Two classes on two lines crossing at the origin, plus isotropic Gaussian
/// jitter. Line positions are drawn from `[0, 1)`, so the classes meet at the
/// crossing point and a single plane separates them only approximately.
pub fn gen_crossplane(n: usize, jitter: f64, seed: u64) -> Result<Dataset> {
    if n < 4 {
        return Err(Error::param("n", "crossplane needs at least 4 samples"));
    }
    if !(jitter >= 0.0 && jitter.is_finite()) {
        return Err(Error::param("jitter", "must be finite and non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_pos = n.div_ceil(2);
    let mut data = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let (label, slope) = if i < n_pos {
            (Label::Pos, CROSSPLANE_SLOPES[0])
        } else {
            (Label::Neg, CROSSPLANE_SLOPES[1])
        };
        let t: f64 = rng.random_range(0.0..1.0);
        let mut x = t;
        let mut y = slope * t;
        if jitter > 0.0 {
            x += jitter * rng.sample::<f64, _>(StandardNormal);
            y += jitter * rng.sample::<f64, _>(StandardNormal);
        }
        data.push(x);
        data.push(y);
        labels.push(label);
    }
    Dataset::new(Matrix::from_vec(n, 2, data)?, labels)
}

/// Shape of the normally-distributed-clusters generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NdcConfig {
    pub clusters_per_class: usize,
    /// Spread of cluster means parallel to the separating hyperplane,
    /// in units of the cluster standard deviation.
    pub mean_spread: f64,
    /// Per-axis cluster standard deviations are drawn from `[min_std, 1]`.
    pub min_std: f64,
}

impl Default for NdcConfig {
    fn default() -> Self {
        NdcConfig {
            clusters_per_class: 8,
            mean_spread: 4.0,
            min_std: 0.5,
        }
    }
}

/// Normally distributed clusters labelled by the side of a random hyperplane
/// their mean falls on. Every mean sits at least `separation / 2` cluster
/// standard deviations from the hyperplane, so `separation` controls how
/// linearly separable the samples are.
pub fn gen_ndc(n: usize, dim: usize, separation: f64, seed: u64) -> Result<Dataset> {
    gen_ndc_with(n, dim, separation, seed, &NdcConfig::default())
}

pub fn gen_ndc_with(n: usize, dim: usize, separation: f64, seed: u64, cfg: &NdcConfig) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::param("n", "need at least 2 samples"));
    }
    if dim == 0 {
        return Err(Error::param("dim", "need at least 1 feature"));
    }
    if !(separation >= 0.0 && separation.is_finite()) {
        return Err(Error::param("separation", "must be finite and non-negative"));
    }
    if cfg.clusters_per_class == 0 {
        return Err(Error::param("clusters_per_class", "must be positive"));
    }
    if !(cfg.min_std > 0.0 && cfg.min_std <= 1.0) {
        return Err(Error::param("min_std", "must lie in (0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = |rng: &mut ChaCha8Rng| -> f64 { rng.sample(StandardNormal) };

    let mut normal_dir: Vec<f64> = (0..dim).map(|_| normal(&mut rng)).collect();
    normalize(&mut normal_dir);

    // Clusters alternate +1, −1, +1, ... so round-robin sampling stays balanced.
    let k = 2 * cfg.clusters_per_class;
    let mut clusters = Vec::with_capacity(k);
    for c in 0..k {
        let label = if c % 2 == 0 { Label::Pos } else { Label::Neg };
        let g: Vec<f64> = (0..dim).map(|_| normal(&mut rng)).collect();
        let along = math::dot(&g, &normal_dir);
        let offset = separation / 2.0 + (normal(&mut rng) * separation / 2.0).abs();
        let mean: Vec<f64> = g
            .iter()
            .zip(&normal_dir)
            .map(|(gi, vi)| cfg.mean_spread * (gi - along * vi) + label.sign() * offset * vi)
            .collect();
        let axes = random_orthonormal(dim, &mut rng);
        let stds: Vec<f64> = (0..dim).map(|_| rng.random_range(cfg.min_std..=1.0)).collect();
        clusters.push((label, mean, axes, stds));
    }

    let mut data = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    let mut z = alloc::vec![0.0; dim];
    for i in 0..n {
        let (label, mean, axes, stds) = &clusters[i % k];
        for (zj, s) in z.iter_mut().zip(stds) {
            *zj = s * normal(&mut rng);
        }
        let start = data.len();
        data.extend_from_slice(mean);
        let point = &mut data[start..];
        for (axis, &zj) in axes.rows().zip(z.iter()) {
            for (p, a) in point.iter_mut().zip(axis) {
                *p += zj * a;
            }
        }
        labels.push(*label);
    }
    Dataset::new(Matrix::from_vec(n, dim, data)?, labels)
}

fn normalize(v: &mut [f64]) {
    let norm = math::sqrt(math::dot(v, v));
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    } else {
        v[0] = 1.0;
    }
}

// Rows form an orthonormal basis (Gram–Schmidt on Gaussian vectors).
fn random_orthonormal(dim: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut m = Matrix::zeros(dim, dim);
    let mut i = 0;
    while i < dim {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        for j in 0..i {
            let proj = math::dot(&v, m.row(j));
            for (x, b) in v.iter_mut().zip(m.row(j)) {
                *x -= proj * b;
            }
        }
        let norm = math::sqrt(math::dot(&v, &v));
        if norm < 1e-8 {
            continue;
        }
        for (dst, x) in m.row_mut(i).iter_mut().zip(&v) {
            *dst = x / norm;
        }
        i += 1;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn toy(labels: &[i8]) -> Dataset {
        let rows: Vec<[f64; 1]> = (0..labels.len()).map(|i| [i as f64]).collect();
        Dataset::new(
            Matrix::from_rows(&rows).unwrap(),
            labels.iter().map(|&l| Label::from_i8(l).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_non_finite_and_mismatched() {
        let m = Matrix::from_rows(&[[1.0, f64::NAN]]).unwrap();
        assert!(Dataset::new(m, vec![Label::Pos]).is_err());
        let m = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(Dataset::new(m, vec![Label::Pos, Label::Neg]).is_err());
    }

    #[test]
    fn minmax_examples() {
        let m = Matrix::from_rows(&[[0.0, 3.0, 0.25], [5.0, 3.0, 1.0], [10.0, 3.0, 0.0]]).unwrap();
        let d = Dataset::new(m, vec![Label::Pos, Label::Neg, Label::Pos]).unwrap();
        let (n, params) = minmax_normalize(&d);
        let f = n.features();
        assert_eq!([f[(0, 0)], f[(1, 0)], f[(2, 0)]], [0.0, 0.5, 1.0]);
        assert_eq!([f[(0, 1)], f[(1, 1)], f[(2, 1)]], [0.0, 0.0, 0.0]);
        assert_eq!([f[(0, 2)], f[(1, 2)], f[(2, 2)]], [0.25, 1.0, 0.0]);
        assert_eq!(params.min, vec![0.0, 3.0, 0.0]);
    }

    #[test]
    fn split_sizes_and_guards() {
        let d = toy(&[1, -1, 1, -1, 1, -1, 1, -1, 1, -1]);
        let (tr, te) = train_test_split(&d, 0.7, 1).unwrap();
        assert_eq!((tr.len(), te.len()), (7, 3));
        assert_eq!(split_indices(10, 0.7, 1).unwrap(), split_indices(10, 0.7, 1).unwrap());
        assert!(train_test_split(&d, 1.0, 1).is_err());
        assert!(train_test_split(&d, 0.0, 1).is_err());
        assert!(train_test_split(&d, 0.01, 1).is_err());
    }

    #[test]
    fn noise_examples() {
        let d = toy(&[1, -1, 1, -1, 1, -1, 1, -1, 1, -1]);
        assert_eq!(inject_label_noise(&d, 0.0, 3).unwrap(), d);
        let (noisy, flipped) = inject_label_noise_indexed(&d, 0.2, 3).unwrap();
        let changed = d.labels().iter().zip(noisy.labels()).filter(|(a, b)| a != b).count();
        assert_eq!(changed, 2);
        assert_eq!(flipped.len(), 2);
        assert_eq!(noisy, inject_label_noise(&d, 0.2, 3).unwrap());
        assert!(inject_label_noise(&d, 0.6, 3).is_err());
        assert!(inject_label_noise(&d, -0.1, 3).is_err());
        assert_eq!(noise_count(100, 0.29), 29);
    }

    #[test]
    fn crossplane_without_jitter_lies_on_lines() {
        let d = gen_crossplane(130, 0.0, 9).unwrap();
        assert_eq!((d.len(), d.n_features()), (130, 2));
        for (r, l) in d.features().rows().zip(d.labels()) {
            let slope = if *l == Label::Pos {
                CROSSPLANE_SLOPES[0]
            } else {
                CROSSPLANE_SLOPES[1]
            };
            assert_eq!(r[1] - slope * r[0], 0.0);
        }
        assert_eq!(d.count(Label::Pos), 65);
        assert_eq!(
            gen_crossplane(130, 0.01, 4).unwrap(),
            gen_crossplane(130, 0.01, 4).unwrap()
        );
        assert!(gen_crossplane(3, 0.01, 4).is_err());
    }

    #[test]
    fn ndc_shape_balance_and_determinism() {
        let d = gen_ndc(1000, 32, 4.0, 11).unwrap();
        assert_eq!((d.len(), d.n_features()), (1000, 32));
        let pos = d.count(Label::Pos) as f64 / 1000.0;
        assert!((0.4..=0.6).contains(&pos));
        assert_eq!(d, gen_ndc(1000, 32, 4.0, 11).unwrap());
        assert!(gen_ndc(1, 3, 4.0, 0).is_err());
        assert!(gen_ndc(10, 0, 4.0, 0).is_err());
        let tiny = gen_ndc(2, 1, 1.0, 0).unwrap();
        assert!(tiny.has_both_classes());
    }
}
