//! Granular-ball covering of a labelled training set.
//!
//! Starting from a single ball holding every sample, any ball whose purity
//! is below the threshold is split in two by 2-means until every ball is
//! pure enough or a singleton. A minimum ball count is then enforced by
//! splitting the largest ball, and every class present in the data is
//! guaranteed at least one ball of its own.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Dataset, Label};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

/// Balls larger than this run 2-means on a seeded sample of this many
/// members, then assign every member to the nearer sample centroid.
pub const TWO_MEANS_SAMPLE_CAP: usize = 2048;
const TWO_MEANS_MAX_ITER: usize = 100;
const INIT_CANDIDATES: usize = 16;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GranularBall {
    pub center: Vec<f64>,
    pub radius: f64,
    pub label: Label,
    pub size: usize,
    pub purity: f64,
    pub members: Vec<usize>,
}

/// Majority fraction of a label list, in `[0.5, 1]`.
pub fn purity(labels: &[Label]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::Empty("label list"));
    }
    let pos = labels.iter().filter(|&&l| l == Label::Pos).count();
    Ok(pos.max(labels.len() - pos) as f64 / labels.len() as f64)
}

impl GranularBall {
    /// Centre of gravity, mean distance to the centre as radius, majority
    /// label with ties going to +1.
    pub fn from_members(features: &Matrix, labels: &[Label], members: Vec<usize>) -> Result<GranularBall> {
        if members.is_empty() {
            return Err(Error::Empty("ball members"));
        }
        let dim = features.ncols();
        let p = members.len();
        let first = features.row(members[0]);
        let (center, radius) = if members.iter().all(|&i| features.row(i) == first) {
            (first.to_vec(), 0.0)
        } else {
            let mut center = vec![0.0; dim];
            for &i in &members {
                for (c, x) in center.iter_mut().zip(features.row(i)) {
                    *c += x;
                }
            }
            center.iter_mut().for_each(|c| *c /= p as f64);
            let total: f64 = members
                .iter()
                .map(|&i| math::sqrt(math::sq_dist(features.row(i), &center)))
                .sum();
            (center, total / p as f64)
        };
        let pos = members.iter().filter(|&&i| labels[i] == Label::Pos).count();
        let neg = p - pos;
        Ok(GranularBall {
            center,
            radius,
            label: if pos >= neg { Label::Pos } else { Label::Neg },
            size: p,
            purity: pos.max(neg) as f64 / p as f64,
            members,
        })
    }
}

/// Splits `members` into two non-empty clusters with Lloyd's 2-means.
///
/// The initial centroids are the mutually farthest pair among a seeded
/// sample of at most 16 members (all members when there are that few). If
/// a cluster ends up empty, the member farthest from the other centroid is
/// moved into it.
pub fn split_two_means(features: &Matrix, members: &[usize], seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if members.len() < 2 {
        return Err(Error::param("members", "2-means needs at least two points"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let fit_set: Vec<usize> = if members.len() > TWO_MEANS_SAMPLE_CAP {
        let mut picks = sample(&mut rng, members.len(), TWO_MEANS_SAMPLE_CAP).into_vec();
        picks.sort_unstable();
        picks.into_iter().map(|j| members[j]).collect()
    } else {
        members.to_vec()
    };

    let candidates: Vec<usize> = if fit_set.len() > INIT_CANDIDATES {
        sample(&mut rng, fit_set.len(), INIT_CANDIDATES)
            .into_iter()
            .map(|j| fit_set[j])
            .collect()
    } else {
        fit_set.clone()
    };
    let (mut a, mut b) = (candidates[0], candidates[1]);
    let mut best = -1.0;
    for (x, &i) in candidates.iter().enumerate() {
        for &j in &candidates[x + 1..] {
            let d = math::sq_dist(features.row(i), features.row(j));
            if d > best {
                best = d;
                a = i;
                b = j;
            }
        }
    }
    let mut c0 = features.row(a).to_vec();
    let mut c1 = features.row(b).to_vec();

    let mut assign = vec![false; fit_set.len()];
    for iter in 0..TWO_MEANS_MAX_ITER {
        let changed = assign_nearest(features, &fit_set, &c0, &c1, &mut assign);
        if iter > 0 && !changed {
            break;
        }
        let n1 = assign.iter().filter(|&&x| x).count();
        if n1 == 0 || n1 == fit_set.len() {
            break;
        }
        recompute_centroids(features, &fit_set, &assign, &mut c0, &mut c1);
    }

    let (mut left, mut right) = if fit_set.len() == members.len() {
        partition(members, &assign)
    } else {
        let mut full = vec![false; members.len()];
        assign_nearest(features, members, &c0, &c1, &mut full);
        partition(members, &full)
    };

    if left.is_empty() || right.is_empty() {
        let (from, to, centroid) = if left.is_empty() {
            (&mut right, &mut left, &c1)
        } else {
            (&mut left, &mut right, &c0)
        };
        let mut far = 0;
        let mut far_d = -1.0;
        for (pos, &i) in from.iter().enumerate() {
            let d = math::sq_dist(features.row(i), centroid);
            if d > far_d {
                far_d = d;
                far = pos;
            }
        }
        to.push(from.remove(far));
    }
    Ok((left, right))
}

// Sets assign[j] = true where member j is strictly nearer c1; reports changes.
fn assign_nearest(features: &Matrix, members: &[usize], c0: &[f64], c1: &[f64], assign: &mut [bool]) -> bool {
    // ‖x−c1‖² < ‖x−c0‖²  ⇔  x·(c1−c0) > (‖c1‖² − ‖c0‖²)/2
    let dir: Vec<f64> = c1.iter().zip(c0).map(|(p, q)| p - q).collect();
    let threshold = 0.5 * (math::dot(c1, c1) - math::dot(c0, c0));
    let mut changed = false;
    for (slot, &i) in assign.iter_mut().zip(members) {
        let side = math::dot(features.row(i), &dir) > threshold;
        changed |= side != *slot;
        *slot = side;
    }
    changed
}

fn recompute_centroids(features: &Matrix, members: &[usize], assign: &[bool], c0: &mut [f64], c1: &mut [f64]) {
    c0.iter_mut().for_each(|v| *v = 0.0);
    c1.iter_mut().for_each(|v| *v = 0.0);
    let (mut n0, mut n1) = (0usize, 0usize);
    for (&i, &side) in members.iter().zip(assign) {
        let (c, n) = if side { (&mut *c1, &mut n1) } else { (&mut *c0, &mut n0) };
        for (cv, x) in c.iter_mut().zip(features.row(i)) {
            *cv += x;
        }
        *n += 1;
    }
    c0.iter_mut().for_each(|v| *v /= n0 as f64);
    c1.iter_mut().for_each(|v| *v /= n1 as f64);
}

fn partition(members: &[usize], assign: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (&i, &side) in members.iter().zip(assign) {
        if side {
            right.push(i);
        } else {
            left.push(i);
        }
    }
    (left, right)
}

/// The balls of one covering, with the centres and radii split by label.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BallSet {
    balls: Vec<GranularBall>,
    c: Matrix,
    d: Matrix,
    r_plus: Vec<f64>,
    r_minus: Vec<f64>,
    n_samples: usize,
}

impl BallSet {
    pub fn from_balls(balls: Vec<GranularBall>, n_features: usize) -> Result<BallSet> {
        if balls.is_empty() {
            return Err(Error::Empty("ball set"));
        }
        let mut c = Vec::new();
        let mut d = Vec::new();
        let mut r_plus = Vec::new();
        let mut r_minus = Vec::new();
        for b in &balls {
            if b.center.len() != n_features {
                return Err(Error::DimensionMismatch {
                    expected: n_features,
                    found: b.center.len(),
                });
            }
            if b.label == Label::Pos {
                c.extend_from_slice(&b.center);
                r_plus.push(b.radius);
            } else {
                d.extend_from_slice(&b.center);
                r_minus.push(b.radius);
            }
        }
        let n_samples = balls.iter().map(|b| b.size).sum();
        Ok(BallSet {
            c: Matrix::from_vec(r_plus.len(), n_features, c)?,
            d: Matrix::from_vec(r_minus.len(), n_features, d)?,
            r_plus,
            r_minus,
            balls,
            n_samples,
        })
    }

    /// One zero-radius ball per sample, in row order.
    pub fn singletons(data: &Dataset) -> BallSet {
        let balls = (0..data.len())
            .map(|i| GranularBall {
                center: data.features().row(i).to_vec(),
                radius: 0.0,
                label: data.labels()[i],
                size: 1,
                purity: 1.0,
                members: vec![i],
            })
            .collect();
        BallSet::from_balls(balls, data.n_features()).expect("dataset is non-empty")
    }

    pub fn balls(&self) -> &[GranularBall] {
        &self.balls
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.c.ncols().max(self.d.ncols())
    }

    /// Number of samples covered.
    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    /// Centres of the +1 balls (`k₁ × N`).
    pub fn c(&self) -> &Matrix {
        &self.c
    }

    /// Centres of the −1 balls (`k₂ × N`).
    pub fn d(&self) -> &Matrix {
        &self.d
    }

    pub fn r_plus(&self) -> &[f64] {
        &self.r_plus
    }

    pub fn r_minus(&self) -> &[f64] {
        &self.r_minus
    }

    pub fn k_pos(&self) -> usize {
        self.r_plus.len()
    }

    pub fn k_neg(&self) -> usize {
        self.r_minus.len()
    }

    /// All centres, `[C; D]`.
    pub fn anchors(&self) -> Matrix {
        self.c.vstack(&self.d).expect("C and D share the feature dimension")
    }
}

/// Granular-ball covering of `data` (purity threshold `pur`, at least `num` balls).
pub fn generate_balls(data: &Dataset, pur: f64, num: usize, seed: u64) -> Result<BallSet> {
    if !(pur > 0.5 && pur <= 1.0) {
        return Err(Error::param("pur", "purity threshold must lie in (0.5, 1]"));
    }
    if num < 2 {
        return Err(Error::param("num", "minimum ball count must be at least 2"));
    }
    let features = data.features();
    let labels = data.labels();
    let ball_purity = |members: &[usize]| -> f64 {
        let pos = members.iter().filter(|&&i| labels[i] == Label::Pos).count();
        pos.max(members.len() - pos) as f64 / members.len() as f64
    };
    let mut splits = 0u64;
    let mut split = |members: &[usize]| -> Result<(Vec<usize>, Vec<usize>)> {
        let s = math::mix_seed(seed, splits);
        splits += 1;
        split_two_means(features, members, s)
    };

    let classes_present = [Label::Pos, Label::Neg].map(|l| labels.contains(&l));
    let mut pending: Vec<Vec<usize>> = vec![(0..data.len()).collect()];
    let mut done: Vec<(Vec<usize>, Label)> = Vec::new();

    loop {
        while let Some(members) = pending.pop() {
            if members.len() >= 2 && ball_purity(&members) < pur {
                let (a, b) = split(&members)?;
                pending.push(b);
                pending.push(a);
            } else {
                let label = majority(labels, &members);
                done.push((members, label));
            }
        }

        // A class present in the data but owning no ball: split the largest
        // ball holding its samples until it surfaces as a majority.
        let missing = [Label::Pos, Label::Neg]
            .into_iter()
            .zip(classes_present)
            .find(|&(l, present)| present && !done.iter().any(|(_, bl)| *bl == l))
            .map(|(l, _)| l);
        let target = match missing {
            Some(l) => largest(&done, |m| m.len() >= 2 && m.iter().any(|&i| labels[i] == l)),
            None if done.len() < num => largest(&done, |m| m.len() >= 2),
            None => None,
        };
        match target {
            Some(pos) => {
                let (members, _) = done.remove(pos);
                let (a, b) = split(&members)?;
                pending.push(b);
                pending.push(a);
            }
            None => break,
        }
    }

    let balls = done
        .into_iter()
        .map(|(members, _)| GranularBall::from_members(features, labels, members))
        .collect::<Result<Vec<_>>>()?;
    BallSet::from_balls(balls, data.n_features())
}

fn majority(labels: &[Label], members: &[usize]) -> Label {
    let pos = members.iter().filter(|&&i| labels[i] == Label::Pos).count();
    if 2 * pos >= members.len() {
        Label::Pos
    } else {
        Label::Neg
    }
}

fn largest(done: &[(Vec<usize>, Label)], eligible: impl Fn(&[usize]) -> bool) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for (pos, (m, _)) in done.iter().enumerate() {
        if eligible(m) && best.is_none_or(|(_, size)| m.len() > size) {
            best = Some((pos, m.len()));
        }
    }
    best.map(|(pos, _)| pos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn data(rows: &[[f64; 2]], labels: &[i8]) -> Dataset {
        Dataset::new(
            Matrix::from_rows(rows).unwrap(),
            labels.iter().map(|&l| Label::from_i8(l).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn purity_examples() {
        use Label::*;
        assert_abs_diff_eq!(purity(&[Pos, Pos, Neg]).unwrap(), 2.0 / 3.0);
        assert_eq!(purity(&[Pos, Pos, Pos]).unwrap(), 1.0);
        assert_eq!(purity(&[Pos, Neg]).unwrap(), 0.5);
        assert!(purity(&[]).is_err());
    }

    #[test]
    fn ball_from_members_examples() {
        let d = data(&[[0.0, 0.0], [2.0, 0.0], [3.0, 4.0], [0.0, 0.0]], &[1, 1, -1, -1]);
        let b = GranularBall::from_members(d.features(), d.labels(), vec![0, 1]).unwrap();
        assert_eq!(b.center, vec![1.0, 0.0]);
        assert_eq!(b.radius, 1.0);
        assert_eq!(b.label, Label::Pos);
        let s = GranularBall::from_members(d.features(), d.labels(), vec![2]).unwrap();
        assert_eq!((s.center.clone(), s.radius, s.purity), (vec![3.0, 4.0], 0.0, 1.0));
        let same = GranularBall::from_members(d.features(), d.labels(), vec![0, 3]).unwrap();
        assert_eq!(same.radius, 0.0);
        // 1 vs 1: tie goes to +1
        assert_eq!(same.label, Label::Pos);
        assert!(GranularBall::from_members(d.features(), d.labels(), vec![]).is_err());
    }

    #[test]
    fn two_identical_points_become_singletons() {
        let m = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let (a, b) = split_two_means(&m, &[0, 1], 5).unwrap();
        assert_eq!(a.len() + b.len(), 2);
        assert!(!a.is_empty() && !b.is_empty());
        assert!(split_two_means(&m, &[0], 5).is_err());
    }

    #[test]
    fn generate_balls_rejects_bad_parameters() {
        let d = data(&[[0.0, 0.0], [1.0, 1.0]], &[1, -1]);
        assert!(generate_balls(&d, 0.5, 2, 0).is_err());
        assert!(generate_balls(&d, 1.01, 2, 0).is_err());
        assert!(generate_balls(&d, 0.9, 1, 0).is_err());
    }

    #[test]
    fn single_sample_gives_single_ball() {
        let d = data(&[[0.5, 0.5]], &[1]);
        let bs = generate_balls(&d, 0.9, 2, 0).unwrap();
        assert_eq!(bs.len(), 1);
        assert_eq!(bs.balls()[0].radius, 0.0);
    }

    #[test]
    fn minority_class_gets_a_ball() {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..40 {
            rows.push([i as f64 * 0.01, 0.0]);
            labels.push(if i == 17 { -1 } else { 1 });
        }
        let d = data(&rows, &labels);
        let bs = generate_balls(&d, 0.9, 2, 3).unwrap();
        assert!(bs.k_neg() >= 1 && bs.k_pos() >= 1);
    }
}
