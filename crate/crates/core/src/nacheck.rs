//! Exhaustive negative-association checks on small boxes.
//!
//! A measure on a box is NA if `∫FG ≤ ∫F ∫G` for all increasing `F`, `G`
//! depending on disjoint coordinate sets. On a finite box every increasing
//! function is a nonnegative combination of up-set indicators plus a
//! constant, so checking indicator pairs suffices.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::Measure;
use crate::par;
use crate::scalar::{Rational, Scalar};
use crate::tolerances::{NA_SLACK, UPSET_CELL_CAP};

/// Up-sets of the box `{0..=shape[0]} × …`, as bitmasks over cells in
/// row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpSetFamily {
    pub shape: Vec<usize>,
    pub masks: Vec<u64>,
}

fn cells(shape: &[usize]) -> usize {
    shape.iter().map(|s| s + 1).product()
}

fn unflatten(shape: &[usize], mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for (slot, &n) in idx.iter_mut().zip(shape).rev() {
        *slot = flat % (n + 1);
        flat /= n + 1;
    }
    idx
}

fn flatten(shape: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |f, (i, s)| f * (s + 1) + i)
}

/// Cells directly above `flat` (one coordinate raised by one).
fn upper_covers(shape: &[usize], flat: usize) -> Vec<usize> {
    let idx = unflatten(shape, flat);
    (0..shape.len())
        .filter(|&v| idx[v] < shape[v])
        .map(|v| {
            let mut y = idx.clone();
            y[v] += 1;
            flatten(shape, &y)
        })
        .collect()
}

impl UpSetFamily {
    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn contains(&self, set: usize, point: &[usize]) -> bool {
        self.masks[set] >> flatten(&self.shape, point) & 1 == 1
    }

    /// Minimal elements of each up-set.
    pub fn antichains(&self) -> Vec<Vec<Vec<usize>>> {
        let n = cells(&self.shape);
        self.masks
            .iter()
            .map(|&m| {
                (0..n)
                    .filter(|&c| m >> c & 1 == 1)
                    .map(|c| unflatten(&self.shape, c))
                    .filter(|x| {
                        (0..x.len()).all(|v| {
                            x[v] == 0 || {
                                let mut y = x.clone();
                                y[v] -= 1;
                                m >> flatten(&self.shape, &y) & 1 == 0
                            }
                        })
                    })
                    .collect()
            })
            .collect()
    }

    pub fn is_upset(shape: &[usize], mask: u64) -> bool {
        (0..cells(shape)).all(|c| mask >> c & 1 == 0 || upper_covers(shape, c).iter().all(|&u| mask >> u & 1 == 1))
    }
}

/// All up-sets (including `∅` and the whole box), for at most `cap` cells.
pub fn enumerate_upsets(shape: &[usize]) -> Result<UpSetFamily> {
    enumerate_upsets_capped(shape, UPSET_CELL_CAP)
}

pub fn enumerate_upsets_capped(shape: &[usize], cap: usize) -> Result<UpSetFamily> {
    let n = cells(shape);
    if n > cap || n > 64 {
        return Err(Error::CapExceeded { cells: n, cap: cap.min(64) });
    }
    let covers: Vec<Vec<usize>> = (0..n).map(|c| upper_covers(shape, c)).collect();
    // decreasing flat order is a linear extension from the top
    let mut masks = Vec::new();
    fn go(c: usize, mask: u64, covers: &[Vec<usize>], out: &mut Vec<u64>) {
        if c == 0 {
            out.push(mask);
            return;
        }
        let cell = c - 1;
        go(cell, mask, covers, out);
        if covers[cell].iter().all(|&u| mask >> u & 1 == 1) {
            go(cell, mask | 1 << cell, covers, out);
        }
    }
    go(n, 0, &covers, &mut masks);
    masks.sort_unstable();
    Ok(UpSetFamily { shape: shape.to_vec(), masks })
}

/// Result of checking one split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitResult {
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    #[serde(rename = "B")]
    pub b: Vec<usize>,
    pub worst_slack: f64,
    pub holds: bool,
    /// Minimal elements of the worst up-set pair `(F on A, G on B)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_pair: Option<(Vec<Vec<usize>>, Vec<Vec<usize>>)>,
    /// Whether up-sets were sampled instead of enumerated.
    pub sampled: bool,
}

fn check_split(mu: &Measure, a: &[usize], b: &[usize]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter("split sets must be nonempty".into()));
    }
    for &v in a.iter().chain(b) {
        if v >= mu.nvars() {
            return Err(Error::OutOfRange { index: v, limit: mu.nvars() });
        }
    }
    if a.iter().any(|v| b.contains(v)) {
        return Err(Error::InvalidParameter("split sets must be disjoint".into()));
    }
    Ok(())
}

/// Joint law of the `A` and `B` coordinates, `joint[a_cell][b_cell]`,
/// normalized to total mass one (defective measures are conditioned on
/// the box).
fn joint<T: Scalar>(shape: &[usize], weights: &[T], a: &[usize], b: &[usize]) -> (Vec<usize>, Vec<usize>, Vec<Vec<T>>) {
    let sa: Vec<usize> = a.iter().map(|&v| shape[v]).collect();
    let sb: Vec<usize> = b.iter().map(|&v| shape[v]).collect();
    let mut j = vec![vec![T::zero(); cells(&sb)]; cells(&sa)];
    for (flat, w) in weights.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let idx = unflatten(shape, flat);
        let ia: Vec<usize> = a.iter().map(|&v| idx[v]).collect();
        let ib: Vec<usize> = b.iter().map(|&v| idx[v]).collect();
        let cell = &mut j[flatten(&sa, &ia)][flatten(&sb, &ib)];
        *cell = cell.clone() + w.clone();
    }
    let total = weights.iter().fold(T::zero(), |s, w| s + w.clone());
    if !total.is_zero() {
        for v in j.iter_mut().flatten() {
            *v = v.clone() / total.clone();
        }
    }
    (sa, sb, j)
}

/// `max_{F,G} ∫FG - ∫F∫G` over the given up-set masks, with the argmax.
fn worst_pair<T: Scalar + Send + Sync>(j: &[Vec<T>], fa: &[u64], fb: &[u64]) -> (T, usize, usize) {
    let nb = j.first().map_or(0, |r| r.len());
    let col_mass: Vec<T> = (0..nb).map(|c| j.iter().fold(T::zero(), |s, r| s + r[c].clone())).collect();
    let per_f = par::map_range(fa.len(), |fi| {
        let mf = fa[fi];
        let row: Vec<T> = (0..nb)
            .map(|c| j.iter().enumerate().filter(|(r, _)| mf >> r & 1 == 1).fold(T::zero(), |s, (_, v)| s + v[c].clone()))
            .collect();
        let int_f = row.iter().fold(T::zero(), |s, x| s + x.clone());
        let mut best = (T::zero(), 0usize);
        for (gi, &mg) in fb.iter().enumerate() {
            let sel = |v: &[T]| (0..nb).filter(|c| mg >> c & 1 == 1).fold(T::zero(), |s, c| s + v[c].clone());
            let slack = sel(&row) - int_f.clone() * sel(&col_mass);
            if slack.to_f64() > best.0.to_f64() {
                best = (slack, gi);
            }
        }
        best
    });
    let mut out = (T::zero(), 0, 0);
    for (fi, (s, gi)) in per_f.into_iter().enumerate() {
        if s.to_f64() > out.0.to_f64() {
            out = (s, fi, gi);
        }
    }
    out
}

/// Random up-sets: up-closures of random point sets and random threshold
/// sets `{x : w·x ≥ τ}`.
fn sample_upsets(shape: &[usize], count: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let n = cells(shape);
    let mut out = vec![0u64, if n == 64 { u64::MAX } else { (1u64 << n) - 1 }];
    while out.len() < count {
        let mut mask = 0u64;
        if rng.random::<bool>() {
            for _ in 0..rng.random_range(1..=3) {
                mask |= 1 << rng.random_range(0..n);
            }
        } else {
            let w: Vec<f64> = shape.iter().map(|_| rng.random::<f64>()).collect();
            let top: f64 = w.iter().zip(shape).map(|(a, s)| a * *s as f64).sum();
            let tau = rng.random::<f64>() * top;
            for c in 0..n {
                let x = unflatten(shape, c);
                if w.iter().zip(&x).map(|(a, v)| a * *v as f64).sum::<f64>() >= tau {
                    mask |= 1 << c;
                }
            }
        }
        // covers have larger flat indices, so one increasing pass closes upward
        for c in 0..n {
            if mask >> c & 1 == 1 {
                for u in upper_covers(shape, c) {
                    mask |= 1 << u;
                }
            }
        }
        out.push(mask);
    }
    out
}

/// Up-sets used for one side: exhaustive within the cap, sampled (seeded)
/// for boxes of at most 64 cells, otherwise an error.
fn side_family(shape: &[usize], seed: u64) -> Result<(Vec<u64>, bool)> {
    match enumerate_upsets(shape) {
        Ok(f) => Ok((f.masks, false)),
        Err(e) if cells(shape) > 64 => Err(e),
        Err(_) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((sample_upsets(shape, SAMPLED_UPSETS, &mut rng), true))
        }
    }
}

/// Up-sets drawn per side when a box exceeds the enumeration cap.
pub const SAMPLED_UPSETS: usize = 512;

/// Checks the NA inequality for every up-set pair on the split `(A, B)`.
pub fn is_na(mu: &Measure, a: &[usize], b: &[usize]) -> Result<SplitResult> {
    check_split(mu, a, b)?;
    let (sa, sb, j) = joint(&mu.shape, &mu.weights, a, b);
    let (fa, sampled_a) = side_family(&sa, 0xA)?;
    let (fb, sampled_b) = side_family(&sb, 0xB)?;
    let (slack, fi, gi) = worst_pair(&j, &fa, &fb);
    let holds = slack <= NA_SLACK;
    let witness_pair = (!holds).then(|| {
        let fam_a = UpSetFamily { shape: sa.clone(), masks: vec![fa[fi]] };
        let fam_b = UpSetFamily { shape: sb.clone(), masks: vec![fb[gi]] };
        (fam_a.antichains().remove(0), fam_b.antichains().remove(0))
    });
    Ok(SplitResult { a: a.to_vec(), b: b.to_vec(), worst_slack: slack, holds, witness_pair, sampled: sampled_a || sampled_b })
}

/// [`is_na`] in exact rational arithmetic; holds iff the worst slack is ≤ 0.
pub fn is_na_exact(shape: &[usize], weights: &[Rational], a: &[usize], b: &[usize]) -> Result<(bool, Rational)> {
    let len = cells(shape);
    if weights.len() != len {
        return Err(Error::DimensionMismatch { expected: len, got: weights.len() });
    }
    let probe = Measure { shape: shape.to_vec(), weights: vec![], tail_bound: 0.0 };
    check_split(&probe, a, b)?;
    let (sa, sb, j) = joint(shape, weights, a, b);
    let fa = enumerate_upsets(&sa)?.masks;
    let fb = enumerate_upsets(&sb)?.masks;
    let (slack, _, _) = worst_pair(&j, &fa, &fb);
    Ok((slack <= Rational::zero(), slack))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NaVerdict {
    Na,
    SampledNa,
    NotNa,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaReport {
    pub splits: Vec<SplitResult>,
    pub verdict: NaVerdict,
    pub worst_slack: f64,
}

impl NaReport {
    pub fn passed(&self) -> bool {
        self.verdict != NaVerdict::NotNa
    }

    pub fn first_violation(&self) -> Option<&SplitResult> {
        self.splits.iter().find(|s| !s.holds)
    }
}

/// All unordered pairs of nonempty disjoint coordinate sets.
pub fn all_splits(n: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    // label each coordinate 0 (unused), 1 (A) or 2 (B)
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let (mut a, mut b) = (vec![], vec![]);
        for v in 0..n {
            match c % 3 {
                1 => a.push(v),
                2 => b.push(v),
                _ => {}
            }
            c /= 3;
        }
        if !a.is_empty() && !b.is_empty() && a[0] < b[0] {
            out.push((a, b));
        }
    }
    out
}

pub fn na_all_splits(mu: &Measure) -> Result<NaReport> {
    let splits: Vec<SplitResult> = all_splits(mu.nvars())
        .iter()
        .map(|(a, b)| is_na(mu, a, b))
        .collect::<Result<_>>()?;
    let worst_slack = splits.iter().map(|s| s.worst_slack).fold(0.0, f64::max);
    let verdict = if splits.iter().any(|s| !s.holds) {
        NaVerdict::NotNa
    } else if splits.iter().any(|s| s.sampled) {
        NaVerdict::SampledNa
    } else {
        NaVerdict::Na
    };
    Ok(NaReport { splits, verdict, worst_slack })
}
