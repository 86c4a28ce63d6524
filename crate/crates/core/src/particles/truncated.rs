use super::SiteSystem;
use crate::bdchain::poisson::log_poisson_weights;
use crate::error::{Error, Result};
use crate::measures::Measure;

/// Default bound on mass allowed to leave the box.
pub const PARTICLE_ESCAPE: f64 = 1e-8;

/// One transition out of a box state: target flat index (`None` = leaves
/// the box) and rate.
type Move = (Option<usize>, f64);

fn moves(system: &SiteSystem, box_mu: &Measure, flat: usize) -> Vec<Move> {
    let idx = box_mu.index_of(flat);
    let n = system.n;
    let mut out = Vec::new();
    let shifted = |i: usize, di: isize, j: Option<usize>| {
        let mut y = idx.clone();
        y[i] = (y[i] as isize + di) as usize;
        if let Some(j) = j {
            y[j] += 1;
            if y[j] > box_mu.shape[j] {
                return None;
            }
        }
        (y[i] <= box_mu.shape[i]).then(|| box_mu.flat_of(&y).expect("inside box"))
    };
    for i in 0..n {
        let k = idx[i] as u64;
        if system.birth[i] > 0.0 {
            out.push((shifted(i, 1, None), system.birth[i]));
        }
        if k == 0 {
            continue;
        }
        let d = system.death_rate(i, k);
        if d > 0.0 {
            out.push((shifted(i, -1, None), d));
        }
        for j in 0..n {
            let q = system.jump[i][j] * k as f64;
            if j != i && q > 0.0 {
                out.push((shifted(i, -1, Some(j)), q));
            }
        }
    }
    out
}

pub fn truncated_generator_evolve(mu: &Measure, system: &SiteSystem, t: f64, shape: &[usize]) -> Result<Measure> {
    truncated_generator_evolve_with(mu, system, t, shape, PARTICLE_ESCAPE)
}

/// Uniformization on the product box `shape`; transitions leaving the box
/// are absorbed and their mass reported as tail bound. Fails if that mass
/// exceeds `tol`. Any per-site rates are accepted.
pub fn truncated_generator_evolve_with(
    mu: &Measure,
    system: &SiteSystem,
    t: f64,
    shape: &[usize],
    tol: f64,
) -> Result<Measure> {
    if shape.len() != system.n || mu.nvars() != system.n {
        return Err(Error::DimensionMismatch { expected: system.n, got: shape.len() });
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time {t} must be finite and >= 0")));
    }
    let len: usize = shape.iter().map(|s| s + 1).product();
    let frame = Measure { shape: shape.to_vec(), weights: vec![], tail_bound: 0.0 };
    let mut v = vec![0.0; len];
    let mut lost = mu.tail_bound;
    for (flat, &w) in mu.weights.iter().enumerate() {
        match frame.flat_of(&mu.index_of(flat)).filter(|_| mu.index_of(flat).iter().zip(shape).all(|(a, s)| a <= s)) {
            Some(f) => v[f] += w,
            None => lost += w,
        }
    }
    let table: Vec<Vec<Move>> = (0..len).map(|f| moves(system, &frame, f)).collect();
    let exit: Vec<f64> = table.iter().map(|m| m.iter().map(|(_, r)| r).sum()).collect();
    let lam = exit.iter().copied().fold(0.0, f64::max);
    let u = f64::EPSILON / 2.0;
    let mut escaped = 0.0;
    let mut out = v.clone();
    let mut rounding = 0.0;
    let mut poisson_tail = 0.0;
    if lam > 0.0 && t > 0.0 {
        let weights = log_poisson_weights(lam * t, 0, (1e-17f64).ln(), 10_000_000)?;
        let mut cur = v;
        let mut cur_out = 0.0;
        out = vec![0.0; len];
        for (j, lw) in weights.lw.iter().enumerate() {
            if j > 0 {
                let mut next: Vec<f64> = cur.iter().zip(&exit).map(|(c, e)| c * (1.0 - e / lam)).collect();
                for (f, m) in table.iter().enumerate() {
                    if cur[f] == 0.0 {
                        continue;
                    }
                    for &(to, r) in m {
                        let flow = cur[f] * r / lam;
                        match to {
                            Some(g) => next[g] += flow,
                            None => cur_out += flow,
                        }
                    }
                }
                cur = next;
            }
            let w = lw.exp();
            for (o, c) in out.iter_mut().zip(&cur) {
                *o += w * c;
            }
            escaped += w * cur_out;
        }
        poisson_tail = weights.tail();
        rounding = (weights.lw.len() + 2) as f64 * 10.0 * u + weights.rel_visible;
    }
    if escaped > tol {
        return Err(Error::TruncationCap { level: shape.iter().copied().max().unwrap_or(0), escaped });
    }
    let tail_bound = lost + escaped + poisson_tail + rounding;
    Measure::new(shape.to_vec(), out, tail_bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::tv_distance;
    use crate::particles::{exact_pgf_transform, PgfTransform};
    use crate::polycore::MultiPoly;

    #[test]
    fn identity_at_zero() {
        let s = SiteSystem::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![1.0, 0.0], vec![1.0; 2]).unwrap();
        let mu = Measure::point_mass(&[1, 2]);
        let out = truncated_generator_evolve(&mu, &s, 0.0, &[3, 3]).unwrap();
        assert_eq!(out.weights[out.flat_of(&[1, 2]).unwrap()], 1.0);
    }

    #[test]
    fn constant_birth_is_poisson() {
        let s = SiteSystem::new(vec![vec![0.0]], vec![1.3], vec![0.0]).unwrap();
        let out = truncated_generator_evolve(&Measure::point_mass(&[0]), &s, 0.5, &[30]).unwrap();
        let (pw, _) = crate::measures::poisson_weights(0.65, 30).unwrap();
        assert!(tv_distance(&out.weights, &pw) < 1e-13);
    }

    #[test]
    fn agrees_with_exact_transform() {
        let s = SiteSystem::new(vec![vec![0.0, 0.4], vec![0.7, 0.0]], vec![0.3, 0.2], vec![0.5, 0.9]).unwrap();
        let mu = Measure::product(&[Measure::bernoulli(0.4).unwrap(), Measure::point_mass(&[2])]);
        let t = 0.9;
        let a = truncated_generator_evolve(&mu, &s, t, &[12, 12]).unwrap();
        let b = PgfTransform::from_measure(&mu).evolve(&s, t).unwrap().to_measure(&[12, 12]).unwrap();
        assert!(tv_distance(&a.weights, &b.weights) < 1e-10);
        let f = exact_pgf_transform(&MultiPoly::var(2, 0), &s, t).unwrap();
        assert!(f.lambda[0] > 0.0);
    }

    #[test]
    fn small_box_rejected() {
        let s = SiteSystem::new(vec![vec![0.0]], vec![5.0], vec![0.0]).unwrap();
        assert!(truncated_generator_evolve(&Measure::point_mass(&[0]), &s, 1.0, &[3]).is_err());
    }
}
