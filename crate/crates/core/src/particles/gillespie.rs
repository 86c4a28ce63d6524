use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Configuration, SiteSystem};
use crate::error::{Error, Result};
use crate::par;

/// Events allowed in a single trajectory.
pub const MAX_EVENTS: u64 = 10_000_000;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn run(system: &SiteSystem, init: &Configuration, t: f64, rng: &mut ChaCha8Rng) -> Result<Configuration> {
    let n = system.n;
    if init.counts.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: init.counts.len() });
    }
    let mut eta = init.counts.clone();
    let mut now = 0.0;
    let mut events = 0u64;
    let mut rates = Vec::with_capacity(n * (n + 1));
    loop {
        rates.clear();
        for i in 0..n {
            rates.push(system.birth[i]);
            rates.push(system.death_rate(i, eta[i]));
            for j in 0..n {
                rates.push(system.jump[i][j] * eta[i] as f64);
            }
        }
        let total: f64 = rates.iter().sum();
        if total == 0.0 {
            return Ok(Configuration::new(eta));
        }
        // inversion: U in (0, 1]
        let u: f64 = 1.0 - rng.random::<f64>();
        now += -u.ln() / total;
        if now > t {
            return Ok(Configuration::new(eta));
        }
        events += 1;
        if events > MAX_EVENTS {
            return Err(Error::EventCap(MAX_EVENTS));
        }
        let mut pick = rng.random::<f64>() * total;
        let mut chosen = rates.len() - 1;
        for (e, r) in rates.iter().enumerate() {
            if pick < *r {
                chosen = e;
                break;
            }
            pick -= r;
        }
        let (i, kind) = (chosen / (n + 2), chosen % (n + 2));
        match kind {
            0 => eta[i] += 1,
            1 => eta[i] -= 1,
            k => {
                eta[i] -= 1;
                eta[k - 2] += 1;
            }
        }
    }
}

/// One exact-jump trajectory, reproducible per seed.
pub fn gillespie_sample(system: &SiteSystem, init: &Configuration, t: f64, seed: u64) -> Result<Configuration> {
    run(system, init, t, &mut rng_for(seed, 0))
}

/// `samples` trajectories; sample `s` uses stream `s` of `seed`, so the
/// result does not depend on the thread count.
pub fn gillespie_batch(
    system: &SiteSystem,
    init: &Configuration,
    t: f64,
    seed: u64,
    samples: usize,
) -> Result<Vec<Configuration>> {
    par::map_range(samples, |s| run(system, init, t, &mut rng_for(seed, s as u64))).into_iter().collect()
}

/// Empirical weights on the box `shape` and the fraction of samples outside.
pub fn empirical_law(samples: &[Configuration], shape: &[usize]) -> (Vec<f64>, f64) {
    let len: usize = shape.iter().map(|s| s + 1).product();
    let mut w = vec![0.0; len];
    let mut outside = 0.0;
    let unit = 1.0 / samples.len().max(1) as f64;
    for c in samples {
        if c.counts.len() != shape.len() || c.counts.iter().zip(shape).any(|(k, s)| *k as usize > *s) {
            outside += unit;
            continue;
        }
        let flat = c.counts.iter().zip(shape).fold(0, |f, (k, s)| f * (s + 1) + *k as usize);
        w[flat] += unit;
    }
    (w, outside)
}

/// CSV with columns `seed,sample,site_0,…`.
pub fn samples_csv(seed: u64, samples: &[Configuration]) -> String {
    let n = samples.first().map_or(0, |c| c.counts.len());
    let mut s = String::from("seed,sample");
    for i in 0..n {
        s.push_str(&format!(",site_{i}"));
    }
    s.push('\n');
    for (k, c) in samples.iter().enumerate() {
        s.push_str(&format!("{seed},{k}"));
        for v in &c.counts {
            s.push_str(&format!(",{v}"));
        }
        s.push('\n');
    }
    s
}
