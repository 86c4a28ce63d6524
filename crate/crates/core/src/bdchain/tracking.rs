//! Matching roots across nearby times.

use num_complex::Complex64;

use super::TRecord;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// `perm[i]` is the index in `next` continuing `prev[i]`, chosen to
/// minimize the total displacement (exhaustively up to 8 roots, greedy
/// nearest neighbour beyond).
pub fn match_roots(prev: &[Complex64], next: &[Complex64]) -> Vec<usize> {
    assert_eq!(prev.len(), next.len(), "root counts must agree");
    let n = prev.len();
    if n <= 8 {
        let cost = |p: &[usize]| -> f64 { p.iter().enumerate().map(|(i, &j)| (prev[i] - next[j]).norm()).sum() };
        let mut best = (f64::INFINITY, (0..n).collect::<Vec<_>>());
        for p in permutations(n) {
            let c = cost(&p);
            if c < best.0 {
                best = (c, p);
            }
        }
        return best.1;
    }
    let mut used = vec![false; n];
    prev.iter()
        .map(|a| {
            let j = (0..n)
                .filter(|&j| !used[j])
                .min_by(|&x, &y| (a - next[x]).norm().total_cmp(&(a - next[y]).norm()))
                .expect("free slot");
            used[j] = true;
            j
        })
        .collect()
}

/// Root trajectories as CSV with columns `t,root_index,re,im`, records
/// visited in the given order.
pub fn trajectories_csv(records: &[TRecord]) -> String {
    let mut out = String::from("t,root_index,re,im\n");
    let mut prev: Option<Vec<Complex64>> = None;
    for r in records {
        let roots: Vec<Complex64> = r.roots.iter().map(|&z| z.into()).collect();
        let ordered = match &prev {
            Some(p) if p.len() == roots.len() => match_roots(p, &roots).into_iter().map(|j| roots[j]).collect(),
            _ => roots,
        };
        for (i, z) in ordered.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}\n", r.t, i, z.re, z.im));
        }
        prev = Some(ordered);
    }
    out
}
