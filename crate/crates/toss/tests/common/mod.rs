//! Independent oracles shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use toss::toss_core::lp::LinearProgram;

/// Gaussian elimination with partial pivoting; `None` when singular.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-10 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for i in c + 1..n {
            let f = a[i][c] / a[c][c];
            for k in c..n {
                a[i][k] -= f * a[c][k];
            }
            b[i] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

fn feasible(lp: &LinearProgram, x: &[f64], tol: f64) -> bool {
    let bounds = x
        .iter()
        .enumerate()
        .all(|(j, &v)| v >= lp.lower[j] - tol && v <= lp.upper[j] + tol);
    bounds
        && lp.rows.iter().all(|r| {
            let a: f64 = r.coeffs.iter().map(|&(j, c)| c * x[j]).sum();
            a >= r.lower - tol && a <= r.upper + tol
        })
}

/// Minimum of the objective over all basic feasible solutions, found by
/// making every `n`-subset of bound and row constraints tight. Requires
/// finite variable bounds, so the feasible set is a polytope.
pub fn bfs_enumeration(lp: &LinearProgram) -> Option<f64> {
    let n = lp.cost.len();
    let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cons.push((e.clone(), lp.lower[j]));
        cons.push((e, lp.upper[j]));
    }
    for r in &lp.rows {
        let mut a = vec![0.0; n];
        for &(j, c) in &r.coeffs {
            a[j] += c;
        }
        for b in [r.lower, r.upper] {
            if b.is_finite() {
                cons.push((a.clone(), b));
            }
        }
    }
    let mut best: Option<f64> = None;
    let mut pick = Vec::with_capacity(n);
    subsets(cons.len(), n, 0, &mut pick, &mut |idx| {
        let a = idx.iter().map(|&i| cons[i].0.clone()).collect();
        let b = idx.iter().map(|&i| cons[i].1).collect();
        if let Some(x) = solve_dense(a, b) {
            if feasible(lp, &x, 1e-9) {
                let f: f64 = lp.offset + x.iter().zip(&lp.cost).map(|(a, c)| a * c).sum::<f64>();
                best = Some(best.map_or(f, |v: f64| v.min(f)));
            }
        }
    });
    best
}

fn subsets(
    total: usize,
    k: usize,
    from: usize,
    pick: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    if pick.len() == k {
        f(pick);
        return;
    }
    for i in from..total {
        pick.push(i);
        subsets(total, k, i + 1, pick, f);
        pick.pop();
    }
}

/// Random LP with at most 6 boxed variables and 8 rows. Most instances
/// are built around an interior point so they are feasible.
pub fn random_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = rng.gen_range(1..=6);
    let m = rng.gen_range(1..=8);
    let around_point = rng.gen_bool(0.85);
    let mut lp = LinearProgram::new();
    let mut x0 = Vec::with_capacity(n);
    for j in 0..n {
        let lo = rng.gen_range(-5.0..2.0);
        let hi = lo + rng.gen_range(0.1..5.0);
        x0.push(rng.gen_range(lo..hi));
        lp.add_var(format!("x{j}"), rng.gen_range(-3.0..3.0), lo, hi);
    }
    for i in 0..m {
        let mut coeffs = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.7) {
                coeffs.push((j, rng.gen_range(-2.0..2.0)));
            }
        }
        let c = if around_point {
            coeffs.iter().map(|&(j, a)| a * x0[j]).sum::<f64>()
        } else {
            rng.gen_range(-3.0..3.0)
        };
        let (lo, hi) = match rng.gen_range(0..4) {
            0 => (f64::NEG_INFINITY, c + rng.gen_range(0.0..1.0)),
            1 => (c - rng.gen_range(0.0..1.0), f64::INFINITY),
            2 => (c, c),
            _ => (c - rng.gen_range(0.0..1.0), c + rng.gen_range(0.0..1.0)),
        };
        lp.add_row(format!("r{i}"), coeffs, lo, hi);
    }
    lp
}

/// Central-difference Jacobian of `f` at `x`.
pub fn central_jacobian(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let m = f(x).len();
    let mut jac = vec![vec![0.0; x.len()]; m];
    for c in 0..x.len() {
        let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
        xp[c] += h;
        xm[c] -= h;
        let (fp, fm) = (f(&xp), f(&xm));
        for r in 0..m {
            jac[r][c] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    jac
}

/// Relative error; entries below 1e-3 in magnitude compare absolutely.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-3)
}
