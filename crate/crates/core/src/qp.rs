//! Strictly convex dense QP solved with the Goldfarb–Idnani dual
//! active-set method.
//!
//! ```text
//! min 0.5 x'Hx + g'x + c
//! s.t. lo_i <= a_i x <= hi_i,   lo <= x <= hi
//! ```
//!
//! `H` must be positive definite. Ranged rows are split into two one-sided
//! constraints `a x >= b`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs, hypot, sqrt};

#[derive(Clone, Debug, PartialEq)]
pub struct QpRow {
    pub coeffs: Vec<(usize, f64)>,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct QuadraticProgram {
    /// Row-major `n x n`.
    pub hessian: Vec<f64>,
    pub linear: Vec<f64>,
    pub constant: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<QpRow>,
}

impl QuadraticProgram {
    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let n = self.num_vars();
        let mut f = self.constant;
        for i in 0..n {
            let hx: f64 = (0..n).map(|k| self.hessian[i * n + k] * x[k]).sum();
            f += x[i] * (0.5 * hx + self.linear[i]);
        }
        f
    }

    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut v: f64 = 0.0;
        for (j, &xj) in x.iter().enumerate() {
            v = v.max(self.lower[j] - xj).max(xj - self.upper[j]);
        }
        for r in &self.rows {
            let a: f64 = r.coeffs.iter().map(|&(j, c)| c * x[j]).sum();
            v = v.max(r.lower - a).max(a - r.upper);
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QpStatus {
    Optimal,
    Infeasible,
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QpSolution {
    pub status: QpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Infinity norm of `Hx + g - sum_i u_i a_i` with the active
    /// multipliers.
    pub kkt_residual: f64,
    pub max_violation: f64,
    pub active: usize,
}

/// One-sided constraint `sign * (a x) >= sign * b`, stored as dense `a`.
struct Ineq {
    a: Vec<(usize, f64)>,
    b: f64,
}

fn expand(qp: &QuadraticProgram) -> Vec<Ineq> {
    let mut out = Vec::new();
    for j in 0..qp.num_vars() {
        if qp.lower[j].is_finite() {
            out.push(Ineq {
                a: vec![(j, 1.0)],
                b: qp.lower[j],
            });
        }
        if qp.upper[j].is_finite() {
            out.push(Ineq {
                a: vec![(j, -1.0)],
                b: -qp.upper[j],
            });
        }
    }
    for r in &qp.rows {
        if r.lower.is_finite() {
            out.push(Ineq {
                a: r.coeffs.clone(),
                b: r.lower,
            });
        }
        if r.upper.is_finite() {
            out.push(Ineq {
                a: r.coeffs.iter().map(|&(j, c)| (j, -c)).collect(),
                b: -r.upper,
            });
        }
    }
    out
}

fn dot_sparse(a: &[(usize, f64)], x: &[f64]) -> f64 {
    a.iter().map(|&(j, c)| c * x[j]).sum()
}

/// Lower Cholesky factor, row-major.
fn cholesky(h: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = h[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(Error::Qp(String::from("Hessian is not positive definite")));
                }
                l[i * n + i] = sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QpOptions {
    pub max_iters: usize,
    pub feas_tol: f64,
}

impl Default for QpOptions {
    fn default() -> Self {
        Self {
            max_iters: 50_000,
            feas_tol: 1e-9,
        }
    }
}

struct State {
    n: usize,
    /// Row-major `n x n`.
    j: Vec<f64>,
    /// Row-major `n x n`, upper triangular in its leading `q x q` block.
    r: Vec<f64>,
    q: usize,
}

impl State {
    fn jt_times(&self, a: &[(usize, f64)]) -> Vec<f64> {
        let n = self.n;
        let mut d = vec![0.0; n];
        for &(k, c) in a {
            let row = &self.j[k * n..(k + 1) * n];
            for (di, jk) in d.iter_mut().zip(row) {
                *di += c * jk;
            }
        }
        d
    }

    fn rotate_cols(&mut self, c0: usize, c1: usize, c: f64, s: f64) {
        let n = self.n;
        for k in 0..n {
            let (a, b) = (self.j[k * n + c0], self.j[k * n + c1]);
            self.j[k * n + c0] = c * a + s * b;
            self.j[k * n + c1] = -s * a + c * b;
        }
    }

    /// Appends a constraint whose transformed normal is `d = J' n`.
    fn add(&mut self, mut d: Vec<f64>) -> bool {
        let n = self.n;
        for i in (self.q + 1..n).rev() {
            if d[i] == 0.0 {
                continue;
            }
            let h = hypot(d[i - 1], d[i]);
            let (c, s) = (d[i - 1] / h, d[i] / h);
            d[i - 1] = h;
            d[i] = 0.0;
            self.rotate_cols(i - 1, i, c, s);
        }
        if abs(d[self.q]) < 1e-12 {
            return false;
        }
        for i in 0..=self.q {
            self.r[i * n + self.q] = d[i];
        }
        self.q += 1;
        true
    }

    /// Removes active constraint `k`.
    fn drop(&mut self, k: usize) {
        let n = self.n;
        let q = self.q;
        for col in k..q - 1 {
            for i in 0..q {
                self.r[i * n + col] = self.r[i * n + col + 1];
            }
        }
        for i in 0..q {
            self.r[i * n + q - 1] = 0.0;
        }
        for col in k..q - 1 {
            let (a, b) = (self.r[col * n + col], self.r[(col + 1) * n + col]);
            if b == 0.0 {
                continue;
            }
            let h = hypot(a, b);
            let (c, s) = (a / h, b / h);
            for cc in col..q - 1 {
                let (x0, x1) = (self.r[col * n + cc], self.r[(col + 1) * n + cc]);
                self.r[col * n + cc] = c * x0 + s * x1;
                self.r[(col + 1) * n + cc] = -s * x0 + c * x1;
            }
            self.rotate_cols(col, col + 1, c, s);
        }
        self.q -= 1;
    }

    /// Solves `R r = d[0..q]`.
    fn back_solve(&self, d: &[f64]) -> Vec<f64> {
        let n = self.n;
        let q = self.q;
        let mut r = vec![0.0; q];
        for i in (0..q).rev() {
            let mut s = d[i];
            for k in i + 1..q {
                s -= self.r[i * n + k] * r[k];
            }
            r[i] = s / self.r[i * n + i];
        }
        r
    }
}

/// Solves the QP. Deterministic for identical input.
pub fn solve_qp(qp: &QuadraticProgram, opts: &QpOptions) -> Result<QpSolution> {
    let n = qp.num_vars();
    if qp.hessian.len() != n * n || qp.lower.len() != n || qp.upper.len() != n {
        return Err(Error::Qp(String::from("inconsistent dimensions")));
    }
    let cons = expand(qp);
    let l = cholesky(&qp.hessian, n)?;
    // J = L^{-T}, upper triangular
    let mut linv = vec![0.0; n * n];
    for c in 0..n {
        for i in c..n {
            let mut s = if i == c { 1.0 } else { 0.0 };
            for k in c..i {
                s -= l[i * n + k] * linv[k * n + c];
            }
            linv[i * n + c] = s / l[i * n + i];
        }
    }
    let mut j = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            j[i * n + k] = linv[k * n + i];
        }
    }
    // unconstrained minimum x = -H^{-1} g = -J J' g
    let mut x = vec![0.0; n];
    {
        let jtg: Vec<f64> = (0..n)
            .map(|c| (0..n).map(|k| j[k * n + c] * qp.linear[k]).sum())
            .collect();
        for i in 0..n {
            x[i] = -(0..n).map(|c| j[i * n + c] * jtg[c]).sum::<f64>();
        }
    }
    let mut st = State {
        n,
        j,
        r: vec![0.0; n * n],
        q: 0,
    };
    let mut active: Vec<usize> = Vec::new();
    let mut u: Vec<f64> = Vec::new();
    let mut is_active = vec![false; cons.len()];
    let mut iters = 0;
    let tol = |b: f64| opts.feas_tol * (1.0 + abs(b));

    let status = 'outer: loop {
        // most violated constraint
        let mut p = usize::MAX;
        let mut worst = 0.0;
        for (i, c) in cons.iter().enumerate() {
            if is_active[i] {
                continue;
            }
            let s = dot_sparse(&c.a, &x) - c.b;
            if s < -tol(c.b) && s < worst {
                worst = s;
                p = i;
            }
        }
        if p == usize::MAX {
            break QpStatus::Optimal;
        }
        let mut u_new = 0.0;
        loop {
            iters += 1;
            if iters > opts.max_iters {
                break 'outer QpStatus::IterationLimit;
            }
            let np = &cons[p].a;
            let d = st.jt_times(np);
            let mut z = vec![0.0; n];
            for c in st.q..n {
                if d[c] != 0.0 {
                    for i in 0..n {
                        z[i] += st.j[i * n + c] * d[c];
                    }
                }
            }
            let r = st.back_solve(&d);
            // partial step
            let mut t1 = f64::INFINITY;
            let mut k_drop = usize::MAX;
            for (k, &rk) in r.iter().enumerate() {
                if rk > 1e-14 {
                    let t = u[k] / rk;
                    if t < t1 {
                        t1 = t;
                        k_drop = k;
                    }
                }
            }
            // full step
            let zn = dot_sparse(np, &z);
            let s = dot_sparse(np, &x) - cons[p].b;
            let t2 = if abs(zn) <= 1e-14 {
                f64::INFINITY
            } else {
                -s / zn
            };
            let t = t1.min(t2);
            if t == f64::INFINITY {
                break 'outer QpStatus::Infeasible;
            }
            for (uk, rk) in u.iter_mut().zip(&r) {
                *uk -= t * rk;
            }
            u_new += t;
            if t2 < f64::INFINITY {
                for i in 0..n {
                    x[i] += t * z[i];
                }
            }
            if t2 <= t1 {
                if st.add(d) {
                    active.push(p);
                    u.push(u_new);
                    is_active[p] = true;
                } else if s.abs() > tol(cons[p].b) {
                    break 'outer QpStatus::Infeasible;
                }
                break;
            }
            // drop the blocking constraint and retry p
            let k = k_drop;
            st.drop(k);
            is_active[active[k]] = false;
            active.remove(k);
            u.remove(k);
        }
    };

    // KKT residual with the active multipliers
    let mut grad = qp.linear.clone();
    for i in 0..n {
        grad[i] += (0..n).map(|k| qp.hessian[i * n + k] * x[k]).sum::<f64>();
    }
    for (&c, &uk) in active.iter().zip(&u) {
        for &(jj, a) in &cons[c].a {
            grad[jj] -= uk * a;
        }
    }
    let kkt = grad.iter().map(|g| abs(*g)).fold(0.0, f64::max);
    Ok(QpSolution {
        status,
        objective: qp.objective(&x),
        max_violation: qp.max_violation(&x),
        kkt_residual: kkt,
        active: active.len(),
        x,
        iterations: iters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const INF: f64 = f64::INFINITY;

    fn diag(d: &[f64]) -> Vec<f64> {
        let n = d.len();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            h[i * n + i] = d[i];
        }
        h
    }

    #[test]
    fn unconstrained_minimum() {
        let qp = QuadraticProgram {
            hessian: diag(&[2.0, 4.0]),
            linear: vec![-2.0, -8.0],
            constant: 0.0,
            lower: vec![-INF; 2],
            upper: vec![INF; 2],
            rows: vec![],
        };
        let s = solve_qp(&qp, &QpOptions::default()).unwrap();
        assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 2.0).abs() < 1e-12);
        assert_eq!(s.active, 0);
    }

    #[test]
    fn projection_onto_halfplane() {
        // min |x - (2, 2)|^2 s.t. x + y <= 2 -> (1, 1)
        let qp = QuadraticProgram {
            hessian: diag(&[2.0, 2.0]),
            linear: vec![-4.0, -4.0],
            constant: 8.0,
            lower: vec![-INF; 2],
            upper: vec![INF; 2],
            rows: vec![QpRow {
                coeffs: vec![(0, 1.0), (1, 1.0)],
                lower: -INF,
                upper: 2.0,
            }],
        };
        let s = solve_qp(&qp, &QpOptions::default()).unwrap();
        assert_eq!(s.status, QpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-12 && (s.x[1] - 1.0).abs() < 1e-12);
        assert!((s.objective - 2.0).abs() < 1e-12);
        assert!(s.kkt_residual < 1e-12);
    }

    #[test]
    fn infeasible_rows() {
        let qp = QuadraticProgram {
            hessian: diag(&[1.0]),
            linear: vec![0.0],
            constant: 0.0,
            lower: vec![0.0],
            upper: vec![1.0],
            rows: vec![QpRow {
                coeffs: vec![(0, 1.0)],
                lower: 2.0,
                upper: 3.0,
            }],
        };
        assert_eq!(
            solve_qp(&qp, &QpOptions::default()).unwrap().status,
            QpStatus::Infeasible
        );
    }

    #[test]
    fn rejects_indefinite_hessian() {
        let qp = QuadraticProgram {
            hessian: diag(&[1.0, -1.0]),
            linear: vec![0.0; 2],
            constant: 0.0,
            lower: vec![-1.0; 2],
            upper: vec![1.0; 2],
            rows: vec![],
        };
        assert!(solve_qp(&qp, &QpOptions::default()).is_err());
    }

    /// Two variables on a fine grid over the box: the QP optimum must be
    /// no worse than the best grid point and within grid resolution of it.
    #[test]
    fn matches_grid_search_on_random_toys() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let h = vec![
                2.0 + a[0] * a[0],
                a[0] * a[1],
                a[0] * a[1],
                1.0 + a[1] * a[1],
            ];
            let qp = QuadraticProgram {
                hessian: h,
                linear: vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)],
                constant: 0.0,
                lower: vec![-1.0, -1.0],
                upper: vec![1.0, 1.0],
                rows: vec![QpRow {
                    coeffs: vec![(0, rng.gen_range(-1.0..1.0)), (1, 1.0)],
                    lower: -0.5,
                    upper: 0.5,
                }],
            };
            let s = solve_qp(&qp, &QpOptions::default()).unwrap();
            assert_eq!(s.status, QpStatus::Optimal);
            let mut best = f64::INFINITY;
            let m = 400;
            for i in 0..=m {
                for k in 0..=m {
                    let x = [
                        -1.0 + 2.0 * i as f64 / m as f64,
                        -1.0 + 2.0 * k as f64 / m as f64,
                    ];
                    if qp.max_violation(&x) <= 0.0 {
                        best = best.min(qp.objective(&x));
                    }
                }
            }
            assert!(s.objective <= best + 1e-9);
            assert!(best - s.objective < 5e-2, "{} vs {best}", s.objective);
            assert!(s.kkt_residual < 1e-8);
        }
    }

    #[test]
    fn random_bounded_problems_satisfy_kkt() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let n = rng.gen_range(2..12);
            let m: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut h = vec![0.0; n * n];
            for i in 0..n {
                for k in 0..n {
                    h[i * n + k] = (0..n).map(|t| m[t * n + i] * m[t * n + k]).sum::<f64>();
                }
                h[i * n + i] += 0.5;
            }
            let mut rows = Vec::new();
            for _ in 0..n {
                let mut coeffs = Vec::new();
                for j in 0..n {
                    coeffs.push((j, rng.gen_range(-1.0..1.0)));
                }
                rows.push(QpRow {
                    coeffs,
                    lower: -1.0,
                    upper: 1.0,
                });
            }
            let qp = QuadraticProgram {
                hessian: h,
                linear: (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect(),
                constant: 0.0,
                lower: vec![-2.0; n],
                upper: vec![2.0; n],
                rows,
            };
            let s = solve_qp(&qp, &QpOptions::default()).unwrap();
            assert_eq!(s.status, QpStatus::Optimal);
            assert!(s.kkt_residual < 1e-8, "{}", s.kkt_residual);
            assert!(s.max_violation < 1e-8);
        }
    }
}
