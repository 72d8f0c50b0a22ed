//! Bounded-variable primal simplex with an explicit dense basis inverse.
//!
//! Every row gets a logical variable `s_i = a_i x` bounded by the row
//! bounds, so the constraint matrix is `[A  -I]`. Rows violated by the
//! starting point get an artificial variable; phase one drives those to
//! zero. Nonbasic variables may rest anywhere inside their bounds, which
//! lets a good starting point skip most of phase one.
//!
//! Pricing is Dantzig's rule, switching to Bland's rule after a run of
//! degenerate pivots and back after the first nondegenerate one.

use alloc::vec;
use alloc::vec::Vec;

use super::{LinearProgram, LpSolution, LpStatus};
use crate::math::abs;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimplexOptions {
    pub max_iters: usize,
    pub feas_tol: f64,
    pub opt_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iters: 200_000,
            feas_tol: 1e-9,
            opt_tol: 1e-9,
        }
    }
}

const PIVOT_TOL: f64 = 1e-9;
const REFRESH_EVERY: usize = 64;
const REINVERT_EVERY: usize = 1024;
const DEGENERATE_RUN: usize = 40;
const PHASE1_TOL: f64 = 1e-8;
const MAX_ROUNDS: usize = 4;
const NONBASIC: usize = usize::MAX;

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

struct Solver {
    m: usize,
    n: usize,
    col_start: Vec<usize>,
    col_row: Vec<usize>,
    col_val: Vec<f64>,
    /// `(row, sign)` per artificial column.
    art: Vec<(usize, f64)>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    pos: Vec<usize>,
    /// Column-major: `binv[k * m + i]` is entry `(i, k)` of the inverse.
    binv: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
    alpha: Vec<f64>,
    iters: usize,
    opts: SimplexOptions,
}

impl Solver {
    fn new(lp: &LinearProgram, start: &[f64], opts: SimplexOptions) -> Self {
        let n = lp.num_vars();
        let m = lp.rows.len();
        let mut counts = vec![0usize; n + 1];
        for r in &lp.rows {
            for &(j, _) in &r.coeffs {
                counts[j + 1] += 1;
            }
        }
        for j in 0..n {
            counts[j + 1] += counts[j];
        }
        let col_start = counts.clone();
        let nnz = col_start[n];
        let mut fill = counts;
        let mut col_row = vec![0; nnz];
        let mut col_val = vec![0.0; nnz];
        for (i, r) in lp.rows.iter().enumerate() {
            for &(j, a) in &r.coeffs {
                col_row[fill[j]] = i;
                col_val[fill[j]] = a;
                fill[j] += 1;
            }
        }

        let mut lo = lp.lower.clone();
        let mut hi = lp.upper.clone();
        let mut x: Vec<f64> = (0..n).map(|j| start[j].max(lo[j]).min(hi[j])).collect();
        for r in &lp.rows {
            lo.push(r.lower);
            hi.push(r.upper);
        }
        x.resize(n + m, 0.0);
        let mut s = Self {
            m,
            n,
            col_start,
            col_row,
            col_val,
            art: Vec::new(),
            lo,
            hi,
            x,
            cost: Vec::new(),
            basis: vec![0; m],
            pos: vec![NONBASIC; n + m],
            binv: vec![0.0; m * m],
            y: vec![0.0; m],
            d: Vec::new(),
            alpha: vec![0.0; m],
            iters: 0,
            opts,
        };
        let mut act = vec![0.0; m];
        for j in 0..n {
            s.for_col(j, |i, a| act[i] += a * s.x[j]);
        }
        let tol = opts.feas_tol;
        for i in 0..m {
            let (rl, ru) = (s.lo[n + i], s.hi[n + i]);
            if act[i] >= rl - tol && act[i] <= ru + tol {
                s.x[n + i] = act[i];
                s.set_basic(i, n + i);
                s.binv[i * m + i] = -1.0;
            } else {
                let b = if act[i] < rl { rl } else { ru };
                let sign = if b > act[i] { 1.0 } else { -1.0 };
                s.x[n + i] = b;
                let col = n + m + s.art.len();
                s.art.push((i, sign));
                s.lo.push(0.0);
                s.hi.push(f64::INFINITY);
                s.x.push(abs(b - act[i]));
                s.pos.push(NONBASIC);
                s.set_basic(i, col);
                s.binv[i * m + i] = sign;
            }
        }
        s
    }

    fn ncols(&self) -> usize {
        self.n + self.m + self.art.len()
    }

    fn set_basic(&mut self, i: usize, col: usize) {
        self.basis[i] = col;
        self.pos[col] = i;
    }

    #[inline]
    fn for_col(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        if j < self.n {
            for p in self.col_start[j]..self.col_start[j + 1] {
                f(self.col_row[p], self.col_val[p]);
            }
        } else if j < self.n + self.m {
            f(j - self.n, -1.0);
        } else {
            let (r, sign) = self.art[j - self.n - self.m];
            f(r, sign);
        }
    }

    fn art_sum(&self) -> f64 {
        (self.n + self.m..self.ncols()).map(|j| self.x[j]).sum()
    }

    /// Recomputes basic values from the nonbasic ones and the duals from
    /// the basic costs.
    fn refresh(&mut self) {
        let m = self.m;
        let mut rhs = vec![0.0; m];
        for j in 0..self.ncols() {
            if self.pos[j] == NONBASIC && self.x[j] != 0.0 {
                let xj = self.x[j];
                self.for_col(j, |i, a| rhs[i] -= a * xj);
            }
        }
        let mut xb = vec![0.0; m];
        for (k, &r) in rhs.iter().enumerate() {
            if r != 0.0 {
                let col = &self.binv[k * m..(k + 1) * m];
                for (v, c) in xb.iter_mut().zip(col) {
                    *v += r * c;
                }
            }
        }
        for i in 0..m {
            self.x[self.basis[i]] = xb[i];
        }
        let cb: Vec<f64> = self.basis.iter().map(|&b| self.cost[b]).collect();
        for k in 0..m {
            let col = &self.binv[k * m..(k + 1) * m];
            self.y[k] = cb.iter().zip(col).map(|(c, b)| c * b).sum();
        }
    }

    /// Rebuilds the basis inverse by Gauss-Jordan elimination. Columns that
    /// turn out dependent are swapped for logicals.
    fn reinvert(&mut self) {
        let m = self.m;
        loop {
            let mut mat = vec![0.0; m * m];
            for c in 0..m {
                let b = self.basis[c];
                let mat_ref = &mut mat;
                self.for_col(b, |i, a| mat_ref[i * m + c] = a);
            }
            let mut inv = vec![0.0; m * m];
            for i in 0..m {
                inv[i * m + i] = 1.0;
            }
            let mut row_used = vec![false; m];
            let mut pivot_row = vec![usize::MAX; m];
            let mut order: Vec<usize> = (0..m).filter(|&c| self.basis[c] >= self.n).collect();
            order.extend((0..m).filter(|&c| self.basis[c] < self.n));
            let mut failed = None;
            for &c in &order {
                let mut p = usize::MAX;
                let mut best = 0.0;
                for i in 0..m {
                    if !row_used[i] && abs(mat[i * m + c]) > best {
                        best = abs(mat[i * m + c]);
                        p = i;
                    }
                }
                if best < 1e-11 {
                    failed = Some(c);
                    break;
                }
                row_used[p] = true;
                pivot_row[c] = p;
                let piv = mat[p * m + c];
                let mnz: Vec<usize> = (0..m).filter(|&k| mat[p * m + k] != 0.0).collect();
                let inz: Vec<usize> = (0..m).filter(|&k| inv[p * m + k] != 0.0).collect();
                for &k in &mnz {
                    mat[p * m + k] /= piv;
                }
                for &k in &inz {
                    inv[p * m + k] /= piv;
                }
                for i in 0..m {
                    let f = mat[i * m + c];
                    if i == p || f == 0.0 {
                        continue;
                    }
                    for &k in &mnz {
                        mat[i * m + k] -= f * mat[p * m + k];
                    }
                    for &k in &inz {
                        inv[i * m + k] -= f * inv[p * m + k];
                    }
                    mat[i * m + c] = 0.0;
                }
            }
            if let Some(c) = failed {
                // replace the dependent column by the logical of a row no
                // pivot has claimed yet
                let free_row = (0..m).find(|&i| !row_used[i] && self.pos[self.n + i] == NONBASIC);
                let b = self.basis[c];
                self.pos[b] = NONBASIC;
                self.x[b] = self.x[b].max(self.lo[b]).min(self.hi[b]);
                let logical = self.n
                    + free_row.unwrap_or_else(|| {
                        (0..m).find(|&i| self.pos[self.n + i] == NONBASIC).unwrap()
                    });
                self.set_basic(c, logical);
                continue;
            }
            for c in 0..m {
                let p = pivot_row[c];
                for k in 0..m {
                    self.binv[k * m + c] = inv[p * m + k];
                }
            }
            return;
        }
    }

    fn compute_alpha(&mut self, q: usize) {
        let m = self.m;
        self.alpha.iter_mut().for_each(|a| *a = 0.0);
        let mut alpha = core::mem::take(&mut self.alpha);
        self.for_col(q, |k, v| {
            let col = &self.binv[k * m..(k + 1) * m];
            for (a, c) in alpha.iter_mut().zip(col) {
                *a += v * c;
            }
        });
        self.alpha = alpha;
    }

    fn reduced_costs(&mut self) {
        let nc = self.ncols();
        self.d.resize(nc, 0.0);
        for j in 0..nc {
            if self.pos[j] != NONBASIC {
                self.d[j] = 0.0;
                continue;
            }
            let mut dj = self.cost[j];
            self.for_col(j, |i, a| dj -= self.y[i] * a);
            self.d[j] = dj;
        }
    }

    fn entering(&self, bland: bool) -> Option<(usize, f64)> {
        let (ft, ot) = (self.opts.feas_tol, self.opts.opt_tol);
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.ncols() {
            if self.pos[j] != NONBASIC || self.lo[j] == self.hi[j] {
                continue;
            }
            let dj = self.d[j];
            let dir = if dj < -ot && self.x[j] < self.hi[j] - ft {
                1.0
            } else if dj > ot && self.x[j] > self.lo[j] + ft {
                -1.0
            } else {
                continue;
            };
            if bland {
                return Some((j, dir));
            }
            if abs(dj) > best_score {
                best_score = abs(dj);
                best = Some((j, dir));
            }
        }
        best
    }

    /// Ratio test. Returns `(theta, leaving position)`; `None` for the
    /// position means the entering variable reaches its own bound first.
    fn ratio_test(&self, q: usize, dir: f64, bland: bool) -> Option<(f64, Option<usize>)> {
        let tol = self.opts.feas_tol;
        let own = if dir > 0.0 {
            self.hi[q] - self.x[q]
        } else {
            self.x[q] - self.lo[q]
        };
        // relaxed bound pass
        let mut relaxed = own;
        for i in 0..self.m {
            let a = self.alpha[i];
            if abs(a) < PIVOT_TOL {
                continue;
            }
            let rate = -dir * a;
            let b = self.basis[i];
            // a basic variable already past its bound blocks at zero step
            let lim = if rate < 0.0 {
                (self.x[b] - self.lo[b] + tol) / -rate
            } else {
                (self.hi[b] - self.x[b] + tol) / rate
            }
            .max(0.0);
            if lim < relaxed {
                relaxed = lim;
            }
        }
        if relaxed == f64::INFINITY {
            return None;
        }
        let mut pick: Option<usize> = None;
        let mut pick_ratio = f64::INFINITY;
        let mut pick_key = 0.0;
        for i in 0..self.m {
            let a = self.alpha[i];
            if abs(a) < PIVOT_TOL {
                continue;
            }
            let rate = -dir * a;
            let b = self.basis[i];
            let ratio = if rate < 0.0 {
                (self.x[b] - self.lo[b]).max(0.0) / -rate
            } else {
                (self.hi[b] - self.x[b]).max(0.0) / rate
            };
            if ratio > relaxed {
                continue;
            }
            let better = if bland {
                pick.is_none_or(|p| {
                    ratio < pick_ratio - 1e-12 || (ratio <= pick_ratio + 1e-12 && b < self.basis[p])
                })
            } else {
                abs(a) > pick_key
            };
            if better {
                pick = Some(i);
                pick_ratio = ratio;
                pick_key = abs(a);
            }
        }
        match pick {
            Some(i) if pick_ratio < own => Some((pick_ratio, Some(i))),
            _ if own.is_finite() => Some((own, None)),
            Some(i) => Some((pick_ratio, Some(i))),
            None => None,
        }
    }

    fn pivot(&mut self, q: usize, r: usize) {
        let m = self.m;
        let ar = self.alpha[r];
        let rho: Vec<(usize, f64)> = (0..m)
            .map(|k| (k, self.binv[k * m + r]))
            .filter(|&(_, v)| v != 0.0)
            .collect();
        let dq = self.d[q];
        for &(k, v) in &rho {
            self.y[k] += dq / ar * v;
        }
        for &(k, v) in &rho {
            let f = v / ar;
            let col = &mut self.binv[k * m..(k + 1) * m];
            for (c, a) in col.iter_mut().zip(&self.alpha) {
                *c -= a * f;
            }
            col[r] = f;
        }
        let leaving = self.basis[r];
        self.pos[leaving] = NONBASIC;
        self.set_basic(r, q);
    }

    fn run(&mut self) -> Outcome {
        let mut since_refresh = 0;
        let mut since_reinvert = 0;
        let mut degenerate = 0;
        let mut bland = false;
        let mut fresh = false;
        let mut checked = false;
        loop {
            if since_reinvert >= REINVERT_EVERY {
                self.reinvert();
                self.refresh();
                since_reinvert = 0;
                since_refresh = 0;
            } else if since_refresh >= REFRESH_EVERY {
                self.refresh();
                since_refresh = 0;
            }
            self.reduced_costs();
            let Some((q, dir)) = self.entering(bland) else {
                if fresh {
                    return Outcome::Optimal;
                }
                self.reinvert();
                self.refresh();
                since_reinvert = 0;
                since_refresh = 0;
                fresh = true;
                continue;
            };
            if self.iters >= self.opts.max_iters {
                return Outcome::IterationLimit;
            }
            self.iters += 1;
            since_refresh += 1;
            since_reinvert += 1;
            fresh = false;

            self.compute_alpha(q);
            let Some((theta, leave)) = self.ratio_test(q, dir, bland) else {
                // stale duals can fake an improving ray; confirm on a fresh inverse
                if !checked {
                    self.reinvert();
                    self.refresh();
                    since_reinvert = 0;
                    since_refresh = 0;
                    checked = true;
                    continue;
                }
                return Outcome::Unbounded;
            };
            if theta <= 1e-12 {
                degenerate += 1;
                if degenerate >= DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate = 0;
                bland = false;
            }
            checked = false;
            self.x[q] += dir * theta;
            for i in 0..self.m {
                let a = self.alpha[i];
                if a != 0.0 {
                    self.x[self.basis[i]] -= dir * theta * a;
                }
            }
            match leave {
                None => {
                    self.x[q] = if dir > 0.0 { self.hi[q] } else { self.lo[q] };
                }
                Some(r) => {
                    let b = self.basis[r];
                    let rate = -dir * self.alpha[r];
                    self.x[b] = if rate < 0.0 { self.lo[b] } else { self.hi[b] };
                    self.pivot(q, r);
                }
            }
        }
    }

    fn max_primal_infeasibility(&self) -> f64 {
        (0..self.ncols())
            .map(|j| (self.lo[j] - self.x[j]).max(self.x[j] - self.hi[j]))
            .fold(0.0, f64::max)
    }
}

fn default_start(lp: &LinearProgram) -> Vec<f64> {
    (0..lp.num_vars())
        .map(|j| 0.0f64.max(lp.lower[j]).min(lp.upper[j]))
        .collect()
}

/// Solves the LP. Deterministic for identical input.
pub fn solve(lp: &LinearProgram, opts: &SimplexOptions) -> LpSolution {
    let n = lp.num_vars();
    let mut start = lp
        .start
        .clone()
        .filter(|s| s.len() == n)
        .unwrap_or_else(|| default_start(lp));
    let mut total_iters = 0;
    let finish = |status: LpStatus, mut x: Vec<f64>, iters: usize, hint: Option<usize>| {
        for j in 0..n {
            x[j] = x[j].max(lp.lower[j]).min(lp.upper[j]);
        }
        LpSolution {
            status,
            objective: lp.objective(&x),
            max_violation: lp.max_violation(&x),
            x,
            iterations: iters,
            row_hint: hint,
        }
    };
    if (0..n).any(|j| lp.lower[j] > lp.upper[j]) {
        return finish(LpStatus::Infeasible, start, 0, None);
    }
    for _round in 0..MAX_ROUNDS {
        let mut s = Solver::new(
            lp,
            &start,
            SimplexOptions {
                max_iters: opts.max_iters - total_iters,
                ..*opts
            },
        );
        // phase one
        if !s.art.is_empty() {
            s.cost = vec![0.0; s.ncols()];
            for j in n + s.m..s.ncols() {
                s.cost[j] = 1.0;
            }
            s.refresh();
            let out = s.run();
            total_iters += s.iters;
            match out {
                Outcome::IterationLimit => {
                    return finish(
                        LpStatus::IterationLimit,
                        s.x[..n].to_vec(),
                        total_iters,
                        None,
                    );
                }
                Outcome::Unbounded => {
                    // cannot happen with a bounded-below phase-one objective
                    return finish(LpStatus::Infeasible, s.x[..n].to_vec(), total_iters, None);
                }
                Outcome::Optimal => {}
            }
            if s.art_sum() > PHASE1_TOL {
                let worst = (0..s.art.len())
                    .max_by(|&a, &b| s.x[n + s.m + a].partial_cmp(&s.x[n + s.m + b]).unwrap())
                    .map(|k| s.art[k].0);
                return finish(LpStatus::Infeasible, s.x[..n].to_vec(), total_iters, worst);
            }
            for j in n + s.m..s.ncols() {
                s.hi[j] = 0.0;
                s.x[j] = 0.0;
            }
            s.iters = 0;
        }
        // phase two
        s.cost = lp.cost.clone();
        s.cost.resize(s.ncols(), 0.0);
        s.opts.max_iters = opts.max_iters - total_iters;
        s.refresh();
        let out = s.run();
        total_iters += s.iters;
        match out {
            Outcome::Unbounded => {
                return finish(LpStatus::Unbounded, s.x[..n].to_vec(), total_iters, None)
            }
            Outcome::IterationLimit => {
                return finish(
                    LpStatus::IterationLimit,
                    s.x[..n].to_vec(),
                    total_iters,
                    None,
                );
            }
            Outcome::Optimal => {}
        }
        let x = s.x[..n].to_vec();
        if s.max_primal_infeasibility() <= 10.0 * opts.feas_tol && lp.max_violation(&x) <= 1e-8 {
            return finish(LpStatus::Optimal, x, total_iters, None);
        }
        // numerical drift: restart from the current point
        start = x;
    }
    let x = start;
    let status = if lp.max_violation(&x) <= 1e-7 {
        LpStatus::Optimal
    } else {
        LpStatus::IterationLimit
    };
    finish(status, x, total_iters, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn single_variable_box() {
        let mut lp = LinearProgram::new();
        lp.add_var("x", 1.0, 1.0, 2.0);
        let s = solve(&lp, &SimplexOptions::default());
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.x, vec![1.0]);
    }

    #[test]
    fn unit_simplex_facet() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", -1.0, 0.0, 1.0);
        let y = lp.add_var("y", -1.0, 0.0, 1.0);
        lp.add_row("sum", vec![(x, 1.0), (y, 1.0)], -INF, 1.0);
        let s = solve(&lp, &SimplexOptions::default());
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 1.0).abs() < 1e-12);
        assert!((s.x[0] + s.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_rows_report_hint() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 1.0, 0.0, 1.0);
        lp.add_row("ok", vec![(x, 1.0)], 0.0, 1.0);
        lp.add_row("bad", vec![(x, 1.0)], 2.0, 3.0);
        let s = solve(&lp, &SimplexOptions::default());
        assert_eq!(s.status, LpStatus::Infeasible);
        assert_eq!(s.row_hint, Some(1));
    }

    #[test]
    fn unbounded_direction() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", -1.0, 0.0, INF);
        let y = lp.add_var("y", 0.0, 0.0, 1.0);
        lp.add_row("r", vec![(x, 1.0), (y, -1.0)], -1.0, INF);
        assert_eq!(
            solve(&lp, &SimplexOptions::default()).status,
            LpStatus::Unbounded
        );
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's cycling example, bounded above to keep it finite
        let mut lp = LinearProgram::new();
        let v: Vec<usize> = [-0.75, 150.0, -0.02, 6.0]
            .iter()
            .enumerate()
            .map(|(k, &c)| lp.add_var(alloc::format!("x{k}"), c, 0.0, 100.0))
            .collect();
        lp.add_row(
            "r1",
            vec![(v[0], 0.25), (v[1], -60.0), (v[2], -0.04), (v[3], 9.0)],
            -INF,
            0.0,
        );
        lp.add_row(
            "r2",
            vec![(v[0], 0.5), (v[1], -90.0), (v[2], -0.02), (v[3], 3.0)],
            -INF,
            0.0,
        );
        lp.add_row("r3", vec![(v[2], 1.0)], -INF, 1.0);
        let s = solve(&lp, &SimplexOptions::default());
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 0.05).abs() < 1e-9, "{}", s.objective);
    }

    #[test]
    fn honors_start_point() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 1.0, -5.0, 5.0);
        let y = lp.add_var("y", 1.0, -5.0, 5.0);
        lp.add_row("r", vec![(x, 1.0), (y, 1.0)], 1.0, INF);
        lp.start = Some(vec![0.5, 0.5]);
        let s = solve(&lp, &SimplexOptions::default());
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-12);
    }

    /// Solves a small dense square system; `None` if singular.
    fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
        let n = b.len();
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())?;
            if a[p][c].abs() < 1e-10 {
                return None;
            }
            a.swap(c, p);
            b.swap(c, p);
            for i in 0..n {
                if i != c {
                    let f = a[i][c] / a[c][c];
                    for k in c..n {
                        a[i][k] -= f * a[c][k];
                    }
                    b[i] -= f * b[c];
                }
            }
        }
        Some((0..n).map(|i| b[i] / a[i][i]).collect())
    }

    /// Best objective over all vertices: every choice of `n` tight
    /// constraints among rows and variable bounds.
    fn vertex_oracle(lp: &LinearProgram) -> Option<f64> {
        let n = lp.num_vars();
        let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            cons.push((e.clone(), lp.lower[j]));
            cons.push((e, lp.upper[j]));
        }
        for r in &lp.rows {
            let mut a = vec![0.0; n];
            for &(j, v) in &r.coeffs {
                a[j] = v;
            }
            for b in [r.lower, r.upper] {
                if b.is_finite() {
                    cons.push((a.clone(), b));
                }
            }
        }
        let k = cons.len();
        let mut idx: Vec<usize> = (0..n).collect();
        let mut best: Option<f64> = None;
        loop {
            let a = idx.iter().map(|&i| cons[i].0.clone()).collect();
            let b = idx.iter().map(|&i| cons[i].1).collect();
            if let Some(x) = solve_dense(a, b) {
                if lp.max_violation(&x) <= 1e-9 {
                    let f = lp.objective(&x);
                    best = Some(best.map_or(f, |v: f64| v.min(f)));
                }
            }
            // next combination
            let mut i = n;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if idx[i] < k - n + i {
                    idx[i] += 1;
                    for t in i + 1..n {
                        idx[t] = idx[t - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    fn random_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=8);
        let mut lp = LinearProgram::new();
        for j in 0..n {
            let lo = rng.gen_range(-3.0..1.0);
            let hi = lo + rng.gen_range(0.5..4.0);
            lp.add_var(alloc::format!("x{j}"), rng.gen_range(-2.0..2.0), lo, hi);
        }
        for i in 0..m {
            let mut coeffs = Vec::new();
            for j in 0..n {
                if rng.gen_bool(0.8) {
                    coeffs.push((j, rng.gen_range(-3.0..3.0)));
                }
            }
            let c = rng.gen_range(-4.0..4.0);
            let (lo, hi) = match rng.gen_range(0..3) {
                0 => (-INF, c),
                1 => (c, INF),
                _ => (c, c + rng.gen_range(0.0..3.0)),
            };
            lp.add_row(alloc::format!("r{i}"), coeffs, lo, hi);
        }
        lp
    }

    #[test]
    fn matches_vertex_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut feasible = 0;
        for case in 0..200 {
            let lp = random_lp(&mut rng);
            let s = solve(&lp, &SimplexOptions::default());
            match vertex_oracle(&lp) {
                Some(best) => {
                    feasible += 1;
                    assert_eq!(s.status, LpStatus::Optimal, "case {case}");
                    assert!(
                        (s.objective - best).abs() <= 1e-7,
                        "case {case}: {} vs {best}",
                        s.objective
                    );
                    assert!(s.max_violation <= 1e-7);
                }
                None => assert_eq!(s.status, LpStatus::Infeasible, "case {case}"),
            }
        }
        assert!(feasible > 50);
    }

    #[test]
    fn deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let lp = random_lp(&mut rng);
        assert_eq!(
            solve(&lp, &SimplexOptions::default()),
            solve(&lp, &SimplexOptions::default())
        );
    }
}
