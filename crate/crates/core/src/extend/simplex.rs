//! Revised simplex for `min c·x, A x = b, x ≥ 0` with few rows.
//!
//! The basis inverse is kept explicitly (rows ≤ 21) and refreshed from
//! scratch periodically. Entering and leaving variables follow Bland's rule,
//! so the method terminates on degenerate problems.

use nalgebra::DMatrix;

/// Column access for the constraint matrix; columns may be implicit.
pub trait Columns {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn fill(&self, j: usize, out: &mut [f64]);

    fn dot(&self, j: usize, y: &[f64]) -> f64 {
        let mut col = vec![0.0; self.rows()];
        self.fill(j, &mut col);
        col.iter().zip(y).map(|(a, b)| a * b).sum()
    }
}

/// Columns `[1, bit_r(S) for r in rows]` of the extension equations: the
/// first row is `Σ α_S = 1`, then one row per selected constraint.
pub struct BlockColumns<'a> {
    pub masks: &'a [u32],
    pub rows: Vec<usize>,
}

impl Columns for BlockColumns<'_> {
    fn rows(&self) -> usize {
        self.rows.len() + 1
    }

    fn cols(&self) -> usize {
        self.masks.len()
    }

    fn fill(&self, j: usize, out: &mut [f64]) {
        let s = self.masks[j];
        out[0] = 1.0;
        for (k, &r) in self.rows.iter().enumerate() {
            out[k + 1] = f64::from((s >> r) & 1);
        }
    }

    fn dot(&self, j: usize, y: &[f64]) -> f64 {
        let s = self.masks[j];
        let mut acc = y[0];
        for (k, &r) in self.rows.iter().enumerate() {
            if (s >> r) & 1 == 1 {
                acc += y[k + 1];
            }
        }
        acc
    }
}

/// Explicit dense columns, `data[j]` is column `j`.
pub struct DenseColumns {
    pub rows: usize,
    pub data: Vec<Vec<f64>>,
}

impl Columns for DenseColumns {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.data.len()
    }

    fn fill(&self, j: usize, out: &mut [f64]) {
        out.copy_from_slice(&self.data[j]);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    Singular,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Structural variable values (empty unless phase 1 succeeded).
    pub x: Vec<f64>,
    /// Sum of artificial variables at the end of phase 1.
    pub infeasibility: f64,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    /// Phase-1 optimum above this is infeasible.
    pub feasibility_tol: f64,
    pub pivot_tol: f64,
    pub cost_tol: f64,
    pub max_iterations: usize,
    pub refactor_every: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            feasibility_tol: 1e-9,
            pivot_tol: 1e-11,
            cost_tol: 1e-11,
            max_iterations: 200_000,
            refactor_every: 50,
        }
    }
}

struct Tableau<'a, C: Columns + ?Sized> {
    a: &'a C,
    b: &'a [f64],
    m: usize,
    n: usize,
    /// Variable ids: `< n` structural, `n + r` artificial for row `r`.
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: DMatrix<f64>,
    xb: Vec<f64>,
    opts: SimplexOptions,
    iterations: usize,
    since_refactor: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Limit,
    Singular,
}

impl<'a, C: Columns + ?Sized> Tableau<'a, C> {
    fn new(a: &'a C, b: &'a [f64], opts: SimplexOptions) -> Self {
        let m = a.rows();
        let n = a.cols();
        Tableau {
            a,
            b,
            m,
            n,
            basis: (n..n + m).collect(),
            is_basic: vec![false; n],
            binv: DMatrix::identity(m, m),
            xb: b.to_vec(),
            opts,
            iterations: 0,
            since_refactor: 0,
        }
    }

    fn column(&self, var: usize, out: &mut [f64]) {
        if var < self.n {
            self.a.fill(var, out);
        } else {
            out.iter_mut().for_each(|v| *v = 0.0);
            out[var - self.n] = 1.0;
        }
    }

    /// `B⁻¹ A_j`.
    fn ftran(&self, var: usize) -> Vec<f64> {
        let mut col = vec![0.0; self.m];
        self.column(var, &mut col);
        (0..self.m)
            .map(|r| (0..self.m).map(|k| self.binv[(r, k)] * col[k]).sum())
            .collect()
    }

    fn pivot(&mut self, row: usize, var: usize, u: &[f64]) {
        let pr = u[row];
        for k in 0..self.m {
            self.binv[(row, k)] /= pr;
        }
        self.xb[row] /= pr;
        for r in 0..self.m {
            if r != row && u[r] != 0.0 {
                let f = u[r];
                for k in 0..self.m {
                    let v = self.binv[(row, k)];
                    self.binv[(r, k)] -= f * v;
                }
                self.xb[r] -= f * self.xb[row];
            }
        }
        let old = self.basis[row];
        if old < self.n {
            self.is_basic[old] = false;
        }
        self.basis[row] = var;
        if var < self.n {
            self.is_basic[var] = true;
        }
        self.iterations += 1;
        self.since_refactor += 1;
        if self.since_refactor >= self.opts.refactor_every {
            self.refactor();
        }
    }

    /// Recompute `B⁻¹` and the basic solution from the basis columns.
    fn refactor(&mut self) -> bool {
        self.since_refactor = 0;
        let mut bmat = DMatrix::zeros(self.m, self.m);
        let mut col = vec![0.0; self.m];
        for (c, &var) in self.basis.iter().enumerate() {
            self.column(var, &mut col);
            for r in 0..self.m {
                bmat[(r, c)] = col[r];
            }
        }
        match bmat.try_inverse() {
            Some(inv) => {
                self.binv = inv;
                self.xb = (0..self.m)
                    .map(|r| (0..self.m).map(|k| self.binv[(r, k)] * self.b[k]).sum())
                    .collect();
                true
            }
            None => false,
        }
    }

    fn duals(&self, cost: &dyn Fn(usize) -> f64) -> Vec<f64> {
        let cb: Vec<f64> = self.basis.iter().map(|&v| cost(v)).collect();
        (0..self.m)
            .map(|k| (0..self.m).map(|r| cb[r] * self.binv[(r, k)]).sum())
            .collect()
    }

    /// Run simplex iterations with the given cost; only structural
    /// variables may enter.
    fn optimize(&mut self, cost: &dyn Fn(usize) -> f64) -> Step {
        loop {
            if self.iterations >= self.opts.max_iterations {
                return Step::Limit;
            }
            let y = self.duals(cost);
            let entering = (0..self.n)
                .filter(|&j| !self.is_basic[j])
                .find(|&j| cost(j) - self.a.dot(j, &y) < -self.opts.cost_tol);
            let Some(j) = entering else {
                return Step::Optimal;
            };
            let u = self.ftran(j);
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                if u[r] > self.opts.pivot_tol {
                    let t = self.xb[r].max(0.0) / u[r];
                    leave = match leave {
                        None => Some((r, t)),
                        Some((lr, lt)) => {
                            if t < lt - 1e-15 || (t <= lt + 1e-15 && self.basis[r] < self.basis[lr])
                            {
                                Some((r, t))
                            } else {
                                Some((lr, lt))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Step::Unbounded;
            };
            self.pivot(row, j, &u);
            if self.since_refactor == 0 && !self.binv.iter().all(|v| v.is_finite()) {
                return Step::Singular;
            }
        }
    }

    fn objective(&self, cost: &dyn Fn(usize) -> f64) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .map(|(&v, &x)| cost(v) * x)
            .sum()
    }

    fn structural(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (&v, &val) in self.basis.iter().zip(&self.xb) {
            if v < self.n {
                x[v] = if (-1e-12..0.0).contains(&val) {
                    0.0
                } else {
                    val
                };
            }
        }
        x
    }

    /// Pivot basic artificials (at zero level) out where possible.
    fn expel_artificials(&mut self) {
        for row in 0..self.m {
            if self.basis[row] < self.n {
                continue;
            }
            let candidate = (0..self.n).filter(|&j| !self.is_basic[j]).find_map(|j| {
                let u = self.ftran(j);
                (u[row].abs() > 1e-9).then_some((j, u))
            });
            if let Some((j, u)) = candidate {
                self.pivot(row, j, &u);
            }
        }
    }
}

/// Solve `min cost·x, A x = b, x ≥ 0` (`b ≥ 0`). With `cost = None` only
/// feasibility is decided.
pub fn solve<C: Columns + ?Sized>(
    a: &C,
    b: &[f64],
    cost: Option<&[f64]>,
    opts: SimplexOptions,
) -> LpSolution {
    assert_eq!(a.rows(), b.len());
    assert!(
        b.iter().all(|&v| v >= 0.0),
        "right-hand side must be non-negative"
    );
    let mut t = Tableau::new(a, b, opts);
    let n = t.n;
    let phase1 = move |v: usize| if v >= n { 1.0 } else { 0.0 };
    let fail = |status, t: &Tableau<'_, C>, infeasibility| LpSolution {
        status,
        x: Vec::new(),
        infeasibility,
        objective: f64::NAN,
        iterations: t.iterations,
    };
    match t.optimize(&phase1) {
        Step::Optimal => {}
        Step::Limit => return fail(LpStatus::IterationLimit, &t, f64::NAN),
        Step::Singular | Step::Unbounded => return fail(LpStatus::Singular, &t, f64::NAN),
    }
    if !t.refactor() {
        return fail(LpStatus::Singular, &t, f64::NAN);
    }
    let infeasibility = t.objective(&phase1).max(0.0);
    if infeasibility > opts.feasibility_tol {
        return fail(LpStatus::Infeasible, &t, infeasibility);
    }
    t.expel_artificials();
    let Some(c) = cost else {
        return LpSolution {
            status: LpStatus::Optimal,
            x: t.structural(),
            infeasibility,
            objective: 0.0,
            iterations: t.iterations,
        };
    };
    let phase2 = |v: usize| if v < n { c[v] } else { 0.0 };
    let status = match t.optimize(&phase2) {
        Step::Optimal => LpStatus::Optimal,
        Step::Unbounded => LpStatus::Unbounded,
        Step::Limit => LpStatus::IterationLimit,
        Step::Singular => LpStatus::Singular,
    };
    t.refactor();
    LpSolution {
        status,
        x: t.structural(),
        infeasibility,
        objective: t.objective(&phase2),
        iterations: t.iterations,
    }
}

/// Largest `|A x − b|` entry.
pub fn residual<C: Columns + ?Sized>(a: &C, b: &[f64], x: &[f64]) -> f64 {
    let m = a.rows();
    let mut acc = vec![0.0; m];
    let mut col = vec![0.0; m];
    for (j, &xj) in x.iter().enumerate() {
        if xj != 0.0 {
            a.fill(j, &mut col);
            for r in 0..m {
                acc[r] += col[r] * xj;
            }
        }
    }
    acc.iter()
        .zip(b)
        .map(|(s, t)| (s - t).abs())
        .fold(0.0, f64::max)
}
