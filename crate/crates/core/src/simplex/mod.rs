//! Bounded-variable revised primal simplex over `f64` or exact rationals.
//!
//! Rows are stored as `lower <= a x <= upper`. Internally every row gets a
//! logical variable `z_i = a_i x`, so the working system is `A x - z = 0`
//! with bounds on both `x` and `z`. Rows that are violated by the starting
//! point receive an artificial variable for phase 1.

mod lu;

use std::sync::Arc;

use thiserror::Error;

use crate::scalar::Scalar;
pub use lu::{BasisFactor, LuFactor, Singular};

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow<T> {
    pub coeffs: Vec<(usize, T)>,
    pub lower: Option<T>,
    pub upper: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpModel<T> {
    pub num_cols: usize,
    pub cost: Vec<T>,
    pub obj_constant: T,
    pub col_lower: Vec<Option<T>>,
    pub col_upper: Vec<Option<T>>,
    pub rows: Vec<LpRow<T>>,
}

impl<T: Scalar> LpModel<T> {
    /// `num_cols` variables with bounds `[0, +inf)` and zero cost.
    pub fn new(num_cols: usize) -> Self {
        LpModel {
            num_cols,
            cost: vec![T::zero(); num_cols],
            obj_constant: T::zero(),
            col_lower: vec![Some(T::zero()); num_cols],
            col_upper: vec![None; num_cols],
            rows: Vec::new(),
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_row(
        &mut self,
        coeffs: Vec<(usize, T)>,
        lower: Option<T>,
        upper: Option<T>,
    ) -> usize {
        self.rows.push(LpRow {
            coeffs,
            lower,
            upper,
        });
        self.rows.len() - 1
    }

    pub fn add_dense_row(&mut self, coeffs: &[T], lower: Option<T>, upper: Option<T>) -> usize {
        let sparse = coeffs
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| (j, v.clone()))
            .collect();
        self.add_row(sparse, lower, upper)
    }

    pub fn set_free(&mut self, j: usize) {
        self.col_lower[j] = None;
        self.col_upper[j] = None;
    }

    pub fn row_activity(&self, i: usize, x: &[T]) -> T {
        self.rows[i]
            .coeffs
            .iter()
            .fold(T::zero(), |s, (j, a)| s + a.clone() * x[*j].clone())
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        self.cost
            .iter()
            .zip(x)
            .fold(self.obj_constant.clone(), |s, (c, v)| {
                s + c.clone() * v.clone()
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    /// The basis became numerically singular (float mode only).
    Singular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Free nonbasic variable resting at zero.
    Free,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub max_iterations: usize,
    pub bland_after: usize,
    pub refactor_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 200_000,
            bland_after: 1000,
            refactor_every: 50,
        }
    }
}

/// Column of the working system: structural `j < n`, logical `n + i`,
/// artificial `n + m + k`.
#[derive(Debug)]
struct Working<T> {
    n: usize,
    m: usize,
    cols: Vec<Vec<(usize, T)>>,
    artificial_rows: Vec<(usize, T)>,
    lower: Vec<Option<T>>,
    upper: Vec<Option<T>>,
}

impl<T: Scalar> Working<T> {
    fn num_vars(&self) -> usize {
        self.n + self.m + self.artificial_rows.len()
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n + self.m
    }

    fn column(&self, j: usize) -> Vec<(usize, T)> {
        if j < self.n {
            self.cols[j].clone()
        } else if j < self.n + self.m {
            vec![(j - self.n, -T::one())]
        } else {
            let (r, s) = &self.artificial_rows[j - self.n - self.m];
            vec![(*r, s.clone())]
        }
    }

    fn dense_column(&self, j: usize) -> Vec<T> {
        let mut d = vec![T::zero(); self.m];
        for (i, v) in self.column(j) {
            d[i] = v;
        }
        d
    }

    fn dot_column(&self, y: &[T], j: usize) -> T {
        if j < self.n {
            self.cols[j]
                .iter()
                .fold(T::zero(), |s, (i, v)| s + y[*i].clone() * v.clone())
        } else if j < self.n + self.m {
            -y[j - self.n].clone()
        } else {
            let (r, s) = &self.artificial_rows[j - self.n - self.m];
            y[*r].clone() * s.clone()
        }
    }
}

/// Snapshot of the final basis, shared by solutions for row extraction.
#[derive(Debug)]
struct BasisSnapshot<T> {
    work: Working<T>,
    factor: BasisFactor<T>,
    basis: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub objective: T,
    /// Structural values.
    pub x: Vec<T>,
    pub row_activity: Vec<T>,
    /// Status of structural (`j < n`) and logical (`n + i`) variables.
    pub var_status: Vec<VarStatus>,
    /// Variable occupying each basis position; entries `>= n + m` are
    /// artificials stuck at zero on redundant rows.
    pub basic_order: Vec<usize>,
    /// Row duals `y` with reduced costs `d_j = c_j - y a_j`.
    pub duals: Vec<T>,
    pub reduced_costs: Vec<T>,
    pub iterations: usize,
    snapshot: Option<Arc<BasisSnapshot<T>>>,
}

/// One nonbasic column of the tableau, expressed as a displacement `s >= 0`
/// from the variable's current value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Displacement {
    pub var: usize,
    /// `s = x - lower` (or `s = x` for free) when false; `s = upper - x`
    /// (or `s = -x` for free) when true.
    pub reflected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableauRow<T> {
    pub basic_var: usize,
    pub f: T,
    /// Coefficient per entry of [`LpSolution::displacements`].
    pub ray: Vec<T>,
}

impl<T: Scalar> TableauRow<T> {
    /// Value of the basic variable after moving the nonbasics by `s`.
    pub fn evaluate(&self, s: &[T]) -> T {
        self.ray
            .iter()
            .zip(s)
            .fold(self.f.clone(), |acc, (r, v)| acc + r.clone() * v.clone())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("variable {0} is not basic")]
    NotBasic(usize),
    #[error("solution is not optimal")]
    NotOptimal,
    #[error("variable index {0} out of range")]
    OutOfRange(usize),
}

impl<T: Scalar> LpSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn num_structural(&self) -> usize {
        self.x.len()
    }

    /// Value of structural or logical variable `v`.
    pub fn value(&self, v: usize) -> T {
        let n = self.x.len();
        if v < n {
            self.x[v].clone()
        } else {
            self.row_activity[v - n].clone()
        }
    }

    /// Nonbasic columns in the order used by [`extract_rows`]. Fixed
    /// variables are omitted; a free nonbasic contributes two columns.
    pub fn displacements(&self) -> Vec<Displacement> {
        let snap = match &self.snapshot {
            Some(s) => s,
            None => return Vec::new(),
        };
        let mut out = Vec::new();
        for (v, st) in self.var_status.iter().enumerate() {
            let fixed = match (&snap.work.lower[v], &snap.work.upper[v]) {
                (Some(l), Some(u)) => l == u,
                _ => false,
            };
            match st {
                VarStatus::Basic => {}
                _ if fixed => {}
                VarStatus::AtLower => out.push(Displacement {
                    var: v,
                    reflected: false,
                }),
                VarStatus::AtUpper => out.push(Displacement {
                    var: v,
                    reflected: true,
                }),
                VarStatus::Free => {
                    out.push(Displacement {
                        var: v,
                        reflected: false,
                    });
                    out.push(Displacement {
                        var: v,
                        reflected: true,
                    });
                }
            }
        }
        out
    }
}

/// Solves with default options.
pub fn solve<T: Scalar>(model: &LpModel<T>) -> LpSolution<T> {
    solve_with(model, &SolverOptions::default())
}

/// Solves `model` with extra `>=` rows appended (cut rows `coeffs x >= rhs`).
pub fn solve_lp<T: Scalar>(
    model: &LpModel<T>,
    extra_cuts: &[(Vec<(usize, T)>, T)],
) -> LpSolution<T> {
    if extra_cuts.is_empty() {
        return solve(model);
    }
    let mut m = model.clone();
    for (c, rhs) in extra_cuts {
        m.add_row(c.clone(), Some(rhs.clone()), None);
    }
    solve(&m)
}

pub fn solve_with<T: Scalar>(model: &LpModel<T>, opts: &SolverOptions) -> LpSolution<T> {
    let mut s = Solver::new(model, opts);
    s.run()
}

struct Solver<'a, T> {
    model: &'a LpModel<T>,
    opts: SolverOptions,
    work: Working<T>,
    x: Vec<T>,
    status: Vec<VarStatus>,
    basis: Vec<usize>,
    factor: Option<BasisFactor<T>>,
    cost: Vec<T>,
    iterations: usize,
}

enum PhaseResult {
    Optimal,
    Unbounded,
    IterationLimit,
    Singular,
}

fn exceeds<T: Scalar>(a: &T, b: &T) -> bool {
    a.clone() - b.clone() > T::feas_tol()
}

impl<'a, T: Scalar> Solver<'a, T> {
    fn new(model: &'a LpModel<T>, opts: &SolverOptions) -> Self {
        let n = model.num_cols;
        let m = model.rows.len();
        let mut cols: Vec<Vec<(usize, T)>> = vec![Vec::new(); n];
        for (i, row) in model.rows.iter().enumerate() {
            for (j, a) in &row.coeffs {
                if !a.is_zero() {
                    cols[*j].push((i, a.clone()));
                }
            }
        }
        let mut lower = model.col_lower.clone();
        let mut upper = model.col_upper.clone();
        for row in &model.rows {
            lower.push(row.lower.clone());
            upper.push(row.upper.clone());
        }
        Solver {
            model,
            opts: *opts,
            work: Working {
                n,
                m,
                cols,
                artificial_rows: Vec::new(),
                lower,
                upper,
            },
            x: Vec::new(),
            status: Vec::new(),
            basis: Vec::new(),
            factor: None,
            cost: Vec::new(),
            iterations: 0,
        }
    }

    fn failed(&self, status: LpStatus) -> LpSolution<T> {
        let n = self.work.n;
        let m = self.work.m;
        LpSolution {
            status,
            objective: T::zero(),
            x: if self.x.len() >= n {
                self.x[..n].to_vec()
            } else {
                vec![T::zero(); n]
            },
            row_activity: vec![T::zero(); m],
            var_status: vec![VarStatus::AtLower; n + m],
            basic_order: Vec::new(),
            duals: vec![T::zero(); m],
            reduced_costs: vec![T::zero(); n + m],
            iterations: self.iterations,
            snapshot: None,
        }
    }

    fn run(&mut self) -> LpSolution<T> {
        let n = self.work.n;
        let m = self.work.m;
        for j in 0..n + m {
            if let (Some(l), Some(u)) = (&self.work.lower[j], &self.work.upper[j]) {
                if exceeds(l, u) {
                    return self.failed(LpStatus::Infeasible);
                }
            }
        }
        // Starting point: structurals at a finite bound (or zero if free).
        self.x = vec![T::zero(); n + m];
        self.status = vec![VarStatus::AtLower; n + m];
        for j in 0..n {
            let (x, st) = match (&self.work.lower[j], &self.work.upper[j]) {
                (Some(l), _) => (l.clone(), VarStatus::AtLower),
                (None, Some(u)) => (u.clone(), VarStatus::AtUpper),
                (None, None) => (T::zero(), VarStatus::Free),
            };
            self.x[j] = x;
            self.status[j] = st;
        }
        self.basis = vec![0; m];
        for i in 0..m {
            let act = self.model.row_activity(i, &self.x[..n]);
            let lo = self.work.lower[n + i].clone();
            let up = self.work.upper[n + i].clone();
            let target = match (&lo, &up) {
                (Some(l), _) if exceeds(l, &act) => Some((l.clone(), VarStatus::AtLower)),
                (_, Some(u)) if exceeds(&act, u) => Some((u.clone(), VarStatus::AtUpper)),
                _ => None,
            };
            match target {
                None => {
                    self.x[n + i] = act;
                    self.status[n + i] = VarStatus::Basic;
                    self.basis[i] = n + i;
                }
                Some((b, st)) => {
                    let gap = b.clone() - act;
                    let sign = if gap > T::zero() { T::one() } else { -T::one() };
                    self.x[n + i] = b;
                    self.status[n + i] = st;
                    self.work.artificial_rows.push((i, sign));
                    self.x.push(gap.abs());
                    self.status.push(VarStatus::Basic);
                    self.work.lower.push(Some(T::zero()));
                    self.work.upper.push(None);
                    self.basis[i] = self.work.num_vars() - 1;
                }
            }
        }
        if let Err(Singular) = self.refactor() {
            return self.failed(LpStatus::Singular);
        }

        if !self.work.artificial_rows.is_empty() {
            self.cost = (0..self.work.num_vars())
                .map(|j| {
                    if self.work.is_artificial(j) {
                        T::one()
                    } else {
                        T::zero()
                    }
                })
                .collect();
            match self.phase() {
                PhaseResult::Optimal => {}
                PhaseResult::Unbounded => return self.failed(LpStatus::Singular),
                PhaseResult::IterationLimit => return self.failed(LpStatus::IterationLimit),
                PhaseResult::Singular => return self.failed(LpStatus::Singular),
            }
            let infeas =
                (n + m..self.work.num_vars()).fold(T::zero(), |s, j| s + self.x[j].clone());
            let tol = T::feas_tol() * T::of_i64(1 + self.work.artificial_rows.len() as i64);
            if infeas > tol {
                return self.failed(LpStatus::Infeasible);
            }
            for j in n + m..self.work.num_vars() {
                self.work.upper[j] = Some(T::zero());
                if self.status[j] != VarStatus::Basic {
                    self.x[j] = T::zero();
                    self.status[j] = VarStatus::AtLower;
                }
            }
            if let Err(Singular) = self.drive_out_artificials() {
                return self.failed(LpStatus::Singular);
            }
        }

        self.cost = (0..self.work.num_vars())
            .map(|j| {
                if j < n {
                    self.model.cost[j].clone()
                } else {
                    T::zero()
                }
            })
            .collect();
        let res = self.phase();
        match res {
            PhaseResult::Optimal => self.finish(LpStatus::Optimal),
            PhaseResult::Unbounded => {
                let mut s = self.failed(LpStatus::Unbounded);
                s.x = self.x[..n].to_vec();
                s
            }
            PhaseResult::IterationLimit => self.failed(LpStatus::IterationLimit),
            PhaseResult::Singular => self.failed(LpStatus::Singular),
        }
    }

    fn refactor(&mut self) -> Result<(), Singular> {
        let m = self.work.m;
        let mut dense = vec![T::zero(); m * m];
        for (p, &j) in self.basis.iter().enumerate() {
            for (i, v) in self.work.column(j) {
                dense[i * m + p] = v;
            }
        }
        self.factor = Some(BasisFactor::new(m, dense)?);
        if !T::EXACT {
            self.recompute_basics();
        }
        Ok(())
    }

    /// x_B = B^{-1} (-N x_N)
    fn recompute_basics(&mut self) {
        let m = self.work.m;
        let mut rhs = vec![T::zero(); m];
        for j in 0..self.work.num_vars() {
            if self.status[j] == VarStatus::Basic || self.x[j].is_zero() {
                continue;
            }
            for (i, v) in self.work.column(j) {
                rhs[i] = rhs[i].clone() - v * self.x[j].clone();
            }
        }
        let xb = self.factor.as_ref().expect("factor").ftran(&rhs);
        for (p, v) in xb.into_iter().enumerate() {
            self.x[self.basis[p]] = v;
        }
    }

    fn duals(&self) -> Vec<T> {
        let cb: Vec<T> = self.basis.iter().map(|&j| self.cost[j].clone()).collect();
        self.factor.as_ref().expect("factor").btran(&cb)
    }

    fn can_increase(&self, j: usize) -> bool {
        match self.status[j] {
            VarStatus::Basic => false,
            VarStatus::AtUpper => false,
            VarStatus::Free => true,
            VarStatus::AtLower => match &self.work.upper[j] {
                Some(u) => exceeds(u, &self.x[j]),
                None => true,
            },
        }
    }

    fn can_decrease(&self, j: usize) -> bool {
        match self.status[j] {
            VarStatus::Basic => false,
            VarStatus::AtLower => false,
            VarStatus::Free => true,
            VarStatus::AtUpper => match &self.work.lower[j] {
                Some(l) => exceeds(&self.x[j], l),
                None => true,
            },
        }
    }

    fn phase(&mut self) -> PhaseResult {
        let mut degenerate_run = 0usize;
        let mut bland = false;
        loop {
            if self.iterations >= self.opts.max_iterations {
                return PhaseResult::IterationLimit;
            }
            let y = self.duals();
            // Pricing.
            let mut entering: Option<(usize, T, bool)> = None;
            for j in 0..self.work.num_vars() {
                if self.status[j] == VarStatus::Basic {
                    continue;
                }
                let d = self.cost[j].clone() - self.work.dot_column(&y, j);
                let up = d < -T::opt_tol() && self.can_increase(j);
                let down = d > T::opt_tol() && self.can_decrease(j);
                if !(up || down) {
                    continue;
                }
                if bland {
                    entering = Some((j, d, up));
                    break;
                }
                let better = match &entering {
                    None => true,
                    Some((_, bd, _)) => d.abs() > bd.abs(),
                };
                if better {
                    entering = Some((j, d, up));
                }
            }
            let (q, _, increasing) = match entering {
                None => return PhaseResult::Optimal,
                Some(e) => e,
            };
            let alpha = self
                .factor
                .as_ref()
                .expect("factor")
                .ftran(&self.work.dense_column(q));
            // x_B changes by -dir * alpha * t.
            let dir = if increasing { T::one() } else { -T::one() };

            let mut best: Option<(T, Option<usize>, bool)> = None;
            if let (Some(l), Some(u)) = (&self.work.lower[q], &self.work.upper[q]) {
                best = Some((u.clone() - l.clone(), None, false));
            }
            for (p, a) in alpha.iter().enumerate() {
                if a.abs() <= T::pivot_tol() || a.is_zero() {
                    continue;
                }
                let rate = -(dir.clone() * a.clone());
                let b = self.basis[p];
                let (limit, to_upper) = if rate < T::zero() {
                    match &self.work.lower[b] {
                        Some(l) => ((self.x[b].clone() - l.clone()) / (-rate.clone()), false),
                        None => continue,
                    }
                } else {
                    match &self.work.upper[b] {
                        Some(u) => ((u.clone() - self.x[b].clone()) / rate.clone(), true),
                        None => continue,
                    }
                };
                let limit = if limit < T::zero() { T::zero() } else { limit };
                let replace = match &best {
                    None => true,
                    Some((bt, bp, _)) => {
                        if limit < bt.clone() - T::feas_tol() {
                            true
                        } else if limit <= bt.clone() + T::feas_tol() {
                            match bp {
                                None => false,
                                Some(bp) => {
                                    if bland {
                                        self.basis[p] < self.basis[*bp]
                                    } else if T::EXACT {
                                        limit < *bt
                                            || (limit == *bt && self.basis[p] < self.basis[*bp])
                                    } else {
                                        a.abs() > alpha[*bp].abs()
                                    }
                                }
                            }
                        } else {
                            false
                        }
                    }
                };
                if replace {
                    best = Some((limit, Some(p), to_upper));
                }
            }
            let (t, leave, to_upper) = match best {
                None => return PhaseResult::Unbounded,
                Some(b) => b,
            };
            self.iterations += 1;
            if t.abs() <= T::feas_tol() {
                degenerate_run += 1;
                if degenerate_run >= self.opts.bland_after {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }
            // Apply the step.
            if !t.is_zero() {
                self.x[q] = self.x[q].clone() + dir.clone() * t.clone();
                for (p, a) in alpha.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let b = self.basis[p];
                    self.x[b] = self.x[b].clone() - dir.clone() * a.clone() * t.clone();
                }
            }
            match leave {
                None => {
                    // Bound flip of the entering variable.
                    if increasing {
                        self.status[q] = VarStatus::AtUpper;
                        self.x[q] = self.work.upper[q].clone().expect("finite upper");
                    } else {
                        self.status[q] = VarStatus::AtLower;
                        self.x[q] = self.work.lower[q].clone().expect("finite lower");
                    }
                }
                Some(p) => {
                    let b = self.basis[p];
                    if to_upper {
                        self.status[b] = VarStatus::AtUpper;
                        self.x[b] = self.work.upper[b].clone().expect("finite upper");
                    } else {
                        self.status[b] = VarStatus::AtLower;
                        self.x[b] = self.work.lower[b].clone().expect("finite lower");
                    }
                    self.status[q] = VarStatus::Basic;
                    self.basis[p] = q;
                    if let Err(Singular) = self.pivot_update(p, alpha) {
                        return PhaseResult::Singular;
                    }
                }
            }
        }
    }

    fn pivot_update(&mut self, p: usize, alpha: Vec<T>) -> Result<(), Singular> {
        let f = self.factor.as_mut().expect("factor");
        f.update(p, alpha);
        if f.num_updates() >= self.opts.refactor_every {
            self.refactor()?;
        }
        Ok(())
    }

    /// Replaces basic artificials (all at zero) by ordinary columns where
    /// the row is not redundant.
    fn drive_out_artificials(&mut self) -> Result<(), Singular> {
        let nm = self.work.n + self.work.m;
        for p in 0..self.work.m {
            if !self.work.is_artificial(self.basis[p]) {
                continue;
            }
            let mut e = vec![T::zero(); self.work.m];
            e[p] = T::one();
            let rho = self.factor.as_ref().expect("factor").btran(&e);
            let mut best: Option<(usize, T)> = None;
            for j in 0..nm {
                if self.status[j] == VarStatus::Basic {
                    continue;
                }
                let v = self.work.dot_column(&rho, j).abs();
                if v.is_zero() || v <= T::pivot_tol() {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some((_, bv)) => !T::EXACT && v > *bv,
                };
                if better {
                    best = Some((j, v));
                    if T::EXACT {
                        break;
                    }
                }
            }
            if let Some((q, _)) = best {
                let alpha = self
                    .factor
                    .as_ref()
                    .expect("factor")
                    .ftran(&self.work.dense_column(q));
                let a = self.basis[p];
                self.status[a] = VarStatus::AtLower;
                self.x[a] = T::zero();
                self.status[q] = VarStatus::Basic;
                self.basis[p] = q;
                self.pivot_update(p, alpha)?;
            }
        }
        Ok(())
    }

    fn finish(&mut self, status: LpStatus) -> LpSolution<T> {
        let n = self.work.n;
        let m = self.work.m;
        if !T::EXACT {
            let _ = self.refactor();
        }
        let y = self.duals();
        let reduced: Vec<T> = (0..n + m)
            .map(|j| {
                if self.status[j] == VarStatus::Basic {
                    T::zero()
                } else {
                    self.cost[j].clone() - self.work.dot_column(&y, j)
                }
            })
            .collect();
        let x = self.x[..n].to_vec();
        let objective = self.model.objective_value(&x);
        let row_activity = self.x[n..n + m].to_vec();
        let snapshot = BasisSnapshot {
            work: Working {
                n,
                m,
                cols: std::mem::take(&mut self.work.cols),
                artificial_rows: std::mem::take(&mut self.work.artificial_rows),
                lower: std::mem::take(&mut self.work.lower),
                upper: std::mem::take(&mut self.work.upper),
            },
            factor: self.factor.take().expect("factor"),
            basis: self.basis.clone(),
        };
        LpSolution {
            status,
            objective,
            x,
            row_activity,
            var_status: self.status[..n + m].to_vec(),
            basic_order: self.basis.clone(),
            duals: y,
            reduced_costs: reduced,
            iterations: self.iterations,
            snapshot: Some(Arc::new(snapshot)),
        }
    }
}

/// Tableau rows `x_b = f + sum_j r_j s_j` for the requested basic variables,
/// with `s` indexed by [`LpSolution::displacements`].
pub fn extract_rows<T: Scalar>(
    solution: &LpSolution<T>,
    basics: &[usize],
) -> Result<Vec<TableauRow<T>>, LpError> {
    if solution.status != LpStatus::Optimal {
        return Err(LpError::NotOptimal);
    }
    let snap = solution.snapshot.as_ref().ok_or(LpError::NotOptimal)?;
    let n = snap.work.n;
    let m = snap.work.m;
    let cols = solution.displacements();
    let mut rows = Vec::with_capacity(basics.len());
    for &v in basics {
        if v >= n + m {
            return Err(LpError::OutOfRange(v));
        }
        if solution.var_status[v] != VarStatus::Basic {
            return Err(LpError::NotBasic(v));
        }
        let p = snap
            .basis
            .iter()
            .position(|&b| b == v)
            .ok_or(LpError::NotBasic(v))?;
        let mut e = vec![T::zero(); m];
        e[p] = T::one();
        let rho = snap.factor.btran(&e);
        let ray = cols
            .iter()
            .map(|d| {
                let a = snap.work.dot_column(&rho, d.var);
                if d.reflected {
                    a
                } else {
                    -a
                }
            })
            .collect();
        rows.push(TableauRow {
            basic_var: v,
            f: solution.value(v),
            ray,
        });
    }
    Ok(rows)
}
