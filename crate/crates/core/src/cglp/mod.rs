//! Cut-generating LP for the `2^q`-term disjunction on a q-row system.
//!
//! Term `i` fixes the side of every row: with cube vertex `p = vertex(q, i)`
//! the term requires `x_k <= 0` where `p_k = 0` and `x_k >= 1` where
//! `p_k = 1` (MIP mode), or `x_k = p_k` (binary mode). Terms follow the
//! Gray-code order, so for `q = 2` the vertices are
//! `(0,0), (1,0), (1,1), (0,1)` and `u_{i1}, u_{i2}` are written `v_i, w_i`.

mod enumerate;
mod format;
mod hull;

use thiserror::Error;

use crate::linalg;
use crate::octahedron::OctahedronConfig;
use crate::rowsystem::QRowSystem;
use crate::scalar::Scalar;
use crate::simplex::{self, LpModel, LpStatus};

pub use enumerate::{
    enumerate_facets, enumerate_facets_with, is_redundant, EnumerationStats, FacetOptions,
};
pub use format::{format_cut, format_multipliers};
pub use hull::{convex_combination, is_integer_hull_facet, HullCertificate};

pub const Q_MAX: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Mip,
    Binary,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Mip => "mip",
            Mode::Binary => "binary",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CglpError {
    #[error("q = {0} exceeds the supported maximum")]
    TooManyRows(usize),
    #[error("CGLP has no optimal solution ({0:?})")]
    Lp(LpStatus),
    #[error("objective must be positive")]
    BadObjective,
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("rays of the subspace do not span the row space")]
    NotSpanning,
    #[error("multiplier shape does not match the system")]
    Shape,
}

pub fn num_terms(q: usize) -> usize {
    1 << q
}

/// Cube vertex of term `i` (Gray code, bit `k` gives coordinate `k`).
pub fn vertex(q: usize, i: usize) -> Vec<u8> {
    let g = i ^ (i >> 1);
    (0..q).map(|k| ((g >> k) & 1) as u8).collect()
}

/// `+1` where the term sits on the `x_k >= 1` side, `-1` otherwise.
pub fn sigma<T: Scalar>(p: u8) -> T {
    if p == 1 {
        T::one()
    } else {
        -T::one()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Multipliers<T> {
    pub mode: Mode,
    /// `u[i][k]` for term `i`, row `k`.
    pub u: Vec<Vec<T>>,
    pub beta: T,
}

impl<T: Scalar> Multipliers<T> {
    pub fn new(mode: Mode, u: Vec<Vec<T>>) -> Self {
        Multipliers {
            mode,
            u,
            beta: T::one(),
        }
    }

    /// Two-row multipliers from `(v_i)` and `(w_i)`.
    pub fn from_vw(mode: Mode, v: &[T], w: &[T]) -> Self {
        assert_eq!(v.len(), w.len());
        let u = v
            .iter()
            .zip(w)
            .map(|(a, b)| vec![a.clone(), b.clone()])
            .collect();
        Multipliers::new(mode, u)
    }

    pub fn num_terms(&self) -> usize {
        self.u.len()
    }

    pub fn q(&self) -> usize {
        self.u.first().map(|r| r.len()).unwrap_or(0)
    }

    pub fn v(&self) -> Vec<T> {
        self.u.iter().map(|r| r[0].clone()).collect()
    }

    pub fn w(&self) -> Vec<T> {
        self.u.iter().map(|r| r[1].clone()).collect()
    }

    /// Row-scaled copy so every term with positive normalization equals 1.
    pub fn normalized(&self, f: &[T]) -> Self {
        let g = normalization_values(f, self);
        let u = self
            .u
            .iter()
            .zip(&g)
            .map(|(row, gi)| {
                if *gi > T::zero() {
                    row.iter().map(|x| x.clone() / gi.clone()).collect()
                } else {
                    row.clone()
                }
            })
            .collect();
        Multipliers::new(self.mode, u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutSource {
    Cglp,
    Octahedron,
    FixedShape,
    Gmi,
}

/// `alpha s >= rhs` over the nonbasic columns of a system.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut<T> {
    pub alpha: Vec<T>,
    pub rhs: T,
    pub multipliers: Option<Multipliers<T>>,
    pub config: Option<OctahedronConfig>,
    pub source: CutSource,
    pub strengthened: bool,
}

impl<T: Scalar> Cut<T> {
    pub fn new(alpha: Vec<T>, source: CutSource) -> Self {
        Cut {
            alpha,
            rhs: T::one(),
            multipliers: None,
            config: None,
            source,
            strengthened: false,
        }
    }

    pub fn with_multipliers(mut self, m: Multipliers<T>) -> Self {
        self.multipliers = Some(m);
        self
    }

    pub fn evaluate(&self, s: &[T]) -> T {
        crate::scalar::dot(&self.alpha, s)
    }
}

/// Per-term normalization `g_i = sum_k u_ik |p_k - f_k|`.
pub fn normalization_values<T: Scalar>(f: &[T], m: &Multipliers<T>) -> Vec<T> {
    let q = f.len();
    m.u.iter()
        .enumerate()
        .map(|(i, row)| {
            let p = vertex(q, i);
            row.iter().enumerate().fold(T::zero(), |acc, (k, u)| {
                let gap = if p[k] == 1 {
                    T::one() - f[k].clone()
                } else {
                    f[k].clone()
                };
                acc + u.clone() * gap
            })
        })
        .collect()
}

/// `alpha_j^i = sum_k sigma_ik r^k_j u_ik` for every term and column.
pub fn term_alphas<T: Scalar>(system: &QRowSystem<T>, m: &Multipliers<T>) -> Vec<Vec<T>> {
    let q = system.q();
    m.u.iter()
        .enumerate()
        .map(|(i, row)| {
            let p = vertex(q, i);
            (0..system.n())
                .map(|j| {
                    (0..q).fold(T::zero(), |acc, k| {
                        acc + sigma::<T>(p[k]) * system.rays[k][j].clone() * row[k].clone()
                    })
                })
                .collect()
        })
        .collect()
}

/// `alpha_j = max_i alpha_j^i`.
pub fn alpha_from_multipliers<T: Scalar>(system: &QRowSystem<T>, m: &Multipliers<T>) -> Vec<T> {
    let terms = term_alphas(system, m);
    (0..system.n())
        .map(|j| {
            terms
                .iter()
                .map(|t| t[j].clone())
                .reduce(|a, b| a.max_val(b))
                .unwrap_or_else(T::zero)
        })
        .collect()
}

/// Whether the multipliers respect sign and normalization requirements.
pub fn multipliers_feasible<T: Scalar>(f: &[T], m: &Multipliers<T>) -> bool {
    if m.mode == Mode::Mip && m.u.iter().flatten().any(|x| *x < -T::zero_tol()) {
        return false;
    }
    normalization_values(f, m)
        .iter()
        .all(|g| *g >= m.beta.clone() - T::zero_tol())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Homogeneous { term: usize, col: usize },
    Normalization { term: usize },
    Nonnegative { term: usize, row: usize },
}

/// The CGLP as `G y >= h` over `y = (alpha, u)`; `u_ik` sits at
/// `n + i q + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CglpSystem<T> {
    pub mode: Mode,
    pub n: usize,
    pub q: usize,
    pub g: Vec<Vec<T>>,
    pub h: Vec<T>,
    pub kinds: Vec<RowKind>,
}

impl<T: Scalar> CglpSystem<T> {
    pub fn num_vars(&self) -> usize {
        self.n + num_terms(self.q) * self.q
    }

    pub fn count(&self, pred: impl Fn(&RowKind) -> bool) -> usize {
        self.kinds.iter().filter(|k| pred(k)).count()
    }

    pub fn u_index(&self, term: usize, k: usize) -> usize {
        self.n + term * self.q + k
    }

    /// Splits a point `y` into `(alpha, multipliers)`.
    pub fn split(&self, y: &[T]) -> (Vec<T>, Multipliers<T>) {
        let t = num_terms(self.q);
        let u = (0..t)
            .map(|i| (0..self.q).map(|k| y[self.u_index(i, k)].clone()).collect())
            .collect();
        (y[..self.n].to_vec(), Multipliers::new(self.mode, u))
    }
}

/// Builds `alpha_j - sum_k sigma_ik r^k_j u_ik >= 0`, the normalization rows
/// `g_i(u) >= 1`, and in MIP mode `u >= 0`.
pub fn build_cglp<T: Scalar>(
    system: &QRowSystem<T>,
    mode: Mode,
) -> Result<CglpSystem<T>, CglpError> {
    let q = system.q();
    if q > Q_MAX {
        return Err(CglpError::TooManyRows(q));
    }
    let n = system.n();
    let t = num_terms(q);
    let d = n + t * q;
    let mut g = Vec::new();
    let mut h = Vec::new();
    let mut kinds = Vec::new();
    for i in 0..t {
        let p = vertex(q, i);
        for j in 0..n {
            let mut row = vec![T::zero(); d];
            row[j] = T::one();
            for k in 0..q {
                row[n + i * q + k] = -(sigma::<T>(p[k]) * system.rays[k][j].clone());
            }
            g.push(row);
            h.push(T::zero());
            kinds.push(RowKind::Homogeneous { term: i, col: j });
        }
    }
    for i in 0..t {
        let p = vertex(q, i);
        let mut row = vec![T::zero(); d];
        for k in 0..q {
            row[n + i * q + k] = if p[k] == 1 {
                T::one() - system.f[k].clone()
            } else {
                system.f[k].clone()
            };
        }
        g.push(row);
        h.push(T::one());
        kinds.push(RowKind::Normalization { term: i });
    }
    if mode == Mode::Mip {
        for i in 0..t {
            for k in 0..q {
                let mut row = vec![T::zero(); d];
                row[n + i * q + k] = T::one();
                g.push(row);
                h.push(T::zero());
                kinds.push(RowKind::Nonnegative { term: i, row: k });
            }
        }
    }
    Ok(CglpSystem {
        mode,
        n,
        q,
        g,
        h,
        kinds,
    })
}

/// The CGLP as a solver model: `alpha` free, `u` free or nonnegative.
fn cglp_model<T: Scalar>(cg: &CglpSystem<T>, p: &[T]) -> LpModel<T> {
    let d = cg.num_vars();
    let mut model = LpModel::new(d);
    for j in 0..d {
        if j < cg.n || cg.mode == Mode::Binary {
            model.set_free(j);
        }
    }
    for (j, pj) in p.iter().enumerate() {
        model.cost[j] = pj.clone();
    }
    for (row, (h, kind)) in cg.g.iter().zip(cg.h.iter().zip(&cg.kinds)) {
        if matches!(kind, RowKind::Nonnegative { .. }) {
            continue;
        }
        model.add_dense_row(row, Some(h.clone()), None);
    }
    model
}

/// Solves `min p alpha` over the CGLP. In exact mode ties are broken toward
/// the lexicographically smallest `alpha`.
pub fn solve_cglp<T: Scalar>(
    system: &QRowSystem<T>,
    mode: Mode,
    p: &[T],
) -> Result<Cut<T>, CglpError> {
    let cg = build_cglp(system, mode)?;
    if p.len() != cg.n || p.iter().any(|x| *x <= T::zero()) {
        return Err(CglpError::BadObjective);
    }
    let mut model = cglp_model(&cg, p);
    let sol = simplex::solve(&model);
    if sol.status != LpStatus::Optimal {
        return Err(CglpError::Lp(sol.status));
    }
    let mut y = sol.x;
    if T::EXACT {
        let best = crate::scalar::dot(p, &y[..cg.n]);
        let coeffs: Vec<(usize, T)> = p.iter().cloned().enumerate().collect();
        model.add_row(coeffs, None, Some(best));
        for j in 0..cg.n {
            model.cost = vec![T::zero(); cg.num_vars()];
            model.cost[j] = T::one();
            let s = simplex::solve(&model);
            if s.status != LpStatus::Optimal {
                return Err(CglpError::Lp(s.status));
            }
            let v = s.x[j].clone();
            model.add_row(vec![(j, T::one())], Some(v.clone()), Some(v));
            y = s.x;
        }
    }
    let (_, m) = cg.split(&y);
    let alpha = alpha_from_multipliers(system, &m);
    Ok(Cut::new(alpha, CutSource::Cglp).with_multipliers(m))
}

/// LP over term `i` of the disjunction: `s >= 0` and the side constraints.
pub fn term_model<T: Scalar>(
    system: &QRowSystem<T>,
    mode: Mode,
    term: usize,
    cost: &[T],
) -> LpModel<T> {
    let q = system.q();
    let n = system.n();
    let p = vertex(q, term);
    let mut model = LpModel::new(n);
    model.cost = cost.to_vec();
    for k in 0..q {
        // x_k = f_k + r^k s
        let target = T::of_i64(p[k] as i64) - system.f[k].clone();
        let (lo, up) = match (mode, p[k]) {
            (Mode::Binary, _) => (Some(target.clone()), Some(target)),
            (Mode::Mip, 1) => (Some(target), None),
            (Mode::Mip, _) => (None, Some(target)),
        };
        model.add_dense_row(&system.rays[k], lo, up);
    }
    model
}

/// True iff `alpha s >= 1` holds on every term of the disjunction.
pub fn verify_cut_valid<T: Scalar>(system: &QRowSystem<T>, alpha: &[T], mode: Mode) -> bool {
    let tol = T::feas_tol() * T::of_i64(100);
    (0..num_terms(system.q())).all(|i| {
        let sol = simplex::solve(&term_model(system, mode, i, alpha));
        match sol.status {
            LpStatus::Infeasible => true,
            LpStatus::Optimal => sol.objective >= T::one() - tol.clone(),
            _ => false,
        }
    })
}

/// Full-space cut from multipliers found on a column subset.
pub fn lift_cut<T: Scalar>(
    system: &QRowSystem<T>,
    subspace: &[usize],
    subspace_cut: &Cut<T>,
) -> Result<Cut<T>, CglpError> {
    let m = subspace_cut.multipliers.clone().ok_or(CglpError::Shape)?;
    if m.q() != system.q() || m.num_terms() != num_terms(system.q()) {
        return Err(CglpError::Shape);
    }
    let cols: Vec<Vec<T>> = subspace.iter().map(|&j| system.ray(j)).collect();
    if subspace.len() < num_terms(system.q()) || linalg::rank(&cols) < system.q() {
        return Err(CglpError::NotSpanning);
    }
    let alpha = alpha_from_multipliers(system, &m);
    let mut cut = subspace_cut.clone();
    cut.alpha = alpha;
    Ok(cut)
}
