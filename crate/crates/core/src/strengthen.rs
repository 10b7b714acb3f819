//! Coefficient strengthening from the integrality of nonbasic columns.

use thiserror::Error;

use crate::cglp::{
    alpha_from_multipliers, num_terms, sigma, term_alphas, vertex, Cut, CutSource, Mode,
    Multipliers,
};
use crate::octahedron::OctahedronError;
use crate::rowsystem::{QRowSystem, FRAC_TOL};
use crate::scalar::Scalar;
use crate::shapes::{shape_cut, FixedShape, ShapeError};
use crate::simplex::TableauRow;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StrengthenError {
    #[error("column {0} is not integer constrained")]
    NotInteger(usize),
    #[error("column {0} is out of range")]
    OutOfRange(usize),
    #[error("standard modularization does not apply to binary-mode cuts")]
    BinaryCut,
    #[error("monoidal strengthening needs a binary-mode cut")]
    NotBinary,
    #[error("cut carries no multipliers")]
    NoMultipliers,
    #[error("multipliers must be nonnegative")]
    NegativeMultipliers,
    #[error("multipliers do not match the system")]
    Shape,
    #[error("basic value is integral")]
    IntegralRow,
    #[error(transparent)]
    FixedShape(#[from] ShapeError),
    #[error(transparent)]
    Octahedron(#[from] OctahedronError),
}

/// Integer shift `m` of one column, one entry per row: `r_j <- r_j - m`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModularShift {
    pub m: Vec<i64>,
}

impl ModularShift {
    pub fn zero(q: usize) -> Self {
        ModularShift { m: vec![0; q] }
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().all(|&x| x == 0)
    }

    fn l1(&self) -> i64 {
        self.m.iter().map(|x| x.abs()).sum()
    }
}

/// Element of `M = {m in Z^t : sum m >= 0}`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MonoidElement {
    pub m: Vec<i64>,
}

impl MonoidElement {
    pub fn zero(t: usize) -> Self {
        MonoidElement { m: vec![0; t] }
    }

    pub fn is_member(&self) -> bool {
        self.m.iter().sum::<i64>() >= 0
    }
}

fn to_i64<T: Scalar>(x: &T) -> i64 {
    x.as_f64().round() as i64
}

fn check_column<T: Scalar>(system: &QRowSystem<T>, j: usize) -> Result<(), StrengthenError> {
    if j >= system.n() {
        return Err(StrengthenError::OutOfRange(j));
    }
    if !system.integer[j] {
        return Err(StrengthenError::NotInteger(j));
    }
    Ok(())
}

fn mip_multipliers<T: Scalar>(
    system: &QRowSystem<T>,
    cut: &Cut<T>,
) -> Result<Multipliers<T>, StrengthenError> {
    let m = cut
        .multipliers
        .as_ref()
        .ok_or(StrengthenError::NoMultipliers)?;
    if m.mode == Mode::Binary {
        return Err(StrengthenError::BinaryCut);
    }
    if m.q() != system.q() || m.num_terms() != num_terms(system.q()) {
        return Err(StrengthenError::Shape);
    }
    if m.u.iter().flatten().any(|x| *x < T::zero()) {
        return Err(StrengthenError::NegativeMultipliers);
    }
    Ok(m.normalized(&system.f))
}

/// `max_i sum_k sigma_ik (r^k_j - m_k) u_ik`.
fn shifted_value<T: Scalar>(
    system: &QRowSystem<T>,
    m: &Multipliers<T>,
    j: usize,
    shift: &[i64],
) -> T {
    let q = system.q();
    m.u.iter()
        .enumerate()
        .map(|(i, row)| {
            let p = vertex(q, i);
            (0..q).fold(T::zero(), |acc, k| {
                let r = system.rays[k][j].clone() - T::of_i64(shift[k]);
                acc + sigma::<T>(p[k]) * r * row[k].clone()
            })
        })
        .reduce(|a, b| a.max_val(b))
        .unwrap_or_else(T::zero)
}

/// Best of the `2^q` floor/ceil shifts for a single column.
fn best_floor_ceil<T: Scalar>(
    system: &QRowSystem<T>,
    m: &Multipliers<T>,
    j: usize,
) -> (T, ModularShift) {
    let q = system.q();
    let bounds: Vec<(i64, i64)> = (0..q)
        .map(|k| {
            let r = &system.rays[k][j];
            (to_i64(&r.floor_val()), to_i64(&r.ceil_val()))
        })
        .collect();
    let mut best: Option<(T, ModularShift)> = None;
    for mask in 0..(1usize << q) {
        let shift = ModularShift {
            m: (0..q)
                .map(|k| {
                    if mask >> k & 1 == 0 {
                        bounds[k].0
                    } else {
                        bounds[k].1
                    }
                })
                .collect(),
        };
        let value = shifted_value(system, m, j, &shift.m);
        let better = match &best {
            None => true,
            Some((bv, bs)) => {
                value < *bv || (value == *bv && (shift.l1(), &shift.m) < (bs.l1(), &bs.m))
            }
        };
        if better {
            best = Some((value, shift));
        }
    }
    best.expect("at least one candidate")
}

/// Standard modularization of coefficient `j` of a MIP-mode cut. The
/// multipliers are normalized first, and the result never exceeds the
/// cut's current coefficient.
pub fn strengthen_standard<T: Scalar>(
    system: &QRowSystem<T>,
    cut: &Cut<T>,
    j: usize,
) -> Result<(T, ModularShift), StrengthenError> {
    check_column(system, j)?;
    let m = mip_multipliers(system, cut)?;
    let (value, shift) = best_floor_ceil(system, &m, j);
    if cut.alpha[j] < value {
        return Ok((cut.alpha[j].clone(), ModularShift::zero(system.q())));
    }
    Ok((value, shift))
}

/// Strengthens every integer column of a MIP-mode cut. The returned shifts
/// are zero on continuous columns.
pub fn strengthen_standard_cut<T: Scalar>(
    system: &QRowSystem<T>,
    cut: &Cut<T>,
) -> Result<(Cut<T>, Vec<ModularShift>), StrengthenError> {
    let mut out = cut.clone();
    let mut shifts = vec![ModularShift::zero(system.q()); system.n()];
    for j in system.integer_columns() {
        let (a, s) = strengthen_standard(system, cut, j)?;
        out.alpha[j] = a;
        shifts[j] = s;
    }
    out.strengthened = true;
    Ok((out, shifts))
}

/// Shifts each integer column so that `0 <= f_k + r_j^k <= 1` per row.
pub fn modularize_rows<T: Scalar>(system: &QRowSystem<T>) -> (QRowSystem<T>, Vec<ModularShift>) {
    let q = system.q();
    let mut shifts = vec![ModularShift::zero(q); system.n()];
    for j in system.integer_columns() {
        shifts[j].m = (0..q)
            .map(|k| {
                let r = &system.rays[k][j];
                let fl = r.floor_val();
                if system.f[k].clone() + r.clone() - fl.clone() <= T::one() {
                    to_i64(&fl)
                } else {
                    to_i64(&r.ceil_val())
                }
            })
            .collect();
    }
    (apply_shifts(system, &shifts), shifts)
}

/// The system with every ray `r_j` replaced by `r_j - m_j`.
pub fn apply_shifts<T: Scalar>(system: &QRowSystem<T>, shifts: &[ModularShift]) -> QRowSystem<T> {
    let mut out = system.clone();
    for (j, s) in shifts.iter().enumerate() {
        for (k, m) in s.m.iter().enumerate() {
            out.rays[k][j] = out.rays[k][j].clone() - T::of_i64(*m);
        }
    }
    out
}

/// What the three-step procedure generates its cut from.
#[derive(Debug, Clone, Copy)]
pub enum Generator<'a, T> {
    Multipliers(&'a Multipliers<T>),
    Shape(&'a FixedShape),
}

/// Modularize the rows, generate the cut on the modularized rows, then
/// modularize the cut. Returns the cut and the total shift per column.
pub fn strengthen_three_step<T: Scalar>(
    system: &QRowSystem<T>,
    generator: Generator<'_, T>,
) -> Result<(Cut<T>, Vec<ModularShift>), StrengthenError> {
    let (modular, first) = modularize_rows(system);
    let cut = match generator {
        Generator::Multipliers(m) => {
            if m.q() != system.q() || m.num_terms() != num_terms(system.q()) {
                return Err(StrengthenError::Shape);
            }
            Cut::new(alpha_from_multipliers(&modular, m), CutSource::Cglp)
                .with_multipliers(m.clone())
        }
        Generator::Shape(s) => shape_cut(&modular, s)?,
    };
    if system.integer_columns().is_empty() {
        return Ok((cut, first));
    }
    let (cut, second) = strengthen_standard_cut(&modular, &cut)?;
    let total = first
        .iter()
        .zip(&second)
        .map(|(a, b)| ModularShift {
            m: a.m.iter().zip(&b.m).map(|(x, y)| x + y).collect(),
        })
        .collect();
    Ok((cut, total))
}

/// `max_k (a_k + m_k w_k)`.
fn monoid_value<T: Scalar>(alphas: &[T], weights: &[T], m: &[i64]) -> T {
    alphas
        .iter()
        .zip(weights)
        .zip(m)
        .map(|((a, w), mk)| a.clone() + T::of_i64(*mk) * w.clone())
        .reduce(|a, b| a.max_val(b))
        .unwrap_or_else(T::zero)
}

/// `min_{m in M} max_k (a_k + m_k w_k)` over the box `[-radius, radius]^t`.
/// Terms with nonpositive weight keep `m_k = 0`.
pub fn monoid_window_min<T: Scalar>(
    alphas: &[T],
    weights: &[T],
    radius: i64,
) -> (T, MonoidElement) {
    let t = alphas.len();
    let free: Vec<usize> = (0..t).filter(|&k| weights[k] > T::zero()).collect();
    let mut m = vec![0i64; t];
    let mut best = (monoid_value(alphas, weights, &m), MonoidElement::zero(t));
    let width = (2 * radius + 1) as usize;
    let total = width.pow(free.len() as u32);
    for code in 0..total {
        let mut c = code;
        for &k in &free {
            m[k] = (c % width) as i64 - radius;
            c /= width;
        }
        if m.iter().sum::<i64>() < 0 {
            continue;
        }
        let v = monoid_value(alphas, weights, &m);
        if v < best.0 {
            best = (v, MonoidElement { m: m.clone() });
        }
    }
    best
}

/// Monoidal strengthening of one coefficient from its per-term values and
/// weights. Runs the exchange step: move one unit from the largest term to
/// the term that stays lowest after the increment, while that term stays
/// below the current maximum. Terms with nonpositive weight keep `m_k = 0`.
pub fn strengthen_monoidal<T: Scalar>(term_alphas: &[T], weights: &[T]) -> (T, MonoidElement) {
    assert_eq!(term_alphas.len(), weights.len());
    let t = term_alphas.len();
    let free: Vec<usize> = (0..t).filter(|&k| weights[k] > T::zero()).collect();
    if free.len() < 2 {
        return (
            monoid_value(term_alphas, weights, &vec![0; t]),
            MonoidElement::zero(t),
        );
    }
    let spread = term_alphas
        .iter()
        .cloned()
        .reduce(|a, b| a.max_val(b))
        .unwrap_or_else(T::zero)
        - term_alphas
            .iter()
            .cloned()
            .reduce(|a, b| a.min_val(b))
            .unwrap_or_else(T::zero);
    let min_w = free
        .iter()
        .map(|&k| weights[k].clone())
        .reduce(|a, b| a.min_val(b))
        .expect("nonempty");
    let cap = 4.0 * t as f64 * (1.0 + (spread / min_w).as_f64());
    let cap = if cap.is_finite() {
        cap.min(1e7) as usize
    } else {
        10_000_000
    };

    let mut m = vec![0i64; t];
    let value = |m: &[i64], k: usize| term_alphas[k].clone() + T::of_i64(m[k]) * weights[k].clone();
    for _ in 0..cap {
        let mut top = 0;
        for k in 1..t {
            if value(&m, k) > value(&m, top) {
                top = k;
            }
        }
        let current = value(&m, top);
        if weights[top] <= T::zero() {
            return (current, MonoidElement { m });
        }
        let mut low: Option<(usize, T)> = None;
        for &k in free.iter().filter(|&&k| k != top) {
            let raised = value(&m, k) + weights[k].clone();
            if low.as_ref().is_none_or(|(_, v)| raised < *v) {
                low = Some((k, raised));
            }
        }
        match low {
            Some((k, raised)) if raised < current => {
                m[top] -= 1;
                m[k] += 1;
            }
            _ => return (current, MonoidElement { m }),
        }
    }
    log::warn!("monoidal exchange hit its iteration cap; using the window search");
    let radius = (cap as i64).clamp(1, 8);
    monoid_window_min(term_alphas, weights, radius)
}

/// Per-term weights `theta^k (a_0^k - b_0^k)` for normalized multipliers:
/// `sum_k u_ik` in MIP mode and `sum_k max(u_ik, 0)` in binary mode.
pub fn monoidal_weights<T: Scalar>(m: &Multipliers<T>) -> Vec<T> {
    m.u.iter()
        .map(|row| {
            row.iter().fold(T::zero(), |acc, x| match m.mode {
                Mode::Mip => acc + x.clone(),
                Mode::Binary => acc + x.clone().max_val(T::zero()),
            })
        })
        .collect()
}

fn monoidal_columns<T: Scalar>(
    system: &QRowSystem<T>,
    cut: &Cut<T>,
    per_term: &[Vec<T>],
    weights: &[T],
) -> (Cut<T>, Vec<MonoidElement>) {
    let t = per_term.len();
    let mut out = cut.clone();
    let mut elems = vec![MonoidElement::zero(t); system.n()];
    for j in system.integer_columns() {
        let column: Vec<T> = per_term.iter().map(|row| row[j].clone()).collect();
        let (a, e) = strengthen_monoidal(&column, weights);
        if a < out.alpha[j] {
            out.alpha[j] = a;
            elems[j] = e;
        }
    }
    out.strengthened = true;
    (out, elems)
}

/// Monoidal strengthening of every integer column of a binary-mode cut.
pub fn strengthen_monoidal_cut<T: Scalar>(
    system: &QRowSystem<T>,
    cut: &Cut<T>,
) -> Result<(Cut<T>, Vec<MonoidElement>), StrengthenError> {
    let m = cut
        .multipliers
        .as_ref()
        .ok_or(StrengthenError::NoMultipliers)?;
    if m.mode != Mode::Binary {
        return Err(StrengthenError::NotBinary);
    }
    if m.q() != system.q() || m.num_terms() != num_terms(system.q()) {
        return Err(StrengthenError::Shape);
    }
    let m = m.normalized(&system.f);
    let per_term = term_alphas(system, &m);
    Ok(monoidal_columns(
        system,
        cut,
        &per_term,
        &monoidal_weights(&m),
    ))
}

/// Cone cut with monoidal strengthening over its two face terms.
pub fn strengthen_cone<T: Scalar>(
    system: &QRowSystem<T>,
    shape: &FixedShape,
) -> Result<(Cut<T>, Vec<MonoidElement>), StrengthenError> {
    let cut = shape_cut(system, shape)?;
    let per_term = shape.face_alphas(system)?;
    Ok(monoidal_columns(
        system,
        &cut,
        &per_term,
        &shape.face_weights(&system.f),
    ))
}

/// One-row intersection cut from the strip `0 <= x <= 1`, with floor/ceil
/// strengthening on integer columns.
pub fn gmi_cut<T: Scalar>(
    row: &TableauRow<T>,
    integer: &[bool],
) -> Result<Cut<T>, StrengthenError> {
    if integer.len() != row.ray.len() {
        return Err(StrengthenError::Shape);
    }
    let f = row.f.clone() - row.f.floor_val();
    let tol = T::of_f64(FRAC_TOL);
    if f.is_zero() || f < tol || f > T::one() - tol {
        return Err(StrengthenError::IntegralRow);
    }
    let g = T::one() - f.clone();
    let coef = |r: T| (-r.clone() / f.clone()).max_val(r / g.clone());
    let alpha = row
        .ray
        .iter()
        .zip(integer)
        .map(|(r, &int)| {
            if int {
                let lo = coef(r.clone() - r.floor_val());
                let hi = coef(r.clone() - r.ceil_val());
                lo.min_val(hi)
            } else {
                coef(r.clone())
            }
        })
        .collect();
    let mut cut = Cut::new(alpha, CutSource::Gmi);
    cut.strengthened = integer.iter().any(|&b| b);
    Ok(cut)
}
