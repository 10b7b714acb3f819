//! The q-row system `x = f + R s`, `s >= 0`, with `0 < f < 1`.

use thiserror::Error;

use crate::scalar::{int, rat, Rational, Scalar};
use crate::simplex::TableauRow;

pub const FRAC_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct QRowSystem<T> {
    pub f: Vec<T>,
    /// `rays[k][j]`: entry of row `k` for column `j`.
    pub rays: Vec<Vec<T>>,
    /// Integrality of each kept nonbasic column.
    pub integer: Vec<bool>,
    /// `floor` of the original basic values.
    pub shift: Vec<i64>,
    /// Original nonbasic index of each kept column.
    pub columns: Vec<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RowSystemError {
    #[error("row {0} is integral within tolerance")]
    IntegralRow(usize),
    #[error("rows have inconsistent lengths")]
    Shape,
    #[error("no rows given")]
    Empty,
}

impl<T: Scalar> QRowSystem<T> {
    /// Builds a system from `f` in `(0,1)^q` and row-major rays.
    pub fn new(f: Vec<T>, rays: Vec<Vec<T>>, integer: Vec<bool>) -> Result<Self, RowSystemError> {
        let q = f.len();
        if q == 0 {
            return Err(RowSystemError::Empty);
        }
        let n = rays.first().map(|r| r.len()).unwrap_or(0);
        if rays.len() != q || rays.iter().any(|r| r.len() != n) || integer.len() != n {
            return Err(RowSystemError::Shape);
        }
        for (k, fk) in f.iter().enumerate() {
            if *fk <= T::zero() || *fk >= T::one() {
                return Err(RowSystemError::IntegralRow(k));
            }
        }
        Ok(QRowSystem {
            f,
            rays,
            integer,
            shift: vec![0; q],
            columns: (0..n).collect(),
        })
    }

    pub fn q(&self) -> usize {
        self.f.len()
    }

    pub fn n(&self) -> usize {
        self.rays.first().map(|r| r.len()).unwrap_or(0)
    }

    /// Column `j` as a point of `R^q`.
    pub fn ray(&self, j: usize) -> Vec<T> {
        self.rays.iter().map(|row| row[j].clone()).collect()
    }

    pub fn integer_columns(&self) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.integer[j]).collect()
    }

    /// Basic values before the floor shift.
    pub fn unshifted_f(&self) -> Vec<T> {
        self.f
            .iter()
            .zip(&self.shift)
            .map(|(f, s)| f.clone() + T::of_i64(*s))
            .collect()
    }

    /// Shifted basic values `f + R s`.
    pub fn point(&self, s: &[T]) -> Vec<T> {
        self.rays
            .iter()
            .zip(&self.f)
            .map(|(row, f)| {
                row.iter()
                    .zip(s)
                    .fold(f.clone(), |acc, (r, v)| acc + r.clone() * v.clone())
            })
            .collect()
    }

    /// The subsystem on a subset of columns.
    pub fn restrict(&self, cols: &[usize]) -> Self {
        QRowSystem {
            f: self.f.clone(),
            rays: self
                .rays
                .iter()
                .map(|row| cols.iter().map(|&j| row[j].clone()).collect())
                .collect(),
            integer: cols.iter().map(|&j| self.integer[j]).collect(),
            shift: self.shift.clone(),
            columns: cols.iter().map(|&j| self.columns[j]).collect(),
        }
    }

    /// The subsystem on a subset of rows.
    pub fn rows(&self, rows: &[usize]) -> Self {
        QRowSystem {
            f: rows.iter().map(|&k| self.f[k].clone()).collect(),
            rays: rows.iter().map(|&k| self.rays[k].clone()).collect(),
            integer: self.integer.clone(),
            shift: rows.iter().map(|&k| self.shift[k]).collect(),
            columns: self.columns.clone(),
        }
    }

    pub fn with_integer(mut self, integer: Vec<bool>) -> Self {
        assert_eq!(integer.len(), self.n());
        self.integer = integer;
        self
    }

    pub fn to_f64(&self) -> QRowSystem<f64> {
        QRowSystem {
            f: self.f.iter().map(|x| x.as_f64()).collect(),
            rays: self
                .rays
                .iter()
                .map(|r| r.iter().map(|x| x.as_f64()).collect())
                .collect(),
            integer: self.integer.clone(),
            shift: self.shift.clone(),
            columns: self.columns.clone(),
        }
    }
}

/// Builds the system from tableau rows, shifting each basic value by its
/// floor. `integrality` flags the nonbasic displacement columns.
pub fn from_tableau<T: Scalar>(
    rows: &[TableauRow<T>],
    integrality: &[bool],
    frac_tol: f64,
) -> Result<QRowSystem<T>, RowSystemError> {
    if rows.is_empty() {
        return Err(RowSystemError::Empty);
    }
    let n = integrality.len();
    if rows.iter().any(|r| r.ray.len() != n) {
        return Err(RowSystemError::Shape);
    }
    let tol = T::of_f64(frac_tol);
    let mut f = Vec::new();
    let mut shift = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        let fl = row.f.floor_val();
        let frac = row.f.clone() - fl.clone();
        if frac < tol || frac > T::one() - tol.clone() || frac.is_zero() {
            return Err(RowSystemError::IntegralRow(k));
        }
        f.push(frac);
        shift.push(fl.as_f64() as i64);
    }
    let mut kept = Vec::new();
    for j in 0..n {
        if rows.iter().all(|r| r.ray[j].is_zero()) {
            log::warn!("dropping all-zero column {}", j);
        } else {
            kept.push(j);
        }
    }
    Ok(QRowSystem {
        f,
        rays: rows
            .iter()
            .map(|r| kept.iter().map(|&j| r.ray[j].clone()).collect())
            .collect(),
        integer: kept.iter().map(|&j| integrality[j]).collect(),
        shift,
        columns: kept,
    })
}

/// The two-row example with `f = (1/4, 1/2)` and five continuous columns.
pub fn alww_instance() -> QRowSystem<Rational> {
    QRowSystem::new(
        vec![rat(1, 4), rat(1, 2)],
        vec![
            vec![int(2), int(1), int(-3), int(0), int(1)],
            vec![int(1), int(1), int(2), int(-1), int(-2)],
        ],
        vec![false; 5],
    )
    .expect("valid built-in system")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row<T: Scalar>(f: T, ray: Vec<T>) -> TableauRow<T> {
        TableauRow {
            basic_var: 0,
            f,
            ray,
        }
    }

    #[test]
    fn floor_shift() {
        let rows = vec![row(2.25, vec![1.0, 0.0]), row(-0.5, vec![0.5, 0.0])];
        let s = from_tableau(&rows, &[true, false], FRAC_TOL).unwrap();
        assert_eq!(s.f, vec![0.25, 0.5]);
        assert_eq!(s.shift, vec![2, -1]);
        // the all-zero column is dropped
        assert_eq!(s.columns, vec![0]);
        assert_eq!(s.unshifted_f(), vec![2.25, -0.5]);
    }

    #[test]
    fn tolerance_edge() {
        let rows = vec![row(0.9999999999, vec![1.0]), row(0.5, vec![1.0])];
        assert_eq!(
            from_tableau(&rows, &[false], FRAC_TOL),
            Err(RowSystemError::IntegralRow(0))
        );
    }

    #[test]
    fn alww_data() {
        let s = alww_instance();
        assert_eq!(s.f, vec![rat(1, 4), rat(1, 2)]);
        assert_eq!(s.ray(3), vec![int(0), int(-1)]);
        assert_eq!(s.rays[0], vec![int(2), int(1), int(-3), int(0), int(1)]);
        assert!(s.integer_columns().is_empty());
    }
}
