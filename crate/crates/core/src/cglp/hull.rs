//! Integer-hull facet certification and convex-combination certificates.

use super::{num_terms, vertex, Cut};
use crate::linalg;
use crate::rowsystem::QRowSystem;
use crate::scalar::Scalar;
use crate::simplex::{self, LpModel, LpStatus};

/// Per cube vertex, the weights on `r_j / alpha_j` (columns with
/// `alpha_j > 0`) and on recession directions `r_j` (`alpha_j = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct HullCertificate<T> {
    pub vertices: Vec<Option<(Vec<T>, Vec<T>)>>,
    /// Dimension of the face `alpha s = 1` of the integer hull, measured
    /// on a lattice window; `None` when the vertex test already holds.
    pub face_dimension: Option<usize>,
}

impl<T: Scalar> HullCertificate<T> {
    /// Every cube vertex lies on the cut's boundary region.
    pub fn holds(&self) -> bool {
        self.vertices.iter().all(|v| v.is_some())
    }
}

/// Half-width of the lattice window of the face-dimension test.
pub const FACE_WINDOW: i64 = 4;

/// Checks that every cube vertex `p` has `p - f` in the convex hull of the
/// points `r_j / alpha_j` plus the cone of the rays with `alpha_j = 0`.
/// That condition is sufficient but misses facets such as split cuts, so
/// when it fails the face dimension is computed on a lattice window.
pub fn is_integer_hull_facet<T: Scalar>(
    system: &QRowSystem<T>,
    cut: &Cut<T>,
) -> (bool, HullCertificate<T>) {
    let q = system.q();
    let n = system.n();
    let pos: Vec<usize> = (0..n).filter(|&j| cut.alpha[j] > T::zero_tol()).collect();
    let zero: Vec<usize> = (0..n).filter(|&j| cut.alpha[j].is_negligible()).collect();
    let mut out = Vec::new();
    for i in 0..num_terms(q) {
        let p = vertex(q, i);
        let mut model = LpModel::new(pos.len() + zero.len());
        for k in 0..q {
            let mut coeffs = Vec::new();
            for (c, &j) in pos.iter().enumerate() {
                coeffs.push((c, system.rays[k][j].clone() / cut.alpha[j].clone()));
            }
            for (c, &j) in zero.iter().enumerate() {
                coeffs.push((pos.len() + c, system.rays[k][j].clone()));
            }
            let target = T::of_i64(p[k] as i64) - system.f[k].clone();
            model.add_row(coeffs, Some(target.clone()), Some(target));
        }
        let ones: Vec<(usize, T)> = (0..pos.len()).map(|c| (c, T::one())).collect();
        model.add_row(ones, Some(T::one()), Some(T::one()));
        let sol = simplex::solve(&model);
        out.push(if sol.status == LpStatus::Optimal {
            Some((sol.x[..pos.len()].to_vec(), sol.x[pos.len()..].to_vec()))
        } else {
            None
        });
    }
    let mut cert = HullCertificate {
        vertices: out,
        face_dimension: None,
    };
    if cert.holds() {
        return (true, cert);
    }
    let dim = face_dimension(system, &cut.alpha, FACE_WINDOW);
    cert.face_dimension = dim;
    (dim == Some(n - 1), cert)
}

/// Dimension of `{s in conv P_I : alpha s = 1}` from the integer points
/// `x` in `[-w, w+1]^q`. `None` if the cut is violated or no point is tight.
///
/// For a tight `x` the optimal face of `min {alpha s : R s = x - f, s >= 0}`
/// has affine hull `{s : R_T s_T = x - f, s_rest = 0}`, `T` being the
/// columns positive in some optimum. An equation `beta s = beta0` holds on
/// the whole face iff `beta_T = y R_T`, `beta0 = y (x - f)` for some `y`
/// per tight point and `beta_j = 0` wherever `alpha_j = 0`. The face
/// dimension is `n - dim{(beta, beta0)}`.
pub fn face_dimension<T: Scalar>(system: &QRowSystem<T>, alpha: &[T], w: i64) -> Option<usize> {
    let q = system.q();
    let n = system.n();
    let one = T::one();
    let tol = T::feas_tol() * T::of_i64(100);
    let mut tight: Vec<(Vec<T>, Vec<usize>)> = Vec::new();
    let mut points: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..q {
        points = points
            .into_iter()
            .flat_map(|p| {
                (-w..=w + 1).map(move |v| {
                    let mut p = p.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    for x in points {
        let rhs: Vec<T> = x
            .iter()
            .zip(&system.f)
            .map(|(&v, f)| T::of_i64(v) - f.clone())
            .collect();
        let mut model = LpModel::new(n);
        model.cost = alpha.to_vec();
        for k in 0..q {
            model.add_dense_row(&system.rays[k], Some(rhs[k].clone()), Some(rhs[k].clone()));
        }
        let sol = simplex::solve(&model);
        match sol.status {
            LpStatus::Infeasible => continue,
            LpStatus::Optimal => {}
            _ => return None,
        }
        if sol.objective < one.clone() - tol.clone() {
            return None;
        }
        if sol.objective > one.clone() + tol.clone() {
            continue;
        }
        model.add_dense_row(alpha, Some(one.clone()), Some(one.clone()));
        let support: Vec<usize> = (0..n)
            .filter(|&j| {
                let mut m = model.clone();
                m.cost = vec![T::zero(); n];
                m.cost[j] = -one.clone();
                let s = simplex::solve(&m);
                s.status == LpStatus::Unbounded
                    || (s.status == LpStatus::Optimal && -s.objective.clone() > tol.clone())
            })
            .collect();
        tight.push((rhs, support));
    }
    if tight.is_empty() {
        return None;
    }
    // Unknowns: beta (n), beta0, then y (q) per tight point.
    let vars = n + 1 + q * tight.len();
    let mut rows: Vec<Vec<T>> = Vec::new();
    for (t, (rhs, support)) in tight.iter().enumerate() {
        let y0 = n + 1 + q * t;
        for &j in support {
            let mut r = vec![T::zero(); vars];
            r[j] = one.clone();
            for k in 0..q {
                r[y0 + k] = -system.rays[k][j].clone();
            }
            rows.push(r);
        }
        let mut r = vec![T::zero(); vars];
        r[n] = one.clone();
        for k in 0..q {
            r[y0 + k] = -rhs[k].clone();
        }
        rows.push(r);
    }
    for j in (0..n).filter(|&j| alpha[j].is_negligible()) {
        let mut r = vec![T::zero(); vars];
        r[j] = one.clone();
        rows.push(r);
    }
    let y_cols: Vec<Vec<T>> = rows.iter().map(|r| r[n + 1..].to_vec()).collect();
    let kernel = vars - linalg::rank(&rows);
    let y_kernel = (vars - n - 1) - linalg::rank(&y_cols);
    let equations = kernel - y_kernel;
    Some(n.saturating_sub(equations))
}

/// Weights `lambda >= 0`, `sum lambda = 1` with `sum lambda_c alpha_c = target`.
pub fn convex_combination<T: Scalar>(target: &[T], cuts: &[&[T]]) -> Option<Vec<T>> {
    let mut model = LpModel::new(cuts.len());
    for j in 0..target.len() {
        let coeffs = cuts
            .iter()
            .enumerate()
            .map(|(c, a)| (c, a[j].clone()))
            .collect();
        model.add_row(coeffs, Some(target[j].clone()), Some(target[j].clone()));
    }
    model.add_row(
        (0..cuts.len()).map(|c| (c, T::one())).collect(),
        Some(T::one()),
        Some(T::one()),
    );
    let sol = simplex::solve(&model);
    if sol.status != LpStatus::Optimal {
        return None;
    }
    Some(sol.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cglp::CutSource;
    use crate::rowsystem::alww_instance;
    use crate::scalar::{rat, Rational};

    fn cut(a: &[(i64, i64)]) -> Cut<Rational> {
        Cut::new(a.iter().map(|&(p, q)| rat(p, q)).collect(), CutSource::Cglp)
    }

    #[test]
    fn split_cut_needs_face_dimension() {
        let s = alww_instance();
        let split = cut(&[(8, 3), (4, 3), (12, 1), (0, 1), (4, 3)]);
        let (facet, cert) = is_integer_hull_facet(&s, &split);
        assert!(facet);
        assert!(!cert.holds());
        assert_eq!(cert.face_dimension, Some(4));
    }

    #[test]
    fn face_dimension_agrees_with_vertex_test() {
        let s = alww_instance();
        let c = cut(&[(2, 1), (2, 1), (4, 1), (1, 1), (12, 7)]);
        assert!(is_integer_hull_facet(&s, &c).1.holds());
        assert_eq!(face_dimension(&s, &c.alpha, FACE_WINDOW), Some(4));
        let c = cut(&[(8, 3), (2, 1), (4, 1), (1, 1), (4, 3)]);
        let (facet, cert) = is_integer_hull_facet(&s, &c);
        assert!(!facet);
        assert!(cert.face_dimension.unwrap() < 4);
    }

    #[test]
    fn invalid_cut_has_no_face() {
        let s = alww_instance();
        assert_eq!(face_dimension(&s, &vec![rat(1, 100); 5], FACE_WINDOW), None);
    }
}
