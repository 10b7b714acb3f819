//! Fixed triangles and cones containing the fractional point.

use thiserror::Error;

use crate::cglp::{num_terms, sigma, vertex, Cut, CutSource, Mode, Multipliers};
use crate::octahedron::ParametricBody;
use crate::rowsystem::QRowSystem;
use crate::scalar::{dot, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    Triangle,
    Cone,
}

/// A planar shape `{x : n_k x <= b_k}` with integer data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedShape {
    pub kind: ShapeKind,
    /// 1..4 for triangles, 1..8 for cones.
    pub id: usize,
    /// Triangle corners, or the cone apex.
    pub corners: Vec<[i64; 2]>,
    /// Cone extreme ray directions.
    pub rays: Vec<[i64; 2]>,
    pub faces: Vec<([i64; 2], i64)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ShapeError {
    #[error("{kind:?} {id} does not contain f in its interior")]
    NotContaining { kind: ShapeKind, id: usize },
    #[error("fixed shapes need exactly two rows")]
    NotPlanar,
}

fn triangle(id: usize, corners: [[i64; 2]; 3]) -> FixedShape {
    let faces = (0..3)
        .map(|k| {
            let (a, b, c) = (corners[k], corners[(k + 1) % 3], corners[(k + 2) % 3]);
            let mut n = [b[1] - a[1], a[0] - b[0]];
            let g = gcd(n[0], n[1]);
            n = [n[0] / g, n[1] / g];
            let mut rhs = n[0] * a[0] + n[1] * a[1];
            if n[0] * c[0] + n[1] * c[1] > rhs {
                n = [-n[0], -n[1]];
                rhs = -rhs;
            }
            (n, rhs)
        })
        .collect();
    FixedShape {
        kind: ShapeKind::Triangle,
        id,
        corners: corners.to_vec(),
        rays: Vec::new(),
        faces,
    }
}

fn cone(id: usize, apex: [i64; 2], rays: [[i64; 2]; 2]) -> FixedShape {
    let faces = (0..2)
        .map(|k| {
            let (d, other) = (rays[k], rays[1 - k]);
            let mut n = [d[1], -d[0]];
            if n[0] * other[0] + n[1] * other[1] > 0 {
                n = [-n[0], -n[1]];
            }
            let g = gcd(n[0], n[1]);
            n = [n[0] / g, n[1] / g];
            (n, n[0] * apex[0] + n[1] * apex[1])
        })
        .collect();
    FixedShape {
        kind: ShapeKind::Cone,
        id,
        corners: vec![apex],
        rays: rays.to_vec(),
        faces,
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

pub fn triangles() -> Vec<FixedShape> {
    vec![
        triangle(1, [[0, 0], [2, 0], [0, 2]]),
        triangle(2, [[-1, 0], [1, 0], [1, 2]]),
        triangle(3, [[0, -1], [2, 1], [0, 1]]),
        triangle(4, [[1, -1], [1, 1], [-1, 1]]),
    ]
}

pub fn cones() -> Vec<FixedShape> {
    vec![
        cone(1, [0, 0], [[1, 0], [1, 1]]),
        cone(2, [0, 0], [[0, 1], [1, 1]]),
        cone(3, [0, 1], [[1, 0], [1, -1]]),
        cone(4, [0, 1], [[0, -1], [1, -1]]),
        cone(5, [1, 1], [[-1, 0], [-1, -1]]),
        cone(6, [1, 1], [[0, -1], [-1, -1]]),
        cone(7, [1, 0], [[-1, 0], [-1, 1]]),
        cone(8, [1, 0], [[0, 1], [-1, 1]]),
    ]
}

impl FixedShape {
    pub fn body<T: Scalar>(&self) -> ParametricBody<T> {
        ParametricBody::from_faces(
            self.faces
                .iter()
                .map(|(n, _)| vec![T::of_i64(n[0]), T::of_i64(n[1])])
                .collect(),
            self.faces.iter().map(|(_, b)| T::of_i64(*b)).collect(),
        )
    }

    pub fn contains_strictly<T: Scalar>(&self, f: &[T]) -> bool {
        f.len() == 2 && self.body::<T>().residuals(f).iter().all(|r| *r > T::zero())
    }

    /// `b_k - n_k f` per face.
    pub fn slacks<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        self.body::<T>().residuals(f)
    }

    /// Per-face coefficients `n_k r_j / (b_k - n_k f)`, indexed `[face][column]`.
    pub fn face_alphas<T: Scalar>(
        &self,
        system: &QRowSystem<T>,
    ) -> Result<Vec<Vec<T>>, ShapeError> {
        self.check(system)?;
        let slack = self.slacks(&system.f);
        let body = self.body::<T>();
        Ok(body
            .normals
            .iter()
            .zip(&slack)
            .map(|(n, d)| {
                (0..system.n())
                    .map(|j| dot(n, &system.ray(j)) / d.clone())
                    .collect()
            })
            .collect())
    }

    /// Monoidal weights `(b_k - min_{x in {0,1}^2} n_k x) / (b_k - n_k f)`.
    pub fn face_weights<T: Scalar>(&self, f: &[T]) -> Vec<T> {
        self.faces
            .iter()
            .zip(self.slacks(f))
            .map(|((n, b), d)| {
                let low = (0..4)
                    .map(|i| {
                        let p = vertex(2, i);
                        n[0] * p[0] as i64 + n[1] * p[1] as i64
                    })
                    .min()
                    .unwrap_or(0);
                T::of_i64(b - low) / d
            })
            .collect()
    }

    /// Nonnegative CGLP multipliers realizing a triangle: each term takes a
    /// face through its cube vertex whose normal lies in the term's orthant,
    /// scaled to normalization 1.
    pub fn multipliers<T: Scalar>(&self, f: &[T]) -> Option<Multipliers<T>> {
        if self.kind != ShapeKind::Triangle {
            return None;
        }
        let mut u = Vec::with_capacity(4);
        let mut used = vec![false; self.faces.len()];
        for i in 0..num_terms(2) {
            let p = vertex(2, i);
            let (k, (n, b)) = self.faces.iter().enumerate().find(|(_, (n, b))| {
                n[0] * p[0] as i64 + n[1] * p[1] as i64 == *b
                    && (0..2).all(|c| if p[c] == 1 { n[c] >= 0 } else { n[c] <= 0 })
            })?;
            used[k] = true;
            let n: Vec<T> = vec![T::of_i64(n[0]), T::of_i64(n[1])];
            let g = T::of_i64(*b) - dot(&n, f);
            u.push(
                (0..2)
                    .map(|c| sigma::<T>(p[c]) * n[c].clone() / g.clone())
                    .collect(),
            );
        }
        if used.iter().all(|&x| x) {
            Some(Multipliers::new(Mode::Mip, u))
        } else {
            None
        }
    }

    fn check<T: Scalar>(&self, system: &QRowSystem<T>) -> Result<(), ShapeError> {
        if system.q() != 2 {
            return Err(ShapeError::NotPlanar);
        }
        if !self.contains_strictly(&system.f) {
            return Err(ShapeError::NotContaining {
                kind: self.kind,
                id: self.id,
            });
        }
        Ok(())
    }
}

/// Triangles and cones whose interior contains `f`.
pub fn applicable_shapes<T: Scalar>(f: &[T]) -> Vec<FixedShape> {
    triangles()
        .into_iter()
        .chain(cones())
        .filter(|s| s.contains_strictly(f))
        .collect()
}

/// `alpha_j = max_k n_k r_j / (b_k - n_k f)`. Triangle cuts carry their
/// multipliers; cone cuts may have negative coefficients.
pub fn shape_cut<T: Scalar>(
    system: &QRowSystem<T>,
    shape: &FixedShape,
) -> Result<Cut<T>, ShapeError> {
    let faces = shape.face_alphas(system)?;
    let alpha: Vec<T> = (0..system.n())
        .map(|j| {
            faces
                .iter()
                .map(|fa| fa[j].clone())
                .reduce(|a, b| a.max_val(b))
                .expect("shape has faces")
        })
        .collect();
    let mut cut = Cut::new(alpha, CutSource::FixedShape);
    if let Some(m) = shape.multipliers(&system.f) {
        cut = cut.with_multipliers(m);
    }
    Ok(cut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cglp::{alpha_from_multipliers, verify_cut_valid};
    use crate::octahedron::intersection_cut;
    use crate::rowsystem::alww_instance;
    use crate::scalar::{int, rat, Rational};

    #[test]
    fn face_data() {
        let t = &triangles()[0];
        assert_eq!(t.faces, vec![([0, -1], 0), ([1, 1], 2), ([-1, 0], 0)]);
        let c = &cones()[0];
        assert_eq!(c.faces, vec![([0, -1], 0), ([-1, 1], 0)]);
    }

    #[test]
    fn triangle_one_on_alww() {
        let s = alww_instance();
        let t = &triangles()[0];
        let cut = shape_cut(&s, t).unwrap();
        assert_eq!(
            cut.alpha,
            vec![rat(12, 5), rat(8, 5), int(12), int(2), int(4)]
        );
        let body = intersection_cut(&s, &t.body()).unwrap();
        assert_eq!(body.alpha, cut.alpha);
        let m = cut.multipliers.clone().unwrap();
        assert_eq!(alpha_from_multipliers(&s, &m), cut.alpha);
        assert!(verify_cut_valid(&s, &cut.alpha, Mode::Mip));
    }

    #[test]
    fn counts_at_alww_point() {
        let f = [rat(1, 4), rat(1, 2)];
        let shapes = applicable_shapes(&f);
        assert_eq!(
            shapes
                .iter()
                .filter(|s| s.kind == ShapeKind::Triangle)
                .count(),
            4
        );
        let ids: Vec<usize> = shapes
            .iter()
            .filter(|s| s.kind == ShapeKind::Cone)
            .map(|s| s.id)
            .collect();
        assert_eq!(ids, vec![2, 4, 5, 7]);
        let center = applicable_shapes(&[rat(1, 2), rat(1, 2)]);
        assert_eq!(
            center.iter().filter(|s| s.kind == ShapeKind::Cone).count(),
            0
        );
    }

    #[test]
    fn cone_outside() {
        let s = alww_instance();
        assert_eq!(
            shape_cut(&s, &cones()[0]).unwrap_err(),
            ShapeError::NotContaining {
                kind: ShapeKind::Cone,
                id: 1
            }
        );
    }

    #[test]
    fn cone_cuts_valid_for_binary() {
        let s = alww_instance();
        for c in applicable_shapes(&s.f)
            .iter()
            .filter(|c| c.kind == ShapeKind::Cone)
        {
            let cut = shape_cut(&s, c).unwrap();
            assert!(
                verify_cut_valid(&s, &cut.alpha, Mode::Binary),
                "cone {}",
                c.id
            );
            let w: Vec<Rational> = c.face_weights(&s.f);
            let d = c.slacks(&s.f);
            for (wk, dk) in w.iter().zip(&d) {
                assert_eq!(wk.clone() * dk.clone(), int(1));
            }
        }
    }
}
