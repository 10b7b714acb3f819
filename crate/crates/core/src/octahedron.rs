//! Parametric cross-polytopes and their intersection cuts.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::cglp::{num_terms, sigma, vertex, Cut, CutSource, Mode, Multipliers};
use crate::rowsystem::QRowSystem;
use crate::scalar::{dot, Scalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OctahedronError {
    #[error("f is not interior to the body: face {0} is violated or tight")]
    NotInterior(usize),
    #[error("body dimension {body} does not match the row system ({rows} rows)")]
    Shape { body: usize, rows: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConfigLabel {
    S,
    TA,
    TB,
    Q,
    TC1,
    TC2,
    CA,
    CB,
    CC,
    CCT,
    ST,
    Unclassified,
}

impl fmt::Display for ConfigLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConfigLabel::S => "S",
            ConfigLabel::TA => "T_A",
            ConfigLabel::TB => "T_B",
            ConfigLabel::Q => "Q",
            ConfigLabel::TC1 => "T_C1",
            ConfigLabel::TC2 => "T_C2",
            ConfigLabel::CA => "C_A",
            ConfigLabel::CB => "C_B",
            ConfigLabel::CC => "C_C",
            ConfigLabel::CCT => "C_CT",
            ConfigLabel::ST => "S_T",
            ConfigLabel::Unclassified => "unclassified",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OctahedronConfig {
    pub label: ConfigLabel,
    /// Terms whose face supports the body.
    pub active: Vec<bool>,
}

/// The body `{x : n_i x <= b_i}`, one face per disjunctive term.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricBody<T> {
    pub normals: Vec<Vec<T>>,
    pub rhs: Vec<T>,
}

/// Shape of a planar body.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry<T> {
    pub vertices: Vec<Vec<T>>,
    pub bounded: bool,
    pub active: Vec<bool>,
    /// Active faces grouped by supporting line.
    pub lines: Vec<Vec<usize>>,
}

impl<T: Scalar> ParametricBody<T> {
    /// Face `i` is `sum_k sigma_ik u_ik x_k <= sum_k sigma_ik u_ik p^i_k`.
    pub fn from_multipliers(m: &Multipliers<T>) -> Self {
        let q = m.q();
        let mut normals = Vec::with_capacity(m.num_terms());
        let mut rhs = Vec::with_capacity(m.num_terms());
        for (i, row) in m.u.iter().enumerate() {
            let p = vertex(q, i);
            let n: Vec<T> = row
                .iter()
                .zip(&p)
                .map(|(u, &pk)| sigma::<T>(pk) * u.clone())
                .collect();
            let b = n
                .iter()
                .zip(&p)
                .filter(|(_, &pk)| pk == 1)
                .fold(T::zero(), |acc, (x, _)| acc + x.clone());
            normals.push(n);
            rhs.push(b);
        }
        ParametricBody { normals, rhs }
    }

    pub fn from_faces(normals: Vec<Vec<T>>, rhs: Vec<T>) -> Self {
        assert_eq!(normals.len(), rhs.len());
        ParametricBody { normals, rhs }
    }

    pub fn q(&self) -> usize {
        self.normals.first().map(|n| n.len()).unwrap_or(0)
    }

    pub fn num_faces(&self) -> usize {
        self.normals.len()
    }

    /// Signed weights `sigma_ik n_ik`, the multipliers when the faces follow
    /// the term order.
    pub fn weights(&self) -> Vec<Vec<T>> {
        let q = self.q();
        self.normals
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let p = vertex(q, i % num_terms(q));
                n.iter()
                    .zip(&p)
                    .map(|(x, &pk)| sigma::<T>(pk) * x.clone())
                    .collect()
            })
            .collect()
    }

    /// `b_i - n_i x` for every face.
    pub fn residuals(&self, x: &[T]) -> Vec<T> {
        self.normals
            .iter()
            .zip(&self.rhs)
            .map(|(n, b)| b.clone() - dot(n, x))
            .collect()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.residuals(x).iter().all(|r| *r >= -T::feas_tol())
    }

    pub fn is_interior(&self, x: &[T]) -> bool {
        self.residuals(x).iter().all(|r| *r > T::feas_tol())
    }

    /// Every right-hand side multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        ParametricBody {
            normals: self.normals.clone(),
            rhs: self
                .rhs
                .iter()
                .map(|b| b.clone() * factor.clone())
                .collect(),
        }
    }

    /// Vertices, recession and supporting faces of a planar body.
    pub fn geometry(&self) -> Option<Geometry<T>> {
        if self.q() != 2 {
            return None;
        }
        let tol = T::feas_tol();
        let faces: Vec<usize> = (0..self.num_faces())
            .filter(|&i| self.normals[i].iter().any(|x| !x.is_negligible()))
            .collect();
        let mut vertices: Vec<Vec<T>> = Vec::new();
        for (a, &i) in faces.iter().enumerate() {
            for &k in &faces[a + 1..] {
                let (n, m) = (&self.normals[i], &self.normals[k]);
                let det = cross(n, m);
                if det.is_negligible() {
                    continue;
                }
                let (b, c) = (self.rhs[i].clone(), self.rhs[k].clone());
                let x = vec![
                    (b.clone() * m[1].clone() - n[1].clone() * c.clone()) / det.clone(),
                    (n[0].clone() * c - b * m[0].clone()) / det,
                ];
                if self.contains(&x) && !vertices.iter().any(|v| near(v, &x)) {
                    vertices.push(x);
                }
            }
        }
        let mut rec: Vec<Vec<T>> = Vec::new();
        for &i in &faces {
            let n = &self.normals[i];
            for d in [
                vec![-n[1].clone(), n[0].clone()],
                vec![n[1].clone(), -n[0].clone()],
            ] {
                if self.normals.iter().all(|m| dot(m, &d) <= tol) {
                    rec.push(d);
                }
            }
        }
        let mut active = vec![false; self.num_faces()];
        for &i in &faces {
            let n = &self.normals[i];
            active[i] = if vertices.is_empty() {
                faces.iter().all(|&k| {
                    let m = &self.normals[k];
                    let same_dir = cross(n, m).is_negligible() && dot(n, m) > T::zero();
                    !same_dir
                        || self.rhs[i].clone() * dot(n, m)
                            <= self.rhs[k].clone() * dot(n, n) + tol.clone()
                })
            } else {
                let on = vertices
                    .iter()
                    .filter(|v| (dot(n, v) - self.rhs[i].clone()).abs() <= tol)
                    .count();
                let along = rec.iter().any(|d| dot(n, d).abs() <= tol);
                on >= 2 || (on >= 1 && along)
            };
        }
        let mut lines: Vec<Vec<usize>> = Vec::new();
        for i in (0..self.num_faces()).filter(|&i| active[i]) {
            match lines.iter_mut().find(|g| self.same_line(g[0], i)) {
                Some(g) => g.push(i),
                None => lines.push(vec![i]),
            }
        }
        Some(Geometry {
            vertices,
            bounded: rec.is_empty(),
            active,
            lines,
        })
    }

    fn same_line(&self, i: usize, k: usize) -> bool {
        let (n, m) = (&self.normals[i], &self.normals[k]);
        cross(n, m).is_negligible()
            && dot(n, m) > T::zero()
            && (self.rhs[i].clone() * dot(m, m) - self.rhs[k].clone() * dot(n, m)).is_negligible()
    }

    /// Whether no candidate lattice point lies in the interior. MIP mode
    /// scans a window around the body, Binary mode the cube vertices.
    pub fn is_lattice_point_free(&self, mode: Mode) -> bool {
        let q = self.q();
        match mode {
            Mode::Binary => (0..num_terms(q)).all(|i| {
                let p: Vec<T> = vertex(q, i).iter().map(|&x| T::of_i64(x as i64)).collect();
                !self.is_interior(&p)
            }),
            Mode::Mip => {
                if q != 2 {
                    return true;
                }
                let b = self.radius_bound();
                (-b..=b + 1)
                    .all(|x| (-b..=b + 1).all(|y| !self.is_interior(&[T::of_i64(x), T::of_i64(y)])))
            }
        }
    }

    fn radius_bound(&self) -> i64 {
        let reach = self
            .geometry()
            .map(|g| {
                g.vertices
                    .iter()
                    .flatten()
                    .map(|x| x.abs().ceil_val().as_f64())
                    .fold(0.0, f64::max)
            })
            .unwrap_or(0.0);
        (reach as i64 + 1).max(3)
    }
}

fn cross<T: Scalar>(a: &[T], b: &[T]) -> T {
    a[0].clone() * b[1].clone() - a[1].clone() * b[0].clone()
}

fn near<T: Scalar>(a: &[T], b: &[T]) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x.clone() - y.clone()).abs() <= T::feas_tol())
}

/// `alpha_j = max(0, max_i n_i r_j / (b_i - n_i f))`.
pub fn intersection_cut<T: Scalar>(
    system: &QRowSystem<T>,
    body: &ParametricBody<T>,
) -> Result<Cut<T>, OctahedronError> {
    if body.q() != system.q() {
        return Err(OctahedronError::Shape {
            body: body.q(),
            rows: system.q(),
        });
    }
    let den = body.residuals(&system.f);
    if let Some(i) = den.iter().position(|d| *d <= T::zero()) {
        return Err(OctahedronError::NotInterior(i));
    }
    let alpha = (0..system.n())
        .map(|j| {
            let r = system.ray(j);
            body.normals
                .iter()
                .zip(&den)
                .map(|(n, d)| dot(n, &r) / d.clone())
                .fold(T::zero(), |acc, x| acc.max_val(x))
        })
        .collect();
    Ok(Cut::new(alpha, CutSource::Octahedron))
}

/// Configuration label of the body defined by `m`.
pub fn classify<T: Scalar>(m: &Multipliers<T>) -> OctahedronConfig {
    let nonzero: Vec<bool> =
        m.u.iter()
            .map(|r| r.iter().any(|x| !x.is_negligible()))
            .collect();
    if m.q() != 2 || m.num_terms() != 4 {
        return OctahedronConfig {
            label: ConfigLabel::Unclassified,
            active: nonzero,
        };
    }
    let body = ParametricBody::from_multipliers(m);
    let geo = body.geometry().expect("planar body");
    let active = if geo.active.iter().any(|&a| a) {
        geo.active.clone()
    } else {
        nonzero
    };
    let label = if m.u.iter().flatten().all(|x| *x >= -T::zero_tol()) {
        positive_label(m)
    } else {
        signed_label(&body, &geo)
    };
    OctahedronConfig { label, active }
}

fn positive_label<T: Scalar>(m: &Multipliers<T>) -> ConfigLabel {
    let pos = |x: &T| *x > T::zero_tol();
    let count = m.u.iter().flatten().filter(|x| pos(x)).count();
    match count {
        4 if m.v().iter().all(pos) || m.w().iter().all(pos) => ConfigLabel::S,
        5 => ConfigLabel::TA,
        6 => ConfigLabel::TB,
        8 => ConfigLabel::Q,
        _ => ConfigLabel::Unclassified,
    }
}

fn signed_label<T: Scalar>(body: &ParametricBody<T>, geo: &Geometry<T>) -> ConfigLabel {
    let parallel = |a: usize, b: usize| {
        cross(
            &body.normals[geo.lines[a][0]],
            &body.normals[geo.lines[b][0]],
        )
        .is_negligible()
    };
    match (geo.lines.len(), geo.bounded) {
        (2, false) if parallel(0, 1) => ConfigLabel::S,
        (2, false) => {
            let on_line: Vec<Vec<usize>> = geo
                .lines
                .iter()
                .map(|g| {
                    let i = g[0];
                    (0..4)
                        .filter(|&k| {
                            let p: Vec<T> =
                                vertex(2, k).iter().map(|&x| T::of_i64(x as i64)).collect();
                            (dot(&body.normals[i], &p) - body.rhs[i].clone()).is_negligible()
                        })
                        .collect()
                })
                .collect();
            // terms k and k+1 sit on adjacent cube vertices
            let adjacent = |a: usize, b: usize| (a + 1) % 4 == b || (b + 1) % 4 == a;
            let pairs = |vs: &Vec<usize>| -> Vec<(usize, usize)> {
                vs.iter()
                    .enumerate()
                    .flat_map(|(x, &a)| vs[x + 1..].iter().map(move |&b| (a, b)))
                    .collect()
            };
            if on_line
                .iter()
                .any(|vs| pairs(vs).iter().any(|&(a, b)| adjacent(a, b)))
            {
                ConfigLabel::CA
            } else if on_line.iter().any(|vs| vs.len() >= 2) {
                ConfigLabel::CB
            } else {
                ConfigLabel::CC
            }
        }
        (3, true) => {
            let inside = geo.vertices.iter().any(|v| {
                v.iter()
                    .all(|x| *x >= -T::feas_tol() && *x <= T::one() + T::feas_tol())
            });
            if inside {
                ConfigLabel::TC2
            } else {
                ConfigLabel::TC1
            }
        }
        (3, false) => {
            if parallel(0, 1) || parallel(0, 2) || parallel(1, 2) {
                ConfigLabel::ST
            } else {
                ConfigLabel::CCT
            }
        }
        (4, true) => ConfigLabel::Q,
        _ => ConfigLabel::Unclassified,
    }
}

/// Static 600x600 diagram of a planar body with the cube, `f`, the rays and
/// their boundary intersections.
pub fn render_svg<T: Scalar>(system: &QRowSystem<T>, body: &ParametricBody<T>) -> String {
    let f: Vec<f64> = system.f.iter().map(|x| x.as_f64()).collect();
    let normals: Vec<Vec<f64>> = body
        .normals
        .iter()
        .map(|n| n.iter().map(|x| x.as_f64()).collect())
        .collect();
    let rhs: Vec<f64> = body.rhs.iter().map(|x| x.as_f64()).collect();
    let (lo, hi) = (-2.0, 3.0);
    let scale = 600.0 / (hi - lo);
    let px = |x: f64| (x - lo) * scale;
    let py = |y: f64| (hi - y) * scale;

    let mut poly = vec![[lo, lo], [hi, lo], [hi, hi], [lo, hi]];
    for (n, b) in normals.iter().zip(&rhs) {
        poly = clip(&poly, n, *b);
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="600" height="600" viewBox="0 0 600 600">"#
    );
    let _ = writeln!(out, r##"<rect width="600" height="600" fill="#ffffff"/>"##);
    if !poly.is_empty() {
        let pts: Vec<String> = poly
            .iter()
            .map(|p| format!("{:.2},{:.2}", px(p[0]), py(p[1])))
            .collect();
        let _ = writeln!(
            out,
            r##"<polygon points="{}" fill="#cfe2f3" stroke="#1c4587" stroke-width="2"/>"##,
            pts.join(" ")
        );
    }
    let _ = writeln!(
        out,
        r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#666666" stroke-dasharray="4 3"/>"##,
        px(0.0),
        py(1.0),
        scale,
        scale
    );
    for k in 0..4 {
        let p = vertex(2, k);
        let _ = writeln!(
            out,
            r##"<circle cx="{:.2}" cy="{:.2}" r="5" fill="#000000"/>"##,
            px(p[0] as f64),
            py(p[1] as f64)
        );
    }
    let den: Vec<f64> = normals
        .iter()
        .zip(&rhs)
        .map(|(n, b)| b - n[0] * f[0] - n[1] * f[1])
        .collect();
    for j in 0..system.n() {
        let r = system.ray(j);
        let r = [r[0].as_f64(), r[1].as_f64()];
        let step = normals
            .iter()
            .zip(&den)
            .map(|(n, d)| (n[0] * r[0] + n[1] * r[1]) / d)
            .fold(0.0, f64::max);
        let hit = step > 0.0;
        let t = if hit { 1.0 / step } else { 10.0 };
        let end = [f[0] + t * r[0], f[1] + t * r[1]];
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#cc0000" stroke-width="1.5"/>"##,
            px(f[0]),
            py(f[1]),
            px(end[0]),
            py(end[1])
        );
        if hit {
            let _ = writeln!(
                out,
                r##"<circle cx="{:.2}" cy="{:.2}" r="4" fill="#cc0000"/>"##,
                px(end[0]),
                py(end[1])
            );
        }
    }
    let _ = writeln!(
        out,
        r##"<circle cx="{:.2}" cy="{:.2}" r="5" fill="#38761d"/>"##,
        px(f[0]),
        py(f[1])
    );
    out.push_str("</svg>\n");
    out
}

/// Sutherland-Hodgman step against `n x <= b`.
fn clip(poly: &[[f64; 2]], n: &[f64], b: f64) -> Vec<[f64; 2]> {
    let val = |p: &[f64; 2]| n[0] * p[0] + n[1] * p[1] - b;
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, c) = (poly[i], poly[(i + 1) % poly.len()]);
        let (va, vc) = (val(&a), val(&c));
        if va <= 0.0 {
            out.push(a);
        }
        if (va < 0.0 && vc > 0.0) || (va > 0.0 && vc < 0.0) {
            let t = va / (va - vc);
            out.push([a[0] + t * (c[0] - a[0]), a[1] + t * (c[1] - a[1])]);
        }
    }
    out
}
