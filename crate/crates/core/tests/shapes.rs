use rowcut::rowsystem::alww_instance;
use rowcut::scalar::{rat, Rational};
use rowcut::shapes::{applicable_shapes, cones, shape_cut, triangles, ShapeKind};

/// `p - apex = a d1 + b d2` with `a, b > 0`, by Cramer's rule.
fn inside_cone(apex: [i64; 2], d: [[i64; 2]; 2], p: &[Rational]) -> bool {
    let x = &p[0] - rat(apex[0], 1);
    let y = &p[1] - rat(apex[1], 1);
    let det = d[0][0] * d[1][1] - d[0][1] * d[1][0];
    let a = (&x * rat(d[1][1], 1) - &y * rat(d[1][0], 1)) / rat(det, 1);
    let b = (&y * rat(d[0][0], 1) - &x * rat(d[0][1], 1)) / rat(det, 1);
    a > rat(0, 1) && b > rat(0, 1)
}

#[test]
fn cone_counts_on_the_grid() {
    for i in 1..20 {
        for j in 1..20 {
            let f = [rat(i, 20), rat(j, 20)];
            let found: Vec<usize> = applicable_shapes(&f)
                .iter()
                .filter(|s| s.kind == ShapeKind::Cone)
                .map(|s| s.id)
                .collect();
            let expected: Vec<usize> = cones()
                .iter()
                .filter(|c| inside_cone(c.corners[0], [c.rays[0], c.rays[1]], &f))
                .map(|c| c.id)
                .collect();
            assert_eq!(found, expected, "f = ({i}/20, {j}/20)");
            let diagonals = usize::from(i == j) + usize::from(i + j == 20);
            assert_eq!(found.len(), [4, 2, 0][diagonals], "f = ({i}/20, {j}/20)");
        }
    }
}

#[test]
fn every_triangle_contains_the_open_square() {
    for i in 1..20 {
        for j in 1..20 {
            let f = [rat(i, 20), rat(j, 20)];
            assert!(triangles().iter().all(|t| t.contains_strictly(&f)));
        }
    }
}

#[test]
fn shape_cuts_tighten_toward_faces() {
    let s = alww_instance();
    for shape in applicable_shapes(&s.f) {
        let cut = shape_cut(&s, &shape).unwrap();
        let per_face = shape.face_alphas(&s).unwrap();
        for (j, a) in cut.alpha.iter().enumerate() {
            let best = per_face.iter().map(|row| row[j].clone()).max().unwrap();
            assert!(*a >= best);
        }
    }
}
