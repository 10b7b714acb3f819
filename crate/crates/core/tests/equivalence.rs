use proptest::prelude::*;

use rowcut::cglp::{alpha_from_multipliers, normalization_values, Mode, Multipliers};
use rowcut::octahedron::{intersection_cut, ParametricBody};
use rowcut::rowsystem::QRowSystem;
use rowcut::scalar::{rat, Rational};

fn rational(max: i64) -> impl Strategy<Value = Rational> {
    (-max..=max, 1..=4i64).prop_map(|(a, b)| rat(a, b))
}

fn fraction() -> impl Strategy<Value = Rational> {
    (2..=12i64).prop_flat_map(|d| (1..d).prop_map(move |a| rat(a, d)))
}

fn positive() -> impl Strategy<Value = Rational> {
    (1..=8i64, 1..=4i64).prop_map(|(a, b)| rat(a, b))
}

/// A term's two multipliers, at least one of them positive.
fn term() -> impl Strategy<Value = Vec<Rational>> {
    prop_oneof![
        positive().prop_map(|a| vec![a, rat(0, 1)]),
        positive().prop_map(|b| vec![rat(0, 1), b]),
        (positive(), positive()).prop_map(|(a, b)| vec![a, b]),
    ]
}

fn system() -> impl Strategy<Value = QRowSystem<Rational>> {
    (1..=6usize).prop_flat_map(|n| {
        (
            prop::collection::vec(fraction(), 2),
            prop::collection::vec(prop::collection::vec(rational(9), n), 2),
        )
            .prop_map(move |(f, rays)| QRowSystem::new(f, rays, vec![false; n]).unwrap())
    })
}

fn normalized(f: &[Rational], u: Vec<Vec<Rational>>) -> Multipliers<Rational> {
    let m = Multipliers::new(Mode::Mip, u);
    let g = normalization_values(f, &m);
    let u =
        m.u.iter()
            .zip(&g)
            .map(|(row, gi)| row.iter().map(|x| x / gi).collect())
            .collect();
    Multipliers::new(Mode::Mip, u)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn intersection_cut_equals_cglp_cut(s in system(), u in prop::collection::vec(term(), 4)) {
        let m = normalized(&s.f, u);
        let cut = intersection_cut(&s, &ParametricBody::from_multipliers(&m)).unwrap();
        prop_assert_eq!(cut.alpha, alpha_from_multipliers(&s, &m));
    }

    #[test]
    fn scaling_the_body_scales_the_cut(s in system(), u in prop::collection::vec(term(), 4)) {
        let m = normalized(&s.f, u);
        let doubled = Multipliers::new(Mode::Mip, m.u.iter().map(|r| r.iter().map(|x| x * rat(2, 1)).collect()).collect());
        let a = intersection_cut(&s, &ParametricBody::from_multipliers(&m)).unwrap();
        let b = intersection_cut(&s, &ParametricBody::from_multipliers(&doubled)).unwrap();
        prop_assert_eq!(a.alpha, b.alpha);
    }
}
