mod common;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use rowcut::cglp::{alpha_from_multipliers, verify_cut_valid, Cut, CutSource, Mode};
use rowcut::rowsystem::QRowSystem;
use rowcut::scalar::{int, rat, Rational};
use rowcut::shapes::{applicable_shapes, shape_cut, ShapeKind};
use rowcut::strengthen::{
    apply_shifts, strengthen_cone, strengthen_monoidal, strengthen_monoidal_cut,
    strengthen_standard, strengthen_standard_cut, strengthen_three_step, Generator,
};

use common::*;

fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

fn mixed_system<R: Rng>(rng: &mut R, n: usize) -> QRowSystem<Rational> {
    let s = random_system(rng, n, 0.5);
    let mut integer = s.integer.clone();
    integer[0] = true;
    s.with_integer(integer)
}

fn cglp_cut(s: &QRowSystem<Rational>, m: rowcut::cglp::Multipliers<Rational>) -> Cut<Rational> {
    Cut::new(alpha_from_multipliers(s, &m), CutSource::Cglp).with_multipliers(m)
}

#[test]
fn floor_ceil_matches_window_optimum() {
    let mut r = rng(11);
    for _ in 0..1000 {
        let s = mixed_system(&mut r, 3);
        let m = random_mip_multipliers(&mut r, &s.f);
        let cut = cglp_cut(&s, m.clone());
        let (value, shift) = strengthen_standard(&s, &cut, 0).unwrap();
        assert_eq!(value, standard_window_min(&s, &m, 0, 5));
        assert_eq!(value, shifted_term_max(&s, &m, 0, &shift.m));
    }
}

#[test]
fn strengthened_mip_coefficients_lie_in_unit_interval() {
    let mut r = rng(12);
    for _ in 0..1000 {
        let s = mixed_system(&mut r, 4);
        let cut = cglp_cut(&s, random_mip_multipliers(&mut r, &s.f));
        let (out, _) = strengthen_standard_cut(&s, &cut).unwrap();
        for j in s.integer_columns() {
            assert!(
                out.alpha[j] >= int(0) && out.alpha[j] <= int(1),
                "{}",
                out.alpha[j]
            );
        }
    }
}

#[test]
fn standard_strengthening_stays_valid() {
    let mut r = rng(13);
    for _ in 0..200 {
        let s = mixed_system(&mut r, 3);
        let cut = cglp_cut(&s, random_mip_multipliers(&mut r, &s.f));
        let (out, shifts) = strengthen_standard_cut(&s, &cut).unwrap();
        assert!(verify_cut_valid(
            &apply_shifts(&s, &shifts),
            &out.alpha,
            Mode::Mip
        ));
        assert!(mixed_integer_valid(&s, &out.alpha, Mode::Mip, 3, 3));
    }
}

#[test]
fn monoidal_step_matches_window_optimum() {
    let mut r = rng(14);
    for _ in 0..500 {
        let alphas: Vec<Rational> = (0..4).map(|_| rat(r.gen_range(-9..=9), 3)).collect();
        let weights: Vec<Rational> = (0..4).map(|_| rat(r.gen_range(3..=9), 3)).collect();
        let (value, elem) = strengthen_monoidal(&alphas, &weights);
        assert!(elem.is_member());
        assert_eq!(value, monoid_window_oracle(&alphas, &weights, 6));
    }
}

#[test]
fn monoidal_strengthening_stays_valid() {
    let mut r = rng(15);
    for _ in 0..200 {
        let s = mixed_system(&mut r, 3);
        let cut = cglp_cut(&s, random_binary_multipliers(&mut r, &s.f));
        assert!(mixed_integer_valid(&s, &cut.alpha, Mode::Binary, 3, 0));
        let (out, elems) = strengthen_monoidal_cut(&s, &cut).unwrap();
        assert!(elems.iter().all(|e| e.is_member()));
        assert!(out.alpha.iter().zip(&cut.alpha).all(|(a, b)| a <= b));
        assert!(mixed_integer_valid(&s, &out.alpha, Mode::Binary, 3, 0));
    }
}

#[test]
fn strengthened_cones_stay_valid() {
    let mut r = rng(16);
    let mut tried = 0;
    while tried < 100 {
        let s = mixed_system(&mut r, 3);
        for shape in applicable_shapes(&s.f)
            .into_iter()
            .filter(|c| c.kind == ShapeKind::Cone)
        {
            let (out, _) = strengthen_cone(&s, &shape).unwrap();
            assert!(mixed_integer_valid(&s, &out.alpha, Mode::Binary, 3, 0));
            tried += 1;
        }
    }
}

#[test]
fn three_step_cuts_are_valid_and_compared() {
    let mut r = rng(17);
    let (mut better, mut worse, mut equal) = (0, 0, 0);
    for _ in 0..200 {
        let s = mixed_system(&mut r, 3);
        let m = random_mip_multipliers(&mut r, &s.f);
        let (standard, _) = strengthen_standard_cut(&s, &cglp_cut(&s, m.clone())).unwrap();
        let (three, shifts) = strengthen_three_step(&s, Generator::Multipliers(&m)).unwrap();
        assert!(verify_cut_valid(
            &apply_shifts(&s, &shifts),
            &three.alpha,
            Mode::Mip
        ));
        assert!(mixed_integer_valid(&s, &three.alpha, Mode::Mip, 3, 3));
        let sum = |c: &Cut<Rational>| c.alpha.iter().fold(int(0), |a, b| a + b);
        let mut pairs = vec![(three, standard)];
        for shape in applicable_shapes(&s.f)
            .into_iter()
            .filter(|c| c.kind == ShapeKind::Triangle)
        {
            let (standard, _) =
                strengthen_standard_cut(&s, &shape_cut(&s, &shape).unwrap()).unwrap();
            let (three, shifts) = strengthen_three_step(&s, Generator::Shape(&shape)).unwrap();
            assert!(verify_cut_valid(
                &apply_shifts(&s, &shifts),
                &three.alpha,
                Mode::Mip
            ));
            assert!(mixed_integer_valid(&s, &three.alpha, Mode::Mip, 3, 3));
            pairs.push((three, standard));
        }
        for (three, standard) in &pairs {
            match sum(three).cmp(&sum(standard)) {
                std::cmp::Ordering::Less => better += 1,
                std::cmp::Ordering::Greater => worse += 1,
                std::cmp::Ordering::Equal => equal += 1,
            }
        }
    }
    println!(
        "three-step vs standard coefficient sum: {better} smaller, {equal} equal, {worse} larger"
    );
}
