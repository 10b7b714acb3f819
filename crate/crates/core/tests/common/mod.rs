#![allow(dead_code, clippy::needless_range_loop, clippy::type_complexity)]

use num_traits::{One, Signed, Zero};
use rand::Rng;

use rowcut::cglp::{normalization_values, num_terms, vertex, Cut, Mode, Multipliers};
use rowcut::instance::{parse_mps, Instance};
use rowcut::rowsystem::QRowSystem;
use rowcut::scalar::{int, rat, Rational, Scalar};
use rowcut::simplex::{self, LpModel, LpStatus};

pub fn rand_rat<R: Rng>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    rat(
        rng.gen_range(-max_num..=max_num),
        rng.gen_range(1..=max_den),
    )
}

pub fn rand_unit<R: Rng>(rng: &mut R) -> Rational {
    let d = rng.gen_range(2..=12);
    rat(rng.gen_range(1..d), d)
}

/// Two rows, `n` columns, each column integer with probability `p_int`.
pub fn random_system<R: Rng>(rng: &mut R, n: usize, p_int: f64) -> QRowSystem<Rational> {
    let f = vec![rand_unit(rng), rand_unit(rng)];
    let rays = (0..2)
        .map(|_| (0..n).map(|_| rand_rat(rng, 9, 4)).collect())
        .collect();
    let integer = (0..n).map(|_| rng.gen_bool(p_int)).collect();
    QRowSystem::new(f, rays, integer).unwrap()
}

fn rescale(f: &[Rational], mode: Mode, u: Vec<Vec<Rational>>) -> Option<Multipliers<Rational>> {
    let m = Multipliers::new(mode, u);
    let g = normalization_values(f, &m);
    if g.iter().any(|x| !x.is_positive()) {
        return None;
    }
    let u =
        m.u.iter()
            .zip(&g)
            .map(|(row, gi)| row.iter().map(|x| x / gi).collect())
            .collect();
    Some(Multipliers::new(mode, u))
}

/// Nonnegative multipliers with every term combination equal to 1.
pub fn random_mip_multipliers<R: Rng>(rng: &mut R, f: &[Rational]) -> Multipliers<Rational> {
    loop {
        let u = (0..num_terms(f.len()))
            .map(|_| {
                (0..f.len())
                    .map(|_| {
                        if rng.gen_bool(0.25) {
                            int(0)
                        } else {
                            rat(rng.gen_range(1..=8), rng.gen_range(1..=4))
                        }
                    })
                    .collect()
            })
            .collect();
        if let Some(m) = rescale(f, Mode::Mip, u) {
            return m;
        }
    }
}

/// Signed multipliers with every term combination equal to 1.
pub fn random_binary_multipliers<R: Rng>(rng: &mut R, f: &[Rational]) -> Multipliers<Rational> {
    loop {
        let u = (0..num_terms(f.len()))
            .map(|_| (0..f.len()).map(|_| rand_rat(rng, 6, 3)).collect())
            .collect();
        if let Some(m) = rescale(f, Mode::Binary, u) {
            return m;
        }
    }
}

/// `max_i sum_k sign(p_ik) (r_j^k - shift_k) u_ik`.
pub fn shifted_term_max(
    system: &QRowSystem<Rational>,
    m: &Multipliers<Rational>,
    j: usize,
    shift: &[i64],
) -> Rational {
    (0..m.u.len())
        .map(|i| {
            let p = vertex(system.q(), i);
            (0..system.q())
                .map(|k| {
                    let r = &system.rays[k][j] - int(shift[k]);
                    let v = r * &m.u[i][k];
                    if p[k] == 1 {
                        v
                    } else {
                        -v
                    }
                })
                .fold(int(0), |a, b| a + b)
        })
        .max()
        .unwrap()
}

/// Exhaustive minimum over integer shifts within `radius` of `floor(r_j)`.
pub fn standard_window_min(
    system: &QRowSystem<Rational>,
    m: &Multipliers<Rational>,
    j: usize,
    radius: i64,
) -> Rational {
    let base: Vec<i64> = (0..2)
        .map(|k| system.rays[k][j].floor().to_integer().try_into().unwrap())
        .collect();
    let mut best: Option<Rational> = None;
    for a in -radius..=radius {
        for b in -radius..=radius {
            let v = shifted_term_max(system, m, j, &[base[0] + a, base[1] + b]);
            if best.as_ref().is_none_or(|x| v < *x) {
                best = Some(v);
            }
        }
    }
    best.unwrap()
}

/// Exhaustive `min max_k (a_k + m_k w_k)` over `m in [-r, r]^t` with
/// `sum m >= 0` and positive weights. The last entry takes the smallest
/// value the sum constraint allows.
pub fn monoid_window_oracle(alphas: &[Rational], weights: &[Rational], radius: i64) -> Rational {
    let t = alphas.len();
    let mut m = vec![-radius; t - 1];
    let mut best: Option<Rational> = None;
    loop {
        let last = (-m.iter().sum::<i64>()).max(-radius);
        if last <= radius {
            let v = (0..t)
                .map(|k| &alphas[k] + int(if k + 1 == t { last } else { m[k] }) * &weights[k])
                .max()
                .unwrap();
            if best.as_ref().is_none_or(|x| v < *x) {
                best = Some(v);
            }
        }
        let mut k = 0;
        while k < t - 1 && m[k] == radius {
            m[k] = -radius;
            k += 1;
        }
        if k == t - 1 {
            return best.unwrap();
        }
        m[k] += 1;
    }
}

/// Brute-force validity of `alpha s >= 1` for the mixed-integer set: integer
/// columns enumerated over `[0, s_max]`, basic points over the cube (binary)
/// or `[-w, w+1]^2` (MIP), an LP over the continuous columns for each.
pub fn mixed_integer_valid(
    system: &QRowSystem<Rational>,
    alpha: &[Rational],
    mode: Mode,
    s_max: i64,
    w: i64,
) -> bool {
    let n = system.n();
    let q = system.q();
    let j1: Vec<usize> = (0..n).filter(|&j| system.integer[j]).collect();
    let j2: Vec<usize> = (0..n).filter(|&j| !system.integer[j]).collect();
    let points: Vec<Vec<i64>> = match mode {
        Mode::Binary => (0..num_terms(q))
            .map(|i| vertex(q, i).iter().map(|&v| v as i64).collect())
            .collect(),
        Mode::Mip => (-w..=w + 1)
            .flat_map(|a| (-w..=w + 1).map(move |b| vec![a, b]))
            .collect(),
    };
    let mut s1 = vec![0i64; j1.len()];
    loop {
        let fixed: Rational = j1
            .iter()
            .zip(&s1)
            .map(|(&j, &v)| &alpha[j] * int(v))
            .fold(int(0), |a, b| a + b);
        for x in &points {
            let rhs: Vec<Rational> = (0..q)
                .map(|k| {
                    let used = j1
                        .iter()
                        .zip(&s1)
                        .map(|(&j, &v)| &system.rays[k][j] * int(v))
                        .fold(int(0), |a, b| a + b);
                    int(x[k]) - &system.f[k] - used
                })
                .collect();
            let mut model = LpModel::new(j2.len());
            model.cost = j2.iter().map(|&j| alpha[j].clone()).collect();
            for k in 0..q {
                let row: Vec<Rational> = j2.iter().map(|&j| system.rays[k][j].clone()).collect();
                model.add_dense_row(&row, Some(rhs[k].clone()), Some(rhs[k].clone()));
            }
            if j2.is_empty() {
                if rhs.iter().all(|v| v.is_zero()) && fixed < Rational::one() {
                    return false;
                }
                continue;
            }
            let sol = simplex::solve(&model);
            match sol.status {
                LpStatus::Infeasible => {}
                LpStatus::Optimal => {
                    if &fixed + &sol.objective < Rational::one() {
                        return false;
                    }
                }
                _ => return false,
            }
        }
        let mut k = 0;
        while k < s1.len() && s1[k] == s_max {
            s1[k] = 0;
            k += 1;
        }
        if k == s1.len() {
            return true;
        }
        s1[k] += 1;
    }
}

/// Free MPS text for an instance with finite rhs and `[0, u]` or free bounds.
pub fn write_mps(inst: &Instance) -> String {
    let mut out = format!("NAME {}\nROWS\n N obj\n", inst.name);
    for (i, s) in inst.row_senses.iter().enumerate() {
        let c = match s {
            rowcut::instance::RowSense::Le => 'L',
            rowcut::instance::RowSense::Ge => 'G',
            rowcut::instance::RowSense::Eq => 'E',
        };
        out.push_str(&format!(" {} {}\n", c, inst.row_names[i]));
    }
    out.push_str("COLUMNS\n");
    let mut in_int = false;
    for j in 0..inst.num_vars {
        if inst.is_integer[j] != in_int {
            let tag = if inst.is_integer[j] {
                "INTORG"
            } else {
                "INTEND"
            };
            out.push_str(&format!("    MARKER 'MARKER' '{}'\n", tag));
            in_int = inst.is_integer[j];
        }
        let name = &inst.var_names[j];
        if inst.objective[j] != 0.0 {
            out.push_str(&format!("    {} obj {}\n", name, inst.objective[j]));
        }
        for (i, a) in &inst.columns[j] {
            out.push_str(&format!("    {} {} {}\n", name, inst.row_names[*i], a));
        }
    }
    if in_int {
        out.push_str("    MARKER 'MARKER' 'INTEND'\n");
    }
    out.push_str("RHS\n");
    for (i, b) in inst.rhs.iter().enumerate() {
        out.push_str(&format!("    RHS {} {}\n", inst.row_names[i], b));
    }
    out.push_str("BOUNDS\n");
    for j in 0..inst.num_vars {
        if inst.lower[j] != 0.0 {
            out.push_str(&format!(
                " LO BND {} {}\n",
                inst.var_names[j], inst.lower[j]
            ));
        }
        if inst.upper[j].is_finite() {
            out.push_str(&format!(
                " UP BND {} {}\n",
                inst.var_names[j], inst.upper[j]
            ));
        }
    }
    out.push_str("ENDATA\n");
    out
}

/// Binary packing instance `min -c x` s.t. `A x <= b` with integer data.
pub fn packing(name: &str, c: &[i64], a: &[Vec<i64>], b: &[i64]) -> Instance {
    let n = c.len();
    let mut text = format!("NAME {}\nROWS\n N obj\n", name);
    for i in 0..a.len() {
        text.push_str(&format!(" L r{}\n", i));
    }
    text.push_str("COLUMNS\n    MARKER 'MARKER' 'INTORG'\n");
    for j in 0..n {
        text.push_str(&format!("    x{} obj {}\n", j, -c[j]));
        for (i, row) in a.iter().enumerate() {
            if row[j] != 0 {
                text.push_str(&format!("    x{} r{} {}\n", j, i, row[j]));
            }
        }
    }
    text.push_str("    MARKER 'MARKER' 'INTEND'\nRHS\n");
    for (i, v) in b.iter().enumerate() {
        text.push_str(&format!("    RHS r{} {}\n", i, v));
    }
    text.push_str("BOUNDS\n");
    for j in 0..n {
        text.push_str(&format!(" UP BND x{} 1\n", j));
    }
    text.push_str("ENDATA\n");
    parse_mps(&text).unwrap()
}

/// Optimum of a pure binary instance by enumeration.
pub fn binary_optimum(inst: &Instance) -> (f64, Vec<f64>) {
    let n = inst.num_vars;
    assert!(n <= 20);
    let mut best = (f64::INFINITY, Vec::new());
    for mask in 0u32..(1 << n) {
        let x: Vec<f64> = (0..n).map(|j| ((mask >> j) & 1) as f64).collect();
        if inst.is_feasible(&x, 1e-9) {
            let v = inst.objective_value(&x);
            if v < best.0 {
                best = (v, x);
            }
        }
    }
    best
}

/// Two-variable instance where one GMI cut closes the whole gap:
/// `min -x1 - x2` s.t. `2 x1 + 2 x2 <= 3`, binary.
pub fn two_variable_toy() -> Instance {
    packing("toy2", &[1, 1], &[vec![2, 2]], &[3])
}

/// Eight-item binary packing instance used for multi-round runs.
pub fn eight_item_toy() -> Instance {
    packing(
        "toy8",
        &[12, 9, 8, 7, 6, 5, 4, 3],
        &[
            vec![7, 6, 5, 5, 4, 3, 3, 2],
            vec![3, 5, 6, 2, 4, 5, 1, 3],
            vec![5, 2, 3, 6, 3, 2, 4, 1],
        ],
        &[15, 13, 12],
    )
}

pub fn q(v: &[(i64, i64)]) -> Vec<Rational> {
    v.iter().map(|&(a, b)| rat(a, b)).collect()
}

/// MIP-mode facets as `(alpha, v, w)`, in the order used throughout the tests.
pub fn mip_table() -> Vec<(Vec<Rational>, Vec<Rational>, Vec<Rational>)> {
    vec![
        (
            q(&[(2, 1), (2, 1), (4, 1), (1, 1), (12, 7)]),
            q(&[(2, 1), (8, 7), (0, 1), (0, 1)]),
            q(&[(1, 1), (2, 7), (2, 1), (2, 1)]),
        ),
        (
            q(&[(8, 3), (4, 3), (44, 9), (8, 9), (4, 3)]),
            q(&[(20, 9), (4, 3), (4, 3), (4, 9)]),
            q(&[(8, 9), (0, 1), (0, 1), (16, 9)]),
        ),
        (
            q(&[(8, 3), (2, 1), (4, 1), (1, 1), (4, 3)]),
            q(&[(2, 1), (4, 3), (0, 1), (0, 1)]),
            q(&[(1, 1), (0, 1), (2, 1), (2, 1)]),
        ),
        (
            q(&[(8, 3), (4, 3), (12, 1), (0, 1), (4, 3)]),
            q(&[(4, 1), (4, 3), (4, 3), (4, 1)]),
            q(&[(0, 1), (0, 1), (0, 1), (0, 1)]),
        ),
        (
            q(&[(2, 1), (2, 1), (68, 7), (2, 7), (12, 7)]),
            q(&[(24, 7), (8, 7), (0, 1), (0, 1)]),
            q(&[(2, 7), (2, 7), (2, 1), (2, 1)]),
        ),
    ]
}

/// Binary-mode facets as printed to four significant digits, with labels.
pub const BINARY_TABLE: [([f64; 5], &str); 12] = [
    ([2.667, 1.333, 12.0, 0.0, 1.333], "S"),
    ([2.667, 1.333, 4.889, 0.8889, 1.333], "T_B"),
    ([2.0, 2.0, 4.0, 1.0, 1.714], "T_B"),
    ([2.947, 1.053, 5.263, 0.8421, 3.579], "T_C1"),
    ([1.63, 2.37, 8.444, 0.4444, 1.926], "T_C1"),
    ([4.364, 2.545, 3.273, 1.091, 0.3636], "T_C2"),
    ([3.765, 3.059, 2.588, 1.176, 0.7059], "T_C2"),
    ([12.0, 8.0, 12.0, 0.0, -4.0], "C_A"),
    ([32.0, 20.0, -20.0, 4.0, 12.0], "C_B"),
    ([12.0, 8.0, 44.0, -4.0, -4.0], "C_B"),
    ([-2.0, 6.0, 52.0, 2.0, 4.0], "C_C"),
    ([8.0, -4.0, 12.0, 16.0, 44.0], "C_B"),
];

pub fn four_digits(x: f64) -> f64 {
    format!("{:.3e}", x).parse().unwrap()
}

pub fn matches_printed(alpha: &[Rational], printed: &[f64; 5]) -> bool {
    alpha
        .iter()
        .zip(printed)
        .all(|(a, p)| (four_digits(a.as_f64()) - p).abs() < 1e-9)
}

/// Position of each printed binary cut in the enumerated list.
pub fn binary_positions(cuts: &[Cut<Rational>]) -> Vec<usize> {
    BINARY_TABLE
        .iter()
        .map(|(p, _)| {
            cuts.iter()
                .position(|c| matches_printed(&c.alpha, p))
                .expect("printed cut found")
        })
        .collect()
}
