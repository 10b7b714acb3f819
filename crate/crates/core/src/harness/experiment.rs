use rand::RngCore;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

use crate::cglp::{num_terms, term_model, Cut, Mode};
use crate::linalg;
use crate::par::{self, Execution};
use crate::rowsystem::QRowSystem;
use crate::scalar::{dot, rational_from_u64_fraction, Rational, Scalar};
use crate::simplex::{self, LpModel, LpStatus};

use super::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveRecord {
    pub c: Vec<f64>,
    pub z_ip_mip: f64,
    pub z_cut_mip: f64,
    pub z_ip_binary: f64,
    pub z_cut_binary: f64,
    pub closure_mip: f64,
    pub closure_binary: f64,
    /// Cut bound equals the binary hull bound in exact arithmetic.
    pub binary_exact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapExperimentResult {
    pub num_objectives: usize,
    pub seed: u64,
    pub avg_gap_closed_mip: f64,
    pub avg_gap_closed_binary: f64,
    pub records: Vec<ObjectiveRecord>,
    /// Objectives redrawn because a hull bound was zero or unbounded.
    pub resampled: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct ExperimentOptions {
    pub execution: Execution,
    /// Half-width increments beyond the base window `[-3, 4]^q`.
    pub max_widenings: usize,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions {
            execution: Execution::default(),
            max_widenings: 10,
        }
    }
}

/// `c_j = (next_u64 >> 11) / 2^53`, exactly representable.
pub fn draw_objective(rng: &mut SplitMix64, n: usize) -> Vec<Rational> {
    (0..n)
        .map(|_| rational_from_u64_fraction(rng.next_u64() >> 11, 53))
        .collect()
}

pub fn gap_experiment(
    system: &QRowSystem<Rational>,
    cuts_mip: &[Cut<Rational>],
    cuts_binary: &[Cut<Rational>],
    num_objectives: usize,
    seed: u64,
) -> Result<GapExperimentResult, HarnessError> {
    gap_experiment_with(
        system,
        cuts_mip,
        cuts_binary,
        num_objectives,
        seed,
        &ExperimentOptions::default(),
    )
}

/// Per objective `c >= 0`: the LP bound is 0 at the apex, the hull bound
/// comes from integer enumeration (MIP) or the four term LPs (binary), and
/// the cut bound from the LP over the given cuts.
pub fn gap_experiment_with(
    system: &QRowSystem<Rational>,
    cuts_mip: &[Cut<Rational>],
    cuts_binary: &[Cut<Rational>],
    num_objectives: usize,
    seed: u64,
    opts: &ExperimentOptions,
) -> Result<GapExperimentResult, HarnessError> {
    let n = system.n();
    let mut rng = SplitMix64::seed_from_u64(seed);
    let objectives: Vec<Vec<Rational>> = (0..num_objectives)
        .map(|_| draw_objective(&mut rng, n))
        .collect();
    let lattice = LatticeVertices::new(system, opts.max_widenings);
    let run = |c: &Vec<Rational>| evaluate(system, cuts_mip, cuts_binary, &lattice, c);
    let mut records = Vec::with_capacity(num_objectives);
    let mut resampled = 0;
    for r in par::map(opts.execution, &objectives, run) {
        match r {
            Some(rec) => records.push(rec),
            None => {
                resampled += 1;
                let mut done = None;
                for _ in 0..100 {
                    let c = draw_objective(&mut rng, n);
                    if let Some(rec) = run(&c) {
                        done = Some(rec);
                        break;
                    }
                    resampled += 1;
                }
                records.push(done.ok_or(HarnessError::Resample(100))?);
                log::warn!("resampled an objective with a degenerate hull bound");
            }
        }
    }
    let avg = |f: fn(&ObjectiveRecord) -> f64| {
        if records.is_empty() {
            0.0
        } else {
            records.iter().map(f).sum::<f64>() / records.len() as f64
        }
    };
    Ok(GapExperimentResult {
        num_objectives,
        seed,
        avg_gap_closed_mip: avg(|r| r.closure_mip),
        avg_gap_closed_binary: avg(|r| r.closure_binary),
        records,
        resampled,
    })
}

fn evaluate(
    system: &QRowSystem<Rational>,
    cuts_mip: &[Cut<Rational>],
    cuts_binary: &[Cut<Rational>],
    lattice: &LatticeVertices,
    c: &[Rational],
) -> Option<ObjectiveRecord> {
    let zero = Rational::from_integer(0.into());
    let z_ip_mip = lattice.minimum(c)?;
    let z_ip_bin = binary_hull_bound(system, c)?;
    if z_ip_mip <= zero || z_ip_bin <= zero {
        return None;
    }
    let z_cut_mip = cut_bound(c, cuts_mip)?;
    let z_cut_bin = cut_bound(c, cuts_binary)?;
    let pct = |z: &Rational, ip: &Rational| (z.clone() / ip.clone()).as_f64() * 100.0;
    Some(ObjectiveRecord {
        c: c.iter().map(|v| v.as_f64()).collect(),
        z_ip_mip: z_ip_mip.as_f64(),
        z_cut_mip: z_cut_mip.as_f64(),
        z_ip_binary: z_ip_bin.as_f64(),
        z_cut_binary: z_cut_bin.as_f64(),
        closure_mip: pct(&z_cut_mip, &z_ip_mip),
        closure_binary: pct(&z_cut_bin, &z_ip_bin),
        binary_exact: z_cut_bin == z_ip_bin,
    })
}

/// `min c s` subject to `alpha s >= 1` for every cut, `s >= 0`.
fn cut_bound(c: &[Rational], cuts: &[Cut<Rational>]) -> Option<Rational> {
    let mut model = LpModel::new(c.len());
    model.cost = c.to_vec();
    for cut in cuts {
        model.add_dense_row(&cut.alpha, Some(cut.rhs.clone()), None);
    }
    let sol = simplex::solve(&model);
    (sol.status == LpStatus::Optimal).then_some(sol.objective)
}

/// Minimum over the cube vertices of `min c s` with `f + R s` fixed there.
fn binary_hull_bound(system: &QRowSystem<Rational>, c: &[Rational]) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    for i in 0..num_terms(system.q()) {
        let sol = simplex::solve(&term_model(system, Mode::Binary, i, c));
        match sol.status {
            LpStatus::Optimal => {
                if best.as_ref().is_none_or(|b| sol.objective < *b) {
                    best = Some(sol.objective);
                }
            }
            LpStatus::Infeasible => {}
            _ => return None,
        }
    }
    best
}

/// Basic solutions of `R s = x - f`, `s >= 0`, for integer `x` in growing
/// windows. For `c >= 0` each per-point LP optimum is one of these.
struct LatticeVertices {
    /// `rings[w]`: sparse vertices `(column, value)` for points first
    /// covered by the window `[-3 - w, 4 + w]^q`.
    rings: Vec<Vec<Vec<(usize, Rational)>>>,
}

impl LatticeVertices {
    fn new(system: &QRowSystem<Rational>, max_widenings: usize) -> Self {
        let q = system.q();
        let n = system.n();
        let bases: Vec<(Vec<usize>, Vec<Vec<Rational>>)> = combinations(n, q)
            .into_iter()
            .filter_map(|cols| {
                let b: Vec<Vec<Rational>> = (0..q)
                    .map(|k| cols.iter().map(|&j| system.rays[k][j].clone()).collect())
                    .collect();
                linalg::inverse(&b).map(|inv| (cols, inv))
            })
            .collect();
        let rings = (0..=max_widenings)
            .map(|w| {
                let (lo, hi) = (-3 - w as i64, 4 + w as i64);
                let mut out = Vec::new();
                for x in lattice_box(q, lo, hi) {
                    if w > 0 && x.iter().all(|&v| v > lo && v < hi) {
                        continue;
                    }
                    let rhs: Vec<Rational> = x
                        .iter()
                        .zip(&system.f)
                        .map(|(&v, f)| Rational::of_i64(v) - f.clone())
                        .collect();
                    for (cols, inv) in &bases {
                        let s: Vec<Rational> = inv.iter().map(|row| dot(row, &rhs)).collect();
                        if s.iter().all(|v| *v >= Rational::of_i64(0)) {
                            out.push(cols.iter().cloned().zip(s).collect());
                        }
                    }
                }
                out
            })
            .collect();
        LatticeVertices { rings }
    }

    /// Window minimum, widened until unchanged over two widenings.
    fn minimum(&self, c: &[Rational]) -> Option<Rational> {
        let mut best: Option<Rational> = None;
        let mut stable = 0;
        for (w, ring) in self.rings.iter().enumerate() {
            let before = best.clone();
            for v in ring {
                let z = v.iter().fold(Rational::of_i64(0), |acc, (j, s)| {
                    acc + c[*j].clone() * s.clone()
                });
                if best.as_ref().is_none_or(|b| z < *b) {
                    best = Some(z);
                }
            }
            if w > 0 && best.is_some() && best == before {
                stable += 1;
                if stable == 2 {
                    return best;
                }
            } else {
                stable = 0;
            }
        }
        log::warn!("integer hull bound did not stabilize within the window");
        best
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn lattice_box(q: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..q {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (lo..=hi).map(move |v| {
                    let mut p = p.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}
