use std::time::Instant;

use crate::cglp::{Cut, Mode};
use crate::instance::{Instance, RoundReport};
use crate::par::{self, Execution};
use crate::rowsystem::{QRowSystem, FRAC_TOL};
use crate::shapes::{cones, shape_cut, triangles, FixedShape};
use crate::simplex::{self, extract_rows, Displacement, LpModel, LpSolution, LpStatus, TableauRow};
use crate::strengthen::{gmi_cut, strengthen_cone, strengthen_standard_cut};

use super::HarnessError;

/// Cuts with slack above this at a round optimum are deleted.
pub const CUT_TIGHT_TOL: f64 = 1e-6;
/// Allowed violation of a cut by a known integer solution.
pub const VALIDITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CutFamily {
    Gmi,
    Triangle,
    Cone,
}

#[derive(Debug, Clone)]
pub struct RoundOptions {
    pub rounds: usize,
    pub gmi: bool,
    pub triangles: bool,
    pub cones: bool,
    pub strengthen: bool,
    /// `Binary` restricts rows to 0-1 basics and enables cones; `Mip` uses
    /// every integer basic and triangles only.
    pub mode: Mode,
    /// Integer solutions no cut may separate.
    pub known_solutions: Vec<Vec<f64>>,
    pub execution: Execution,
}

impl Default for RoundOptions {
    fn default() -> Self {
        RoundOptions {
            rounds: 5,
            gmi: true,
            triangles: false,
            cones: false,
            strengthen: false,
            mode: Mode::Binary,
            known_solutions: Vec::new(),
            execution: Execution::default(),
        }
    }
}

/// A cut `coeffs x >= rhs` on the structural variables.
#[derive(Debug, Clone, PartialEq)]
pub struct XCut {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
    pub family: CutFamily,
}

impl XCut {
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|(j, a)| a * x[*j]).sum::<f64>() - self.rhs
    }
}

#[derive(Debug, Clone)]
pub struct RoundDetail {
    pub round: usize,
    pub objective: f64,
    /// Optimum of the re-solved LP.
    pub x: Vec<f64>,
    /// Cut pool at the optimum, before deletion.
    pub pool: Vec<XCut>,
    pub deleted: usize,
}

#[derive(Debug, Clone)]
pub struct RoundsOutcome {
    pub z_lp: f64,
    pub z_ip: f64,
    pub reports: Vec<RoundReport>,
    pub details: Vec<RoundDetail>,
}

pub fn gap_closed_pct(z_lp: f64, z_ip: f64, z: f64) -> f64 {
    100.0 * (z - z_lp) / (z_ip - z_lp)
}

/// Runs the separation rounds and returns one report per round.
pub fn run_rounds(
    instance: &Instance,
    z_ip: f64,
    opts: &RoundOptions,
) -> Result<Vec<RoundReport>, HarnessError> {
    run_rounds_detailed(instance, z_ip, opts).map(|o| o.reports)
}

pub fn run_rounds_detailed(
    instance: &Instance,
    z_ip: f64,
    opts: &RoundOptions,
) -> Result<RoundsOutcome, HarnessError> {
    for s in &opts.known_solutions {
        if s.len() != instance.num_vars {
            return Err(HarnessError::SolutionShape {
                got: s.len(),
                want: instance.num_vars,
            });
        }
    }
    let base = instance.to_lp();
    let integral_rows = integral_logicals(instance);
    let mut pool: Vec<XCut> = Vec::new();
    let mut sol = solve(&base, &pool)?;
    let z_lp = sol.objective;
    if z_ip <= z_lp + 1e-9 {
        return Err(HarnessError::NoGap { z_lp, z_ip });
    }
    let mut reports = Vec::new();
    let mut details = Vec::new();
    for round in 1..=opts.rounds {
        let model = with_cuts(&base, &pool);
        let t0 = Instant::now();
        let cuts = generate(instance, &model, &sol, &integral_rows, opts)?;
        if round == 1 && cuts.is_empty() {
            return Err(HarnessError::NoFractional);
        }
        for cut in &cuts {
            for s in &opts.known_solutions {
                let v = cut.slack(s);
                if v < -VALIDITY_TOL {
                    return Err(HarnessError::ValidityBreach {
                        round,
                        family: cut.family,
                        violation: -v,
                    });
                }
            }
        }
        let t_generate = t0.elapsed().as_secs_f64();
        let added = cuts.len();
        pool.extend(cuts);

        let t1 = Instant::now();
        sol = solve(&base, &pool)?;
        let z = sol.objective;
        let pct = gap_closed_pct(z_lp, z_ip, z);
        if pct > 100.0 + 1e-6 {
            return Err(HarnessError::OverClosure { round, z, pct });
        }
        let before = pool.clone();
        let x = sol.x.clone();
        pool.retain(|c| c.slack(&x) <= CUT_TIGHT_TOL);
        let deleted = before.len() - pool.len();
        if deleted > 0 {
            // The next round reads its tableau from the pruned model.
            sol = solve(&base, &pool)?;
        }
        let t_resolve = t1.elapsed().as_secs_f64();
        log::info!(
            "{} round {}: z = {:.6}, gap closed {:.2}%, +{} -{}",
            instance.name,
            round,
            z,
            pct,
            added,
            deleted
        );
        reports.push(RoundReport {
            instance: instance.name.clone(),
            round,
            gap_closed_pct: pct.clamp(0.0, 100.0),
            cuts_added: added,
            cuts_deleted: deleted,
            t_generate,
            t_resolve,
        });
        details.push(RoundDetail {
            round,
            objective: z,
            x,
            pool: before,
            deleted,
        });
    }
    Ok(RoundsOutcome {
        z_lp,
        z_ip,
        reports,
        details,
    })
}

fn with_cuts(base: &LpModel<f64>, pool: &[XCut]) -> LpModel<f64> {
    let mut m = base.clone();
    for c in pool {
        m.add_row(c.coeffs.clone(), Some(c.rhs), None);
    }
    m
}

fn solve(base: &LpModel<f64>, pool: &[XCut]) -> Result<LpSolution<f64>, HarnessError> {
    let sol = simplex::solve(&with_cuts(base, pool));
    if sol.status != LpStatus::Optimal {
        return Err(HarnessError::Lp(sol.status));
    }
    Ok(sol)
}

fn is_whole(x: f64) -> bool {
    x.is_finite() && (x - x.round()).abs() <= 1e-9
}

/// Rows whose activity is integral at every integer point.
fn integral_logicals(instance: &Instance) -> Vec<bool> {
    instance
        .row_coefficients()
        .iter()
        .map(|row| {
            row.iter()
                .all(|(j, a)| instance.is_integer[*j] && is_whole(*a))
        })
        .collect()
}

/// Linear form of a displacement: `s = sign * value(var) - offset`.
struct Form {
    sign: f64,
    offset: f64,
    integer: bool,
    free: bool,
}

fn forms(
    model: &LpModel<f64>,
    disp: &[Displacement],
    integral_rows: &[bool],
    instance: &Instance,
) -> Vec<Form> {
    let n = model.num_cols;
    disp.iter()
        .map(|d| {
            let (lo, up, int) = if d.var < n {
                (
                    model.col_lower[d.var],
                    model.col_upper[d.var],
                    instance.is_integer[d.var],
                )
            } else {
                let i = d.var - n;
                let row = &model.rows[i];
                (
                    row.lower,
                    row.upper,
                    integral_rows.get(i).copied().unwrap_or(false),
                )
            };
            let free = lo.is_none() && up.is_none();
            let (sign, bound) = if d.reflected {
                (-1.0, if free { 0.0 } else { up.unwrap_or(0.0) })
            } else {
                (1.0, if free { 0.0 } else { lo.unwrap_or(0.0) })
            };
            Form {
                sign,
                offset: sign * bound,
                integer: int && !free && is_whole(bound),
                free,
            }
        })
        .collect()
}

/// `sum_d alpha_d s_d >= 1` rewritten over the structural variables.
fn to_x_space(
    model: &LpModel<f64>,
    disp: &[Displacement],
    forms: &[Form],
    alpha: &[f64],
    family: CutFamily,
) -> Option<XCut> {
    let n = model.num_cols;
    let mut dense = vec![0.0; n];
    let mut rhs = 1.0;
    for ((d, form), a) in disp.iter().zip(forms).zip(alpha) {
        if *a == 0.0 {
            continue;
        }
        let w = a * form.sign;
        if d.var < n {
            dense[d.var] += w;
        } else {
            for (j, c) in &model.rows[d.var - n].coeffs {
                dense[*j] += w * c;
            }
        }
        rhs += a * form.offset;
    }
    if !rhs.is_finite() || dense.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let coeffs: Vec<(usize, f64)> = dense
        .into_iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > 1e-12)
        .collect();
    if coeffs.is_empty() {
        return None;
    }
    Some(XCut {
        coeffs,
        rhs,
        family,
    })
}

/// Smallest face slack of `f` for a fixed shape to be used. Thinner slacks
/// give coefficients dominated by rounding error.
pub const SHAPE_SLACK_TOL: f64 = 1e-6;

fn inside(shape: &FixedShape, f: &[f64]) -> bool {
    shape.slacks(f).iter().all(|d| *d > SHAPE_SLACK_TOL)
}

fn fractional(x: f64) -> bool {
    let fr = x - x.floor();
    fr > FRAC_TOL && fr < 1.0 - FRAC_TOL
}

/// Two-row system allowing one integral row (`f_k = 0`). In binary mode a
/// basic at 1 is complemented so both basics keep their 0-1 domain.
fn pair_system(
    a: &TableauRow<f64>,
    b: &TableauRow<f64>,
    integer: &[bool],
    mode: Mode,
) -> QRowSystem<f64> {
    let split = |row: &TableauRow<f64>| {
        let mut fl = row.f.floor();
        let mut fr = row.f - fl;
        if fr >= 1.0 - FRAC_TOL {
            fl += 1.0;
            fr = 0.0;
        } else if fr <= FRAC_TOL {
            fr = 0.0;
        }
        if mode == Mode::Binary && fl == 1.0 && fr == 0.0 {
            return (0.0, 0, row.ray.iter().map(|v| -v).collect());
        }
        (fr, fl as i64, row.ray.clone())
    };
    let (fa, sa, ra) = split(a);
    let (fb, sb, rb) = split(b);
    QRowSystem {
        f: vec![fa, fb],
        rays: vec![ra, rb],
        integer: integer.to_vec(),
        shift: vec![sa, sb],
        columns: (0..integer.len()).collect(),
    }
}

fn generate(
    instance: &Instance,
    model: &LpModel<f64>,
    sol: &LpSolution<f64>,
    integral_rows: &[bool],
    opts: &RoundOptions,
) -> Result<Vec<XCut>, HarnessError> {
    let n = instance.num_vars;
    let eligible = |j: usize| {
        instance.is_integer[j]
            && (opts.mode == Mode::Mip || (instance.lower[j] == 0.0 && instance.upper[j] == 1.0))
    };
    let basics: Vec<usize> = (0..n)
        .filter(|&j| sol.var_status[j] == simplex::VarStatus::Basic && eligible(j))
        .collect();
    let disp = sol.displacements();
    let forms = forms(model, &disp, integral_rows, instance);
    let integer: Vec<bool> = forms.iter().map(|f| f.integer).collect();
    let rows: Vec<TableauRow<f64>> = extract_rows(sol, &basics)?
        .into_iter()
        .filter(|r| {
            r.ray
                .iter()
                .zip(&forms)
                .all(|(v, f)| !f.free || v.abs() <= 1e-12)
        })
        .collect();

    let mut out: Vec<XCut> = Vec::new();
    if opts.gmi {
        for row in rows.iter().filter(|r| fractional(r.f)) {
            if let Ok(cut) = gmi_cut(row, &integer) {
                out.extend(to_x_space(model, &disp, &forms, &cut.alpha, CutFamily::Gmi));
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..rows.len())
        .flat_map(|a| (a + 1..rows.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| fractional(rows[a].f) || fractional(rows[b].f))
        .collect();
    let use_cones = opts.cones && opts.mode == Mode::Binary;
    if opts.triangles || use_cones {
        let per_pair = par::map(opts.execution, &pairs, |&(a, b)| {
            let system = pair_system(&rows[a], &rows[b], &integer, opts.mode);
            let mut cuts: Vec<(Cut<f64>, CutFamily)> = Vec::new();
            if opts.triangles {
                for t in triangles()
                    .iter()
                    .filter(|t| t.contains_strictly(&system.f))
                {
                    let Ok(cut) = shape_cut(&system, t) else {
                        continue;
                    };
                    let cut = if opts.strengthen {
                        strengthen_standard_cut(&system, &cut)
                            .map(|(c, _)| c)
                            .unwrap_or(cut)
                    } else {
                        cut
                    };
                    cuts.push((cut, CutFamily::Triangle));
                }
            }
            if use_cones {
                for c in cones().iter().filter(|c| inside(c, &system.f)) {
                    let cut = if opts.strengthen {
                        strengthen_cone(&system, c).map(|(c, _)| c)
                    } else {
                        shape_cut(&system, c).map_err(Into::into)
                    };
                    if let Ok(cut) = cut {
                        cuts.push((cut, CutFamily::Cone));
                    }
                }
            }
            cuts
        });
        for (cut, family) in per_pair.into_iter().flatten() {
            out.extend(to_x_space(model, &disp, &forms, &cut.alpha, family));
        }
    }
    Ok(out)
}
