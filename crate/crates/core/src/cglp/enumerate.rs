//! Exact enumeration of disjunctive-hull facets through the feasible bases
//! of the CGLP.
//!
//! The CGLP polyhedron `G y >= h` is relaxed lexicographically
//! (`h_i - eps^{pi(i)}`) so that every feasible basis is nondegenerate and
//! the basis graph can be walked by single pivots. The starting basis is
//! placed last in the order `pi`, which makes it lexicographically feasible.

use std::collections::{HashMap, HashSet, VecDeque};

use num_traits::{One, Signed, Zero};

use super::{build_cglp, cglp_model, CglpError, CglpSystem, Cut, CutSource, Mode, Multipliers};
use crate::par::{self, Execution};
use crate::rowsystem::QRowSystem;
use crate::scalar::{dot, Rational};
use crate::simplex::{self, LpModel, LpStatus};

#[derive(Debug, Clone, Copy)]
pub struct FacetOptions {
    pub n_max: usize,
    pub max_bases: usize,
    pub execution: Execution,
}

impl Default for FacetOptions {
    fn default() -> Self {
        FacetOptions {
            n_max: 12,
            max_bases: 5_000_000,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    pub bases: usize,
    pub candidates: usize,
    pub facets: usize,
}

/// All facets `alpha s >= 1` of the disjunctive hull with their CGLP
/// multipliers.
pub fn enumerate_facets(
    system: &QRowSystem<Rational>,
    mode: Mode,
) -> Result<Vec<Cut<Rational>>, CglpError> {
    enumerate_facets_with(system, mode, &FacetOptions::default()).map(|(c, _)| c)
}

pub fn enumerate_facets_with(
    system: &QRowSystem<Rational>,
    mode: Mode,
    opts: &FacetOptions,
) -> Result<(Vec<Cut<Rational>>, EnumerationStats), CglpError> {
    if system.q() != 2 {
        return Err(CglpError::SizeLimit(format!(
            "facet enumeration needs q = 2, got {}",
            system.q()
        )));
    }
    if system.n() > opts.n_max {
        return Err(CglpError::SizeLimit(format!(
            "n = {} exceeds {}",
            system.n(),
            opts.n_max
        )));
    }
    let cg = build_cglp(system, mode)?;
    let (vertices, bases) = walk_bases(&cg, opts.max_bases)?;
    let mut stats = EnumerationStats {
        bases,
        candidates: vertices.len(),
        facets: 0,
    };
    let candidates: Vec<(Vec<Rational>, Vec<Multipliers<Rational>>)> =
        vertices.into_iter().collect();
    let alphas: Vec<Vec<Rational>> = candidates.iter().map(|(a, _)| a.clone()).collect();
    let keep = par::map(
        opts.execution,
        &(0..alphas.len()).collect::<Vec<_>>(),
        |&c| {
            !is_redundant(
                &alphas[c],
                alphas
                    .iter()
                    .enumerate()
                    .filter(|(d, _)| *d != c)
                    .map(|(_, a)| a),
            )
        },
    );
    let mut cuts: Vec<Cut<Rational>> = candidates
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|((alpha, ms), _)| {
            let m = super::format::canonical_multipliers(system, ms);
            let mut cut = Cut::new(alpha, CutSource::Cglp).with_multipliers(m.clone());
            cut.config = Some(crate::octahedron::classify(&m));
            cut
        })
        .collect();
    cuts.sort_by(super::format::cut_order);
    stats.facets = cuts.len();
    Ok((cuts, stats))
}

/// True iff `alpha s >= 1` is implied by `others` together with `s >= 0`.
///
/// Solved through the dual `max 1 y` s.t. `sum_d y_d alpha_d <= alpha`,
/// `y >= 0`, whose basis has only `n` rows.
pub fn is_redundant<'a, I>(alpha: &[Rational], others: I) -> bool
where
    I: Iterator<Item = &'a Vec<Rational>>,
{
    let others: Vec<&Vec<Rational>> = others.collect();
    let mut model = LpModel::new(others.len());
    model.cost = vec![-Rational::one(); others.len()];
    for (j, a) in alpha.iter().enumerate() {
        let coeffs = others
            .iter()
            .enumerate()
            .filter(|(_, o)| !o[j].is_zero())
            .map(|(d, o)| (d, o[j].clone()))
            .collect();
        model.add_row(coeffs, None, Some(a.clone()));
    }
    let sol = simplex::solve(&model);
    match sol.status {
        LpStatus::Optimal => -sol.objective >= Rational::one(),
        LpStatus::Unbounded => true,
        _ => false,
    }
}

struct Node {
    basis: Vec<usize>,
    /// `inv[r][c]`: inverse of the basis matrix, column `c` for position `c`.
    inv: Vec<Vec<Rational>>,
    y: Vec<Rational>,
}

type VertexMap = HashMap<Vec<Rational>, Vec<Multipliers<Rational>>>;

fn mask(basis: &[usize]) -> u128 {
    basis.iter().fold(0u128, |m, &r| m | (1u128 << r))
}

fn walk_bases(
    cg: &CglpSystem<Rational>,
    max_bases: usize,
) -> Result<(VertexMap, usize), CglpError> {
    let d = cg.num_vars();
    let rows = cg.g.len();
    if rows > 128 {
        return Err(CglpError::SizeLimit(format!("{} CGLP rows", rows)));
    }
    let start = initial_vertex(cg)?;

    // Lexicographic rank of each row: rows outside the start basis first.
    let in_start: HashSet<usize> = start.basis.iter().copied().collect();
    let mut order: Vec<usize> = (0..rows).filter(|r| !in_start.contains(r)).collect();
    order.extend(start.basis.iter().copied());
    let mut rank = vec![0usize; rows];
    for (pos, &r) in order.iter().enumerate() {
        rank[r] = pos;
    }

    let mut vertices: VertexMap = HashMap::new();
    let mut seen_u: HashSet<Vec<Rational>> = HashSet::new();
    let mut seen: HashSet<u128> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(mask(&start.basis));
    queue.push_back(start);
    let mut count = 0usize;

    while let Some(node) = queue.pop_front() {
        count += 1;
        if count > max_bases {
            return Err(CglpError::SizeLimit(format!(
                "more than {} bases",
                max_bases
            )));
        }
        if seen_u.insert(node.y.clone()) {
            let (alpha, m) = cg.split(&node.y);
            vertices.entry(alpha).or_default().push(m);
        }
        let slack: Vec<Rational> = (0..rows)
            .map(|i| dot(&cg.g[i], &node.y) - cg.h[i].clone())
            .collect();
        let in_basis: HashSet<usize> = node.basis.iter().copied().collect();
        // images[i][c] = G_i inv[:, c]
        let images: Vec<Vec<Rational>> = (0..rows)
            .map(|i| {
                if in_basis.contains(&i) {
                    return Vec::new();
                }
                (0..d)
                    .map(|c| {
                        cg.g[i]
                            .iter()
                            .zip(&node.inv)
                            .filter(|(a, _)| !a.is_zero())
                            .fold(Rational::zero(), |acc, (a, r)| acc + a * &r[c])
                    })
                    .collect()
            })
            .collect();
        for c in 0..d {
            let dir: Vec<Rational> = (0..d).map(|r| node.inv[r][c].clone()).collect();
            // Minimum ratio over rows whose slack decreases along `dir`.
            let mut best: Vec<(usize, Rational, Rational)> = Vec::new();
            for i in 0..rows {
                if in_basis.contains(&i) {
                    continue;
                }
                let rate = images[i][c].clone();
                if !rate.is_negative() {
                    continue;
                }
                let ratio = slack[i].clone() / (-rate.clone());
                match best.first() {
                    None => best.push((i, ratio, rate)),
                    Some((_, b, _)) => {
                        if ratio < *b {
                            best.clear();
                            best.push((i, ratio, rate));
                        } else if ratio == *b {
                            best.push((i, ratio, rate));
                        }
                    }
                }
            }
            if best.is_empty() {
                continue; // extreme ray
            }
            let (enter, theta, _) = if best.len() == 1 {
                best.pop().expect("one candidate")
            } else {
                lex_min(&node, &images, best, &rank)
            };
            let mut basis = node.basis.clone();
            basis[c] = enter;
            let key = mask(&basis);
            if !seen.insert(key) {
                continue;
            }
            let inv = pivot_inverse(&node.inv, &images[enter], c);
            let y: Vec<Rational> = node
                .y
                .iter()
                .zip(&dir)
                .map(|(a, b)| a.clone() + theta.clone() * b.clone())
                .collect();
            queue.push_back(Node { basis, inv, y });
        }
    }
    Ok((vertices, count))
}

/// Replaces basis position `c` by a row whose image is `w = G_i inv`.
fn pivot_inverse(inv: &[Vec<Rational>], w: &[Rational], c: usize) -> Vec<Vec<Rational>> {
    let d = inv.len();
    let wc = w[c].clone();
    let mut out = inv.to_vec();
    for r in 0..d {
        let mc = inv[r][c].clone() / wc.clone();
        for k in 0..d {
            if k == c {
                out[r][k] = mc.clone();
            } else if !w[k].is_zero() {
                out[r][k] = inv[r][k].clone() - mc.clone() * w[k].clone();
            }
        }
    }
    out
}

/// Breaks a ratio tie by comparing the perturbation coefficients of the
/// candidate slacks in rank order.
fn lex_min(
    node: &Node,
    images: &[Vec<Rational>],
    cands: Vec<(usize, Rational, Rational)>,
    rank: &[usize],
) -> (usize, Rational, Rational) {
    let d = node.basis.len();
    // Each candidate's scaled coefficient vector, keyed by rank.
    let keyed: Vec<(Vec<(usize, Rational)>, (usize, Rational, Rational))> = cands
        .into_iter()
        .map(|(i, ratio, rate)| {
            let w = &images[i];
            let scale = -rate.clone();
            let mut coeffs: Vec<(usize, Rational)> = (0..d)
                .filter(|&k| !w[k].is_zero())
                .map(|k| (rank[node.basis[k]], -w[k].clone() / scale.clone()))
                .collect();
            coeffs.push((rank[i], Rational::one() / scale));
            coeffs.sort_by_key(|(r, _)| *r);
            (coeffs, (i, ratio, rate))
        })
        .collect();
    let dense = |v: &[(usize, Rational)], upto: usize| -> Vec<Rational> {
        let mut out = vec![Rational::zero(); upto];
        for (r, x) in v {
            out[*r] = x.clone();
        }
        out
    };
    let n_rows = rank.len();
    keyed
        .into_iter()
        .map(|(k, c)| (dense(&k, n_rows), c))
        .min_by(|a, b| a.0.partial_cmp(&b.0).expect("rationals are ordered"))
        .map(|(_, c)| c)
        .expect("nonempty candidates")
}

/// A vertex of the CGLP with a basis of tight, independent rows.
fn initial_vertex(cg: &CglpSystem<Rational>) -> Result<Node, CglpError> {
    let d = cg.num_vars();
    let p = vec![Rational::one(); cg.n];
    let model = cglp_model(cg, &p);
    let sol = simplex::solve(&model);
    if sol.status != LpStatus::Optimal {
        return Err(CglpError::Lp(sol.status));
    }
    let y = sol.x;
    // Greedily select independent tight rows.
    let mut basis: Vec<usize> = Vec::new();
    let mut reduced: Vec<Vec<Rational>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for i in 0..cg.g.len() {
        if dot(&cg.g[i], &y) != cg.h[i] {
            continue;
        }
        let mut v = cg.g[i].clone();
        for (row, &pc) in reduced.iter().zip(&pivots) {
            if v[pc].is_zero() {
                continue;
            }
            let l = v[pc].clone() / row[pc].clone();
            for k in 0..d {
                v[k] = v[k].clone() - l.clone() * row[k].clone();
            }
        }
        if let Some(pc) = (0..d).find(|&k| !v[k].is_zero()) {
            reduced.push(v);
            pivots.push(pc);
            basis.push(i);
            if basis.len() == d {
                break;
            }
        }
    }
    if basis.len() < d {
        return Err(CglpError::SizeLimit(
            "CGLP polyhedron is not pointed".into(),
        ));
    }
    let gb: Vec<Vec<Rational>> = basis.iter().map(|&i| cg.g[i].clone()).collect();
    let inv = crate::linalg::inverse(&gb)
        .ok_or_else(|| CglpError::SizeLimit("singular start basis".into()))?;
    Ok(Node { basis, inv, y })
}
