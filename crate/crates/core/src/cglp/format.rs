//! Cut serialization and the canonical multiplier choice for enumerated
//! facets.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use super::{normalization_values, Cut, Multipliers};
use crate::octahedron::ParametricBody;
use crate::rowsystem::QRowSystem;
use crate::scalar::{fmt_value, fmt_vector, Rational, Scalar};

/// `alpha_1 ... alpha_n >= 1 ; v=(...), w=(...) ; LABEL`
pub fn format_cut<T: Scalar>(cut: &Cut<T>) -> String {
    let mult = cut
        .multipliers
        .as_ref()
        .map(format_multipliers)
        .unwrap_or_else(|| "-".to_string());
    let label = cut
        .config
        .as_ref()
        .map(|c| c.label.to_string())
        .unwrap_or_else(|| "-".to_string());
    format!(
        "{} >= {} ; {} ; {}",
        fmt_vector(&cut.alpha),
        fmt_value(&cut.rhs),
        mult,
        label
    )
}

pub fn format_multipliers<T: Scalar>(m: &Multipliers<T>) -> String {
    let tuple = |v: Vec<T>| {
        format!(
            "({})",
            v.iter().map(fmt_value).collect::<Vec<_>>().join(", ")
        )
    };
    if m.q() == 2 {
        format!("v={}, w={}", tuple(m.v()), tuple(m.w()))
    } else {
        let rows: Vec<String> = (0..m.q())
            .map(|k| {
                format!(
                    "u{}={}",
                    k + 1,
                    tuple(m.u.iter().map(|r| r[k].clone()).collect())
                )
            })
            .collect();
        rows.join(", ")
    }
}

/// Among the multiplier vertices of one facet, prefers the largest body
/// (fewest supporting lines), then all normalizations tight, then the most
/// zero weights, then the lexicographically smallest weights.
pub(crate) fn canonical_multipliers(
    system: &QRowSystem<Rational>,
    all: Vec<Multipliers<Rational>>,
) -> Multipliers<Rational> {
    let key = |m: &Multipliers<Rational>| {
        let lines = ParametricBody::from_multipliers(m)
            .geometry()
            .map(|g| g.lines.len())
            .unwrap_or(0);
        let loose = normalization_values(&system.f, m)
            .iter()
            .filter(|g| !g.is_one())
            .count();
        let nonzero = m.u.iter().flatten().filter(|x| !x.is_zero()).count();
        (lines, loose, nonzero)
    };
    all.into_iter()
        .map(|m| (key(&m), m))
        .min_by(|(ka, a), (kb, b)| {
            ka.cmp(kb)
                .then_with(|| a.u.partial_cmp(&b.u).unwrap_or(Ordering::Equal))
        })
        .map(|(_, m)| m)
        .expect("at least one vertex per facet")
}

pub(crate) fn cut_order(a: &Cut<Rational>, b: &Cut<Rational>) -> Ordering {
    a.alpha.partial_cmp(&b.alpha).unwrap_or(Ordering::Equal)
}
