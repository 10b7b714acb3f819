//! Separation rounds on MIP instances and the random-objective gap
//! experiment on a fixed row system.

mod experiment;
mod rounds;

use thiserror::Error;

use crate::cglp::CglpError;
use crate::simplex::{LpError, LpStatus};

pub use experiment::{
    draw_objective, gap_experiment, gap_experiment_with, ExperimentOptions, GapExperimentResult,
    ObjectiveRecord,
};
pub use rounds::{
    gap_closed_pct, run_rounds, run_rounds_detailed, CutFamily, RoundDetail, RoundOptions,
    RoundsOutcome, XCut, CUT_TIGHT_TOL, SHAPE_SLACK_TOL, VALIDITY_TOL,
};

#[derive(Debug, Error, PartialEq)]
pub enum HarnessError {
    #[error("LP relaxation ended with status {0:?}")]
    Lp(LpStatus),
    #[error(transparent)]
    Tableau(#[from] LpError),
    #[error(transparent)]
    Cglp(#[from] CglpError),
    #[error("no fractional integer basic variable at the LP optimum")]
    NoFractional,
    #[error("integer optimum {z_ip} does not exceed the LP bound {z_lp}")]
    NoGap { z_lp: f64, z_ip: f64 },
    #[error("round {round}: {family:?} cut violated by a known solution by {violation:.3e}")]
    ValidityBreach {
        round: usize,
        family: CutFamily,
        violation: f64,
    },
    #[error("round {round}: bound {z} passes the integer optimum ({pct:.4}% closed)")]
    OverClosure { round: usize, z: f64, pct: f64 },
    #[error("known solution has {got} entries, instance has {want} variables")]
    SolutionShape { got: usize, want: usize },
    #[error("experiment subproblem has no optimum after {0} resamples")]
    Resample(usize),
}
