//! Hypothesis checks on a limit operator, the a-priori estimate relating an
//! operator to its limit, and convergence experiments over a schedule of
//! family members.

mod apriori;
mod experiment;
mod hypotheses;

pub use apriori::{apriori_bound, AprioriReport};
pub use experiment::{
    run_korovkin_experiment, series_verdict, tabulate_convergence, weyl_experiment, ConvergenceReport, Series,
    SeriesRole, Tolerances, NOISE_FLOOR,
};
pub use hypotheses::{
    check_hypotheses, probe_functional_equation, HypothesisForm, HypothesisReport, PositivityCheck, ResidualCheck,
};
