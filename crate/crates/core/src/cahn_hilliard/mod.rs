//! Linearized Cahn–Hilliard problem with dynamic boundary conditions on the
//! half-space: boundary symbols, sector sweeps, the explicit resolvent and the
//! semigroup it generates.

mod resolvent;
mod semigroup;
mod sweep;
mod symbols;

pub use resolvent::{
    ch_residuals, check_domain_regularity, regularity_bound_threshold, resolvent_decay_sweep, solve_resolvent,
    solve_resolvent_modal, ChProblem, ChResiduals, ChSolution, ChState, ChSweepRow, RegularityReport,
};
pub use semigroup::{contour_rule, semigroup_apply, ContourRule, ContourSpec, SemigroupResult};
pub use sweep::{
    arg_interval, verify_arg_sectors, verify_m_bounded, verify_root_bounds, ChSweep, SampleRecord, SweepPoint,
    SweepThresholds, SymbolSweepReport, Witness,
};
pub use symbols::{
    m_denominator_margin, m_heat, m_heat_unchecked, m_symbol, m_unchecked, s_heat_unchecked, s_symbol, s_unchecked,
    tau, tau_heat, tau_unchecked, ChConfig, Model,
};
