//! Dirichlet solves by the method of fundamental solutions, boundary data,
//! and the harmonic function representations shared by the pipeline.

mod data;
mod harmonic;
mod mfs;
mod verify;

pub use data::{bimodal_data, free_run, sine_data, unimodal_data, unimodal_on_free_run, BoundaryData, Trace};
pub use harmonic::{eval, eval_grad, ChargeExpansion, ClosedForm, Harmonic, HarmonicFunction};
pub use mfs::{layout, singular_knots, solve_dirichlet, solve_on_layout, Layout, Node, Solution, SolveReport, SolveStatus, SolverConfig};
pub use verify::{gradient_fd_error, verify_no_interior_critical_points, InteriorCriticalReport, INTERIOR_MARGIN};
