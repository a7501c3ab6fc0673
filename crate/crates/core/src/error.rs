use thiserror::Error;

/// Failures raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("velocity is not unit timelike: u·u = {norm}")]
    NotUnitTimelike { norm: f64 },

    #[error("velocity is past-directed: u0 = {u0}")]
    PastDirected { u0: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("proper time {tau} outside worldline domain [{lo}, {hi}]")]
    OutsideDomain { tau: f64, lo: f64, hi: f64 },

    #[error("kinematic chain violated at tau = {tau}: {relation} residual {residual:e} exceeds {tolerance:e}")]
    KinematicChain {
        tau: f64,
        relation: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("field point lies on the worldline (r = {r:e})")]
    OnWorldline { r: f64 },

    #[error("no retarded solution: {0}")]
    NoRetardedSolution(String),

    #[error("retarded-time solver failed to converge after {iterations} iterations (residual {residual:e})")]
    RootNonConvergence { iterations: usize, residual: f64 },

    #[error("finite-difference step {h:e} too large for retarded distance {r:e}")]
    StepTooLarge { h: f64, r: f64 },

    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("insufficient quadrature nodes: achieved error {achieved:e} exceeds {tolerance:e}")]
    InsufficientNodes { achieved: f64, tolerance: f64 },

    #[error("integrator step size collapsed to {h:e} at tau = {tau}")]
    StepSizeCollapse { tau: f64, h: f64 },

    #[error("integrator exceeded {steps} steps before tau = {tau_end}")]
    StepLimit { steps: usize, tau_end: f64 },

    #[error("constraint drift {drift:e} exceeds bound {bound:e} at tau = {tau}")]
    ConstraintDrift { tau: f64, drift: f64, bound: f64 },

    #[error("power-law fit is ill-conditioned (condition number {condition:e})")]
    IllConditionedFit { condition: f64 },
}

impl Error {
    /// True for failures of an iterative procedure to reach its tolerance
    /// (root solving, adaptive quadrature, time stepping).
    pub fn is_convergence_failure(&self) -> bool {
        matches!(
            self,
            Error::RootNonConvergence { .. }
                | Error::QuadratureNonConvergence(_)
                | Error::InsufficientNodes { .. }
                | Error::StepSizeCollapse { .. }
                | Error::StepLimit { .. }
                | Error::ConstraintDrift { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
