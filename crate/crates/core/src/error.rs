use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coordinate y = {0} outside [0, 1]")]
    Domain(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("profile error: {0}")]
    Profile(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("eigensolver failure: {msg} (pencil size {size}, ||A||_F = {norm_a:.3e}, ||M||_F = {norm_m:.3e})")]
    Eigensolver {
        msg: String,
        size: usize,
        norm_a: f64,
        norm_m: f64,
    },

    #[error("inverse iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    Continuation { iterations: usize, residual: f64 },

    #[error("continuation lost the branch at alpha = {alpha}, nu = {nu} after {halvings} step halvings")]
    BranchLost { alpha: f64, nu: f64, halvings: usize },

    #[error("resolvent requested at or near an eigenvalue: lambda = {re} + {im}i (pivot ratio {pivot_ratio:.3e})")]
    ResolventAtEigenvalue { re: f64, im: f64, pivot_ratio: f64 },

    #[error("characteristic roots coalesce: |mu_f - mu_s| = {gap:.3e}")]
    DegenerateRoots { gap: f64 },

    #[error("boundary Green function system is singular at x = {x}")]
    BoundarySolve { x: f64 },

    #[error("Green-function iteration does not contract (ratio {ratio:.3} for 3 steps)")]
    NoContraction { ratio: f64 },

    #[error("invalid bracket: Re(lambda) = {re_lo:.3e} at alpha = {alpha_lo}, {re_hi:.3e} at alpha = {alpha_hi}")]
    Bracket {
        alpha_lo: f64,
        alpha_hi: f64,
        re_lo: f64,
        re_hi: f64,
    },

    #[error("multiple neutral crossings in bracket: {crossings:?}")]
    Ambiguity { crossings: Vec<f64> },

    #[error("scaling fit needs >= 6 points over >= one decade (got {points} points, {decades:.2} decades)")]
    FitDomain { points: usize, decades: f64 },

    #[error("adjoint problem is degenerate: {0}")]
    AdjointDegenerate(String),

    #[error("c1 inconsistency: adjoint {adjoint} vs finite difference {fd} (relative {rel:.3e})")]
    Inconsistency { adjoint: String, fd: String, rel: f64 },

    #[error("near-resonant solve (condition estimate {cond:.3e})")]
    Resonance { cond: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("time step {dt} too large (limit {limit})")]
    Stability { dt: f64, limit: f64 },

    #[error("degenerate normal form: {0}")]
    Degenerate(String),

    #[error("roll reconstruction impossible: {0}")]
    Reconstruction(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
