use thiserror::Error;

/// Every failure mode surfaced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("a branch factor vanishes at contour node {node}")]
    BranchCutOnContour { node: usize },
    #[error("phase step {jump:.3} rad at node {node} is too coarse; increase the node count")]
    Resolution { node: usize, jump: f64 },
    #[error("did not converge: {0}")]
    NoConvergence(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("point {0} lies outside the validity disc")]
    OutOfDomain(String),
    #[error("contour geometry: {0}")]
    Geometry(String),
    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),
    #[error("metric is not real: imaginary residual {0:.3e}")]
    NotReal(f64),
    #[error("point lies on a cut: {0}")]
    OnCut(String),
    #[error("branch error: {0}")]
    Branch(String),
    #[error("grid touches the axis y = 0")]
    Axis,
    #[error("metric is near singular (condition number {0:.3e})")]
    NearSingularMetric(f64),
    #[error("c = {0} is not a Kähler parameter (needs c < 0)")]
    NotKahler(f64),
    #[error("least-squares fit failed: {0}")]
    NoFit(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
