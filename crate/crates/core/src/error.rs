use thiserror::Error;

/// Errors surfaced by the numerical kernels and the CLI front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("potential evaluation produced a non-finite value at r = {r}")]
    Evaluation { r: f64 },

    #[error("V'(r) changes sign more than once on (0, {r_max}]; support is not a single ring")]
    AmbiguousEdge { r_max: f64 },

    #[error("no bracket for the outer edge within ({lo:.6e}, {hi:.6e}]; raise r_max_hint")]
    Bracket { lo: f64, hi: f64 },

    #[error("degenerate edge curvature {value:.3e} at r = {r:.6}; multi-critical edges are unsupported")]
    DegenerateEdge { r: f64, value: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("adaptive quadrature did not converge on [{lo:.6e}, {hi:.6e}]")]
    Quadrature { lo: f64, hi: f64 },

    #[error("N = {n} is too small for the slowly varying scaling (|argument| = {arg:.3e})")]
    SmallN { n: u64, arg: f64 },

    #[error("inadmissible potential: {0}")]
    Inadmissible(String),

    #[error("cannot parse potential spec '{0}'; expected gauss | cubic:<c> | quadlin:<s> | halfquadlin:<s> | poly:<c1>,<c2>,...")]
    PotentialSpec(String),

    #[error("bad input: {0}")]
    BadInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code: 2 for bad input / inadmissible potentials, 3 for
    /// runtime numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Inadmissible(_) | Error::PotentialSpec(_) | Error::BadInput(_) => 2,
            _ => 3,
        }
    }
}
