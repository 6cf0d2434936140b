use thiserror::Error;

/// Errors surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rectangle: {0}")]
    InvalidRect(String),

    #[error("rectangle {rect} does not lie in cone {cone}")]
    RectOutsideCone { rect: String, cone: String },

    #[error("epsilon {eps} too large for gluing: need 0 < eps < d(0,A)/sqrt(2) = {limit}")]
    EpsTooLarge { eps: f64, limit: f64 },

    #[error("measures disagree on the interior cone: max rectangle discrepancy {defect}")]
    InconsistentMeasures { defect: f64 },

    #[error("no catalog entry for model {model} on cone {cone}")]
    CatalogMiss { model: String, cone: String },

    #[error("integral did not converge: {0}")]
    DivergentIntegral(String),

    #[error("conditional law normalizer is {0}; need a finite positive value")]
    BadNormalizer(f64),

    #[error("angular measure fails the normalization identity (defect {defect})")]
    UnnormalizedAngular { defect: f64 },

    #[error("angular measure has infinite total mass: {0}")]
    InfiniteAngularMeasure(String),

    #[error("distribution has atoms in its upper tail; standardizer requires a continuous tail")]
    AtomsInTail,

    #[error("psi classification failed: {0}")]
    ClassificationFailure(String),

    #[error("norming ratio did not converge to a limit in [0,inf]")]
    NonConvergentRatio,

    #[error("(psi1, psi2) = (1, 0): no marginal standardizing function exists for a product limit")]
    ProductObstruction,

    #[error("no strictly monotone asymptotic equivalent found: {0}")]
    NotMonotoneEquivalent(String),

    #[error("k = {k} out of range for n = {n}: need 10 <= k <= n/10")]
    KOutOfRange { k: usize, n: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
