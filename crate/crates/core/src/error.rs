use thiserror::Error;

/// Every failure the library reports. Variants carry enough context for the
/// CLI to print a useful diagnostic and pick an exit code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a fundamental discriminant of an imaginary quadratic field")]
    InvalidDiscriminant(i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("ramified extensions with residue characteristic 2 are not supported")]
    RamifiedTwo,
    #[error("the unit lattice <1> is not defined over a ramified extension")]
    RamifiedUnsupported,
    #[error("local contexts differ: {0}")]
    ContextMismatch(String),
    #[error("matrix is not Hermitian: {0}")]
    NotHermitian(String),
    #[error("matrix is not in Herm*: {0}")]
    NotIntegral(String),
    #[error("matrix is singular")]
    Singular,
    #[error("enumeration budget exceeded: {needed} operations needed, cap is {cap}")]
    BudgetExceeded { needed: String, cap: u64 },
    #[error("normalized counts did not stabilize by k = {k_max}: {previous} (k = {}) vs {last} (k = {k_max})", k_max - 1)]
    NotStabilized {
        k_max: u32,
        previous: String,
        last: String,
    },
    #[error("no polynomial of degree <= {0} passed certification")]
    DegreeCapExceeded(usize),
    #[error("denominator vanishes at the requested point")]
    DenominatorVanishes,
    #[error("value at s = {0} is not a rational multiple of a square root")]
    IrrationalPoint(String),
    #[error("the Riemann zeta function has a pole at s = 1")]
    PoleAtOne,
    #[error("pole encountered: {0}")]
    PoleEncountered(String),
    #[error("Weil index not covered by the known cases: {0}")]
    WeilIndexUncovered(String),
    #[error("modulus p^k = {0}^{1} exceeds 2^31")]
    ModulusTooLarge(u64, u32),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Errors that mean "the computation hit a configured limit" as opposed to bad input.
    pub fn is_computational_limit(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. }
                | Error::NotStabilized { .. }
                | Error::DegreeCapExceeded(_)
                | Error::ModulusTooLarge(..)
        )
    }
}
