use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Every failure the numerical pipeline can report.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Sector or matrix is larger than the configured cap.
    Sizing {
        what: &'static str,
        dimension: u128,
        cap: usize,
    },
    /// An argument lies outside the domain of the operation.
    Domain(&'static str),
    /// A Fock state does not belong to the sector it was ranked against.
    Membership {
        expected_sites: usize,
        expected_total: u32,
        sites: usize,
        total: u64,
    },
    /// Ordinal outside `0..dim`.
    Range { index: usize, dim: usize },
    /// Vector length does not match the operator or sector dimension.
    Dimension { expected: usize, found: usize },
    /// Hamiltonian specification inconsistent with the sector.
    Spec(&'static str),
    /// Site index outside `0..L`.
    Site { site: usize, sites: usize },
    /// Initial state is not normalized.
    Unnormalized { norm: f64 },
    /// Iterative method stopped before reaching its tolerance.
    Convergence { residual: f64, tolerance: f64 },
    /// `<b_i^† b_j>` has a non-negligible imaginary part where a real value was requested.
    ComplexCorrelation { imaginary: f64 },
    /// Empty or otherwise unusable input data.
    Input(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Sizing {
                what,
                dimension,
                cap,
            } => write!(f, "{what} dimension {dimension} exceeds cap {cap}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Membership {
                expected_sites,
                expected_total,
                sites,
                total,
            } => write!(
                f,
                "state with {sites} sites and {total} phonons is not in the sector \
                 (L = {expected_sites}, N = {expected_total})"
            ),
            Error::Range { index, dim } => {
                write!(f, "ordinal {index} out of range for dimension {dim}")
            }
            Error::Dimension { expected, found } => {
                write!(f, "vector length {found} does not match dimension {expected}")
            }
            Error::Spec(msg) => write!(f, "invalid Hamiltonian spec: {msg}"),
            Error::Site { site, sites } => {
                write!(f, "site index {site} out of range for a chain of {sites} sites")
            }
            Error::Unnormalized { norm } => {
                write!(f, "initial state is not normalized (norm = {norm})")
            }
            Error::Convergence {
                residual,
                tolerance,
            } => write!(
                f,
                "iteration did not converge: residual {residual:e} above tolerance {tolerance:e}"
            ),
            Error::ComplexCorrelation { imaginary } => write!(
                f,
                "correlation has imaginary part {imaginary:e}; use the complex variant"
            ),
            Error::Input(msg) => write!(f, "input error: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
