//! Fixed-precision p-adic arithmetic, truncated power series and formal
//! group laws.

pub mod document;
pub mod error;
pub mod ext;
pub mod formal;
pub mod modring;
pub mod padic;
pub mod report;
pub mod series;
pub mod torsion;

pub use document::{emit_series, parse_series, SeriesDocument};
pub use error::{Error, Result};
pub use ext::{cyclotomic_ring, ExtElem, ExtRing, RingKind};
pub use formal::{
    check_endomorphism, check_homomorphism, conjugate_group, decompose_commuting, formal_log,
    is_stable, lt_solve, solve_commutant, Endomorphism, FormalGroup, FormalLog, Height,
    PrecisionBudget, Provenance, Stability, Verdict,
};
pub use padic::{PAdicNum, PrimeConfig, Valuation};
pub use report::Report;
pub use series::{hensel_lift, Evaluation, TruncatedSeries, WeierstrassFactors};
pub use torsion::{
    is_torsion, iterate, iterate_at, rigidity_witness, shared_torsion_demo, theorem_a_witness,
    TorsionCertificate, TorsionVerdict,
};
