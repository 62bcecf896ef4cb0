//! Log-sparse integer set families, their sumsets, and the arithmetic
//! progressions those sumsets can hold.
//!
//! The crate is organised bottom-up:
//!
//! * [`sets`] holds the shared domain types ([`LogSparseSet`], [`SetFamily`],
//!   [`ArithmeticProgression`]) and the dyadic-window sparsity verifier.
//! * [`field`] implements GF(p) and GF(2^k) arithmetic.
//! * [`matching`] provides maximum bipartite matching with Hall-violation
//!   extraction and an exhaustive Hall audit.
//! * [`sumset`] enumerates bounded sumsets and answers membership queries.
//! * [`ap_search`] finds longest arithmetic progressions in finite sets.
//! * [`upper_bound`] carries the encoding argument that bounds progression
//!   length in an n-fold sumset of log-sparse sets.
//! * [`random`] and [`explicit`] build families whose sumsets cover a full
//!   interval, with [`certificate`] recording per-target matching witnesses.

pub mod ap_search;
pub mod certificate;
pub mod explicit;
pub mod field;
pub mod json;
pub mod matching;
pub mod random;
pub mod sets;
pub mod sumset;
pub mod upper_bound;

pub use certificate::{Assignment, MatchingCertificate};
pub use sets::{
    verify_log_sparse, ArithmeticProgression, DyadicWindow, LogSparseSet, Provenance, SetFamily,
    SparsityReport,
};
