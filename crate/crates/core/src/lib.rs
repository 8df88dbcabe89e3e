//! Random algebraic constructions of hypergraphs that avoid a complete
//! `r`-partite configuration `K^{(r)}_{s_1,...,s_{r-1},p}` while containing many
//! copies of a fixed pattern, together with exact small-case Turán oracles and
//! Monte Carlo checks of the probabilistic facts the construction relies on.
//!
//! The pipeline is:
//!
//! 1. [`field`]: arithmetic in `F_q`.
//! 2. [`poly`]: uniformly random symmetric block polynomials `f`.
//! 3. [`hypergraph`]: the zero-set hypergraph `G_f`, pattern counting and
//!    forbidden-configuration scans.
//! 4. [`construction`]: bad-sequence deletion and certification.
//! 5. [`oracle`] and [`analysis`]: ground truth and statistical verifiers.
//!
//! The `algturan` binary in [`cli`] drives all of it from the command line.

pub mod analysis;
pub mod cli;
pub mod construction;
pub mod field;
pub mod hypergraph;
pub mod oracle;
pub mod poly;
pub mod rng;

pub use field::{Fe, FieldCtx, FieldError};
pub use hypergraph::{Hypergraph, Pattern};
pub use poly::{BlockPolynomial, BlockShape, Monomial, PointBlock};
