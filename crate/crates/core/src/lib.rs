//! A hammer for a small dependently typed core calculus.
//!
//! The pipeline: [`kernel`] reads an exported development, [`encoder`] and
//! [`translate`] turn declarations into untyped first-order problems
//! ([`folir`]), [`miniatp`] proves them (built-in saturation prover or an
//! external TPTP prover), and [`reconstruct`] re-proves the goal
//! intuitionistically using only the lemmas and unfoldings the prover cited.
//! [`oracle`] holds brute-force reference procedures used for self-checks.

pub mod encoder;
pub mod folir;
pub mod kernel;
pub mod miniatp;
pub mod oracle;
pub mod pipeline;
pub mod reconstruct;
pub mod selfcheck;
pub mod translate;
