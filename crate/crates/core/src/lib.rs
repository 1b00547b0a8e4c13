//! Finite-dimensional toolkit for entanglement-breaking quantum channels.
//!
//! The crate decides, refutes and builds witnesses for the standard
//! characterizations of entanglement-breaking (EB) channels at finite
//! dimension:
//!
//! * separability of the normalized Choi state, with a PPT refutation and a
//!   constructive product-state decomposition ([`criteria`]);
//! * measure-and-prepare (Holevo) form and factorization through a
//!   quantum-classical channel;
//! * existence of `n`-joint channels (self-compatibility) and of a
//!   broadcasting channel, decided by an alternating-projection PSD
//!   feasibility solver ([`feasibility`]);
//! * the coherent-state channel on a truncated Fock space ([`bargmann`]).
//!
//! Channels are handled in the Schrödinger picture and stored as trace-one
//! Choi states; see [`channels`] for the conventions.

// `!(x > 0.0)` is used on purpose so that NaN takes the failure branch
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bargmann;
pub mod channels;
pub mod criteria;
pub mod document;
pub mod feasibility;
pub mod linalg;
pub mod tolerances;
