//! Exact computation of the homology of ordered configuration spaces of graphs.
//!
//! The engine builds, for a finite graph `Γ` and a particle count `k`, a weighted
//! chain complex of free symmetric-group modules whose homology is canonically
//! `H_i(F_k(Γ))`, the homology of the space of `k` labeled points on `Γ`. On top
//! of that sit:
//!
//! * exact sparse linear algebra over `ℚ` and `𝔽_p` with multi-prime certification
//!   ([`linalg`]),
//! * Betti numbers, symmetric-group characters and Specht-module multiplicities
//!   ([`homology`]),
//! * Koszul-complex `Tor` columns over edge-stabilization actions ([`tor`]),
//! * an independent discretized cube-complex oracle valid for small `k` ([`abrams`]),
//! * closed-form dimension/multiplicity functions for free twisted algebras and
//!   the leading asymptotics in `k` ([`functions`], [`asymptotics`]).
//!
//! Everything is exact: values are integers or `BigRational`s, and randomness is
//! confined to the choice of certification primes (which callers may pin).

pub mod abrams;
pub mod arith;
pub mod asymptotics;
pub mod functions;
pub mod graph;
pub mod homology;
pub mod linalg;
pub mod partitions;
pub mod samples;
pub mod swiatkowski;
pub mod tor;

pub use graph::Graph;
pub use partitions::Partition;
