//! Desk-scale machinery for hyperbolic cylinder covers of upper half-space
//! and the combinatorics they induce.
//!
//! The crate is organized around five layers:
//!
//! * [`hyperbolic`] — the upper half-space model: points, matrix isometries,
//!   displacement functions, tubes around loxodromic axes, and a convex
//!   feasibility solver for tube intersections.
//! * [`kleinian`] — finite word-ball truncations of discrete matrix groups:
//!   enumeration, loxodromic classification, maximal cyclic subgroup labels,
//!   short-element sets at a point, and Schottky ping-pong certification.
//! * [`foldings`] — exact subgroup-rank calculus in free groups via folded
//!   core graphs, internal rank of generator families, and the inductive
//!   rank bound over face-connected simplex orderings.
//! * [`nerve`] — finite simplicial complexes, nerves of indexed covers with
//!   three-valued intersection oracles, links, internal-rank filtrations,
//!   stratum components, and Betti numbers over GF(2).
//! * [`tree`] and [`harness`] — the bipartite component graph with its tree
//!   test, and the scenario-driven certificate suites exposed by the CLI.

pub mod foldings;
pub mod harness;
pub mod hyperbolic;
pub mod kleinian;
pub mod nerve;
pub mod oracle;
pub mod synthetic;
pub mod tree;

pub use hyperbolic::{Isometry, Point};
