//! Solvers for constrained nonlinear systems F(x) = 0, x in C.
//!
//! A regularized Levenberg-Marquardt direction is paired with a feasible
//! inexact projection onto the convex set C: the projection oracle only has
//! to certify an inner-product gap, not exact optimality, so expensive sets
//! such as the spectrahedron can be handled with cheap Frank-Wolfe style
//! oracles. The crate provides the local method, a globalized variant with a
//! nonmonotone line search and projected-gradient safeguard, exact and
//! iterative projection oracles for boxes, the unit simplex and the
//! spectrahedron, self-contained test problems, and a reproducible trace
//! format for experiments.

pub mod linalg;
mod par;
pub mod problems;
pub mod sets;
pub mod solve;
pub mod trace;
