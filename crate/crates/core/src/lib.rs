//! Simulation and verification engines for Bell-type inequality arguments.
//!
//! The crate is organised around four engines:
//!
//! * [`ineq`] — exact-arithmetic ±1 spreadsheets, CHSH/Boole/Leggett–Garg
//!   checks, joint-distribution feasibility (Fine's theorem), sample
//!   extraction and the finite-sample labelling experiment.
//! * [`quantum`] — small dense complex-Hermitian machinery: spin operators,
//!   the two-qubit singlet, the CHSH operator, the Tsirelson bound, Landau's
//!   equality, the separable bound and smeared (spherical-cap) correlations.
//! * [`chvm`] — hidden-variable models: the local realistic model on one
//!   probability space, the contextual model on four disjoint spaces,
//!   instrument averaging, post-selection conditionals, apparent signalling,
//!   the subdomain (coincidence) bound and a budgeted model fitter.
//! * [`collision`] — the elastic-collision thought experiment with
//!   predetermined outcomes: analytic expectations, Monte Carlo runs and the
//!   resolution of the apparent three-variable inequality violation.
//!
//! All statistical operations take explicit seeds and derive per-unit
//! sub-seeds, so results are identical regardless of thread count.

pub mod chvm;
pub mod collision;
pub mod ineq;
pub mod quantum;
pub mod rat;
pub mod rng;
