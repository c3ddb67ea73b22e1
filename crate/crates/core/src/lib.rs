//! Uncertainty-aware Bayesian inference with the (α, β)-posterior.
//!
//! The posterior `p^β · l^α` rebalances a prior `p` against the likelihood
//! distribution `l`: exponents below one spread a distribution (raising its
//! entropy), exponents above one concentrate it. This crate provides the
//! fusion rule itself, tempered filters and classifiers built on it,
//! hyper-parameter search for `(α, β)`, and the seeded simulators used to
//! evaluate all of them.
//!
//! - [`posterior`]: α-scaling, fusion, the variational objective and its oracle.
//! - [`classify`]: naive Bayes models and the λ-weighted classifier.
//! - [`filters`]: uncertainty-aware Kalman, particle and IMM filters.
//! - [`tuning`]: grid and radial-basis surrogate search.
//! - [`simulate`]: synthetic scenarios and corpora.

pub mod classify;
pub mod filters;
pub mod posterior;
pub mod simulate;
pub mod tuning;

pub use posterior::{DiscreteDistribution, FusionWeights, GaussianBelief, ScalableDistribution, TemperPair};
