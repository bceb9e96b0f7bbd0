//! Core library for the hybrid classical/quantum credit-risk benchmark:
//! dense linear algebra, tabular data handling, dimensionality reduction,
//! classical baselines, a statevector simulator with quantum classifiers,
//! and evaluation metrics.

pub mod classical;
pub mod data;
pub mod dimred;
pub mod linalg;
pub mod metrics;
pub mod quantum;
