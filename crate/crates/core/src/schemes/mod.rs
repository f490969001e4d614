//! Embedding schemes: scalar QIM, IQIM, and meet-in-the-middle embedding.

pub mod iqim;
pub mod mme;
pub mod qim;
