// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod effpot;
pub mod epac;
pub mod error;
pub mod model;
pub mod pimc;
pub mod series;
pub mod spectral;
