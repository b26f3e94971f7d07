//! Independent oracles and corpora for the acceptance suite.

pub mod checks;
pub mod corpus;
pub mod exact;
