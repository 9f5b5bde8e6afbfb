//! Parsing, reports, seeded generators and the command line front end for
//! `haarcalc-core`.

pub mod cli;
pub mod parse;
pub mod random;
pub mod report;
pub mod suite;
