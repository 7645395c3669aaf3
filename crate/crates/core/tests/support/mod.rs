//! Checkers shared by the per-module suites and the acceptance run.
#![allow(dead_code)]

pub mod assignment;
pub mod decompose;
pub mod dp;
pub mod local;
pub mod structure;

use ucvrp_core::Rational;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}
