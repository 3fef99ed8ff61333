//! Independent oracles and fixture loaders shared by the integration suites.
#![allow(dead_code)]

pub mod arcs;
pub mod dense;
pub mod fixtures;
pub mod oracle;
pub mod random;
pub mod scaling;
