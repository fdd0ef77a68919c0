// `!(a < b)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod config;
pub mod gen;
pub mod hp;
pub mod interp;
pub mod pycc;
pub mod rss;
pub mod sim;
pub mod syntax;
