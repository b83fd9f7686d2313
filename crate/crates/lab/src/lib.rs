//! Command-line front end for the Dicke model laboratory.
//!
//! Each subcommand writes one self-describing table; see [`document`] for
//! the file layout.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod document;
