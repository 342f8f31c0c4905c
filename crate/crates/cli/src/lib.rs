//! Session files and subcommand plumbing for the `isotrope` binary.

pub mod commands;
pub mod session;
