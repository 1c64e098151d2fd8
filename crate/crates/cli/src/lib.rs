//! Command-line front end: problem files in, reports out.

pub mod commands;
pub mod report;
pub mod schema;
pub mod text;
