//! Problem files, command execution and reports for the `discone` binary.

pub mod document;
pub mod error;
pub mod report;
pub mod run;
