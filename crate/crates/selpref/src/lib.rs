pub mod cli;
pub mod dump;
pub mod formats;
pub mod report;
