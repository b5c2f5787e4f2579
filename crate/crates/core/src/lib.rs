pub mod canonical;
pub mod cover;
pub mod cylinder;
pub mod experiment;
pub mod io;
pub mod metric;
pub mod relation;
pub mod suite;
pub mod svg;
