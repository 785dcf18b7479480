//! Text formats, builtin generators and the property-suite runner used by
//! the command-line driver.

pub mod check_paper;
pub mod doc;
pub mod generators;
