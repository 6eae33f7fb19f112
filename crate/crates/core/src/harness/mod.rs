//! Experiment driver: convergence studies, references, contours and file output.

pub mod cache;
pub mod config;
pub mod contour;
pub mod converge;
pub mod csv;
pub mod experiments;
pub mod pnm;
pub mod run;
