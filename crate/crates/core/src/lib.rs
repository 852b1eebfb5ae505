//! Comlink time-data toolkit.
//!
//! Light-time and frequency-resolution modelling for remote comlink targets,
//! memory timing and FIFO charge allocation, fiber/Faraday optics, relativistic
//! timing, comlink plane geometry and a partitioned parallel sort harness. The
//! [`analysis`] module ties the link model into a spreadsheet (CSV) and radar
//! chart (SVG) pipeline and hosts the `timedata-lab` command line.

// Domain checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod geomlink;
pub mod linkmodel;
pub mod memtiming;
pub mod optics;
pub mod ptvda;
pub mod relativity;
pub mod units;

use thiserror::Error;

/// Any error a toolkit operation can report.
#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Unit(#[from] units::UnitError),
    #[error(transparent)]
    Link(#[from] linkmodel::LinkError),
    #[error(transparent)]
    Optics(#[from] optics::OpticsError),
    #[error(transparent)]
    Mem(#[from] memtiming::MemError),
    #[error(transparent)]
    Rel(#[from] relativity::RelError),
    #[error(transparent)]
    Sort(#[from] ptvda::SortError),
    #[error(transparent)]
    Geom(#[from] geomlink::GeomError),
    #[error(transparent)]
    Analysis(#[from] analysis::AnalysisError),
}
