//! Geometry of thick links: curves, reach, cones over closed curves,
//! linking numbers, explicit gordian pair constructions and isotopy monitoring.

pub mod cones;
pub mod constructions;
pub mod curves;
pub mod error;
pub mod geom;
pub mod io;
pub mod isotopy;
pub mod mesh;
pub mod spatial;
pub mod thickness;
pub mod topology;

pub use curves::{ClosedCurve, ThickLink};
pub use error::{GordianError, Result};
pub use geom::{Mat3, Point3, Similarity};
