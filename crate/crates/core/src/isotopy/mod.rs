//! Thick isotopies: the per-state lemma monitor, a constrained evolution
//! engine and trace certification.

mod certify;
mod evolve;
mod monitor;

pub use certify::{certify_trace, CertificateReport, CertificateStatus};
pub use evolve::{evolve, EvolveConfig, IsotopyTrace, Objective, TraceRow, TraceStatus};
pub use monitor::{monitor, transversality_check, Crossing, LemmaReport, MonitorConfig, Roles, Thresholds, Transversality};
