use std::f64::consts::PI;

use serde::Serialize;

use super::evolve::IsotopyTrace;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CertificateStatus {
    Holds,
    Violated { step: usize, reason: String },
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateReport {
    #[serde(flatten)]
    pub status: CertificateStatus,
    /// Number of recorded states where all five conditions held.
    pub steps_in_w: usize,
    pub steps: usize,
    /// Largest vertex displacement between consecutive recorded states.
    pub max_displacement: f64,
}

/// Checks that every recorded state satisfying the five conditions also
/// satisfies the conclusions: flat cone, long arcs, separated γ₁ and γ₃,
/// apex margin, and thickness. Linking numbers must stay constant along
/// the whole trace.
pub fn certify_trace(trace: &IsotopyTrace, tol: f64) -> CertificateReport {
    let mut steps_in_w = 0;
    let steps = trace.rows.len();
    let max_displacement = trace.rows.iter().map(|r| r.max_displacement).fold(0.0, f64::max);
    let mut linking: Option<(Option<i64>, Option<i64>)> = None;
    for row in &trace.rows {
        let Some(rep) = &row.report else { continue };
        let lk = (rep.lk13, rep.lk24);
        if lk.0.is_some() || lk.1.is_some() {
            match linking {
                None => linking = Some(lk),
                Some(first) if first != lk => {
                    let reason = format!("linking numbers changed from {first:?} to {lk:?}");
                    return CertificateReport {
                        status: CertificateStatus::Violated { step: row.step, reason },
                        steps_in_w,
                        steps,
                        max_displacement,
                    };
                }
                _ => {}
            }
        }
        if !rep.all_conditions() {
            continue;
        }
        steps_in_w += 1;
        let th = &rep.thresholds;
        let checks = [
            (
                (rep.theta - 2.0 * PI).abs() <= th.theta_tol,
                format!("cone angle {:.6} differs from 2pi", rep.theta),
            ),
            (
                rep.min_arc_length >= th.arc_conclusion,
                format!("shortest arc {:.4} below {}", rep.min_arc_length, th.arc_conclusion),
            ),
            (
                rep.gamma13_distance >= th.gamma_distance - tol,
                format!("gamma1 and gamma3 only {:.4} apart", rep.gamma13_distance),
            ),
            (
                rep.apex_margin >= th.gamma_distance / 2.0 - tol,
                format!("apex margin {:.4} too small", rep.apex_margin),
            ),
            (
                row.reach >= trace.thickness * (1.0 - tol),
                format!("reach {:.6} below thickness", row.reach),
            ),
        ];
        if let Some((_, reason)) = checks.into_iter().find(|(ok, _)| !ok) {
            return CertificateReport {
                status: CertificateStatus::Violated { step: row.step, reason },
                steps_in_w,
                steps,
                max_displacement,
            };
        }
    }
    let status = if steps_in_w == 0 {
        CertificateStatus::NotApplicable
    } else {
        CertificateStatus::Holds
    };
    CertificateReport {
        status,
        steps_in_w,
        steps,
        max_displacement,
    }
}
