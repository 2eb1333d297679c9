//! Generators for β, the weaving component α and the links `L(m, n)`.
//!
//! α is a four-strand weave. Strand `k` is a vertical column through corner
//! `k` of the parallelogram bounded by β, crossing the plane of β
//! orthogonally. Above β the strands splay out to the corners of a square of
//! side 4 and pass through two twist blocks: strands 1 and 2 turn `n` full
//! times about their midpoint, then strands 2 and 3 turn `m` full times.
//! Below β the picture is mirrored, so every twist is undone and α is an
//! unknot. Semicircular caps join strands 1-2 and 3-4 on top and 2-3 and 4-1
//! underneath.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curves::{ClosedCurve, ThickLink, DEFAULT_RESOLUTION};
use crate::error::{GordianError, Result};
use crate::geom::{Point3, Similarity};
use crate::isotopy::{monitor, LemmaReport, MonitorConfig, Roles};
use crate::thickness::require_thick;

/// Length of β: perimeter 8 of the parallelogram plus a full turn at radius 2.
pub const BETA_LENGTH: f64 = 8.0 + 4.0 * PI;
/// Lower bound on the length of every arc `αᵢ`.
pub const ARC_LENGTH_BOUND: f64 = 2.0 * PI * 1.732_050_807_568_877_2 - 2.0;

const OFFSET: f64 = 2.0;
const STUB: f64 = 1.5;
const SPLAY: f64 = 4.0;
const RUN_OUT: f64 = 1.0;
const CAP_RADIUS: f64 = 2.0;
/// Height of a twist block per unit of turning angle.
const BLOCK_RATE: f64 = 1.5;
/// Spacing of stacked β copies.
pub const STACK_SPACING: f64 = 3.0;
/// Strand `k` of the weave sits at corner `k` of this square far from β.
const OUTER: [(f64, f64); 4] = [(-2.0, -2.0), (-2.0, 2.0), (2.0, 2.0), (2.0, -2.0)];
/// Turning sense of the twist blocks, fixed so that `lk(γ₁, γ₃) = m` and `lk(γ₂, γ₄) = n`.
const SENSE_M: f64 = -1.0;
const SENSE_N: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaShape {
    /// Angle of the parallelogram, in `[π/3, 2π/3]`.
    pub phi: f64,
    pub resolution: usize,
}

impl Default for BetaShape {
    fn default() -> Self {
        BetaShape {
            phi: PI / 2.0,
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

impl BetaShape {
    fn validate(&self) -> Result<()> {
        if !(PI / 3.0 - 1e-12..=2.0 * PI / 3.0 + 1e-12).contains(&self.phi) {
            return Err(GordianError::InvalidArgument(format!(
                "parallelogram angle {} outside [pi/3, 2pi/3]",
                self.phi
            )));
        }
        if self.resolution < 16 {
            return Err(GordianError::InvalidArgument(format!(
                "beta resolution {} below 16",
                self.resolution
            )));
        }
        Ok(())
    }

    /// Corners `p₁..p₄` of the parallelogram, in the plane z = 0.
    pub fn corners(&self) -> [Point3; 4] {
        let u = (0.0, 2.0);
        let v = (2.0 * self.phi.sin(), 2.0 * self.phi.cos());
        let p = |a: f64, b: f64| Point3::new(0.5 * (a * u.0 + b * v.0), 0.5 * (a * u.1 + b * v.1), 0.0);
        [p(-1.0, -1.0), p(1.0, -1.0), p(1.0, 1.0), p(-1.0, 1.0)]
    }
}

/// Outward offset at radius 2 of the side-2 parallelogram, centred at the
/// origin in the plane z = 0, scaled to length exactly `8 + 4π`.
pub fn make_beta(shape: &BetaShape) -> Result<ClosedCurve> {
    shape.validate()?;
    let c = shape.corners();
    // counter-clockwise corner order p1, p4, p3, p2
    let ccw = [c[0], c[3], c[2], c[1]];
    // corner arcs as (centre, start angle, sweep, length), each after the side ending there
    let mut pieces: Vec<(Point3, f64, f64, f64)> = Vec::new();
    let mut sides: Vec<(Point3, Point3)> = Vec::new();
    for k in 0..4 {
        let (a, b, nxt) = (ccw[k], ccw[(k + 1) % 4], ccw[(k + 2) % 4]);
        let d = (b - a) / a.dist(b);
        let out = Point3::new(d.y, -d.x, 0.0);
        sides.push((a + out * OFFSET, b + out * OFFSET));
        let d2 = (nxt - b) / b.dist(nxt);
        let out2 = Point3::new(d2.y, -d2.x, 0.0);
        let start = out.y.atan2(out.x);
        let mut sweep = out2.y.atan2(out2.x) - start;
        if sweep < 0.0 {
            sweep += 2.0 * PI;
        }
        pieces.push((b, start, sweep, OFFSET * sweep));
    }
    let total: f64 = sides.iter().map(|(a, b)| a.dist(*b)).sum::<f64>() + pieces.iter().map(|p| p.3).sum::<f64>();
    let n = shape.resolution;
    let at = |mut s: f64| -> Point3 {
        for k in 0..4 {
            let (a, b) = sides[k];
            let l = a.dist(b);
            if s <= l {
                return a.lerp(b, s / l);
            }
            s -= l;
            let (centre, start, sweep, len) = pieces[k];
            if s <= len {
                let t = start + sweep * s / len;
                return centre + Point3::new(OFFSET * t.cos(), OFFSET * t.sin(), 0.0);
            }
            s -= len;
        }
        sides[0].0
    };
    // start in the middle of the side facing -y so vertex 0 is symmetric
    let shift = 0.5 * sides[0].0.dist(sides[0].1);
    let raw = ClosedCurve::new((0..n).map(|k| at((shift + total * k as f64 / n as f64) % total)).collect())?;
    let centre = raw.centroid();
    let lambda = BETA_LENGTH / raw.length();
    let map = Similarity::scaling(lambda)?.compose(&Similarity::translation(-centre));
    Ok(raw.transform(&map))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeavePlan {
    /// Full twists between the two middle strands.
    pub m: i32,
    /// Full twists between the two leftmost strands above β (undone below).
    pub n: i32,
    pub beta: BetaShape,
    /// Number of parallel β copies the weave passes through.
    pub copies: usize,
}

impl WeavePlan {
    pub fn new(m: i32, n: i32) -> Self {
        WeavePlan {
            m,
            n,
            beta: BetaShape::default(),
            copies: 1,
        }
    }

    /// Heights of the β copies.
    pub fn levels(&self) -> Vec<f64> {
        let k = self.copies as f64;
        (0..self.copies).map(|j| (j as f64 - 0.5 * (k - 1.0)) * STACK_SPACING).collect()
    }

    fn block_height(turns: i32) -> f64 {
        BLOCK_RATE * 2.0 * PI * turns.unsigned_abs() as f64
    }

    /// Distance from the outermost β copy to the cap base.
    fn column_height(&self) -> f64 {
        STUB + SPLAY + Self::block_height(self.n) + Self::block_height(self.m) + RUN_OUT
    }

    /// Braid word of the weave read upwards, one letter per half twist:
    /// `±1` for strands 1-2 and `±2` for strands 2-3.
    pub fn braid_word(&self) -> Vec<i32> {
        let half = |g: i32, turns: i32| -> Vec<i32> { vec![g * turns.signum(); 2 * turns.unsigned_abs() as usize] };
        let mut w = Vec::new();
        w.extend(half(2, -self.m));
        w.extend(half(1, -self.n));
        w.extend(half(1, self.n));
        w.extend(half(2, self.m));
        w
    }
}

fn smootherstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (x * (6.0 * x - 15.0) + 10.0)
}

fn rotate_about(p: (f64, f64), c: (f64, f64), a: f64) -> (f64, f64) {
    let (s, co) = a.sin_cos();
    let (x, y) = (p.0 - c.0, p.1 - c.1);
    (c.0 + co * x - s * y, c.1 + s * x + co * y)
}

/// Horizontal position of strand `k` at height `h` above the stub base
/// (`h = 0` is the outermost β copy).
fn strand_xy(plan: &WeavePlan, base: &[Point3; 4], k: usize, h: f64) -> (f64, f64) {
    let b = (base[k].x, base[k].y);
    if h <= STUB {
        return b;
    }
    let o = OUTER[k];
    if h <= STUB + SPLAY {
        let t = smootherstep((h - STUB) / SPLAY);
        return (b.0 + t * (o.0 - b.0), b.1 + t * (o.1 - b.1));
    }
    let mut z = h - STUB - SPLAY;
    let hn = WeavePlan::block_height(plan.n);
    let hm = WeavePlan::block_height(plan.m);
    let mut p = o;
    // strands 1 and 2 about (-2, 0)
    if k <= 1 && plan.n != 0 {
        let a = SENSE_N * 2.0 * PI * plan.n as f64 * smootherstep(z / hn);
        p = rotate_about(p, (-2.0, 0.0), a);
    }
    z -= hn;
    // strands 2 and 3 about (0, 2); after a full turn strand 2 is back at its corner
    if (k == 1 || k == 2) && plan.m != 0 && z > 0.0 {
        let a = SENSE_M * 2.0 * PI * plan.m as f64 * smootherstep(z / hm);
        p = rotate_about(p, (0.0, 2.0), a);
    }
    p
}

/// Dense polyline of α, starting at corner 1 of the lowest β copy.
fn dense_alpha(plan: &WeavePlan, dz: f64) -> Vec<Point3> {
    let base = plan.beta.corners();
    let levels = plan.levels();
    let (lo, hi) = (levels[0], *levels.last().unwrap());
    let mid = 0.5 * (lo + hi);
    let span = 0.5 * (hi - lo);
    let top = hi + plan.column_height();
    let bottom = lo - plan.column_height();
    let height = |z: f64| ((z - mid).abs() - span).max(0.0);
    let steps = ((top - bottom) / dz).ceil() as usize;
    // sample heights, with every β level hit exactly
    let mut zs: Vec<f64> = (0..=steps).map(|i| bottom + (top - bottom) * i as f64 / steps as f64).collect();
    zs.extend_from_slice(&levels);
    zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    zs.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let column = |k: usize, up: bool| -> Vec<Point3> {
        let mut pts: Vec<Point3> = zs
            .iter()
            .map(|&z| {
                let (x, y) = strand_xy(plan, &base, k, height(z));
                Point3::new(x, y, z)
            })
            .collect();
        if !up {
            pts.reverse();
        }
        pts
    };
    let cap = |a: usize, b: usize, z: f64, up: bool| -> Vec<Point3> {
        let pa = OUTER[a];
        let pb = OUTER[b];
        let c = (0.5 * (pa.0 + pb.0), 0.5 * (pa.1 + pb.1));
        let steps = ((PI * CAP_RADIUS / dz).ceil() as usize).max(8);
        (1..steps)
            .map(|i| {
                let t = PI * i as f64 / steps as f64;
                let x = c.0 + t.cos() * (pa.0 - c.0);
                let y = c.1 + t.cos() * (pa.1 - c.1);
                let dzc = CAP_RADIUS * t.sin();
                Point3::new(x, y, if up { z + dzc } else { z - dzc })
            })
            .collect()
    };
    let mut pts = Vec::new();
    pts.extend(column(0, true));
    pts.extend(cap(0, 1, top, true));
    pts.extend(column(1, false));
    pts.extend(cap(1, 2, bottom, false));
    pts.extend(column(2, true));
    pts.extend(cap(2, 3, top, true));
    pts.extend(column(3, false));
    pts.extend(cap(3, 0, bottom, false));
    let start = pts
        .iter()
        .position(|p| p.z == lo && (p.x - base[0].x).abs() < 1e-12 && (p.y - base[0].y).abs() < 1e-12)
        .unwrap();
    pts.rotate_left(start);
    pts
}

/// Arc lengths where `alpha` crosses the plane `z = level` near each corner,
/// in the order `p₁..p₄`.
pub fn find_marks(alpha: &ClosedCurve, corners: &[Point3; 4], level: f64) -> Result<[f64; 4]> {
    let mut marks = [f64::NAN; 4];
    for i in 0..alpha.len() {
        let (a, b) = alpha.edge(i);
        let (da, db) = (a.z - level, b.z - level);
        if da == 0.0 || (da < 0.0) != (db < 0.0) && db != 0.0 {
            let t = if da == 0.0 { 0.0 } else { da / (da - db) };
            let p = a.lerp(b, t);
            for (k, c) in corners.iter().enumerate() {
                if (p.x - c.x).hypot(p.y - c.y) < 0.5 {
                    if !marks[k].is_nan() {
                        return Err(GordianError::Construction(format!("strand {} crosses level {level} twice", k + 1)));
                    }
                    marks[k] = alpha.wrap(alpha.arc_at_vertex(i) + t * alpha.edge_lengths()[i]);
                }
            }
        }
    }
    if let Some(k) = marks.iter().position(|m| m.is_nan()) {
        return Err(GordianError::Construction(format!("strand {} misses level {level}", k + 1)));
    }
    Ok(marks)
}

/// The weaving component, sampled at spacing matching β's resolution.
pub fn make_alpha(plan: &WeavePlan) -> Result<ClosedCurve> {
    plan.beta.validate()?;
    if plan.copies == 0 {
        return Err(GordianError::InvalidArgument("weave needs at least one beta copy".into()));
    }
    let dense = ClosedCurve::new(dense_alpha(plan, 2e-3))?;
    let n = (plan.beta.resolution as f64 * dense.length() / BETA_LENGTH).ceil() as usize;
    dense.resample(n)
}

/// Reidemeister-style certificate that α is unknotted: its braid word
/// cancels freely and the cap pattern closes the trivial braid into one circle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnknotCertificate {
    pub braid_word: Vec<i32>,
    pub reduced_length: usize,
    pub components: usize,
    pub unknotted: bool,
}

pub fn unknot_certificate(plan: &WeavePlan) -> UnknotCertificate {
    let word = plan.braid_word();
    let mut stack: Vec<i32> = Vec::new();
    for &g in &word {
        if stack.last() == Some(&-g) {
            stack.pop();
        } else {
            stack.push(g);
        }
    }
    // pos[k]: top position of the strand starting at bottom position k
    let mut pos = [0usize, 1, 2, 3];
    for &g in &stack {
        let i = g.unsigned_abs() as usize - 1;
        for p in pos.iter_mut() {
            if *p == i {
                *p = i + 1;
            } else if *p == i + 1 {
                *p = i;
            }
        }
    }
    // caps: (1 2)(3 4) on top, (2 3)(4 1) underneath
    let top = [1usize, 0, 3, 2];
    let bottom = [3usize, 2, 1, 0];
    let mut seen = [false; 4];
    let mut components = 0;
    for s in 0..4 {
        if seen[s] {
            continue;
        }
        components += 1;
        let mut k = s;
        while !seen[k] {
            seen[k] = true;
            let across = top[pos[k]];
            let next = pos.iter().position(|&p| p == across).unwrap();
            seen[next] = true;
            k = bottom[next];
        }
    }
    UnknotCertificate {
        reduced_length: stack.len(),
        unknotted: stack.is_empty() && components == 1,
        braid_word: word,
        components,
    }
}

/// A generated link with α as component 0 and the β copies after it.
#[derive(Clone, Debug, PartialEq)]
pub struct GordianLink {
    pub link: ThickLink,
    pub plan: WeavePlan,
    /// Four arc-length marks on α for each β copy.
    pub marks: Vec<[f64; 4]>,
}

impl GordianLink {
    pub fn alpha(&self) -> &ClosedCurve {
        &self.link.components[0]
    }

    pub fn betas(&self) -> &[ClosedCurve] {
        &self.link.components[1..]
    }
}

/// Assembles α and the β copies for a plan; no thickness verification.
pub fn assemble(plan: &WeavePlan) -> Result<GordianLink> {
    let alpha = make_alpha(plan)?;
    let beta = make_beta(&plan.beta)?;
    let corners = plan.beta.corners();
    let mut components = vec![alpha];
    let mut marks = Vec::new();
    for z in plan.levels() {
        components.push(beta.transform(&Similarity::translation(Point3::new(0.0, 0.0, z))));
        marks.push(find_marks(&components[0], &corners, z)?);
    }
    Ok(GordianLink {
        link: ThickLink::new(components, 1.0)?,
        plan: *plan,
        marks,
    })
}

/// Thickness tolerance used when verifying generated links.
pub const GENERATION_TOL: f64 = 1e-2;

/// Checks thickness and the five conditions for every β copy.
pub fn verify(g: &GordianLink) -> Result<Vec<LemmaReport>> {
    require_thick(&g.link, GENERATION_TOL)?;
    let cfg = MonitorConfig::default();
    let mut reports = Vec::with_capacity(g.marks.len());
    for (j, marks) in g.marks.iter().enumerate() {
        let report = monitor(&g.link, Roles { alpha: 0, beta: j + 1 }, Some(marks), &cfg)?;
        if !report.all_conditions() {
            return Err(GordianError::Construction(format!(
                "beta copy {}: {} failed",
                j + 1,
                report.failures().join(", ")
            )));
        }
        reports.push(report);
    }
    Ok(reports)
}

/// Builds and verifies the link for `plan`.
pub fn make_from_plan(plan: &WeavePlan) -> Result<GordianLink> {
    if plan.m == 0 || plan.n == 0 {
        return Err(GordianError::InvalidArgument(format!(
            "twist counts must be nonzero, got m = {}, n = {}",
            plan.m, plan.n
        )));
    }
    if plan.copies == 0 {
        return Err(GordianError::InvalidArgument("at least one copy of beta is required".into()));
    }
    let g = assemble(plan)?;
    verify(&g)?;
    Ok(g)
}

/// The two-component link `L(m, n)`.
#[doc(alias = "make_L")]
pub fn make_l(m: i32, n: i32) -> Result<GordianLink> {
    make_from_plan(&WeavePlan::new(m, n))
}

/// A `k`-component link: α woven through `k - 1` stacked copies of β.
pub fn make_stacked(k: usize, m: i32, n: i32) -> Result<GordianLink> {
    if k < 2 {
        return Err(GordianError::InvalidArgument(format!(
            "a stacked link needs at least 2 components, got {k}"
        )));
    }
    make_from_plan(&WeavePlan {
        copies: k - 1,
        ..WeavePlan::new(m, n)
    })
}
