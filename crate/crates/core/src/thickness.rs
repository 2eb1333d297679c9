//! Reach of polyline links and the unit-ball overlap property.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curves::{ClosedCurve, ThickLink};
use crate::error::{GordianError, Result};
use crate::geom::{segment_segment, Point3};
use crate::spatial::near_segment_pairs;

/// Default slack below 1 at which a discretized link still counts as thick.
pub const DEFAULT_THICKNESS_TOL: f64 = 1e-2;

/// Same-component pairs closer than this many local radii (times pi) along the
/// curve are never doubly critical.
const WINDOW_FACTOR: f64 = 0.9;

/// Radius of the circle through three points; `+inf` when they are collinear.
pub fn circumradius(p: Point3, q: Point3, r: Point3) -> Result<f64> {
    if !(p.is_finite() && q.is_finite() && r.is_finite()) {
        return Err(GordianError::InvalidArgument("circumradius of non-finite point".into()));
    }
    let a = q.dist(r);
    let b = p.dist(r);
    let c = p.dist(q);
    if a == 0.0 || b == 0.0 || c == 0.0 {
        return Err(GordianError::Degenerate("circumradius of coincident points".into()));
    }
    let twice_area = (q - p).cross(r - p).norm();
    if twice_area <= 1e-15 * (a * b).max(b * c).max(a * c) {
        return Ok(f64::INFINITY);
    }
    Ok(a * b * c / (2.0 * twice_area))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocalWitness {
    pub component: usize,
    /// Index of the middle vertex of the triple.
    pub vertex: usize,
    /// Arc length of the middle vertex.
    pub s: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairWitness {
    pub component_a: usize,
    pub s_a: f64,
    pub component_b: usize,
    pub s_b: f64,
    pub distance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub local: LocalWitness,
    pub pair: Option<PairWitness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReachBreakdown {
    pub reach: f64,
    #[serde(rename = "local_term")]
    pub min_local_radius: f64,
    /// `+inf` when no doubly critical pair exists.
    #[serde(rename = "pair_term")]
    pub min_doubly_critical_half_distance: f64,
    pub witness: Witness,
}

fn local_term(link: &ThickLink) -> Result<(f64, LocalWitness)> {
    let mut best = f64::INFINITY;
    let mut wit = LocalWitness {
        component: 0,
        vertex: 0,
        s: 0.0,
    };
    for (ci, c) in link.components.iter().enumerate() {
        let n = c.len();
        let v = c.vertices();
        for i in 0..n {
            let r = circumradius(v[(i + n - 1) % n], v[i], v[(i + 1) % n])?;
            if r < best {
                best = r;
                wit = LocalWitness {
                    component: ci,
                    vertex: i,
                    s: c.arc_at_vertex(i),
                };
            }
        }
    }
    Ok((best, wit))
}

struct PairScan<'a> {
    link: &'a ThickLink,
    segs: Vec<(Point3, Point3)>,
    tags: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    window: f64,
}

impl<'a> PairScan<'a> {
    fn new(link: &'a ThickLink, local: f64) -> Self {
        let (segs, tags) = link.tagged_segments();
        let mut offsets = vec![0];
        for c in &link.components {
            offsets.push(offsets.last().unwrap() + c.len());
        }
        PairScan {
            link,
            segs,
            tags,
            offsets,
            window: WINDOW_FACTOR * PI * local,
        }
    }

    fn seg_dist(&self, ci: usize, i: usize, cj: usize, j: usize) -> f64 {
        let ni = self.link.components[ci].len();
        let nj = self.link.components[cj].len();
        let a = self.segs[self.offsets[ci] + i % ni];
        let b = self.segs[self.offsets[cj] + j % nj];
        segment_segment(a.0, a.1, b.0, b.1).0
    }

    fn excluded(&self, ci: usize, i: usize, cj: usize, j: usize) -> bool {
        if ci != cj {
            return false;
        }
        let c = &self.link.components[ci];
        let n = c.len();
        if (i + 1) % n == j || (j + 1) % n == i || i == j {
            return true;
        }
        let mi = c.arc_at_vertex(i) + 0.5 * c.edge_lengths()[i];
        let mj = c.arc_at_vertex(j) + 0.5 * c.edge_lengths()[j];
        c.short_arc(mi, mj) < self.window
    }

    /// Smallest locally minimal pair distance below `cutoff`.
    fn scan(&self, cutoff: f64) -> Option<PairWitness> {
        let mut best: Option<(f64, usize, usize)> = None;
        near_segment_pairs(&self.segs, cutoff, |a, b| {
            let (ci, i) = self.tags[a];
            let (cj, j) = self.tags[b];
            if self.excluded(ci, i, cj, j) {
                return;
            }
            let (sa, sb) = (self.segs[a], self.segs[b]);
            let d = segment_segment(sa.0, sa.1, sb.0, sb.1).0;
            if d >= cutoff || best.is_some_and(|(bd, _, _)| d >= bd) {
                return;
            }
            let ni = self.link.components[ci].len();
            let nj = self.link.components[cj].len();
            let minimal = d <= self.seg_dist(ci, i + 1, cj, j)
                && d <= self.seg_dist(ci, i + ni - 1, cj, j)
                && d <= self.seg_dist(ci, i, cj, j + 1)
                && d <= self.seg_dist(ci, i, cj, j + nj - 1);
            if minimal {
                best = Some((d, a, b));
            }
        });
        best.map(|(d, a, b)| {
            let (ci, i) = self.tags[a];
            let (cj, j) = self.tags[b];
            let (sa, sb) = (self.segs[a], self.segs[b]);
            let (_, t, u) = segment_segment(sa.0, sa.1, sb.0, sb.1);
            let c1 = &self.link.components[ci];
            let c2 = &self.link.components[cj];
            PairWitness {
                component_a: ci,
                s_a: c1.wrap(c1.arc_at_vertex(i) + t * c1.edge_lengths()[i]),
                component_b: cj,
                s_b: c2.wrap(c2.arc_at_vertex(j) + u * c2.edge_lengths()[j]),
                distance: d,
            }
        })
    }
}

fn bbox_diameter(link: &ThickLink) -> f64 {
    let mut lo = link.components[0].vertex(0);
    let mut hi = lo;
    for p in link.components.iter().flat_map(|c| c.vertices().iter()) {
        lo = Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
        hi = Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
    }
    hi.dist(lo)
}

/// Reach estimate of a polyline link with witnesses for both terms.
pub fn reach(link: &ThickLink) -> Result<ReachBreakdown> {
    let (local, lw) = local_term(link)?;
    let scan = PairScan::new(link, local);
    let limit = 1.01 * bbox_diameter(link) + 1e-9;
    let mut cutoff = if local.is_finite() { 2.2 * local } else { limit };
    let pair = loop {
        if let Some(w) = scan.scan(cutoff) {
            break Some(w);
        }
        if cutoff >= limit {
            break None;
        }
        cutoff = (2.0 * cutoff).min(limit);
    };
    let half = pair.map_or(f64::INFINITY, |w| 0.5 * w.distance);
    Ok(ReachBreakdown {
        reach: local.min(half),
        min_local_radius: local,
        min_doubly_critical_half_distance: half,
        witness: Witness { local: lw, pair },
    })
}

/// `min(reach(link), cap)`, cheaper than [`reach`] because pairs farther apart
/// than `2 * cap` are never examined.
pub fn reach_capped(link: &ThickLink, cap: f64) -> Result<f64> {
    let (local, _) = local_term(link)?;
    let r = local.min(cap);
    let scan = PairScan::new(link, local);
    let half = scan.scan(2.0 * r).map_or(f64::INFINITY, |w| 0.5 * w.distance);
    Ok(r.min(half))
}

/// Fails with [`GordianError::NotThick`] unless the link has reach at least `1 - tol`.
pub fn require_thick(link: &ThickLink, tol: f64) -> Result<ReachBreakdown> {
    let r = reach(link)?;
    if r.reach < 1.0 - tol {
        return Err(GordianError::NotThick {
            reach: r.reach,
            required: 1.0 - tol,
        });
    }
    Ok(r)
}

#[derive(Clone, Copy, Debug)]
pub struct BallOverlapOptions {
    pub seed: u64,
    /// Accepted shortfall of reach below 1.
    pub tol: f64,
    /// Relative shortfall of an arc below pi still treated as "at least pi".
    /// Inscribed polygons are slightly shorter than the curve they sample.
    pub arc_slack: f64,
}

impl Default for BallOverlapOptions {
    fn default() -> Self {
        BallOverlapOptions {
            seed: 0,
            tol: DEFAULT_THICKNESS_TOL,
            arc_slack: 1e-4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BallOverlapReport {
    pub samples: usize,
    pub min_chord: f64,
    /// Arc-length parameters of the closest sampled pair.
    pub pair: Option<(f64, f64)>,
    pub holds: bool,
}

/// Samples pairs whose two connecting arcs both have length at least pi and
/// checks that their unit balls have disjoint interiors.
pub fn ball_overlap_property(c: &ClosedCurve, samples: usize, opts: &BallOverlapOptions) -> Result<BallOverlapReport> {
    let link = ThickLink::new(vec![c.clone()], 1.0)?;
    require_thick(&link, opts.tol)?;
    let half_turn = PI * (1.0 - opts.arc_slack);
    let l = c.length();
    let mut report = BallOverlapReport {
        samples: 0,
        min_chord: f64::INFINITY,
        pair: None,
        holds: true,
    };
    if l < 2.0 * half_turn {
        return Ok(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..samples {
        let s1 = rng.gen_range(0.0..l);
        let s2 = c.wrap(s1 + half_turn + rng.gen::<f64>() * (l - 2.0 * half_turn));
        let d = c.point_at(s1).dist(c.point_at(s2));
        report.samples += 1;
        if d < report.min_chord {
            report.min_chord = d;
            report.pair = Some((s1, s2));
        }
    }
    report.holds = report.min_chord >= 2.0 - opts.tol;
    Ok(report)
}
