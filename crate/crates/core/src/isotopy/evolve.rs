use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::monitor::{monitor, LemmaReport, MonitorConfig, Roles};
use crate::cones::unit_vector;
use crate::curves::{ClosedCurve, ThickLink};
use crate::error::{GordianError, Result};
use crate::geom::{segment_segment, Point3};
use crate::spatial::near_segment_pairs;
use crate::thickness::{circumradius, reach_capped};
use crate::topology::split_by_plane;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Objective {
    /// Components listed in `positive` move along +x, the rest along -x.
    Split {
        positive: Vec<usize>,
    },
    Shorten {
        component: usize,
    },
    Jiggle,
}

impl Objective {
    /// α on one side, every other component on the other.
    pub fn split_default() -> Self {
        Objective::Split { positive: vec![0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    pub step: f64,
    pub sweeps: usize,
    pub snapshot_every: usize,
    /// Keep snapshot links in memory.
    pub keep_snapshots: bool,
    pub tol: f64,
    pub seed: u64,
    pub max_halvings: usize,
    /// Weight of the Laplacian smoothing term.
    pub smoothing: f64,
    /// Random rigid jitter per component in the split field, as a fraction
    /// of the step.
    pub noise: f64,
    pub roles: Roles,
    pub monitor: MonitorConfig,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig {
            step: 0.01,
            sweeps: 50,
            snapshot_every: 10,
            keep_snapshots: false,
            tol: 1e-2,
            seed: 0,
            max_halvings: 8,
            smoothing: 0.01,
            noise: 0.1,
            roles: Roles::default(),
            monitor: MonitorConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStatus {
    Running,
    Completed,
    Separated,
    Stuck,
}

impl TraceStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TraceStatus::Running => "running",
            TraceStatus::Completed => "completed",
            TraceStatus::Separated => "separated",
            TraceStatus::Stuck => "stuck",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub step: usize,
    pub reach: f64,
    pub lengths: Vec<f64>,
    pub objective_value: f64,
    /// Step size actually used to reach this state.
    pub step_size: f64,
    /// Largest vertex displacement from the previous state.
    pub max_displacement: f64,
    /// Index into the snapshot sequence, for rows that have one.
    pub snapshot: Option<usize>,
    pub status: TraceStatus,
    pub report: Option<LemmaReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsotopyTrace {
    pub objective: Objective,
    pub config: EvolveConfig,
    pub thickness: f64,
    pub initial_lengths: Vec<f64>,
    pub rows: Vec<TraceRow>,
    #[serde(skip)]
    pub snapshots: Vec<ThickLink>,
    pub status: TraceStatus,
    pub separating_margin: Option<f64>,
}

impl IsotopyTrace {
    /// Largest relative length drift over all rows, ignoring `skip`.
    pub fn length_drift(&self, skip: Option<usize>) -> f64 {
        let mut worst: f64 = 0.0;
        for row in &self.rows {
            for (c, (&l, &l0)) in row.lengths.iter().zip(&self.initial_lengths).enumerate() {
                if Some(c) != skip {
                    worst = worst.max((l - l0).abs() / l0);
                }
            }
        }
        worst
    }

    pub fn min_reach(&self) -> f64 {
        self.rows.iter().map(|r| r.reach).fold(f64::INFINITY, f64::min)
    }
}

type State = Vec<Vec<Point3>>;

fn polygon_length(v: &[Point3]) -> f64 {
    (0..v.len()).map(|i| v[i].dist(v[(i + 1) % v.len()])).sum()
}

fn laplacian(v: &[Point3], i: usize) -> Point3 {
    let n = v.len();
    (v[(i + n - 1) % n] + v[(i + 1) % n]) * 0.5 - v[i]
}

fn clip(d: Point3, h: f64) -> Point3 {
    let n = d.norm();
    if n > h {
        d * (h / n)
    } else {
        d
    }
}

fn objective_value(objective: &Objective, link: &ThickLink) -> f64 {
    match objective {
        Objective::Split { positive } => {
            let mean_x = |sel: &dyn Fn(usize) -> bool| {
                let (mut s, mut k) = (0.0, 0usize);
                for (_, v) in link.components.iter().enumerate().filter(|(c, _)| sel(*c)) {
                    s += v.vertices().iter().map(|p| p.x).sum::<f64>();
                    k += v.len();
                }
                if k == 0 {
                    0.0
                } else {
                    s / k as f64
                }
            };
            mean_x(&|c| positive.contains(&c)) - mean_x(&|c| !positive.contains(&c))
        }
        Objective::Shorten { component } => link.components[*component].length(),
        Objective::Jiggle => link.lengths().iter().sum(),
    }
}

/// Largest fraction of the relative translation `delta` between the two
/// sides that keeps every cross contact at least `target` apart, to first order.
fn feasible_fraction(state: &State, contacts: &[Contact], positive: &[usize], delta: Point3, target: f64) -> f64 {
    let mut frac: f64 = 1.0;
    for c in contacts {
        let (pa, pb) = (positive.contains(&c.ca), positive.contains(&c.cb));
        if pa == pb {
            continue;
        }
        let (na, nb) = (state[c.ca].len(), state[c.cb].len());
        let (a0, a1) = (state[c.ca][c.ia], state[c.ca][(c.ia + 1) % na]);
        let (b0, b1) = (state[c.cb][c.ib], state[c.cb][(c.ib + 1) % nb]);
        let (d, s, t) = segment_segment(a0, a1, b0, b1);
        if d < 1e-12 {
            return 0.0;
        }
        let mut n = (a0.lerp(a1, s) - b0.lerp(b1, t)) * (1.0 / d);
        if !pa {
            n = n * -1.0;
        }
        let rate = delta.dot(n);
        if rate < 0.0 {
            frac = frac.min((d - target).max(0.0) / -rate);
        }
    }
    frac
}

fn field(
    objective: &Objective,
    state: &State,
    h: f64,
    cfg: &EvolveConfig,
    rng: &mut ChaCha8Rng,
    contacts: &[Contact],
    target: f64,
) -> State {
    match objective {
        Objective::Split { positive } => {
            let mut push = [1.0, -1.0].map(|sign| Point3::new(sign * h, 0.0, 0.0) + unit_vector(rng) * (cfg.noise * h * rng.gen::<f64>()));
            let frac = feasible_fraction(state, contacts, positive, push[0] - push[1], target);
            push = push.map(|p| p * frac);
            state
                .iter()
                .enumerate()
                .map(|(c, v)| {
                    let t = if positive.contains(&c) { push[0] } else { push[1] };
                    (0..v.len()).map(|i| clip(t + laplacian(v, i) * cfg.smoothing, h)).collect()
                })
                .collect()
        }
        Objective::Shorten { component } => state
            .iter()
            .enumerate()
            .map(|(c, v)| {
                if c != *component {
                    return vec![Point3::ORIGIN; v.len()];
                }
                // tightly bent vertices follow their circle centre so caps translate instead of shrinking
                let n = v.len();
                let centre = v.iter().fold(Point3::ORIGIN, |a, &p| a + p) * (1.0 / n as f64);
                let far = v.iter().map(|p| p.dist(centre)).fold(0.0, f64::max);
                if far == 0.0 {
                    return vec![Point3::ORIGIN; n];
                }
                let r = target * 0.5;
                (0..n)
                    .map(|i| {
                        let (p, q, w) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
                        let anchor = match (circumradius(p, q, w).ok(), circumcentre(p, q, w)) {
                            (Some(rad), Some(o)) => {
                                let t = ((rad / r - 1.0) / 0.05).clamp(0.0, 1.0);
                                q * t + o * (1.0 - t)
                            }
                            _ => q,
                        };
                        clip((centre - anchor) * (h / far) + laplacian(v, i) * cfg.smoothing, h)
                    })
                    .collect()
            })
            .collect(),
        Objective::Jiggle => {
            // smooth ambient field: a few random plane waves of wavelength about 8 thickness
            let modes: Vec<(Point3, Point3, f64)> = (0..JIGGLE_MODES)
                .map(|_| {
                    let k = unit_vector(rng) * (std::f64::consts::PI / (4.0 * target) * rng.gen_range(0.5..1.5));
                    (unit_vector(rng), k, rng.gen_range(0.0..2.0 * std::f64::consts::PI))
                })
                .collect();
            let amp = h / JIGGLE_MODES as f64;
            state
                .iter()
                .map(|v| {
                    (0..v.len())
                        .map(|i| {
                            let push = modes
                                .iter()
                                .fold(Point3::ORIGIN, |a, (d, k, ph)| a + *d * (amp * (k.dot(v[i]) + ph).sin()));
                            clip(push + laplacian(v, i) * cfg.smoothing, h)
                        })
                        .collect()
                })
                .collect()
        }
    }
}

fn circumcentre(p: Point3, q: Point3, w: Point3) -> Option<Point3> {
    let (a, b) = (p - q, w - q);
    let n = a.cross(b);
    let d = 2.0 * n.norm_sq();
    if d < 1e-300 {
        return None;
    }
    Some(q + (b * a.norm_sq() - a * b.norm_sq()).cross(n) * (1.0 / d))
}

/// Required distance between points at arc separation `arc` on one
/// component: the chord of a circle of radius `r`, capped at `2r`.
fn chord_target(arc: f64, r: f64) -> f64 {
    if arc >= std::f64::consts::PI * r {
        2.0 * r
    } else {
        2.0 * r * (arc / (2.0 * r)).sin()
    }
}

const CURVATURE_PASSES: usize = 6;
const JIGGLE_MODES: usize = 4;

struct Projector {
    r: f64,
    tol: f64,
    lengths: Vec<f64>,
    /// Component whose length is free to change.
    free: Option<usize>,
    /// Extra distance for collecting contacts that may become active.
    margin: f64,
}

#[derive(Clone, Copy)]
struct Contact {
    ca: usize,
    ia: usize,
    cb: usize,
    ib: usize,
}

fn arc_at(v: &[Point3], cum: &[f64], i: usize, s: f64) -> f64 {
    cum[i] + s * v[i].dist(v[(i + 1) % v.len()])
}

impl Projector {
    fn new(link: &ThickLink, free: Option<usize>, tol: f64, step: f64) -> Self {
        Projector {
            r: link.thickness,
            tol,
            lengths: link.lengths(),
            free,
            margin: (4.0 * step).max(0.05 * link.thickness),
        }
    }

    /// Aim for the middle of the accepted band; the exact target can be
    /// infeasible at fixed length.
    fn radius(&self) -> f64 {
        self.r * (1.0 - 0.5 * self.tol)
    }

    fn target(&self, state: &State, cums: &[Vec<f64>], c: &Contact, s: f64, t: f64) -> f64 {
        let r = self.radius();
        if c.ca != c.cb {
            return 2.0 * r;
        }
        let v = &state[c.ca];
        let total = cums[c.ca][v.len()];
        let gap = (arc_at(v, &cums[c.ca], c.ia, s) - arc_at(v, &cums[c.cb], c.ib, t)).abs();
        chord_target(gap.min(total - gap), r)
    }

    fn cumulative(state: &State) -> Vec<Vec<f64>> {
        state
            .iter()
            .map(|v| {
                let mut acc = Vec::with_capacity(v.len() + 1);
                let mut s = 0.0;
                acc.push(0.0);
                for i in 0..v.len() {
                    s += v[i].dist(v[(i + 1) % v.len()]);
                    acc.push(s);
                }
                acc
            })
            .collect()
    }

    fn contacts(&self, state: &State) -> Vec<Contact> {
        let cums = Self::cumulative(state);
        let mut segs = Vec::new();
        let mut tags = Vec::new();
        for (c, v) in state.iter().enumerate() {
            for i in 0..v.len() {
                segs.push((v[i], v[(i + 1) % v.len()]));
                tags.push((c, i));
            }
        }
        let reach = 2.0 * self.r + self.margin;
        let skip_arc = 0.5 * std::f64::consts::PI * self.r;
        let mut out = Vec::new();
        near_segment_pairs(&segs, reach, |a, b| {
            let (ca, ia) = tags[a];
            let (cb, ib) = tags[b];
            if ca == cb {
                let total = cums[ca][state[ca].len()];
                let gap = (cums[ca][ib] - cums[ca][ia]).abs();
                if gap.min(total - gap) < skip_arc {
                    return;
                }
            }
            let (d, _, _) = segment_segment(segs[a].0, segs[a].1, segs[b].0, segs[b].1);
            if d < reach {
                out.push(Contact { ca, ia, cb, ib });
            }
        });
        out
    }

    /// One Gauss-Seidel sweep. Returns the worst relative violation seen.
    fn sweep(&self, state: &mut State, contacts: &[Contact]) -> f64 {
        let mut worst: f64 = 0.0;
        let cums = Self::cumulative(state);
        for c in contacts {
            let (na, nb) = (state[c.ca].len(), state[c.cb].len());
            let (a0, a1) = (state[c.ca][c.ia], state[c.ca][(c.ia + 1) % na]);
            let (b0, b1) = (state[c.cb][c.ib], state[c.cb][(c.ib + 1) % nb]);
            let (d, s, t) = segment_segment(a0, a1, b0, b1);
            let target = self.target(state, &cums, c, s, t);
            if d >= target || d < 1e-12 {
                continue;
            }
            worst = worst.max((target - d) / target);
            let n = (a0.lerp(a1, s) - b0.lerp(b1, t)) * (1.0 / d);
            let half = 0.5 * (target - d);
            let la = half / ((1.0 - s) * (1.0 - s) + s * s);
            let lb = half / ((1.0 - t) * (1.0 - t) + t * t);
            state[c.ca][c.ia] += n * (la * (1.0 - s));
            state[c.ca][(c.ia + 1) % na] += n * (la * s);
            state[c.cb][c.ib] += n * (-lb * (1.0 - t));
            state[c.cb][(c.ib + 1) % nb] += n * (-lb * t);
        }
        for _ in 0..CURVATURE_PASSES {
            worst = worst.max(self.straighten(state));
        }
        worst
    }

    fn straighten(&self, state: &mut State) -> f64 {
        let r = self.radius();
        let mut worst: f64 = 0.0;
        for v in state.iter_mut() {
            let n = v.len();
            for i in 0..n {
                let (p, q, w) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
                let rad = circumradius(p, q, w).unwrap_or(f64::INFINITY);
                if rad < r {
                    worst = worst.max((r - rad) / r);
                    let k = ((p + w) * 0.5 - q) * (1.0 - rad / r).min(1.0);
                    v[i] += k * (2.0 / 3.0);
                    v[(i + n - 1) % n] -= k * (1.0 / 3.0);
                    v[(i + 1) % n] -= k * (1.0 / 3.0);
                }
            }
        }
        worst
    }

    /// Uniform tangential redistribution, then rescaling to the initial length.
    fn restore_lengths(&self, state: &mut State) {
        for (c, v) in state.iter_mut().enumerate() {
            let n = v.len();
            let old = v.clone();
            for i in 0..n {
                let (p, w) = (old[(i + n - 1) % n], old[(i + 1) % n]);
                if let Some(t) = (w - p).normalized() {
                    let shift = (p + w) * 0.5 - old[i];
                    v[i] += t * (0.5 * shift.dot(t));
                }
            }
            if Some(c) == self.free {
                continue;
            }
            let centre = v.iter().fold(Point3::ORIGIN, |a, &p| a + p) * (1.0 / n as f64);
            let k = self.lengths[c] / polygon_length(v);
            for p in v.iter_mut() {
                *p = centre + (*p - centre) * k;
            }
        }
    }

    /// Runs correction sweeps; returns the reach and the corrected link on
    /// success.
    fn project(&self, state: &mut State, contacts: &[Contact], sweeps: usize) -> Result<Option<(f64, ThickLink)>> {
        let mut worst = f64::INFINITY;
        for _ in 0..sweeps {
            worst = self.sweep(state, contacts);
            self.restore_lengths(state);
            if worst <= 0.02 * self.tol {
                break;
            }
        }
        if worst > 0.5 * self.tol {
            return Ok(None);
        }
        // a reach above zero rules out touching components
        let link = ThickLink::new_unchecked(
            state.iter().map(|v| ClosedCurve::new(v.clone())).collect::<Result<Vec<_>>>()?,
            self.r,
        );
        let reach = reach_capped(&link, self.r)?;
        Ok((reach >= self.r * (1.0 - self.tol)).then_some((reach, link)))
    }
}

fn max_displacement(a: &State, b: &State) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(u, v)| u.iter().zip(v).map(|(p, q)| p.dist(*q)))
        .fold(0.0, f64::max)
}

/// Runs a thick isotopy of `link` along `objective` for up to `steps` steps.
pub fn evolve(link: &ThickLink, objective: &Objective, steps: usize, cfg: &EvolveConfig) -> Result<IsotopyTrace> {
    if !(cfg.step > 0.0 && cfg.step.is_finite()) {
        return Err(GordianError::InvalidArgument(format!(
            "step size must be positive, got {}",
            cfg.step
        )));
    }
    let k = link.components.len();
    match objective {
        Objective::Split { positive } => {
            if let Some(&c) = positive.iter().find(|&&c| c >= k) {
                return Err(GordianError::MissingComponent(format!(
                    "split names component {c} but link has {k}"
                )));
            }
        }
        Objective::Shorten { component } if *component >= k => {
            return Err(GordianError::MissingComponent(format!(
                "shorten names component {component} but link has {k}"
            )));
        }
        _ => {}
    }
    let r = link.thickness;
    let reach0 = reach_capped(link, r)?;
    if reach0 < r * (1.0 - cfg.tol) {
        return Err(GordianError::NotThick {
            reach: reach0 / r,
            required: 1.0 - cfg.tol,
        });
    }
    let initial_lengths = link.lengths();
    let free = match objective {
        Objective::Shorten { component } => Some(*component),
        _ => None,
    };
    let projector = Projector::new(link, free, cfg.tol, cfg.step);
    let use_monitor = cfg.roles.check(link).is_ok();
    let side: Vec<usize> = match objective {
        Objective::Split { positive } => positive.clone(),
        _ => vec![cfg.roles.alpha],
    };

    let mut state: State = link.components.iter().map(|c| c.vertices().to_vec()).collect();
    let mut trace = IsotopyTrace {
        objective: objective.clone(),
        config: cfg.clone(),
        thickness: r,
        initial_lengths: initial_lengths.clone(),
        rows: Vec::new(),
        snapshots: Vec::new(),
        status: TraceStatus::Running,
        separating_margin: None,
    };
    let mut hint: Option<[f64; 4]> = None;
    let mut snapshots = 0usize;
    let mut record = |trace: &mut IsotopyTrace,
                      current: ThickLink,
                      step: usize,
                      reach: f64,
                      h: f64,
                      disp: f64,
                      hint: &mut Option<[f64; 4]>|
     -> Result<bool> {
        let report = if use_monitor {
            let mut rep = monitor(&current, cfg.roles, hint.as_ref(), &cfg.monitor)?;
            rep.step = step;
            if rep.marks.is_some() {
                *hint = rep.marks;
            }
            Some(rep)
        } else {
            None
        };
        let snap = cfg.snapshot_every > 0 && step.is_multiple_of(cfg.snapshot_every);
        let mut separated = false;
        let mut snapshot = None;
        if snap {
            snapshot = Some(snapshots);
            snapshots += 1;
            if matches!(objective, Objective::Split { .. }) && k > 1 && !side.is_empty() && side.len() < k {
                if let Some(plane) = split_by_plane(&current, &side)? {
                    separated = true;
                    trace.separating_margin = Some(plane.margin);
                }
            }
        }
        let status = if separated { TraceStatus::Separated } else { TraceStatus::Running };
        trace.rows.push(TraceRow {
            step,
            reach,
            lengths: current.lengths(),
            objective_value: objective_value(objective, &current),
            step_size: h,
            max_displacement: disp,
            snapshot,
            status,
            report,
        });
        if snap && cfg.keep_snapshots {
            trace.snapshots.push(current);
        }
        Ok(separated)
    };

    if record(&mut trace, link.clone(), 0, reach0, 0.0, 0.0, &mut hint)? {
        trace.status = TraceStatus::Separated;
        return Ok(trace);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut last_h = cfg.step;
    for step in 1..=steps {
        let mut h = (2.0 * last_h).min(cfg.step);
        let mut accepted = None;
        let contacts = projector.contacts(&state);
        for _ in 0..=cfg.max_halvings {
            let f = field(objective, &state, h, cfg, &mut rng, &contacts, 2.0 * projector.radius());
            let mut trial: State = state
                .iter()
                .zip(&f)
                .map(|(v, d)| v.iter().zip(d).map(|(&p, &q)| p + q).collect())
                .collect();
            if let Some((reach, next)) = projector.project(&mut trial, &contacts, cfg.sweeps)? {
                let shorter_ok = match free {
                    Some(c) => polygon_length(&trial[c]) <= polygon_length(&state[c]),
                    None => true,
                };
                if shorter_ok {
                    accepted = Some((trial, reach, next));
                    break;
                }
            }
            h *= 0.5;
        }
        let Some((next, reach, current)) = accepted else {
            trace.status = TraceStatus::Stuck;
            if let Some(last) = trace.rows.last_mut() {
                last.status = TraceStatus::Stuck;
            }
            return Ok(trace);
        };
        last_h = h;
        let disp = max_displacement(&state, &next);
        state = next;
        if record(&mut trace, current, step, reach, h, disp, &mut hint)? {
            trace.status = TraceStatus::Separated;
            return Ok(trace);
        }
    }
    trace.status = TraceStatus::Completed;
    if let Some(last) = trace.rows.last_mut() {
        last.status = TraceStatus::Completed;
    }
    Ok(trace)
}
