//! Closed polylines and links of them.
//!
//! A [`ClosedCurve`] stands in for a `C^{1,1}` curve: a dense cyclic list of
//! vertices. Points on it are addressed by arc length measured from vertex 0,
//! so resampling never invalidates a reference.

use std::f64::consts::PI;

use crate::error::{GordianError, Result};
use crate::geom::{segment_segment, KahanSum, Point3, Similarity};
use crate::spatial::near_segment_pairs;

/// Segment between two consecutive vertices.
pub(crate) type Segment = (Point3, Point3);

/// Vertices per component used when a caller does not choose a resolution.
pub const DEFAULT_RESOLUTION: usize = 512;

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedCurve {
    vertices: Vec<Point3>,
    edge_lengths: Vec<f64>,
    /// `cumulative[i]` is the arc length from vertex 0 to vertex `i`; has `n + 1` entries.
    cumulative: Vec<f64>,
}

impl ClosedCurve {
    pub fn new(vertices: Vec<Point3>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(GordianError::Degenerate(format!("closed curve needs at least 3 vertices, got {n}")));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(GordianError::Degenerate(format!("vertex {i} is not finite")));
        }
        let mut edge_lengths = Vec::with_capacity(n);
        for i in 0..n {
            let l = vertices[i].dist(vertices[(i + 1) % n]);
            if l <= 0.0 {
                return Err(GordianError::Degenerate(format!("zero-length edge at vertex {i}")));
            }
            edge_lengths.push(l);
        }
        for i in 0..n {
            let e0 = vertices[(i + 1) % n] - vertices[i];
            let e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
            if e0.cross(e1).norm() <= 1e-14 * e0.norm() * e1.norm() && e0.dot(e1) < 0.0 {
                return Err(GordianError::Degenerate(format!("cusp at vertex {}", (i + 1) % n)));
            }
        }
        let mut cumulative = Vec::with_capacity(n + 1);
        let mut acc = KahanSum::default();
        cumulative.push(0.0);
        for &l in &edge_lengths {
            acc.add(l);
            cumulative.push(acc.value());
        }
        Ok(ClosedCurve {
            vertices,
            edge_lengths,
            cumulative,
        })
    }

    /// Polyline through `f(2 pi k / n)` for `k = 0..n`.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> Point3) -> Result<Self> {
        Self::new((0..n).map(|k| f(2.0 * PI * k as f64 / n as f64)).collect())
    }

    /// Regular `n`-gon inscribed in the circle of radius `r` about `center`, in the plane z = center.z.
    pub fn circle(center: Point3, r: f64, n: usize) -> Result<Self> {
        Self::from_fn(n, |u| center + Point3::new(r * u.cos(), r * u.sin(), 0.0))
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point3> {
        self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Point3 {
        self.vertices[i % self.vertices.len()]
    }

    /// Endpoints of edge `i` (from vertex `i` to vertex `i + 1`, cyclically).
    pub fn edge(&self, i: usize) -> (Point3, Point3) {
        let n = self.vertices.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Arc length at the start of vertex `i`.
    pub fn arc_at_vertex(&self, i: usize) -> f64 {
        self.cumulative[i % self.vertices.len()]
    }

    pub fn length(&self) -> f64 {
        self.cumulative[self.vertices.len()]
    }

    /// Arc-length weighted center of mass of the wire.
    pub fn centroid(&self) -> Point3 {
        let (mut sx, mut sy, mut sz) = (KahanSum::default(), KahanSum::default(), KahanSum::default());
        for i in 0..self.len() {
            let (a, b) = self.edge(i);
            let m = (a + b) * (0.5 * self.edge_lengths[i]);
            sx.add(m.x);
            sy.add(m.y);
            sz.add(m.z);
        }
        Point3::new(sx.value(), sy.value(), sz.value()) / self.length()
    }

    /// Wraps `s` into `[0, length)`.
    pub fn wrap(&self, s: f64) -> f64 {
        let l = self.length();
        let w = s.rem_euclid(l);
        if w >= l {
            0.0
        } else {
            w
        }
    }

    /// Edge index and fraction along it for arc length `s` (wrapped).
    pub fn locate(&self, s: f64) -> (usize, f64) {
        let s = self.wrap(s);
        let n = self.len();
        let i = match self.cumulative.binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(n - 1),
            Err(i) => (i - 1).min(n - 1),
        };
        let t = ((s - self.cumulative[i]) / self.edge_lengths[i]).clamp(0.0, 1.0);
        (i, t)
    }

    pub fn point_at(&self, s: f64) -> Point3 {
        let (i, t) = self.locate(s);
        let (a, b) = self.edge(i);
        a.lerp(b, t)
    }

    /// Unit tangent of the edge containing `s`.
    pub fn tangent_at(&self, s: f64) -> Point3 {
        let (i, _) = self.locate(s);
        let (a, b) = self.edge(i);
        (b - a) / self.edge_lengths[i]
    }

    /// Lengths of the two complementary arcs between `s1` and `s2`: first the
    /// arc running forward from `s1` to `s2`, then the other.
    pub fn arc_distance(&self, s1: f64, s2: f64) -> Result<(f64, f64)> {
        let l = self.length();
        for (k, s) in [s1, s2].into_iter().enumerate() {
            if !(0.0..=l).contains(&s) {
                return Err(GordianError::OutOfRange(format!("arc parameter s{} = {s} outside [0, {l}]", k + 1)));
            }
        }
        let forward = (s2 - s1).rem_euclid(l);
        Ok((forward, l - forward))
    }

    /// Shorter of the two arcs between `s1` and `s2` (parameters wrapped).
    pub fn short_arc(&self, s1: f64, s2: f64) -> f64 {
        let l = self.length();
        let d = (s2 - s1).rem_euclid(l);
        d.min(l - d)
    }

    /// `n` vertices at equal arc-length spacing, starting at vertex 0.
    pub fn resample(&self, n: usize) -> Result<ClosedCurve> {
        if n < 3 {
            return Err(GordianError::InvalidArgument(format!("resample needs n >= 3, got {n}")));
        }
        let l = self.length();
        ClosedCurve::new((0..n).map(|k| self.point_at(l * k as f64 / n as f64)).collect())
    }

    pub fn transform(&self, map: &Similarity) -> ClosedCurve {
        let v = self.vertices.iter().map(|&p| map.apply(p)).collect();
        ClosedCurve::new(v).expect("similarity preserves validity")
    }

    /// Same point set traversed backwards, still starting at vertex 0.
    pub fn reversed(&self) -> ClosedCurve {
        let mut v = self.vertices.clone();
        v[1..].reverse();
        ClosedCurve::new(v).expect("reversal preserves validity")
    }

    /// Same curve with vertex `k` moved to the front.
    pub fn rotated_start(&self, k: usize) -> ClosedCurve {
        let mut v = self.vertices.clone();
        v.rotate_left(k % self.len());
        ClosedCurve::new(v).expect("rotation preserves validity")
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point3, Point3)> + '_ {
        (0..self.len()).map(move |i| self.edge(i))
    }
}

/// A link: closed components with a nominal tube radius.
#[derive(Clone, Debug, PartialEq)]
pub struct ThickLink {
    pub components: Vec<ClosedCurve>,
    pub thickness: f64,
}

impl ThickLink {
    pub fn new(components: Vec<ClosedCurve>, thickness: f64) -> Result<Self> {
        if !(thickness > 0.0 && thickness.is_finite()) {
            return Err(GordianError::InvalidArgument(format!(
                "thickness must be positive, got {thickness}"
            )));
        }
        if components.is_empty() {
            return Err(GordianError::InvalidArgument("link needs at least one component".into()));
        }
        let link = ThickLink { components, thickness };
        if let Some((a, b, d)) = link.touching_components(1e-9) {
            return Err(GordianError::Degenerate(format!("components {a} and {b} meet (distance {d:.3e})")));
        }
        Ok(link)
    }

    /// Builds a link without the disjointness scan. Callers guarantee validity.
    pub(crate) fn new_unchecked(components: Vec<ClosedCurve>, thickness: f64) -> Self {
        ThickLink { components, thickness }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.components.iter().map(ClosedCurve::length).collect()
    }

    pub fn transform(&self, map: &Similarity) -> ThickLink {
        ThickLink {
            components: self.components.iter().map(|c| c.transform(map)).collect(),
            thickness: self.thickness,
        }
    }

    /// All edges tagged `(component, edge index)`.
    pub(crate) fn tagged_segments(&self) -> (Vec<Segment>, Vec<(usize, usize)>) {
        let mut segs = Vec::new();
        let mut tags = Vec::new();
        for (c, curve) in self.components.iter().enumerate() {
            for i in 0..curve.len() {
                segs.push(curve.edge(i));
                tags.push((c, i));
            }
        }
        (segs, tags)
    }

    /// First pair of distinct components closer than `eps`, if any.
    fn touching_components(&self, eps: f64) -> Option<(usize, usize, f64)> {
        if self.components.len() < 2 {
            return None;
        }
        let (segs, tags) = self.tagged_segments();
        let mut hit = None;
        near_segment_pairs(&segs, eps, |i, j| {
            if hit.is_some() || tags[i].0 == tags[j].0 {
                return;
            }
            let (d, _, _) = segment_segment(segs[i].0, segs[i].1, segs[j].0, segs[j].1);
            if d < eps {
                hit = Some((tags[i].0, tags[j].0, d));
            }
        });
        hit
    }
}

/// Minimum distance between two polylines, considering only pairs closer than
/// `cutoff`; returns `cutoff` when nothing is closer.
pub fn min_distance_within(a: &ClosedCurve, b: &ClosedCurve, cutoff: f64) -> f64 {
    let mut segs: Vec<(Point3, Point3)> = a.segments().collect();
    let na = segs.len();
    segs.extend(b.segments());
    let mut best = cutoff;
    near_segment_pairs(&segs, cutoff, |i, j| {
        if (i < na) == (j < na) {
            return;
        }
        let (d, _, _) = segment_segment(segs[i].0, segs[i].1, segs[j].0, segs[j].1);
        if d < best {
            best = d;
        }
    });
    best
}
