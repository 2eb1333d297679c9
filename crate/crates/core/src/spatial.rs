//! Uniform-grid broad phase for segment proximity queries.

use crate::geom::Point3;

const MAX_CELLS: usize = 1 << 21;

/// Calls `visit(i, j)` (with `i < j`) for every pair of segments whose
/// axis-aligned boxes, each grown by `cutoff / 2`, overlap. This is a superset
/// of the pairs at distance `< cutoff`. Visiting order is deterministic.
pub fn near_segment_pairs(segs: &[(Point3, Point3)], cutoff: f64, mut visit: impl FnMut(usize, usize)) {
    let n = segs.len();
    if n < 2 {
        return;
    }
    let half = 0.5 * cutoff.max(0.0);
    let boxes: Vec<(Point3, Point3)> = segs
        .iter()
        .map(|&(a, b)| {
            let lo = Point3::new(a.x.min(b.x) - half, a.y.min(b.y) - half, a.z.min(b.z) - half);
            let hi = Point3::new(a.x.max(b.x) + half, a.y.max(b.y) + half, a.z.max(b.z) + half);
            (lo, hi)
        })
        .collect();
    let mut glo = boxes[0].0;
    let mut ghi = boxes[0].1;
    let mut mean_extent = 0.0;
    for &(lo, hi) in &boxes {
        glo = Point3::new(glo.x.min(lo.x), glo.y.min(lo.y), glo.z.min(lo.z));
        ghi = Point3::new(ghi.x.max(hi.x), ghi.y.max(hi.y), ghi.z.max(hi.z));
        let e = hi - lo;
        mean_extent += e.x.max(e.y).max(e.z);
    }
    mean_extent /= n as f64;
    let span = ghi - glo;
    let mut h = mean_extent.max(1e-12);
    let dims = |h: f64| -> [usize; 3] {
        [
            ((span.x / h).floor() as usize + 1).max(1),
            ((span.y / h).floor() as usize + 1).max(1),
            ((span.z / h).floor() as usize + 1).max(1),
        ]
    };
    let mut d = dims(h);
    while d[0].saturating_mul(d[1]).saturating_mul(d[2]) > MAX_CELLS {
        h *= 1.5;
        d = dims(h);
    }
    let cell = |p: Point3| -> [usize; 3] {
        [
            (((p.x - glo.x) / h) as usize).min(d[0] - 1),
            (((p.y - glo.y) / h) as usize).min(d[1] - 1),
            (((p.z - glo.z) / h) as usize).min(d[2] - 1),
        ]
    };
    let ranges: Vec<([usize; 3], [usize; 3])> = boxes.iter().map(|&(lo, hi)| (cell(lo), cell(hi))).collect();
    let idx = |c: [usize; 3]| (c[2] * d[1] + c[1]) * d[0] + c[0];
    let ncell = d[0] * d[1] * d[2];
    let mut counts = vec![0u32; ncell + 1];
    for (lo, hi) in &ranges {
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    counts[idx([x, y, z]) + 1] += 1;
                }
            }
        }
    }
    for i in 0..ncell {
        counts[i + 1] += counts[i];
    }
    let mut fill = counts.clone();
    let mut items = vec![0u32; counts[ncell] as usize];
    for (s, (lo, hi)) in ranges.iter().enumerate() {
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    let c = idx([x, y, z]);
                    items[fill[c] as usize] = s as u32;
                    fill[c] += 1;
                }
            }
        }
    }
    for (s, (lo, hi)) in ranges.iter().enumerate() {
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    let c = idx([x, y, z]);
                    for &o in &items[counts[c] as usize..counts[c + 1] as usize] {
                        let o = o as usize;
                        if o <= s {
                            continue;
                        }
                        let olo = ranges[o].0;
                        // report the pair only from the lowest shared cell
                        let first = [lo[0].max(olo[0]), lo[1].max(olo[1]), lo[2].max(olo[2])];
                        if first != [x, y, z] {
                            continue;
                        }
                        let (a, b) = (&boxes[s], &boxes[o]);
                        if a.0.x > b.1.x || b.0.x > a.1.x || a.0.y > b.1.y || b.0.y > a.1.y || a.0.z > b.1.z || b.0.z > a.1.z {
                            continue;
                        }
                        visit(s, o);
                    }
                }
            }
        }
    }
}
