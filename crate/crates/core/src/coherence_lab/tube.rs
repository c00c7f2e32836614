//! Area of the unit neighbourhood `U₁(J)` of a polyline, counted on a grid of
//! square cells anchored at the origin.

use crate::torus_map::Vec2;

pub const DEFAULT_CELL: f64 = 0.01;

/// Number of cell centres strictly within distance 1 of the polyline, times
/// `cell²`. Each row of centres meets every segment's stadium in one
/// interval; rows are swept with an active-segment list and the merged
/// intervals counted exactly.
pub fn tube_area(curve: &[Vec2], cell: f64) -> f64 {
    assert!(cell > 0.0, "cell must be positive");
    if curve.is_empty() {
        return 0.0;
    }
    let segs: Vec<(Vec2, Vec2)> = if curve.len() == 1 {
        vec![(curve[0], curve[0])]
    } else {
        curve.windows(2).map(|w| (w[0], w[1])).collect()
    };
    let row_of = |y: f64| (y / cell - 0.5).ceil() as i64;
    let row_to = |y: f64| (y / cell - 0.5).floor() as i64;
    let mut spans: Vec<(i64, i64, usize)> = segs
        .iter()
        .enumerate()
        .map(|(k, (a, b))| {
            (
                row_of(a[1].min(b[1]) - 1.0),
                row_to(a[1].max(b[1]) + 1.0),
                k,
            )
        })
        .filter(|s| s.0 <= s.1)
        .collect();
    spans.sort_unstable();
    let (first, last) = (spans[0].0, spans.iter().map(|s| s.1).max().unwrap());

    let mut count: u64 = 0;
    let mut next = 0;
    let mut active: Vec<(i64, usize)> = Vec::new();
    let mut ivs: Vec<(f64, f64)> = Vec::new();
    for r in first..=last {
        while next < spans.len() && spans[next].0 <= r {
            active.push((spans[next].1, spans[next].2));
            next += 1;
        }
        active.retain(|&(end, _)| end >= r);
        if active.is_empty() {
            continue;
        }
        let y = (r as f64 + 0.5) * cell;
        ivs.clear();
        ivs.extend(
            active
                .iter()
                .filter_map(|&(_, k)| stadium_row(segs[k].0, segs[k].1, y)),
        );
        ivs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let mut cur: Option<(f64, f64)> = None;
        for &(lo, hi) in &ivs {
            match cur {
                Some((clo, chi)) if lo <= chi => cur = Some((clo, chi.max(hi))),
                _ => {
                    if let Some(c) = cur {
                        count += centres_inside(c, cell);
                    }
                    cur = Some((lo, hi));
                }
            }
        }
        if let Some(c) = cur {
            count += centres_inside(c, cell);
        }
    }
    count as f64 * cell * cell
}

fn centres_inside((lo, hi): (f64, f64), cell: f64) -> u64 {
    let c0 = (lo / cell - 0.5).floor() as i64 + 1;
    let c1 = (hi / cell - 0.5).ceil() as i64 - 1;
    (c1 - c0 + 1).max(0) as u64
}

/// `{x : dist((x, y), [a, b]) < 1}` as an open interval.
fn stadium_row(a: Vec2, b: Vec2, y: f64) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut widen = |l: f64, h: f64| {
        if l < h {
            lo = lo.min(l);
            hi = hi.max(h);
        }
    };
    for c in [a, b] {
        let dy = y - c[1];
        if dy.abs() < 1.0 {
            let r = (1.0 - dy * dy).sqrt();
            widen(c[0] - r, c[0] + r);
        }
    }
    let d = [b[0] - a[0], b[1] - a[1]];
    let len = d[0].hypot(d[1]);
    if len > 0.0 {
        let u = [d[0] / len, d[1] / len];
        let nrm = [-u[1], u[0]];
        // Band |(P − a)·n| < 1 and slab 0 ≤ (P − a)·u ≤ len, both linear in x.
        let mut l = f64::NEG_INFINITY;
        let mut h = f64::INFINITY;
        let mut clip = |coef: f64, offset: f64, min: f64, max: f64| {
            // min < coef·(x − a_x) + offset < max
            if coef == 0.0 {
                if !(offset > min && offset < max) {
                    h = f64::NEG_INFINITY;
                }
            } else {
                let (p, q) = ((min - offset) / coef + a[0], (max - offset) / coef + a[0]);
                l = l.max(p.min(q));
                h = h.min(p.max(q));
            }
        };
        let dy = y - a[1];
        clip(nrm[0], dy * nrm[1], -1.0, 1.0);
        clip(u[0], dy * u[1], 0.0, len);
        widen(l, h);
    }
    (lo < hi).then_some((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn stadium_of_segment() {
        for &len in &[0.5, 3.0, 40.0] {
            let a = tube_area(&[[0.3, 0.7], [0.3 + len, 0.7]], 0.01);
            let exact = 2.0 * len + PI;
            assert!((a - exact).abs() / exact < 0.02, "L={len}: {a} vs {exact}");
        }
        // Oblique segment.
        let a = tube_area(&[[0.0, 0.0], [3.0, 4.0]], 0.01);
        assert!((a - (10.0 + PI)).abs() / (10.0 + PI) < 0.02);
    }

    #[test]
    fn unit_disc() {
        let a = tube_area(&[[0.123, -4.5]], 0.01);
        assert!((a - PI).abs() / PI < 0.02);
    }

    #[test]
    fn folded_curve_counts_overlap_once() {
        // Out and back along the same segment: same set as the segment.
        let once = tube_area(&[[0.0, 0.0], [5.0, 0.0]], 0.02);
        let twice = tube_area(&[[0.0, 0.0], [5.0, 0.0], [0.0, 0.0]], 0.02);
        assert_eq!(once, twice);
    }

    #[test]
    fn subdivision_does_not_change_area() {
        let coarse = tube_area(&[[0.0, 0.0], [2.0, 1.0]], 0.01);
        let fine: Vec<Vec2> = (0..=50)
            .map(|k| [k as f64 * 0.04, k as f64 * 0.02])
            .collect();
        let a = tube_area(&fine, 0.01);
        assert!((a - coarse).abs() < 1e-9 * coarse.max(1.0) + 2e-4);
    }
}
