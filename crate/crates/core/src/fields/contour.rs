//! Zero-contour extraction by marching squares, and polyline geometry.

use std::collections::HashMap;

use crate::fields::{Grid2, LevelSet};
use crate::geom::{self, Vec2};

/// One connected piece of the discrete interface.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub points: Vec<Vec2>,
    /// Closed loops do not repeat their first point.
    pub closed: bool,
}

impl Polyline {
    /// Segments as point pairs, including the closing one for loops.
    pub fn segments(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.points.len();
        let count = if self.closed && n > 2 { n } else { n.saturating_sub(1) };
        (0..count).map(move |s| (self.points[s], self.points[(s + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| geom::dist(a, b)).sum()
    }

    pub fn segment_count(&self) -> usize {
        self.segments().count()
    }
}

/// Result of [`interface_extract`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Contours {
    pub polylines: Vec<Polyline>,
    /// Set when `phi` has a single sign and no interface exists.
    pub single_signed: bool,
}

impl Contours {
    pub fn is_empty(&self) -> bool {
        self.polylines.iter().all(|p| p.points.is_empty())
    }

    pub fn vertex_count(&self) -> usize {
        self.polylines.iter().map(|p| p.points.len()).sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.polylines.iter().flat_map(|p| p.points.iter().copied())
    }

    pub fn length(&self) -> f64 {
        self.polylines.iter().map(Polyline::length).sum()
    }

    /// Nearest point on any segment (or lone vertex).
    pub fn nearest(&self, p: Vec2) -> Option<NearestPoint> {
        let mut best: Option<NearestPoint> = None;
        for (c, poly) in self.polylines.iter().enumerate() {
            if poly.points.len() == 1 {
                let d = geom::dist(p, poly.points[0]);
                if best.is_none_or(|b| d < b.distance) {
                    best = Some(NearestPoint {
                        distance: d,
                        component: c,
                        segment: 0,
                        t: 0.0,
                        point: poly.points[0],
                    });
                }
            }
            for (s, (a, b)) in poly.segments().enumerate() {
                let (d, t) = geom::segment_distance(p, a, b);
                if best.is_none_or(|bb| d < bb.distance) {
                    best = Some(NearestPoint {
                        distance: d,
                        component: c,
                        segment: s,
                        t,
                        point: geom::add(a, geom::scale(geom::sub(b, a), t)),
                    });
                }
            }
        }
        best
    }

    /// Distance from `p` to the interface, `+inf` when empty.
    pub fn distance(&self, p: Vec2) -> f64 {
        self.nearest(p).map_or(f64::INFINITY, |n| n.distance)
    }

    /// Symmetric Hausdorff distance between vertex sets and segments.
    pub fn hausdorff(&self, other: &Contours) -> f64 {
        let one_way = |a: &Contours, b: &Contours| {
            a.vertices().map(|v| b.distance(v)).fold(0.0, f64::max)
        };
        one_way(self, other).max(one_way(other, self))
    }

    /// For every node within `band` of the interface, the nearest point data.
    pub fn nearest_in_band(&self, grid: &Grid2, band: f64) -> Vec<Option<NearestPoint>> {
        let mut out: Vec<Option<NearestPoint>> = vec![None; grid.len()];
        let h = grid.h();
        let [x0, y0, _, _] = grid.bbox();
        let reach = (band / h).ceil() as isize + 1;
        for (c, poly) in self.polylines.iter().enumerate() {
            let segs: Vec<(Vec2, Vec2)> = if poly.points.len() == 1 {
                vec![(poly.points[0], poly.points[0])]
            } else {
                poly.segments().collect()
            };
            for (s, (a, b)) in segs.into_iter().enumerate() {
                let lo_i = ((a[0].min(b[0]) - x0) / h).floor() as isize - reach;
                let hi_i = ((a[0].max(b[0]) - x0) / h).ceil() as isize + reach;
                let lo_j = ((a[1].min(b[1]) - y0) / h).floor() as isize - reach;
                let hi_j = ((a[1].max(b[1]) - y0) / h).ceil() as isize + reach;
                for j in lo_j.max(0)..=hi_j.min(grid.ny() as isize - 1) {
                    for i in lo_i.max(0)..=hi_i.min(grid.nx() as isize - 1) {
                        let k = grid.idx(i as usize, j as usize);
                        let p = grid.node_point(k);
                        let (d, t) = geom::segment_distance(p, a, b);
                        if d > band {
                            continue;
                        }
                        if out[k].is_none_or(|n| d < n.distance) {
                            out[k] = Some(NearestPoint {
                                distance: d,
                                component: c,
                                segment: s,
                                t,
                                point: geom::add(a, geom::scale(geom::sub(b, a), t)),
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NearestPoint {
    pub distance: f64,
    pub component: usize,
    /// Segment index within the component; segment `s` joins vertices `s` and `s + 1`.
    pub segment: usize,
    /// Parameter along the segment.
    pub t: f64,
    pub point: Vec2,
}

/// True if a cell's corners are split by the zero set (`phi > 0` versus `phi <= 0`).
pub fn cell_is_cut(phi: &LevelSet, i: usize, j: usize) -> bool {
    let s = [
        phi.phi_at(i, j) > 0.0,
        phi.phi_at(i + 1, j) > 0.0,
        phi.phi_at(i + 1, j + 1) > 0.0,
        phi.phi_at(i, j + 1) > 0.0,
    ];
    s.iter().any(|&b| b) && !s.iter().all(|&b| b)
}

/// Extracts the zero contour of `phi` as polylines.
///
/// Vertices lie on cell edges at the linear-interpolation crossing. Saddle
/// cells are resolved by the sign of the average of the four corners.
pub fn interface_extract(phi: &LevelSet) -> Contours {
    if !phi.has_both_signs() {
        return Contours {
            polylines: Vec::new(),
            single_signed: true,
        };
    }
    let grid = *phi.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let pos = |i: usize, j: usize| phi.phi_at(i, j) > 0.0;

    // Edge ids: 2k for the edge (i,j)-(i+1,j), 2k+1 for (i,j)-(i,j+1).
    let h_edge = |i: usize, j: usize| 2 * grid.idx(i, j);
    let v_edge = |i: usize, j: usize| 2 * grid.idx(i, j) + 1;
    let edge_point = |e: usize| -> Vec2 {
        let k = e / 2;
        let (i, j) = grid.ij(k);
        let (a, b) = if e % 2 == 0 {
            ((i, j), (i + 1, j))
        } else {
            ((i, j), (i, j + 1))
        };
        let pa = phi.phi_at(a.0, a.1);
        let pb = phi.phi_at(b.0, b.1);
        let t = pa / (pa - pb);
        let xa = grid.point(a.0, a.1);
        let xb = grid.point(b.0, b.1);
        geom::add(xa, geom::scale(geom::sub(xb, xa), t))
    };

    let mut segments: Vec<(usize, usize)> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let c = [pos(i, j), pos(i + 1, j), pos(i + 1, j + 1), pos(i, j + 1)];
            // e0 bottom, e1 right, e2 top, e3 left
            let e = [h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)];
            let crossing = [c[0] != c[1], c[1] != c[2], c[3] != c[2], c[0] != c[3]];
            let n = crossing.iter().filter(|&&b| b).count();
            match n {
                0 => {}
                2 => {
                    let mut it = (0..4).filter(|&q| crossing[q]);
                    let a = it.next().unwrap();
                    let b = it.next().unwrap();
                    segments.push((e[a], e[b]));
                }
                4 => {
                    let avg = 0.25
                        * (phi.phi_at(i, j)
                            + phi.phi_at(i + 1, j)
                            + phi.phi_at(i + 1, j + 1)
                            + phi.phi_at(i, j + 1));
                    let center_pos = avg > 0.0;
                    // isolate the corners whose sign differs from the center
                    let corner_edges = [(3, 0), (0, 1), (1, 2), (2, 3)];
                    for (q, &(ea, eb)) in corner_edges.iter().enumerate() {
                        if c[q] != center_pos {
                            segments.push((e[ea], e[eb]));
                        }
                    }
                }
                _ => unreachable!("a square has an even number of sign changes"),
            }
        }
    }

    let mut by_edge: HashMap<usize, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        by_edge.entry(a).or_default().push(s);
        by_edge.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let other_end = |s: usize, e: usize| {
        let (a, b) = segments[s];
        if a == e {
            b
        } else {
            a
        }
    };
    let next_segment = |e: usize, s: usize, used: &[bool]| -> Option<usize> {
        by_edge[&e].iter().copied().find(|&t| t != s && !used[t])
    };

    let mut polylines = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (e_first, e_second) = segments[start];
        let mut forward = vec![e_first, e_second];
        let mut cur_seg = start;
        let mut cur_edge = e_second;
        let mut closed = false;
        while let Some(s) = next_segment(cur_edge, cur_seg, &used) {
            used[s] = true;
            let nxt = other_end(s, cur_edge);
            if nxt == e_first {
                closed = true;
                break;
            }
            forward.push(nxt);
            cur_seg = s;
            cur_edge = nxt;
        }
        if !closed {
            let mut backward = Vec::new();
            let mut cur_seg = start;
            let mut cur_edge = e_first;
            while let Some(s) = next_segment(cur_edge, cur_seg, &used) {
                used[s] = true;
                let nxt = other_end(s, cur_edge);
                backward.push(nxt);
                cur_seg = s;
                cur_edge = nxt;
            }
            backward.reverse();
            backward.extend(forward);
            forward = backward;
        }
        let mut points: Vec<Vec2> = forward.iter().map(|&e| edge_point(e)).collect();
        // zero-valued nodes can make adjacent edge crossings coincide
        points.dedup_by(|a, b| geom::dist(*a, *b) < 1e-12 * grid.h());
        if closed && points.len() > 1 && geom::dist(points[0], *points.last().unwrap()) < 1e-12 * grid.h() {
            points.pop();
        }
        polylines.push(Polyline { points, closed });
    }
    Contours {
        polylines,
        single_signed: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid2 {
        Grid2::new(n, n, [-1.0, -1.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn line_contour_is_exact() {
        let phi = LevelSet::from_fn(grid(65), |_, y| y);
        let c = interface_extract(&phi);
        assert_eq!(c.polylines.len(), 1);
        assert!(!c.polylines[0].closed);
        assert!(c.vertices().all(|p| p[1].abs() < 1e-15));
        assert!((c.length() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn circle_perimeter() {
        for n in [65, 129] {
            let phi = LevelSet::from_fn(grid(n), |x, y| x * x + y * y - 0.25);
            let c = interface_extract(&phi);
            assert_eq!(c.polylines.len(), 1);
            assert!(c.polylines[0].closed);
            let rel = (c.length() - std::f64::consts::PI).abs() / std::f64::consts::PI;
            assert!(rel < 0.02, "n = {n}: rel err {rel}");
        }
    }

    #[test]
    fn single_signed_level_set_is_flagged() {
        let phi = LevelSet::from_fn(grid(17), |_, _| 1.0);
        let c = interface_extract(&phi);
        assert!(c.single_signed && c.polylines.is_empty());
    }

    #[test]
    fn consecutive_vertices_are_close() {
        let g = grid(65);
        let phi = LevelSet::from_fn(g, |x, y| (x - 0.1).hypot(y + 0.05) - 0.6);
        let c = interface_extract(&phi);
        for poly in &c.polylines {
            for (a, b) in poly.segments() {
                assert!(geom::dist(a, b) <= 2.0 * g.h());
            }
        }
    }

    #[test]
    fn saddle_uses_center_average() {
        let g = Grid2::new(8, 8, [0.0, 0.0, 7.0, 7.0]).unwrap();
        // checkerboard on one cell; center average positive keeps positive corners joined
        let phi = LevelSet::from_fn(g, |x, y| {
            let (i, j) = (x.round() as i32, y.round() as i32);
            match (i, j) {
                (3, 3) | (4, 4) => 2.0,
                (4, 3) | (3, 4) => -1.0,
                _ => -1.0,
            }
        });
        let c = interface_extract(&phi);
        // both positive nodes form a single connected blob: one closed loop
        assert_eq!(c.polylines.len(), 1);
        assert!(c.polylines[0].closed);
    }
}
