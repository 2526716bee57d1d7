//! Slab flatness of the interface and the non-degeneracy ratio.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{interface_extract, Contours, LevelSet, ScalarField};
use crate::geom::{self, Vec2};

/// Interface vertices inside `B_r(center)` plus the points where segments cross the circle.
pub fn interface_points_in_ball(contours: &Contours, center: Vec2, r: f64) -> Vec<Vec2> {
    let inside = |p: Vec2| geom::dist(p, center) <= r;
    let mut pts: Vec<Vec2> = contours.vertices().filter(|&p| inside(p)).collect();
    for poly in &contours.polylines {
        for (a, b) in poly.segments() {
            if inside(a) == inside(b) {
                continue;
            }
            // |a + t (b − a) − center| = r
            let d = geom::sub(b, a);
            let p = geom::sub(a, center);
            let qa = geom::dot(d, d);
            let qb = 2.0 * geom::dot(p, d);
            let qc = geom::dot(p, p) - r * r;
            let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
            for t in [(-qb - disc) / (2.0 * qa), (-qb + disc) / (2.0 * qa)] {
                if (0.0..=1.0).contains(&t) {
                    pts.push(geom::add(a, geom::scale(d, t)));
                }
            }
        }
    }
    pts
}

fn slab(points: &[Vec2], center: Vec2, nu: Vec2) -> f64 {
    points
        .iter()
        .map(|&p| geom::dot(geom::sub(p, center), nu).abs())
        .fold(0.0, f64::max)
}

/// Half-width `max |⟨p − center, ν⟩|` over interface points in `B_r(center)`.
pub fn flatness_slab(phi: &LevelSet, center: Vec2, r: f64, nu: Vec2) -> Result<f64> {
    let n = geom::norm(nu);
    if !(n > 0.0) {
        return Err(Error::InvalidParameter("slab direction must be nonzero".into()));
    }
    let pts = interface_points_in_ball(&interface_extract(phi), center, r);
    if pts.is_empty() {
        return Err(Error::NoInterfaceInBall);
    }
    Ok(slab(&pts, center, geom::scale(nu, 1.0 / n)).min(r))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatnessEntry {
    pub r: f64,
    pub nu: Vec2,
    pub delta: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FlatnessTable {
    pub center: Vec2,
    pub rows: Vec<FlatnessEntry>,
}

impl FlatnessTable {
    /// `δ(r)/r` per row.
    pub fn normalized(&self) -> Vec<f64> {
        self.rows.iter().map(|e| e.delta / e.r).collect()
    }

    /// Least-squares ratio of consecutive normalized flatness values, going from the largest
    /// radius down; below one means flatter at smaller scales.
    ///
    /// Rows are expected at geometric radii in any order; `None` with fewer than two rows or a zero entry.
    pub fn decay_ratio(&self) -> Option<f64> {
        let mut rows: Vec<&FlatnessEntry> = self.rows.iter().collect();
        rows.sort_by(|a, b| b.r.total_cmp(&a.r));
        let ys: Vec<f64> = rows.iter().map(|e| (e.delta / e.r).ln()).collect();
        if ys.len() < 2 || ys.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let n = ys.len() as f64;
        let xm = (n - 1.0) / 2.0;
        let ym = ys.iter().sum::<f64>() / n;
        let (mut sxy, mut sxx) = (0.0, 0.0);
        for (k, y) in ys.iter().enumerate() {
            let dx = k as f64 - xm;
            sxy += dx * (y - ym);
            sxx += dx * dx;
        }
        Some((sxy / sxx).exp())
    }
}

/// Direction minimizing the slab width over `points`, with the width.
pub fn minimal_slab(points: &[Vec2], center: Vec2) -> (Vec2, f64) {
    use std::f64::consts::PI;
    let width = |a: f64| slab(points, center, [a.sin(), a.cos()]);
    let n = 360;
    let step = PI / n as f64;
    let (mut best_a, mut best_w) = (0.0f64, width(0.0));
    for k in 1..n {
        let a = -0.5 * PI + step * k as f64;
        let w = width(a);
        if w < best_w || (w == best_w && a.abs() < best_a.abs()) {
            best_a = a;
            best_w = w;
        }
    }
    // golden section inside the neighboring samples
    let (mut lo, mut hi) = (best_a - step, best_a + step);
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - gr * (hi - lo);
    let mut x2 = lo + gr * (hi - lo);
    let (mut f1, mut f2) = (width(x1), width(x2));
    while hi - lo > 1e-10 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = width(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = width(x2);
        }
    }
    let a = 0.5 * (lo + hi);
    if width(a) < best_w {
        best_a = a;
        best_w = width(a);
    }
    ([best_a.sin(), best_a.cos()], best_w)
}

/// Minimal slab `(ν(r), δ(r))` at each radius.
pub fn flatness_table(phi: &LevelSet, center: Vec2, radii: &[f64]) -> Result<FlatnessTable> {
    let contours = interface_extract(phi);
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let pts = interface_points_in_ball(&contours, center, r);
        if pts.is_empty() {
            return Err(Error::NoInterfaceInBall);
        }
        let (nu, delta) = minimal_slab(&pts, center);
        rows.push(FlatnessEntry { r, nu, delta: delta.min(r) });
    }
    Ok(FlatnessTable { center, rows })
}

/// Principal direction of the vertex cloud.
fn principal_axis(points: &[Vec2]) -> Vec2 {
    let n = points.len() as f64;
    let m = points.iter().fold([0.0, 0.0], |a, p| geom::add(a, *p));
    let m = geom::scale(m, 1.0 / n);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let d = geom::sub(*p, m);
        sxx += d[0] * d[0];
        sxy += d[0] * d[1];
        syy += d[1] * d[1];
    }
    let a = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    [a.cos(), a.sin()]
}

/// Fails with `NotAGraph` unless every polyline is open and strictly monotone
/// along one tangent direction, with disjoint projections.
pub fn graph_direction(contours: &Contours) -> Result<Vec2> {
    let pts: Vec<Vec2> = contours.vertices().collect();
    if pts.len() < 2 {
        return Err(Error::EmptyInterface);
    }
    let tau = principal_axis(&pts);
    let mut ranges = Vec::new();
    for poly in &contours.polylines {
        if poly.closed {
            return Err(Error::NotAGraph);
        }
        let s: Vec<f64> = poly.points.iter().map(|&p| geom::dot(p, tau)).collect();
        let inc = s.windows(2).all(|w| w[1] > w[0]);
        let dec = s.windows(2).all(|w| w[1] < w[0]);
        if !(inc || dec) {
            return Err(Error::NotAGraph);
        }
        let (lo, hi) = (s.iter().copied().fold(f64::INFINITY, f64::min), s.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        ranges.push((lo, hi));
    }
    ranges.sort_by(|a, b| a.0.total_cmp(&b.0));
    if ranges.windows(2).any(|w| w[1].0 < w[0].1) {
        return Err(Error::NotAGraph);
    }
    Ok(tau)
}

/// `min u(x) / dist(x, F)` over positive-phase nodes at distance at least `2 delta_band` from the interface.
pub fn nondegeneracy(u: &ScalarField, phi: &LevelSet, delta_band: f64) -> Result<f64> {
    if !u.grid().same_layout(phi.grid()) {
        return Err(Error::GridMismatch);
    }
    if !(delta_band > 0.0) {
        return Err(Error::InvalidParameter(format!("delta_band = {delta_band}")));
    }
    let contours = interface_extract(phi);
    graph_direction(&contours)?;
    let g = u.grid();
    let mut best: Option<f64> = None;
    for k in 0..g.len() {
        if phi.phi(k) <= 0.0 {
            continue;
        }
        let d = contours.distance(g.node_point(k));
        if d < 2.0 * delta_band {
            continue;
        }
        let ratio = u.at(k) / d;
        best = Some(best.map_or(ratio, |b: f64| b.min(ratio)));
    }
    best.ok_or(Error::NoQualifyingNodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid2;

    fn grid(n: usize) -> Grid2 {
        Grid2::new(n, n, [-1.0, -1.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn slab_examples() {
        let g = grid(129);
        let h = g.h();
        let flat = LevelSet::from_fn(g, |_, y| y);
        assert!(flatness_slab(&flat, [0.0, 0.0], 0.5, [0.0, 1.0]).unwrap() < 0.5 * h);
        let wavy = LevelSet::from_fn(g, |x, y| y - 0.05 * (std::f64::consts::PI * x).sin());
        let d = flatness_slab(&wavy, [0.0, 0.0], 1.0, [0.0, 1.0]).unwrap();
        assert!((d - 0.05).abs() < h, "{d}");
        let t = 10f64.to_radians();
        let tilted = LevelSet::from_fn(g, |x, y| y * t.cos() - x * t.sin());
        let d = flatness_slab(&tilted, [0.0, 0.0], 0.5, [0.0, 1.0]).unwrap();
        assert!((d - 0.5 * t.sin()).abs() < h, "{d}");
        let far = LevelSet::from_fn(g, |_, y| y - 0.9);
        assert!(matches!(flatness_slab(&far, [0.0, 0.0], 0.5, [0.0, 1.0]), Err(Error::NoInterfaceInBall)));
    }

    #[test]
    fn table_finds_tilt() {
        let g = grid(129);
        let t = 10f64.to_radians();
        let tilted = LevelSet::from_fn(g, |x, y| y * t.cos() - x * t.sin());
        let table = flatness_table(&tilted, [0.0, 0.0], &[0.25, 0.5]).unwrap();
        for e in &table.rows {
            assert!(e.delta < 1e-9, "{e:?}");
            assert!((e.nu[0] + t.sin()).abs() < 1e-6);
        }
    }

    #[test]
    fn decay_ratio_of_geometric_rows() {
        let table = FlatnessTable {
            center: [0.0, 0.0],
            rows: [0.5, 0.25, 0.125]
                .iter()
                .enumerate()
                .map(|(k, &r)| FlatnessEntry { r, nu: [0.0, 1.0], delta: r * 0.1 * 0.5f64.powi(k as i32) })
                .collect(),
        };
        assert!((table.decay_ratio().unwrap() - 0.5).abs() < 1e-12);
        let mut rev = table.clone();
        rev.rows.reverse();
        assert_eq!(rev.decay_ratio(), table.decay_ratio());
    }

    #[test]
    fn nondegeneracy_examples() {
        let g = grid(129);
        let phi = LevelSet::from_fn(g, |_, y| y);
        let u0 = ScalarField::from_fn(g, |_, y| y.max(0.0));
        let c = nondegeneracy(&u0, &phi, 0.05).unwrap();
        assert!((c - 1.0).abs() < 0.05);
        let u1 = ScalarField::from_fn(g, |_, y| if y > 0.0 { 2f64.sqrt() * y } else { y });
        assert!((nondegeneracy(&u1, &phi, 0.05).unwrap() - 2f64.sqrt()).abs() < 0.05 * 2f64.sqrt());
        let half = nondegeneracy(&u0.scaled(0.5), &phi, 0.05).unwrap();
        assert!((half - 0.5 * c).abs() < 1e-15);
    }

    #[test]
    fn closed_interface_is_not_a_graph() {
        let g = grid(65);
        let phi = LevelSet::circle(g, [0.0, 0.0], 0.5);
        let u = ScalarField::zeros(g);
        assert!(matches!(nondegeneracy(&u, &phi, 0.05), Err(Error::NotAGraph)));
    }
}
