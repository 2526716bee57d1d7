//! Signed-distance reinitialization by fast sweeping.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fields::contour;
use crate::fields::{LevelSet, ScalarField};

const MAX_PASSES: usize = 50;

/// Replaces `phi` by a signed distance field with the same zero contour.
///
/// Band nodes (corners of cut cells) keep their values up to one positive
/// factor per connected piece of the band, chosen as the median gradient
/// magnitude over its cut cells. A common factor leaves every edge crossing in
/// place, so the extracted interface is unchanged and a second application
/// is a no-op up to round-off. The remaining nodes are filled by Godunov
/// fast sweeping over four orderings with the band frozen. Signs follow the
/// input, zero counting as negative.
pub fn reinitialize(phi: &LevelSet) -> Result<LevelSet> {
    if !phi.has_both_signs() {
        return Err(Error::SingleSigned);
    }
    let grid = *phi.grid();
    let h = grid.h();
    let (nx, ny) = (grid.nx(), grid.ny());
    let sign: Vec<f64> = phi
        .values()
        .iter()
        .map(|&p| if p > 0.0 { 1.0 } else { -1.0 })
        .collect();

    let mut band = vec![false; grid.len()];
    let mut parent: Vec<usize> = (0..grid.len()).collect();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            if !contour::cell_is_cut(phi, i, j) {
                continue;
            }
            let c = [
                grid.idx(i, j),
                grid.idx(i + 1, j),
                grid.idx(i + 1, j + 1),
                grid.idx(i, j + 1),
            ];
            for q in 0..4 {
                band[c[q]] = true;
                union(&mut parent, c[0], c[q]);
            }
        }
    }

    let mut slopes: HashMap<usize, Vec<f64>> = HashMap::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            if !contour::cell_is_cut(phi, i, j) {
                continue;
            }
            let [p00, p10, p11, p01] = [
                phi.phi_at(i, j),
                phi.phi_at(i + 1, j),
                phi.phi_at(i + 1, j + 1),
                phi.phi_at(i, j + 1),
            ];
            let gx = 0.5 * ((p10 - p00) + (p11 - p01)) / h;
            let gy = 0.5 * ((p01 - p00) + (p11 - p10)) / h;
            slopes
                .entry(find(&mut parent, grid.idx(i, j)))
                .or_default()
                .push(gx.hypot(gy));
        }
    }
    let scale: HashMap<usize, f64> = slopes
        .into_iter()
        .map(|(root, mut v)| {
            v.sort_by(f64::total_cmp);
            let m = v[v.len() / 2];
            (root, if m > f64::MIN_POSITIVE { m } else { 1.0 })
        })
        .collect();

    let mut dist: Vec<f64> = (0..grid.len())
        .map(|k| {
            if band[k] {
                phi.phi(k).abs() / scale[&find(&mut parent, k)]
            } else {
                f64::INFINITY
            }
        })
        .collect();

    let frozen = band;
    let mut passes = 0;
    loop {
        if passes == MAX_PASSES {
            return Err(Error::ReinitNotConverged(MAX_PASSES));
        }
        passes += 1;
        let mut changed = 0.0f64;
        for (rev_i, rev_j) in [(false, false), (true, false), (true, true), (false, true)] {
            for jj in 0..ny {
                let j = if rev_j { ny - 1 - jj } else { jj };
                for ii in 0..nx {
                    let i = if rev_i { nx - 1 - ii } else { ii };
                    let k = grid.idx(i, j);
                    if frozen[k] {
                        continue;
                    }
                    let a = neighbor_min(&dist, i, j, nx, ny, true);
                    let b = neighbor_min(&dist, i, j, nx, ny, false);
                    let cand = godunov(a, b, h);
                    if cand < dist[k] {
                        let delta = if dist[k].is_finite() {
                            dist[k] - cand
                        } else {
                            f64::INFINITY
                        };
                        changed = changed.max(delta);
                        dist[k] = cand;
                    }
                }
            }
        }
        if changed <= 1e-13 * h {
            break;
        }
    }

    let values: Vec<f64> = dist.iter().zip(&sign).map(|(d, s)| s * d).collect();
    Ok(LevelSet::new(ScalarField::new(grid, values)?))
}

fn find(parent: &mut [usize], mut k: usize) -> usize {
    while parent[k] != k {
        parent[k] = parent[parent[k]];
        k = parent[k];
    }
    k
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

fn neighbor_min(d: &[f64], i: usize, j: usize, nx: usize, ny: usize, along_x: bool) -> f64 {
    let mut m = f64::INFINITY;
    if along_x {
        if i > 0 {
            m = m.min(d[j * nx + i - 1]);
        }
        if i + 1 < nx {
            m = m.min(d[j * nx + i + 1]);
        }
    } else {
        if j > 0 {
            m = m.min(d[(j - 1) * nx + i]);
        }
        if j + 1 < ny {
            m = m.min(d[(j + 1) * nx + i]);
        }
    }
    m
}

/// Upwind solution of `|grad d| = 1` from the two axis minima.
fn godunov(a: f64, b: f64, h: f64) -> f64 {
    let lo = a.min(b);
    if !lo.is_finite() {
        return f64::INFINITY;
    }
    if (a - b).abs() >= h {
        lo + h
    } else {
        0.5 * (a + b + (2.0 * h * h - (a - b) * (a - b)).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{gradient, interface_extract, GradientMode, Grid2};

    fn grid() -> Grid2 {
        Grid2::new(65, 65, [-1.0, -1.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn scaled_distance_is_restored() {
        let g = grid();
        let r = reinitialize(&LevelSet::from_fn(g, |_, y| 3.0 * y)).unwrap();
        let exact = ScalarField::from_fn(g, |_, y| y);
        assert!(r.field().max_diff(&exact) < 1e-10);
    }

    #[test]
    fn cubic_becomes_distance() {
        let g = grid();
        let r = reinitialize(&LevelSet::from_fn(g, |_, y| y * y * y + 0.3 * y)).unwrap();
        let exact = ScalarField::from_fn(g, |_, y| y);
        assert!(r.field().max_diff(&exact) < g.h());
    }

    #[test]
    fn circle_becomes_radial_distance() {
        let g = grid();
        let r = reinitialize(&LevelSet::from_fn(g, |x, y| x * x + y * y - 0.25)).unwrap();
        let exact = ScalarField::from_fn(g, |x, y| x.hypot(y) - 0.5);
        assert!(r.field().max_diff(&exact) < 2.0 * g.h(), "{}", r.field().max_diff(&exact));
    }

    #[test]
    fn idempotent() {
        let g = grid();
        let phi = LevelSet::from_fn(g, |x, y| (x - 0.1).powi(2) / 0.3 + y * y / 0.2 - 1.0);
        let once = reinitialize(&phi).unwrap();
        let twice = reinitialize(&once).unwrap();
        let d = once.field().max_diff(twice.field());
        assert!(d < 1e-6, "{d}");
        let moved = interface_extract(&phi).hausdorff(&interface_extract(&once));
        assert!(moved < 1e-12, "{moved}");
    }

    #[test]
    fn gradient_is_unit_away_from_interface() {
        let g = grid();
        let phi = LevelSet::from_fn(g, |x, y| (x - 0.1).powi(2) / 0.3 + y * y / 0.2 - 1.0);
        let r = reinitialize(&phi).unwrap();
        let c = interface_extract(&r);
        for k in 0..g.len() {
            let (i, j) = g.ij(k);
            if g.is_boundary(i, j) || c.distance(g.node_point(k)) <= 2.0 * g.h() {
                continue;
            }
            // outside a convex curve the distance has no kinks
            if r.phi(k) <= 0.0 {
                continue;
            }
            let d = gradient(r.field(), (i, j), GradientMode::Centered, &r).unwrap();
            let n = d[0].hypot(d[1]);
            assert!((n - 1.0).abs() < 0.1, "node {k}: {n}");
        }
    }

    #[test]
    fn single_sign_is_rejected() {
        let g = grid();
        assert!(matches!(
            reinitialize(&LevelSet::from_fn(g, |_, _| 1.0)),
            Err(Error::SingleSigned)
        ));
    }
}
