use crate::elliptic::sparse::{self, Csr, KrylovStats};
use crate::elliptic::CoefficientField;
use crate::error::{Error, Result};
use crate::fields::{Domain, LevelSet, Phase, ScalarField};
use crate::geom;

/// Smallest admissible cut fraction. A node with a closer axis crossing is pinned to the crossing
/// value instead of carrying an unknown.
pub const THETA_MIN: f64 = 1e-3;

/// One phase of a level-set partition together with its Dirichlet data.
#[derive(Clone, Debug)]
pub struct PhaseRegion {
    pub phi: LevelSet,
    pub phase: Phase,
    /// Trace on the outer boundary (box edge, or the circle in ball mode).
    pub outer: ScalarField,
    pub interface_value: f64,
    pub domain: Domain,
}

impl PhaseRegion {
    pub fn new(phi: LevelSet, phase: Phase, outer: ScalarField) -> Self {
        let domain = Domain::full(*phi.grid());
        PhaseRegion {
            phi,
            phase,
            outer,
            interface_value: 0.0,
            domain,
        }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_interface_value(mut self, v: f64) -> Self {
        self.interface_value = v;
        self
    }

    /// Interior unknown: active, off the outer boundary, strictly inside the phase, not pinned.
    #[inline]
    pub fn is_unknown(&self, k: usize) -> bool {
        self.phase.contains(self.phi.phi(k)) && self.domain.is_interior(k) && self.pinned(k).is_none()
    }

    /// Value of an interior phase node whose nearest axis crossing lies within `THETA_MIN` cells.
    pub fn pinned(&self, k: usize) -> Option<f64> {
        let g = self.phi.grid();
        let (i, j) = g.ij(k);
        let mut best: Option<(f64, f64)> = None;
        for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let Some((a, b)) = g.offset(i, j, di, dj) else { continue };
            if let Some(c) = crossing(self, k, g.idx(a, b)) {
                if c.0 < THETA_MIN && best.is_none_or(|x| c.0 < x.0) {
                    best = Some(c);
                }
            }
        }
        best.map(|b| b.1)
    }

    pub fn interior_count(&self) -> usize {
        (0..self.phi.grid().len()).filter(|&k| self.is_unknown(k)).count()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Ordering {
    #[default]
    Natural,
    Reversed,
}

#[derive(Clone, Debug)]
pub struct SolveOptions<'a> {
    /// Target for the ∞-norm of the discrete residual, in operator units.
    pub tol: f64,
    pub ordering: Ordering,
    pub initial_guess: Option<&'a ScalarField>,
}

impl SolveOptions<'_> {
    pub fn new(tol: f64) -> Self {
        SolveOptions {
            tol,
            ordering: Ordering::Natural,
            initial_guess: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PhaseSolution {
    pub u: ScalarField,
    pub unknowns: usize,
    pub iterations: usize,
    pub residual: f64,
}

/// A neighbor as seen from an unknown node.
#[derive(Clone, Copy, Debug)]
enum Neighbor {
    Unknown(usize),
    Known(f64),
    /// Fictitious value `(value - (1 - theta) u_c) / theta`.
    Ghost { theta: f64, value: f64 },
}

/// Solves `div(A ∇u) = f` on one phase with Dirichlet data on the interface and outer boundary.
///
/// Returns `u` on the phase (outer data on its boundary nodes), zero elsewhere.
pub fn solve_phase(a: &CoefficientField, f: &ScalarField, region: &PhaseRegion, tol: f64) -> Result<ScalarField> {
    solve_phase_with(a, f, region, &SolveOptions::new(tol)).map(|s| s.u)
}

pub fn solve_phase_with(
    a: &CoefficientField,
    f: &ScalarField,
    region: &PhaseRegion,
    opts: &SolveOptions,
) -> Result<PhaseSolution> {
    let grid = *region.phi.grid();
    for g in [a.grid(), f.grid(), region.outer.grid(), region.domain.grid()] {
        if !g.same_layout(&grid) {
            return Err(Error::GridMismatch);
        }
    }
    if !opts.tol.is_finite() || opts.tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("solver tolerance {}", opts.tol)));
    }
    let n_nodes = grid.len();
    let mut nodes: Vec<usize> = (0..n_nodes).filter(|&k| region.is_unknown(k)).collect();
    if nodes.is_empty() {
        return Err(Error::EmptyRegion { phase: region.phase });
    }
    if opts.ordering == Ordering::Reversed {
        nodes.reverse();
    }
    let mut index = vec![usize::MAX; n_nodes];
    for (r, &k) in nodes.iter().enumerate() {
        index[k] = r;
    }

    let (mat, rhs) = assemble(a, f, region, &nodes, &index);
    let n = nodes.len();
    let mut x: Vec<f64> = match opts.initial_guess {
        Some(g) => nodes.iter().map(|&k| g.at(k)).collect(),
        None => vec![0.0; n],
    };
    let cap = 20 * n_nodes;
    let stats: KrylovStats = if a.has_cross_terms() {
        sparse::bicgstab(&mat, &rhs, &mut x, opts.tol, cap)?
    } else {
        sparse::pcg(&mat, &rhs, &mut x, opts.tol, cap)?
    };

    let mut u = vec![0.0; n_nodes];
    for k in 0..n_nodes {
        if index[k] != usize::MAX {
            u[k] = x[index[k]];
        } else if region.phase.contains(region.phi.phi(k)) {
            if region.domain.is_outer_boundary(k) {
                u[k] = region.outer.at(k);
            } else if let Some(v) = region.pinned(k).filter(|_| region.domain.is_interior(k)) {
                u[k] = v;
            }
        }
    }
    Ok(PhaseSolution {
        u: ScalarField::new(grid, u)?,
        unknowns: n,
        iterations: stats.iterations,
        residual: stats.residual,
    })
}

/// Nearest boundary crossing on the segment from `c` to the axis neighbor `nb`: (fraction, value).
fn crossing(region: &PhaseRegion, c: usize, nb: usize) -> Option<(f64, f64)> {
    let phi = &region.phi;
    let mut best: Option<(f64, f64)> = None;
    if !region.phase.contains(phi.phi(nb)) {
        let (pc, pn) = (phi.phi(c), phi.phi(nb));
        best = Some((pc / (pc - pn), region.interface_value));
    }
    if !region.domain.is_active(nb) {
        if let Some(t) = region.domain.exit_fraction(c, nb) {
            if best.is_none_or(|(b, _)| t < b) {
                let g = region.domain.grid();
                let (pc, pn) = (g.node_point(c), g.node_point(nb));
                let p = geom::add(pc, geom::scale(geom::sub(pn, pc), t));
                let v = region.outer.sample(p).unwrap_or(region.outer.at(c));
                best = Some((t, v));
            }
        }
    }
    best
}

fn classify(region: &PhaseRegion, index: &[usize], c: usize, nb: usize) -> Neighbor {
    let in_phase = region.phase.contains(region.phi.phi(nb));
    if in_phase && region.domain.is_active(nb) {
        return if index[nb] != usize::MAX {
            Neighbor::Unknown(index[nb])
        } else if let Some(v) = region.pinned(nb).filter(|_| region.domain.is_interior(nb)) {
            Neighbor::Known(v)
        } else {
            Neighbor::Known(region.outer.at(nb))
        };
    }
    let (theta, value) = crossing(region, c, nb).unwrap_or((1.0, region.interface_value));
    Neighbor::Ghost {
        theta: theta.clamp(THETA_MIN, 1.0),
        value,
    }
}

/// Rows of `-L_h u = -f` over the unknowns, with known values moved to the right side.
fn assemble(a: &CoefficientField, f: &ScalarField, region: &PhaseRegion, nodes: &[usize], index: &[usize]) -> (Csr, Vec<f64>) {
    let grid = region.phi.grid();
    let nx = grid.nx() as isize;
    let h2 = grid.h() * grid.h();
    let cross = a.has_cross_terms();
    let mut mat = Csr::with_capacity(nodes.len(), nodes.len() * if cross { 9 } else { 5 });
    let mut rhs = Vec::with_capacity(nodes.len());
    let mut row: Vec<(usize, f64)> = Vec::with_capacity(9);
    let at = |c: usize, di: isize, dj: isize| (c as isize + di + dj * nx) as usize;

    for (r, &c) in nodes.iter().enumerate() {
        let mut diag = 0.0;
        let mut b = -f.at(c);
        // `w` multiplies u_nb in L_h u; the flux form adds -w u_c for axis neighbors.
        let add = |nb: usize, w: f64, axis: bool, diag: &mut f64, b: &mut f64, row: &mut Vec<(usize, f64)>| {
            if axis {
                *diag += w;
            }
            match classify(region, index, c, nb) {
                Neighbor::Unknown(m) => row.push((m, -w)),
                Neighbor::Known(v) => *b += w * v,
                Neighbor::Ghost { theta, value } => {
                    *b += w * value / theta;
                    *diag += w * (1.0 - theta) / theta;
                }
            }
        };
        for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let nb = at(c, di, dj);
            let face = if di != 0 {
                0.5 * (a.a11(c) + a.a11(nb))
            } else {
                0.5 * (a.a22(c) + a.a22(nb))
            };
            add(nb, face / h2, true, &mut diag, &mut b, &mut row);
        }
        if cross {
            let q = 0.25 / h2;
            let (e, w, n, s) = (a.a12(at(c, 1, 0)), a.a12(at(c, -1, 0)), a.a12(at(c, 0, 1)), a.a12(at(c, 0, -1)));
            for (di, dj, coef) in [
                (1, 1, (e + n) * q),
                (1, -1, -(e + s) * q),
                (-1, 1, -(w + n) * q),
                (-1, -1, (w + s) * q),
            ] {
                if coef != 0.0 {
                    add(at(c, di, dj), coef, false, &mut diag, &mut b, &mut row);
                }
            }
        }
        row.push((r, diag));
        mat.push_row(&mut row);
        rhs.push(b);
    }
    (mat, rhs)
}
