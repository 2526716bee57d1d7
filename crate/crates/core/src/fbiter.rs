//! Free-boundary relaxation: solve both phases with zero interface data, then
//! move the level set by the jump defect `|∇_A u⁺|² − |∇_A u⁻|² − Q`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::elliptic::{interface_normal_gradient_in, solve_phase_with, CoefficientField, PhaseRegion, SolveOptions};
use crate::error::{Error, Result};
use crate::fields::io::fmt_f64;
use crate::fields::{gradient, interface_extract, reinitialize, Contours, Domain, GradientMode, LevelSet, Phase, ScalarField};
use crate::geom;

/// The two-phase problem `div(A∇u) = f±` in `{±phi > 0}` with `|∇_A u⁺|² − |∇_A u⁻|² = Q`.
#[derive(Clone, Debug)]
pub struct PhaseProblem {
    pub a: CoefficientField,
    pub f_plus: ScalarField,
    pub f_minus: ScalarField,
    pub q: ScalarField,
    /// Signed Dirichlet data for the composite `u` on the outer boundary.
    pub outer: ScalarField,
    pub domain: Domain,
}

impl PhaseProblem {
    pub fn new(
        a: CoefficientField,
        f_plus: ScalarField,
        f_minus: ScalarField,
        q: ScalarField,
        outer: ScalarField,
    ) -> Result<Self> {
        let domain = Domain::full(*a.grid());
        let p = PhaseProblem {
            a,
            f_plus,
            f_minus,
            q,
            outer,
            domain,
        };
        p.validate()?;
        Ok(p)
    }

    /// Same right-hand side in both phases.
    pub fn shared_f(a: CoefficientField, f: ScalarField, q: ScalarField, outer: ScalarField) -> Result<Self> {
        Self::new(a, f.clone(), f, q, outer)
    }

    /// Restricts the problem to a disk; the circle carries the outer data.
    pub fn with_ball(mut self, center: geom::Vec2, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius {radius}")));
        }
        self.domain = Domain::ball(*self.a.grid(), center, radius);
        Ok(self)
    }

    pub fn grid(&self) -> &crate::fields::Grid2 {
        self.a.grid()
    }

    fn validate(&self) -> Result<()> {
        let g = self.a.grid();
        for f in [&self.f_plus, &self.f_minus, &self.q, &self.outer] {
            if !f.grid().same_layout(g) {
                return Err(Error::GridMismatch);
            }
        }
        if let Some(k) = self.q.values().iter().position(|&v| v <= 0.0) {
            return Err(Error::InvalidParameter(format!("jump target must be positive, Q = {} at node {k}", self.q.at(k))));
        }
        Ok(())
    }

    /// Copy shifted by `(dx, dy)` with identical node values.
    pub fn translated(&self, dx: f64, dy: f64) -> Result<PhaseProblem> {
        let g = self.grid().translated(dx, dy);
        let a = CoefficientField::new(
            g,
            (0..g.len()).map(|k| self.a.a11(k)).collect(),
            (0..g.len()).map(|k| self.a.a12(k)).collect(),
            (0..g.len()).map(|k| self.a.a22(k)).collect(),
        )?;
        Ok(PhaseProblem {
            a,
            f_plus: self.f_plus.with_grid(g)?,
            f_minus: self.f_minus.with_grid(g)?,
            q: self.q.with_grid(g)?,
            outer: self.outer.with_grid(g)?,
            domain: self.domain.translated(dx, dy),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IterationOptions {
    /// Target for `‖J‖_∞`; `None` means `1e-3 · max Q`.
    pub tol_jump: Option<f64>,
    /// Interface displacement target per step, in units of h.
    pub tol_move: f64,
    pub max_iters: usize,
    pub kappa: f64,
    pub reinit_every: usize,
    /// Residual target of the phase solves.
    pub solve_tol: f64,
    /// Fault injection for harness negative controls: uses `q⁻ − q⁺ − Q`.
    #[doc(hidden)]
    #[serde(skip)]
    pub flip_jump_sign: bool,
}

impl Default for IterationOptions {
    fn default() -> Self {
        IterationOptions {
            tol_jump: None,
            tol_move: 1e-2,
            max_iters: 200,
            kappa: 0.5,
            reinit_every: 5,
            solve_tol: 1e-8,
            flip_jump_sign: false,
        }
    }
}

impl IterationOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if let Some(t) = self.tol_jump {
            if !(t > 0.0) {
                return bad(format!("tol_jump = {t}"));
            }
        }
        if !(self.tol_move > 0.0) {
            return bad(format!("tol_move = {}", self.tol_move));
        }
        if self.max_iters == 0 || self.reinit_every == 0 {
            return bad("max_iters and reinit_every must be positive".into());
        }
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return bad(format!("kappa = {} must lie in (0, 1]", self.kappa));
        }
        if !(self.solve_tol > 0.0) {
            return bad(format!("solve_tol = {}", self.solve_tol));
        }
        Ok(())
    }

    pub fn jump_tolerance(&self, problem: &PhaseProblem) -> f64 {
        self.tol_jump.unwrap_or_else(|| 1e-3 * problem.q.max())
    }
}

/// Jump defect at every vertex of the extracted interface.
#[derive(Clone, Debug)]
pub struct InterfaceJump {
    pub contours: Contours,
    /// `J` per polyline per vertex.
    pub values: Vec<Vec<f64>>,
    pub q_plus: Vec<Vec<f64>>,
    pub q_minus: Vec<Vec<f64>>,
    /// Vertices next to the outer boundary whose probes left the domain; their `J` is copied from a neighbor.
    pub skipped: usize,
}

impl InterfaceJump {
    pub fn linf(&self) -> f64 {
        self.measured().fold(0.0, |m, (j, _, _)| m.max(j.abs()))
    }

    /// `(J, q⁺, q⁻)` at vertices that were actually measured.
    fn measured(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values.iter().zip(&self.q_plus).zip(&self.q_minus).flat_map(|((j, p), m)| {
            j.iter()
                .zip(p)
                .zip(m)
                .filter(|((_, p), _)| p.is_finite())
                .map(|((j, p), m)| (*j, *p, *m))
        })
    }

    pub fn max_q_sum(&self) -> f64 {
        self.measured().fold(0.0, |m, (_, p, q)| m.max(p + q))
    }
}

/// Evaluates `J = q⁺ − q⁻ − Q` at polyline vertices of `phi` on the full box.
pub fn interface_jump(
    u_plus: &ScalarField,
    u_minus: &ScalarField,
    a: &CoefficientField,
    phi: &LevelSet,
    q: &ScalarField,
) -> Result<InterfaceJump> {
    interface_jump_in(u_plus, u_minus, a, phi, q, &Domain::full(*phi.grid()), false)
}

pub fn interface_jump_in(
    u_plus: &ScalarField,
    u_minus: &ScalarField,
    a: &CoefficientField,
    phi: &LevelSet,
    q: &ScalarField,
    domain: &Domain,
    flip: bool,
) -> Result<InterfaceJump> {
    let contours = interface_extract(phi);
    if contours.is_empty() {
        return Err(Error::EmptyInterface);
    }
    let h = phi.grid().h();
    let near_edge = |p: geom::Vec2| domain.boundary_distance(p) < 4.0 * h;
    let mut values = Vec::with_capacity(contours.polylines.len());
    let mut qp_all = Vec::with_capacity(contours.polylines.len());
    let mut qm_all = Vec::with_capacity(contours.polylines.len());
    let mut skipped = 0;
    for poly in &contours.polylines {
        let mut j = Vec::with_capacity(poly.points.len());
        let mut qp = Vec::with_capacity(poly.points.len());
        let mut qm = Vec::with_capacity(poly.points.len());
        for &p in &poly.points {
            let plus = interface_normal_gradient_in(u_plus, a, phi, p, Phase::Positive, domain);
            let minus = interface_normal_gradient_in(u_minus, a, phi, p, Phase::Negative, domain);
            match (plus, minus) {
                (Ok(gp), Ok(gm)) => {
                    let target = q.sample(p).unwrap_or(q.max());
                    let d = if flip { gm.q - gp.q - target } else { gp.q - gm.q - target };
                    j.push(d);
                    qp.push(gp.q);
                    qm.push(gm.q);
                }
                (Err(e), _) | (_, Err(e)) => {
                    if !near_edge(p) {
                        return Err(e);
                    }
                    skipped += 1;
                    j.push(f64::NAN);
                    qp.push(f64::NAN);
                    qm.push(f64::NAN);
                }
            }
        }
        fill_gaps(&mut j);
        values.push(j);
        qp_all.push(qp);
        qm_all.push(qm);
    }
    if values.iter().all(|v| v.iter().all(|x| x.is_nan())) {
        return Err(Error::EmptyInterface);
    }
    for v in &mut values {
        for x in v.iter_mut() {
            if x.is_nan() {
                *x = 0.0;
            }
        }
    }
    Ok(InterfaceJump {
        contours,
        values,
        q_plus: qp_all,
        q_minus: qm_all,
        skipped,
    })
}

/// Replaces NaN entries by the nearest finite entry along the polyline.
fn fill_gaps(v: &mut [f64]) {
    let n = v.len();
    let known: Vec<usize> = (0..n).filter(|&i| v[i].is_finite()).collect();
    if known.is_empty() {
        return;
    }
    for i in 0..n {
        if v[i].is_nan() {
            let k = known.iter().min_by_key(|&&k| k.abs_diff(i)).unwrap();
            v[i] = v[*k];
        }
    }
}

/// Band half-width of [`extend_velocity`], in units of h.
pub const BAND_CELLS: f64 = 5.0;

/// Extends vertex values to every node within `5h` of the interface by nearest-point projection,
/// interpolating linearly along the nearest segment. Zero outside the band.
pub fn extend_velocity(contours: &Contours, values: &[Vec<f64>], grid: &crate::fields::Grid2) -> Result<ScalarField> {
    if contours.vertex_count() == 0 {
        return Err(Error::EmptyInterface);
    }
    let near = contours.nearest_in_band(grid, BAND_CELLS * grid.h());
    let mut out = vec![0.0; grid.len()];
    for (k, n) in near.iter().enumerate() {
        if let Some(n) = n {
            let poly = &contours.polylines[n.component];
            let vals = &values[n.component];
            let a = vals[n.segment];
            let b = vals[(n.segment + 1) % poly.points.len()];
            out[k] = (1.0 - n.t) * a + n.t * b;
        }
    }
    ScalarField::new(*grid, out)
}

/// Mutable state of a run carried between steps.
#[derive(Clone, Debug)]
pub struct StepState {
    pub u_plus: Option<ScalarField>,
    pub u_minus: Option<ScalarField>,
    pub gain: f64,
    pub last_linf: Option<f64>,
}

impl Default for StepState {
    fn default() -> Self {
        StepState {
            u_plus: None,
            u_minus: None,
            gain: 1.0,
            last_linf: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StepOutput {
    /// Composite `u⁺ + u⁻` on the input level set.
    pub u: ScalarField,
    pub u_plus: ScalarField,
    pub u_minus: ScalarField,
    pub phi_next: LevelSet,
    pub jump: InterfaceJump,
    pub defect: f64,
    /// Hausdorff distance between the interfaces of `phi` and `phi_next`.
    pub displacement: f64,
    pub solve_iterations: (usize, usize),
}

fn threads_allowed() -> bool {
    std::env::var("FBLAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .is_none_or(|n| n > 1)
}

/// Solves both phases on `phi` in parallel (unless `FBLAB_THREADS=1`).
pub fn solve_phases(
    problem: &PhaseProblem,
    phi: &LevelSet,
    tol: f64,
    guess: (Option<&ScalarField>, Option<&ScalarField>),
) -> Result<((ScalarField, usize), (ScalarField, usize))> {
    let solve = |phase: Phase, f: &ScalarField, g: Option<&ScalarField>| -> Result<(ScalarField, usize)> {
        let region = PhaseRegion::new(phi.clone(), phase, problem.outer.clone()).with_domain(problem.domain);
        let mut o = SolveOptions::new(tol);
        o.initial_guess = g;
        let s = solve_phase_with(&problem.a, f, &region, &o)?;
        Ok((s.u, s.iterations))
    };
    if threads_allowed() {
        std::thread::scope(|s| {
            let hp = s.spawn(|| solve(Phase::Positive, &problem.f_plus, guess.0));
            let m = solve(Phase::Negative, &problem.f_minus, guess.1);
            let p = hp.join().expect("positive-phase solve panicked");
            Ok((p?, m?))
        })
    } else {
        Ok((
            solve(Phase::Positive, &problem.f_plus, guess.0)?,
            solve(Phase::Negative, &problem.f_minus, guess.1)?,
        ))
    }
}

fn check_phases(problem: &PhaseProblem, phi: &LevelSet, iteration: usize) -> Result<()> {
    for phase in [Phase::Positive, Phase::Negative] {
        let any = (0..phi.grid().len()).any(|k| phase.contains(phi.phi(k)) && problem.domain.is_interior(k));
        if !any {
            return Err(Error::PhaseCollapse { phase, iteration });
        }
    }
    Ok(())
}

/// One relaxation step from `phi`.
pub fn step(problem: &PhaseProblem, phi: &LevelSet, opts: &IterationOptions) -> Result<StepOutput> {
    step_with_state(problem, phi, opts, &mut StepState::default(), 0)
}

pub fn step_with_state(
    problem: &PhaseProblem,
    phi: &LevelSet,
    opts: &IterationOptions,
    state: &mut StepState,
    iteration: usize,
) -> Result<StepOutput> {
    opts.validate()?;
    check_phases(problem, phi, iteration)?;
    let grid = *phi.grid();
    let h = grid.h();
    let ((u_plus, it_p), (u_minus, it_m)) =
        solve_phases(problem, phi, opts.solve_tol, (state.u_plus.as_ref(), state.u_minus.as_ref()))?;
    let jump = interface_jump_in(&u_plus, &u_minus, &problem.a, phi, &problem.q, &problem.domain, opts.flip_jump_sign)?;
    let linf = jump.linf();

    if let Some(prev) = state.last_linf {
        if linf > 1.05 * prev {
            state.gain *= 0.5;
        } else {
            state.gain = (state.gain * 1.1).min(1.0);
        }
    }
    state.last_linf = Some(linf);

    let velocity = extend_velocity(&jump.contours, &jump.values, &grid)?;
    // Pseudo-time: CFL limit h / max|J|, capped so that the fastest interface mode the probes
    // resolve (growth about (q⁺ + q⁻) / (e h) per unit time) stays inside the explicit stability region.
    let tau = h / linf.max(0.25 * jump.max_q_sum()).max(f64::MIN_POSITIVE);
    let scale = opts.kappa * tau * state.gain;
    let mut next = phi.values().to_vec();
    for (k, v) in next.iter_mut().enumerate() {
        let vel = velocity.at(k);
        if vel != 0.0 {
            let g = gradient(phi.field(), grid.ij(k), GradientMode::Centered, phi)?;
            *v += scale * vel * geom::norm(g);
        }
    }
    let phi_next = LevelSet::new(ScalarField::new(grid, next)?);
    let displacement = jump.contours.hausdorff(&interface_extract(&phi_next));

    let composite: Vec<f64> = (0..grid.len())
        .map(|k| {
            let p = phi.phi(k);
            if p > 0.0 {
                u_plus.at(k)
            } else if p < 0.0 {
                u_minus.at(k)
            } else {
                0.0
            }
        })
        .collect();
    state.u_plus = Some(u_plus.clone());
    state.u_minus = Some(u_minus.clone());
    Ok(StepOutput {
        u: ScalarField::new(grid, composite)?,
        u_plus,
        u_minus,
        phi_next,
        jump,
        defect: linf,
        displacement,
        solve_iterations: (it_p, it_m),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub jump_linf: f64,
    pub displacement: f64,
    pub area_plus: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatnessRow {
    pub r: f64,
    pub delta: f64,
    pub nu: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationReport {
    pub iterations: usize,
    pub jump_linf: Vec<f64>,
    pub displacement: Vec<f64>,
    pub area_plus: Vec<f64>,
    pub converged: bool,
    /// The negative phase carries `u⁻ ≡ 0`.
    pub one_phase: bool,
    pub skipped_vertices: usize,
    pub flatness: Vec<FlatnessRow>,
}

impl IterationReport {
    pub fn records(&self) -> impl Iterator<Item = IterationRecord> + '_ {
        (0..self.iterations).map(|i| IterationRecord {
            iter: i + 1,
            jump_linf: self.jump_linf[i],
            displacement: self.displacement[i],
            area_plus: self.area_plus[i],
        })
    }

    pub fn final_defect(&self) -> Option<f64> {
        self.jump_linf.last().copied()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["iter", "jump_linf", "displacement", "area_plus"])?;
        for r in self.records() {
            out.write_record([r.iter.to_string(), fmt_f64(r.jump_linf), fmt_f64(r.displacement), fmt_f64(r.area_plus)])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Result of [`run`]; `u` and `phi` are a consistent pair (u solved on phi).
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub u: ScalarField,
    pub phi: LevelSet,
    pub report: IterationReport,
}

fn area_plus(problem: &PhaseProblem, phi: &LevelSet) -> f64 {
    let h = phi.grid().h();
    let n = (0..phi.grid().len())
        .filter(|&k| phi.phi(k) > 0.0 && problem.domain.is_active(k))
        .count();
    n as f64 * h * h
}

/// Iterates [`step_with_state`] until `‖J‖_∞ ≤ tol_jump` and the interface moves less than `tol_move · h`.
///
/// `phi0` is reinitialized first. On non-convergence the last consistent pair is returned
/// with `converged = false`.
pub fn run(problem: &PhaseProblem, phi0: &LevelSet, opts: &IterationOptions) -> Result<RunOutput> {
    opts.validate()?;
    if !phi0.has_both_signs() {
        return Err(Error::SingleSigned);
    }
    let h = phi0.grid().h();
    let tol_jump = opts.jump_tolerance(problem);
    let mut phi = reinitialize(phi0)?;
    let mut state = StepState::default();
    let mut report = IterationReport {
        iterations: 0,
        jump_linf: Vec::new(),
        displacement: Vec::new(),
        area_plus: Vec::new(),
        converged: false,
        one_phase: false,
        skipped_vertices: 0,
        flatness: Vec::new(),
    };
    let mut last: Option<(ScalarField, ScalarField)> = None;
    for it in 1..=opts.max_iters {
        let out = step_with_state(problem, &phi, opts, &mut state, it)?;
        report.iterations = it;
        report.jump_linf.push(out.defect);
        report.displacement.push(out.displacement);
        report.area_plus.push(area_plus(problem, &phi));
        report.skipped_vertices = out.jump.skipped;
        let done = out.defect <= tol_jump && out.displacement <= opts.tol_move * h;
        if done {
            report.converged = true;
            last = Some((out.u, out.u_minus));
            break;
        }
        last = Some((out.u, out.u_minus));
        phi = if it % opts.reinit_every == 0 {
            reinitialize(&out.phi_next)?
        } else {
            out.phi_next
        };
        check_phases(problem, &phi, it)?;
        if it == opts.max_iters {
            // re-solve so that the returned pair is consistent
            let ((up, _), (um, _)) =
                solve_phases(problem, &phi, opts.solve_tol, (state.u_plus.as_ref(), state.u_minus.as_ref()))?;
            let composite: Vec<f64> = (0..phi.grid().len())
                .map(|k| {
                    let p = phi.phi(k);
                    if p > 0.0 {
                        up.at(k)
                    } else if p < 0.0 {
                        um.at(k)
                    } else {
                        0.0
                    }
                })
                .collect();
            last = Some((ScalarField::new(*phi.grid(), composite)?, um));
        }
    }
    let (u, u_minus) = last.expect("at least one iteration runs");
    report.one_phase = u_minus.max_abs() == 0.0;
    report.flatness = crate::diagnostics::report_flatness(&phi, &problem.domain);
    Ok(RunOutput { u, phi, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid2;

    fn grid(n: usize) -> Grid2 {
        Grid2::new(n, n, [-1.0, -1.0, 1.0, 1.0]).unwrap()
    }

    fn two_plane(g: Grid2, beta: f64, shift: f64) -> ScalarField {
        let alpha = (1.0 + beta * beta).sqrt();
        ScalarField::from_fn(g, |_, y| {
            let t = y + shift;
            if t > 0.0 {
                alpha * t
            } else {
                beta * t
            }
        })
    }

    fn two_plane_problem(g: Grid2, beta: f64, q: f64) -> PhaseProblem {
        PhaseProblem::shared_f(
            CoefficientField::identity(g),
            ScalarField::zeros(g),
            ScalarField::constant(g, q),
            two_plane(g, beta, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn two_plane_jump_vanishes() {
        let g = grid(65);
        let phi = LevelSet::from_fn(g, |_, y| y);
        for beta in [0.0, 0.5, 2.0] {
            let u = two_plane(g, beta, 0.0);
            let up = u.map(|v| v.max(0.0));
            let um = u.map(|v| v.min(0.0));
            let j = interface_jump(&up, &um, &CoefficientField::identity(g), &phi, &ScalarField::constant(g, 1.0)).unwrap();
            assert!(j.linf() < 1e-10, "beta {beta}: {}", j.linf());
            let half = interface_jump(&up, &um, &CoefficientField::identity(g), &phi, &ScalarField::constant(g, 0.5)).unwrap();
            assert!(half.values.iter().flatten().all(|v| (v - 0.5).abs() < 1e-10));
        }
    }

    #[test]
    fn velocity_extension() {
        let g = grid(65);
        let phi = LevelSet::from_fn(g, |_, y| y - 0.01);
        let c = interface_extract(&phi);
        let ones: Vec<Vec<f64>> = c.polylines.iter().map(|p| vec![1.0; p.points.len()]).collect();
        let v = extend_velocity(&c, &ones, &g).unwrap();
        for k in 0..g.len() {
            let d = (g.node_point(k)[1] - 0.01).abs();
            let expect = if d <= 5.0 * g.h() { 1.0 } else { 0.0 };
            assert_eq!(v.at(k), expect);
        }
        let xs: Vec<Vec<f64>> = c.polylines.iter().map(|p| p.points.iter().map(|q| q[0]).collect()).collect();
        let v = extend_velocity(&c, &xs, &g).unwrap();
        for k in 0..g.len() {
            if v.at(k) != 0.0 {
                assert!((v.at(k) - g.node_point(k)[0]).abs() < g.h());
            }
        }
        assert!(matches!(extend_velocity(&Contours::default(), &[], &g), Err(Error::EmptyInterface)));
    }

    #[test]
    fn exact_two_plane_is_stationary() {
        let g = grid(65);
        let phi = LevelSet::from_fn(g, |_, y| y);
        let out = step(&two_plane_problem(g, 0.5, 1.0), &phi, &IterationOptions::default()).unwrap();
        assert!(out.defect < 1e-8 && out.displacement < 1e-6 * g.h());
    }

    #[test]
    fn weak_target_shrinks_positive_phase() {
        // Q above α² − β²: J < 0 everywhere, so phi decreases near the interface
        let g = grid(65);
        let beta = 0.5;
        let q = 1.0 + 0.5;
        let phi = LevelSet::from_fn(g, |_, y| y);
        let out = step(&two_plane_problem(g, beta, q), &phi, &IterationOptions::default()).unwrap();
        assert!(out.jump.values.iter().flatten().all(|&j| j < 0.0));
        for k in 0..g.len() {
            if (g.node_point(k)[1]).abs() < 3.0 * g.h() {
                assert!(out.phi_next.phi(k) <= phi.phi(k));
            }
        }
    }

    #[test]
    fn run_converges_immediately_on_two_plane() {
        let g = grid(65);
        let phi0 = LevelSet::from_fn(g, |_, y| y);
        let out = run(&two_plane_problem(g, 1.0, 1.0), &phi0, &IterationOptions::default()).unwrap();
        assert!(out.report.converged && out.report.iterations <= 2);
        assert!(!out.report.one_phase);
        let drift = interface_extract(&out.phi).vertices().fold(0.0f64, |m, p| m.max(p[1].abs()));
        assert!(drift < 0.5 * g.h());
    }

    #[test]
    fn one_phase_regime_is_flagged() {
        let g = grid(33);
        let phi0 = LevelSet::from_fn(g, |_, y| y);
        let out = run(&two_plane_problem(g, 0.0, 1.0), &phi0, &IterationOptions::default()).unwrap();
        assert!(out.report.converged && out.report.one_phase);
    }

    #[test]
    fn nonpositive_target_is_rejected() {
        let g = grid(17);
        assert!(PhaseProblem::shared_f(
            CoefficientField::identity(g),
            ScalarField::zeros(g),
            ScalarField::constant(g, 0.0),
            ScalarField::zeros(g)
        )
        .is_err());
    }
}
