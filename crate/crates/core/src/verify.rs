//! Acceptance suite: twelve numbered criteria with pass/fail verdicts.

use std::fmt;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::diagnostics::{
    diagnose, flatness_table, nearest_interface_point, nondegeneracy, rescale, rescale_level_set, two_plane_fit, weiss_phi, DiagnoseOptions,
    TwoPlane,
};
use crate::elliptic::{solve_phase, CoefficientField, PhaseRegion};
use crate::error::{Error, Result};
use crate::fbiter::{run, step_with_state, IterationOptions, RunOutput, StepState};
use crate::fields::{interface_extract, Grid2, LevelSet, Phase, ScalarField};
use crate::geom;
use crate::prandtl::{self, PbParams};
use crate::scenarios;

/// Criteria that fail on a correct build because the stated claim is false for the derived profiles.
pub const KNOWN_UNATTAINABLE: &[u8] = &[10];

pub const ALL: [u8; 12] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    #[default]
    Quick,
    Full,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub level: Level,
    /// Negative control: run every fbiter criterion with the jump sign flipped.
    pub break_jump_sign: bool,
    /// Subset to run; all when `None`.
    pub criteria: Option<Vec<u8>>,
    /// Directory for audit tables.
    pub out: Option<PathBuf>,
}


#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {:<28} {:>7.2}s  {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.seconds,
            self.detail
        )
    }
}

pub fn name(id: u8) -> &'static str {
    match id {
        1 => "two-plane stationarity",
        2 => "Weiss closed form",
        3 => "rescaling identity",
        4 => "Weiss monotonicity",
        5 => "PB roots",
        6 => "PB solver cross-check",
        7 => "elliptic convergence",
        8 => "flatness decay",
        9 => "non-degeneracy",
        10 => "PB ordering",
        11 => "negative control",
        12 => "open-question audits",
        _ => "unknown",
    }
}

/// Shared expensive runs.
pub struct Context {
    opts: VerifyOptions,
    pb: Option<std::result::Result<(RunOutput, Duration), String>>,
    plane: Option<std::result::Result<RunOutput, String>>,
}

type Verdict = std::result::Result<(bool, String), Error>;

impl Context {
    pub fn new(opts: VerifyOptions) -> Self {
        Context { opts, pb: None, plane: None }
    }

    fn iteration(&self, mut o: IterationOptions) -> IterationOptions {
        o.flip_jump_sign = self.opts.break_jump_sign;
        o
    }

    fn pb_params() -> PbParams {
        PbParams::new(1.0, 1.0, 8.0, 1.0).expect("valid PB parameters")
    }

    fn pb_run(&mut self) -> std::result::Result<&(RunOutput, Duration), String> {
        if self.pb.is_none() {
            let r = (|| {
                let s = scenarios::pb_disk(193, &Self::pb_params(), 0.5)?;
                let t = Instant::now();
                let out = run(&s.problem, &s.phi0, &self.iteration(s.options))?;
                Ok::<_, Error>((out, t.elapsed()))
            })();
            self.pb = Some(r.map_err(|e| e.to_string()));
        }
        self.pb.as_ref().unwrap().as_ref().map_err(|e| e.clone())
    }

    fn plane_run(&mut self) -> std::result::Result<&RunOutput, String> {
        if self.plane.is_none() {
            let r = (|| {
                let s = scenarios::perturbed_plane(129, 0.05)?;
                run(&s.problem, &s.phi0, &self.iteration(s.options))
            })();
            self.plane = Some(r.map_err(|e| e.to_string()));
        }
        self.plane.as_ref().unwrap().as_ref().map_err(|e| e.clone())
    }

    pub fn run_criterion(&mut self, id: u8) -> CriterionResult {
        let t = Instant::now();
        let verdict: Verdict = match id {
            1 => self.c1(),
            2 => c2(),
            3 => self.c3(),
            4 => self.c4(),
            5 => c5(),
            6 => self.c6(),
            7 => self.c7(),
            8 => self.c8(),
            9 => self.c9(),
            10 => c10(),
            11 => c11(),
            12 => self.c12(),
            _ => Err(Error::InvalidParameter(format!("no criterion {id}"))),
        };
        let (passed, detail) = verdict.unwrap_or_else(|e| (false, format!("error: {e}")));
        CriterionResult {
            id,
            name: name(id),
            passed,
            detail,
            seconds: t.elapsed().as_secs_f64(),
        }
    }

    fn c1(&mut self) -> Verdict {
        let betas: &[f64] = &[0.0, 0.5, 1.0, 2.0];
        let mut worst = String::new();
        for &beta in betas {
            let (ok, d) = stationarity(beta, self.opts.break_jump_sign)?;
            if !ok {
                return Ok((false, format!("beta = {beta}: {d}")));
            }
            worst = d;
        }
        Ok((true, format!("all beta; last: {worst}")))
    }

    fn pb_weiss_inputs(&mut self) -> std::result::Result<(ScalarField, LevelSet, geom::Vec2), Error> {
        let q = Self::pb_params().sigma;
        let (out, _) = self.pb_run().map_err(Error::InvalidParameter)?;
        let x0 = nearest_interface_point(&out.phi, [0.5, 0.0])?;
        Ok((out.u.scaled(1.0 / q.sqrt()), out.phi.clone(), x0))
    }

    fn c3(&mut self) -> Verdict {
        let (u, phi, x0) = self.pb_weiss_inputs()?;
        let fit = two_plane_fit(&u, x0, 0.5)?;
        let (alpha, beta) = (fit.plane.alpha(), fit.plane.beta);
        let lambdas: &[f64] = match self.opts.level {
            Level::Quick => &[0.5],
            Level::Full => &[0.5, 0.25],
        };
        let mut detail = Vec::new();
        let mut ok = true;
        for &lam in lambdas {
            let ul = rescale(&u, lam, x0)?;
            let pl = rescale_level_set(&phi, lam, x0)?;
            let lhs = weiss_phi(&ul, &pl, x0, 0.4, alpha, beta, 2)?.phi;
            let rhs = weiss_phi(&u, &phi, x0, lam * 0.4, alpha, beta, 2)?.phi;
            let pass = (lhs - rhs).abs() <= 0.02 * rhs.abs() + 0.01;
            ok &= pass;
            detail.push(format!("lambda {lam}: {lhs:.5} vs {rhs:.5}"));
        }
        Ok((ok, detail.join("; ")))
    }

    fn c4(&mut self) -> Verdict {
        let q = Self::pb_params().sigma;
        let (out, _) = self.pb_run().map_err(Error::InvalidParameter)?;
        let x0 = nearest_interface_point(&out.phi, [0.5, 0.0])?;
        let radii: Vec<f64> = (1..=8).map(|k| k as f64 / 16.0).collect();
        let opts = DiagnoseOptions {
            center: Some(x0),
            radii,
            jump: Some(q),
            ..DiagnoseOptions::default()
        };
        let rep = diagnose(&out.u, &out.phi, &opts)?;
        let v = &rep.summary.weiss_monotone;
        let first = rep.rows.first().map(|r| r.phi_weiss).unwrap_or(f64::NAN);
        let last = rep.rows.last().map(|r| r.phi_weiss).unwrap_or(f64::NAN);
        Ok((
            v.monotone,
            format!("Phi {first:.4} -> {last:.4} over r = 1/16..1/2, first violation {:?}", v.first_violation),
        ))
    }

    fn c6(&mut self) -> Verdict {
        let target = prandtl::exact_roots(&Self::pb_params())?.1;
        let sizes: &[usize] = match self.opts.level {
            Level::Quick => &[193],
            Level::Full => &[193, 385],
        };
        let mut detail = Vec::new();
        let mut ok = true;
        for &n in sizes {
            let (out, elapsed) = if n == 193 {
                let (o, e) = self.pb_run().map_err(Error::InvalidParameter)?;
                (o.clone(), *e)
            } else {
                let s = scenarios::pb_disk(n, &Self::pb_params(), 0.5)?;
                let t = Instant::now();
                let o = run(&s.problem, &s.phi0, &self.iteration(s.options))?;
                (o, t.elapsed())
            };
            let h = out.phi.grid().h();
            let c = interface_extract(&out.phi);
            let dev = c.vertices().map(|p| (geom::norm(p) - target).abs()).fold(0.0, f64::max);
            let pass = out.report.converged && dev <= 2.0 * h && elapsed < Duration::from_secs(300);
            ok &= pass;
            detail.push(format!(
                "{n}^2: converged {} in {} its, max |r - {target:.5}| = {dev:.4} (2h = {:.4}), {:.1}s",
                out.report.converged,
                out.report.iterations,
                2.0 * h,
                elapsed.as_secs_f64()
            ));
        }
        Ok((ok, detail.join("; ")))
    }

    fn c7(&mut self) -> Verdict {
        let e1 = manufactured_error(65)?;
        let e2 = manufactured_error(129)?;
        let ratio = e1 / e2;
        let mut ok = (3.5..=4.5).contains(&ratio);
        let mut detail = format!("errors {e1:.3e}, {e2:.3e}, ratio {ratio:.3}");
        if self.opts.level == Level::Full {
            let errs: Vec<f64> = [33, 65, 129, 257].iter().map(|&n| disk_error(n)).collect::<Result<_>>()?;
            let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
            ok &= orders.iter().all(|&p| p >= 1.8);
            detail.push_str(&format!("; disk orders {:?}", orders.iter().map(|p| format!("{p:.2}")).collect::<Vec<_>>()));
        }
        Ok((ok, detail))
    }

    fn c8(&mut self) -> Verdict {
        let out = self.plane_run().map_err(Error::InvalidParameter)?;
        let center = nearest_interface_point(&out.phi, [0.0, 0.0])?;
        let table = flatness_table(&out.phi, center, &[0.5, 0.25, 0.125])?;
        let ratio = table.decay_ratio();
        let ok = out.report.converged && ratio.is_some_and(|r| r <= 0.9);
        Ok((
            ok,
            format!(
                "delta/r = [{}], ratio {:?}, converged {}",
                table.normalized().iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(", "),
                ratio,
                out.report.converged
            ),
        ))
    }

    fn c9(&mut self) -> Verdict {
        let out = self.plane_run().map_err(Error::InvalidParameter)?;
        let h = out.phi.grid().h();
        let c0 = nondegeneracy(&out.u, &out.phi, 2.0 * h)?;
        Ok((c0 >= 0.5, format!("c0_est = {c0:.4}")))
    }

    fn c12(&mut self) -> Verdict {
        let radii = [0.2, 0.3, 0.4, 0.5, 0.6];
        let div = prandtl::divergence_table(&[0.5, 1.0, 2.0], &radii);
        let lin = |a: f64, b: f64, n: usize| -> Vec<f64> { (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect() };
        let imp = prandtl::implication_sweep(&lin(0.1, 2.0, 20), &lin(0.5, 20.0, 20));
        if let Some(dir) = &self.opts.out {
            std::fs::create_dir_all(dir)?;
            write_rows(dir.join("audit_divergence.csv"), &div)?;
            write_rows(dir.join("audit_implication.csv"), &imp)?;
        }
        let max_at = |w: f64| div.iter().filter(|r| r.h2_omega == w).map(|r| r.difference.abs()).fold(0.0, f64::max);
        let failures = imp.iter().filter(|r| !r.implication_holds).count();
        let holds = imp.iter().filter(|r| r.condition).count();
        let ok = div.len() == 15 && imp.len() == 400 && max_at(1.0) < 1e-12;
        Ok((
            ok,
            format!(
                "max |printed_f - exact| = {:.3e} / {:.1e} / {:.3e} at h^2 omega = 0.5 / 1 / 2; condition holds at {holds} of 400 points, implication fails at {failures}",
                max_at(0.5),
                max_at(1.0),
                max_at(2.0)
            ),
        ))
    }
}

fn write_rows<T: Serialize>(path: PathBuf, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Criterion-1 check for one β: `run` converges at `‖J‖ ≤ 5h²` and ten forced steps drift less than `h/10`.
pub fn stationarity(beta: f64, flip: bool) -> Verdict {
    let s = scenarios::two_plane(129, beta)?;
    let h = s.phi0.grid().h();
    let tol = 5.0 * h * h;
    let opts = IterationOptions {
        tol_jump: Some(tol),
        flip_jump_sign: flip,
        ..s.options.clone()
    };
    let t = Instant::now();
    let converged = match run(&s.problem, &s.phi0, &opts) {
        Ok(out) => out.report.converged,
        Err(e) => return Ok((false, format!("run failed: {e}"))),
    };
    let start = interface_extract(&s.phi0);
    let mut phi = s.phi0.clone();
    let mut state = StepState::default();
    let mut worst = 0.0f64;
    for it in 1..=10 {
        match step_with_state(&s.problem, &phi, &opts, &mut state, it) {
            Ok(out) => {
                worst = worst.max(out.defect);
                phi = out.phi_next;
            }
            Err(e) => return Ok((false, format!("step {it} failed: {e}"))),
        }
    }
    let drift = start.hausdorff(&interface_extract(&phi));
    let elapsed = t.elapsed();
    let ok = converged && worst <= tol && drift < 0.1 * h && elapsed < Duration::from_secs(30);
    Ok((
        ok,
        format!(
            "converged {converged}, max |J| = {worst:.2e} (5h^2 = {tol:.2e}), drift {drift:.2e} (h/10 = {:.2e}), {:.1}s",
            0.1 * h,
            elapsed.as_secs_f64()
        ),
    ))
}

fn c2() -> Verdict {
    let g = scenarios::unit_box(129)?;
    let phi = LevelSet::from_fn(g, |_, y| y);
    let mut detail = Vec::new();
    let mut ok = true;
    for beta in [0.0, 1.0] {
        let plane = TwoPlane::new(beta, [0.0, 1.0], 0.0)?;
        let u = plane.field(g, [0.0, 0.0]);
        let expected = (1.0 + 2.0 * beta * beta) * std::f64::consts::FRAC_PI_2;
        let vals: Vec<f64> = [0.1, 0.2, 0.3, 0.4, 0.5]
            .iter()
            .map(|&r| weiss_phi(&u, &phi, [0.0, 0.0], r, plane.alpha(), beta, 2).map(|w| w.phi))
            .collect::<Result<_>>()?;
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let close = vals.iter().all(|v| (v - expected).abs() <= 0.02 * expected);
        let flat = hi - lo <= 0.01 * expected;
        ok &= close && flat;
        detail.push(format!("beta {beta}: {lo:.5}..{hi:.5} vs {expected:.5}"));
    }
    Ok((ok, detail.join("; ")))
}

fn c5() -> Verdict {
    let t = Instant::now();
    let p = PbParams::new(1.0, 0.0, 8.0, 1.0)?;
    let (z, rho_star) = prandtl::z0(p.h, p.mu, p.omega);
    let e = std::f64::consts::E;
    let (r1, r2) = prandtl::roots(&p)?;
    let res1 = (prandtl::printed_f(r1, p.h, p.mu, p.omega)? - p.target()).abs();
    let res2 = (prandtl::printed_f(r2, p.h, p.mu, p.omega)? - p.target()).abs();
    let elapsed = t.elapsed();
    let ok = (z - e * e).abs() < 1e-9
        && (rho_star - 1.0 / e).abs() < 1e-9
        && (r1 - 0.270).abs() < 5e-4
        && (r2 - 0.472).abs() < 5e-3
        && res1 < 1e-10
        && res2 < 1e-10
        && elapsed < Duration::from_secs(1);
    Ok((
        ok,
        format!("z0 - e^2 = {:.1e}, rho* - 1/e = {:.1e}, rho = {r1:.6} / {r2:.6}, residuals {res1:.1e} / {res2:.1e}", z - e * e, rho_star - 1.0 / e),
    ))
}

fn c10() -> Verdict {
    let rep = prandtl::ordering_check(1.0, 1.2, 1.0, 1.0, 8.0, 100)?;
    Ok((
        rep.radii_ordered && rep.profiles_ordered,
        format!(
            "radii {:.4} > {:.4} > {:.4}: {}; printed profile chain {} (first violation at r = {:?}); monotone chain holds: {}",
            rep.rho2_big,
            rep.rho2_small,
            rep.rho1_small,
            rep.radii_ordered,
            rep.profiles_ordered,
            rep.witness,
            rep.monotone_chain
        ),
    ))
}

fn c11() -> Verdict {
    let (broken_passes, detail) = stationarity(0.5, true)?;
    Ok((!broken_passes, format!("flipped sign, beta = 0.5: {detail}")))
}

fn manufactured_error(n: usize) -> Result<f64> {
    let (exact, f) = scenarios::manufactured_sine(n)?;
    let g = *exact.grid();
    let region = PhaseRegion::new(LevelSet::from_fn(g, |_, _| 1.0), Phase::Positive, exact.clone());
    let u = solve_phase(&CoefficientField::identity(g), &f, &region, 1e-10)?;
    Ok(u.max_diff(&exact))
}

/// `Δu = 1` in the disk of radius 1/2 with zero data: exact `(|x|² − 1/4)/4`.
fn disk_error(n: usize) -> Result<f64> {
    let g: Grid2 = scenarios::unit_box(n)?;
    let phi = LevelSet::circle(g, [0.0, 0.0], 0.5);
    let region = PhaseRegion::new(phi, Phase::Negative, ScalarField::zeros(g));
    let u = solve_phase(&CoefficientField::identity(g), &ScalarField::constant(g, 1.0), &region, 1e-11)?;
    let mut err = 0.0f64;
    for k in 0..g.len() {
        if region.is_unknown(k) {
            let p = g.node_point(k);
            err = err.max((u.at(k) - 0.25 * (geom::dot(p, p) - 0.25)).abs());
        }
    }
    Ok(err)
}

/// Runs the selected criteria in order.
pub fn run_suite(opts: &VerifyOptions) -> Vec<CriterionResult> {
    let ids = opts.criteria.clone().unwrap_or_else(|| ALL.to_vec());
    let mut ctx = Context::new(opts.clone());
    ids.into_iter().map(|id| ctx.run_criterion(id)).collect()
}
