//! Radial theory for the disk Prandtl-Batchelor problem
//! `Δu = 0` outside the vortex, `Δu = h²ω` inside, `|∇u⁺|² − |∇u⁻|² = h²σ`, `u = μ` on the unit circle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RHO_LO: f64 = 1e-8;
pub const RHO_HI: f64 = 1.0 - 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PbParams {
    pub mu: f64,
    pub omega: f64,
    pub sigma: f64,
    pub h: f64,
}

impl PbParams {
    pub fn new(mu: f64, omega: f64, sigma: f64, h: f64) -> Result<Self> {
        let p = PbParams { mu, omega, sigma, h };
        p.validate()?;
        Ok(p)
    }

    /// `mu`, `sigma`, `h` must be positive; `omega` may be zero.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("mu", self.mu), ("sigma", self.sigma), ("h", self.h)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.omega.is_finite() && self.omega >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega = {} must be non-negative",
                self.omega
            )));
        }
        Ok(())
    }

    /// Right side of the root equation, `h² σ`.
    pub fn target(&self) -> f64 {
        self.h * self.h * self.sigma
    }

    pub fn with_h(&self, h: f64) -> PbParams {
        PbParams { h, ..*self }
    }
}

/// Which jump curve to use: the threshold function with `(1/4) h² ω ρ²`, or the
/// jump of the exact radial profiles with `(1/4) h⁴ ω² ρ²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpModel {
    Printed,
    Derived,
}

impl JumpModel {
    fn coefficient(self, h: f64, omega: f64) -> f64 {
        match self {
            JumpModel::Printed => h * h * omega,
            JumpModel::Derived => (h * h * omega).powi(2),
        }
    }
}

fn curve(rho: f64, mu: f64, c: f64) -> f64 {
    let l = rho.ln();
    mu * mu / (rho * rho * l * l) - 0.25 * c * rho * rho
}

fn curve_slope(rho: f64, mu: f64, c: f64) -> f64 {
    let l = rho.ln();
    -2.0 * mu * mu * (l + 1.0) / (rho.powi(3) * l.powi(3)) - 0.5 * c * rho
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("rho = {rho} outside (0, 1)")))
    }
}

/// `f(ρ; h, μ) = μ² ρ⁻² (log ρ)⁻² − (1/4) h² ω ρ²`.
pub fn printed_f(rho: f64, h: f64, mu: f64, omega: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(curve(rho, mu, JumpModel::Printed.coefficient(h, omega)))
}

/// `|∇u⁺|² − |∇u⁻|²` of the exact radial profiles with free boundary at `rho`.
pub fn exact_jump(rho: f64, params: &PbParams) -> Result<f64> {
    check_rho(rho)?;
    Ok(curve(rho, params.mu, JumpModel::Derived.coefficient(params.h, params.omega)))
}

pub fn jump_curve(model: JumpModel, rho: f64, params: &PbParams) -> Result<f64> {
    check_rho(rho)?;
    Ok(curve(rho, params.mu, model.coefficient(params.h, params.omega)))
}

/// Minimum of [`printed_f`] over `(0, 1)` and its location.
pub fn z0(h: f64, mu: f64, omega: f64) -> (f64, f64) {
    minimize(mu, JumpModel::Printed.coefficient(h, omega))
}

pub fn z0_with(model: JumpModel, params: &PbParams) -> (f64, f64) {
    minimize(params.mu, model.coefficient(params.h, params.omega))
}

fn minimize(mu: f64, c: f64) -> (f64, f64) {
    let g = |r: f64| curve(r, mu, c);
    let inv_phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let (mut a, mut b) = (RHO_LO, RHO_HI);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (g(x1), g(x2));
    while b - a > 1e-12 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = g(x2);
        }
    }
    let mut rho = 0.5 * (a + b);
    // the value is flat near the minimum; locate the zero of the slope instead
    let (mut lo, mut hi) = ((rho - 1e-4).max(RHO_LO), (rho + 1e-4).min(RHO_HI));
    if curve_slope(lo, mu, c) < 0.0 && curve_slope(hi, mu, c) > 0.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if curve_slope(mid, mu, c) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        rho = 0.5 * (lo + hi);
    }
    (g(rho), rho)
}

/// Roots `ρ₁ < ρ₂` of `printed_f(ρ) = h² σ`.
pub fn roots(params: &PbParams) -> Result<(f64, f64)> {
    roots_with(JumpModel::Printed, params)
}

/// Roots of `exact_jump(ρ) = h² σ`, the radii of the exact radial solutions.
pub fn exact_roots(params: &PbParams) -> Result<(f64, f64)> {
    roots_with(JumpModel::Derived, params)
}

pub fn roots_with(model: JumpModel, params: &PbParams) -> Result<(f64, f64)> {
    params.validate()?;
    let (z, rho_star) = z0_with(model, params);
    let target = params.target();
    if target <= z.max(0.0) {
        return Err(Error::ConditionFails { z0: z, target });
    }
    let c = model.coefficient(params.h, params.omega);
    let g = |r: f64| curve(r, params.mu, c) - target;
    let r1 = bisect(g, RHO_LO, rho_star);
    let r2 = bisect(g, rho_star, RHO_HI);
    Ok((r1, r2))
}

/// Root of `g` on `[a, b]` with a sign change; runs until the bracket stops shrinking.
fn bisect(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut ga = g(a);
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm > 0.0) == (ga > 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    if g(a).abs() <= g(b).abs() {
        a
    } else {
        b
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Inner = 1,
    Outer = 2,
}

impl Branch {
    pub fn index(self) -> u8 {
        self as u8
    }
}

/// Radial profile `u⁺ = μ(1 − log r / log ρ)` on `[ρ, 1]`, `u⁻ = h²ω(r² − ρ²)/4` on `[0, ρ]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PbRadialSolution {
    pub params: PbParams,
    pub branch: Branch,
    pub rho: f64,
    pub model: JumpModel,
}

impl PbRadialSolution {
    /// Profile with free boundary at an arbitrary radius (used for off-root tests).
    pub fn at_radius(params: PbParams, rho: f64) -> Result<Self> {
        check_rho(rho)?;
        Ok(PbRadialSolution {
            params,
            branch: Branch::Outer,
            rho,
            model: JumpModel::Derived,
        })
    }

    pub fn u(&self, r: f64) -> f64 {
        let p = &self.params;
        if r >= self.rho {
            p.mu * (1.0 - r.ln() / self.rho.ln())
        } else {
            0.25 * p.h * p.h * p.omega * (r * r - self.rho * self.rho)
        }
    }

    /// Radial derivative from the outer (`outer = true`) or inner formula.
    pub fn du(&self, r: f64, outer: bool) -> f64 {
        let p = &self.params;
        if outer {
            -p.mu / (r * self.rho.ln())
        } else {
            0.5 * p.h * p.h * p.omega * r
        }
    }

    fn d2u(&self, r: f64, outer: bool) -> f64 {
        let p = &self.params;
        if outer {
            p.mu / (r * r * self.rho.ln())
        } else {
            0.5 * p.h * p.h * p.omega
        }
    }

    /// Radial Laplacian `u'' + u'/r` of the branch that owns `r`.
    pub fn laplacian(&self, r: f64) -> f64 {
        let outer = r >= self.rho;
        self.d2u(r, outer) + self.du(r, outer) / r
    }

    /// Jump of one-sided squared gradients at the free boundary.
    pub fn jump(&self) -> f64 {
        self.du(self.rho, true).powi(2) - self.du(self.rho, false).powi(2)
    }

    pub fn sample_profile(&self, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let r = i as f64 / (n - 1) as f64;
                (r, self.u(r))
            })
            .collect()
    }
}

/// Branch whose radius is a root of the threshold equation as printed.
pub fn radial_solution(params: &PbParams, branch: Branch) -> Result<PbRadialSolution> {
    radial_solution_with(JumpModel::Printed, params, branch)
}

/// Branch whose radius makes the profile an exact solution.
pub fn radial_solution_exact(params: &PbParams, branch: Branch) -> Result<PbRadialSolution> {
    radial_solution_with(JumpModel::Derived, params, branch)
}

pub fn radial_solution_with(model: JumpModel, params: &PbParams, branch: Branch) -> Result<PbRadialSolution> {
    let (r1, r2) = roots_with(model, params)?;
    Ok(PbRadialSolution {
        params: *params,
        branch,
        rho: match branch {
            Branch::Inner => r1,
            Branch::Outer => r2,
        },
        model,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    StrictSub,
    StrictSuper,
    Neither,
}

/// Compares a radial profile against the problem with modulus `h_test`.
///
/// Sub: jump above target, `Δu ≥ f` in both phases and strictly in one.
/// Super: all inequalities reversed.
pub fn classify_comparison(sol: &PbRadialSolution, h_test: f64) -> Comparison {
    let p = &sol.params;
    let tol = 1e-12;
    let scale = |v: f64| tol * (1.0 + v.abs());
    let target = h_test * h_test * p.sigma;
    let jump = sol.jump() - target;
    let jump_tol = scale(target);
    // Δu⁺ − 0 and Δu⁻ − h_test² ω
    let f_minus = h_test * h_test * p.omega;
    let interior = [
        sol.laplacian(0.5 * (1.0 + sol.rho)),
        sol.laplacian(0.5 * sol.rho) - f_minus,
    ];
    let itol = scale(f_minus);
    let ge = interior.iter().all(|&d| d >= -itol);
    let le = interior.iter().all(|&d| d <= itol);
    let some_gt = interior.iter().any(|&d| d > itol);
    let some_lt = interior.iter().any(|&d| d < -itol);
    if jump > jump_tol && ge && some_gt {
        Comparison::StrictSub
    } else if jump < -jump_tol && le && some_lt {
        Comparison::StrictSuper
    } else {
        Comparison::Neither
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderingReport {
    pub rho2_big: f64,
    pub rho2_small: f64,
    pub rho1_small: f64,
    /// `ρ₂(M) > ρ₂(m) > ρ₁(m)`.
    pub radii_ordered: bool,
    /// `U_{M,2} < U_{m,1} < U_{m,2}` at every sample radius.
    pub profiles_ordered: bool,
    /// First sample radius violating the profile chain.
    pub witness: Option<f64>,
    /// `U_{M,2} < U_{m,2} < U_{m,1}`, the chain implied by monotonicity of the profiles in ρ.
    pub monotone_chain: bool,
    pub samples: usize,
}

/// Checks the radius ordering and the pointwise profile chain `U_{M,2} < U_{m,1} < U_{m,2}`
/// on `samples` interior radii `i / (samples + 1)`.
pub fn ordering_check(m: f64, big_m: f64, mu: f64, omega: f64, sigma: f64, samples: usize) -> Result<OrderingReport> {
    if !(m < big_m) {
        return Err(Error::InvalidParameter(format!("need m < M, got m = {m}, M = {big_m}")));
    }
    let pm = PbParams::new(mu, omega, sigma, m)?;
    let pbig = pm.with_h(big_m);
    let small1 = radial_solution(&pm, Branch::Inner)?;
    let small2 = radial_solution(&pm, Branch::Outer)?;
    let big2 = radial_solution(&pbig, Branch::Outer)?;
    let radii_ordered = big2.rho > small2.rho && small2.rho > small1.rho;
    let mut witness = None;
    let mut monotone_chain = true;
    for i in 1..=samples {
        let r = i as f64 / (samples + 1) as f64;
        let (a, b, c) = (big2.u(r), small1.u(r), small2.u(r));
        if witness.is_none() && !(a < b && b < c) {
            witness = Some(r);
        }
        if !(a < c && c < b) {
            monotone_chain = false;
        }
    }
    Ok(OrderingReport {
        rho2_big: big2.rho,
        rho2_small: small2.rho,
        rho1_small: small1.rho,
        radii_ordered,
        profiles_ordered: witness.is_none(),
        witness,
        monotone_chain,
        samples,
    })
}

/// `h² ω ≥ 4 e μ`.
pub fn sufficient_condition(h: f64, mu: f64, omega: f64) -> bool {
    h * h * omega >= 4.0 * std::f64::consts::E * mu
}

/// One row of a parameter sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub h: f64,
    pub mu: f64,
    pub omega: f64,
    pub sigma: f64,
    pub z0: f64,
    pub rho_star: f64,
    pub cond_holds: bool,
    pub rho1: Option<f64>,
    pub rho2: Option<f64>,
}

pub fn sweep_row(p: &PbParams) -> SweepRow {
    let (z, rho_star) = z0(p.h, p.mu, p.omega);
    let r = roots(p).ok();
    SweepRow {
        h: p.h,
        mu: p.mu,
        omega: p.omega,
        sigma: p.sigma,
        z0: z,
        rho_star,
        cond_holds: r.is_some(),
        rho1: r.map(|r| r.0),
        rho2: r.map(|r| r.1),
    }
}

/// Printed versus derived jump curves at fixed `h² ω`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivergenceRow {
    pub h2_omega: f64,
    pub rho: f64,
    pub printed_f: f64,
    pub exact_jump: f64,
    pub difference: f64,
}

/// Evaluates both jump curves with `h = 1`, `μ = 1` at a few radii for each `h² ω`.
pub fn divergence_table(h2_omegas: &[f64], radii: &[f64]) -> Vec<DivergenceRow> {
    let mut out = Vec::new();
    for &w in h2_omegas {
        let p = PbParams {
            mu: 1.0,
            omega: w,
            sigma: 1.0,
            h: 1.0,
        };
        for &rho in radii {
            let a = curve(rho, 1.0, JumpModel::Printed.coefficient(1.0, w));
            let b = exact_jump(rho, &p).unwrap_or(f64::NAN);
            out.push(DivergenceRow {
                h2_omega: w,
                rho,
                printed_f: a,
                exact_jump: b,
                difference: a - b,
            });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ImplicationRow {
    pub mu: f64,
    pub omega: f64,
    pub condition: bool,
    pub z0: f64,
    /// `condition ⇒ z0 ≤ 0`.
    pub implication_holds: bool,
}

/// Audits whether `h²ω ≥ 4eμ` forces `z0 ≤ 0` over a `(μ, ω)` grid at `h = 1`.
pub fn implication_sweep(mus: &[f64], omegas: &[f64]) -> Vec<ImplicationRow> {
    let mut out = Vec::with_capacity(mus.len() * omegas.len());
    for &mu in mus {
        for &omega in omegas {
            let condition = sufficient_condition(1.0, mu, omega);
            let (z, _) = z0(1.0, mu, omega);
            out.push(ImplicationRow {
                mu,
                omega,
                condition,
                z0: z,
                implication_holds: !condition || z <= 0.0,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn p(mu: f64, omega: f64, h: f64, sigma: f64) -> PbParams {
        PbParams::new(mu, omega, sigma, h).unwrap()
    }

    #[test]
    fn printed_function_values() {
        let v = printed_f(1.0 / E, 1.0, 1.0, 1.0).unwrap();
        assert!((v - (E * E - 0.25 / (E * E))).abs() < 1e-12);
        assert!((v - 7.35522).abs() < 1e-5);
        assert!(printed_f(1e-6, 1.0, 1.0, 1.0).unwrap() > 1e6);
        assert!(printed_f(1.0 - 1e-6, 1.0, 1.0, 1.0).unwrap() > 1e6);
        assert!(printed_f(1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn z0_calculus_oracle() {
        let (z, r) = z0(1.0, 1.0, 0.0);
        assert!((z - E * E).abs() < 1e-9 && (r - 1.0 / E).abs() < 1e-9, "{z} {r}");
        let (z2, _) = z0(1.0, 2.0, 0.0);
        assert!((z2 - 4.0 * z).abs() < 1e-8);
        let (zneg, _) = z0(10.0, 1.0, 10.0);
        assert!(zneg < 0.0);
        assert!(printed_f(0.9, 10.0, 1.0, 10.0).unwrap() < 0.0);
    }

    #[test]
    fn roots_of_reduced_equation() {
        let q = p(1.0, 0.0, 1.0, 8.0);
        let (r1, r2) = roots(&q).unwrap();
        // ρ |log ρ| = 1 / (2 √2)
        let k = 0.5 / 2.0f64.sqrt();
        assert!((r1 * r1.ln().abs() - k).abs() < 1e-10 && (r2 * r2.ln().abs() - k).abs() < 1e-10);
        assert!((r1 - 0.270).abs() < 5e-4);
        assert!((r2 - 0.4752).abs() < 5e-4);
        for r in [r1, r2] {
            assert!((printed_f(r, 1.0, 1.0, 0.0).unwrap() - 8.0).abs() < 1e-10);
        }
        let (_, star) = z0(1.0, 1.0, 0.0);
        assert!(r1 < star && star < r2);
    }

    #[test]
    fn boundary_of_existence_condition_is_rejected() {
        let (z, _) = z0(1.0, 1.0, 0.0);
        assert!(matches!(roots(&p(1.0, 0.0, 1.0, z)), Err(Error::ConditionFails { .. })));
    }

    #[test]
    fn profiles_solve_radial_odes() {
        let q = p(1.0, 1.0, 1.0, 8.0);
        let s = radial_solution(&q, Branch::Outer).unwrap();
        assert!((s.u(1.0) - 1.0).abs() < 1e-15 && s.u(s.rho).abs() < 1e-15);
        assert!((s.u(0.0) + 0.25 * s.rho * s.rho).abs() < 1e-15);
        for r in [0.5 * s.rho, 0.5 * (1.0 + s.rho)] {
            let target = if r < s.rho { 1.0 } else { 0.0 };
            assert!((s.laplacian(r) - target).abs() < 1e-12);
        }
    }

    #[test]
    fn jump_formulas_diverge_off_unit_h2_omega() {
        let q = p(1.0, 2.0, 1.0, 8.0);
        let exact = exact_jump(1.0 / E, &q).unwrap();
        let printed = printed_f(1.0 / E, 1.0, 1.0, 2.0).unwrap();
        assert!((exact - (E * E - 1.0 / (E * E))).abs() < 1e-12);
        assert!((printed - (E * E - 0.5 / (E * E))).abs() < 1e-12);
        let (r1, r2) = exact_roots(&q).unwrap();
        for r in [r1, r2] {
            assert!((exact_jump(r, &q).unwrap() - 8.0).abs() < 1e-9);
        }
    }

    #[test]
    fn comparison_classes() {
        let q = p(1.0, 1.0, 1.0, 8.0);
        let s = radial_solution(&q, Branch::Outer).unwrap();
        assert_eq!(classify_comparison(&s, 1.0), Comparison::Neither);
        // built at m, tested against M > m
        assert_eq!(classify_comparison(&s, 1.2), Comparison::StrictSuper);
        let big = radial_solution(&q.with_h(1.2), Branch::Outer).unwrap();
        assert_eq!(classify_comparison(&big, 1.0), Comparison::StrictSub);
        let off = PbRadialSolution::at_radius(q, s.rho * 1.05).unwrap();
        assert_eq!(classify_comparison(&off, 1.0), Comparison::Neither);
    }

    #[test]
    fn ordering_reports_radii_and_profiles() {
        let rep = ordering_check(1.0, 1.2, 1.0, 1.0, 8.0, 100).unwrap();
        assert!(rep.radii_ordered);
        // profiles decrease with ρ, so the printed middle inequality is reversed
        assert!(!rep.profiles_ordered && rep.monotone_chain);
        assert!(ordering_check(1.0, 1.0, 1.0, 1.0, 8.0, 10).is_err());
    }

    #[test]
    fn sufficient_condition_cases() {
        assert!(sufficient_condition(1.0, 1.0, 4.0 * E));
        assert!(!sufficient_condition(1.0, 1.0, 1.0));
        let (z, _) = z0(1.0, 1.0, 12.0);
        assert!(z > 0.0, "z0 = {z}: the printed implication fails at mu = 1");
    }

    #[test]
    fn invalid_parameters() {
        assert!(PbParams::new(-1.0, 1.0, 8.0, 1.0).is_err());
        assert!(PbParams::new(1.0, -1.0, 8.0, 1.0).is_err());
        assert!(PbParams::new(1.0, 0.0, 8.0, 1.0).is_ok());
    }
}
