//! Surface integrals `I(τ)`, the adjoint four-term identity for coincident
//! source and receiver, and the Grönwall comparison audit.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    ellipsoid_surface_quadrature, grad_factor, sphere_surface_quadrature, QuadratureRule,
};
use crate::goursat::{self, CausalField};
use crate::par;
use crate::potentials::{ClassTag, MatrixPotential, Symmetry};
use crate::quadrature::GaussLegendre;

/// `I(τ) = ∫_{2|x| = 2τ} Σ_ij β_ij(x) / |x|² dS / |∇(2|x|)|`.
///
/// The sphere is treated as the level set `{2|x| = 2τ}` of the two-way travel
/// time, so the surface measure carries the coarea weight `1/|∇(2|x|)| = 1/2`,
/// exactly as the ellipsoid integral carries `1/|∇(|x| + |x − e|)|` through its
/// gradient factor. With this weight an A1 difference `b(|x|)` gives `8π b(τ)`.
pub fn i_sphere(p: &MatrixPotential, tau: f64, rule: &QuadratureRule) -> Result<f64> {
    let nodes = sphere_surface_quadrature(tau, rule)?;
    let r2 = tau * tau;
    Ok(0.5 * nodes.integrate(|x| p.entry_sum(x) / r2))
}

/// `I(2τ) = ∫_{|x|+|x−e| = 2τ} Σ_ij β_ij(x) / |2τx − e|x|| dS`.
pub fn i_ellipsoid(p: &MatrixPotential, two_tau: f64, rule: &QuadratureRule) -> Result<f64> {
    let nodes = ellipsoid_surface_quadrature(two_tau, rule)?;
    let tau = 0.5 * two_tau;
    let terms = par::try_map_range(nodes.len(), |k| -> Result<f64> {
        let gf = grad_factor(tau, nodes.phi[k])?;
        Ok(nodes.weights[k] * p.entry_sum(&nodes.points[k]) / gf)
    })?;
    Ok(terms.into_iter().sum())
}

/// The four terms of the adjoint identity at `τ`, their sum, and the trace
/// difference they must reproduce.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub tau: f64,
    pub terms: [f64; 4],
    pub sum: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub grid_n: usize,
    pub grid_h: f64,
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn apply(m: &[[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// Evaluates, with `𝔓 = 𝔓⁽¹⁾ − 𝔓⁽²⁾`, `u⁽ᵏ⁾` the fields of `𝔓⁽ᵏ⁾` and `w` the
/// field of the transpose `[𝔓⁽¹⁾]ᵗ` (all on the grid `η ≤ 2τ` with `n` steps):
///
/// * `T₁ = (𝔓(τ)𝒜)·𝒜 / 8π`
/// * `T₂ = ∫₀^τ (𝔓𝒜)·r R^w(2τ − r, r) dr`
/// * `T₃ = ∫₀^τ (𝔓 r R^{u⁽²⁾}(2τ − r, r))·𝒜 dr`
/// * `T₄ = 4π ∫₀^τ ∫_r^{2τ−r} r² (𝔓 R^{u⁽²⁾}(t, r))·R^w(2τ − t, r) dt dr`
///
/// and compares the sum with `Σ_i (R_i^{u⁽¹⁾} − R_i^{u⁽²⁾})(2τ, 0)`.
pub fn four_terms(
    p1: &MatrixPotential,
    p2: &MatrixPotential,
    tau: f64,
    n: usize,
) -> Result<IdentityReport> {
    p1.require_symmetry(Symmetry::Radial)?;
    p2.require_symmetry(Symmetry::Radial)?;
    if !(tau > 0.0) {
        return Err(Error::NonpositiveRadius(tau));
    }
    let eta = 2.0 * tau;
    let adjoint = p1.transpose();
    let ((u1, u2), w) = par::join(
        || par::join(|| goursat::solve(p1, eta, n), || goursat::solve(p2, eta, n)),
        || goursat::solve(&adjoint, eta, n),
    );
    let (u1, u2, w) = (u1?, u2?, w?);
    let diff = p1.difference(p2);
    let h = u2.h();
    let dr = 0.5 * h;
    let mats: Vec<_> = (0..=n)
        .map(|j| diff.eval_matrix(&[j as f64 * dr, 0.0, 0.0]))
        .collect();
    let ones = [1.0, 1.0];

    let t1 = dot(apply(&mats[n], ones), ones) / (8.0 * PI);
    let line = |f: &dyn Fn(usize) -> f64| {
        let mut s = 0.5 * (f(0) + f(n));
        for j in 1..n {
            s += f(j);
        }
        s * dr
    };
    let t2 = line(&|j| dot(apply(&mats[j], ones), w.v(n - j, n)));
    let t3 = line(&|j| dot(apply(&mats[j], u2.v(n - j, n)), ones));
    let t4 = 2.0 * PI * bulk_integral(&u2, &w, &mats, n);

    let rhs = {
        let (a, b) = (u1.origin_value(n), u2.origin_value(n));
        (a[0] - b[0]) + (a[1] - b[1])
    };
    let sum = t1 + t2 + t3 + t4;
    let abs_residual = (sum - rhs).abs();
    let rel_residual = if rhs != 0.0 {
        abs_residual / rhs.abs()
    } else {
        abs_residual
    };
    Ok(IdentityReport {
        tau,
        terms: [t1, t2, t3, t4],
        sum,
        rhs,
        abs_residual,
        rel_residual,
        grid_n: n,
        grid_h: h,
    })
}

/// `∫∫_{0≤ξ≤η≤2τ} (𝔓 v^u(ξ,η))·v^w(2τ − η, 2τ − ξ) dξ dη` with the trapezoid
/// rule on square cells and the vertex average on the diagonal triangles.
fn bulk_integral(u: &CausalField, w: &CausalField, mats: &[[[f64; 2]; 2]], n: usize) -> f64 {
    let h = u.h();
    let f = |m: usize, k: usize| dot(apply(&mats[k - m], u.v(m, k)), w.v(n - k, n - m));
    let rows = par::map_range(n, |k| {
        // cells with lower-left η index k
        let mut s = 0.0;
        for m in 0..k {
            s += 0.25 * (f(m, k) + f(m + 1, k) + f(m, k + 1) + f(m + 1, k + 1));
        }
        s + (f(k, k) + f(k, k + 1) + f(k + 1, k + 1)) / 6.0
    });
    rows.into_iter().sum::<f64>() * h * h
}

/// Comparison of `I(τ)` with `∫₀^τ I` on a grid of radii.
#[derive(Debug, Clone, Serialize)]
pub struct GronwallAudit {
    pub taus: Vec<f64>,
    pub i_samples: Vec<f64>,
    pub integral_samples: Vec<f64>,
    /// Smallest constant `K·C` with `I(τ) ≤ K·C ∫₀^τ I` at each `τ`.
    pub local_constants: Vec<f64>,
    pub fitted_constant: f64,
    pub max_violation: f64,
    pub pass: bool,
    /// Whether `I` vanishes on the grid.
    pub zero_forced: bool,
    /// The unknown profile implied by `I` for single-unknown classes.
    pub implied_profile: Option<Vec<f64>>,
}

const RADIAL_NODES: usize = 32;

/// Audits the inequality for a nonnegative radial difference potential.
pub fn gronwall_audit(
    pdiff: &MatrixPotential,
    tau_grid: &[f64],
    rule: &QuadratureRule,
) -> Result<GronwallAudit> {
    pdiff.require_symmetry(Symmetry::Radial)?;
    if tau_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(&t) = tau_grid.iter().find(|&&t| !(t > 0.0)) {
        return Err(Error::NonpositiveRadius(t));
    }
    let tau_max = tau_grid.iter().copied().fold(0.0, f64::max);
    check_nonnegative(pdiff, tau_max)?;

    let gl = GaussLegendre::new(RADIAL_NODES);
    let rows = par::try_map_range(tau_grid.len(), |k| -> Result<(f64, f64)> {
        let tau = tau_grid[k];
        let i = i_sphere(pdiff, tau, rule)?;
        let (rs, ws) = gl.on_interval(0.0, tau);
        let mut integral = 0.0;
        for (&r, &w) in rs.iter().zip(&ws) {
            integral += w * i_sphere(pdiff, r, rule)?;
        }
        Ok((i, integral))
    })?;
    let (i_samples, integral_samples): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    let local_constants: Vec<f64> = i_samples
        .iter()
        .zip(&integral_samples)
        .map(|(&i, &int)| if i == 0.0 { 0.0 } else { i / int })
        .collect();
    let fitted_constant = local_constants.iter().copied().fold(0.0, f64::max);
    let max_violation = i_samples
        .iter()
        .zip(&integral_samples)
        .map(|(&i, &int)| (i - fitted_constant * int).max(0.0))
        .fold(0.0, f64::max);
    let scale = i_samples.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let pass = max_violation <= 1e-12 * scale.max(f64::MIN_POSITIVE) || max_violation == 0.0;
    let zero_forced = i_samples.iter().all(|&i| i.abs() <= 1e-300);
    let implied_profile = pdiff.class_tag().unknown_count().map(|count| {
        i_samples
            .iter()
            .map(|&i| i / (2.0 * PI * count as f64))
            .collect()
    });
    Ok(GronwallAudit {
        taus: tau_grid.to_vec(),
        i_samples,
        integral_samples,
        local_constants,
        fitted_constant,
        max_violation,
        pass,
        zero_forced,
        implied_profile,
    })
}

fn check_nonnegative(p: &MatrixPotential, radius: f64) -> Result<()> {
    const SAMPLES: usize = 200;
    let dirs: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 0.6, 0.8], [-0.48, 0.6, -0.64]];
    let mut min = f64::INFINITY;
    for k in 0..=SAMPLES {
        let r = radius * k as f64 / SAMPLES as f64;
        for d in &dirs {
            let m = p.eval_matrix(&[r * d[0], r * d[1], r * d[2]]);
            min = min.min(m.iter().flatten().copied().fold(f64::INFINITY, f64::min));
        }
    }
    if min < -1e-14 {
        return Err(Error::NegativeEntries(min));
    }
    Ok(())
}

/// The constant `I(τ)/b(τ)` for a single-unknown class difference.
pub fn reduction_constant(class: ClassTag) -> Option<f64> {
    class.unknown_count().map(|c| 2.0 * PI * c as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{build_potential, Field};

    fn rule() -> QuadratureRule {
        QuadratureRule::new(48, 32).unwrap()
    }

    fn radial_a1(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> MatrixPotential {
        build_potential(ClassTag::A1, Field::radial(f), None, Symmetry::Radial).unwrap()
    }

    #[test]
    fn sphere_integral_examples() {
        let one = radial_a1(|_| 1.0);
        assert!((i_sphere(&one, 1.3, &rule()).unwrap() - 8.0 * PI).abs() < 1e-12);
        assert!((8.0 * PI - 25.132_74).abs() < 1e-5);
        let z = MatrixPotential::zero(Symmetry::Radial);
        assert_eq!(i_sphere(&z, 1.0, &rule()).unwrap(), 0.0);
        let sq = radial_a1(|r| r * r);
        assert!((i_sphere(&sq, 2.0, &rule()).unwrap() - 32.0 * PI).abs() < 1e-11);
        assert!(matches!(
            i_sphere(&one, 0.0, &rule()),
            Err(Error::NonpositiveRadius(_))
        ));
    }

    #[test]
    fn ellipsoid_integral_examples() {
        let ell = |f: fn(f64) -> f64| {
            build_potential(
                ClassTag::A1,
                Field::ellipsoidal(f),
                None,
                Symmetry::Ellipsoidal,
            )
            .unwrap()
        };
        assert!((i_ellipsoid(&ell(|_| 1.0), 1.7, &rule()).unwrap() - 8.0 * PI).abs() < 1e-12);
        let z = MatrixPotential::zero(Symmetry::Ellipsoidal);
        assert_eq!(i_ellipsoid(&z, 2.0, &rule()).unwrap(), 0.0);
        let v = i_ellipsoid(&ell(|s| (-s).exp()), 2.0, &rule()).unwrap();
        assert!((v - 8.0 * PI * (-2.0f64).exp()).abs() < 1e-12);
        assert!((v - 3.401_346_65).abs() < 1e-8);
        assert!(i_ellipsoid(&ell(|_| 1.0), 1.0, &rule()).is_err());
    }

    #[test]
    fn identical_potentials_give_vanishing_identity() {
        let p = radial_a1(|r| 0.2 * (-r).exp());
        let rep = four_terms(&p, &p, 0.5, 32).unwrap();
        assert_eq!(rep.terms, [0.0; 4]);
        assert_eq!(rep.rhs, 0.0);
        assert_eq!(rep.abs_residual, 0.0);
    }

    #[test]
    fn identity_holds_for_constant_difference() {
        let p1 = radial_a1(|_| 0.1);
        let p2 = MatrixPotential::zero(Symmetry::Radial);
        let rep = four_terms(&p1, &p2, 0.5, 256).unwrap();
        assert!(rep.rel_residual < 1e-3, "{rep:?}");
    }

    #[test]
    fn small_tau_is_dominated_by_first_term() {
        let p1 = radial_a1(|r| 0.5 + r);
        let p2 = MatrixPotential::zero(Symmetry::Radial);
        let rep = four_terms(&p1, &p2, 0.02, 64).unwrap();
        let t1 = 4.0 * (0.5 + 0.02) / (8.0 * PI);
        assert!((rep.terms[0] - t1).abs() < 1e-14);
        assert!(((rep.sum - t1) / t1).abs() < 1e-2);
        assert!(((rep.rhs - t1) / t1).abs() < 1e-2);
    }

    #[test]
    fn gronwall_closed_form_constants() {
        let taus = [0.25, 0.5, 1.0, 2.0];
        let a = gronwall_audit(&radial_a1(|_| 1.0), &taus, &rule()).unwrap();
        let b = gronwall_audit(&radial_a1(|r| r), &taus, &rule()).unwrap();
        for (k, &t) in taus.iter().enumerate() {
            assert!((a.local_constants[k] * t - 1.0).abs() < 1e-10);
            assert!((b.local_constants[k] * t - 2.0).abs() < 1e-10);
            assert!((b.integral_samples[k] - 4.0 * PI * t * t).abs() < 1e-10);
        }
        assert!(a.pass && b.pass);
        let z = gronwall_audit(&MatrixPotential::zero(Symmetry::Radial), &taus, &rule()).unwrap();
        assert!(z.zero_forced && z.pass && z.fitted_constant == 0.0);
        assert!(z.implied_profile.unwrap().iter().all(|&b| b == 0.0));
        let neg = radial_a1(|r| r - 0.5);
        assert!(matches!(
            gronwall_audit(&neg, &taus, &rule()),
            Err(Error::NegativeEntries(_))
        ));
    }

    #[test]
    fn class_reduction_constants() {
        assert_eq!(reduction_constant(ClassTag::A1), Some(8.0 * PI));
        assert_eq!(reduction_constant(ClassTag::A2), Some(4.0 * PI));
        assert_eq!(reduction_constant(ClassTag::A3), Some(4.0 * PI));
        assert_eq!(reduction_constant(ClassTag::General), None);
    }
}
