//! Prolate spheroidal coordinates with foci `0` and `e`, surface and volume
//! quadrature on confocal ellipsoids and spheres, and the cone line integral.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::potentials::{norm, MatrixPotential, Point, FOCUS};
use crate::quadrature::{adaptive_gauss_kronrod, GaussLegendre};

/// Ellipsoid routines reject `2τ` within this distance of the focal segment.
pub const DEGENERACY_CUTOFF: f64 = 1e-12;

/// Tolerance of the adaptive line integral in [`segment_average`].
pub const SEGMENT_TOL: f64 = 1e-10;

/// Prolate spheroidal coordinates `(ρ, θ, φ)` for the foci `0` and `e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProlateCoords {
    pub rho: f64,
    pub theta: f64,
    pub phi: f64,
}

impl ProlateCoords {
    pub fn new(rho: f64, theta: f64, phi: f64) -> Self {
        Self { rho, theta, phi }
    }

    /// Coordinates on the ellipsoid `|x| + |x − e| = cosh ρ`.
    pub fn on_ellipsoid(two_tau: f64, theta: f64, phi: f64) -> Self {
        Self {
            rho: two_tau.max(1.0).acosh(),
            theta,
            phi,
        }
    }
}

/// Maps prolate coordinates to Cartesian space.
pub fn prolate_to_cartesian(c: &ProlateCoords) -> Point {
    prolate_point(c.rho.cosh(), c.rho.sinh(), c.theta, c.phi)
}

/// Same map parameterized directly by `cosh ρ` and `sinh ρ`.
#[inline]
pub fn prolate_point(cosh: f64, sinh: f64, theta: f64, phi: f64) -> Point {
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    [
        0.5 + 0.5 * cosh * cp,
        0.5 * sinh * st * sp,
        0.5 * sinh * ct * sp,
    ]
}

/// Angular (and optionally radial) node sets: Gauss–Legendre in `φ ∈ [0, π]`,
/// periodic trapezoid in `θ`, Gauss–Legendre in `cosh ρ` for volumes.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub phi_nodes: Vec<f64>,
    pub phi_weights: Vec<f64>,
    pub theta_nodes: Vec<f64>,
    pub theta_weights: Vec<f64>,
    /// Gauss–Legendre rule on `[-1, 1]`, mapped onto the radial range on use.
    pub radial: Option<GaussLegendre>,
}

impl QuadratureRule {
    pub fn new(n_phi: usize, n_theta: usize) -> Result<Self> {
        if n_phi == 0 || n_theta == 0 {
            return Err(Error::InvalidGrid(
                "quadrature counts must be positive".into(),
            ));
        }
        let (phi_nodes, phi_weights) = GaussLegendre::new(n_phi).on_interval(0.0, PI);
        let w = 2.0 * PI / n_theta as f64;
        let theta_nodes = (0..n_theta).map(|k| k as f64 * w).collect();
        Ok(Self {
            phi_nodes,
            phi_weights,
            theta_nodes,
            theta_weights: vec![w; n_theta],
            radial: None,
        })
    }

    pub fn with_radial(n_rho: usize, n_phi: usize, n_theta: usize) -> Result<Self> {
        if n_rho == 0 {
            return Err(Error::InvalidGrid(
                "quadrature counts must be positive".into(),
            ));
        }
        let mut rule = Self::new(n_phi, n_theta)?;
        rule.radial = Some(GaussLegendre::new(n_rho));
        Ok(rule)
    }

    pub fn n_phi(&self) -> usize {
        self.phi_nodes.len()
    }

    pub fn n_theta(&self) -> usize {
        self.theta_nodes.len()
    }

    pub fn n_rho(&self) -> usize {
        self.radial.as_ref().map_or(0, GaussLegendre::len)
    }
}

/// Quadrature nodes with weights, plus the polar angle of each node (needed
/// by the closed-form gradient factor).
#[derive(Debug, Clone, Default)]
pub struct WeightedNodes {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub phi: Vec<f64>,
}

impl WeightedNodes {
    fn with_capacity(n: usize) -> Self {
        Self {
            points: Vec::with_capacity(n),
            weights: Vec::with_capacity(n),
            phi: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, x: Point, w: f64, phi: f64) {
        self.points.push(x);
        self.weights.push(w);
        self.phi.push(phi);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `Σ w_k f(x_k)`, evaluated in parallel and reduced in node order.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&Point) -> f64 + Sync + Send,
    {
        par::ordered_sum(self.len(), |k| self.weights[k] * f(&self.points[k]))
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

fn check_ellipsoid(two_tau: f64) -> Result<()> {
    if !(two_tau > 1.0 + DEGENERACY_CUTOFF) || !two_tau.is_finite() {
        return Err(Error::DegenerateEllipsoid(two_tau));
    }
    Ok(())
}

/// Nodes on `{|x| + |x − e| = 2τ}` with the surface element
/// `¼ sinh ρ sin φ √(cosh²ρ − cos²φ) dθ dφ`.
pub fn ellipsoid_surface_quadrature(two_tau: f64, rule: &QuadratureRule) -> Result<WeightedNodes> {
    check_ellipsoid(two_tau)?;
    let c = two_tau;
    let s = (c * c - 1.0).sqrt();
    let mut out = WeightedNodes::with_capacity(rule.n_phi() * rule.n_theta());
    for (&phi, &wp) in rule.phi_nodes.iter().zip(&rule.phi_weights) {
        let cp = phi.cos();
        let jac = 0.25 * s * phi.sin() * (c * c - cp * cp).sqrt();
        for (&theta, &wt) in rule.theta_nodes.iter().zip(&rule.theta_weights) {
            out.push(prolate_point(c, s, theta, phi), wp * wt * jac, phi);
        }
    }
    Ok(out)
}

/// Nodes filling `{|x| + |x − e| ≤ 2τ}` with the volume element
/// `⅛ sinh ρ sin φ (cosh²ρ − cos²φ) dρ dθ dφ`, integrated in `c = cosh ρ`.
pub fn ellipsoid_volume_quadrature(two_tau: f64, rule: &QuadratureRule) -> Result<WeightedNodes> {
    check_ellipsoid(two_tau)?;
    let radial = rule
        .radial
        .as_ref()
        .ok_or_else(|| Error::InvalidGrid("volume quadrature needs radial nodes".into()))?;
    let (cs, wcs) = radial.on_interval(1.0, two_tau);
    let mut out = WeightedNodes::with_capacity(cs.len() * rule.n_phi() * rule.n_theta());
    for (&c, &wc) in cs.iter().zip(&wcs) {
        let s = (c * c - 1.0).max(0.0).sqrt();
        for (&phi, &wp) in rule.phi_nodes.iter().zip(&rule.phi_weights) {
            let cp = phi.cos();
            let jac = 0.125 * phi.sin() * (c * c - cp * cp);
            for (&theta, &wt) in rule.theta_nodes.iter().zip(&rule.theta_weights) {
                out.push(prolate_point(c, s, theta, phi), wc * wp * wt * jac, phi);
            }
        }
    }
    Ok(out)
}

/// Nodes on the sphere `|x| = r` with `dS = r² sin φ dθ dφ`.
pub fn sphere_surface_quadrature(r: f64, rule: &QuadratureRule) -> Result<WeightedNodes> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::NonpositiveRadius(r));
    }
    let mut out = WeightedNodes::with_capacity(rule.n_phi() * rule.n_theta());
    for (&phi, &wp) in rule.phi_nodes.iter().zip(&rule.phi_weights) {
        let (sp, cp) = phi.sin_cos();
        for (&theta, &wt) in rule.theta_nodes.iter().zip(&rule.theta_weights) {
            let (st, ct) = theta.sin_cos();
            out.push(
                [r * sp * ct, r * sp * st, r * cp],
                wp * wt * r * r * sp,
                phi,
            );
        }
    }
    Ok(out)
}

/// Closed form of `|2τx − e|x||` on `{|x| + |x − e| = 2τ}` at polar angle `φ`.
pub fn grad_factor(tau: f64, phi: f64) -> Result<f64> {
    let q = 4.0 * tau * tau;
    if 2.0 * tau < 1.0 - DEGENERACY_CUTOFF || !tau.is_finite() {
        return Err(Error::DegenerateEllipsoid(2.0 * tau));
    }
    let cp = phi.cos();
    Ok(0.5 * ((q - cp * cp) * (q - 1.0).max(0.0)).sqrt())
}

/// `|2τx − e|x||` computed from the Cartesian point at `(2τ, θ, φ)`.
pub fn grad_factor_direct(tau: f64, theta: f64, phi: f64) -> Result<f64> {
    if 2.0 * tau < 1.0 - DEGENERACY_CUTOFF || !tau.is_finite() {
        return Err(Error::DegenerateEllipsoid(2.0 * tau));
    }
    let c = 2.0 * tau;
    let x = prolate_point(c, (c * c - 1.0).max(0.0).sqrt(), theta, phi);
    let r = norm(&x);
    let v = [c * x[0] - FOCUS[0] * r, c * x[1], c * x[2]];
    Ok(norm(&v))
}

/// `(1/8π) ∫₀¹ (β_i1 + β_i2)(s x + (1 − s) a) ds` for `i = 1, 2`.
pub fn segment_average(p: &MatrixPotential, a: &Point, x: &Point) -> Result<[f64; 2]> {
    if a == x {
        return Err(Error::CoincidentEndpoints);
    }
    let at = |s: f64| {
        [
            s * x[0] + (1.0 - s) * a[0],
            s * x[1] + (1.0 - s) * a[1],
            s * x[2] + (1.0 - s) * a[2],
        ]
    };
    let mut out = [0.0; 2];
    for (i, o) in out.iter_mut().enumerate() {
        let integral = adaptive_gauss_kronrod(|s| p.row_sums(&at(s))[i], 0.0, 1.0, SEGMENT_TOL);
        *o = integral / (8.0 * PI);
    }
    Ok(out)
}

/// Analytic surface area of the prolate spheroid `|x| + |x − e| = 2τ`.
pub fn prolate_area(two_tau: f64) -> f64 {
    let a = 0.5 * two_tau;
    let b = (a * a - 0.25).sqrt();
    let ecc = 0.5 / a;
    2.0 * PI * b * b * (1.0 + a / (b * ecc) * ecc.asin())
}

/// Analytic volume `(4/3)π a b²` of the same spheroid.
pub fn prolate_volume(two_tau: f64) -> f64 {
    let a = 0.5 * two_tau;
    4.0 / 3.0 * PI * a * (a * a - 0.25)
}

/// Residuals of the geometry oracles; what the `geomcheck` command reports.
#[derive(Debug, Clone, Serialize)]
pub struct GeometryCheck {
    pub two_tau: f64,
    pub n_phi: usize,
    pub n_theta: usize,
    pub n_rho: usize,
    pub area: f64,
    pub area_exact: f64,
    pub area_rel_residual: f64,
    pub volume: f64,
    pub volume_exact: f64,
    pub volume_rel_residual: f64,
    pub sphere_area_r2: f64,
    pub sphere_rel_residual: f64,
    pub grad_factor_max_residual: f64,
}

pub fn geometry_check(two_tau: f64, rule: &QuadratureRule) -> Result<GeometryCheck> {
    let area = ellipsoid_surface_quadrature(two_tau, rule)?.total_weight();
    let area_exact = prolate_area(two_tau);
    let volume = ellipsoid_volume_quadrature(two_tau, rule)?.total_weight();
    let volume_exact = prolate_volume(two_tau);
    let sphere = sphere_surface_quadrature(2.0, rule)?.total_weight();
    let sphere_exact = 16.0 * PI;
    Ok(GeometryCheck {
        two_tau,
        n_phi: rule.n_phi(),
        n_theta: rule.n_theta(),
        n_rho: rule.n_rho(),
        area,
        area_exact,
        area_rel_residual: (area - area_exact).abs() / area_exact,
        volume,
        volume_exact,
        volume_rel_residual: (volume - volume_exact).abs() / volume_exact,
        sphere_area_r2: sphere,
        sphere_rel_residual: (sphere - sphere_exact).abs() / sphere_exact,
        grad_factor_max_residual: grad_factor_grid_residual(50, 50),
    })
}

/// Largest `|closed form − direct|` of the gradient factor over an
/// `n_tau × n_phi` grid with `2τ ∈ [1, 5]`.
pub fn grad_factor_grid_residual(n_tau: usize, n_phi: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n_tau {
        let tau = 0.5 + 2.0 * i as f64 / (n_tau.max(2) - 1) as f64;
        for j in 0..n_phi {
            let phi = PI * j as f64 / (n_phi.max(2) - 1) as f64;
            let theta = 0.37 * j as f64;
            let a = grad_factor(tau, phi).expect("grid stays non-degenerate");
            let b = grad_factor_direct(tau, theta, phi).expect("grid stays non-degenerate");
            worst = worst.max((a - b).abs());
        }
    }
    worst
}
