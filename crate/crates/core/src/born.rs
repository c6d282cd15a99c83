//! Scattering series for the regular part at a receiver: the single-scattering
//! term as a confocal-ellipsoid surface integral and a double-scattering term
//! as a nested volume integral.
//!
//! With the free retarded kernel `E = δ(t − |x|)/(4π|x|)` the series reads
//! `U ≈ E·(1,1) + E★(𝔓 E·(1,1)) + E★(𝔓 E★(𝔓 E·(1,1)))`; only the last two
//! terms contribute to the regular part.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    ellipsoid_surface_quadrature, grad_factor, prolate_point, QuadratureRule, DEGENERACY_CUTOFF,
};
use crate::par;
use crate::potentials::{norm, MatrixPotential, Point};
use crate::quadrature::GaussLegendre;
use crate::trace::{check_times, Receiver, Trace};

/// Series order and quadrature sizes. Sample times are passed separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BornConfig {
    /// Highest scattering order kept (0, 1 or 2).
    pub order: usize,
    /// `(n_φ, n_θ)` of the receiver-side surface rule.
    pub surface: [usize; 2],
    /// `(n_ρ, n_φ, n_θ)` of the outer volume rule of the second-order term.
    pub volume: [usize; 3],
    /// `(n_φ, n_θ)` of the inner first-order surfaces.
    pub inner: [usize; 2],
}

impl Default for BornConfig {
    fn default() -> Self {
        Self {
            order: 2,
            surface: [48, 32],
            volume: [12, 16, 16],
            inner: [16, 16],
        }
    }
}

impl BornConfig {
    fn validate(&self) -> Result<()> {
        if self.order > 2 {
            return Err(Error::UnsupportedOrder(self.order));
        }
        let all = [self.surface.as_slice(), &self.volume, &self.inner];
        if all.iter().flat_map(|s| s.iter()).any(|&n| n == 0) {
            return Err(Error::InvalidGrid(
                "quadrature counts must be positive".into(),
            ));
        }
        Ok(())
    }

    fn surface_rule(&self) -> Result<QuadratureRule> {
        QuadratureRule::new(self.surface[0], self.surface[1])
    }

    fn inner_rule(&self) -> Result<QuadratureRule> {
        QuadratureRule::new(self.inner[0], self.inner[1])
    }
}

/// Single-scattering regular part at `y` and time `s`,
/// `(1/32π²) ∫∫ (β_i1 + β_i2)(z) sin φ dθ dφ` over the prolate surface with
/// foci `0`, `y` and focal sum `s`. Zero before the direct arrival `s = |y|`.
pub fn first_order_field(
    p: &MatrixPotential,
    s: f64,
    y: &Point,
    rule: &QuadratureRule,
) -> [f64; 2] {
    let d = norm(y);
    if s < d * (1.0 - 1e-12) - 1e-14 {
        return [0.0; 2];
    }
    let u = if d > 0.0 {
        [y[0] / d, y[1] / d, y[2] / d]
    } else {
        [1.0, 0.0, 0.0]
    };
    let helper = if u[2].abs() < 0.9 {
        [0.0, 0.0, 1.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let dot = helper[0] * u[0] + helper[1] * u[1] + helper[2] * u[2];
    let mut pv = [
        helper[0] - dot * u[0],
        helper[1] - dot * u[1],
        helper[2] - dot * u[2],
    ];
    let pn = norm(&pv);
    pv = [pv[0] / pn, pv[1] / pn, pv[2] / pn];
    let qv = [
        u[1] * pv[2] - u[2] * pv[1],
        u[2] * pv[0] - u[0] * pv[2],
        u[0] * pv[1] - u[1] * pv[0],
    ];
    let minor = (s * s - d * d).max(0.0).sqrt();
    let mut acc = [0.0; 2];
    for (&phi, &wp) in rule.phi_nodes.iter().zip(&rule.phi_weights) {
        let (sp, cp) = phi.sin_cos();
        let along = 0.5 * (d + s * cp);
        let across = 0.5 * minor * sp;
        let mut ring = [0.0; 2];
        for (&theta, &wt) in rule.theta_nodes.iter().zip(&rule.theta_weights) {
            let (st, ct) = theta.sin_cos();
            let z = [
                along * u[0] + across * (ct * pv[0] + st * qv[0]),
                along * u[1] + across * (ct * pv[1] + st * qv[1]),
                along * u[2] + across * (ct * pv[2] + st * qv[2]),
            ];
            let rs = p.row_sums(&z);
            ring[0] += wt * rs[0];
            ring[1] += wt * rs[1];
        }
        acc[0] += wp * sp * ring[0];
        acc[1] += wp * sp * ring[1];
    }
    let k = 1.0 / (32.0 * PI * PI);
    [k * acc[0], k * acc[1]]
}

fn check_focus_times(times: &[f64]) -> Result<()> {
    if let Some(&t) = times.iter().find(|&&t| !(t > 1.0 + DEGENERACY_CUTOFF)) {
        return Err(Error::DegenerateEllipsoid(t));
    }
    check_times(times, 1.0)
}

/// Single-scattering trace at `e`:
/// `(1/16π²) ∫_{|x|+|x−e|=t} (β_i1 + β_i2)(x) / |t x − e|x|| dS`.
pub fn born1_trace(p: &MatrixPotential, times: &[f64], rule: &QuadratureRule) -> Result<Trace> {
    check_focus_times(times)?;
    let regular = par::try_map_range(times.len(), |k| -> Result<[f64; 2]> {
        let t = times[k];
        let nodes = ellipsoid_surface_quadrature(t, rule)?;
        let mut acc = [0.0; 2];
        for ((x, &w), &phi) in nodes.points.iter().zip(&nodes.weights).zip(&nodes.phi) {
            let gf = grad_factor(0.5 * t, phi)?;
            let rs = p.row_sums(x);
            acc[0] += w * rs[0] / gf;
            acc[1] += w * rs[1] / gf;
        }
        let k = 1.0 / (16.0 * PI * PI);
        Ok([k * acc[0], k * acc[1]])
    })?;
    Trace::new(Receiver::Focus, times.to_vec(), regular)
}

/// Double-scattering contribution at the receiver and time `t`.
fn second_order(
    p: &MatrixPotential,
    receiver: Receiver,
    t: f64,
    outer: &GaussLegendre,
    angles: &QuadratureRule,
    inner: &QuadratureRule,
) -> [f64; 2] {
    // Outer nodes: (point, weight, remaining time for the first leg).
    let (radial, weights) = match receiver {
        Receiver::Origin => outer.on_interval(0.0, 0.5 * t),
        Receiver::Focus => outer.on_interval(1.0, t),
    };
    let n_ang = angles.n_phi() * angles.n_theta();
    par::ordered_sum2(radial.len() * n_ang, |k| {
        let (ir, ia) = (k / n_ang, k % n_ang);
        let (ip, it) = (ia / angles.n_theta(), ia % angles.n_theta());
        let (phi, theta) = (angles.phi_nodes[ip], angles.theta_nodes[it]);
        let w = weights[ir] * angles.phi_weights[ip] * angles.theta_weights[it];
        let (sp, cp) = phi.sin_cos();
        let (y, leg, jac) = match receiver {
            Receiver::Origin => {
                let r = radial[ir];
                let (st, ct) = theta.sin_cos();
                ([r * sp * ct, r * sp * st, r * cp], r, r * sp / (4.0 * PI))
            }
            Receiver::Focus => {
                let c = radial[ir];
                let y = prolate_point(c, (c * c - 1.0).max(0.0).sqrt(), theta, phi);
                (y, 0.5 * (c - cp), sp * (c + cp) / (16.0 * PI))
            }
        };
        let u1 = first_order_field(p, t - leg, &y, inner);
        let m = p.eval_matrix(&y);
        let pu = [
            m[0][0] * u1[0] + m[0][1] * u1[1],
            m[1][0] * u1[0] + m[1][1] * u1[1],
        ];
        [w * jac * pu[0], w * jac * pu[1]]
    })
}

/// Truncated scattering series at the receiver.
pub fn picard_trace(
    p: &MatrixPotential,
    receiver: Receiver,
    times: &[f64],
    cfg: &BornConfig,
) -> Result<Trace> {
    cfg.validate()?;
    match receiver {
        Receiver::Focus => check_focus_times(times)?,
        Receiver::Origin => check_times(times, 0.0)?,
    }
    if cfg.order == 0 {
        return Trace::new(receiver, times.to_vec(), vec![[0.0; 2]; times.len()]);
    }
    let surface = cfg.surface_rule()?;
    let inner = cfg.inner_rule()?;
    let angles = QuadratureRule::new(cfg.volume[1], cfg.volume[2])?;
    let outer = GaussLegendre::new(cfg.volume[0]);
    let a = receiver.position();
    let regular = times
        .iter()
        .map(|&t| {
            let mut u = first_order_field(p, t, &a, &surface);
            if cfg.order == 2 {
                let u2 = second_order(p, receiver, t, &outer, &angles, &inner);
                u = [u[0] + u2[0], u[1] + u2[1]];
            }
            u
        })
        .collect();
    Trace::new(receiver, times.to_vec(), regular)
}
