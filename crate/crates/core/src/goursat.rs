//! Characteristic-grid solver for the regular part `R` of the point-source
//! solution when the potential is radial and source and receiver coincide.
//!
//! With `v = rR`, `ξ = t − r` and `η = t + r` the regular part satisfies
//! `v_ξη = ¼ B(r) v` on `0 ≤ ξ ≤ η`, with `v(0, η) = g(η/2)` on the cone and
//! `v(ξ, ξ) = 0` on the axis. Each grid cell is integrated with the four-corner
//! trapezoid rule; the new corner is found from a 2×2 linear solve.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::segment_average;
use crate::par;
use crate::potentials::{Mat2, MatrixPotential, Symmetry};
use crate::quadrature::adaptive_gauss_kronrod;
use crate::trace::{check_times, Receiver, Trace};

const BOUNDARY_TOL: f64 = 1e-13;
const SNAP: f64 = 1e-9;

#[inline]
fn idx(m: usize, n: usize) -> usize {
    n * (n + 1) / 2 + m
}

#[inline]
fn mat_vec(b: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [
        b[0][0] * v[0] + b[0][1] * v[1],
        b[1][0] * v[0] + b[1][1] * v[1],
    ]
}

/// Incremental column-by-column marcher on the triangle `0 ≤ m ≤ n ≤ N`.
///
/// Column `n` (fixed `η = nh`) only reads `B_j` and `g_j` with `j ≤ n`, so a
/// caller may fill the radial inputs one layer at a time and re-march the
/// newest column, which is what layer stripping does.
#[derive(Debug, Clone)]
pub struct Marcher {
    h: f64,
    n: usize,
    b: Vec<Mat2>,
    g: Vec<[f64; 2]>,
    v: Vec<[f64; 2]>,
    origin: Vec<[f64; 2]>,
}

impl Marcher {
    pub fn new(eta_max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need N >= 2, got {n}")));
        }
        if !(eta_max > 0.0) || !eta_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "eta_max must be positive, got {eta_max}"
            )));
        }
        Ok(Self {
            h: eta_max / n as f64,
            n,
            b: vec![[[0.0; 2]; 2]; n + 1],
            g: vec![[0.0; 2]; n + 1],
            v: vec![[0.0; 2]; idx(n, n) + 1],
            origin: vec![[0.0; 2]; n + 1],
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Radius of radial index `j`.
    pub fn radius(&self, j: usize) -> f64 {
        0.5 * j as f64 * self.h
    }

    /// Sets `B(r_j)` and the cone value `g(r_j) = r_j · R|_cone`.
    pub fn set_layer(&mut self, j: usize, b: Mat2, g: [f64; 2]) {
        self.b[j] = b;
        self.g[j] = g;
    }

    pub fn layer(&self, j: usize) -> (Mat2, [f64; 2]) {
        (self.b[j], self.g[j])
    }

    #[inline]
    pub fn v(&self, m: usize, n: usize) -> [f64; 2] {
        self.v[idx(m, n)]
    }

    /// Extrapolated `R(nh, 0)`; valid once column `n` is marched.
    pub fn origin_value(&self, n: usize) -> [f64; 2] {
        self.origin[n]
    }

    pub fn march_all(&mut self) {
        for n in 0..=self.n {
            self.march_column(n);
        }
    }

    /// Computes column `n` from column `n − 1`.
    pub fn march_column(&mut self, n: usize) {
        let h = self.h;
        let kappa = h * h / 16.0;
        if n == 0 {
            self.v[0] = [0.0; 2];
            let b = &self.b[0];
            self.origin[0] = [
                (b[0][0] + b[0][1]) / (8.0 * PI),
                (b[1][0] + b[1][1]) / (8.0 * PI),
            ];
            return;
        }
        self.v[idx(0, n)] = self.g[n];
        for m in 1..n {
            let j = n - m;
            let a = self.v[idx(m, n - 1)];
            let b = self.v[idx(m - 1, n)];
            let c = self.v[idx(m - 1, n - 1)];
            let ba = mat_vec(&self.b[j - 1], a);
            let bb = mat_vec(&self.b[j + 1], b);
            let bc = mat_vec(&self.b[j], c);
            let rhs = [
                a[0] + b[0] - c[0] + kappa * (ba[0] + bb[0] + bc[0]),
                a[1] + b[1] - c[1] + kappa * (ba[1] + bb[1] + bc[1]),
            ];
            self.v[idx(m, n)] = solve_corner(&self.b[j], kappa, rhs);
        }
        self.v[idx(n, n)] = [0.0; 2];
        self.origin[n] = self.extrapolate_origin(n);
    }

    /// `R(nh, 0)` from `f_j = v(n − j, n) / r_j` along the incoming
    /// characteristic `η = nh`, extrapolated quadratically to `r = 0`.
    fn extrapolate_origin(&self, n: usize) -> [f64; 2] {
        let f = |j: usize| {
            let v = self.v(n - j, n);
            let r = self.radius(j);
            [v[0] / r, v[1] / r]
        };
        match n {
            0 => self.origin[0],
            1 => f(1),
            2 => {
                let (f1, f2) = (f(1), f(2));
                [2.0 * f1[0] - f2[0], 2.0 * f1[1] - f2[1]]
            }
            _ => {
                let (f1, f2, f3) = (f(1), f(2), f(3));
                [
                    3.0 * f1[0] - 3.0 * f2[0] + f3[0],
                    3.0 * f1[1] - 3.0 * f2[1] + f3[1],
                ]
            }
        }
    }
}

/// Solves `(I − κB) v = rhs`. Diagonal matrices are handled componentwise so
/// uncoupled systems stay bitwise uncoupled.
#[inline]
fn solve_corner(b: &Mat2, kappa: f64, rhs: [f64; 2]) -> [f64; 2] {
    let a00 = 1.0 - kappa * b[0][0];
    let a11 = 1.0 - kappa * b[1][1];
    if b[0][1] == 0.0 && b[1][0] == 0.0 {
        return [rhs[0] / a00, rhs[1] / a11];
    }
    let a01 = -kappa * b[0][1];
    let a10 = -kappa * b[1][0];
    let det = a00 * a11 - a01 * a10;
    [
        (a11 * rhs[0] - a01 * rhs[1]) / det,
        (a00 * rhs[1] - a10 * rhs[0]) / det,
    ]
}

/// The cone data `g(r) = r · segment_average(P, 0, r·ê)` for a radial potential.
pub fn boundary_data(p: &MatrixPotential) -> Result<impl Fn(f64) -> [f64; 2] + '_> {
    p.require_symmetry(Symmetry::Radial)?;
    Ok(move |r: f64| {
        if r <= 0.0 {
            return [0.0; 2];
        }
        let s =
            segment_average(p, &[0.0; 3], &[r, 0.0, 0.0]).expect("distinct endpoints for r > 0");
        [r * s[0], r * s[1]]
    })
}

/// Cone data on the radii `r_j = j·dr`, accumulated interval by interval:
/// `g(r_j) = (1/8π) ∫₀^{r_j} (β_i1 + β_i2)(ρ) dρ`.
pub fn cumulative_boundary(p: &MatrixPotential, dr: f64, count: usize) -> Vec<[f64; 2]> {
    let pieces = par::map_range(count, |j| {
        if j == 0 {
            return [0.0; 2];
        }
        let (a, b) = ((j - 1) as f64 * dr, j as f64 * dr);
        let mut out = [0.0; 2];
        for (i, o) in out.iter_mut().enumerate() {
            *o = adaptive_gauss_kronrod(|r| p.row_sums(&[r, 0.0, 0.0])[i], a, b, BOUNDARY_TOL)
                / (8.0 * PI);
        }
        out
    });
    let mut acc = [0.0; 2];
    pieces
        .into_iter()
        .map(|d| {
            acc = [acc[0] + d[0], acc[1] + d[1]];
            acc
        })
        .collect()
}

/// The regular part on the characteristic grid together with its potential.
#[derive(Debug, Clone)]
pub struct CausalField {
    marcher: Marcher,
    eta_max: f64,
    potential: MatrixPotential,
}

/// Solves the characteristic boundary value problem for a radial potential on
/// `0 ≤ ξ ≤ η ≤ eta_max` with `N` steps.
pub fn solve(p: &MatrixPotential, eta_max: f64, n: usize) -> Result<CausalField> {
    p.require_symmetry(Symmetry::Radial)?;
    let mut marcher = Marcher::new(eta_max, n)?;
    let dr = 0.5 * marcher.h();
    let bs = par::map_range(n + 1, |j| p.eval_matrix(&[j as f64 * dr, 0.0, 0.0]));
    let gs = cumulative_boundary(p, dr, n + 1);
    for (j, (b, g)) in bs.into_iter().zip(gs).enumerate() {
        marcher.set_layer(j, b, g);
    }
    marcher.march_all();
    Ok(CausalField {
        marcher,
        eta_max,
        potential: p.clone(),
    })
}

impl CausalField {
    pub fn from_marcher(marcher: Marcher, potential: MatrixPotential) -> Self {
        let eta_max = marcher.h() * marcher.n() as f64;
        Self {
            marcher,
            eta_max,
            potential,
        }
    }

    pub fn h(&self) -> f64 {
        self.marcher.h()
    }

    pub fn n(&self) -> usize {
        self.marcher.n()
    }

    pub fn eta_max(&self) -> f64 {
        self.eta_max
    }

    pub fn potential(&self) -> &MatrixPotential {
        &self.potential
    }

    pub fn marcher(&self) -> &Marcher {
        &self.marcher
    }

    /// `v` at grid node `(ξ_m, η_n)`.
    pub fn v(&self, m: usize, n: usize) -> [f64; 2] {
        self.marcher.v(m, n)
    }

    /// `R(nh, 0)`.
    pub fn origin_value(&self, n: usize) -> [f64; 2] {
        self.marcher.origin_value(n)
    }

    fn node_r(&self, m: usize, n: usize) -> [f64; 2] {
        if m == n {
            return self.marcher.origin_value(n);
        }
        let v = self.marcher.v(m, n);
        let r = self.marcher.radius(n - m);
        [v[0] / r, v[1] / r]
    }

    /// `R(t, r)`: zero before the wave front, interpolated in `(ξ, η)` behind it.
    pub fn field_r(&self, t: f64, r: f64) -> Result<[f64; 2]> {
        if !(r >= 0.0) || !t.is_finite() {
            return Err(Error::OutOfDomain {
                t,
                r,
                eta_max: self.eta_max,
            });
        }
        if t < r {
            return Ok([0.0; 2]);
        }
        if t + r > self.eta_max * (1.0 + 1e-12) {
            return Err(Error::OutOfDomain {
                t,
                r,
                eta_max: self.eta_max,
            });
        }
        let h = self.h();
        let n_max = self.n();
        let snap = |x: f64| {
            let k = x.round();
            if (x - k).abs() <= SNAP * k.max(1.0) {
                k
            } else {
                x
            }
        };
        let xi = snap((t - r) / h).max(0.0);
        let eta = snap((t + r) / h).min(n_max as f64);
        let b = (eta.floor() as usize).min(n_max - 1);
        let a = (xi.floor() as usize).min(b);
        let (fx, fy) = (xi - a as f64, eta - b as f64);
        let lerp = |w: [f64; 4], v: [[f64; 2]; 4]| {
            let mut out = [0.0; 2];
            for k in 0..4 {
                out[0] += w[k] * v[k][0];
                out[1] += w[k] * v[k][1];
            }
            out
        };
        if a < b {
            let w = [
                (1.0 - fx) * (1.0 - fy),
                fx * (1.0 - fy),
                (1.0 - fx) * fy,
                fx * fy,
            ];
            let v = [
                self.node_r(a, b),
                self.node_r(a + 1, b),
                self.node_r(a, b + 1),
                self.node_r(a + 1, b + 1),
            ];
            Ok(lerp(w, v))
        } else {
            // diagonal cell: triangle (a,a), (a,a+1), (a+1,a+1)
            let fx = fx.min(fy);
            let w = [1.0 - fy, fy - fx, fx, 0.0];
            let v = [
                self.node_r(a, a),
                self.node_r(a, a + 1),
                self.node_r(a + 1, a + 1),
                [0.0; 2],
            ];
            Ok(lerp(w, v))
        }
    }

    /// Samples `R(t, 0)` at the given times.
    pub fn trace_coincident(&self, times: &[f64]) -> Result<Trace> {
        check_times(times, 0.0)?;
        let regular = times
            .iter()
            .map(|&t| self.field_r(t, 0.0))
            .collect::<Result<Vec<_>>>()?;
        Trace::new(Receiver::Origin, times.to_vec(), regular)
    }

    /// The trace at every grid time `nh`, `n = 1..=N`.
    pub fn grid_trace(&self) -> Trace {
        let times = (1..=self.n()).map(|n| n as f64 * self.h()).collect();
        let regular = (1..=self.n()).map(|n| self.origin_value(n)).collect();
        Trace::new(Receiver::Origin, times, regular).expect("grid times are increasing")
    }
}

/// Scalar counterpart: `w_ξη = ¼ q(r) w`, `w(0, η) = (amplitude/8π) ∫₀^{η/2} q`.
#[derive(Debug, Clone)]
pub struct ScalarField {
    h: f64,
    n: usize,
    v: Vec<f64>,
    origin: Vec<f64>,
}

pub fn solve_scalar<F>(q: F, amplitude: f64, eta_max: f64, n: usize) -> Result<ScalarField>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    if n < 2 {
        return Err(Error::InvalidGrid(format!("need N >= 2, got {n}")));
    }
    if !(eta_max > 0.0) || !eta_max.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "eta_max must be positive, got {eta_max}"
        )));
    }
    let h = eta_max / n as f64;
    let dr = 0.5 * h;
    let qs: Vec<f64> = (0..=n).map(|j| q(j as f64 * dr)).collect();
    let pieces = par::map_range(n + 1, |j| {
        if j == 0 {
            0.0
        } else {
            adaptive_gauss_kronrod(&q, (j - 1) as f64 * dr, j as f64 * dr, BOUNDARY_TOL)
                / (8.0 * PI)
        }
    });
    let mut g = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    for d in pieces {
        acc += d;
        g.push(amplitude * acc);
    }
    let kappa = h * h / 16.0;
    let mut v = vec![0.0; idx(n, n) + 1];
    let mut origin = vec![0.0; n + 1];
    origin[0] = amplitude * qs[0] / (8.0 * PI);
    for col in 1..=n {
        v[idx(0, col)] = g[col];
        for m in 1..col {
            let j = col - m;
            let a = v[idx(m, col - 1)];
            let b = v[idx(m - 1, col)];
            let c = v[idx(m - 1, col - 1)];
            let rhs = a + b - c + kappa * (qs[j - 1] * a + qs[j + 1] * b + qs[j] * c);
            v[idx(m, col)] = rhs / (1.0 - kappa * qs[j]);
        }
        let f = |j: usize| v[idx(col - j, col)] / (j as f64 * dr);
        origin[col] = match col {
            1 => f(1),
            2 => 2.0 * f(1) - f(2),
            _ => 3.0 * f(1) - 3.0 * f(2) + f(3),
        };
    }
    Ok(ScalarField { h, n, v, origin })
}

impl ScalarField {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn v(&self, m: usize, n: usize) -> f64 {
        self.v[idx(m, n)]
    }

    pub fn origin_value(&self, n: usize) -> f64 {
        self.origin[n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{build_potential, ClassTag, Field};

    /// Modified Bessel `I₁` by its power series (test oracle).
    fn bessel_i1(x: f64) -> f64 {
        let y = 0.25 * x * x;
        let mut term = 0.5 * x;
        let mut sum = term;
        for k in 1..60 {
            term *= y / (k as f64 * (k + 1) as f64);
            sum += term;
        }
        sum
    }

    fn a1(c: f64) -> MatrixPotential {
        build_potential(ClassTag::A1, c, None, Symmetry::Radial).unwrap()
    }

    #[test]
    fn bessel_oracle_sanity() {
        assert!((bessel_i1(1.0) - 0.565_159_103_992_485).abs() < 1e-14);
    }

    #[test]
    fn boundary_data_examples() {
        let p = a1(1.0);
        let g = boundary_data(&p).unwrap();
        assert!((g(2.0)[0] - 1.0 / (2.0 * PI)).abs() < 1e-12);
        let z = MatrixPotential::zero(Symmetry::Radial);
        assert_eq!(boundary_data(&z).unwrap()(1.3), [0.0, 0.0]);
        let p =
            build_potential(ClassTag::A1, Field::radial(|r| r), None, Symmetry::Radial).unwrap();
        let g = boundary_data(&p).unwrap();
        assert!((g(1.5)[1] - 2.25 / (8.0 * PI)).abs() < 1e-12);
        let e = MatrixPotential::zero(Symmetry::Ellipsoidal);
        assert!(boundary_data(&e).is_err());
    }

    #[test]
    fn zero_potential_gives_zero_field() {
        let f = solve(&MatrixPotential::zero(Symmetry::Radial), 2.0, 16).unwrap();
        for n in 0..=16 {
            for m in 0..=n {
                assert_eq!(f.v(m, n), [0.0, 0.0]);
            }
        }
        assert_eq!(f.field_r(1.0, 0.0).unwrap(), [0.0, 0.0]);
    }

    #[test]
    fn constant_potential_matches_bessel_closed_form() {
        let c = 0.5;
        let f = solve(&a1(c), 2.0, 512).unwrap();
        let q: f64 = 2.0 * c;
        let exact = q.sqrt() / (4.0 * PI) * bessel_i1(q.sqrt() * 1.0) / 1.0;
        assert!((exact - 0.044_973_93).abs() < 1e-8);
        let r = f.field_r(1.0, 0.0).unwrap();
        assert!(((r[0] - exact) / exact).abs() < 1e-4, "{} vs {exact}", r[0]);
        assert_eq!(r[0], r[1]);
    }

    #[test]
    fn cone_values_equal_segment_average() {
        let p = build_potential(
            ClassTag::A2,
            Field::radial(|r| (-r).exp()),
            Some([Field::radial(|r| 0.3 * r), Field::Constant(-0.2)]),
            Symmetry::Radial,
        )
        .unwrap();
        let f = solve(&p, 2.0, 64).unwrap();
        for n in 1..=64 {
            let r = 0.5 * n as f64 * f.h();
            let got = f.field_r(r, r).unwrap();
            let want = segment_average(&p, &[0.0; 3], &[r, 0.0, 0.0]).unwrap();
            assert!((got[0] - want[0]).abs() < 1e-10 && (got[1] - want[1]).abs() < 1e-10);
        }
    }

    #[test]
    fn causality_and_domain_errors() {
        let f = solve(&a1(1.0), 2.0, 32).unwrap();
        assert_eq!(f.field_r(0.5, 0.9).unwrap(), [0.0, 0.0]);
        let on_cone = f.field_r(1.0, 1.0).unwrap();
        assert!((on_cone[0] - 1.0 / (4.0 * PI)).abs() < 1e-12);
        assert!(matches!(
            f.field_r(1.5, 0.6),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(matches!(
            solve(&a1(1.0), 2.0, 1),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            solve(&a1(1.0), 0.0, 8),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn diagonal_potential_decouples_into_scalar_solves() {
        let p = build_potential(
            ClassTag::A2,
            Field::radial(|r| 0.4 * (-r * r).exp()),
            Some([Field::Constant(0.0), Field::Constant(0.0)]),
            Symmetry::Radial,
        )
        .unwrap();
        let f = solve(&p, 2.0, 64).unwrap();
        let s = solve_scalar(|r| 0.4 * (-r * r).exp(), 1.0, 2.0, 64).unwrap();
        for n in 0..=64 {
            for m in 0..=n {
                assert_eq!(f.v(m, n)[0], s.v(m, n));
                assert_eq!(f.v(m, n)[1], s.v(m, n));
            }
        }
    }

    #[test]
    fn transposed_a1_potential_gives_identical_trace() {
        let p = build_potential(
            ClassTag::A1,
            Field::radial(|r| r.cos()),
            None,
            Symmetry::Radial,
        )
        .unwrap();
        let times = [0.25, 0.5, 1.0, 1.7];
        let a = solve(&p, 2.0, 64)
            .unwrap()
            .trace_coincident(&times)
            .unwrap();
        let b = solve(&p.transpose(), 2.0, 64)
            .unwrap()
            .trace_coincident(&times)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_trace_and_interpolated_trace_agree_at_grid_times() {
        let f = solve(&a1(0.3), 2.0, 40).unwrap();
        let g = f.grid_trace();
        let t = f.trace_coincident(&g.times).unwrap();
        assert_eq!(g, t);
    }

    #[test]
    fn corner_solve_inverts_the_matrix() {
        let b = [[1.0, 2.0], [-0.5, 3.0]];
        let k = 0.1;
        let v = solve_corner(&b, k, [1.0, 2.0]);
        let back = [
            v[0] - k * (b[0][0] * v[0] + b[0][1] * v[1]),
            v[1] - k * (b[1][0] * v[0] + b[1][1] * v[1]),
        ];
        assert!((back[0] - 1.0).abs() < 1e-14 && (back[1] - 2.0).abs() < 1e-14);
    }
}
