//! Recovery of the single unknown profile of an admissible-class potential
//! from one receiver trace.
//!
//! * Coincident geometry, radial symmetry: layer stripping on the
//!   characteristic grid, or Gauss–Newton on the same discrete model.
//! * Separated geometry, ellipsoidal symmetry: the diagonal single-scattering
//!   inverse followed by fixed-point corrections with the second-order series.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::born::{born1_trace, picard_trace, BornConfig};
use crate::error::{Error, Result};
use crate::geometry::QuadratureRule;
use crate::goursat::{self, cumulative_boundary, Marcher};
use crate::par;
use crate::potentials::{
    build_potential, ClassTag, Field, Interpolation, Mat2, MatrixPotential, ParameterKind,
    ScalarProfile, Symmetry,
};
use crate::trace::{Receiver, Trace};

/// Which class the unknown potential belongs to and what is prescribed.
#[derive(Debug, Clone)]
pub struct ClassSpec {
    pub class_tag: ClassTag,
    /// `(β12, β21)` for A2, `(β11, β22)` for A3.
    pub prescribed: Option<[Field; 2]>,
    pub symmetry: Symmetry,
}

impl ClassSpec {
    pub fn a1(symmetry: Symmetry) -> Self {
        Self {
            class_tag: ClassTag::A1,
            prescribed: None,
            symmetry,
        }
    }

    fn validate(&self, symmetry: Symmetry) -> Result<()> {
        if self.class_tag == ClassTag::General {
            return Err(Error::ClassUnderdetermined(self.class_tag.to_string()));
        }
        if self.symmetry != symmetry {
            return Err(Error::SymmetryMismatch(format!(
                "this inversion needs a {symmetry:?} class, got {:?}",
                self.symmetry
            )));
        }
        Ok(())
    }

    /// Assembles the potential with the given unknown profile.
    pub fn build(&self, unknown: impl Into<Field>) -> Result<MatrixPotential> {
        build_potential(
            self.class_tag,
            unknown,
            self.prescribed.clone(),
            self.symmetry,
        )
    }

    /// The potential with the unknown set to zero.
    pub fn prescribed_only(&self) -> Result<MatrixPotential> {
        self.build(0.0)
    }

    fn pattern(&self) -> [[bool; 2]; 2] {
        self.class_tag.unknown_pattern().expect("validated class")
    }

    /// Number of unknown entries in each row.
    fn row_counts(&self) -> [f64; 2] {
        let p = self.pattern();
        [
            (p[0][0] as u8 + p[0][1] as u8) as f64,
            (p[1][0] as u8 + p[1][1] as u8) as f64,
        ]
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct InversionFlags {
    pub noise_floor_hit: bool,
    pub non_converged: bool,
}

/// Recovered profile plus diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct InversionReport {
    pub method: &'static str,
    #[serde(serialize_with = "serialize_profile")]
    pub profile: ScalarProfile,
    pub residuals: Vec<f64>,
    pub misfit_sup: f64,
    pub misfit_l2: f64,
    pub iterations: usize,
    pub flags: InversionFlags,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

fn serialize_profile<S: serde::Serializer>(p: &ScalarProfile, s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("ScalarProfile", 3)?;
    st.serialize_field("parameter_kind", &p.kind())?;
    st.serialize_field("interpolation", &p.interpolation())?;
    st.serialize_field("samples", &p.samples().collect::<Vec<_>>())?;
    st.end()
}

fn misfits(model: &Trace, data: &Trace) -> (f64, f64) {
    let mut sup = 0.0f64;
    let mut l2 = 0.0;
    for (a, b) in model.regular.iter().zip(&data.regular) {
        for i in 0..2 {
            let d = a[i] - b[i];
            sup = sup.max(d.abs());
            l2 += d * d;
        }
    }
    (sup, l2.sqrt())
}

/// Picks the samples of `trace` at `t_k = k·t_max/n`, `k = 1..=n`.
fn grid_samples(trace: &Trace, t_max: f64, n: usize) -> Result<Vec<[f64; 2]>> {
    let h = t_max / n as f64;
    let mut out = Vec::with_capacity(n);
    let mut cursor = 0;
    for k in 1..=n {
        let t = k as f64 * h;
        let tol = 1e-9 * t.max(1.0);
        while cursor < trace.len() && trace.times[cursor] < t - tol {
            cursor += 1;
        }
        match trace.times.get(cursor) {
            Some(&s) if (s - t).abs() <= tol => out.push(trace.regular[cursor]),
            _ => {
                return Err(Error::InvalidGrid(format!(
                    "trace has no sample at t = {t} (grid T = {t_max}, N = {n})"
                )))
            }
        }
    }
    Ok(out)
}

/// The discrete coincident forward model with a piecewise-linear unknown
/// profile on the knots `r_j = j·h/2`.
struct LayerModel {
    spec: ClassSpec,
    n: usize,
    h: f64,
    prescribed_b: Vec<Mat2>,
    prescribed_g: Vec<[f64; 2]>,
    pattern: [[bool; 2]; 2],
    row_counts: [f64; 2],
}

impl LayerModel {
    fn new(spec: &ClassSpec, t_max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need N >= 2, got {n}")));
        }
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "T must be positive, got {t_max}"
            )));
        }
        let base = spec.prescribed_only()?;
        let h = t_max / n as f64;
        let dr = 0.5 * h;
        let prescribed_b = (0..=n)
            .map(|j| base.eval_matrix(&[j as f64 * dr, 0.0, 0.0]))
            .collect();
        let prescribed_g = cumulative_boundary(&base, dr, n + 1);
        Ok(Self {
            spec: spec.clone(),
            n,
            h,
            prescribed_b,
            prescribed_g,
            pattern: spec.pattern(),
            row_counts: spec.row_counts(),
        })
    }

    fn knots(&self) -> Vec<f64> {
        (0..=self.n).map(|j| 0.5 * j as f64 * self.h).collect()
    }

    fn layer_matrix(&self, j: usize, b: f64) -> Mat2 {
        let mut m = self.prescribed_b[j];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                if self.pattern[r][c] {
                    *entry += b;
                }
            }
        }
        m
    }

    /// Cone value at `r_j` given `∫₀^{r_j} b` (trapezoid, exact for the
    /// piecewise-linear profile).
    fn layer_g(&self, j: usize, integral: f64) -> [f64; 2] {
        let g = self.prescribed_g[j];
        let k = integral / (8.0 * PI);
        [g[0] + self.row_counts[0] * k, g[1] + self.row_counts[1] * k]
    }

    fn marcher(&self) -> Marcher {
        Marcher::new(self.h * self.n as f64, self.n).expect("validated grid")
    }

    /// Full forward pass: `R(t_k, 0)` for `k = 1..=N` from knot values `b`.
    fn forward(&self, b: &[f64]) -> Vec<[f64; 2]> {
        let mut m = self.marcher();
        let dr = 0.5 * self.h;
        let mut integral = 0.0;
        for j in 0..=self.n {
            if j > 0 {
                integral += 0.5 * dr * (b[j - 1] + b[j]);
            }
            m.set_layer(j, self.layer_matrix(j, b[j]), self.layer_g(j, integral));
        }
        m.march_all();
        (1..=self.n).map(|k| m.origin_value(k)).collect()
    }

    fn profile(&self, b: &[f64]) -> ScalarProfile {
        ScalarProfile::new(
            ParameterKind::Radius,
            self.knots().into_iter().zip(b.iter().copied()).collect(),
            Interpolation::Linear,
        )
        .expect("knots are increasing")
    }

    /// Misfit of the recovered profile recomputed with an independent solve.
    fn independent_misfit(&self, b: &[f64], data: &[[f64; 2]]) -> Result<(f64, f64)> {
        let p = self.spec.build(self.profile(b))?;
        let field = goursat::solve(&p, self.h * self.n as f64, self.n)?;
        let model = field.grid_trace();
        let times = model.times.clone();
        let data = Trace::new(Receiver::Origin, times, data.to_vec())?;
        Ok(misfits(&model, &data))
    }
}

/// Options for [`invert_radial_layerstrip_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct LayerStripOptions {
    /// Standard deviation of the data noise, if known; enables the
    /// cumulative-error halt.
    pub noise_level: Option<f64>,
}

const SECANT_MAX_ITERS: usize = 50;
const SECANT_STEP_TOL: f64 = 1e-13;
const SECANT_FLAT_TOL: f64 = 1e-9;

/// Layer stripping for radial potentials on the grid `t_k = k·T/N`.
pub fn invert_radial_layerstrip(
    trace: &Trace,
    spec: &ClassSpec,
    t_max: f64,
    n: usize,
) -> Result<InversionReport> {
    invert_radial_layerstrip_with(trace, spec, t_max, n, LayerStripOptions::default())
}

pub fn invert_radial_layerstrip_with(
    trace: &Trace,
    spec: &ClassSpec,
    t_max: f64,
    n: usize,
    opts: LayerStripOptions,
) -> Result<InversionReport> {
    spec.validate(Symmetry::Radial)?;
    let model = LayerModel::new(spec, t_max, n)?;
    let data = grid_samples(trace, t_max, n)?;
    let target: Vec<f64> = data.iter().map(|d| d[0] + d[1]).collect();
    let dr = 0.5 * model.h;

    let mut m = model.marcher();
    let mut b: Vec<f64> = vec![0.0; n + 1];
    let mut residuals = Vec::with_capacity(n);
    let mut iterations = 0;
    let mut flags = InversionFlags::default();
    let mut err_estimate = 0.0;
    let mut solved = n;
    let mut integral_before = 0.0; // ∫₀^{r_{k−1}} b

    for k in 1..=n {
        // Column k depends on b_k (and, for k = 1, on b_0 = b_1 jointly).
        let eval = |m: &mut Marcher, b: &mut [f64], x: f64| {
            let integral = if k == 1 {
                b[0] = x;
                m.set_layer(0, model.layer_matrix(0, x), [0.0; 2]);
                m.march_column(0);
                dr * x
            } else {
                integral_before + 0.5 * dr * (b[k - 1] + x)
            };
            b[k] = x;
            m.set_layer(k, model.layer_matrix(k, x), model.layer_g(k, integral));
            m.march_column(k);
            let o = m.origin_value(k);
            o[0] + o[1] - target[k - 1]
        };
        let prev = if k >= 2 { b[k - 1] } else { 0.0 };
        let prev2 = if k >= 3 { b[k - 2] } else { prev };
        let step = (10.0 * (prev - prev2).abs()).max(1e-4);
        let (mut x0, mut x1): (f64, f64) = (prev, prev + step);
        let mut f0 = eval(&mut m, &mut b, x0);
        let mut slope: f64 = f64::NAN;
        let mut converged = f0 == 0.0;
        let mut x = x0;
        if !converged {
            let mut f1 = eval(&mut m, &mut b, x1);
            for it in 0..SECANT_MAX_ITERS {
                iterations += 1;
                if f1 == f0 {
                    // flat at roundoff: accept if the iterates have collapsed
                    converged = (x1 - x0).abs() <= SECANT_FLAT_TOL * x1.abs().max(1.0);
                    break;
                }
                slope = (f1 - f0) / (x1 - x0);
                let x2 = x1 - f1 / slope;
                if !x2.is_finite() {
                    break;
                }
                let f2 = eval(&mut m, &mut b, x2);
                x0 = x1;
                f0 = f1;
                x1 = x2;
                f1 = f2;
                if f2 == 0.0 || (x1 - x0).abs() <= SECANT_STEP_TOL * x1.abs().max(1.0) {
                    converged = true;
                    break;
                }
                if it + 1 == SECANT_MAX_ITERS {
                    break;
                }
            }
            x = x1;
            if !converged {
                return Err(Error::SecantDivergence {
                    layer: k,
                    lo: x0.min(x1),
                    hi: x0.max(x1),
                });
            }
        }
        // leave the marcher consistent with the accepted value
        let res = eval(&mut m, &mut b, x);
        residuals.push(res.abs());
        integral_before = if k == 1 {
            dr * x
        } else {
            integral_before + 0.5 * dr * (b[k - 1] + x)
        };

        if let Some(sigma) = opts.noise_level {
            let s = if slope.is_finite() && slope != 0.0 {
                slope.abs()
            } else {
                1.0
            };
            err_estimate += sigma / s * model.h;
            if err_estimate * s > 10.0 * sigma {
                flags.noise_floor_hit = true;
                solved = k;
                break;
            }
        }
    }

    let keep = solved + 1;
    let (mis_sup, mis_l2) = model.independent_misfit(&b, &data)?;
    let profile = if keep == n + 1 {
        model.profile(&b)
    } else {
        ScalarProfile::new(
            ParameterKind::Radius,
            model
                .knots()
                .into_iter()
                .zip(b.iter().copied())
                .take(keep)
                .collect(),
            Interpolation::Linear,
        )?
    };
    Ok(InversionReport {
        method: "layer_strip",
        profile,
        residuals,
        misfit_sup: mis_sup,
        misfit_l2: mis_l2,
        iterations,
        flags,
        lambda: None,
    })
}

/// Options for [`invert_radial_lsq`].
#[derive(Debug, Clone, Copy)]
pub struct LsqOptions {
    pub t_max: f64,
    pub n: usize,
    pub lambda: f64,
    pub max_iters: usize,
}

const GRADIENT_TOL: f64 = 1e-10;
const MAX_HALVINGS: usize = 30;
const CONDITION_LIMIT: f64 = 1e14;

/// Gauss–Newton for `‖F(b) − d‖² + λ‖D²b‖²` on the knots of the layer model.
/// Unknowns are `b_1..b_N` with `b_0 = b_1`.
pub fn invert_radial_lsq(
    trace: &Trace,
    spec: &ClassSpec,
    init: &ScalarProfile,
    opts: LsqOptions,
) -> Result<InversionReport> {
    spec.validate(Symmetry::Radial)?;
    if !(opts.lambda >= 0.0) {
        return Err(Error::InvalidGrid(format!(
            "lambda must be >= 0, got {}",
            opts.lambda
        )));
    }
    let model = LayerModel::new(spec, opts.t_max, opts.n)?;
    let data = grid_samples(trace, opts.t_max, opts.n)?;
    let n = opts.n;
    let d = DVector::from_iterator(n, data.iter().map(|v| v[0] + v[1]));
    let knots = model.knots();
    let mut x = DVector::from_iterator(n, knots[1..].iter().map(|&r| init.eval(r)));

    let expand = |x: &DVector<f64>| {
        let mut b = Vec::with_capacity(n + 1);
        b.push(x[0]);
        b.extend(x.iter().copied());
        b
    };
    let residual = |x: &DVector<f64>| {
        let f = model.forward(&expand(x));
        DVector::from_iterator(n, f.iter().map(|v| v[0] + v[1])) - &d
    };
    // D²b / Δr² · √Δr on b_0..b_N, as a matrix acting on x
    let dr = 0.5 * model.h;
    let reg = {
        let mut l = DMatrix::zeros(n.saturating_sub(1), n);
        let scale = dr.sqrt() / (dr * dr);
        for i in 0..n.saturating_sub(1) {
            // rows use b_i, b_{i+1}, b_{i+2}; b_0 maps to x_0
            let cols = [i.saturating_sub(1), i, i + 1];
            let coef = [1.0, -2.0, 1.0];
            for (c, w) in cols.iter().zip(coef) {
                l[(i, *c)] += w * scale;
            }
        }
        l
    };
    let lambda = opts.lambda;
    let objective =
        |r: &DVector<f64>, x: &DVector<f64>| r.norm_squared() + lambda * (&reg * x).norm_squared();

    let mut r = residual(&x);
    let mut phi = objective(&r, &x);
    let mut residuals = vec![r.norm()];
    let mut iterations = 0;
    let mut flags = InversionFlags::default();
    loop {
        let jac = jacobian(&model, &x, &expand, &d, &r);
        let grad = jac.transpose() * &r + lambda * reg.transpose() * (&reg * &x);
        if grad.norm() <= GRADIENT_TOL {
            break;
        }
        if iterations >= opts.max_iters {
            flags.non_converged = true;
            break;
        }
        iterations += 1;
        let normal = jac.transpose() * &jac + lambda * reg.transpose() * &reg;
        let sv = normal.clone().singular_values();
        let smax = sv.max();
        let smin = sv.min();
        let condition = if smin > 0.0 {
            smax / smin
        } else {
            f64::INFINITY
        };
        if !(condition < CONDITION_LIMIT) {
            return Err(Error::SingularNormalEquations { condition });
        }
        let chol = normal
            .cholesky()
            .ok_or(Error::SingularNormalEquations { condition })?;
        let step = chol.solve(&(-&grad));
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_HALVINGS {
            let trial = &x + alpha * &step;
            let rt = residual(&trial);
            let pt = objective(&rt, &trial);
            if pt < phi {
                x = trial;
                r = rt;
                phi = pt;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        residuals.push(r.norm());
        if !accepted {
            if grad.norm() <= 1e3 * GRADIENT_TOL {
                break;
            }
            return Err(Error::LineSearchFailure { iter: iterations });
        }
    }
    let b = expand(&x);
    let (mis_sup, mis_l2) = model.independent_misfit(&b, &data)?;
    Ok(InversionReport {
        method: "gauss_newton",
        profile: model.profile(&b),
        residuals,
        misfit_sup: mis_sup,
        misfit_l2: mis_l2,
        iterations,
        flags,
        lambda: Some(lambda),
    })
}

/// Forward-difference Jacobian of the component-sum residual; columns are
/// computed in parallel.
fn jacobian(
    model: &LayerModel,
    x: &DVector<f64>,
    expand: &(dyn Fn(&DVector<f64>) -> Vec<f64> + Sync),
    d: &DVector<f64>,
    r0: &DVector<f64>,
) -> DMatrix<f64> {
    let n = x.len();
    let cols = par::map_range(n, |j| {
        let step = 1e-7 * x[j].abs().max(1.0);
        let mut xp = x.clone();
        xp[j] += step;
        let f = model.forward(&expand(&xp));
        (0..n)
            .map(|k| ((f[k][0] + f[k][1] - d[k]) - r0[k]) / step)
            .collect::<Vec<_>>()
    });
    DMatrix::from_fn(n, n, |k, j| cols[j][k])
}

/// Adds independent Gaussian noise of standard deviation `sigma` to both
/// components, reproducibly for a given seed.
pub fn add_noise(trace: &Trace, sigma: f64, seed: u64) -> Result<Trace> {
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidGrid(format!("noise level {sigma}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = trace.clone();
    for r in &mut out.regular {
        r[0] += normal.sample(&mut rng);
        r[1] += normal.sample(&mut rng);
    }
    Ok(out)
}

/// Runs Gauss–Newton for each `λ` in decreasing order and returns the largest
/// one whose component-sum misfit is below `1.1·σ_sum·√N`, where
/// `σ_sum = √2·sigma` is the noise level of the sum of two components.
pub fn select_lambda_discrepancy(
    trace: &Trace,
    spec: &ClassSpec,
    init: &ScalarProfile,
    opts: LsqOptions,
    lambdas: &[f64],
    sigma: f64,
) -> Result<InversionReport> {
    let mut sorted = lambdas.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let target = 1.1 * sigma * 2f64.sqrt() * (opts.n as f64).sqrt();
    let mut last = None;
    for lambda in sorted {
        let rep = invert_radial_lsq(trace, spec, init, LsqOptions { lambda, ..opts })?;
        if rep.residuals.last().copied().unwrap_or(f64::INFINITY) <= target {
            return Ok(rep);
        }
        last = Some(rep);
    }
    let mut rep = last.ok_or(Error::EmptyGrid)?;
    rep.flags.non_converged = true;
    Ok(rep)
}

/// Separated-geometry recovery on the sample times of `trace` inside `(1, T]`.
pub fn invert_ellipsoidal(
    trace: &Trace,
    spec: &ClassSpec,
    t_max: f64,
    correction_iters: usize,
    cfg: &BornConfig,
) -> Result<InversionReport> {
    spec.validate(Symmetry::Ellipsoidal)?;
    if !(t_max > 1.0) {
        return Err(Error::DegenerateEllipsoid(t_max));
    }
    if trace.receiver != Receiver::Focus {
        return Err(Error::Format(
            "ellipsoidal inversion needs a trace at e".into(),
        ));
    }
    let keep: Vec<usize> = (0..trace.len())
        .filter(|&k| trace.times[k] <= t_max * (1.0 + 1e-12))
        .collect();
    if keep.len() < 2 {
        return Err(Error::InvalidGrid(
            "need at least two samples in (1, T]".into(),
        ));
    }
    let times: Vec<f64> = keep.iter().map(|&k| trace.times[k]).collect();
    let data: Vec<f64> = keep
        .iter()
        .map(|&k| trace.regular[k][0] + trace.regular[k][1])
        .collect();
    let data_trace = Trace::new(
        Receiver::Focus,
        times.clone(),
        keep.iter().map(|&k| trace.regular[k]).collect(),
    )?;

    let count = spec.class_tag.unknown_count().expect("validated class") as f64;
    let kappa = 8.0 * PI / count;
    let surface = QuadratureRule::new(cfg.surface[0], cfg.surface[1])?;
    let base = born1_trace(&spec.prescribed_only()?, &times, &surface)?;
    let mut b: Vec<f64> = data
        .iter()
        .zip(base.component_sum())
        .map(|(d, s)| kappa * (d - s))
        .collect();

    let second = BornConfig { order: 2, ..*cfg };
    let forward = |b: &[f64]| -> Result<(MatrixPotential, Trace)> {
        let p = spec.build(ellipsoidal_profile(&times, b)?)?;
        let tr = picard_trace(&p, Receiver::Focus, &times, &second)?;
        Ok((p, tr))
    };
    let mut residuals = Vec::with_capacity(correction_iters + 1);
    let (_, mut model) = forward(&b)?;
    residuals.push(sup_gap(&data, &model));
    for _ in 0..correction_iters {
        let sums = model.component_sum();
        for k in 0..b.len() {
            b[k] += kappa * (data[k] - sums[k]);
        }
        model = forward(&b)?.1;
        let res = sup_gap(&data, &model);
        let prev = *residuals.last().unwrap();
        residuals.push(res);
        if res > 1.01 * prev + 1e-15 {
            return Err(Error::NonContraction { residuals });
        }
    }
    let (mis_sup, mis_l2) = misfits(&model, &data_trace);
    let profile = ScalarProfile::new(
        ParameterKind::EllipsoidalSum,
        times.iter().copied().zip(b.iter().copied()).collect(),
        Interpolation::CubicHermite,
    )?;
    Ok(InversionReport {
        method: "born_picard",
        profile,
        residuals,
        misfit_sup: mis_sup,
        misfit_l2: mis_l2,
        iterations: correction_iters,
        flags: InversionFlags::default(),
        lambda: None,
    })
}

fn sup_gap(data: &[f64], model: &Trace) -> f64 {
    data.iter()
        .zip(model.component_sum())
        .map(|(d, m)| (d - m).abs())
        .fold(0.0, f64::max)
}

/// Monotone cubic through the samples, with a linearly extrapolated knot at
/// the focal segment `s = 1`.
fn ellipsoidal_profile(times: &[f64], b: &[f64]) -> Result<ScalarProfile> {
    let mut samples = Vec::with_capacity(times.len() + 1);
    let (t0, t1) = (times[0], times[1]);
    let b_at_one = b[0] - (t0 - 1.0) * (b[1] - b[0]) / (t1 - t0);
    if t0 > 1.0 + 1e-12 {
        samples.push((1.0, b_at_one));
    }
    samples.extend(times.iter().copied().zip(b.iter().copied()));
    ScalarProfile::new(
        ParameterKind::EllipsoidalSum,
        samples,
        Interpolation::CubicHermite,
    )
}
