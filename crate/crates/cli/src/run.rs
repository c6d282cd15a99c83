use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use coupled_wave::born::picard_trace;
use coupled_wave::geometry::{geometry_check, QuadratureRule};
use coupled_wave::goursat::solve;
use coupled_wave::identity::{four_terms, gronwall_audit};
use coupled_wave::inversion::{
    add_noise, invert_ellipsoidal, invert_radial_layerstrip_with, invert_radial_lsq,
    select_lambda_discrepancy, ClassSpec, InversionReport, LayerStripOptions, LsqOptions,
};
use coupled_wave::{
    ClassTag, Error, MatrixPotential, ParameterKind, Receiver, Result, ScalarProfile, Trace,
};

use crate::config::{ExperimentConfig, Method, Mode};

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

pub fn run(mode: Mode, cfg: &ExperimentConfig, base: &Path, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    match mode {
        Mode::Forward => forward(cfg, base, out),
        Mode::Invert => invert(cfg, base, out),
        Mode::Identity => identity(cfg, base, out),
        Mode::Geomcheck => geomcheck(cfg, out),
    }
}

fn config_echo(cfg: &ExperimentConfig, mode: Mode) -> Value {
    let mut v = serde_json::to_value(cfg).expect("config serialises");
    v["mode"] = json!(mode);
    v
}

fn simulate(cfg: &ExperimentConfig, p: &MatrixPotential) -> Result<Trace> {
    let times = cfg.geometry.times();
    match cfg.geometry.receiver {
        Receiver::Origin => solve(p, cfg.eta_max(), cfg.solver.n)?.trace_coincident(&times),
        Receiver::Focus => picard_trace(p, Receiver::Focus, &times, &cfg.born),
    }
}

fn forward(cfg: &ExperimentConfig, base: &Path, out: &Path) -> Result<()> {
    let p = cfg.potential.build(base)?;
    let trace = simulate(cfg, &p)?;
    trace.write_files(
        out,
        "trace",
        json!({ "config": config_echo(cfg, Mode::Forward) }),
    )
}

#[derive(Serialize)]
struct InvertOutput<'a> {
    report: &'a InversionReport,
    /// Sup-norm error against the configured profile, when it has a closed form.
    #[serde(skip_serializing_if = "Option::is_none")]
    reference_sup_error: Option<f64>,
    config: Value,
}

fn invert(cfg: &ExperimentConfig, base: &Path, out: &Path) -> Result<()> {
    let pc = &cfg.potential;
    if pc.class == ClassTag::General {
        return Err(Error::ClassUnderdetermined(pc.class.to_string()));
    }
    let spec = ClassSpec {
        class_tag: pc.class,
        prescribed: pc.prescribed_fields(base)?,
        symmetry: pc.symmetry,
    };
    let inv = &cfg.inversion;
    let mut trace = match &inv.trace {
        Some(path) => Trace::read_files(&base.join(path), cfg.geometry.receiver)?,
        None => simulate(cfg, &pc.build(base)?)?,
    };
    if let Some(noise) = &inv.noise {
        trace = add_noise(&trace, noise.sigma, noise.seed)?;
    }
    let t_max = cfg.geometry.t_max;
    let sigma = inv.noise.as_ref().map(|n| n.sigma);
    let lsq = LsqOptions {
        t_max,
        n: inv.n,
        lambda: inv.lambda,
        max_iters: inv.max_iters,
    };
    let zero = ScalarProfile::constant(ParameterKind::Radius, 0.0);
    let report = match cfg.method() {
        Method::LayerStrip => invert_radial_layerstrip_with(
            &trace,
            &spec,
            t_max,
            inv.n,
            LayerStripOptions { noise_level: sigma },
        )?,
        Method::GaussNewton if !inv.lambdas.is_empty() => select_lambda_discrepancy(
            &trace,
            &spec,
            &zero,
            lsq,
            &inv.lambdas,
            sigma.unwrap_or(0.0),
        )?,
        Method::GaussNewton => invert_radial_lsq(&trace, &spec, &zero, lsq)?,
        Method::BornPicard => invert_ellipsoidal(&trace, &spec, t_max, inv.corrections, &cfg.born)?,
    };
    let reference_sup_error = match (&inv.trace, pc.unknown.closed_form()) {
        (None, Some(f)) => Some(
            report
                .profile
                .samples()
                .map(|(p, b)| (b - f(p)).abs())
                .fold(0.0, f64::max),
        ),
        _ => None,
    };
    report
        .profile
        .write_csv(std::fs::File::create(out.join("profile.csv"))?)?;
    write_json(
        &out.join("report.json"),
        &InvertOutput {
            report: &report,
            reference_sup_error,
            config: config_echo(cfg, Mode::Invert),
        },
    )
}

fn identity(cfg: &ExperimentConfig, base: &Path, out: &Path) -> Result<()> {
    let p1 = cfg.potential.build(base)?;
    let p2 = match &cfg.identity.second {
        Some(q) => q.build(base)?,
        None => MatrixPotential::zero(p1.symmetry()),
    };
    let id = &cfg.identity;
    let report = four_terms(&p1, &p2, id.tau, id.n)?;
    let audit = if id.audit_taus.is_empty() {
        None
    } else {
        let rule = QuadratureRule::new(id.n_phi, id.n_theta)?;
        Some(gronwall_audit(&p1.difference(&p2), &id.audit_taus, &rule)?)
    };
    write_json(
        &out.join("identity.json"),
        &json!({ "identity": report, "audit": audit, "config": config_echo(cfg, Mode::Identity) }),
    )
}

fn geomcheck(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let g = &cfg.geomcheck;
    let rule = QuadratureRule::with_radial(g.n_rho, g.n_phi, g.n_theta)?;
    let check = geometry_check(g.two_tau, &rule)?;
    write_json(
        &out.join("geomcheck.json"),
        &json!({ "check": check, "config": config_echo(cfg, Mode::Geomcheck) }),
    )
}
