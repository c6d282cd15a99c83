//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#![allow(clippy::type_complexity)]

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use coupled_wave::born::{born1_trace, picard_trace, BornConfig};
use coupled_wave::geometry::{geometry_check, grad_factor_grid_residual, QuadratureRule};
use coupled_wave::goursat::{solve, solve_scalar};
use coupled_wave::identity::{four_terms, gronwall_audit, i_ellipsoid, i_sphere};
use coupled_wave::inversion::{
    invert_ellipsoidal, invert_radial_layerstrip, invert_radial_lsq, ClassSpec, LsqOptions,
};
use coupled_wave::{
    build_potential, ClassTag, Field, MatrixPotential, ParameterKind, Receiver, ScalarProfile,
    Symmetry,
};

/// Modified Bessel `I₁` by its power series.
fn bessel_i1(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 0.5 * x;
    let mut sum = term;
    for k in 1..80 {
        term *= y / (k as f64 * (k + 1) as f64);
        sum += term;
    }
    sum
}

/// Smooth bump supported on `(a, b)`.
fn bump(x: f64, a: f64, b: f64) -> f64 {
    if x <= a || x >= b {
        0.0
    } else {
        let u = (x - a) / (b - a);
        (1.0 - 1.0 / (4.0 * u * (1.0 - u))).exp()
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn a1_radial(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> MatrixPotential {
    build_potential(ClassTag::A1, Field::radial(f), None, Symmetry::Radial).unwrap()
}

fn a1_ellipsoidal(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> MatrixPotential {
    build_potential(
        ClassTag::A1,
        Field::ellipsoidal(f),
        None,
        Symmetry::Ellipsoidal,
    )
    .unwrap()
}

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            pass: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: String) {
        self.pass &= ok;
        self.lines
            .push(format!("    [{}] {what}", if ok { "ok" } else { "FAILED" }));
    }

    fn note(&mut self, what: String) {
        self.lines.push(format!("    [info] {what}"));
    }
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let g = geometry_check(2.0, &QuadratureRule::with_radial(32, 64, 128).unwrap()).unwrap();
    o.check(
        g.sphere_rel_residual <= 1e-10,
        format!("sphere area r=2 rel {:.2e}", g.sphere_rel_residual),
    );
    o.check(
        g.area_rel_residual <= 1e-8,
        format!(
            "prolate area {:.12} vs {:.12} rel {:.2e}",
            g.area, g.area_exact, g.area_rel_residual
        ),
    );
    o.check(
        (g.area_exact - 10.411).abs() < 1e-3,
        format!("analytic area rounds to 10.411 ({:.6})", g.area_exact),
    );
    o.check(
        g.volume_rel_residual <= 1e-8 && (g.volume_exact - PI).abs() < 1e-14,
        format!(
            "volume {:.14} vs pi rel {:.2e}",
            g.volume, g.volume_rel_residual
        ),
    );
    let gf = grad_factor_grid_residual(50, 50);
    o.check(
        gf <= 1e-12,
        format!("grad factor closed form vs direct, 50x50: {gf:.2e}"),
    );
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let rule = QuadratureRule::new(48, 32).unwrap();
    let profiles: [(&str, fn(f64) -> f64); 3] = [
        ("constant", |_| 0.7),
        ("exponential", |s| (-s).exp()),
        ("gaussian", |s| 0.3 * (-s * s).exp()),
    ];
    for (name, b) in profiles {
        let p = a1_radial(b);
        for tau in [0.3, 1.0, 2.2] {
            let got = i_sphere(&p, tau, &rule).unwrap();
            let want = 8.0 * PI * b(tau);
            let e = rel(got, want);
            o.check(e <= 1e-6, format!("I_sphere {name} tau={tau}: rel {e:.2e}"));
        }
        let p = a1_ellipsoidal(b);
        for two_tau in [1.2, 2.0, 3.5] {
            let got = i_ellipsoid(&p, two_tau, &rule).unwrap();
            let want = 8.0 * PI * b(two_tau);
            let e = rel(got, want);
            o.check(
                e <= 1e-6,
                format!("I_ellipsoid {name} 2tau={two_tau}: rel {e:.2e}"),
            );
        }
    }
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    let c = 0.5;
    let p = build_potential(ClassTag::A1, c, None, Symmetry::Radial).unwrap();
    // R_i(t, 0) = (√q / 4π) I₁(√q t) / t with q = 2c
    let q: f64 = 2.0 * c;
    let exact = q.sqrt() / (4.0 * PI) * bessel_i1(q.sqrt());
    let fields: Vec<_> = [256, 512, 1024]
        .iter()
        .map(|&n| solve(&p, 1.0, n).unwrap())
        .collect();
    let r = fields[1].field_r(1.0, 0.0).unwrap();
    let e = rel(r[0], exact).max(rel(r[1], exact));
    o.check(
        e <= 1e-4,
        format!(
            "N=512 R(1,0) = {:.10} vs closed form {exact:.10}: rel {e:.2e}",
            r[0]
        ),
    );
    let stated = 0.0224861;
    o.note(format!(
        "I1(1)/(8pi) = {:.7} (stated figure {stated}); solver/stated = {:.6}; \
         the cone condition R(t,t) = q/(8pi) fixes the prefactor at 1/(4pi), see README",
        bessel_i1(1.0) / (8.0 * PI),
        r[0] / stated
    ));
    let diff = |coarse: usize, fine: usize| {
        let (fc, ff) = (&fields[coarse], &fields[fine]);
        let step = ff.n() / fc.n();
        let mut worst = 0.0f64;
        for n in 0..=fc.n() {
            for m in 0..=n {
                let a = fc.v(m, n);
                let b = ff.v(m * step, n * step);
                worst = worst.max((a[0] - b[0]).abs()).max((a[1] - b[1]).abs());
            }
        }
        worst
    };
    let (d1, d2) = (diff(0, 1), diff(1, 2));
    let ratio = d1 / d2;
    o.check(
        (3.5..=4.5).contains(&ratio),
        format!(
            "self-convergence |v256-v512| = {d1:.3e}, |v512-v1024| = {d2:.3e}, ratio {ratio:.4}"
        ),
    );
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let (eta, n) = (3.0, 256);
    let b = |r: f64| 0.4 * (-r).exp() * (1.0 + r.sin());
    let f = solve(&a1_radial(b), eta, n).unwrap();
    let s = solve_scalar(move |r| 2.0 * b(r), 2.0, eta, n).unwrap();
    let mut equal = true;
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for col in 0..=n {
        for m in 0..=col {
            let v = f.v(m, col);
            equal &= v[0] == v[1];
            worst = worst.max((v[0] + v[1] - s.v(m, col)).abs());
            scale = scale.max(s.v(m, col).abs());
        }
    }
    o.check(equal, "A1: U1 == U2 bitwise on every node".into());
    let grid_rel = worst / scale;
    o.check(
        grid_rel <= 1e-10,
        format!("U1+U2 vs scalar solve with doubled potential: {grid_rel:.2e}"),
    );

    let (f11, f22) = (|r: f64| 0.5 * (-r * r).exp(), |r: f64| -0.2 + 0.1 * r);
    let diag = MatrixPotential::general(
        [
            [Field::radial(f11), Field::Constant(0.0)],
            [Field::Constant(0.0), Field::radial(f22)],
        ],
        Symmetry::Radial,
    )
    .unwrap();
    let f = solve(&diag, eta, n).unwrap();
    let s1 = solve_scalar(f11, 1.0, eta, n).unwrap();
    let s2 = solve_scalar(f22, 1.0, eta, n).unwrap();
    let mut exact = true;
    for col in 0..=n {
        for m in 0..=col {
            let v = f.v(m, col);
            exact &= v[0] == s1.v(m, col) && v[1] == s2.v(m, col);
        }
    }
    o.check(
        exact,
        "diagonal potential equals two scalar solves bitwise".into(),
    );
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let cases: [(&str, MatrixPotential, MatrixPotential); 2] = [
        (
            "P1 = A1 0.1, P2 = 0",
            build_potential(ClassTag::A1, 0.1, None, Symmetry::Radial).unwrap(),
            MatrixPotential::zero(Symmetry::Radial),
        ),
        (
            "P1 = A2 0.3e^-r, P2 = A2 0.1 (same prescribed)",
            build_potential(
                ClassTag::A2,
                Field::radial(|r| 0.3 * (-r).exp()),
                Some([Field::radial(|r| 0.2 * r), Field::Constant(0.15)]),
                Symmetry::Radial,
            )
            .unwrap(),
            build_potential(
                ClassTag::A2,
                0.1,
                Some([Field::radial(|r| 0.2 * r), Field::Constant(0.15)]),
                Symmetry::Radial,
            )
            .unwrap(),
        ),
    ];
    for (name, p1, p2) in cases {
        let r512 = four_terms(&p1, &p2, 0.5, 512).unwrap();
        let r1024 = four_terms(&p1, &p2, 0.5, 1024).unwrap();
        o.note(format!(
            "{name}: T = [{:.6e}, {:.6e}, {:.6e}, {:.6e}], rhs {:.10e}",
            r512.terms[0], r512.terms[1], r512.terms[2], r512.terms[3], r512.rhs
        ));
        o.check(
            r512.rel_residual <= 1e-3,
            format!("{name}: N=512 rel residual {:.3e}", r512.rel_residual),
        );
        let ratio = r512.rel_residual / r1024.rel_residual;
        o.check(
            (3.0..=5.0).contains(&ratio),
            format!(
                "{name}: N=1024 rel residual {:.3e}, improvement {ratio:.3}x",
                r1024.rel_residual
            ),
        );
    }
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let truth = |r: f64| 0.3 * (-r * r).exp();
    let p = a1_radial(truth);
    let spec = ClassSpec::a1(Symmetry::Radial);
    let (t_max, n) = (4.0, 128);
    let sup_err = |prof: &ScalarProfile| {
        prof.samples()
            .map(|(r, b)| (b - truth(r)).abs())
            .fold(0.0, f64::max)
    };

    let same = solve(&p, t_max, n).unwrap().grid_trace();
    let ls = invert_radial_layerstrip(&same, &spec, t_max, n).unwrap();
    let (r0, r1) = ls.profile.domain();
    let e = sup_err(&ls.profile);
    o.check(
        e <= 1e-3 && r0 == 0.0 && (r1 - 2.0).abs() < 1e-12,
        format!("layer strip, same grid N={n}, on [{r0}, {r1}]: sup error {e:.3e}"),
    );

    let fine = solve(&p, t_max, 4 * n).unwrap().grid_trace();
    let ls_fine = invert_radial_layerstrip(&fine, &spec, t_max, n).unwrap();
    let e = sup_err(&ls_fine.profile);
    o.check(
        e <= 1e-2,
        format!("layer strip, data from N={}: sup error {e:.3e}", 4 * n),
    );

    let zero = ScalarProfile::constant(ParameterKind::Radius, 0.0);
    let gn = invert_radial_lsq(
        &same,
        &spec,
        &zero,
        LsqOptions {
            t_max,
            n,
            lambda: 0.0,
            max_iters: 50,
        },
    )
    .unwrap();
    let gap = gn
        .profile
        .values()
        .iter()
        .zip(ls.profile.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    o.check(
        gap <= 1e-3,
        format!(
            "Gauss-Newton from zero ({} iterations, sup error {:.3e}) vs layer strip: {gap:.3e}",
            gn.iterations,
            sup_err(&gn.profile)
        ),
    );
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let spec = ClassSpec::a1(Symmetry::Ellipsoidal);
    let cfg = BornConfig::default();

    // Born step for b ≡ c. The second-order contribution to the recovered
    // value is c²(s² − 1)/4, so the horizon is kept at s ≤ 2.
    let c = 0.05;
    let times: Vec<f64> = (1..=8).map(|k| 1.0 + k as f64 / 8.0).collect();
    let data = picard_trace(&spec.build(c).unwrap(), Receiver::Focus, &times, &cfg).unwrap();
    let born = invert_ellipsoidal(&data, &spec, 2.0, 0, &cfg).unwrap();
    let e = born
        .profile
        .values()
        .iter()
        .map(|b| (b - c).abs())
        .fold(0.0, f64::max);
    o.check(
        e <= 5e-3,
        format!("Born step, b = {c} on (1, 2]: max abs error {e:.3e}"),
    );
    let first = born1_trace(
        &spec.build(c).unwrap(),
        &times,
        &QuadratureRule::new(48, 32).unwrap(),
    )
    .unwrap();
    let e1 = first
        .regular
        .iter()
        .map(|r| (r[0] - c / (4.0 * PI)).abs())
        .fold(0.0, f64::max);
    o.check(
        e1 <= 1e-12,
        format!("single-scattering trace of b = {c} equals c/(4pi): {e1:.2e}"),
    );

    let truth = |s: f64| 0.1 * (-(s - 1.0)).exp();
    let times: Vec<f64> = (1..=16).map(|k| 1.0 + k as f64 / 8.0).collect();
    let p = a1_ellipsoidal(truth);
    let data = picard_trace(&p, Receiver::Focus, &times, &cfg).unwrap();
    let rep = invert_ellipsoidal(&data, &spec, 3.0, 3, &cfg).unwrap();
    let e = rep
        .profile
        .samples()
        .map(|(s, b)| rel(b, truth(s)))
        .fold(0.0, f64::max);
    o.check(
        e <= 0.05,
        format!(
            "Picard-corrected (3 corrections) on (1, 3]: rel Linf {e:.3e}, residuals {:?}",
            rep.residuals
                .iter()
                .map(|r| format!("{r:.2e}"))
                .collect::<Vec<_>>()
        ),
    );
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let rule = QuadratureRule::new(48, 32).unwrap();
    let taus: Vec<f64> = (1..=8).map(|k| 0.25 * k as f64).collect();
    let cases: [(&str, MatrixPotential, fn(f64) -> f64); 2] = [
        ("b = 1", a1_radial(|_| 1.0), |t| 1.0 / t),
        ("b = r", a1_radial(|r| r), |t| 2.0 / t),
    ];
    for (name, p, constant) in cases {
        let audit = gronwall_audit(&p, &taus, &rule).unwrap();
        let worst = audit
            .taus
            .iter()
            .zip(&audit.local_constants)
            .map(|(&t, &k)| rel(k, constant(t)))
            .fold(0.0, f64::max);
        let holds = audit
            .i_samples
            .iter()
            .zip(&audit.integral_samples)
            .zip(&audit.taus)
            .all(|((&i, &int), &t)| i <= constant(t) * int * (1.0 + 1e-6));
        o.check(
            worst <= 1e-6 && holds,
            format!("{name}: I <= C(tau) int I, constants rel error {worst:.2e}"),
        );
    }
    let zero = MatrixPotential::zero(Symmetry::Radial);
    let audit = gronwall_audit(&zero, &taus, &rule).unwrap();
    let implied_zero = audit
        .implied_profile
        .as_ref()
        .is_some_and(|v| v.iter().all(|&b| b == 0.0));
    o.check(
        audit.zero_forced && audit.i_samples.iter().all(|&i| i == 0.0) && implied_zero,
        "zero difference: I == 0 and implied profile == 0".into(),
    );
    let trace = solve(&zero, 2.0, 32).unwrap().grid_trace();
    let rep = invert_radial_layerstrip(&trace, &ClassSpec::a1(Symmetry::Radial), 2.0, 32).unwrap();
    o.check(
        rep.profile.values().iter().all(|&b| b == 0.0),
        "zero trace inverts to the zero profile".into(),
    );
    o
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    let t_max = 2.0;
    let base = |r: f64| 0.3 * (-r * r).exp();
    let p = a1_radial(base);
    let q = a1_radial(move |r| base(r) + 5.0 * bump(r, 0.5 * t_max + 0.05, t_max));
    // grid reaches η = 2T so the bump sits inside the computational domain
    let (fp, fq) = (
        solve(&p, 2.0 * t_max, 256).unwrap(),
        solve(&q, 2.0 * t_max, 256).unwrap(),
    );
    let times: Vec<f64> = (1..=128).map(|k| k as f64 * t_max / 128.0).collect();
    let d = fp
        .trace_coincident(&times)
        .unwrap()
        .sup_distance(&fq.trace_coincident(&times).unwrap());
    let late: Vec<f64> = (129..=256).map(|k| k as f64 * t_max / 128.0).collect();
    let later = fp
        .trace_coincident(&late)
        .unwrap()
        .sup_distance(&fq.trace_coincident(&late).unwrap());
    o.check(
        d <= 1e-12,
        format!("radial bump at |x| > T/2: trace change on (0, T] = {d:.2e}"),
    );
    o.note(format!("same bump, change on (T, 2T] = {later:.2e}"));

    let t_max = 2.0;
    let base = |s: f64| 0.1 * (-(s - 1.0)).exp();
    let p = a1_ellipsoidal(base);
    let q = a1_ellipsoidal(move |s| base(s) + 5.0 * bump(s, t_max + 0.05, t_max + 1.0));
    let times: Vec<f64> = (1..=8).map(|k| 1.0 + k as f64 / 8.0).collect();
    let cfg = BornConfig::default();
    let tp = picard_trace(&p, Receiver::Focus, &times, &cfg).unwrap();
    let tq = picard_trace(&q, Receiver::Focus, &times, &cfg).unwrap();
    let d = tp.sup_distance(&tq);
    o.check(
        d <= 1e-12,
        format!("ellipsoidal bump at |x|+|x-e| > T: trace change on (1, T] = {d:.2e}"),
    );
    let beyond = [2.5, 2.75];
    let lp = picard_trace(&p, Receiver::Focus, &beyond, &cfg).unwrap();
    let lq = picard_trace(&q, Receiver::Focus, &beyond, &cfg).unwrap();
    o.note(format!(
        "same bump, change at t = 2.5, 2.75: {:.2e}",
        lp.sup_distance(&lq)
    ));
    o
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("geometry oracles", criterion_1),
        ("surface identities I = 8 pi b", criterion_2),
        (
            "characteristic solver vs closed form, second order",
            criterion_3,
        ),
        ("structural equivalences", criterion_4),
        ("four-term identity", criterion_5),
        ("coincident radial inversion", criterion_6),
        ("separated ellipsoidal inversion", criterion_7),
        ("comparison audit", criterion_8),
        ("causality and domain of dependence", criterion_9),
    ];
    let mut failed = 0;
    let out = std::io::stdout();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let mut w = out.lock();
        writeln!(
            w,
            "criterion {}: {} - {name} ({:.1}s)",
            k + 1,
            if outcome.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        )
        .unwrap();
        for line in &outcome.lines {
            writeln!(w, "{line}").unwrap();
        }
        failed += usize::from(!outcome.pass);
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
