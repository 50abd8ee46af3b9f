//! Acceptance checks. Prints one PASS/FAIL line per criterion and a tally.
//! With `BW_ACCEPTANCE_STRICT=1` the process exits non-zero if any criterion
//! fails; by default it exits zero so a workspace `cargo test` still runs
//! the remaining suites.
//!
//! Record-dependent parts read an El Centro accelerogram from the path in
//! `BW_ELCENTRO` (units from `BW_ELCENTRO_UNITS`, `g` or `si`, default `g`).
//! Without it those parts are reported as skipped and the synthetic-motion
//! substitutes are used.

use std::time::Instant;

use boucwen::dynamics::{
    cr_spectrum, nrmse_percent, park_ang_index, simulate_chain, simulate_sdof, ChainSystem, CrConfig, DamageConfig,
    Excitation, ResponseHistory, Sinusoid,
};
use boucwen::estimation::{monte_carlo, CampaignConfig};
use boucwen::ground_motion::{
    ensemble_periodogram, evolutionary_psd, load_accelerogram, synthesize, synthesize_ensemble, GroundMotion,
    PeriodogramSettings, SpectrumParams, SynthesisConfig, Units, STANDARD_GRAVITY,
};
use boucwen::insensitivity::{
    alternate_params, check_feasibility, eps_star_1_for_fixed_eps1, epsilon_1, epsilon_2, equivalent_params,
    exact_deviation, fixed_eps1_relation, fixed_eps2_relation, metrics, stationary_point, ParamPerturbation,
};
use boucwen::{BoucWenParams, Branch, OscillatorParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn shape(beta: f64, gamma: f64, n: f64) -> BoucWenParams {
    BoucWenParams::new(beta, gamma, n, 1.0).unwrap()
}

fn reference_oscillator() -> OscillatorParams {
    OscillatorParams::new(1.0, 0.5, 100.0, 0.1, BoucWenParams::new(2.0, 1.0, 2.0, 0.0365).unwrap()).unwrap()
}

fn with_shape(o: &OscillatorParams, beta: f64, gamma: f64, n: f64) -> OscillatorParams {
    o.with_bw(BoucWenParams::new(beta, gamma, n, o.bw().d_y()).unwrap())
}

fn sinusoid() -> Sinusoid {
    Sinusoid {
        amplitude: -2.5,
        omega: std::f64::consts::PI,
        duration: 10.0,
    }
}

fn damage(o: &OscillatorParams, h: &ResponseHistory) -> f64 {
    let cfg = DamageConfig::conventional(o.k(), o.bw().d_y()).unwrap();
    park_ang_index(h, 0, &cfg).unwrap().index
}

fn el_centro() -> Option<GroundMotion> {
    let path = std::env::var_os("BW_ELCENTRO")?;
    let units = match std::env::var("BW_ELCENTRO_UNITS").as_deref() {
        Ok("si") => Units::Si,
        _ => Units::G,
    };
    match load_accelerogram(path.as_ref(), units) {
        Ok(m) => Some(m),
        Err(e) => panic!("BW_ELCENTRO is set but unreadable: {e}"),
    }
}

fn synthetic_motion(seed: u64) -> GroundMotion {
    let cfg = SynthesisConfig {
        seed,
        ..SynthesisConfig::default()
    };
    synthesize(&SpectrumParams::medium_soil(cfg.sample_rate), &cfg)
        .unwrap()
        .motion
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a: f64, x| a.max(x.abs()))
}

fn criterion_1() -> Outcome {
    let base = shape(2.0, 1.0, 2.0);
    let p = ParamPerturbation::new(0.23, 0.42, 0.73);
    let m = metrics(&base, &p).unwrap();
    let alt = alternate_params(&base, &p).unwrap();
    // the published values are rounded to the tolerance itself, so a
    // rounding-level slack is added to the bound
    let tol = 0.005 + 1e-9;
    let got = [
        m.eps_1,
        m.eps_star_1.unwrap_or(f64::NAN),
        m.area_eps_1,
        m.eps_2,
        m.eps_star_2.unwrap_or(f64::NAN),
        m.area_eps_2,
        alt.beta(),
        alt.gamma(),
        alt.n(),
    ];
    let want = [-0.15, 0.084, 0.054, 0.15, -0.012, 0.031, 3.0, 1.27, 2.46];
    let worst = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    outcome(
        worst <= tol,
        format!(
            "metrics {:.4?}, alternate ({:.4}, {:.4}, {:.4}), max deviation {worst:.5}",
            &got[..6],
            alt.beta(),
            alt.gamma(),
            alt.n()
        ),
    )
}

fn criterion_2() -> Outcome {
    let base = shape(2.0, 1.0, 2.0);
    let p = ParamPerturbation::new(0.23, 0.42, 0.73);
    let alt = alternate_params(&base, &p).unwrap();
    let r_max = base.r_max().unwrap();
    let (mut e1, mut e2) = (0.0_f64, 0.0_f64);
    for i in 0..1000 {
        let r = -r_max + 2.0 * r_max * i as f64 / 999.0;
        e1 = e1.max((epsilon_1(&base, &p, r) - exact_deviation(&base, &alt, r, Branch::I)).abs());
        e2 = e2.max((epsilon_2(&base, &p, r) - exact_deviation(&base, &alt, r, Branch::II)).abs());
    }
    outcome(
        e1 <= 0.02 && e2 <= 0.02,
        format!("max |approx - exact|: branch I {e1:.5}, branch II {e2:.5}"),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut pairs, mut worst_curve, mut worst_metric) = (0, 0.0_f64, 0.0_f64);
    while pairs < 500 {
        let beta = rng.random_range(0.1..50.0);
        let gamma = beta * rng.random_range(-0.9..0.9);
        let n = rng.random_range(1.1..5.0);
        let d = rng.random_range(-0.5..1.0);
        let p = ParamPerturbation::new(rng.random_range(-0.5..1.0), d, d);
        let base = shape(beta, gamma, n);
        if check_feasibility(&base, &p).is_err() {
            continue;
        }
        pairs += 1;
        let kappa = base.kappa();
        let r_max = base.r_max().unwrap();
        for k in 1..=100 {
            let r = r_max * k as f64 / 100.0;
            worst_curve = worst_curve.max((epsilon_1(&base, &p, r) + kappa * epsilon_2(&base, &p, r)).abs());
        }
        let m = metrics(&base, &p).unwrap();
        worst_metric = worst_metric
            .max((m.eps_1 + kappa * m.eps_2).abs())
            .max((m.area_eps_1 - kappa.abs() * m.area_eps_2).abs());
    }
    outcome(
        worst_curve <= 1e-10 && worst_metric <= 1e-8,
        format!("500 pairs: curve residual {worst_curve:.2e}, metric residual {worst_metric:.2e}"),
    )
}

fn criterion_4() -> Outcome {
    let (n, dn, e1, e2) = (2.0, 0.2, -0.1, 0.08);
    let closed = eps_star_1_for_fixed_eps1(e1, dn, n);
    let mut stars = Vec::new();
    let mut worst = 0.0_f64;
    for s in [0.03, 3.0, 30.0] {
        let base = shape(2.0 * s / 3.0, s / 3.0, n);
        let d1 = fixed_eps1_relation(&base, e1, dn);
        let (d2, star2) = fixed_eps2_relation(&base, e2, dn);
        let m = metrics(&base, &ParamPerturbation::new(dn, d1, d2)).unwrap();
        let s1 = m.eps_star_1.unwrap();
        stars.push(s1);
        worst = worst
            .max((m.eps_1 - e1).abs())
            .max((m.eps_2 - e2).abs())
            .max((s1 - closed).abs())
            .max((m.eps_star_2.unwrap() - star2).abs());
    }
    let spread =
        stars.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - stars.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    outcome(
        worst <= 1e-10 && spread <= 1e-10,
        format!("eps*_1 = {closed:.6} for sums 0.03/3/30 (spread {spread:.1e}); round-trip residual {worst:.1e}"),
    )
}

fn criterion_5() -> Outcome {
    let sys = ChainSystem::four_story_benchmark();
    let s = sys.stories()[0];
    let src = *s.bw();
    let eq = equivalent_params(1.0, &src).unwrap();
    let a = OscillatorParams::new(s.m(), s.c(), s.k(), sys.alpha(), src).unwrap();
    let b = a.with_bw(eq);
    let motion = synthetic_motion(0).truncated(10.0);
    let ha = simulate_sdof(&a, &motion, 0.001).unwrap();
    let hb = simulate_sdof(&b, &motion, 0.001).unwrap();
    let e = nrmse_percent(&ha.f_r[0], &hb.f_r[0]).unwrap();
    outcome(
        e < 0.01,
        format!("beta scale {:.2}, NRMSE(f_r) {e:.2e} %", eq.beta() / src.beta()),
    )
}

fn similarity(o: &OscillatorParams, alt: &OscillatorParams, motion: &dyn Excitation) -> [f64; 3] {
    let h = simulate_sdof(o, motion, 0.001).unwrap();
    let g = simulate_sdof(alt, motion, 0.001).unwrap();
    [
        nrmse_percent(&h.f_r[0], &g.f_r[0]).unwrap(),
        nrmse_percent(&h.y[0], &g.y[0]).unwrap(),
        nrmse_percent(&h.y_ddot_abs[0], &g.y_ddot_abs[0]).unwrap(),
    ]
}

fn criterion_6() -> Outcome {
    let o = reference_oscillator();
    let alt = with_shape(&o, 3.25, 1.25, 2.5);
    match el_centro() {
        Some(m) => {
            let [f, y, a] = similarity(&o, &alt, &m);
            outcome(
                f <= 1.5 && y <= 1.2 && a <= 1.5,
                format!("El Centro NRMSE f_r {f:.3} %, y {y:.3} %, abs accel {a:.3} %"),
            )
        }
        None => {
            let [f, y, a] = similarity(&o, &alt, &synthetic_motion(0));
            outcome(
                f <= 2.0 && y <= 2.0 && a <= 2.0,
                format!(
                    "El Centro record not supplied (BW_ELCENTRO), substitute synthetic motion: NRMSE f_r {f:.3} %, y {y:.3} %, abs accel {a:.3} %"
                ),
            )
        }
    }
}

fn criterion_7() -> Outcome {
    let o = reference_oscillator();
    let sets = [
        (2.0, 1.0, 2.0, 0.832, 0.01),
        (3.25, 1.25, 2.5, 1.224, 0.02),
        (3.25, 1.25, 2.74, 0.792, 0.01),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (b, g, n, want, tol) in sets {
        let os = with_shape(&o, b, g, n);
        let di = damage(&os, &simulate_sdof(&os, &sinusoid(), 0.001).unwrap());
        pass &= (di - want).abs() <= tol;
        parts.push(format!("{di:.4} (target {want})"));
    }
    let mut detail = format!("sinusoid DI true/set1/set2: {}", parts.join(", "));
    match el_centro() {
        Some(m) => {
            let alt = with_shape(&o, 3.25, 1.25, 2.5);
            let d0 = damage(&o, &simulate_sdof(&o, &m, 0.001).unwrap());
            let d1 = damage(&alt, &simulate_sdof(&alt, &m, 0.001).unwrap());
            pass &= (d0 - 0.299).abs() <= 0.01 && (d1 - 0.298).abs() <= 0.01;
            detail += &format!("; El Centro DI true {d0:.4}, alternate {d1:.4}");
        }
        None => detail += "; El Centro part skipped (BW_ELCENTRO not set)",
    }
    outcome(pass, detail)
}

fn criterion_8() -> Outcome {
    let o = reference_oscillator();
    let h = simulate_sdof(&o, &sinusoid(), 0.001).unwrap();
    let e = |n: f64| {
        let a = with_shape(&o, 3.25, 1.25, n);
        nrmse_percent(&h.f_r[0], &simulate_sdof(&a, &sinusoid(), 0.001).unwrap().f_r[0]).unwrap()
    };
    let (e1, e2) = (e(2.5), e(2.74));
    outcome(
        e1 >= 5.0 * e2 && e2 < 2.0,
        format!(
            "NRMSE(f_r) set 1 {e1:.4} %, set 2 {e2:.4} %, ratio {:.2} (needs >= 5)",
            e1 / e2
        ),
    )
}

fn sample_std(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)).sqrt()
}

fn criterion_9() -> Outcome {
    let cfg = CampaignConfig::default();
    let c = monte_carlo(&cfg).unwrap();
    let ok: Vec<_> = c.runs.iter().filter(|r| !r.diverged).collect();
    let n = cfg.system.n_dof();
    let frac = |f: &dyn Fn(&boucwen::estimation::EstimationRun) -> bool| {
        ok.iter().filter(|r| f(r)).count() as f64 / ok.len().max(1) as f64
    };
    let fa = frac(&|r| r.normalized[..n].iter().all(|v| (v - 1.0).abs() <= 0.03));
    let a = fa >= 0.9;
    let max_nrmse = c.runs.iter().map(|r| r.max_state_nrmse).fold(0.0, f64::max);
    let b = c.runs.iter().all(|r| r.max_state_nrmse < 2.0);
    let ratios: Vec<f64> = (0..n)
        .map(|j| {
            let k: Vec<f64> = ok.iter().map(|r| r.normalized[j]).collect();
            let be: Vec<f64> = ok.iter().map(|r| r.normalized[2 * n + j]).collect();
            sample_std(&be) / sample_std(&k)
        })
        .collect();
    let cc = ratios.iter().all(|&r| r >= 5.0);
    let fd = frac(&|r| {
        r.di_estimate
            .iter()
            .zip(&r.di_truth)
            .all(|(e, t)| (e / t - 1.0).abs() <= 0.05)
    });
    let d = fd >= 0.9;
    let worst_fr = c
        .runs
        .iter()
        .map(|r| r.alternate_fr_nrmse.as_ref().map_or(f64::INFINITY, |v| max_abs(v)))
        .fold(0.0, f64::max);
    let e = worst_fr < 2.0;
    let mark = |p: bool| if p { "ok" } else { "FAIL" };
    outcome(
        a && b && cc && d && e,
        format!(
            "{} runs, {} diverged; (a) K within 3%: {:.0}% of runs [{}]; (b) max state NRMSE {max_nrmse:.3} % [{}]; (c) std ratio beta/K per story {:.1?} [{}]; (d) DI within 5%: {:.0}% of runs [{}]; (e) worst forward NRMSE(f_r) {worst_fr:.3} % [{}]",
            c.runs.len(),
            c.summary.n_diverged,
            100.0 * fa,
            mark(a),
            mark(b),
            ratios,
            mark(cc),
            100.0 * fd,
            mark(d),
            mark(e)
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut records: Vec<(String, GroundMotion)> = Vec::new();
    if let Some(m) = el_centro() {
        records.push(("El Centro".into(), m));
    }
    // stand-ins for the three historical records at their peak accelerations
    for (seed, pga_g) in [(1u64, 0.35), (2, 0.45), (3, 0.6)] {
        let cfg = SynthesisConfig {
            seed,
            pga_cap: None,
            ..SynthesisConfig::default()
        };
        let m = synthesize(&SpectrumParams::medium_soil(cfg.sample_rate), &cfg)
            .unwrap()
            .motion;
        let s = pga_g * STANDARD_GRAVITY / m.pga();
        records.push((format!("synthetic {pga_g} g"), m.scaled(s)));
    }
    let periods: Vec<f64> = (0..50).map(|i| 0.1 + 2.9 * i as f64 / 49.0).collect();
    let base = CrConfig {
        r_factor: 2.0,
        damping_ratio: 0.02,
        alpha: 0.1,
        beta: 2.0,
        gamma: 1.0,
        n: 2.0,
        dt: 0.001,
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, m) in &records {
        let ratios =
            |c: &CrConfig| -> Vec<f64> { cr_spectrum(m, &periods, c).unwrap().iter().map(|p| p.ratio).collect() };
        let lin = ratios(&CrConfig { alpha: 1.0, ..base });
        let lin_err = lin.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
        let t = ratios(&base);
        let s1 = ratios(&CrConfig {
            beta: 3.25,
            gamma: 1.25,
            n: 2.5,
            ..base
        });
        let s2 = ratios(&CrConfig {
            beta: 3.25,
            gamma: 1.25,
            n: 2.74,
            ..base
        });
        let dev2 = periods
            .iter()
            .zip(t.iter().zip(&s2))
            .filter(|(p, _)| **p >= 0.5)
            .map(|(_, (a, b))| (b - a).abs() / a)
            .fold(0.0, f64::max);
        let d1_0 = (s1[0] - t[0]).abs() / t[0];
        let d2_0 = (s2[0] - t[0]).abs() / t[0];
        let ok = lin_err <= 1e-9 && dev2 <= 0.03 && d1_0 > d2_0;
        pass &= ok;
        parts.push(format!(
            "{name}: |C_R-1| at alpha=1 {lin_err:.1e}, set 2 max rel dev (T>=0.5) {:.2} %, at T=0.1 set 1 {:.2} % vs set 2 {:.2} %",
            100.0 * dev2,
            100.0 * d1_0,
            100.0 * d2_0
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_11() -> Outcome {
    let cfg = SynthesisConfig::default();
    let p = SpectrumParams::medium_soil(cfg.sample_rate);
    let omegas: Vec<f64> = (0..=72).map(|i| 2.0 + 0.25 * i as f64).collect();
    let target: Vec<f64> = omegas.iter().map(|&w| evolutionary_psd(&p, w, 5.0)).collect();
    let settings = PeriodogramSettings::default();
    let worst = |c: &SynthesisConfig| -> (f64, f64, Vec<f64>) {
        let ens = synthesize_ensemble(&p, c, 200, 1 << 20).unwrap();
        let motions: Vec<GroundMotion> = ens.iter().map(|m| m.motion.clone()).collect();
        let est = ensemble_periodogram(&motions, &p, &omegas, &settings).unwrap();
        let (mut w, mut at) = (0.0_f64, 0.0);
        for (i, (e, t)) in est.iter().zip(&target).enumerate() {
            let r = e / t - 1.0;
            if r.abs() > w.abs() {
                w = r;
                at = omegas[i];
            }
        }
        (w, at, ens.iter().map(|m| m.metadata.pga).collect())
    };
    let (w, at, pgas) = worst(&cfg);
    let cap = cfg.pga_cap.unwrap();
    let under = pgas.iter().all(|&a| a <= cap);
    let (wu, atu, _) = worst(&SynthesisConfig { pga_cap: None, ..cfg });
    outcome(
        w.abs() <= 0.15 && under,
        format!(
            "capped ensemble: worst rel error {:+.3} at {at} rad/s, all PGA <= 0.4 g: {under}; diagnostic without cap: {:+.3} at {atu} rad/s",
            w, wu
        ),
    )
}

fn criterion_12() -> Outcome {
    // self-convergence on the linear oscillator; steps small enough that
    // omega*dt is in the asymptotic range
    let o = reference_oscillator().with_alpha(1.0).unwrap();
    let s = sinusoid();
    let end = |dt: f64| *simulate_sdof(&o, &s, dt).unwrap().y[0].last().unwrap();
    let (a, b, c) = (end(0.01), end(0.005), end(0.0025));
    let order = ((a - b) / (b - c)).abs().log2();

    // saturation bound on every trajectory produced here
    let motion = synthetic_motion(0);
    let base = reference_oscillator();
    let mut excess = f64::NEG_INFINITY;
    for (bt, g, n) in [(2.0, 1.0, 2.0), (3.25, 1.25, 2.5), (3.25, 1.25, 2.74)] {
        let os = with_shape(&base, bt, g, n);
        let r_max = os.bw().r_max().unwrap();
        for h in [
            simulate_sdof(&os, &s, 0.001).unwrap(),
            simulate_sdof(&os, &motion, 0.001).unwrap(),
        ] {
            excess = excess.max(max_abs(&h.r[0]) - r_max);
        }
    }
    let sys = ChainSystem::four_story_benchmark();
    let hc = simulate_chain(&sys, &motion, 0.001).unwrap();
    for (j, st) in sys.stories().iter().enumerate() {
        excess = excess.max(max_abs(&hc.r[j]) - st.bw().r_max().unwrap());
    }

    // the branch-I deviation is flat at its stationary point
    let bw = shape(2.0, 1.0, 2.0);
    let p = ParamPerturbation::new(0.23, 0.42, 0.73);
    let rs = stationary_point(&bw, &p, Branch::I).unwrap();
    let h = 1e-6;
    let slope = (epsilon_1(&bw, &p, rs + h) - epsilon_1(&bw, &p, rs - h)) / (2.0 * h);

    outcome(
        order >= 3.8 && excess <= 1e-6 && slope.abs() < 1e-6,
        format!("RK4 order {order:.3}; max |r| - r_max {excess:.2e}; d eps_1/dr at r* {slope:.1e}"),
    )
}

fn main() {
    let criteria: [(&str, f64, fn() -> Outcome); 12] = [
        ("metric reproduction", 1.0, criterion_1),
        ("approximation fidelity", 1.0, criterion_2),
        ("kappa scaling law", f64::INFINITY, criterion_3),
        ("magnitude-effect invariance", f64::INFINITY, criterion_4),
        ("equivalent parameterization", 5.0, criterion_5),
        ("response similarity", 10.0, criterion_6),
        ("damage-index reproduction", 10.0, criterion_7),
        ("saturating-excitation narrowing", 10.0, criterion_8),
        ("Monte-Carlo non-uniqueness signature", 1800.0, criterion_9),
        ("C_R spectra similarity", 120.0, criterion_10),
        ("ground-motion spectral match", 120.0, criterion_11),
        ("numerical hygiene", f64::INFINITY, criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        let pass = o.pass && secs < *budget;
        if !pass {
            failed += 1;
        }
        let budget_note = if budget.is_finite() {
            format!(", budget {budget} s")
        } else {
            String::new()
        };
        println!(
            "criterion {:>2} {}: {} | {} | {secs:.2} s{budget_note}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            name,
            o.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 && std::env::var("BW_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
