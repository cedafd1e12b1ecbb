//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use mcslab::experiments::{distortion_sweep, parse_config, run, ExperimentKind};
use mcslab::geometry::{
    check_property, covering_number_bound, estimate_reach, greedy_net, resolve_reach, side_lobe_peak, PropertyId,
};
use mcslab::linalg::distance;
use mcslab::manifold::{
    make_circle, make_complex_exponential, sample_manifold, Manifold, ManifoldSample, ModelRef,
};
use mcslab::measurement::{
    chain_weight_sum, chaining_failure_bound, draw_gaussian_operator, empirical_tail_check, required_measurements,
    singular_value_range,
};
use mcslab::recovery::{
    construct_adversarial_instance, recover_signal, run_trial, summarize_trials,
    TrialBench, TrialSetup, DEFAULT_GRID, DEFAULT_TOLERANCE,
};
use mcslab::rng::CounterStream;
use mcslab::Error;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

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

type Check = fn() -> Outcome;

fn circle_sample(kappa: f64, n: usize, count: usize) -> ManifoldSample {
    let model: ModelRef = Arc::new(make_circle(kappa, n).unwrap());
    let spacing = 2.0 * PI * kappa / count as f64;
    sample_manifold(model, count, 8.0 * spacing).unwrap()
}

fn bound_calculator() -> Outcome {
    let start = Instant::now();
    let a = required_measurements(1, 1.0, 2.0 * PI, 1.0 / 3.0, 0.01).unwrap().m_min;
    let b = required_measurements(1, 1.0, 2.0 * PI, 1.0 / 3.0, 1e-20).unwrap().m_min;
    let elapsed = start.elapsed();
    // Same bound regrouped: 162 · max(24 + 2 ln 9 + ln 2 + 2 ln 2π, ln 8 − ln ρ).
    let oracle = |rho: f64| {
        let geometry = 24.0 + 4.0 * 3f64.ln() + 2f64.ln() + 2.0 * (2.0 * PI).ln();
        let confidence = 8f64.ln() - rho.ln();
        (162.0 * geometry.max(confidence)).ceil() as u64
    };
    let pass = a == 5308 && b == 7798 && a == oracle(0.01) && b == oracle(1e-20) && elapsed < Duration::from_millis(1);
    outcome(pass, format!("M(0.01) = {a}, M(1e-20) = {b}, {elapsed:?}"))
}

fn circle_reach() -> Outcome {
    let start = Instant::now();
    let s = circle_sample(1.0, 2, 2000);
    let tau = estimate_reach(&s).unwrap().tau;
    let elapsed = start.elapsed();
    let pass = (0.99..=1.01).contains(&tau) && elapsed < Duration::from_secs(10);
    outcome(pass, format!("tau_hat = {tau:.6}, {elapsed:?}"))
}

fn complex_exponential_reach_scaling() -> Outcome {
    let start = Instant::now();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ok = true;
    let mut parts = Vec::new();
    for f_c in [3usize, 7, 15, 31] {
        let model = make_complex_exponential(f_c).unwrap();
        let nc = model.complex_dim() as f64;
        let count = 4000;
        let spacing = model.speed() / count as f64;
        let s = sample_manifold(Arc::new(model), count, 8.0 * spacing).unwrap();
        let tau = estimate_reach(&s).unwrap().tau;
        ok &= tau <= 1.02 * nc.sqrt();
        xs.push(nc.ln());
        ys.push(tau.ln());
        parts.push(format!("{tau:.4}"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let elapsed = start.elapsed();
    let pass = ok && (0.40..=0.60).contains(&slope) && elapsed < Duration::from_secs(120);
    outcome(
        pass,
        format!("tau_hat = [{}], exponent {slope:.4}, {elapsed:?}", parts.join(", ")),
    )
}

fn dirichlet_side_lobe() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [7usize, 31, 127] {
        let peak = side_lobe_peak(n, 1_000_000).unwrap();
        ok &= peak <= 0.24 * n as f64;
        parts.push(format!("N={n}: {:.4}N", peak / n as f64));
    }
    outcome(ok, parts.join(", "))
}

fn gaussian_tails() -> Outcome {
    let a = empirical_tail_check(600, 0.3, 0.5, 100_000, 11).unwrap();
    let b = empirical_tail_check(100, 0.3, 0.5, 100_000, 12).unwrap();
    let two = &a.two_sided;
    let up = &b.upper;
    let pass = two.frequency <= two.bound + 3.0 * two.standard_error && up.frequency <= up.bound + 3.0 * up.standard_error;
    outcome(
        pass,
        format!(
            "M=600 lambda=0.3: {:.2e} <= {:.2e}; M=100 lambda'=0.5: {:.2e} <= {:.2e}",
            two.frequency,
            two.bound + 3.0 * two.standard_error,
            up.frequency,
            up.bound + 3.0 * up.standard_error
        ),
    )
}

fn singular_values() -> Outcome {
    let mut sigma_max = 0.0f64;
    let mut sigma_min_narrow = f64::INFINITY;
    let mut wide_ok = 0;
    let mut wide_min = f64::INFINITY;
    for seed in 0..100u64 {
        let r = singular_value_range(&draw_gaussian_operator(100, 400, seed).unwrap()).unwrap();
        sigma_max = sigma_max.max(r.sigma_max);
        sigma_min_narrow = sigma_min_narrow.min(r.sigma_min);
        let w = singular_value_range(&draw_gaussian_operator(100, 1600, 1000 + seed).unwrap()).unwrap();
        wide_ok += (w.sigma_min >= 2.0) as usize;
        wide_min = wide_min.min(w.sigma_min);
    }
    let pass = sigma_max <= 4.0 && sigma_min_narrow >= 0.0 && wide_ok >= 99;
    outcome(
        pass,
        format!(
            "N=400: max sigma_M {sigma_max:.4}, min sigma_m {sigma_min_narrow:.4}; N=1600: sigma_m >= 2 in {wide_ok}/100 (min {wide_min:.4})"
        ),
    )
}

fn distortion_monotonicity() -> Outcome {
    let cfg = parse_config(
        r#"{"manifold": {"type": "circle", "kappa": 1.0, "n": 256}, "sweep_m": [8, 32, 128], "trials": 20, "secants": 10000, "seed": 7}"#,
        "acceptance",
        ExperimentKind::EmbeddingSweep,
    )
    .unwrap();
    let sweep = distortion_sweep(&cfg).unwrap();
    let medians: Vec<f64> = sweep.levels.iter().map(|l| l.median_eps_hat).collect();
    let pass = sweep.strictly_decreasing && medians[2] <= 1.0 / 3.0 && sweep.secants == 10_000;
    outcome(
        pass,
        format!(
            "median eps_hat M=8/32/128: {:.4} / {:.4} / {:.4} over {} secants",
            medians[0], medians[1], medians[2], sweep.secants
        ),
    )
}

fn solver_oracle_equivalence() -> Outcome {
    let n = 64;
    let circle = make_circle(1.0, n).unwrap();
    let brute_points = 100_000;
    let mut worst_gap = f64::NEG_INFINITY;
    for seed in 0..20u64 {
        let op = draw_gaussian_operator(16, n, seed).unwrap();
        let mut rng = CounterStream::new(seed, 0xacc);
        let x = rng.gaussian_vec(n);
        let noise = rng.gaussian_vec(16);
        let mut y = op.apply(&x).unwrap();
        y.iter_mut().zip(&noise).for_each(|(a, b)| *a += 0.1 * b);
        let r = recover_signal(&circle, &op, &y, DEFAULT_GRID, DEFAULT_TOLERANCE).unwrap();
        let brute = (0..brute_points)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / brute_points as f64;
                let img = op.apply(&circle.chart(&[t])).unwrap();
                distance(&y, &img)
            })
            .fold(f64::INFINITY, f64::min);
        worst_gap = worst_gap.max(r.residual - brute);
    }
    let mut exact = 0;
    let mut worst_err = 0.0f64;
    for seed in 0..50u64 {
        let op = draw_gaussian_operator(16, n, 100 + seed).unwrap();
        let theta = CounterStream::new(seed, 0xe0).uniform() * 2.0 * PI;
        let x = circle.chart(&[theta]);
        let r = recover_signal(&circle, &op, &op.apply(&x).unwrap(), DEFAULT_GRID, DEFAULT_TOLERANCE).unwrap();
        let err = distance(&x, &r.x_hat);
        worst_err = worst_err.max(err);
        exact += (err <= 1e-6) as usize;
    }
    let pass = worst_gap <= 1e-9 && exact == 50;
    outcome(
        pass,
        format!("solver - brute force <= {worst_gap:.3e} on 20 instances; noise-free error <= 1e-6 in {exact}/50 (max {worst_err:.2e})"),
    )
}

fn recovery_pass_rates() -> Outcome {
    let setup = TrialSetup {
        kappa: 1.0,
        n: 256,
        m: 64,
        offset: 0.05,
        noise: 0.01,
        sample_points: 2000,
        secant_budget: 10_000,
        secant_epsilon: 1.0 / 3.0,
        grid: DEFAULT_GRID,
        tol: DEFAULT_TOLERANCE,
    };
    let bench = TrialBench::new(setup, 3).unwrap();
    let records: Vec<_> = (0..100u64).map(|s| run_trial(&bench, 500 + s).unwrap()).collect();
    let sum = summarize_trials(&records);
    let horseshoe = records
        .iter()
        .filter(|r| r.geodesic_bound.applicable)
        .all(|r| r.geodesic <= PI && r.geodesic_bound.rhs.is_finite());
    let pass = sum.signal_recovery_pass_rate >= 0.95 && sum.geodesic_pass_rate >= 0.95 && sum.geodesic_applicable > 0 && horseshoe;
    outcome(
        pass,
        format!(
            "signal-recovery {:.2}, geodesic {:.2} over {} applicable, deterministic {:.2}, median eps_hat {:.3}",
            sum.signal_recovery_pass_rate,
            sum.geodesic_pass_rate,
            sum.geodesic_applicable,
            sum.deterministic_pass_rate,
            sum.median_eps_hat
        ),
    )
}

fn adversarial_construction() -> Outcome {
    let mut applicable = 0;
    let mut held = 0;
    for seed in 0..50u64 {
        let op = draw_gaussian_operator(16, 256, seed).unwrap();
        match construct_adversarial_instance(&op, 1.0 / 3.0) {
            Ok(a) => {
                applicable += 1;
                held += (a.measurement_norm <= 1e-10 && a.u_norm <= 1.0 && a.ratio >= a.ratio_bound) as usize;
            }
            Err(Error::PreconditionViolated(_)) => {}
            Err(e) => return outcome(false, format!("seed {seed}: {e}")),
        }
    }
    outcome(
        applicable > 0 && held == applicable,
        format!("inequalities hold in {held}/{applicable} seeds with sigma_m >= 8/3 (of 50)"),
    )
}

fn covering_certificate() -> Outcome {
    let s = circle_sample(1.0, 2, 4000);
    let net = greedy_net(&s, 0.1).unwrap();
    let bound = covering_number_bound(0.1, 1.0, 2.0 * PI, 1).unwrap();
    let c = net.centers.len();
    let pass = (31..=62).contains(&c) && (c as f64) < bound && (bound - 62.85).abs() < 0.01;
    outcome(pass, format!("{c} centers, bound {bound:.4}"))
}

fn chaining_certificate() -> Outcome {
    let weight = chain_weight_sum(60);
    let m_min = required_measurements(1, 1.0, 100.0, 1.0 / 3.0, 0.1).unwrap().m_min;
    let mut ok = (weight - 1.0).abs() <= 1e-12;
    let mut worst_total = 0.0f64;
    let mut worst_remainder = 0.0f64;
    for m in [m_min, m_min + 1, 2 * m_min, 10 * m_min] {
        let c = chaining_failure_bound(1, 1.0, 100.0, 1.0 / 3.0, m, 60).unwrap();
        ok &= c.total <= 0.1 && c.total <= c.closed_form && c.remainder < 1e-12;
        worst_total = worst_total.max(c.total);
        worst_remainder = worst_remainder.max(c.remainder);
    }
    outcome(
        ok,
        format!(
            "weights - 1 = {:.1e}; M >= {m_min}: total <= {worst_total:.3e}, remainder <= {worst_remainder:.1e}",
            weight - 1.0
        ),
    )
}

fn embed_demo() -> Outcome {
    let cfg = parse_config(
        r#"{"manifold": {"type": "gaussian-pulse", "n": 1024}, "m": 3, "seed": 1}"#,
        "acceptance",
        ExperimentKind::EmbedDemo,
    )
    .unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = run(&cfg, a.path()).unwrap();
    run(&cfg, b.path()).unwrap();
    let ta = std::fs::read(a.path().join("embedding3d.csv")).unwrap();
    let tb = std::fs::read(b.path().join("embedding3d.csv")).unwrap();
    let rows = String::from_utf8_lossy(&ta).lines().count() - 1;
    let pass = rows == 1024 && ta == tb && ra.passed();
    outcome(
        pass,
        format!("{rows} rows, identical rerun: {}, {}", ta == tb, ra.assertions[0].detail),
    )
}

fn toolbox_suite() -> Outcome {
    let props = [
        PropertyId::ChordAngle,
        PropertyId::TangentAngle,
        PropertyId::GeodesicBound,
        PropertyId::ChordPerturbation,
        PropertyId::ProjectorGap,
        PropertyId::ShortChordTangent,
        PropertyId::BallVolume,
    ];
    let circle = circle_sample(1.0, 3, 2000);
    let model = make_complex_exponential(3).unwrap();
    let spacing = model.speed() / 2000.0;
    let cexp = sample_manifold(Arc::new(model), 2000, 8.0 * spacing).unwrap();
    let mut ok = true;
    let mut worst = f64::INFINITY;
    let mut equality = f64::NAN;
    for (name, s) in [("circle", &circle), ("complex-exponential", &cexp)] {
        let tau = resolve_reach(s).unwrap();
        for id in props {
            let r = check_property(s, id, 20_000, tau).unwrap();
            if !r.pass {
                return outcome(false, format!("{name} {id}: worst slack {:e}", r.worst_slack));
            }
            worst = worst.min(r.worst_slack);
            if name == "circle" && id == PropertyId::ChordAngle {
                equality = r.worst_slack;
                ok &= r.worst_slack.abs() <= 1e-9;
            }
        }
    }
    outcome(
        ok && worst >= -1e-9,
        format!("worst slack {worst:.3e} over 7 properties x 2 manifolds; circle chord-angle equality |slack| = {:.1e}", equality.abs()),
    )
}

fn main() {
    let checks: [(&str, Check); 14] = [
        ("bound calculator", bound_calculator),
        ("circle reach", circle_reach),
        ("complex exponential reach scaling", complex_exponential_reach_scaling),
        ("Dirichlet side lobe", dirichlet_side_lobe),
        ("Gaussian tails", gaussian_tails),
        ("singular-value bounds", singular_values),
        ("embedding distortion monotonicity", distortion_monotonicity),
        ("solver/oracle equivalence", solver_oracle_equivalence),
        ("recovery bound pass rates", recovery_pass_rates),
        ("adversarial construction", adversarial_construction),
        ("covering certificate", covering_certificate),
        ("chaining certificate", chaining_certificate),
        ("embedding demo", embed_demo),
        ("toolbox lemma suite", toolbox_suite),
    ];
    let mut failures = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let out = std::panic::catch_unwind(check).unwrap_or_else(|_| outcome(false, "panicked"));
        let status = if out.pass { "PASS" } else { "FAIL" };
        failures += !out.pass as usize;
        println!(
            "[{status}] {:>2}. {name}: {} ({:.2}s)",
            i + 1,
            out.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", checks.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
