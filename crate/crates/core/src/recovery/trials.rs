//! Seeded Monte Carlo recovery trials on a circle.

use super::bounds::{
    check_deterministic_bound, check_geodesic_bound, check_probabilistic_bound, BoundCheckRecord, Epsilon, Instance,
};
use super::solver::{nearest_point_on_manifold, parameter_distance, recover_signal};
use crate::csvout::{fmt_f64, write_row};
use crate::error::{invalid, Result};
use crate::geometry::{sample_secants_budget, SecantSample, C_ETA};
use crate::linalg::{distance, dot, norm, normalized};
use crate::manifold::{make_circle, sample_manifold, Manifold, ManifoldSample, ModelRef};
use crate::measurement::{embedding_distortion, singular_value_range, MeasurementOperator};
use crate::rng::CounterStream;
use serde::Serialize;
use std::io::Write;
use std::sync::Arc;

const TRIAL_STREAM: u64 = 0x7e1a1;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialSetup {
    pub kappa: f64,
    pub n: usize,
    pub m: usize,
    /// ‖x − x*‖ of the off-manifold signal.
    pub offset: f64,
    /// ‖n‖ of the measurement noise.
    pub noise: f64,
    /// Points in the sample used for secants and graph geodesics.
    pub sample_points: usize,
    pub secant_budget: usize,
    /// ε fixing the short-chord threshold of the secant sample.
    pub secant_epsilon: f64,
    pub grid: usize,
    pub tol: f64,
}

impl TrialSetup {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n < 2 {
            return Err(invalid(format!("need M >= 1 and N >= 2, got M = {}, N = {}", self.m, self.n)));
        }
        if !(self.offset >= 0.0 && self.offset < self.kappa) {
            return Err(invalid(format!("offset must lie in [0, kappa), got {}", self.offset)));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(invalid(format!("noise level must be finite and >= 0, got {}", self.noise)));
        }
        Ok(())
    }
}

/// Shared state for a batch of trials: the model, its sample, and the
/// secants used to measure ε̂.
#[derive(Debug, Clone)]
pub struct TrialBench {
    pub setup: TrialSetup,
    pub model: ModelRef,
    pub sample: ManifoldSample,
    pub secants: SecantSample,
}

impl TrialBench {
    pub fn new(setup: TrialSetup, secant_seed: u64) -> Result<Self> {
        setup.validate()?;
        let model: ModelRef = Arc::new(make_circle(setup.kappa, setup.n)?);
        let count = setup.sample_points;
        // Eight sample spacings keeps the graph connected and geodesics tight.
        let spacing = 2.0 * std::f64::consts::PI * setup.kappa / count as f64;
        let sample = sample_manifold(model.clone(), count, 8.0 * spacing)?;
        let delta = setup.secant_epsilon / 160.0;
        let delta1 = C_ETA * C_ETA * setup.kappa * delta * delta;
        let secants = sample_secants_budget(&sample, delta1, setup.kappa, setup.secant_budget, secant_seed)?;
        Ok(TrialBench {
            setup,
            model,
            sample,
            secants,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    pub optimal_error: f64,
    pub noise_norm: f64,
    pub recovery_error: f64,
    pub geodesic: f64,
    /// d_Θ(θ̂, θ*); the circle chart is isometric up to κ.
    pub parameter_error: f64,
    pub eps_hat: f64,
    pub sigma_max: f64,
    pub deterministic: BoundCheckRecord,
    pub signal_recovery: BoundCheckRecord,
    pub geodesic_bound: BoundCheckRecord,
}

/// Off-manifold signal at distance `offset` from x_θ along a random normal.
fn offset_signal(model: &dyn Manifold, theta: f64, offset: f64, rng: &mut CounterStream) -> Vec<f64> {
    let base = model.chart(&[theta]);
    let tangent = model.tangent(&[theta]).expect("circle has an analytic tangent");
    let t = normalized(&tangent[0]).expect("nonzero tangent");
    loop {
        let mut v = rng.gaussian_vec(base.len());
        let c = dot(&v, &t);
        v.iter_mut().zip(&t).for_each(|(vi, ti)| *vi -= c * ti);
        if let Some(u) = normalized(&v) {
            return base.iter().zip(&u).map(|(b, ui)| b + offset * ui).collect();
        }
    }
}

/// One seeded trial: draw Φ, x and n, solve both programs and check the
/// three bounds with ε replaced by the measured ε̂.
pub fn run_trial(bench: &TrialBench, seed: u64) -> Result<TrialRecord> {
    let s = &bench.setup;
    let model = bench.model.as_ref();
    let op = MeasurementOperator::draw_trial(s.m, s.n, seed, 0)?;
    let eps_hat = embedding_distortion(&op, &bench.sample, &bench.secants)?.epsilon_hat;
    let sigma_max = singular_value_range(&op)?.sigma_max;

    let mut rng = CounterStream::new(seed, TRIAL_STREAM);
    let theta = rng.uniform() * 2.0 * std::f64::consts::PI;
    let x = offset_signal(model, theta, s.offset, &mut rng);
    let noise: Vec<f64> = if s.noise > 0.0 {
        let g = rng.gaussian_vec(s.m);
        let scale = s.noise / norm(&g);
        g.iter().map(|v| v * scale).collect()
    } else {
        vec![0.0; s.m]
    };
    let mut y = op.apply(&x)?;
    y.iter_mut().zip(&noise).for_each(|(a, b)| *a += b);

    let hat = recover_signal(model, &op, &y, s.grid, s.tol)?;
    let star = nearest_point_on_manifold(model, &x, s.grid, s.tol)?;
    let inst = Instance {
        x: &x,
        x_hat: &hat.x_hat,
        x_star: &star.x_star,
        noise: &noise,
    };
    let eps = Epsilon::Empirical(eps_hat);
    let deterministic = check_deterministic_bound(&inst, eps, sigma_max)?;
    let signal_recovery = check_probabilistic_bound(&inst, eps, s.n, s.m, s.kappa)?;
    let geodesic_bound = check_geodesic_bound(&bench.sample, &inst, eps, s.n, s.m, s.kappa)?;
    Ok(TrialRecord {
        seed,
        m: s.m,
        n: s.n,
        optimal_error: star.distance,
        noise_norm: norm(&noise),
        recovery_error: distance(&x, &hat.x_hat),
        geodesic: geodesic_bound.lhs,
        parameter_error: parameter_distance(model, &hat.theta_hat, &star.theta_star),
        eps_hat,
        sigma_max,
        deterministic,
        signal_recovery,
        geodesic_bound,
    })
}

/// Pass rates over a batch; the geodesic rate counts applicable trials only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub deterministic_pass_rate: f64,
    pub signal_recovery_pass_rate: f64,
    pub geodesic_applicable: usize,
    pub geodesic_pass_rate: f64,
    pub median_eps_hat: f64,
}

pub fn summarize_trials(records: &[TrialRecord]) -> TrialSummary {
    let rate = |it: &mut dyn Iterator<Item = &BoundCheckRecord>| {
        let (mut pass, mut total) = (0usize, 0usize);
        for r in it {
            if r.applicable {
                total += 1;
                pass += r.pass as usize;
            }
        }
        (if total == 0 { 1.0 } else { pass as f64 / total as f64 }, total)
    };
    let (det, _) = rate(&mut records.iter().map(|r| &r.deterministic));
    let (sig, _) = rate(&mut records.iter().map(|r| &r.signal_recovery));
    let (geo, applicable) = rate(&mut records.iter().map(|r| &r.geodesic_bound));
    let mut eps: Vec<f64> = records.iter().map(|r| r.eps_hat).collect();
    TrialSummary {
        trials: records.len(),
        deterministic_pass_rate: det,
        signal_recovery_pass_rate: sig,
        geodesic_applicable: applicable,
        geodesic_pass_rate: geo,
        median_eps_hat: median(&mut eps),
    }
}

/// Median of a slice (mean of the middle pair for even lengths); NaN if empty.
pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let k = values.len() / 2;
    if values.len() % 2 == 1 {
        values[k]
    } else {
        0.5 * (values[k - 1] + values[k])
    }
}

pub fn write_trials_csv<W: Write>(records: &[TrialRecord], w: &mut W) -> std::io::Result<()> {
    write_row(
        w,
        &[
            "seed",
            "M",
            "N",
            "optimal_error",
            "noise_norm",
            "recovery_error",
            "d_M",
            "d_theta",
            "eps_hat",
            "sigma_max",
            "deterministic_pass",
            "signal_recovery_pass",
            "geodesic_applicable",
            "geodesic_pass",
        ],
    )?;
    for r in records {
        write_row(
            w,
            &[
                r.seed.to_string(),
                r.m.to_string(),
                r.n.to_string(),
                fmt_f64(r.optimal_error),
                fmt_f64(r.noise_norm),
                fmt_f64(r.recovery_error),
                fmt_f64(r.geodesic),
                fmt_f64(r.parameter_error),
                fmt_f64(r.eps_hat),
                fmt_f64(r.sigma_max),
                r.deterministic.pass.to_string(),
                r.signal_recovery.pass.to_string(),
                r.geodesic_bound.applicable.to_string(),
                r.geodesic_bound.pass.to_string(),
            ],
        )?;
    }
    Ok(())
}
