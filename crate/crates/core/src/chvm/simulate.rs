//! Event-by-event realisation of a contextual model: per trial, draw
//! (λ₁, λ₂) from the source, the scheduled pair's instrument variables from
//! their own distributions, and look the outcomes up.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;

use crate::ineq::{Observable, SettingPair};
use crate::rat::rational_to_f64;
use crate::rng::stream_rng;

use super::{ContextualModel, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    /// Pairs cycle AB, AB′, A′B, A′B′.
    RoundRobin,
    /// Uniformly random pair per trial.
    UniformRandom,
    Fixed(SettingPair),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialEvent {
    pub trial: u64,
    pub pair: SettingPair,
    pub out_a: i8,
    pub out_b: i8,
}

struct Sampler {
    source_cdf: Vec<f64>,
    instrument_cdf: [Vec<f64>; 4],
}

fn cdf(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect();
    if let Some(last) = out.last_mut() {
        *last = 1.0;
    }
    out
}

fn draw(cdf: &[f64], u: f64) -> usize {
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
}

impl Sampler {
    fn new(model: &ContextualModel) -> Self {
        Sampler {
            source_cdf: cdf(model.source().iter().map(rational_to_f64)),
            instrument_cdf: std::array::from_fn(|c| {
                cdf(model.instrument(Observable::ALL[c]).iter().map(rational_to_f64))
            }),
        }
    }
}

/// Runs `n_trials` independent trials. Each trial derives its own generator
/// from (seed, trial index), so the stream is identical for any thread
/// count; trials are evaluated in parallel.
pub fn simulate_contextual(
    model: &ContextualModel,
    n_trials: u64,
    schedule: Schedule,
    seed: u64,
) -> Vec<TrialEvent> {
    let sampler = Sampler::new(model);
    let k = model.k();
    (0..n_trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, trial);
            let pair = match schedule {
                Schedule::Fixed(pair) => pair,
                Schedule::RoundRobin => SettingPair::ALL[(trial % 4) as usize],
                Schedule::UniformRandom => SettingPair::ALL[rng.random_range(0..4)],
            };
            let source_index = draw(&sampler.source_cdf, rng.random::<f64>());
            let (l1, l2) = (source_index / k, source_index % k);
            let (oa, ob) = pair.observables();
            let la = draw(&sampler.instrument_cdf[oa.column()], rng.random::<f64>());
            let lb = draw(&sampler.instrument_cdf[ob.column()], rng.random::<f64>());
            TrialEvent {
                trial,
                pair,
                out_a: model.outcome(oa, l1, la),
                out_b: model.outcome(ob, l2, lb),
            }
        })
        .collect()
}

#[derive(Clone, Debug, Default)]
pub struct EmpiricalSummary {
    /// Trials per setting pair.
    pub counts: [u64; 4],
    /// Trials per pair with both outcomes non-zero.
    pub retained: [u64; 4],
    /// Mean of out_a·out_b over all trials of the pair.
    pub raw_means: [f64; 4],
    /// Mean over retained trials only; None if none retained.
    pub post_selected_means: [Option<f64>; 4],
}

impl EmpiricalSummary {
    pub fn post_selected_chsh(&self, variant: crate::ineq::SignVariant) -> Option<f64> {
        let mut s = 0.0;
        for pair in SettingPair::ALL {
            s += variant.sign(pair).value() as f64 * self.post_selected_means[pair.index()]?;
        }
        Some(s)
    }
}

pub fn summarize_events(events: &[TrialEvent]) -> EmpiricalSummary {
    let mut counts = [0u64; 4];
    let mut retained = [0u64; 4];
    let mut raw_sums = [0i64; 4];
    let mut post_sums = [0i64; 4];
    for event in events {
        let i = event.pair.index();
        counts[i] += 1;
        let product = i64::from(event.out_a) * i64::from(event.out_b);
        raw_sums[i] += product;
        if event.out_a != 0 && event.out_b != 0 {
            retained[i] += 1;
            post_sums[i] += product;
        }
    }
    let raw_means = std::array::from_fn(|i| {
        if counts[i] == 0 {
            0.0
        } else {
            raw_sums[i] as f64 / counts[i] as f64
        }
    });
    let post_selected_means = std::array::from_fn(|i| {
        if retained[i] == 0 {
            None
        } else {
            Some(post_sums[i] as f64 / retained[i] as f64)
        }
    });
    EmpiricalSummary { counts, retained, raw_means, post_selected_means }
}

/// One pair's empirical-vs-analytic comparison.
#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub pair: SettingPair,
    pub analytic_raw: f64,
    pub empirical_raw: f64,
    pub sigma_raw: f64,
    pub analytic_post: f64,
    pub empirical_post: Option<f64>,
    pub sigma_post: f64,
    pub within_4_sigma: bool,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub all_within_4_sigma: bool,
}

/// Compares simulated means against the model's exact raw and post-selected
/// expectations, with binomial-style standard errors.
pub fn convergence_report(
    model: &ContextualModel,
    events: &[TrialEvent],
) -> Result<ConvergenceReport> {
    let summary = summarize_events(events);
    let analytic_raw = model.expectations();
    let analytic_post = model.postselect_expectations()?;
    let mut rows = Vec::with_capacity(4);
    for pair in SettingPair::ALL {
        let i = pair.index();
        let count = summary.counts[i].max(1) as f64;
        let raw_want = rational_to_f64(analytic_raw.set.pair(pair));
        let sigma_raw = ((1.0 - raw_want * raw_want).max(1e-12) / count).sqrt();
        let post_want = rational_to_f64(analytic_post.set.pair(pair));
        let retained = summary.retained[i].max(1) as f64;
        let sigma_post = ((1.0 - post_want * post_want).max(1e-12) / retained).sqrt();
        let raw_ok = (summary.raw_means[i] - raw_want).abs() <= 4.0 * sigma_raw;
        let post_ok = match summary.post_selected_means[i] {
            Some(got) => (got - post_want).abs() <= 4.0 * sigma_post + 1e-9,
            None => false,
        };
        rows.push(ConvergenceRow {
            pair,
            analytic_raw: raw_want,
            empirical_raw: summary.raw_means[i],
            sigma_raw,
            analytic_post: post_want,
            empirical_post: summary.post_selected_means[i],
            sigma_post,
            within_4_sigma: raw_ok && post_ok,
        });
    }
    let all = rows.iter().all(|r| r.within_4_sigma);
    Ok(ConvergenceReport { rows, all_within_4_sigma: all })
}

/// Event stream CSV: `trial,setting,outA,outB`.
pub fn write_events_csv<W: Write>(events: &[TrialEvent], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["trial", "setting", "outA", "outB"])
        .map_err(crate::ineq::IneqError::from)?;
    for event in events {
        wtr.write_record([
            event.trial.to_string(),
            event.pair.label().to_string(),
            event.out_a.to_string(),
            event.out_b.to_string(),
        ])
        .map_err(crate::ineq::IneqError::from)?;
    }
    wtr.flush().map_err(crate::ineq::IneqError::from)?;
    Ok(())
}
