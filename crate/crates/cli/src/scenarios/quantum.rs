//! Quantum scenario: singlet correlations under the configured settings,
//! operator-level Tsirelson and Landau checks, the separable bound, and the
//! smeared-correlation series.

use std::path::Path;

use bellsim_core::ineq::SignVariant;
use bellsim_core::quantum::{
    chsh_operator, correlation_set_quantum, maximal_violation_settings, separable_chsh,
    smeared_correlation, smeared_correlation_closed_form, spin_operator,
    tsirelson_inequality_check, QuantumState, SeparableMixture, SphericalCap, UnitVector3,
};
use bellsim_core::rat::rational_to_f64;
use bellsim_core::rng::stream_rng;

use crate::config::{parse_axis, QuantumParams};
use crate::report::{write_series_csv, CheckLine, RunReport};
use crate::Result;

const SQRT8: f64 = 2.0 * std::f64::consts::SQRT_2;

pub fn run(params: &QuantumParams, seed: u64, out: Option<&Path>) -> Result<RunReport> {
    let mut report = RunReport::new("quantum", seed);

    let defaults = maximal_violation_settings();
    let custom = params.a.is_some() || params.ap.is_some() || params.b.is_some() || params.bp.is_some();
    let axis = |name: &str, text: &Option<String>, default: UnitVector3| -> Result<UnitVector3> {
        match text {
            Some(t) => parse_axis(name, t),
            None => Ok(default),
        }
    };
    let a = axis("quantum.a", &params.a, defaults.0)?;
    let ap = axis("quantum.ap", &params.ap, defaults.1)?;
    let b = axis("quantum.b", &params.b, defaults.2)?;
    let bp = axis("quantum.bp", &params.bp, defaults.3)?;

    let singlet = QuantumState::singlet();
    let qc = correlation_set_quantum(&singlet, &a, &ap, &b, &bp)?;
    let s = qc.set.chsh_f64(SignVariant::CANONICAL);
    if custom {
        report.push(CheckLine::new(
            "singlet |S| under configured settings",
            s,
            "<= 2*sqrt(2) + 1e-9",
            s.abs() <= SQRT8 + 1e-9,
        ));
    } else {
        report.push(CheckLine::new(
            "singlet S under maximal settings",
            s,
            "2*sqrt(2) within 1e-10",
            (s - SQRT8).abs() <= 1e-10,
        ));
    }
    let tables_ok = qc.tables.iter().all(|t| {
        t.min_entry() > -1e-12
            && (t.total() - 1.0).abs() < 1e-12
            && (t.expectation() - rational_to_f64(qc.set.pair(t.pair))).abs() < 1e-12
    });
    report.push(CheckLine::new(
        "eigenbasis probability tables",
        tables_ok,
        "valid distributions reproducing the expectations (1e-12)",
        tables_ok,
    ));

    let ops = (spin_operator(&a), spin_operator(&ap), spin_operator(&b), spin_operator(&bp));
    let s_op = chsh_operator(&ops.0, &ops.1, &ops.2, &ops.3)?;
    let norm = s_op.operator_norm();
    report.push(CheckLine::new(
        "CHSH operator norm",
        norm,
        "<= 2*sqrt(2) + 1e-9 (saturated by the maximal settings)",
        norm <= SQRT8 + 1e-9,
    ));
    let check = tsirelson_inequality_check(&ops.0, &ops.1, &ops.2, &ops.3)?;
    report.push(CheckLine::new(
        "operator inequality gap (min eigenvalue of rhs - S^2)",
        check.psd_gap,
        ">= -1e-9",
        check.psd_gap >= -1e-9,
    ));
    let landau = check.landau_residual.unwrap_or(f64::INFINITY);
    report.push(CheckLine::new(
        "Landau equality residual",
        landau,
        "<= 1e-10 for +/-1-valued observables",
        landau <= 1e-10,
    ));

    let mut max_separable: f64 = 0.0;
    let mut rng = stream_rng(seed, 1);
    for i in 0..params.mixtures {
        let n_components = 1 + (i % 4) as usize;
        let mixture = SeparableMixture::random(&mut rng, n_components);
        let axes: [UnitVector3; 4] = std::array::from_fn(|_| UnitVector3::random(&mut rng));
        let s = separable_chsh(&mixture, &axes[0], &axes[1], &axes[2], &axes[3])?;
        max_separable = max_separable.max(s.abs());
    }
    report.push(CheckLine::new(
        format!("max |S| over {} separable mixtures", params.mixtures),
        max_separable,
        "<= 2 + 1e-9",
        max_separable <= 2.0 + 1e-9,
    ));

    let mut series: Vec<Vec<String>> = Vec::new();
    let mut worst_deviation: f64 = 0.0;
    for &eps in &params.epsilons {
        let cap_a = SphericalCap::new(a, eps)?;
        let cap_b = SphericalCap::new(b, eps)?;
        let quad = smeared_correlation(&cap_a, &cap_b);
        let oracle = smeared_correlation_closed_form(&cap_a, &cap_b);
        worst_deviation = worst_deviation.max((quad - oracle).abs());
        series.push(vec![eps.to_string(), quad.to_string(), oracle.to_string()]);
    }
    report.push(CheckLine::new(
        "smeared correlation: quadrature vs closed form",
        worst_deviation,
        "<= 1e-6 at each configured cap width",
        worst_deviation <= 1e-6,
    ));

    if let Some(dir) = out {
        let file = write_series_csv(
            dir,
            "smeared_vs_epsilon.csv",
            &["epsilon", "quadrature", "closed_form"],
            &series,
        )?;
        report.outputs.push(file);
        std::fs::write(
            dir.join("correlations.json"),
            serde_json::to_string_pretty(&qc.set.summary(SignVariant::CANONICAL))? + "\n",
        )?;
        report.outputs.push("correlations.json".into());
    }
    Ok(report)
}
