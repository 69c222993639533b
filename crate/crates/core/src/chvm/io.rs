//! Model file format: JSON with explicit k, m, probability tables (entries
//! as `"num/den"` strings or plain numbers) and integer outcome tables.
//! Validation failures name the offending path.

use serde::Deserialize;
use serde_json::{json, Value};

use crate::ineq::Observable;
use crate::rat::{format_rational, parse_rational, rational_from_f64, Rational};

use super::contextual::{instrument_key, outcome_key};
use super::{ChvmError, ContextualModel, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    k: usize,
    m: usize,
    /// k rows of k entries: p(λ₁, λ₂).
    source: Vec<Vec<Value>>,
    instruments: RawInstruments,
    outcomes: RawOutcomes,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstruments {
    x: Vec<Value>,
    xp: Vec<Value>,
    y: Vec<Value>,
    yp: Vec<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutcomes {
    a_x: Vec<Vec<i64>>,
    a_xp: Vec<Vec<i64>>,
    b_y: Vec<Vec<i64>>,
    b_yp: Vec<Vec<i64>>,
}

fn value_to_rational(path: &str, v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => {
            parse_rational(s).map_err(|e| ChvmError::Format(format!("{path}: {e}")))
        }
        Value::Number(n) => {
            let x = n
                .as_f64()
                .ok_or_else(|| ChvmError::Format(format!("{path}: non-finite number")))?;
            rational_from_f64(x)
                .ok_or_else(|| ChvmError::Format(format!("{path}: non-finite number")))
        }
        other => Err(ChvmError::Format(format!(
            "{path}: expected \"num/den\" string or number, got {other}"
        ))),
    }
}

fn ternary(path: &str, v: i64) -> Result<i8> {
    if (-1..=1).contains(&v) {
        Ok(v as i8)
    } else {
        Err(ChvmError::Format(format!("{path}: value {v} not in {{-1, 0, 1}}")))
    }
}

/// Accepts sums within 1e−12 of 1 (float round-off) and renormalises them
/// exactly; anything farther off is a format error.
fn normalize_within(name: &str, mut weights: Vec<Rational>) -> Result<Vec<Rational>> {
    use num::traits::{One, Signed, Zero};
    let total: Rational = weights.iter().cloned().sum();
    if total.is_one() {
        return Ok(weights);
    }
    let tolerance = Rational::new(1.into(), 1_000_000_000_000i64.into());
    if (total.clone() - Rational::one()).abs() > tolerance {
        return Err(ChvmError::Format(format!(
            "{name}: sums to {}, expected 1 within 1e-12",
            crate::rat::rational_to_f64(&total)
        )));
    }
    if total.is_zero() {
        return Err(ChvmError::Format(format!("{name}: zero total mass")));
    }
    for w in weights.iter_mut() {
        *w /= total.clone();
    }
    Ok(weights)
}

/// Parses and validates a model document.
pub fn model_from_json(text: &str) -> Result<ContextualModel> {
    let raw: RawModel =
        serde_json::from_str(text).map_err(|e| ChvmError::Format(e.to_string()))?;
    let (k, m) = (raw.k, raw.m);

    if raw.source.len() != k {
        return Err(ChvmError::Format(format!(
            "source: expected {k} rows, got {}",
            raw.source.len()
        )));
    }
    let mut source = Vec::with_capacity(k * k);
    for (i, row) in raw.source.iter().enumerate() {
        if row.len() != k {
            return Err(ChvmError::Format(format!(
                "source[{i}]: expected {k} entries, got {}",
                row.len()
            )));
        }
        for (j, v) in row.iter().enumerate() {
            source.push(value_to_rational(&format!("source[{i}][{j}]"), v)?);
        }
    }
    let source = normalize_within("source", source)?;

    let raw_instruments = [
        &raw.instruments.x,
        &raw.instruments.xp,
        &raw.instruments.y,
        &raw.instruments.yp,
    ];
    let mut instruments: [Vec<Rational>; 4] = std::array::from_fn(|_| Vec::new());
    for (c, obs) in Observable::ALL.iter().enumerate() {
        let key = instrument_key(*obs);
        let column = raw_instruments[c];
        if column.len() != m {
            return Err(ChvmError::Format(format!(
                "instruments.{key}: expected {m} entries, got {}",
                column.len()
            )));
        }
        for (i, v) in column.iter().enumerate() {
            instruments[c].push(value_to_rational(&format!("instruments.{key}[{i}]"), v)?);
        }
        instruments[c] = normalize_within(&format!("instruments.{key}"), std::mem::take(&mut instruments[c]))?;
    }

    let raw_outcomes =
        [&raw.outcomes.a_x, &raw.outcomes.a_xp, &raw.outcomes.b_y, &raw.outcomes.b_yp];
    let mut outcomes: [Vec<i8>; 4] = std::array::from_fn(|_| Vec::new());
    for (c, obs) in Observable::ALL.iter().enumerate() {
        let key = outcome_key(*obs);
        let table = raw_outcomes[c];
        if table.len() != k {
            return Err(ChvmError::Format(format!(
                "outcomes.{key}: expected {k} rows, got {}",
                table.len()
            )));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != m {
                return Err(ChvmError::Format(format!(
                    "outcomes.{key}[{i}]: expected {m} entries, got {}",
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                outcomes[c].push(ternary(&format!("outcomes.{key}[{i}][{j}]"), *v)?);
            }
        }
    }

    ContextualModel::new(k, m, source, instruments, outcomes)
}

/// Serialises a model with rationals rendered as `"num/den"` strings.
pub fn model_to_json(model: &ContextualModel) -> Value {
    let (k, m) = (model.k(), model.m());
    let source: Vec<Vec<String>> = (0..k)
        .map(|i| (0..k).map(|j| format_rational(model.source_prob(i, j))).collect())
        .collect();
    let instrument = |obs: Observable| -> Vec<String> {
        model.instrument(obs).iter().map(format_rational).collect()
    };
    let outcome = |obs: Observable| -> Vec<Vec<i64>> {
        (0..k)
            .map(|i| (0..m).map(|j| i64::from(model.outcome(obs, i, j))).collect())
            .collect()
    };
    json!({
        "k": k,
        "m": m,
        "source": source,
        "instruments": {
            "x": instrument(Observable::A),
            "xp": instrument(Observable::Ap),
            "y": instrument(Observable::B),
            "yp": instrument(Observable::Bp),
        },
        "outcomes": {
            "a_x": outcome(Observable::A),
            "a_xp": outcome(Observable::Ap),
            "b_y": outcome(Observable::B),
            "b_yp": outcome(Observable::Bp),
        },
    })
}
