//! Budgeted search for a contextual model whose post-selected expectations
//! match prescribed targets.
//!
//! The optimizer alternates discrete moves on the outcome tables with
//! simplex-preserving mass transfers on the probability tables, restarting
//! from a rotation of structured and random initial candidates. Candidates
//! are evaluated in f64; the returned model is converted to exact rationals
//! and its residual recomputed through the exact post-selection path.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::ineq::{CorrelationSet, JointDistribution4, Observable, SettingPair};
use crate::rat::{rational_from_f64, rational_to_f64, Rational};
use crate::rng::stream_rng;

use super::{ChvmError, ContextualModel, Result};

#[derive(Clone, Debug)]
pub struct FitResult {
    pub model: ContextualModel,
    /// Exact-path squared residual over the four pairs and four singles.
    pub residual: f64,
    /// Best-so-far residual at each improvement; non-increasing.
    pub trace: Vec<f64>,
    pub evaluations: u64,
}

#[derive(Clone)]
struct Candidate {
    k: usize,
    m: usize,
    source: Vec<f64>,
    instruments: [Vec<f64>; 4],
    outcomes: [Vec<i8>; 4],
}

const MIN_RETAINED: f64 = 1e-12;

impl Candidate {
    /// Post-selected pairwise expectations and detected singles, f64 route.
    /// None when some setting pair retains (almost) no mass.
    fn evaluate(&self) -> Option<[f64; 8]> {
        let (k, m) = (self.k, self.m);
        // Per observable and source value: detected mass and signed mass
        // under the instrument distribution.
        let mut dmass = [[0.0f64; 64]; 4];
        let mut dmean = [[0.0f64; 64]; 4];
        debug_assert!(k <= 64);
        for c in 0..4 {
            for lambda in 0..k {
                let mut mass = 0.0;
                let mut mean = 0.0;
                for li in 0..m {
                    let v = self.outcomes[c][lambda * m + li];
                    if v != 0 {
                        let w = self.instruments[c][li];
                        mass += w;
                        mean += w * f64::from(v);
                    }
                }
                dmass[c][lambda] = mass;
                dmean[c][lambda] = mean;
            }
        }
        let mut out = [0.0f64; 8];
        for pair in SettingPair::ALL {
            let (oa, ob) = pair.observables();
            let (ca, cb) = (oa.column(), ob.column());
            let mut num = 0.0;
            let mut mass = 0.0;
            for l1 in 0..k {
                for l2 in 0..k {
                    let ps = self.source[l1 * k + l2];
                    if ps == 0.0 {
                        continue;
                    }
                    num += ps * dmean[ca][l1] * dmean[cb][l2];
                    mass += ps * dmass[ca][l1] * dmass[cb][l2];
                }
            }
            if mass < MIN_RETAINED {
                return None;
            }
            out[pair.index()] = num / mass;
        }
        for obs in Observable::ALL {
            let c = obs.column();
            let own_is_a = matches!(obs, Observable::A | Observable::Ap);
            let mut num = 0.0;
            let mut mass = 0.0;
            for lambda in 0..k {
                let mut marginal = 0.0;
                for other in 0..k {
                    marginal += if own_is_a {
                        self.source[lambda * k + other]
                    } else {
                        self.source[other * k + lambda]
                    };
                }
                num += marginal * dmean[c][lambda];
                mass += marginal * dmass[c][lambda];
            }
            out[4 + c] = if mass < MIN_RETAINED { 0.0 } else { num / mass };
        }
        Some(out)
    }

    fn residual(&self, targets: &[f64; 8]) -> f64 {
        match self.evaluate() {
            Some(values) => values
                .iter()
                .zip(targets.iter())
                .map(|(v, t)| (v - t) * (v - t))
                .sum(),
            None => f64::INFINITY,
        }
    }

    fn into_exact_model(self) -> Result<ContextualModel> {
        let exact = |weights: &[f64], what: &str| -> Result<Vec<Rational>> {
            let mut rs: Vec<Rational> = Vec::with_capacity(weights.len());
            for w in weights {
                rs.push(rational_from_f64(w.max(0.0)).ok_or_else(|| {
                    ChvmError::InvalidFit(format!("non-finite weight in {what}"))
                })?);
            }
            let total: Rational = rs.iter().cloned().sum();
            if total == crate::rat::zero() {
                return Err(ChvmError::InvalidFit(format!("{what} has zero total mass")));
            }
            Ok(rs.into_iter().map(|r| r / total.clone()).collect())
        };
        let source = exact(&self.source, "source")?;
        let mut instruments: [Vec<Rational>; 4] = std::array::from_fn(|_| Vec::new());
        for (c, column) in self.instruments.iter().enumerate() {
            instruments[c] = exact(column, "instrument")?;
        }
        ContextualModel::new(self.k, self.m, source, instruments, self.outcomes)
    }
}

fn detection_pattern(obs: Observable, context: usize) -> bool {
    match obs {
        Observable::A => context == 0 || context == 1,
        Observable::Ap => context == 2 || context == 3,
        Observable::B => context == 0 || context == 2,
        Observable::Bp => context == 1 || context == 3,
    }
}

fn initial_candidate(
    kind: u64,
    k: usize,
    m: usize,
    targets: &[f64; 8],
    rng: &mut ChaCha8Rng,
) -> Candidate {
    let uniform_instruments: [Vec<f64>; 4] =
        std::array::from_fn(|_| vec![1.0 / m as f64; m]);
    let uniform_source = vec![1.0 / (k * k) as f64; k * k];
    match kind {
        // Balanced ±1 tables: no detection losses, zero expectations.
        0 => Candidate {
            k,
            m,
            source: uniform_source,
            instruments: uniform_instruments,
            outcomes: std::array::from_fn(|_| {
                (0..k * m).map(|i| if (i / m).is_multiple_of(2) { 1 } else { -1 }).collect()
            }),
        },
        // Deterministic-row mixture: the 16 row types on the source
        // diagonal; any jointly realisable target is a weight fit away.
        1 if k >= 16 => {
            let rows: Vec<_> = JointDistribution4::row_types().collect();
            let mut source = vec![0.0; k * k];
            for r in 0..16 {
                source[r * k + r] = 1.0 / 16.0;
            }
            let outcomes = std::array::from_fn(|c| {
                (0..k * m)
                    .map(|i| {
                        let lambda = i / m;
                        if lambda < 16 {
                            rows[lambda][c].value() as i8
                        } else {
                            1
                        }
                    })
                    .collect()
            });
            Candidate { k, m, source, instruments: uniform_instruments, outcomes }
        }
        // Detection skeleton: per setting pair, a tuned and an anti row in
        // both parities, detected only in their own context. Post-selected
        // expectations become independently tunable per pair while detected
        // singles stay balanced.
        2 if k >= 16 => {
            let mut source = vec![0.0; k * k];
            for r in 0..16 {
                source[r * k + r] = 1.0 / 16.0;
            }
            let mut outcomes: [Vec<i8>; 4] = std::array::from_fn(|_| vec![0; k * m]);
            for r in 0..16 {
                let context = r / 4;
                let anti = (r / 2) % 2 == 1;
                let parity: i8 = if r % 2 == 0 { 1 } else { -1 };
                let target_sign: i8 = if targets[context] >= 0.0 { 1 } else { -1 };
                let product: i8 = if anti { -target_sign } else { target_sign };
                for obs in Observable::ALL {
                    if !detection_pattern(obs, context) {
                        continue;
                    }
                    let a_side = matches!(obs, Observable::A | Observable::Ap);
                    let value = if a_side { parity } else { parity * product };
                    for li in 0..m {
                        outcomes[obs.column()][r * m + li] = value;
                    }
                }
            }
            Candidate { k, m, source, instruments: uniform_instruments, outcomes }
        }
        // Fully random.
        _ => Candidate {
            k,
            m,
            source: {
                let mut raw: Vec<f64> = (0..k * k).map(|_| rng.random_range(0.0..1.0)).collect();
                let total: f64 = raw.iter().sum();
                for w in raw.iter_mut() {
                    *w /= total;
                }
                raw
            },
            instruments: std::array::from_fn(|_| {
                let mut raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.01..1.0)).collect();
                let total: f64 = raw.iter().sum();
                for w in raw.iter_mut() {
                    *w /= total;
                }
                raw
            }),
            outcomes: std::array::from_fn(|_| {
                (0..k * m).map(|_| rng.random_range(-1..=1)).collect()
            }),
        },
    }
}

/// One discrete move: flip an outcome cell or re-randomise a column.
fn mutate_outcomes(candidate: &mut Candidate, rng: &mut ChaCha8Rng) {
    let (k, m) = (candidate.k, candidate.m);
    if rng.random::<f64>() < 0.9 {
        let c = rng.random_range(0..4);
        let idx = rng.random_range(0..k * m);
        let old = candidate.outcomes[c][idx];
        let mut new = rng.random_range(-1..=1i8);
        if new == old {
            new = if old == 1 { -1 } else { old + 1 };
        }
        candidate.outcomes[c][idx] = new;
    } else {
        let c = rng.random_range(0..4);
        for v in candidate.outcomes[c].iter_mut() {
            *v = rng.random_range(-1..=1);
        }
    }
}

enum WeightTable {
    Source,
    Instrument(usize),
}

fn apply_transfer(candidate: &Candidate, table: &WeightTable, i: usize, j: usize, delta: f64) -> Candidate {
    let mut out = candidate.clone();
    let t: &mut Vec<f64> = match table {
        WeightTable::Source => &mut out.source,
        WeightTable::Instrument(c) => &mut out.instruments[*c],
    };
    t[i] -= delta;
    t[j] += delta;
    out
}

/// Mass transfer between two weights with a parabolic line search over the
/// transfer amount. For expectations linear in the weights the residual is
/// exactly quadratic along this line, so the vertex jump is a Newton step;
/// for post-selected ratios it is still a strong local model. Returns the
/// best proposal found and the number of evaluations spent.
fn weight_line_search(
    candidate: &Candidate,
    current_res: f64,
    targets: &[f64; 8],
    rng: &mut ChaCha8Rng,
) -> (Option<(Candidate, f64)>, u64) {
    let table = if candidate.m == 1 || rng.random::<f64>() < 0.7 {
        WeightTable::Source
    } else {
        WeightTable::Instrument(rng.random_range(0..4))
    };
    let weights: &Vec<f64> = match &table {
        WeightTable::Source => &candidate.source,
        WeightTable::Instrument(c) => &candidate.instruments[*c],
    };
    let n = weights.len();
    if n < 2 {
        return (None, 0);
    }
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n);
    if i == j {
        j = (j + 1) % n;
    }
    // δ ∈ [−w_j, w_i] keeps both weights non-negative.
    let hi = weights[i];
    let lo = -weights[j];
    if hi - lo < 1e-15 {
        return (None, 0);
    }
    let mut evals = 0u64;
    let probe = |delta: f64| -> (Candidate, f64) {
        let proposal = apply_transfer(candidate, &table, i, j, delta);
        let res = proposal.residual(targets);
        (proposal, res)
    };
    let p = 0.5 * hi;
    let q = 0.5 * lo;
    let (cand_p, res_p) = probe(p);
    let (cand_q, res_q) = probe(q);
    evals += 2;
    let mut best: Option<(Candidate, f64)> = None;
    let consider = |cand: Candidate, res: f64, best: &mut Option<(Candidate, f64)>| {
        if res < current_res && best.as_ref().is_none_or(|(_, b)| res < *b) {
            *best = Some((cand, res));
        }
    };
    consider(cand_p, res_p, &mut best);
    consider(cand_q, res_q, &mut best);
    // Parabola through (0, r0), (p, r_p), (q, r_q); jump to its vertex.
    if res_p.is_finite() && res_q.is_finite() && p.abs() > 1e-300 && q.abs() > 1e-300 {
        let db = res_p - current_res;
        let dc = res_q - current_res;
        let denom = p * q * (p - q);
        let alpha = (db * q - dc * p) / denom;
        if alpha > 1e-300 {
            let beta = (db - alpha * p * p) / p;
            let vertex = (-beta / (2.0 * alpha)).clamp(lo, hi);
            let (cand_v, res_v) = probe(vertex);
            evals += 1;
            consider(cand_v, res_v, &mut best);
        }
    }
    (best, evals)
}

fn target_vector(targets: &CorrelationSet) -> [f64; 8] {
    let mut out = [0.0; 8];
    for pair in SettingPair::ALL {
        out[pair.index()] = rational_to_f64(targets.pair(pair));
    }
    for obs in Observable::ALL {
        out[4 + obs.column()] = rational_to_f64(targets.single(obs));
    }
    out
}

const STEPS_PER_RESTART: u64 = 4000;
const CONVERGED: f64 = 1e-14;

/// Searches for a model of size (k, m) whose post-selected expectations and
/// detected singles match `targets` in squared error. Deterministic for a
/// given seed; an exhausted budget returns the best model found, not an
/// error.
pub fn fit_contextual(
    targets: &CorrelationSet,
    k: usize,
    m: usize,
    seed: u64,
    budget: u64,
) -> Result<FitResult> {
    if k == 0 || m == 0 {
        return Err(ChvmError::InvalidFit("k and m must be >= 1".into()));
    }
    if k > 64 {
        return Err(ChvmError::InvalidFit("k > 64 is not supported".into()));
    }
    if budget == 0 {
        return Err(ChvmError::InvalidFit("budget must be >= 1".into()));
    }
    let target8 = target_vector(targets);

    let mut best: Option<(f64, Candidate)> = None;
    let mut trace: Vec<f64> = Vec::new();
    let mut evaluations = 0u64;
    let mut restart = 0u64;
    while evaluations < budget {
        let mut rng = stream_rng(seed, restart);
        let kind = restart % 4;
        let mut current = initial_candidate(kind, k, m, &target8, &mut rng);
        let mut current_res = current.residual(&target8);
        evaluations += 1;
        let improves = |best: &Option<(f64, Candidate)>, r: f64| match best {
            Some((b, _)) => r < *b,
            None => r.is_finite(),
        };
        if improves(&best, current_res) {
            trace.push(current_res);
            best = Some((current_res, current.clone()));
        }
        let mut steps = 0u64;
        while evaluations < budget && steps < STEPS_PER_RESTART {
            steps += 1;
            // A line-searched weight move costs up to 3 evaluations; stay
            // within budget exactly.
            let weight_move_fits = budget - evaluations >= 3;
            let accepted = if !weight_move_fits || rng.random::<f64>() < 0.45 {
                let mut proposal = current.clone();
                mutate_outcomes(&mut proposal, &mut rng);
                let res = proposal.residual(&target8);
                evaluations += 1;
                (res < current_res).then_some((proposal, res))
            } else {
                let (found, used) =
                    weight_line_search(&current, current_res, &target8, &mut rng);
                evaluations += used;
                found
            };
            if let Some((proposal, res)) = accepted {
                current = proposal;
                current_res = res;
                if improves(&best, current_res) {
                    trace.push(current_res);
                    best = Some((current_res, current.clone()));
                }
            }
        }
        if let Some((b, _)) = &best {
            if *b <= CONVERGED {
                break;
            }
        }
        restart += 1;
    }

    let (_, candidate) = best.ok_or_else(|| {
        ChvmError::InvalidFit(
            "no candidate with positive retained mass found within budget".into(),
        )
    })?;
    let model = candidate.into_exact_model()?;
    // Exact-path residual of the returned model.
    let post = model.postselect_expectations()?;
    let mut residual = 0.0;
    for pair in SettingPair::ALL {
        let d = rational_to_f64(&(post.set.pair(pair).clone() - targets.pair(pair).clone()));
        residual += d * d;
    }
    for obs in Observable::ALL {
        let d = rational_to_f64(&(post.set.single(obs).clone() - targets.single(obs).clone()));
        residual += d * d;
    }
    Ok(FitResult { model, residual, trace, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chvm::LrhvmModel;
    use crate::rat::zero;
    use crate::rng::rng_from_seed;

    fn zero_targets() -> CorrelationSet {
        CorrelationSet::new(
            std::array::from_fn(|_| zero()),
            std::array::from_fn(|_| zero()),
            [0; 4],
        )
        .unwrap()
    }

    #[test]
    fn all_zero_targets_fit_immediately_with_a_balanced_table() {
        let result = fit_contextual(&zero_targets(), 2, 1, 1, 2000).unwrap();
        assert!(result.residual <= 1e-9, "residual {}", result.residual);
        // The fitted model never uses all-zero outcome tables: positive
        // retained mass is a hard constraint of the search.
        let post = result.model.postselect_expectations().unwrap();
        for mass in &post.retained {
            assert!(mass > &zero());
        }
    }

    #[test]
    fn lrhvm_realizable_targets_are_recovered() {
        let mut rng = rng_from_seed(5);
        let oracle = LrhvmModel::random(4, &mut rng);
        let (targets, _) = oracle.expectations();
        let result = fit_contextual(&targets, 16, 1, 7, 100_000).unwrap();
        assert!(
            result.residual <= 1e-6,
            "residual {} after {} evaluations",
            result.residual,
            result.evaluations
        );
    }

    #[test]
    fn singlet_targets_need_post_selection_and_are_reached() {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let targets =
            CorrelationSet::from_f64([c, -c, c, c], [0.0, 0.0, 0.0, 0.0]).unwrap();
        let result = fit_contextual(&targets, 16, 1, 11, 100_000).unwrap();
        assert!(result.residual <= 1e-3, "residual {}", result.residual);
        // The fitted model genuinely post-selects: some retained mass < 1.
        let post = result.model.postselect_expectations().unwrap();
        assert!(post.retained.iter().any(|mass| mass < &crate::rat::one()));
        let s = post.chsh(crate::ineq::SignVariant::CANONICAL);
        assert!(rational_to_f64(&s) > 2.2, "fitted post-selected S = {s}");
    }

    #[test]
    fn fit_is_deterministic_and_trace_non_increasing() {
        let mut rng = rng_from_seed(13);
        let oracle = LrhvmModel::random(3, &mut rng);
        let (targets, _) = oracle.expectations();
        let a = fit_contextual(&targets, 8, 2, 21, 8000).unwrap();
        let b = fit_contextual(&targets, 8, 2, 21, 8000).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.residual, b.residual);
        assert_eq!(a.trace, b.trace);
        assert!(a.trace.windows(2).all(|w| w[1] <= w[0]), "{:?}", a.trace);
        assert!(a.evaluations <= 8000);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let t = zero_targets();
        assert!(fit_contextual(&t, 0, 1, 1, 100).is_err());
        assert!(fit_contextual(&t, 1, 0, 1, 100).is_err());
        assert!(fit_contextual(&t, 1, 1, 1, 0).is_err());
        assert!(fit_contextual(&t, 65, 1, 1, 100).is_err());
    }
}
