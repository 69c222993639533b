//! The locally causal contextual model on four disjoint hidden-variable
//! spaces.
//!
//! A source space pair (λ₁, λ₂) with joint distribution p(λ₁,λ₂) feeds four
//! instruments, each with its own space and distribution. Outcome tables map
//! (source value, instrument value) to {−1, 0, +1}; 0 is "no detection".
//! A_x is only ever evaluated against the x instrument's variable — the
//! spaces of x and x′ (and of y and y′) never meet, which is the structural
//! disjointness that blocks any counterfactual four-column table.

use num::bigint::BigUint;
use num::traits::{Signed, Zero};

use crate::ineq::{CorrelationSet, Observable, SettingPair, SignVariant};
use crate::rat::{int, zero, Rational};

use super::{ChvmError, Result};

/// Outcome value in {−1, 0, +1}.
pub(super) fn validate_ternary(v: i8) -> bool {
    (-1..=1).contains(&v)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContextualModel {
    k: usize,
    m: usize,
    /// p(λ₁, λ₂), row-major k×k.
    source: Vec<Rational>,
    /// Instrument distributions p_x, p_x′, p_y, p_y′, each of length m.
    instruments: [Vec<Rational>; 4],
    /// Outcome tables, row-major k×m: A_x(λ₁, λ_x), A_x′(λ₁, λ_x′),
    /// B_y(λ₂, λ_y), B_y′(λ₂, λ_y′).
    outcomes: [Vec<i8>; 4],
}

fn check_distribution(name: &str, p: &[Rational]) -> Result<()> {
    for (i, w) in p.iter().enumerate() {
        if w < &zero() {
            return Err(ChvmError::InvalidModel(format!("{name}[{i}]: negative probability")));
        }
    }
    let total: Rational = p.iter().cloned().sum();
    if total != int(1) {
        return Err(ChvmError::InvalidModel(format!("{name}: sums to {total}, expected 1")));
    }
    Ok(())
}

impl ContextualModel {
    pub fn new(
        k: usize,
        m: usize,
        source: Vec<Rational>,
        instruments: [Vec<Rational>; 4],
        outcomes: [Vec<i8>; 4],
    ) -> Result<Self> {
        if k == 0 || m == 0 {
            return Err(ChvmError::InvalidModel("k and m must be >= 1".into()));
        }
        if source.len() != k * k {
            return Err(ChvmError::InvalidModel(format!(
                "source: expected {} entries, got {}",
                k * k,
                source.len()
            )));
        }
        check_distribution("source", &source)?;
        for (obs, p) in Observable::ALL.iter().zip(instruments.iter()) {
            if p.len() != m {
                return Err(ChvmError::InvalidModel(format!(
                    "instruments.{}: expected {m} entries, got {}",
                    instrument_key(*obs),
                    p.len()
                )));
            }
            check_distribution(&format!("instruments.{}", instrument_key(*obs)), p)?;
        }
        for (obs, table) in Observable::ALL.iter().zip(outcomes.iter()) {
            if table.len() != k * m {
                return Err(ChvmError::InvalidModel(format!(
                    "outcomes.{}: expected {} entries, got {}",
                    outcome_key(*obs),
                    k * m,
                    table.len()
                )));
            }
            for (i, v) in table.iter().enumerate() {
                if !validate_ternary(*v) {
                    return Err(ChvmError::InvalidModel(format!(
                        "outcomes.{}[{}][{}]: value {v} not in {{-1, 0, 1}}",
                        outcome_key(*obs),
                        i / m,
                        i % m
                    )));
                }
            }
        }
        Ok(ContextualModel { k, m, source, instruments, outcomes })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn source(&self) -> &[Rational] {
        &self.source
    }

    pub fn source_prob(&self, l1: usize, l2: usize) -> &Rational {
        &self.source[l1 * self.k + l2]
    }

    pub fn instrument(&self, obs: Observable) -> &[Rational] {
        &self.instruments[obs.column()]
    }

    pub fn outcome_table(&self, obs: Observable) -> &[i8] {
        &self.outcomes[obs.column()]
    }

    /// Outcome of an instrument: `lambda` is λ₁ for the A side, λ₂ for the
    /// B side; `li` indexes that instrument's own space.
    pub fn outcome(&self, obs: Observable, lambda: usize, li: usize) -> i8 {
        self.outcomes[obs.column()][lambda * self.m + li]
    }

    /// Random model with exact rational probabilities on a coarse grid.
    /// With `allow_zero` the outcome tables may contain no-detection zeros.
    pub fn random<R: rand::Rng + ?Sized>(
        k: usize,
        m: usize,
        allow_zero: bool,
        rng: &mut R,
    ) -> ContextualModel {
        let grid = |n: usize, rng: &mut R| -> Vec<Rational> {
            let mut raw: Vec<i64> = (0..n).map(|_| rng.random_range(0..16)).collect();
            if raw.iter().all(|&w| w == 0) {
                raw[0] = 1;
            }
            let total: i64 = raw.iter().sum();
            raw.into_iter().map(|w| crate::rat::ratio(w, total)).collect()
        };
        let source = grid(k * k, rng);
        let instruments = std::array::from_fn(|_| grid(m, rng));
        let outcomes = std::array::from_fn(|_| {
            (0..k * m)
                .map(|_| {
                    if allow_zero {
                        rng.random_range(-1..=1)
                    } else if rng.random::<bool>() {
                        1
                    } else {
                        -1
                    }
                })
                .collect()
        });
        ContextualModel::new(k, m, source, instruments, outcomes).expect("generated model is valid")
    }

    /// Literal quadruple sum of Σ A_x B_y p_x p_y p(λ₁,λ₂) for one pair.
    fn pair_expectation_direct(&self, pair: SettingPair) -> Rational {
        let (oa, ob) = pair.observables();
        let pa = self.instrument(oa);
        let pb = self.instrument(ob);
        let mut e = zero();
        for l1 in 0..self.k {
            for l2 in 0..self.k {
                let ps = self.source_prob(l1, l2);
                if ps.is_zero() {
                    continue;
                }
                for (la, wa) in pa.iter().enumerate() {
                    let a = self.outcome(oa, l1, la);
                    if a == 0 {
                        continue;
                    }
                    for (lb, wb) in pb.iter().enumerate() {
                        let b = self.outcome(ob, l2, lb);
                        if b == 0 {
                            continue;
                        }
                        e += int((a * b) as i64) * wa.clone() * wb.clone() * ps.clone();
                    }
                }
            }
        }
        e
    }

    /// Raw single E(A_x) etc. summed over the full product space of the
    /// context (own observable, distant observable): the distant instrument
    /// distribution enters and sums out.
    fn single_expectation_in_context(&self, own: Observable, distant: Observable) -> Rational {
        let own_is_a = matches!(own, Observable::A | Observable::Ap);
        let p_own = self.instrument(own);
        let p_far = self.instrument(distant);
        let mut e = zero();
        for l1 in 0..self.k {
            for l2 in 0..self.k {
                let ps = self.source_prob(l1, l2);
                let own_lambda = if own_is_a { l1 } else { l2 };
                for (lo, wo) in p_own.iter().enumerate() {
                    let v = self.outcome(own, own_lambda, lo);
                    if v == 0 {
                        continue;
                    }
                    for wf in p_far.iter() {
                        e += int(v as i64) * wo.clone() * wf.clone() * ps.clone();
                    }
                }
            }
        }
        e
    }

    fn distant_partners(own: Observable) -> [Observable; 2] {
        match own {
            Observable::A | Observable::Ap => [Observable::B, Observable::Bp],
            Observable::B | Observable::Bp => [Observable::A, Observable::Ap],
        }
    }

    /// The four pairwise expectations by direct summation over each pair's
    /// own product space, plus the raw singles. Each single is computed
    /// under both distant settings and must agree exactly (it does: the
    /// distant instrument distribution sums to one).
    pub fn expectations(&self) -> ContextualExpectations {
        let pairs: [Rational; 4] =
            std::array::from_fn(|i| self.pair_expectation_direct(SettingPair::ALL[i]));
        let mut singles: [Rational; 4] = std::array::from_fn(|_| zero());
        for obs in Observable::ALL {
            let [d1, d2] = Self::distant_partners(obs);
            let under_first = self.single_expectation_in_context(obs, d1);
            let under_second = self.single_expectation_in_context(obs, d2);
            assert_eq!(
                under_first, under_second,
                "raw single E({obs}) depends on the distant setting"
            );
            singles[obs.column()] = under_first;
        }
        let set = CorrelationSet::new(pairs, singles, [0; 4])
            .expect("model expectations lie in [-1, 1]");
        ContextualExpectations { set }
    }

    /// Instrument averages Ā_x(λ₁) = Σ A_x(λ₁,λ_x) p_x(λ_x) etc.
    pub fn bell71_average(&self) -> AveragedModel {
        let bar = |obs: Observable| -> Vec<Rational> {
            (0..self.k)
                .map(|lambda| {
                    let mut v = zero();
                    for (li, w) in self.instrument(obs).iter().enumerate() {
                        v += int(self.outcome(obs, lambda, li) as i64) * w.clone();
                    }
                    assert!(v.abs() <= int(1), "averaged outcome out of range");
                    v
                })
                .collect()
        };
        AveragedModel {
            k: self.k,
            source: self.source.clone(),
            averaged: std::array::from_fn(|c| bar(Observable::ALL[c])),
        }
    }

    /// Conditional expectations given both outcomes non-zero, normalised by
    /// the retained mass per setting pair, plus each observable's detected
    /// single E(X | X ≠ 0) (distant-setting-free by construction).
    pub fn postselect_expectations(&self) -> Result<PostSelectedExpectations> {
        let mut pairs: [Rational; 4] = std::array::from_fn(|_| zero());
        let mut retained: [Rational; 4] = std::array::from_fn(|_| zero());
        for pair in SettingPair::ALL {
            let (oa, ob) = pair.observables();
            let pa = self.instrument(oa);
            let pb = self.instrument(ob);
            let mut num = zero();
            let mut mass = zero();
            for l1 in 0..self.k {
                for l2 in 0..self.k {
                    let ps = self.source_prob(l1, l2);
                    for (la, wa) in pa.iter().enumerate() {
                        let a = self.outcome(oa, l1, la);
                        if a == 0 {
                            continue;
                        }
                        for (lb, wb) in pb.iter().enumerate() {
                            let b = self.outcome(ob, l2, lb);
                            if b == 0 {
                                continue;
                            }
                            let w = wa.clone() * wb.clone() * ps.clone();
                            num += int((a * b) as i64) * w.clone();
                            mass += w;
                        }
                    }
                }
            }
            if mass == zero() {
                return Err(ChvmError::ZeroRetainedMass { pair });
            }
            pairs[pair.index()] = num / mass.clone();
            retained[pair.index()] = mass;
        }
        let mut singles: [Rational; 4] = std::array::from_fn(|_| zero());
        for obs in Observable::ALL {
            let own_is_a = matches!(obs, Observable::A | Observable::Ap);
            let mut num = zero();
            let mut mass = zero();
            for lambda in 0..self.k {
                // Marginal of the source over the own-side variable.
                let mut ps = zero();
                for other in 0..self.k {
                    ps += if own_is_a {
                        self.source_prob(lambda, other).clone()
                    } else {
                        self.source_prob(other, lambda).clone()
                    };
                }
                for (li, w) in self.instrument(obs).iter().enumerate() {
                    let v = self.outcome(obs, lambda, li);
                    if v == 0 {
                        continue;
                    }
                    let w = w.clone() * ps.clone();
                    num += int(v as i64) * w.clone();
                    mass += w;
                }
            }
            singles[obs.column()] = if mass == zero() { zero() } else { num / mass };
        }
        let set = CorrelationSet::new(pairs, singles, [0; 4])
            .expect("conditional expectations lie in [-1, 1]");
        Ok(PostSelectedExpectations { set, retained })
    }

    /// Conditional expectation of `own` given own ≠ 0 and the distant
    /// observable satisfying `condition`; None if the conditioning event has
    /// zero mass.
    fn conditional_single(
        &self,
        own: Observable,
        distant: Observable,
        condition: SignallingCondition,
    ) -> SignallingCell {
        let own_is_a = matches!(own, Observable::A | Observable::Ap);
        let mut num = zero();
        let mut mass = zero();
        for l1 in 0..self.k {
            for l2 in 0..self.k {
                let ps = self.source_prob(l1, l2);
                let (own_lambda, far_lambda) = if own_is_a { (l1, l2) } else { (l2, l1) };
                for (lo, wo) in self.instrument(own).iter().enumerate() {
                    let v = self.outcome(own, own_lambda, lo);
                    if v == 0 {
                        continue;
                    }
                    for (lf, wf) in self.instrument(distant).iter().enumerate() {
                        let far = self.outcome(distant, far_lambda, lf);
                        let keep = match condition {
                            SignallingCondition::DistantDetected => far != 0,
                            SignallingCondition::DistantUndetected => far == 0,
                        };
                        if !keep {
                            continue;
                        }
                        let w = wo.clone() * wf.clone() * ps.clone();
                        num += int(v as i64) * w.clone();
                        mass += w;
                    }
                }
            }
        }
        let value = if mass == zero() { None } else { Some(num / mass.clone()) };
        SignallingCell { distant, condition, mass, value }
    }

    /// Per-observable comparison of post-selected conditional marginals
    /// across distant settings and outcome conditions, against the raw
    /// (unconditioned) marginal.
    pub fn apparent_signalling(&self) -> SignallingReport {
        let raw = self.expectations();
        let rows: [SignallingRow; 4] = std::array::from_fn(|c| {
            let obs = Observable::ALL[c];
            let [d1, d2] = Self::distant_partners(obs);
            let cells = vec![
                self.conditional_single(obs, d1, SignallingCondition::DistantDetected),
                self.conditional_single(obs, d1, SignallingCondition::DistantUndetected),
                self.conditional_single(obs, d2, SignallingCondition::DistantDetected),
                self.conditional_single(obs, d2, SignallingCondition::DistantUndetected),
            ];
            let defined: Vec<&Rational> =
                cells.iter().filter_map(|cell| cell.value.as_ref()).collect();
            let signalling =
                defined.windows(2).any(|w| w[0] != w[1]);
            SignallingRow {
                observable: obs,
                raw: raw.set.single(obs).clone(),
                cells,
                signalling,
            }
        });
        let any_signalling = rows.iter().any(|r| r.signalling);
        SignallingReport { rows, any_signalling }
    }

    /// Free-parameter counts, reporting both of the source-space formulas
    /// that appear in the literature alongside the count actually used by
    /// this implementation (a general k×k joint).
    pub fn parameter_counts(&self) -> ParameterCounts {
        let (k, m) = (self.k, self.m);
        let functions = BigUint::from(3u8).pow((k * m) as u32);
        ParameterCounts {
            outcome_functions_per_observable: functions,
            instrument_free_parameters: 4 * (m - 1),
            source_free_parameters_symmetric: k * (k + 1) / 2 - 1,
            source_free_parameters_strict: k * (k - 1) / 2,
            source_free_parameters_general: k * k - 1,
        }
    }
}

pub(super) fn instrument_key(obs: Observable) -> &'static str {
    match obs {
        Observable::A => "x",
        Observable::Ap => "xp",
        Observable::B => "y",
        Observable::Bp => "yp",
    }
}

pub(super) fn outcome_key(obs: Observable) -> &'static str {
    match obs {
        Observable::A => "a_x",
        Observable::Ap => "a_xp",
        Observable::B => "b_y",
        Observable::Bp => "b_yp",
    }
}

#[derive(Clone, Debug)]
pub struct ContextualExpectations {
    pub set: CorrelationSet,
}

/// Instrument-averaged model: Ā_x, Ā_x′ over λ₁ and B̄_y, B̄_y′ over λ₂,
/// with the source joint. Every value lies in [−1, 1], so the averaged
/// expectations obey CHSH.
#[derive(Clone, Debug)]
pub struct AveragedModel {
    k: usize,
    source: Vec<Rational>,
    averaged: [Vec<Rational>; 4],
}

impl AveragedModel {
    pub fn averaged(&self, obs: Observable) -> &[Rational] {
        &self.averaged[obs.column()]
    }

    /// Expectations recomputed from the averaged outcome values:
    /// Σ Ā_x(λ₁) B̄_y(λ₂) p(λ₁,λ₂).
    pub fn expectations(&self) -> CorrelationSet {
        let mut pairs: [Rational; 4] = std::array::from_fn(|_| zero());
        for pair in SettingPair::ALL {
            let (oa, ob) = pair.observables();
            let mut e = zero();
            for l1 in 0..self.k {
                for l2 in 0..self.k {
                    e += self.averaged[oa.column()][l1].clone()
                        * self.averaged[ob.column()][l2].clone()
                        * self.source[l1 * self.k + l2].clone();
                }
            }
            pairs[pair.index()] = e;
        }
        let mut singles: [Rational; 4] = std::array::from_fn(|_| zero());
        for obs in Observable::ALL {
            let own_is_a = matches!(obs, Observable::A | Observable::Ap);
            let mut e = zero();
            for l1 in 0..self.k {
                for l2 in 0..self.k {
                    let lambda = if own_is_a { l1 } else { l2 };
                    e += self.averaged[obs.column()][lambda].clone()
                        * self.source[l1 * self.k + l2].clone();
                }
            }
            singles[obs.column()] = e;
        }
        CorrelationSet::new(pairs, singles, [0; 4]).expect("averaged values lie in [-1, 1]")
    }
}

#[derive(Clone, Debug)]
pub struct PostSelectedExpectations {
    /// Conditional pairwise expectations and detected singles E(X | X ≠ 0).
    pub set: CorrelationSet,
    /// Retained probability mass per setting pair.
    pub retained: [Rational; 4],
}

impl PostSelectedExpectations {
    pub fn chsh(&self, variant: SignVariant) -> Rational {
        self.set.chsh(variant)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignallingCondition {
    DistantDetected,
    DistantUndetected,
}

#[derive(Clone, Debug)]
pub struct SignallingCell {
    pub distant: Observable,
    pub condition: SignallingCondition,
    pub mass: Rational,
    /// Conditional expectation; None when the conditioning event has zero
    /// mass (undefined, not an error).
    pub value: Option<Rational>,
}

#[derive(Clone, Debug)]
pub struct SignallingRow {
    pub observable: Observable,
    /// The raw marginal, independent of the distant setting.
    pub raw: Rational,
    pub cells: Vec<SignallingCell>,
    /// True when any two defined conditional values differ: "apparent
    /// signalling (post-selected)".
    pub signalling: bool,
}

#[derive(Clone, Debug)]
pub struct SignallingReport {
    pub rows: [SignallingRow; 4],
    pub any_signalling: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParameterCounts {
    /// 3^(k·m) candidate outcome tables per observable.
    pub outcome_functions_per_observable: BigUint,
    /// 4(m − 1) instrument probabilities.
    pub instrument_free_parameters: usize,
    /// k(k+1)/2 − 1 (symmetric-joint count).
    pub source_free_parameters_symmetric: usize,
    /// k(k−1)/2 (strictly-off-diagonal count).
    pub source_free_parameters_strict: usize,
    /// k² − 1: the count for the general joint this implementation stores.
    pub source_free_parameters_general: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chvm::testutil::random_model;
    use crate::rat::ratio;
    use crate::rng::rng_from_seed;

    #[test]
    fn all_zero_outcomes_give_zero_expectations() {
        let k = 2;
        let m = 2;
        let model = ContextualModel::new(
            k,
            m,
            vec![ratio(1, 4); 4],
            std::array::from_fn(|_| vec![ratio(1, 2); 2]),
            std::array::from_fn(|_| vec![0; 4]),
        )
        .unwrap();
        let e = model.expectations();
        for pair in SettingPair::ALL {
            assert_eq!(e.set.pair(pair), &zero());
        }
        // Post-selection on an all-zero model retains nothing.
        assert!(matches!(
            model.postselect_expectations(),
            Err(ChvmError::ZeroRetainedMass { .. })
        ));
    }

    #[test]
    fn trivial_instruments_reduce_to_direct_two_space_sum() {
        let mut rng = rng_from_seed(3);
        for _ in 0..30 {
            let model = random_model(4, 1, true, &mut rng);
            let e = model.expectations();
            // Independent route for m = 1: Σ A(λ1)B(λ2)p(λ1,λ2).
            for pair in SettingPair::ALL {
                let (oa, ob) = pair.observables();
                let mut expected = zero();
                for l1 in 0..4 {
                    for l2 in 0..4 {
                        expected += int((model.outcome(oa, l1, 0) * model.outcome(ob, l2, 0))
                            as i64)
                            * model.source_prob(l1, l2).clone();
                    }
                }
                assert_eq!(e.set.pair(pair), &expected);
            }
        }
    }

    #[test]
    fn validation_rejects_malformed_models() {
        assert!(ContextualModel::new(
            0,
            1,
            vec![],
            std::array::from_fn(|_| vec![]),
            std::array::from_fn(|_| vec![])
        )
        .is_err());
        // Wrong source length.
        assert!(ContextualModel::new(
            2,
            1,
            vec![int(1)],
            std::array::from_fn(|_| vec![int(1)]),
            std::array::from_fn(|_| vec![0, 0])
        )
        .is_err());
        // Outcome out of range.
        let err = ContextualModel::new(
            1,
            1,
            vec![int(1)],
            std::array::from_fn(|_| vec![int(1)]),
            [vec![2], vec![0], vec![0], vec![0]],
        )
        .unwrap_err();
        assert!(err.to_string().contains("a_x"), "{err}");
    }

    #[test]
    fn deterministic_instruments_average_to_outcome_values() {
        // Point-mass instrument distributions: Ā is just the outcome column.
        let k = 2;
        let m = 2;
        let source = vec![ratio(1, 4); 4];
        let instruments: [Vec<Rational>; 4] =
            std::array::from_fn(|_| vec![int(1), zero()]);
        let outcomes: [Vec<i8>; 4] = std::array::from_fn(|c| {
            (0..k * m)
                .map(|i| if (i / m + c) % 2 == 0 { 1 } else { -1 })
                .collect()
        });
        let model = ContextualModel::new(k, m, source, instruments, outcomes).unwrap();
        let avg = model.bell71_average();
        for obs in Observable::ALL {
            for lambda in 0..k {
                assert_eq!(
                    avg.averaged(obs)[lambda],
                    int(model.outcome(obs, lambda, 0) as i64)
                );
            }
        }
    }

    #[test]
    fn balanced_instrument_mixture_averages_to_zero() {
        let k = 1;
        let m = 2;
        let model = ContextualModel::new(
            k,
            m,
            vec![int(1)],
            std::array::from_fn(|_| vec![ratio(1, 2), ratio(1, 2)]),
            std::array::from_fn(|_| vec![1, -1]),
        )
        .unwrap();
        let avg = model.bell71_average();
        for obs in Observable::ALL {
            assert_eq!(avg.averaged(obs)[0], zero());
        }
        let e = avg.expectations();
        for pair in SettingPair::ALL {
            assert_eq!(e.pair(pair), &zero());
        }
    }

    /// The averaging identity: the (instrument-averaged) route reproduces
    /// the direct quadruple sums exactly, and the full-ensemble CHSH bound
    /// follows.
    #[test]
    fn averaging_identity_holds_exactly() {
        let mut rng = rng_from_seed(7);
        for round in 0..150 {
            let k = 1 + round % 4;
            let m = 1 + (round / 4) % 3;
            let model = random_model(k, m, true, &mut rng);
            let direct = model.expectations();
            let averaged = model.bell71_average().expectations();
            for pair in SettingPair::ALL {
                assert_eq!(direct.set.pair(pair), averaged.pair(pair));
            }
            for obs in Observable::ALL {
                assert_eq!(direct.set.single(obs), averaged.single(obs));
            }
            for variant in SignVariant::all() {
                assert!(direct.set.chsh(variant).abs() <= int(2));
            }
        }
    }

    #[test]
    fn no_zero_outcomes_make_postselection_a_no_op() {
        let mut rng = rng_from_seed(11);
        for _ in 0..40 {
            let model = random_model(3, 2, false, &mut rng);
            let raw = model.expectations();
            let post = model.postselect_expectations().unwrap();
            for pair in SettingPair::ALL {
                assert_eq!(post.set.pair(pair), raw.set.pair(pair));
                assert_eq!(post.retained[pair.index()], int(1));
            }
            for obs in Observable::ALL {
                assert_eq!(post.set.single(obs), raw.set.single(obs));
            }
            let sig = model.apparent_signalling();
            assert!(!sig.any_signalling);
            for row in &sig.rows {
                // Distant-undetected cells are undefined; detected cells
                // equal the raw marginal.
                for cell in &row.cells {
                    match cell.condition {
                        SignallingCondition::DistantDetected => {
                            assert_eq!(cell.value.as_ref().unwrap(), &row.raw);
                        }
                        SignallingCondition::DistantUndetected => {
                            assert!(cell.value.is_none());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn degenerate_single_point_model_has_equal_everything() {
        let model = ContextualModel::new(
            1,
            1,
            vec![int(1)],
            std::array::from_fn(|_| vec![int(1)]),
            std::array::from_fn(|_| vec![1]),
        )
        .unwrap();
        let raw = model.expectations();
        let post = model.postselect_expectations().unwrap();
        let sig = model.apparent_signalling();
        for obs in Observable::ALL {
            assert_eq!(raw.set.single(obs), &int(1));
            assert_eq!(post.set.single(obs), &int(1));
        }
        assert!(!sig.any_signalling);
    }

    #[test]
    fn parameter_counts_follow_the_formulas() {
        let mut rng = rng_from_seed(13);
        let model = random_model(3, 2, true, &mut rng);
        let counts = model.parameter_counts();
        assert_eq!(
            counts.outcome_functions_per_observable,
            BigUint::from(3u8).pow(6)
        );
        assert_eq!(counts.instrument_free_parameters, 4);
        assert_eq!(counts.source_free_parameters_symmetric, 5);
        assert_eq!(counts.source_free_parameters_strict, 3);
        assert_eq!(counts.source_free_parameters_general, 8);
    }
}
