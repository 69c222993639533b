//! The single-space local realistic model: four ±1 outcome functions of one
//! shared hidden variable.

use num::traits::Signed;
use rand::Rng;

use crate::ineq::{
    CorrelationSet, JointDistribution4, Observable, SettingPair, Sign, SignVariant,
};
use crate::rat::{int, ratio, zero, Rational};

use super::{ChvmError, Result};

/// Finite hidden-variable space Λ, one distribution p(λ), and outcome
/// functions A, A′, B, B′ : Λ → {−1, +1}.
#[derive(Clone, Debug, PartialEq)]
pub struct LrhvmModel {
    probs: Vec<Rational>,
    outcomes: [Vec<Sign>; 4],
}

impl LrhvmModel {
    pub fn new(probs: Vec<Rational>, outcomes: [Vec<Sign>; 4]) -> Result<Self> {
        if probs.is_empty() {
            return Err(ChvmError::InvalidModel("hidden-variable space is empty".into()));
        }
        for (i, p) in probs.iter().enumerate() {
            if p < &zero() {
                return Err(ChvmError::InvalidModel(format!("p[{i}] is negative")));
            }
        }
        let total: Rational = probs.iter().cloned().sum();
        if total != int(1) {
            return Err(ChvmError::InvalidModel(format!(
                "p sums to {total}, expected 1"
            )));
        }
        for (obs, f) in Observable::ALL.iter().zip(outcomes.iter()) {
            if f.len() != probs.len() {
                return Err(ChvmError::InvalidModel(format!(
                    "outcome function {obs} has {} entries for {} hidden values",
                    f.len(),
                    probs.len()
                )));
            }
        }
        Ok(LrhvmModel { probs, outcomes })
    }

    /// Random model: rational weights on a coarse grid, fair ±1 outcomes.
    pub fn random<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Self {
        let size = size.max(1);
        let mut raw: Vec<i64> = (0..size).map(|_| rng.random_range(0..64)).collect();
        if raw.iter().all(|&w| w == 0) {
            raw[0] = 1;
        }
        let total: i64 = raw.iter().sum();
        let probs = raw.into_iter().map(|w| ratio(w, total)).collect();
        let outcomes =
            std::array::from_fn(|_| (0..size).map(|_| Sign::random(rng)).collect());
        LrhvmModel { probs, outcomes }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn outcome(&self, obs: Observable, lambda: usize) -> Sign {
        self.outcomes[obs.column()][lambda]
    }

    /// Pairwise expectations Σ_λ A(λ)B(λ)p(λ) and singles, by direct
    /// summation. The canonical |S| ≤ 2 bound is asserted exactly.
    pub fn expectations(&self) -> (CorrelationSet, Rational) {
        let mut pairs: [Rational; 4] = std::array::from_fn(|_| zero());
        for pair in SettingPair::ALL {
            let (oa, ob) = pair.observables();
            let mut e = zero();
            for (lambda, p) in self.probs.iter().enumerate() {
                let product = self.outcome(oa, lambda) * self.outcome(ob, lambda);
                e += int(product.value()) * p.clone();
            }
            pairs[pair.index()] = e;
        }
        let mut singles: [Rational; 4] = std::array::from_fn(|_| zero());
        for obs in Observable::ALL {
            let mut e = zero();
            for (lambda, p) in self.probs.iter().enumerate() {
                e += int(self.outcome(obs, lambda).value()) * p.clone();
            }
            singles[obs.column()] = e;
        }
        let set = CorrelationSet::new(pairs, singles, [0; 4])
            .expect("model expectations lie in [-1, 1]");
        let s = set.chsh(SignVariant::CANONICAL);
        assert!(s.abs() <= int(2), "LRHVM produced |S| > 2: {s}");
        (set, s)
    }

    /// Pushforward of p(λ) through λ ↦ (A(λ), A′(λ), B(λ), B′(λ)): the
    /// counterfactual joint over the 16 row types, plus the four-column
    /// product expectation E(A A′ B B′).
    pub fn counterfactual_table(&self) -> (JointDistribution4, Rational) {
        let mut weights: [Rational; 16] = std::array::from_fn(|_| zero());
        for (lambda, p) in self.probs.iter().enumerate() {
            let row: [Sign; 4] =
                std::array::from_fn(|c| self.outcome(Observable::ALL[c], lambda));
            let idx = crate::ineq::JointDistribution4::row_types()
                .position(|r| r == row)
                .expect("all 16 row types enumerated");
            weights[idx] += p.clone();
        }
        let joint = JointDistribution4::new(weights).expect("pushforward of a distribution");
        let product = joint.product_expectation();
        (joint, product)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn constant_model(sign: Sign) -> LrhvmModel {
        LrhvmModel::new(vec![int(1)], std::array::from_fn(|_| vec![sign])).unwrap()
    }

    #[test]
    fn single_point_all_plus() {
        let model = constant_model(Sign::Plus);
        let (set, s) = model.expectations();
        for pair in SettingPair::ALL {
            assert_eq!(set.pair(pair), &int(1));
        }
        assert_eq!(s, int(2));
        let (joint, product) = model.counterfactual_table();
        assert_eq!(joint, JointDistribution4::point_mass(&[Sign::Plus; 4]));
        assert_eq!(product, int(1));
    }

    #[test]
    fn sixteen_point_product_measure_is_uniform() {
        // Λ = {±1}⁴ with the product measure and coordinate outcomes.
        let rows: Vec<[Sign; 4]> = JointDistribution4::row_types().collect();
        let probs = vec![ratio(1, 16); 16];
        let outcomes =
            std::array::from_fn(|c| rows.iter().map(|r| r[c]).collect::<Vec<_>>());
        let model = LrhvmModel::new(probs, outcomes).unwrap();
        let (set, s) = model.expectations();
        for pair in SettingPair::ALL {
            assert_eq!(set.pair(pair), &zero());
        }
        assert_eq!(s, zero());
        let (joint, _) = model.counterfactual_table();
        assert_eq!(joint, JointDistribution4::uniform());
    }

    #[test]
    fn validation_rejects_bad_models() {
        assert!(LrhvmModel::new(vec![], std::array::from_fn(|_| vec![])).is_err());
        assert!(LrhvmModel::new(
            vec![ratio(1, 2)],
            std::array::from_fn(|_| vec![Sign::Plus])
        )
        .is_err());
        assert!(LrhvmModel::new(
            vec![ratio(3, 2), ratio(-1, 2)],
            std::array::from_fn(|_| vec![Sign::Plus, Sign::Plus])
        )
        .is_err());
        assert!(LrhvmModel::new(vec![int(1)], std::array::from_fn(|_| vec![])).is_err());
    }

    /// Property: every random model obeys |S| ≤ 2 exactly and its
    /// counterfactual marginals equal the direct expectations.
    #[test]
    fn random_models_obey_chsh_and_pushforward_matches() {
        let mut rng = rng_from_seed(19);
        for round in 0..300 {
            let model = LrhvmModel::random(1 + round % 24, &mut rng);
            let (set, s) = model.expectations();
            assert!(s.abs() <= int(2));
            for variant in SignVariant::all() {
                assert!(set.chsh(variant).abs() <= int(2));
            }
            let (joint, _) = model.counterfactual_table();
            for pair in SettingPair::ALL {
                assert_eq!(joint.pair_expectation(pair), *set.pair(pair));
            }
            for obs in Observable::ALL {
                assert_eq!(joint.single_expectation(obs), *set.single(obs));
            }
        }
    }

    /// Cross-module: marginals of an LRHVM are always Fine-feasible.
    #[test]
    fn lrhvm_marginals_are_fine_feasible() {
        let mut rng = rng_from_seed(43);
        for _ in 0..25 {
            let model = LrhvmModel::random(8, &mut rng);
            let (set, _) = model.expectations();
            let result = crate::ineq::fine_feasibility(&set, &zero()).unwrap();
            assert!(result.feasible);
        }
    }
}
