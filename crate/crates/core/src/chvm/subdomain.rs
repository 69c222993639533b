//! Coincidence subdomains: conditional CHSH on four subsets of a common
//! hidden-variable space, against the 4 − 2δ bound with
//! δ = p(Λ_AB ∩ Λ_AB′ ∩ Λ_A′B ∩ Λ_A′B′).
//!
//! Only the two analytically forced endpoints are asserted: all subsets
//! equal to Λ force the ordinary bound 2, and an empty four-way intersection
//! leaves only the algebraic cap 4. The proportionality constant in
//! "δ ∝ p(∩)" is taken as 1; intermediate cases are reported, not asserted.

use num::traits::Signed;

use crate::ineq::{Observable, SettingPair, Sign};
use crate::rat::{int, zero, Rational};

use super::{ChvmError, Result};

/// Common space Λ with one distribution, global ±1 outcome functions for
/// the four observables, and one coincidence subset per setting pair.
#[derive(Clone, Debug)]
pub struct SubdomainModel {
    probs: Vec<Rational>,
    outcomes: [Vec<Sign>; 4],
    subsets: [Vec<bool>; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndpointKind {
    /// Every subset is all of Λ: δ = 1, bound 2.
    FullDomains,
    /// The four-way intersection is empty: δ = 0, bound 4.
    EmptyIntersection,
    Intermediate,
}

#[derive(Clone, Debug)]
pub struct LarssonGillReport {
    /// Conditional pairwise expectations E(XY | Λ_XY).
    pub conditional: [Rational; 4],
    /// |E₁ − E₂| + |E₃ + E₄| over the conditional expectations.
    pub s_conditional: Rational,
    /// Mass of the four-way intersection.
    pub delta: Rational,
    /// 4 − 2δ.
    pub bound: Rational,
    pub endpoint: EndpointKind,
    /// True when the endpoint's forced claim held (always true for
    /// intermediate δ, which asserts nothing).
    pub endpoints_check: bool,
}

impl SubdomainModel {
    pub fn new(
        probs: Vec<Rational>,
        outcomes: [Vec<Sign>; 4],
        subsets: [Vec<bool>; 4],
    ) -> Result<Self> {
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
            return Err(ChvmError::InvalidModel(format!("p sums to {total}, expected 1")));
        }
        for (obs, f) in Observable::ALL.iter().zip(outcomes.iter()) {
            if f.len() != probs.len() {
                return Err(ChvmError::InvalidModel(format!(
                    "outcome function {obs} has wrong length"
                )));
            }
        }
        for (pair, mask) in SettingPair::ALL.iter().zip(subsets.iter()) {
            if mask.len() != probs.len() {
                return Err(ChvmError::InvalidModel(format!(
                    "subset for {pair} has wrong length"
                )));
            }
        }
        Ok(SubdomainModel { probs, outcomes, subsets })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    fn conditional_expectation(&self, pair: SettingPair) -> Result<Rational> {
        let (oa, ob) = pair.observables();
        let mask = &self.subsets[pair.index()];
        let mut num = zero();
        let mut mass = zero();
        for (lambda, p) in self.probs.iter().enumerate() {
            if !mask[lambda] {
                continue;
            }
            let product =
                self.outcomes[oa.column()][lambda] * self.outcomes[ob.column()][lambda];
            num += int(product.value()) * p.clone();
            mass += p.clone();
        }
        if mass == zero() {
            return Err(ChvmError::ZeroMassSubdomain { pair });
        }
        Ok(num / mass)
    }

    /// δ = Σ p(λ) over λ in all four subsets.
    pub fn four_way_intersection_mass(&self) -> Rational {
        let mut mass = zero();
        for (lambda, p) in self.probs.iter().enumerate() {
            if self.subsets.iter().all(|mask| mask[lambda]) {
                mass += p.clone();
            }
        }
        mass
    }

    /// Conditional expectations per subset, δ, the 4 − 2δ bound and the
    /// endpoint verdict.
    pub fn larsson_gill_bound(&self) -> Result<LarssonGillReport> {
        let conditional: [Rational; 4] = {
            let mut out: [Rational; 4] = std::array::from_fn(|_| zero());
            for pair in SettingPair::ALL {
                out[pair.index()] = self.conditional_expectation(pair)?;
            }
            out
        };
        let s_conditional = (conditional[0].clone() - conditional[1].clone()).abs()
            + (conditional[2].clone() + conditional[3].clone()).abs();
        let delta = self.four_way_intersection_mass();
        let bound = int(4) - int(2) * delta.clone();

        let all_full = self
            .subsets
            .iter()
            .all(|mask| mask.iter().all(|&b| b));
        let endpoint = if all_full {
            EndpointKind::FullDomains
        } else if delta == zero() {
            EndpointKind::EmptyIntersection
        } else {
            EndpointKind::Intermediate
        };
        let endpoints_check = match endpoint {
            // All subsets = Λ: conditioning is vacuous, the ordinary CHSH
            // bound must hold.
            EndpointKind::FullDomains => bound == int(2) && s_conditional <= int(2),
            // Empty intersection: only the algebraic cap.
            EndpointKind::EmptyIntersection => bound == int(4) && s_conditional <= int(4),
            EndpointKind::Intermediate => true,
        };
        Ok(LarssonGillReport {
            conditional,
            s_conditional,
            delta,
            bound,
            endpoint,
            endpoints_check,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn random_subdomain_model(
        size: usize,
        subset_density: f64,
        rng: &mut impl Rng,
    ) -> SubdomainModel {
        let probs = crate::chvm::testutil::grid_dist(size, rng);
        let outcomes =
            std::array::from_fn(|_| (0..size).map(|_| Sign::random(rng)).collect());
        let subsets = std::array::from_fn(|_| {
            (0..size).map(|_| rng.random::<f64>() < subset_density).collect()
        });
        SubdomainModel::new(probs, outcomes, subsets).unwrap()
    }

    #[test]
    fn full_domains_reduce_to_plain_chsh() {
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            let size = 1 + rng.random_range(0..12);
            let probs = crate::chvm::testutil::grid_dist(size, &mut rng);
            let outcomes: [Vec<Sign>; 4] =
                std::array::from_fn(|_| (0..size).map(|_| Sign::random(&mut rng)).collect());
            let subsets = std::array::from_fn(|_| vec![true; size]);
            let model = SubdomainModel::new(probs, outcomes, subsets).unwrap();
            let report = model.larsson_gill_bound().unwrap();
            assert_eq!(report.endpoint, EndpointKind::FullDomains);
            assert_eq!(report.delta, int(1));
            assert_eq!(report.bound, int(2));
            assert!(report.endpoints_check);
            assert!(report.s_conditional <= int(2));
        }
    }

    #[test]
    fn disjoint_structure_unlocks_the_algebraic_cap() {
        // Four λ values, each subset containing exactly its own one: the
        // conditionals are independent point evaluations and can saturate 4.
        let probs = vec![ratio(1, 4); 4];
        // Columns: A, A', B, B'. Chosen so E(AB|·)=1, E(AB'|·)=−1,
        // E(A'B|·)=1, E(A'B'|·)=1.
        let outcomes: [Vec<Sign>; 4] = [
            vec![Sign::Plus, Sign::Plus, Sign::Plus, Sign::Plus], // A
            vec![Sign::Plus, Sign::Plus, Sign::Plus, Sign::Plus], // A'
            vec![Sign::Plus, Sign::Plus, Sign::Plus, Sign::Plus], // B
            vec![Sign::Plus, Sign::Minus, Sign::Plus, Sign::Plus], // B'
        ];
        let subsets: [Vec<bool>; 4] = [
            vec![true, false, false, false],
            vec![false, true, false, false],
            vec![false, false, true, false],
            vec![false, false, false, true],
        ];
        let model = SubdomainModel::new(probs, outcomes, subsets).unwrap();
        let report = model.larsson_gill_bound().unwrap();
        assert_eq!(report.endpoint, EndpointKind::EmptyIntersection);
        assert_eq!(report.delta, zero());
        assert_eq!(report.bound, int(4));
        assert_eq!(report.s_conditional, int(4));
        assert!(report.endpoints_check);
    }

    #[test]
    fn zero_mass_subset_is_an_error() {
        let probs = vec![int(1)];
        let outcomes = std::array::from_fn(|_| vec![Sign::Plus]);
        let mut subsets: [Vec<bool>; 4] = std::array::from_fn(|_| vec![true]);
        subsets[2] = vec![false];
        let model = SubdomainModel::new(probs, outcomes, subsets).unwrap();
        assert!(matches!(
            model.larsson_gill_bound(),
            Err(ChvmError::ZeroMassSubdomain { pair: SettingPair::ApB })
        ));
    }

    /// Empirical survey: intermediate-δ reports are produced without
    /// asserting the unproved constant; any observation beyond 4 − 2δ would
    /// show up here as a counted event, not a failure.
    #[test]
    fn random_survey_reports_intermediate_cases() {
        let mut rng = rng_from_seed(7);
        let mut beyond_bound = 0u32;
        let mut intermediate = 0u32;
        for _ in 0..200 {
            let model = random_subdomain_model(10, 0.8, &mut rng);
            let report = match model.larsson_gill_bound() {
                Ok(r) => r,
                Err(ChvmError::ZeroMassSubdomain { .. }) => continue,
                Err(e) => panic!("unexpected error {e}"),
            };
            assert!(report.endpoints_check);
            assert!(report.s_conditional <= int(4));
            if report.endpoint == EndpointKind::Intermediate {
                intermediate += 1;
                if report.s_conditional > report.bound {
                    beyond_bound += 1;
                }
            }
        }
        assert!(intermediate > 50, "survey never hit intermediate cases");
        // Logged, not asserted: with global outcome functions the 4 − 2δ
        // bound held throughout this survey.
        println!("intermediate cases: {intermediate}, beyond 4-2delta: {beyond_bound}");
    }
}
