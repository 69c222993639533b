//! Correlation sets, CHSH sign variants and 16-point joint distributions.

use std::fmt;

use num::traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rat::{int, is_unit_interval, rational_from_f64, rational_to_f64, zero, Rational};

use super::{IneqError, Observable, Result, Row, SettingPair, Sign};

/// The algebraic CHSH bound for variables admitting a joint distribution.
pub const CHSH_BOUND: i64 = 2;

/// A CHSH sign pattern: four ±1 coefficients with product −1, applied to
/// (E(AB), E(AB′), E(A′B), E(A′B′)). There are exactly eight.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SignVariant {
    signs: [Sign; 4],
}

impl SignVariant {
    /// The convention with the minus on E(AB′).
    pub const CANONICAL: SignVariant = SignVariant {
        signs: [Sign::Plus, Sign::Minus, Sign::Plus, Sign::Plus],
    };

    /// The convention with the minus on E(A′B′), used by the finite-sample
    /// labelling experiment.
    pub const GILL: SignVariant = SignVariant {
        signs: [Sign::Plus, Sign::Plus, Sign::Plus, Sign::Minus],
    };

    pub fn new(signs: [i64; 4]) -> Result<Self> {
        let mut out = [Sign::Plus; 4];
        for (slot, &v) in out.iter_mut().zip(signs.iter()) {
            *slot = Sign::from_i64(v)?;
        }
        if out.iter().map(|s| s.value()).product::<i64>() != -1 {
            return Err(IneqError::InvalidVariant(signs));
        }
        Ok(SignVariant { signs: out })
    }

    pub fn signs(&self) -> [Sign; 4] {
        self.signs
    }

    pub fn sign(&self, pair: SettingPair) -> Sign {
        self.signs[pair.index()]
    }

    /// All eight variants, canonical first, in a fixed order.
    pub fn all() -> Vec<SignVariant> {
        let mut out = vec![SignVariant::CANONICAL];
        for bits in 0..16u8 {
            let signs: [Sign; 4] = std::array::from_fn(|i| {
                if bits & (1 << i) == 0 {
                    Sign::Plus
                } else {
                    Sign::Minus
                }
            });
            let v = SignVariant { signs };
            if signs.iter().map(|s| s.value()).product::<i64>() == -1 && v != SignVariant::CANONICAL
            {
                out.push(v);
            }
        }
        debug_assert_eq!(out.len(), 8);
        out
    }

    pub fn name(&self) -> String {
        self.signs
            .iter()
            .map(|s| if *s == Sign::Plus { '+' } else { '-' })
            .collect()
    }
}

impl fmt::Display for SignVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// The four pairwise expectations, four singles and per-pair sample counts
/// of one (real or modelled) experiment.
///
/// Expectations are exact rationals; values that originate as floats convert
/// losslessly (every finite f64 is dyadic). `counts` are the number of
/// samples behind each pairwise estimate; 0 marks an analytic value rather
/// than an empirical one.
#[derive(Clone, PartialEq, Debug)]
pub struct CorrelationSet {
    pairs: [Rational; 4],
    singles: [Rational; 4],
    counts: [u64; 4],
}

impl CorrelationSet {
    pub fn new(pairs: [Rational; 4], singles: [Rational; 4], counts: [u64; 4]) -> Result<Self> {
        for (pair, e) in SettingPair::ALL.iter().zip(pairs.iter()) {
            if !is_unit_interval(e) {
                return Err(IneqError::ExpectationOutOfRange {
                    name: format!("E({pair})"),
                    value: rational_to_f64(e),
                });
            }
        }
        for (obs, e) in Observable::ALL.iter().zip(singles.iter()) {
            if !is_unit_interval(e) {
                return Err(IneqError::ExpectationOutOfRange {
                    name: format!("E({obs})"),
                    value: rational_to_f64(e),
                });
            }
        }
        Ok(CorrelationSet { pairs, singles, counts })
    }

    /// Analytic set (no sample counts) from f64 values, converted exactly.
    pub fn from_f64(pairs: [f64; 4], singles: [f64; 4]) -> Result<Self> {
        let conv = |x: f64, name: &str| {
            rational_from_f64(x).ok_or(IneqError::ExpectationOutOfRange {
                name: name.to_string(),
                value: x,
            })
        };
        let mut p: [Rational; 4] = std::array::from_fn(|_| zero());
        let mut s: [Rational; 4] = std::array::from_fn(|_| zero());
        for i in 0..4 {
            p[i] = conv(pairs[i], SettingPair::ALL[i].label())?;
            s[i] = conv(singles[i], Observable::ALL[i].label())?;
        }
        CorrelationSet::new(p, s, [0; 4])
    }

    pub fn pair(&self, pair: SettingPair) -> &Rational {
        &self.pairs[pair.index()]
    }

    pub fn single(&self, obs: Observable) -> &Rational {
        &self.singles[obs.column()]
    }

    pub fn count(&self, pair: SettingPair) -> u64 {
        self.counts[pair.index()]
    }

    pub fn pairs(&self) -> &[Rational; 4] {
        &self.pairs
    }

    pub fn singles(&self) -> &[Rational; 4] {
        &self.singles
    }

    pub fn counts(&self) -> [u64; 4] {
        self.counts
    }

    /// The CHSH combination under a sign variant, exact.
    pub fn chsh(&self, variant: SignVariant) -> Rational {
        let mut s = zero();
        for pair in SettingPair::ALL {
            s += int(variant.sign(pair).value()) * self.pair(pair).clone();
        }
        s
    }

    pub fn chsh_f64(&self, variant: SignVariant) -> f64 {
        rational_to_f64(&self.chsh(variant))
    }

    /// Largest |S| over all eight sign variants.
    pub fn max_abs_chsh(&self) -> Rational {
        SignVariant::all()
            .into_iter()
            .map(|v| self.chsh(v).abs())
            .max()
            .expect("eight variants")
    }

    pub fn summary(&self, variant: SignVariant) -> CorrelationSummary {
        CorrelationSummary {
            e_ab: rational_to_f64(self.pair(SettingPair::AB)),
            e_abp: rational_to_f64(self.pair(SettingPair::ABp)),
            e_apb: rational_to_f64(self.pair(SettingPair::ApB)),
            e_apbp: rational_to_f64(self.pair(SettingPair::ApBp)),
            e_a: rational_to_f64(self.single(Observable::A)),
            e_ap: rational_to_f64(self.single(Observable::Ap)),
            e_b: rational_to_f64(self.single(Observable::B)),
            e_bp: rational_to_f64(self.single(Observable::Bp)),
            counts: self.counts,
            variant: variant.name(),
            s: self.chsh_f64(variant),
        }
    }
}

/// JSON form of a correlation set: eight expectations, the four counts, the
/// variant name and the resulting S.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CorrelationSummary {
    pub e_ab: f64,
    pub e_abp: f64,
    pub e_apb: f64,
    pub e_apbp: f64,
    pub e_a: f64,
    pub e_ap: f64,
    pub e_b: f64,
    pub e_bp: f64,
    pub counts: [u64; 4],
    pub variant: String,
    pub s: f64,
}

/// A distribution over the 16 deterministic rows (a, a′, b, b′) ∈ {±1}⁴.
#[derive(Clone, PartialEq, Debug)]
pub struct JointDistribution4 {
    weights: [Rational; 16],
}

/// Index of a row type: bit 3 ↔ a, bit 2 ↔ a′, bit 1 ↔ b, bit 0 ↔ b′,
/// with bit = 1 for +1.
pub(super) fn row_index(row: &Row) -> usize {
    row.iter()
        .fold(0usize, |acc, s| (acc << 1) | usize::from(*s == Sign::Plus))
}

pub(super) fn index_row(index: usize) -> Row {
    std::array::from_fn(|i| {
        if index & (1 << (3 - i)) != 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    })
}

impl JointDistribution4 {
    pub fn new(weights: [Rational; 16]) -> Result<Self> {
        for (i, w) in weights.iter().enumerate() {
            if w < &zero() {
                return Err(IneqError::NegativeWeight(i));
            }
        }
        let total: Rational = weights.iter().cloned().sum();
        if total != int(1) {
            return Err(IneqError::UnnormalizedJoint(rational_to_f64(&total)));
        }
        Ok(JointDistribution4 { weights })
    }

    pub fn uniform() -> Self {
        JointDistribution4 {
            weights: std::array::from_fn(|_| Rational::new(1.into(), 16.into())),
        }
    }

    pub fn point_mass(row: &Row) -> Self {
        let mut weights: [Rational; 16] = std::array::from_fn(|_| zero());
        weights[row_index(row)] = int(1);
        JointDistribution4 { weights }
    }

    pub fn weight(&self, row: &Row) -> &Rational {
        &self.weights[row_index(row)]
    }

    pub fn weights(&self) -> &[Rational; 16] {
        &self.weights
    }

    pub fn row_types() -> impl Iterator<Item = Row> {
        (0..16).map(index_row)
    }

    /// E(XY) for the columns of `pair`, exact.
    pub fn pair_expectation(&self, pair: SettingPair) -> Rational {
        let (ci, cj) = pair.columns();
        let mut e = zero();
        for (idx, w) in self.weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let row = index_row(idx);
            e += int((row[ci] * row[cj]).value()) * w.clone();
        }
        e
    }

    pub fn single_expectation(&self, obs: Observable) -> Rational {
        let c = obs.column();
        let mut e = zero();
        for (idx, w) in self.weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            e += int(index_row(idx)[c].value()) * w.clone();
        }
        e
    }

    /// E(A A′ B B′), the four-column product expectation.
    pub fn product_expectation(&self) -> Rational {
        let mut e = zero();
        for (idx, w) in self.weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let row = index_row(idx);
            let prod: i64 = row.iter().map(|s| s.value()).product();
            e += int(prod) * w.clone();
        }
        e
    }

    /// Marginal correlation set (all eight expectations; counts 0).
    pub fn correlation_set(&self) -> CorrelationSet {
        let pairs = std::array::from_fn(|i| self.pair_expectation(SettingPair::ALL[i]));
        let singles = std::array::from_fn(|i| self.single_expectation(Observable::ALL[i]));
        CorrelationSet::new(pairs, singles, [0; 4]).expect("marginals of a distribution are in range")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    #[test]
    fn exactly_eight_variants_product_minus_one() {
        let all = SignVariant::all();
        assert_eq!(all.len(), 8);
        for v in &all {
            let product: i64 = v.signs().iter().map(|s| s.value()).product();
            assert_eq!(product, -1);
        }
        assert_eq!(SignVariant::CANONICAL.name(), "+-++");
        assert_eq!(SignVariant::GILL.name(), "+++-");
        assert!(SignVariant::new([1, 1, 1, 1]).is_err());
        assert_eq!(SignVariant::new([1, -1, 1, 1]).unwrap(), SignVariant::CANONICAL);
    }

    #[test]
    fn correlation_set_rejects_out_of_range() {
        let ok: [Rational; 4] = std::array::from_fn(|_| zero());
        let mut bad = ok.clone();
        bad[2] = ratio(3, 2);
        assert!(CorrelationSet::new(bad, ok.clone(), [0; 4]).is_err());
        assert!(CorrelationSet::new(ok.clone(), ok, [0; 4]).is_ok());
    }

    #[test]
    fn row_index_round_trip() {
        for i in 0..16 {
            assert_eq!(row_index(&index_row(i)), i);
        }
        let all_plus = [Sign::Plus; 4];
        assert_eq!(row_index(&all_plus), 15);
    }

    #[test]
    fn uniform_joint_has_zero_marginals() {
        let joint = JointDistribution4::uniform();
        for pair in SettingPair::ALL {
            assert!(joint.pair_expectation(pair).is_zero());
        }
        for obs in Observable::ALL {
            assert!(joint.single_expectation(obs).is_zero());
        }
        assert!(joint.product_expectation().is_zero());
    }

    #[test]
    fn point_mass_marginals() {
        let row = [Sign::Plus, Sign::Minus, Sign::Plus, Sign::Plus];
        let joint = JointDistribution4::point_mass(&row);
        assert_eq!(joint.pair_expectation(SettingPair::AB), int(1));
        assert_eq!(joint.pair_expectation(SettingPair::ApB), int(-1));
        assert_eq!(joint.single_expectation(Observable::Ap), int(-1));
        assert_eq!(joint.product_expectation(), int(-1));
    }

    #[test]
    fn joint_validation() {
        let mut w: [Rational; 16] = std::array::from_fn(|_| zero());
        w[0] = ratio(1, 2);
        assert!(matches!(
            JointDistribution4::new(w.clone()),
            Err(IneqError::UnnormalizedJoint(_))
        ));
        w[1] = ratio(3, 2);
        w[0] = -ratio(1, 2);
        assert!(matches!(JointDistribution4::new(w), Err(IneqError::NegativeWeight(0))));
    }
}
