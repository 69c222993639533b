//! Row-level and spreadsheet-level inequality checks, all in exact
//! integer/rational arithmetic.

use num::traits::Signed;
use serde::{Deserialize, Serialize};

use crate::rat::{int, ratio, Rational};

use super::correlation::{row_index, CorrelationSet, JointDistribution4, SignVariant, CHSH_BOUND};
use super::spreadsheet::{Cell, SettingPair, Spreadsheet, TripleSheet};
use super::{IneqError, Result};

/// s = ab − ab′ + a′b + a′b′ for one complete row; always ±2.
///
/// A hole makes the row counterfactually incomplete and is an error.
pub fn check_row(cells: &[Cell; 4]) -> Result<i64> {
    let mut v = [0i64; 4];
    for (i, c) in cells.iter().enumerate() {
        match c {
            Some(s) => v[i] = s.value(),
            None => {
                return Err(IneqError::IncompleteRow {
                    row: 0,
                    column: super::spreadsheet::COLUMN_LABELS[i],
                })
            }
        }
    }
    let [a, ap, b, bp] = v;
    let s = a * b - a * bp + ap * b + ap * bp;
    debug_assert!(s.abs() <= CHSH_BOUND);
    Ok(s)
}

/// Full-column pairwise expectations and the CHSH combination of a complete
/// sheet. The |S| ≤ 2 bound is a theorem here and is asserted exactly.
pub fn chsh_from_spreadsheet(
    sheet: &Spreadsheet,
    variant: SignVariant,
) -> Result<(CorrelationSet, Rational)> {
    if sheet.is_empty() {
        return Err(IneqError::EmptySheet);
    }
    let n = sheet.len() as i64;
    let mut pair_sums = [0i64; 4];
    let mut col_sums = [0i64; 4];
    for i in 0..sheet.len() {
        let row = sheet.complete_row(i)?;
        for pair in SettingPair::ALL {
            let (ci, cj) = pair.columns();
            pair_sums[pair.index()] += (row[ci] * row[cj]).value();
        }
        for (c, sum) in col_sums.iter_mut().enumerate() {
            *sum += row[c].value();
        }
    }
    // |Σ signs·pair_sums| ≤ 2N holds row by row; checked before any division.
    let signed: i64 = SettingPair::ALL
        .iter()
        .map(|p| variant.sign(*p).value() * pair_sums[p.index()])
        .sum();
    assert!(
        signed.abs() <= CHSH_BOUND * n,
        "CHSH bound violated on a complete sheet: |{signed}| > 2*{n}"
    );
    let pairs = std::array::from_fn(|i| ratio(pair_sums[i], n));
    let singles = std::array::from_fn(|i| ratio(col_sums[i], n));
    let set = CorrelationSet::new(pairs, singles, [sheet.len() as u64; 4])?;
    let s = ratio(signed, n);
    debug_assert_eq!(s, set.chsh(variant));
    Ok((set, s))
}

/// Sign convention for the three-variable inequality
/// |E(AB) − E(AC)| ≤ 1 ± E(BC).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum BooleSign {
    /// Bound 1 + E(BC) (the form used with anti-correlation conventions).
    Plus,
    /// Bound 1 − E(BC); this is the form every complete N×3 table obeys.
    Minus,
}

impl BooleSign {
    pub fn value(self) -> i64 {
        match self {
            BooleSign::Plus => 1,
            BooleSign::Minus => -1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BooleReport {
    pub e_ab: Rational,
    pub e_ac: Rational,
    pub e_bc: Rational,
    pub sign: BooleSign,
    pub lhs: Rational,
    pub bound: Rational,
    pub satisfied: bool,
}

/// The three-variable inequality in its printed form
/// |E(AB) − E(AC)| ≤ 1 ± E(BC), for already-computed expectations.
///
/// This is the reading under which the collision estimates show an apparent
/// violation for both signs; it is NOT a theorem of complete tables for the
/// plus sign (use [`boole_lg_check`] for the table-level law).
pub fn boole_check_values(
    e_ab: &Rational,
    e_ac: &Rational,
    e_bc: &Rational,
    sign: BooleSign,
) -> BooleReport {
    let lhs = (e_ab.clone() - e_ac.clone()).abs();
    let bound = int(1) + int(sign.value()) * e_bc.clone();
    BooleReport {
        e_ab: e_ab.clone(),
        e_ac: e_ac.clone(),
        e_bc: e_bc.clone(),
        sign,
        lhs: lhs.clone(),
        bound: bound.clone(),
        satisfied: lhs <= bound,
    }
}

/// Three-variable inequality on a complete N×3 table, with the sign pairing
/// that makes it a row-wise theorem:
///
///   |E(AB) + s·E(AC)| ≤ 1 + s·E(BC),   s = ±1.
///
/// Row by row, |ab + s·ac| = |b + s·c| which is 2 exactly when s·bc = 1 and
/// 0 otherwise, so `satisfied` is always true for complete tables, for both
/// sign conventions.
pub fn boole_lg_check(sheet: &TripleSheet, sign: BooleSign) -> Result<BooleReport> {
    if sheet.is_empty() {
        return Err(IneqError::EmptySheet);
    }
    let n = sheet.len() as i64;
    let mut sums = [0i64; 3]; // AB, AC, BC
    for row in sheet.rows() {
        let [a, b, c] = [row[0].value(), row[1].value(), row[2].value()];
        sums[0] += a * b;
        sums[1] += a * c;
        sums[2] += b * c;
    }
    let e_ab = ratio(sums[0], n);
    let e_ac = ratio(sums[1], n);
    let e_bc = ratio(sums[2], n);
    let lhs = (e_ab.clone() + int(sign.value()) * e_ac.clone()).abs();
    let bound = int(1) + int(sign.value()) * e_bc.clone();
    Ok(BooleReport {
        e_ab,
        e_ac,
        e_bc,
        sign,
        lhs: lhs.clone(),
        bound: bound.clone(),
        satisfied: lhs <= bound,
    })
}

/// Empirical distribution of the 16 row types of a complete sheet.
///
/// Its pairwise marginals reproduce `chsh_from_spreadsheet` exactly.
pub fn joint_from_spreadsheet(sheet: &Spreadsheet) -> Result<JointDistribution4> {
    if sheet.is_empty() {
        return Err(IneqError::EmptySheet);
    }
    let mut counts = [0i64; 16];
    for i in 0..sheet.len() {
        let row = sheet.complete_row(i)?;
        counts[row_index(&row)] += 1;
    }
    let n = sheet.len() as i64;
    let weights: [Rational; 16] = std::array::from_fn(|i| ratio(counts[i], n));
    JointDistribution4::new(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ineq::spreadsheet::{Observable, Sign};
    use crate::rat::zero;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;

    fn complete(cells: [i64; 4]) -> [Cell; 4] {
        std::array::from_fn(|i| Some(Sign::from_i64(cells[i]).unwrap()))
    }

    #[test]
    fn all_ones_row_scores_two() {
        assert_eq!(check_row(&complete([1, 1, 1, 1])).unwrap(), 2);
        assert_eq!(check_row(&complete([1, 1, 1, -1])).unwrap(), 2);
    }

    // Exhaustive oracle over all 16 rows: s is ±2, never anything else.
    #[test]
    fn exhaustive_rows_score_plus_minus_two() {
        for a in [-1i64, 1] {
            for ap in [-1i64, 1] {
                for b in [-1i64, 1] {
                    for bp in [-1i64, 1] {
                        let s = check_row(&complete([a, ap, b, bp])).unwrap();
                        assert!(s == 2 || s == -2, "row ({a},{ap},{b},{bp}) gave {s}");
                        // Independent route: s = a(b-b') + a'(b+b').
                        assert_eq!(s, a * (b - bp) + ap * (b + bp));
                    }
                }
            }
        }
    }

    #[test]
    fn hole_is_an_error() {
        let mut cells = complete([1, 1, 1, 1]);
        cells[2] = None;
        assert!(matches!(check_row(&cells), Err(IneqError::IncompleteRow { .. })));
    }

    #[test]
    fn identical_rows_give_s_two() {
        let sheet = Spreadsheet::from_complete_rows(vec![[Sign::Plus; 4]; 7]);
        let (set, s) = chsh_from_spreadsheet(&sheet, SignVariant::CANONICAL).unwrap();
        assert_eq!(s, int(2));
        for pair in SettingPair::ALL {
            assert_eq!(set.pair(pair), &int(1));
        }
        assert_eq!(set.counts(), [7; 4]);
    }

    #[test]
    fn uniform_sixteen_rows_give_zero() {
        let rows: Vec<_> = JointDistribution4::row_types().collect();
        let sheet = Spreadsheet::from_complete_rows(rows);
        let (set, s) = chsh_from_spreadsheet(&sheet, SignVariant::CANONICAL).unwrap();
        assert_eq!(s, zero());
        for pair in SettingPair::ALL {
            assert_eq!(set.pair(pair), &zero());
        }
    }

    #[test]
    fn empty_sheet_errors() {
        let sheet = Spreadsheet::default();
        assert!(matches!(
            chsh_from_spreadsheet(&sheet, SignVariant::CANONICAL),
            Err(IneqError::EmptySheet)
        ));
        assert!(matches!(joint_from_spreadsheet(&sheet), Err(IneqError::EmptySheet)));
    }

    #[test]
    fn large_random_sheet_obeys_bound_for_all_variants() {
        let mut rng = rng_from_seed(7);
        let sheet = Spreadsheet::random(10_000, &mut rng);
        for variant in SignVariant::all() {
            let (_, s) = chsh_from_spreadsheet(&sheet, variant).unwrap();
            assert!(s.abs() <= int(2));
        }
    }

    #[test]
    fn boole_all_ones() {
        let sheet = TripleSheet::new(vec![[Sign::Plus; 3]; 5]);
        let report = boole_lg_check(&sheet, BooleSign::Minus).unwrap();
        assert_eq!(report.lhs, zero());
        assert_eq!(report.bound, zero());
        assert!(report.satisfied);
    }

    #[test]
    fn boole_alternating_rows_saturate() {
        let rows = vec![
            [Sign::Plus, Sign::Plus, Sign::Minus],
            [Sign::Minus, Sign::Minus, Sign::Plus],
            [Sign::Plus, Sign::Plus, Sign::Minus],
            [Sign::Minus, Sign::Minus, Sign::Plus],
        ];
        let report = boole_lg_check(&TripleSheet::new(rows), BooleSign::Minus).unwrap();
        assert_eq!(report.e_ab, int(1));
        assert_eq!(report.e_ac, int(-1));
        assert_eq!(report.e_bc, int(-1));
        assert_eq!(report.lhs, int(2));
        assert_eq!(report.bound, int(2));
        assert!(report.satisfied);
    }

    #[test]
    fn both_table_sign_conventions_hold_where_the_printed_form_fails() {
        // All rows (1,1,-1): the printed naive form with the plus sign has
        // lhs 2 against bound 1 + E(BC) = 0, but both table-level pairings
        // hold.
        let sheet = TripleSheet::new(vec![[Sign::Plus, Sign::Plus, Sign::Minus]; 3]);
        let naive = boole_check_values(&int(1), &int(-1), &int(-1), BooleSign::Plus);
        assert!(!naive.satisfied);
        assert!(boole_lg_check(&sheet, BooleSign::Plus).unwrap().satisfied);
        assert!(boole_lg_check(&sheet, BooleSign::Minus).unwrap().satisfied);
    }

    #[test]
    fn joint_point_mass_and_uniform() {
        let row = [Sign::Plus, Sign::Minus, Sign::Plus, Sign::Minus];
        let sheet = Spreadsheet::from_complete_rows(vec![row; 9]);
        let joint = joint_from_spreadsheet(&sheet).unwrap();
        assert_eq!(joint, JointDistribution4::point_mass(&row));

        let rows: Vec<_> = JointDistribution4::row_types().collect();
        let uniform = joint_from_spreadsheet(&Spreadsheet::from_complete_rows(rows)).unwrap();
        assert_eq!(uniform, JointDistribution4::uniform());
    }

    #[test]
    fn joint_marginals_match_direct_expectations_exactly() {
        let mut rng = rng_from_seed(11);
        for _ in 0..20 {
            let sheet = Spreadsheet::random(137, &mut rng);
            let joint = joint_from_spreadsheet(&sheet).unwrap();
            let (set, _) = chsh_from_spreadsheet(&sheet, SignVariant::CANONICAL).unwrap();
            for pair in SettingPair::ALL {
                assert_eq!(joint.pair_expectation(pair), *set.pair(pair));
            }
            for obs in Observable::ALL {
                assert_eq!(joint.single_expectation(obs), *set.single(obs));
            }
        }
    }

    proptest! {
        #[test]
        fn prop_any_complete_sheet_obeys_chsh(seed in any::<u64>(), n in 1usize..200) {
            let mut rng = rng_from_seed(seed);
            let sheet = Spreadsheet::random(n, &mut rng);
            for variant in SignVariant::all() {
                let (_, s) = chsh_from_spreadsheet(&sheet, variant).unwrap();
                prop_assert!(s.abs() <= int(2));
            }
        }

        #[test]
        fn prop_any_triple_sheet_obeys_boole_both_signs(seed in any::<u64>(), n in 1usize..200) {
            let mut rng = rng_from_seed(seed);
            let sheet = TripleSheet::random(n, &mut rng);
            for sign in [BooleSign::Minus, BooleSign::Plus] {
                let report = boole_lg_check(&sheet, sign).unwrap();
                prop_assert!(report.satisfied);
            }
        }

        #[test]
        fn prop_row_score_is_plus_minus_two(bits in 0usize..16) {
            let row = crate::ineq::correlation::index_row(bits);
            let cells: [Cell; 4] = std::array::from_fn(|i| Some(row[i]));
            let s = check_row(&cells).unwrap();
            prop_assert!(s == 2 || s == -2);
        }
    }
}
