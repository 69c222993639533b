//! Joint-distribution feasibility for a correlation set.
//!
//! A set of four pairwise expectations and four singles is realisable by a
//! distribution over the 16 deterministic rows iff a tiny linear program is
//! feasible. The program is solved exactly (phase-1 simplex with Bland's
//! rule over rationals); an independent algebraic route — the eight CHSH
//! inequalities plus validity of the four pairwise outcome tables — must
//! agree with the vertex verdict on every input (this equivalence is Fine's
//! theorem and is cross-checked in the tests and the acceptance suite).

use num::traits::{Signed, Zero};

use crate::rat::{int, ratio, zero, Rational};

use super::correlation::{index_row, CorrelationSet, JointDistribution4, SignVariant};
use super::spreadsheet::{Observable, SettingPair};
use super::Result;

/// Default decision tolerance for float-derived inputs (1e−9). Exact
/// rational inputs should be decided with a zero tolerance instead.
pub fn fine_float_tol() -> Rational {
    ratio(1, 1_000_000_000)
}

#[derive(Clone, Debug)]
pub struct FineResult {
    pub feasible: bool,
    /// Phase-1 optimum: total constraint violation of the best reweighting.
    /// Zero iff the correlations are exactly realisable.
    pub residual: Rational,
    /// A realising distribution, present when the residual is exactly zero.
    pub witness: Option<JointDistribution4>,
}

/// Decides whether `corr` is the marginal family of some distribution over
/// the 16 deterministic rows; feasible within `tol` on the phase-1 optimum.
pub fn fine_feasibility(corr: &CorrelationSet, tol: &Rational) -> Result<FineResult> {
    // Rows of the equality system A x = b over the 16 vertex columns.
    let mut a: Vec<Vec<Rational>> = Vec::with_capacity(9);
    let mut b: Vec<Rational> = Vec::with_capacity(9);

    a.push(vec![int(1); 16]);
    b.push(int(1));
    for pair in SettingPair::ALL {
        let (ci, cj) = pair.columns();
        a.push(
            (0..16)
                .map(|idx| {
                    let row = index_row(idx);
                    int((row[ci] * row[cj]).value())
                })
                .collect(),
        );
        b.push(corr.pair(pair).clone());
    }
    for obs in Observable::ALL {
        let c = obs.column();
        a.push((0..16).map(|idx| int(index_row(idx)[c].value())).collect());
        b.push(corr.single(obs).clone());
    }

    let (optimum, x) = simplex_phase1(&a, &b);
    let feasible = optimum <= *tol;
    let witness = if optimum.is_zero() {
        let weights: [Rational; 16] = std::array::from_fn(|i| x[i].clone());
        Some(JointDistribution4::new(weights).expect("exact phase-1 solution is a distribution"))
    } else {
        None
    };
    Ok(FineResult { feasible, residual: optimum, witness })
}

/// The algebraic side of Fine's theorem: all eight CHSH inequalities hold
/// and each of the four pairwise (single + single + product) tables is a
/// valid distribution. Equivalent to vertex feasibility.
#[derive(Clone, Debug)]
pub struct FineConditions {
    pub chsh_ok: bool,
    /// max over variants of |S|; feasibility needs ≤ 2.
    pub max_abs_chsh: Rational,
    pub tables_ok: bool,
    /// min over pairs and outcomes of 4·p(α,β); feasibility needs ≥ 0.
    pub min_table_entry: Rational,
    pub satisfied: bool,
}

pub fn fine_conditions(corr: &CorrelationSet, tol: &Rational) -> FineConditions {
    let max_abs_chsh = SignVariant::all()
        .into_iter()
        .map(|v| corr.chsh(v).abs())
        .max()
        .expect("eight variants");
    let chsh_ok = max_abs_chsh <= int(2) + tol.clone();

    let mut min_table_entry: Option<Rational> = None;
    for pair in SettingPair::ALL {
        let (oa, ob) = pair.observables();
        let (ea, eb, eab) = (corr.single(oa), corr.single(ob), corr.pair(pair));
        for alpha in [-1i64, 1] {
            for beta in [-1i64, 1] {
                // 4·p(α,β) = 1 + α·E(X) + β·E(Y) + αβ·E(XY)
                let entry = int(1)
                    + int(alpha) * ea.clone()
                    + int(beta) * eb.clone()
                    + int(alpha * beta) * eab.clone();
                min_table_entry = Some(match min_table_entry {
                    Some(m) if m <= entry => m,
                    _ => entry,
                });
            }
        }
    }
    let min_table_entry = min_table_entry.expect("sixteen entries");
    let tables_ok = min_table_entry >= -tol.clone();
    FineConditions {
        chsh_ok,
        max_abs_chsh,
        tables_ok,
        min_table_entry: min_table_entry.clone(),
        satisfied: chsh_ok && tables_ok,
    }
}

/// Exact phase-1 simplex: minimise the sum of artificial variables for
/// A x = b, x ≥ 0. Returns (optimum, x). Bland's rule; terminates on every
/// input, with a generous iteration guard.
#[allow(clippy::needless_range_loop)] // column index drives Bland's rule
fn simplex_phase1(a: &[Vec<Rational>], b: &[Rational]) -> (Rational, Vec<Rational>) {
    let m = a.len();
    let n = a[0].len();
    // Tableau over columns [x_0..x_{n-1}, artificial_0..artificial_{m-1}]
    // with non-negative right-hand sides.
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i] < zero();
        let mut row: Vec<Rational> = Vec::with_capacity(n + m);
        row.extend(a[i].iter().map(|v| if flip { -v.clone() } else { v.clone() }));
        row.extend((0..m).map(|j| if i == j { int(1) } else { zero() }));
        t.push(row);
        rhs.push(if flip { -b[i].clone() } else { b[i].clone() });
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut guard = 0usize;
    loop {
        guard += 1;
        assert!(guard < 100_000, "phase-1 simplex failed to terminate");

        // Reduced costs r_j = c_j - Σ_i c_B[i] t[i][j], with c = [0…0, 1…1].
        let mut entering: Option<usize> = None;
        for j in 0..n + m {
            if basis.contains(&j) {
                continue;
            }
            let c_j = if j >= n { int(1) } else { zero() };
            let mut z_j = zero();
            for i in 0..m {
                if basis[i] >= n {
                    z_j += t[i][j].clone();
                }
            }
            if c_j - z_j < zero() {
                entering = Some(j); // Bland: first (smallest) index
                break;
            }
        }
        let Some(enter) = entering else {
            break;
        };

        // Ratio test; ties broken by smallest basis variable (Bland).
        let mut leave: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for i in 0..m {
            if t[i][enter] > zero() {
                let r = rhs[i].clone() / t[i][enter].clone();
                let better = match &best {
                    None => true,
                    Some(b) => r < *b || (r == *b && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(r);
                    leave = Some(i);
                }
            }
        }
        let leave = leave.expect("phase-1 objective is bounded below by 0");

        // Pivot.
        let pivot = t[leave][enter].clone();
        for cell in t[leave].iter_mut() {
            *cell /= pivot.clone();
        }
        rhs[leave] /= pivot;
        for i in 0..m {
            if i == leave || t[i][enter].is_zero() {
                continue;
            }
            let factor = t[i][enter].clone();
            let pivot_row = t[leave].clone();
            for (cell, p) in t[i].iter_mut().zip(pivot_row.iter()) {
                let delta = factor.clone() * p.clone();
                *cell -= delta;
            }
            let delta = factor * rhs[leave].clone();
            rhs[i] -= delta;
        }
        basis[leave] = enter;
    }

    let mut x = vec![zero(); n];
    let mut optimum = zero();
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] = rhs[i].clone();
        } else {
            optimum += rhs[i].clone();
        }
    }
    (optimum, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ineq::spreadsheet::Sign;
    use crate::rat::rational_from_f64;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn set(pairs: [Rational; 4], singles: [Rational; 4]) -> CorrelationSet {
        CorrelationSet::new(pairs, singles, [0; 4]).unwrap()
    }

    #[test]
    fn all_zero_is_feasible_and_uniform_is_a_witness() {
        let corr = set(std::array::from_fn(|_| zero()), std::array::from_fn(|_| zero()));
        let result = fine_feasibility(&corr, &zero()).unwrap();
        assert!(result.feasible);
        assert!(result.residual.is_zero());
        let witness = result.witness.expect("exact witness");
        for pair in SettingPair::ALL {
            assert_eq!(witness.pair_expectation(pair), zero());
        }
        for obs in Observable::ALL {
            assert_eq!(witness.single_expectation(obs), zero());
        }
        // The uniform distribution realises the same marginals.
        let uniform = JointDistribution4::uniform();
        for pair in SettingPair::ALL {
            assert_eq!(uniform.pair_expectation(pair), zero());
        }
    }

    #[test]
    fn quantum_singlet_point_is_infeasible() {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let q = rational_from_f64(c).unwrap();
        let corr = set(
            [q.clone(), -q.clone(), q.clone(), q],
            std::array::from_fn(|_| zero()),
        );
        let result = fine_feasibility(&corr, &fine_float_tol()).unwrap();
        assert!(!result.feasible);
        assert!(result.residual > fine_float_tol());
        assert!(result.witness.is_none());
        let conditions = fine_conditions(&corr, &fine_float_tol());
        assert!(!conditions.satisfied);
        assert!(conditions.max_abs_chsh > int(2));
    }

    #[test]
    fn collision_point_is_feasible() {
        // (A, A', B, B') = (A(V1), B(V1), B(V2), C(V2)).
        let corr = set(
            [int(1), int(-1), ratio(1, 2), ratio(-1, 2)],
            [zero(), ratio(-1, 2), zero(), zero()],
        );
        let result = fine_feasibility(&corr, &zero()).unwrap();
        assert!(result.feasible, "residual = {}", result.residual);
        let witness = result.witness.expect("boundary point is exactly realisable");
        assert_eq!(witness.pair_expectation(SettingPair::AB), int(1));
        assert_eq!(witness.pair_expectation(SettingPair::ApB), ratio(1, 2));
        assert_eq!(witness.single_expectation(Observable::Ap), ratio(-1, 2));
        assert!(fine_conditions(&corr, &zero()).satisfied);
    }

    #[test]
    fn out_of_range_expectation_is_rejected_at_construction() {
        let e: [Rational; 4] = [int(1), int(1), int(1), ratio(5, 4)];
        assert!(CorrelationSet::new(e, std::array::from_fn(|_| zero()), [0; 4]).is_err());
    }

    /// Random marginal families from actual joints: always feasible, and the
    /// algebraic conditions agree.
    #[test]
    fn random_joints_are_feasible_and_routes_agree() {
        let mut rng = rng_from_seed(23);
        for _ in 0..100 {
            let mut weights: [Rational; 16] = std::array::from_fn(|_| zero());
            let mut total = 0i64;
            let mut raw = [0i64; 16];
            for w in raw.iter_mut() {
                *w = rng.random_range(0..20);
                total += *w;
            }
            if total == 0 {
                raw[0] = 1;
                total = 1;
            }
            for (slot, w) in weights.iter_mut().zip(raw) {
                *slot = ratio(w, total);
            }
            let joint = JointDistribution4::new(weights).unwrap();
            let corr = joint.correlation_set();
            let result = fine_feasibility(&corr, &zero()).unwrap();
            assert!(result.feasible);
            assert!(fine_conditions(&corr, &zero()).satisfied);
            let witness = result.witness.unwrap();
            for pair in SettingPair::ALL {
                assert_eq!(witness.pair_expectation(pair), joint.pair_expectation(pair));
            }
        }
    }

    /// Random expectation tuples on a rational grid: the vertex verdict and
    /// the algebraic conditions agree whether feasible or not.
    #[test]
    fn random_tuples_verdicts_agree() {
        let mut rng = rng_from_seed(29);
        let mut seen_infeasible = 0;
        for _ in 0..200 {
            let grid = |rng: &mut rand_chacha::ChaCha8Rng| ratio(rng.random_range(-8..=8), 8);
            let pairs: [Rational; 4] = std::array::from_fn(|_| grid(&mut rng));
            let singles: [Rational; 4] = std::array::from_fn(|_| grid(&mut rng));
            let corr = set(pairs, singles);
            let vertex = fine_feasibility(&corr, &zero()).unwrap();
            let algebraic = fine_conditions(&corr, &zero());
            assert_eq!(
                vertex.feasible, algebraic.satisfied,
                "disagreement on {corr:?} (residual {})",
                vertex.residual
            );
            if !vertex.feasible {
                seen_infeasible += 1;
            }
        }
        assert!(seen_infeasible > 10, "generator never left the polytope");
    }

    /// CHSH alone is not enough: a tuple whose pairwise tables are invalid
    /// must be infeasible even though all eight CHSH inequalities hold.
    #[test]
    fn invalid_pairwise_table_is_caught() {
        let corr = set(
            [int(1), zero(), zero(), zero()],
            [int(1), zero(), int(-1), zero()],
        );
        let conditions = fine_conditions(&corr, &zero());
        assert!(conditions.chsh_ok);
        assert!(!conditions.tables_ok);
        let vertex = fine_feasibility(&corr, &zero()).unwrap();
        assert!(!vertex.feasible);
    }

    #[test]
    fn sheet_marginals_are_always_feasible() {
        let mut rng = rng_from_seed(31);
        let sheet = crate::ineq::Spreadsheet::random(50, &mut rng);
        let (corr, _) =
            crate::ineq::chsh_from_spreadsheet(&sheet, SignVariant::CANONICAL).unwrap();
        let result = fine_feasibility(&corr, &zero()).unwrap();
        assert!(result.feasible);
        // The witness reproduces the sheet's joint type distribution marginals.
        let joint = crate::ineq::joint_from_spreadsheet(&sheet).unwrap();
        let witness = result.witness.unwrap();
        for pair in SettingPair::ALL {
            assert_eq!(witness.pair_expectation(pair), joint.pair_expectation(pair));
        }
        let _ = Sign::Plus;
    }
}
