//! Two-qubit quantum machinery: spin operators, singlet correlations, the
//! CHSH operator with the Tsirelson bound and Landau equality, the separable
//! bound, and smeared (spherical-cap) correlations.

mod matrix;
mod smearing;

pub use matrix::{c, cr, CMat};
pub use smearing::{
    smeared_correlation, smeared_correlation_closed_form, smeared_correlation_monte_carlo,
    McEstimate, SphericalCap,
};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ineq::{CorrelationSet, Observable, SettingPair, SignVariant};

#[derive(Debug, Error)]
pub enum QuantumError {
    #[error("vector norm {norm} deviates from 1 by more than 1e-12")]
    NonUnitVector { norm: f64 },
    #[error("cannot normalise a (near-)zero vector")]
    ZeroVector,
    #[error("expected dimension {expected}, got {got}")]
    BadDimension { expected: usize, got: usize },
    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("invalid quantum state: {0}")]
    InvalidState(String),
    #[error("not a valid observable: operator norm {norm} exceeds 1")]
    NotAnObservable { norm: f64 },
    #[error("expectation has imaginary residue {0:.3e}")]
    ImaginaryResidue(f64),
    #[error("invalid separable mixture: {0}")]
    InvalidMixture(String),
    #[error("cap half-width must lie in (0, 2], got {0}")]
    EpsilonOutOfRange(f64),
    #[error("correlation out of range: {0}")]
    Correlation(#[from] crate::ineq::IneqError),
}

pub type Result<T> = std::result::Result<T, QuantumError>;

const HERMITICITY_TOL: f64 = 1e-12;
const IMAG_RESIDUE_TOL: f64 = 1e-9;

/// A real unit vector on S², validated to 1e−12.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct UnitVector3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector3 {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm_sq = x * x + y * y + z * z;
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(QuantumError::NonUnitVector { norm: norm_sq.sqrt() });
        }
        Ok(UnitVector3 { x, y, z })
    }

    /// Rescales an arbitrary non-zero vector onto the sphere.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if norm < 1e-12 {
            return Err(QuantumError::ZeroVector);
        }
        Ok(UnitVector3 { x: x / norm, y: y / norm, z: z / norm })
    }

    pub fn x_axis() -> Self {
        UnitVector3 { x: 1.0, y: 0.0, z: 0.0 }
    }

    pub fn y_axis() -> Self {
        UnitVector3 { x: 0.0, y: 1.0, z: 0.0 }
    }

    pub fn z_axis() -> Self {
        UnitVector3 { x: 0.0, y: 0.0, z: 1.0 }
    }

    /// Uniform direction on the sphere.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let s = (1.0 - z * z).max(0.0).sqrt();
        UnitVector3 { x: s * phi.cos(), y: s * phi.sin(), z }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &UnitVector3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn neg(&self) -> UnitVector3 {
        UnitVector3 { x: -self.x, y: -self.y, z: -self.z }
    }
}

impl TryFrom<[f64; 3]> for UnitVector3 {
    type Error = QuantumError;
    fn try_from(v: [f64; 3]) -> Result<Self> {
        UnitVector3::new(v[0], v[1], v[2])
    }
}

impl From<UnitVector3> for [f64; 3] {
    fn from(v: UnitVector3) -> [f64; 3] {
        v.components()
    }
}

/// Validated Hermitian matrix of dimension 2 or 4.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(try_from = "OperatorJson", into = "OperatorJson")]
pub struct HermitianOperator {
    mat: CMat,
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    dim: usize,
    /// Row-major entries as [re, im] pairs.
    entries: Vec<[f64; 2]>,
}

impl TryFrom<OperatorJson> for HermitianOperator {
    type Error = QuantumError;
    fn try_from(j: OperatorJson) -> Result<Self> {
        if j.entries.len() != j.dim * j.dim {
            return Err(QuantumError::BadDimension {
                expected: j.dim * j.dim,
                got: j.entries.len(),
            });
        }
        let mut mat = CMat::zeros(j.dim);
        for i in 0..j.dim {
            for k in 0..j.dim {
                let [re, im] = j.entries[i * j.dim + k];
                mat[(i, k)] = c(re, im);
            }
        }
        HermitianOperator::new(mat)
    }
}

impl From<HermitianOperator> for OperatorJson {
    fn from(op: HermitianOperator) -> OperatorJson {
        let dim = op.mat.dim();
        OperatorJson {
            dim,
            entries: op.mat.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl HermitianOperator {
    pub fn new(mat: CMat) -> Result<Self> {
        let dim = mat.dim();
        if dim != 2 && dim != 4 {
            return Err(QuantumError::BadDimension { expected: 2, got: dim });
        }
        let defect = mat.hermiticity_defect();
        if defect > HERMITICITY_TOL * (1.0 + mat.frobenius_norm()) {
            return Err(QuantumError::NotHermitian { defect });
        }
        Ok(HermitianOperator { mat })
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator { mat: CMat::identity(dim) }
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.mat.eigenvalues()
    }

    pub fn operator_norm(&self) -> f64 {
        self.mat.operator_norm()
    }

    /// ‖A² − I‖_F: zero for ±1-valued observables.
    pub fn involution_defect(&self) -> f64 {
        let sq = &self.mat * &self.mat;
        (sq - CMat::identity(self.dim())).frobenius_norm()
    }
}

/// σ·a in the standard Pauli basis.
pub fn spin_operator(a: &UnitVector3) -> HermitianOperator {
    let [x, y, z] = a.components();
    let mat = CMat::from_rows(&[
        &[cr(z), c(x, -y)],
        &[c(x, y), cr(-z)],
    ]);
    HermitianOperator { mat }
}

pub fn pauli_x() -> HermitianOperator {
    spin_operator(&UnitVector3::x_axis())
}

pub fn pauli_y() -> HermitianOperator {
    spin_operator(&UnitVector3::y_axis())
}

pub fn pauli_z() -> HermitianOperator {
    spin_operator(&UnitVector3::z_axis())
}

/// Two-qubit state: a pure vector or a density matrix.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
#[serde(try_from = "StateJson", into = "StateJson")]
pub enum QuantumState {
    Pure(Vec<Complex64>),
    Density(CMat),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum StateJson {
    Pure { amplitudes: Vec<[f64; 2]> },
    Density { entries: Vec<[f64; 2]> },
}

impl TryFrom<StateJson> for QuantumState {
    type Error = QuantumError;
    fn try_from(j: StateJson) -> Result<Self> {
        match j {
            StateJson::Pure { amplitudes } => {
                let amps: Vec<Complex64> =
                    amplitudes.iter().map(|[re, im]| c(*re, *im)).collect();
                QuantumState::new_pure(amps)
            }
            StateJson::Density { entries } => {
                if entries.len() != 16 {
                    return Err(QuantumError::BadDimension { expected: 16, got: entries.len() });
                }
                let mut mat = CMat::zeros(4);
                for i in 0..4 {
                    for k in 0..4 {
                        let [re, im] = entries[i * 4 + k];
                        mat[(i, k)] = c(re, im);
                    }
                }
                QuantumState::new_density(mat)
            }
        }
    }
}

impl From<QuantumState> for StateJson {
    fn from(s: QuantumState) -> StateJson {
        match s {
            QuantumState::Pure(amps) => StateJson::Pure {
                amplitudes: amps.iter().map(|z| [z.re, z.im]).collect(),
            },
            QuantumState::Density(mat) => StateJson::Density {
                entries: mat.data().iter().map(|z| [z.re, z.im]).collect(),
            },
        }
    }
}

impl QuantumState {
    pub fn new_pure(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 4 {
            return Err(QuantumError::BadDimension { expected: 4, got: amplitudes.len() });
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(QuantumError::InvalidState(format!(
                "pure state norm² = {norm_sq}, expected 1"
            )));
        }
        Ok(QuantumState::Pure(amplitudes))
    }

    pub fn new_density(mat: CMat) -> Result<Self> {
        if mat.dim() != 4 {
            return Err(QuantumError::BadDimension { expected: 4, got: mat.dim() });
        }
        let defect = mat.hermiticity_defect();
        if defect > HERMITICITY_TOL * (1.0 + mat.frobenius_norm()) {
            return Err(QuantumError::NotHermitian { defect });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(QuantumError::InvalidState(format!("trace {tr}, expected 1")));
        }
        let min_eig = mat.min_eigenvalue();
        if min_eig < -1e-10 {
            return Err(QuantumError::InvalidState(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(QuantumState::Density(mat))
    }

    /// The antisymmetric two-qubit state (|01⟩ − |10⟩)/√2, with |0⟩ the +1
    /// eigenvector of σ_z.
    pub fn singlet() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        QuantumState::Pure(vec![cr(0.0), cr(s), cr(-s), cr(0.0)])
    }

    pub fn maximally_mixed() -> Self {
        QuantumState::Density(CMat::identity(4).scale(cr(0.25)))
    }

    pub fn density(&self) -> CMat {
        match self {
            QuantumState::Density(mat) => mat.clone(),
            QuantumState::Pure(amps) => {
                let mut mat = CMat::zeros(4);
                for i in 0..4 {
                    for j in 0..4 {
                        mat[(i, j)] = amps[i] * amps[j].conj();
                    }
                }
                mat
            }
        }
    }

    /// ⟨M⟩ for a 4×4 observable; errors if a non-negligible imaginary part
    /// survives (it cannot for Hermitian M).
    pub fn expectation(&self, m: &CMat) -> Result<f64> {
        if m.dim() != 4 {
            return Err(QuantumError::BadDimension { expected: 4, got: m.dim() });
        }
        let value = match self {
            QuantumState::Pure(amps) => {
                let mv = m.mul_vec(amps);
                amps.iter().zip(mv.iter()).map(|(a, b)| a.conj() * b).sum::<Complex64>()
            }
            QuantumState::Density(rho) => (rho * m).trace(),
        };
        if value.im.abs() > IMAG_RESIDUE_TOL {
            return Err(QuantumError::ImaginaryResidue(value.im));
        }
        Ok(value.re)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionalCovariance {
    pub e_ab: f64,
    pub e_a: f64,
    pub e_b: f64,
    pub cov: f64,
}

/// E(A⊗B), the two local expectations and cov(A,B|ρ) = E(AB) − E(A)E(B).
pub fn conditional_covariance(
    state: &QuantumState,
    a_op: &HermitianOperator,
    b_op: &HermitianOperator,
) -> Result<ConditionalCovariance> {
    if a_op.dim() != 2 {
        return Err(QuantumError::BadDimension { expected: 2, got: a_op.dim() });
    }
    if b_op.dim() != 2 {
        return Err(QuantumError::BadDimension { expected: 2, got: b_op.dim() });
    }
    let i2 = CMat::identity(2);
    let e_ab = state.expectation(&a_op.matrix().kron(b_op.matrix()))?;
    let e_a = state.expectation(&a_op.matrix().kron(&i2))?;
    let e_b = state.expectation(&i2.kron(b_op.matrix()))?;
    Ok(ConditionalCovariance { e_ab, e_a, e_b, cov: e_ab - e_a * e_b })
}

/// Probability table over the ±1 outcome pairs of one setting pair,
/// p(α,β) = |⟨ψ|αβ⟩|² in the joint eigenbasis.
#[derive(Clone, Debug)]
pub struct OutcomeTable {
    pub pair: SettingPair,
    /// Indexed as `p[alice][bob]` with index 0 ↔ outcome +1, 1 ↔ outcome −1.
    pub p: [[f64; 2]; 2],
}

pub const OUTCOME_VALUES: [f64; 2] = [1.0, -1.0];

impl OutcomeTable {
    pub fn total(&self) -> f64 {
        self.p.iter().flatten().sum()
    }

    pub fn expectation(&self) -> f64 {
        let mut e = 0.0;
        for (i, row) in self.p.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                e += OUTCOME_VALUES[i] * OUTCOME_VALUES[j] * p;
            }
        }
        e
    }

    pub fn marginal_alice(&self) -> f64 {
        OUTCOME_VALUES[0] * (self.p[0][0] + self.p[0][1])
            + OUTCOME_VALUES[1] * (self.p[1][0] + self.p[1][1])
    }

    pub fn marginal_bob(&self) -> f64 {
        OUTCOME_VALUES[0] * (self.p[0][0] + self.p[1][0])
            + OUTCOME_VALUES[1] * (self.p[0][1] + self.p[1][1])
    }

    pub fn min_entry(&self) -> f64 {
        self.p.iter().flatten().fold(f64::INFINITY, |m, &x| m.min(x))
    }
}

#[derive(Clone, Debug)]
pub struct QuantumCorrelations {
    pub set: CorrelationSet,
    pub tables: [OutcomeTable; 4],
}

/// Eigenvector of σ·a for the given outcome (+1 or −1).
fn spin_eigenvector(op: &HermitianOperator, outcome: f64) -> Vec<Complex64> {
    let (eigs, vecs) = op.matrix().hermitian_eigen();
    // Ascending order: index 0 is the −1 branch, index 1 the +1 branch.
    let col = if outcome > 0.0 { 1 } else { 0 };
    debug_assert!((eigs[col] - outcome).abs() < 1e-9);
    (0..2).map(|k| vecs[(k, col)]).collect()
}

/// The four pairwise expectations (for the singlet: −a·b for each pair), the
/// four singles, and the dedicated eigenbasis probability tables.
pub fn correlation_set_quantum(
    state: &QuantumState,
    a: &UnitVector3,
    ap: &UnitVector3,
    b: &UnitVector3,
    bp: &UnitVector3,
) -> Result<QuantumCorrelations> {
    let ops: [HermitianOperator; 4] =
        [spin_operator(a), spin_operator(ap), spin_operator(b), spin_operator(bp)];
    let op_of = |obs: Observable| &ops[obs.column()];

    let mut pairs = [0.0; 4];
    let mut singles = [f64::NAN; 4];
    let mut tables: Vec<OutcomeTable> = Vec::with_capacity(4);
    let rho = state.density();
    for pair in SettingPair::ALL {
        let (oa, ob) = pair.observables();
        let cc = conditional_covariance(state, op_of(oa), op_of(ob))?;
        pairs[pair.index()] = cc.e_ab;
        singles[oa.column()] = cc.e_a;
        singles[ob.column()] = cc.e_b;

        let mut p = [[0.0; 2]; 2];
        for (i, alpha) in OUTCOME_VALUES.iter().enumerate() {
            let va = spin_eigenvector(op_of(oa), *alpha);
            for (j, beta) in OUTCOME_VALUES.iter().enumerate() {
                let vb = spin_eigenvector(op_of(ob), *beta);
                // |αβ⟩ = |α⟩ ⊗ |β⟩; p = ⟨αβ|ρ|αβ⟩.
                let mut joint = Vec::with_capacity(4);
                for x in &va {
                    for y in &vb {
                        joint.push(x * y);
                    }
                }
                let rv = rho.mul_vec(&joint);
                let prob: Complex64 =
                    joint.iter().zip(rv.iter()).map(|(a, b)| a.conj() * b).sum();
                p[i][j] = prob.re;
            }
        }
        tables.push(OutcomeTable { pair, p });
    }
    let set = CorrelationSet::from_f64(pairs, singles)?;
    let tables: [OutcomeTable; 4] = tables.try_into().expect("four tables");
    Ok(QuantumCorrelations { set, tables })
}

fn require_observable(op: &HermitianOperator) -> Result<()> {
    if op.dim() != 2 {
        return Err(QuantumError::BadDimension { expected: 2, got: op.dim() });
    }
    let norm = op.operator_norm();
    if norm > 1.0 + 1e-9 {
        return Err(QuantumError::NotAnObservable { norm });
    }
    Ok(())
}

/// Ŝ = Â⊗B̂ − Â⊗B̂′ + Â′⊗B̂ + Â′⊗B̂′ for norm-≤1 observables.
pub fn chsh_operator(
    a: &HermitianOperator,
    ap: &HermitianOperator,
    b: &HermitianOperator,
    bp: &HermitianOperator,
) -> Result<HermitianOperator> {
    for op in [a, ap, b, bp] {
        require_observable(op)?;
    }
    let s = a.matrix().kron(b.matrix()) - a.matrix().kron(bp.matrix())
        + ap.matrix().kron(b.matrix())
        + ap.matrix().kron(bp.matrix());
    HermitianOperator::new(s)
}

#[derive(Clone, Debug)]
pub struct TsirelsonCheck {
    pub lhs: HermitianOperator,
    pub rhs: HermitianOperator,
    /// Smallest eigenvalue of rhs − lhs.
    pub psd_gap: f64,
    /// ‖Ĉ² − I − ¼[Â,Â′]⊗[B̂,B̂′]‖_F with Ĉ = Ŝ/2, when all four
    /// observables are ±1-valued (involutions); None otherwise.
    pub landau_residual: Option<f64>,
    pub commutator_a_norm: f64,
    pub commutator_b_norm: f64,
    pub s_norm: f64,
}

/// Compares Ŝ² with 4I + [Â,Â′]⊗[B̂,B̂′] and, for ±1-valued observables,
/// evaluates the Landau equality.
pub fn tsirelson_inequality_check(
    a: &HermitianOperator,
    ap: &HermitianOperator,
    b: &HermitianOperator,
    bp: &HermitianOperator,
) -> Result<TsirelsonCheck> {
    let s = chsh_operator(a, ap, b, bp)?;
    let s_sq = s.matrix() * s.matrix();
    let comm_a = a.matrix().commutator(ap.matrix());
    let comm_b = b.matrix().commutator(bp.matrix());
    let correction = comm_a.kron(&comm_b);
    let rhs = CMat::identity(4).scale(cr(4.0)) + correction.clone();
    let gap_matrix = rhs.clone() - s_sq.clone();
    let psd_gap = gap_matrix.min_eigenvalue();

    let involutions = [a, ap, b, bp].iter().all(|op| op.involution_defect() <= 1e-10);
    let landau_residual = if involutions {
        let c_sq = s_sq.scale(cr(0.25));
        let residual = c_sq - CMat::identity(4) - correction.scale(cr(0.25));
        Some(residual.frobenius_norm())
    } else {
        None
    };
    // Commutators are anti-Hermitian; i·[X, Y] is Hermitian with equal norm.
    let i_unit = c(0.0, 1.0);
    Ok(TsirelsonCheck {
        s_norm: s.operator_norm(),
        lhs: HermitianOperator::new(s_sq)?,
        rhs: HermitianOperator::new(rhs)?,
        psd_gap,
        landau_residual,
        commutator_a_norm: comm_a.scale(i_unit).operator_norm(),
        commutator_b_norm: comm_b.scale(i_unit).operator_norm(),
    })
}

/// Convex mixture of product states Σᵢ wᵢ ρᵢ⁽¹⁾⊗ρᵢ⁽²⁾.
#[derive(Clone, Debug)]
pub struct SeparableMixture {
    components: Vec<(f64, CMat, CMat)>,
}

impl SeparableMixture {
    pub fn new(components: Vec<(f64, CMat, CMat)>) -> Result<Self> {
        if components.is_empty() {
            return Err(QuantumError::InvalidMixture("no components".into()));
        }
        let mut total = 0.0;
        for (i, (w, rho1, rho2)) in components.iter().enumerate() {
            if *w < 0.0 {
                return Err(QuantumError::InvalidMixture(format!(
                    "weight {i} is negative ({w})"
                )));
            }
            total += w;
            for (side, rho) in [(1, rho1), (2, rho2)] {
                if rho.dim() != 2 {
                    return Err(QuantumError::InvalidMixture(format!(
                        "factor {side} of component {i} is not 2x2"
                    )));
                }
                if rho.hermiticity_defect() > HERMITICITY_TOL * (1.0 + rho.frobenius_norm()) {
                    return Err(QuantumError::InvalidMixture(format!(
                        "factor {side} of component {i} is not Hermitian"
                    )));
                }
                if (rho.trace().re - 1.0).abs() > 1e-12 {
                    return Err(QuantumError::InvalidMixture(format!(
                        "factor {side} of component {i} has trace {}",
                        rho.trace().re
                    )));
                }
                if rho.min_eigenvalue() < -1e-10 {
                    return Err(QuantumError::InvalidMixture(format!(
                        "factor {side} of component {i} is not positive"
                    )));
                }
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(QuantumError::InvalidMixture(format!("weights sum to {total}")));
        }
        Ok(SeparableMixture { components })
    }

    /// Random mixture: Bloch-ball factors with weights on the simplex.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, components: usize) -> Self {
        let n = components.max(1);
        let mut raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        for w in raw.iter_mut() {
            *w /= total;
        }
        let bloch = |rng: &mut R| {
            let dir = UnitVector3::random(rng);
            let radius: f64 = rng.random_range(0.0..=1.0);
            let [x, y, z] = dir.components();
            // ρ = (I + r·σ)/2
            CMat::from_rows(&[
                &[cr((1.0 + radius * z) / 2.0), c(radius * x / 2.0, -radius * y / 2.0)],
                &[c(radius * x / 2.0, radius * y / 2.0), cr((1.0 - radius * z) / 2.0)],
            ])
        };
        let components = raw.into_iter().map(|w| (w, bloch(rng), bloch(rng))).collect();
        SeparableMixture { components }
    }

    pub fn density(&self) -> QuantumState {
        let mut rho = CMat::zeros(4);
        for (w, rho1, rho2) in &self.components {
            rho = rho + rho1.kron(rho2).scale(cr(*w));
        }
        QuantumState::Density(rho)
    }
}

/// Canonical CHSH value of a separable mixture under spin settings; the
/// separable bound |S| ≤ 2 is a theorem for every valid mixture.
pub fn separable_chsh(
    mixture: &SeparableMixture,
    a: &UnitVector3,
    ap: &UnitVector3,
    b: &UnitVector3,
    bp: &UnitVector3,
) -> Result<f64> {
    let state = mixture.density();
    let qc = correlation_set_quantum(&state, a, ap, b, bp)?;
    Ok(qc.set.chsh_f64(SignVariant::CANONICAL))
}

/// The settings that maximise the canonical CHSH value on the singlet:
/// orthogonal b, b′ with a = (b′−b)/√2 and a′ = −(b+b′)/√2, giving
/// expectations (1/√2, −1/√2, 1/√2, 1/√2) and S = 2√2. (The same geometry
/// with a′ negated saturates the |E(AB)−E(AB′)| + |E(A′B)+E(A′B′)| block
/// form instead; the operator norm is 2√2 either way.)
pub fn maximal_violation_settings() -> (UnitVector3, UnitVector3, UnitVector3, UnitVector3) {
    let b = UnitVector3::x_axis();
    let bp = UnitVector3::y_axis();
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let a = UnitVector3::new(-inv, inv, 0.0).expect("unit");
    let ap = UnitVector3::new(-inv, -inv, 0.0).expect("unit");
    (a, ap, b, bp)
}
