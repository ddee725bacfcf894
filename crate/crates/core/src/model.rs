//! Parameters, the composite basis `|n_A, s_A⟩ ⊗ |n_B, s_B⟩`, and the
//! elementary operators everything else is built from.
//!
//! Energies are in units of a caller-chosen reference energy with ħ = 1, so
//! times come out in units of ħ/E_ref.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance on the norm accepted by [`StateVector::from_amplitudes`].
const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subsystem::A => f.write_str("A"),
            Subsystem::B => f.write_str("B"),
        }
    }
}

/// Atomic level. Ground sorts before excited in the dense basis ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomState {
    Ground,
    Excited,
}

impl AtomState {
    fn offset(self) -> usize {
        match self {
            AtomState::Ground => 0,
            AtomState::Excited => 1,
        }
    }

    fn from_offset(offset: usize) -> Self {
        if offset == 0 {
            AtomState::Ground
        } else {
            AtomState::Excited
        }
    }

    /// Eigenvalue of σ_z.
    pub fn sigma_z(self) -> f64 {
        match self {
            AtomState::Ground => -1.0,
            AtomState::Excited => 1.0,
        }
    }
}

/// Physical parameters of one atom-mode pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsystemParams {
    /// Atomic level splitting E_j.
    pub e_atom: f64,
    /// Photon energy ħω_j.
    pub omega: f64,
    /// Coupling ħκ_j. The sign is physical and flows into the mixing angles.
    pub kappa: f64,
}

impl SubsystemParams {
    pub fn new(e_atom: f64, omega: f64, kappa: f64) -> Result<Self> {
        let params = Self {
            e_atom,
            omega,
            kappa,
        };
        params.validate()?;
        Ok(params)
    }

    /// Builds physical parameters from detuning `ε` and coupling ratio `λ`:
    /// `ħω = E(1 + ε)`, `ħκ = λE`.
    pub fn from_dimensionless(e_atom: f64, epsilon: f64, lambda: f64) -> Result<Self> {
        Self::new(e_atom, e_atom * (1.0 + epsilon), lambda * e_atom)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_atom.is_finite() && self.e_atom > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "atomic splitting must be positive and finite, got {}",
                self.e_atom
            )));
        }
        if !(self.omega.is_finite() && self.omega >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mode frequency must be non-negative and finite, got {}",
                self.omega
            )));
        }
        if !self.kappa.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "coupling must be finite, got {}",
                self.kappa
            )));
        }
        Ok(())
    }

    pub fn epsilon(&self) -> f64 {
        self.omega / self.e_atom - 1.0
    }

    pub fn lambda(&self) -> f64 {
        self.kappa / self.e_atom
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub a: SubsystemParams,
    pub b: SubsystemParams,
}

impl SystemParams {
    pub fn new(a: SubsystemParams, b: SubsystemParams) -> Result<Self> {
        a.validate()?;
        b.validate()?;
        Ok(Self { a, b })
    }

    /// Identical subsystems with the given atomic splitting, detuning and coupling ratio.
    pub fn symmetric(e_atom: f64, epsilon: f64, lambda: f64) -> Result<Self> {
        let sub = SubsystemParams::from_dimensionless(e_atom, epsilon, lambda)?;
        Ok(Self { a: sub, b: sub })
    }

    pub fn get(&self, sub: Subsystem) -> &SubsystemParams {
        match sub {
            Subsystem::A => &self.a,
            Subsystem::B => &self.b,
        }
    }

    /// True when both subsystems share `E`, `ω` and `κ` to within `tol`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        (self.a.e_atom - self.b.e_atom).abs() <= tol
            && (self.a.omega - self.b.omega).abs() <= tol
            && (self.a.kappa - self.b.kappa).abs() <= tol
    }

    pub fn to_dimensionless(&self) -> Result<DimensionlessParams> {
        to_dimensionless(self)
    }
}

/// Detuning `ε_j = ħω_j/E_j − 1` and coupling ratio `λ_j = ħκ_j/E_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessParams {
    pub epsilon_a: f64,
    pub epsilon_b: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
}

impl DimensionlessParams {
    pub fn epsilon(&self, sub: Subsystem) -> f64 {
        match sub {
            Subsystem::A => self.epsilon_a,
            Subsystem::B => self.epsilon_b,
        }
    }

    pub fn lambda(&self, sub: Subsystem) -> f64 {
        match sub {
            Subsystem::A => self.lambda_a,
            Subsystem::B => self.lambda_b,
        }
    }
}

pub fn to_dimensionless(params: &SystemParams) -> Result<DimensionlessParams> {
    params.a.validate()?;
    params.b.validate()?;
    Ok(DimensionlessParams {
        epsilon_a: params.a.epsilon(),
        epsilon_b: params.b.epsilon(),
        lambda_a: params.a.lambda(),
        lambda_b: params.b.lambda(),
    })
}

/// Product-basis label `|n_A, s_A⟩ ⊗ |n_B, s_B⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel {
    pub n_a: usize,
    pub s_a: AtomState,
    pub n_b: usize,
    pub s_b: AtomState,
}

impl BasisLabel {
    pub fn new(n_a: usize, s_a: AtomState, n_b: usize, s_b: AtomState) -> Self {
        Self { n_a, s_a, n_b, s_b }
    }

    /// Excitation number `n_j + (1 if excited)` of subsystem `sub`.
    pub fn excitations(&self, sub: Subsystem) -> usize {
        match sub {
            Subsystem::A => self.n_a + self.s_a.offset(),
            Subsystem::B => self.n_b + self.s_b.offset(),
        }
    }
}

/// Dense lexicographic indexing of the truncated product basis, ordered by
/// `(n_A, s_A, n_B, s_B)` with ground before excited.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Basis {
    pub n_max: usize,
}

impl Basis {
    pub fn new(n_max: usize) -> Self {
        Self { n_max }
    }

    /// Dimension `2(n_max + 1)` of one atom-mode factor.
    pub fn local_dim(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn dim(&self) -> usize {
        self.local_dim() * self.local_dim()
    }

    pub fn local_index(&self, n: usize, s: AtomState) -> Result<usize> {
        if n > self.n_max {
            return Err(Error::IndexOutOfRange {
                n,
                n_max: self.n_max,
            });
        }
        Ok(2 * n + s.offset())
    }

    pub fn index(&self, label: &BasisLabel) -> Result<usize> {
        let a = self.local_index(label.n_a, label.s_a)?;
        let b = self.local_index(label.n_b, label.s_b)?;
        Ok(a * self.local_dim() + b)
    }

    pub fn label(&self, index: usize) -> Result<BasisLabel> {
        if index >= self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: index,
            });
        }
        let (a, b) = (index / self.local_dim(), index % self.local_dim());
        Ok(BasisLabel {
            n_a: a / 2,
            s_a: AtomState::from_offset(a % 2),
            n_b: b / 2,
            s_b: AtomState::from_offset(b % 2),
        })
    }

    pub fn labels(&self) -> impl Iterator<Item = BasisLabel> + '_ {
        (0..self.dim()).map(move |i| self.label(i).expect("index below dim"))
    }
}

pub fn basis_index(label: &BasisLabel, n_max: usize) -> Result<usize> {
    Basis::new(n_max).index(label)
}

/// Amplitudes over a single atom-mode factor, indexed by `2n + s`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalState {
    pub amplitudes: CVector,
    pub n_max: usize,
}

impl LocalState {
    pub fn basis(n: usize, s: AtomState, n_max: usize) -> Result<Self> {
        let basis = Basis::new(n_max);
        let mut amplitudes = CVector::zeros(basis.local_dim());
        amplitudes[basis.local_index(n, s)?] = ONE;
        Ok(Self { amplitudes, n_max })
    }

    /// `c_plus |n; +⟩ + c_minus |n+1; −⟩`.
    pub fn doublet(n: usize, c_plus: f64, c_minus: f64, n_max: usize) -> Result<Self> {
        if n + 1 > n_max {
            return Err(Error::Truncation {
                required: n + 1,
                n_max,
            });
        }
        let basis = Basis::new(n_max);
        let mut amplitudes = CVector::zeros(basis.local_dim());
        amplitudes[basis.local_index(n, AtomState::Excited)?] = c_plus.into();
        amplitudes[basis.local_index(n + 1, AtomState::Ground)?] = c_minus.into();
        Ok(Self { amplitudes, n_max })
    }

    pub fn amplitude(&self, n: usize, s: AtomState) -> Complex64 {
        match Basis::new(self.n_max).local_index(n, s) {
            Ok(i) => self.amplitudes[i],
            Err(_) => ZERO,
        }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &LocalState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// Normalized pure state on the composite basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: CVector,
    pub n_max: usize,
}

impl StateVector {
    /// Accepts amplitudes whose norm is within 1e-9 of one and rescales them to unit norm.
    pub fn from_amplitudes(amplitudes: CVector, n_max: usize) -> Result<Self> {
        let basis = Basis::new(n_max);
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
            n_max,
        })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(amplitudes: CVector, n_max: usize) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Self::from_amplitudes(amplitudes.unscale(norm), n_max)
    }

    pub fn basis_state(label: &BasisLabel, n_max: usize) -> Result<Self> {
        let basis = Basis::new(n_max);
        let mut amplitudes = CVector::zeros(basis.dim());
        amplitudes[basis.index(label)?] = ONE;
        Ok(Self { amplitudes, n_max })
    }

    /// Tensor product `|a⟩ ⊗ |b⟩` of two single-subsystem states.
    pub fn product(a: &LocalState, b: &LocalState) -> Result<Self> {
        if a.n_max != b.n_max {
            return Err(Error::DimensionMismatch {
                expected: a.n_max,
                found: b.n_max,
            });
        }
        let amplitudes = a.amplitudes.kronecker(&b.amplitudes);
        Self::normalized(amplitudes, a.n_max)
    }

    /// The overall ground state `|0;−⟩_A |0;−⟩_B`.
    pub fn ground(n_max: usize) -> Result<Self> {
        Self::basis_state(
            &BasisLabel::new(0, AtomState::Ground, 0, AtomState::Ground),
            n_max,
        )
    }

    /// One of the four one-excitation states `|Φ1⟩..|Φ4⟩`, `k ∈ 1..=4`.
    pub fn phi(k: usize, n_max: usize) -> Result<Self> {
        Self::basis_state(&phi_label(k)?, n_max)
    }

    /// `(|Φ1⟩ + |Φ2⟩)/√2`: one photon shared between the modes, both atoms in the ground state.
    pub fn psi_alpha(n_max: usize) -> Result<Self> {
        Self::phi_pair(1, 2, n_max)
    }

    /// `(|Φ3⟩ + |Φ4⟩)/√2`: atoms in the symmetric single-excitation state, modes empty.
    pub fn psi_beta(n_max: usize) -> Result<Self> {
        Self::phi_pair(3, 4, n_max)
    }

    fn phi_pair(i: usize, j: usize, n_max: usize) -> Result<Self> {
        let sum = Self::phi(i, n_max)?.amplitudes + Self::phi(j, n_max)?.amplitudes;
        Self::normalized(sum, n_max)
    }

    /// Builds `Σ_k c_k |Φ_k⟩` from complex coefficients on `Φ1..Φ4`.
    pub fn from_phi_coefficients(coefficients: [Complex64; 4], n_max: usize) -> Result<Self> {
        let basis = Basis::new(n_max);
        let mut amplitudes = CVector::zeros(basis.dim());
        for (k, c) in coefficients.iter().enumerate() {
            amplitudes[basis.index(&phi_label(k + 1)?)?] += *c;
        }
        Self::from_amplitudes(amplitudes, n_max)
    }

    pub fn basis(&self) -> Basis {
        Basis::new(self.n_max)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitude(&self, label: &BasisLabel) -> Complex64 {
        match self.basis().index(label) {
            Ok(i) => self.amplitudes[i],
            Err(_) => ZERO,
        }
    }

    /// Amplitudes on `|Φ1⟩..|Φ4⟩`.
    pub fn phi_amplitudes(&self) -> [Complex64; 4] {
        let mut out = [ZERO; 4];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.amplitude(&phi_label(k + 1).expect("k in 1..=4"));
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_pure(self)
    }
}

/// Labels of the four one-excitation product states.
pub fn phi_label(k: usize) -> Result<BasisLabel> {
    use AtomState::{Excited, Ground};
    match k {
        1 => Ok(BasisLabel::new(0, Ground, 1, Ground)),
        2 => Ok(BasisLabel::new(1, Ground, 0, Ground)),
        3 => Ok(BasisLabel::new(0, Excited, 0, Ground)),
        4 => Ok(BasisLabel::new(0, Ground, 0, Excited)),
        _ => Err(Error::InvalidParameter(format!(
            "Φ index must be 1..=4, got {k}"
        ))),
    }
}

/// Hermitian, unit-trace, positive semidefinite operator on a tensor product
/// space. `dims` lists the factor dimensions in index order (most significant first).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    pub entries: CMatrix,
    pub dims: Vec<usize>,
}

impl DensityOperator {
    pub fn from_pure(state: &StateVector) -> Self {
        let local = Basis::new(state.n_max).local_dim() / 2;
        Self {
            entries: &state.amplitudes * state.amplitudes.adjoint(),
            dims: vec![local, 2, local, 2],
        }
    }

    pub fn from_matrix(entries: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let expected: usize = dims.iter().product();
        if entries.nrows() != entries.ncols() || entries.nrows() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: entries.nrows(),
            });
        }
        Ok(Self { entries, dims })
    }

    /// Full-system density operator with the composite-basis factor layout.
    pub fn composite(entries: CMatrix, n_max: usize) -> Result<Self> {
        Self::from_matrix(entries, vec![n_max + 1, 2, n_max + 1, 2])
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.entries)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.entries + self.entries.adjoint()).scale(0.5);
        let mut values: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// `tr(ρ O)`, real part.
    pub fn expectation(&self, op: &MatrixOperator) -> Result<f64> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.dim(),
            });
        }
        Ok((&self.entries * &op.entries).trace().re)
    }

    /// `Σ_ij |ρ_ij − σ_ij|` maximum entry difference.
    pub fn max_abs_diff(&self, other: &DensityOperator) -> f64 {
        max_abs(&(&self.entries - &other.entries))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// Photon annihilation `a_j`.
    Annihilation,
    /// Photon creation `a_j†`.
    Creation,
    /// Photon number `N_j = a_j† a_j`.
    Number,
    /// `σ_+j = |+⟩⟨−|`.
    SigmaPlus,
    /// `σ_−j = |−⟩⟨+|`.
    SigmaMinus,
    /// `σ_zj = |+⟩⟨+| − |−⟩⟨−|`.
    SigmaZ,
    /// Excitation number `a_j† a_j + σ_zj/2 + 1/2`, conserved by `H_j`.
    Excitation,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 7] = [
        OperatorKind::Annihilation,
        OperatorKind::Creation,
        OperatorKind::Number,
        OperatorKind::SigmaPlus,
        OperatorKind::SigmaMinus,
        OperatorKind::SigmaZ,
        OperatorKind::Excitation,
    ];
}

/// Dense operator on the composite basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixOperator {
    pub entries: CMatrix,
    pub n_max: usize,
}

impl MatrixOperator {
    pub fn identity(n_max: usize) -> Self {
        let dim = Basis::new(n_max).dim();
        Self {
            entries: CMatrix::identity(dim, dim),
            n_max,
        }
    }

    pub fn zeros(n_max: usize) -> Self {
        let dim = Basis::new(n_max).dim();
        Self {
            entries: CMatrix::zeros(dim, dim),
            n_max,
        }
    }

    pub fn from_matrix(entries: CMatrix, n_max: usize) -> Result<Self> {
        let dim = Basis::new(n_max).dim();
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: entries.nrows(),
            });
        }
        Ok(Self { entries, n_max })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn dagger(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
            n_max: self.n_max,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            entries: self.entries.scale(factor),
            n_max: self.n_max,
        }
    }

    pub fn commutator(&self, other: &MatrixOperator) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self {
            entries: &self.entries * &other.entries - &other.entries * &self.entries,
            n_max: self.n_max,
        })
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.entries)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.entries)
    }

    pub fn element(&self, row: &BasisLabel, col: &BasisLabel) -> Result<Complex64> {
        let basis = Basis::new(self.n_max);
        Ok(self.entries[(basis.index(row)?, basis.index(col)?)])
    }

    /// `O|ψ⟩`, not renormalized.
    pub fn apply(&self, state: &StateVector) -> Result<CVector> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        Ok(&self.entries * &state.amplitudes)
    }

    fn check_same_space(&self, other: &MatrixOperator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl Add for &MatrixOperator {
    type Output = MatrixOperator;

    fn add(self, rhs: &MatrixOperator) -> MatrixOperator {
        assert_eq!(
            self.n_max, rhs.n_max,
            "operators live on different truncations"
        );
        MatrixOperator {
            entries: &self.entries + &rhs.entries,
            n_max: self.n_max,
        }
    }
}

impl Sub for &MatrixOperator {
    type Output = MatrixOperator;

    fn sub(self, rhs: &MatrixOperator) -> MatrixOperator {
        assert_eq!(
            self.n_max, rhs.n_max,
            "operators live on different truncations"
        );
        MatrixOperator {
            entries: &self.entries - &rhs.entries,
            n_max: self.n_max,
        }
    }
}

impl Mul for &MatrixOperator {
    type Output = MatrixOperator;

    fn mul(self, rhs: &MatrixOperator) -> MatrixOperator {
        assert_eq!(
            self.n_max, rhs.n_max,
            "operators live on different truncations"
        );
        MatrixOperator {
            entries: &self.entries * &rhs.entries,
            n_max: self.n_max,
        }
    }
}

fn local_operator(kind: OperatorKind, n_max: usize) -> CMatrix {
    let basis = Basis::new(n_max);
    let dim = basis.local_dim();
    let idx = |n: usize, s: AtomState| 2 * n + s.offset();
    let mut m = CMatrix::zeros(dim, dim);
    for n in 0..=n_max {
        for s in [AtomState::Ground, AtomState::Excited] {
            let col = idx(n, s);
            match kind {
                OperatorKind::Annihilation => {
                    if n > 0 {
                        m[(idx(n - 1, s), col)] = (n as f64).sqrt().into();
                    }
                }
                OperatorKind::Creation => {
                    if n < n_max {
                        m[(idx(n + 1, s), col)] = ((n + 1) as f64).sqrt().into();
                    }
                }
                OperatorKind::Number => m[(col, col)] = (n as f64).into(),
                OperatorKind::SigmaPlus => {
                    if s == AtomState::Ground {
                        m[(idx(n, AtomState::Excited), col)] = ONE;
                    }
                }
                OperatorKind::SigmaMinus => {
                    if s == AtomState::Excited {
                        m[(idx(n, AtomState::Ground), col)] = ONE;
                    }
                }
                OperatorKind::SigmaZ => m[(col, col)] = s.sigma_z().into(),
                OperatorKind::Excitation => {
                    m[(col, col)] = (n as f64 + 0.5 * s.sigma_z() + 0.5).into()
                }
            }
        }
    }
    m
}

/// Embeds a single-subsystem operator into the composite space, acting as
/// the identity on the other factor.
pub fn build_operator(kind: OperatorKind, sub: Subsystem, n_max: usize) -> Result<MatrixOperator> {
    if n_max < 1 {
        return Err(Error::Truncation { required: 1, n_max });
    }
    let local = local_operator(kind, n_max);
    let id = CMatrix::identity(local.nrows(), local.ncols());
    let entries = match sub {
        Subsystem::A => local.kronecker(&id),
        Subsystem::B => id.kronecker(&local),
    };
    Ok(MatrixOperator { entries, n_max })
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}
