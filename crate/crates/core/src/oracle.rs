//! Brute-force ground truth on the truncated Fock space: build the full
//! Hamiltonian matrix, diagonalize it and evolve exactly. Nothing here uses
//! the closed-form dressed states.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::model::{
    build_operator, max_abs, CMatrix, CVector, DimensionlessParams, MatrixOperator, OperatorKind,
    StateVector, Subsystem, SystemParams,
};
use crate::{Error, Result};

/// Inputs above this Hermiticity defect are rejected by [`eigendecompose`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// `ω(N + 1/2) + (E/2)σ_z + κ(a†σ_− + aσ_+)` for one subsystem, embedded.
fn subsystem_hamiltonian(
    sub: Subsystem,
    photon_energy: f64,
    splitting: f64,
    coupling: f64,
    n_max: usize,
) -> Result<MatrixOperator> {
    let op = |kind| build_operator(kind, sub, n_max);
    let number = op(OperatorKind::Number)?;
    let sigma_z = op(OperatorKind::SigmaZ)?;
    let a = op(OperatorKind::Annihilation)?;
    let a_dag = op(OperatorKind::Creation)?;
    let sigma_plus = op(OperatorKind::SigmaPlus)?;
    let sigma_minus = op(OperatorKind::SigmaMinus)?;

    let half_identity = MatrixOperator::identity(n_max).scale(0.5);
    let field = (&number + &half_identity).scale(photon_energy);
    let atom = sigma_z.scale(0.5 * splitting);
    let exchange = (&(&a_dag * &sigma_minus) + &(&a * &sigma_plus)).scale(coupling);
    Ok(&(&field + &atom) + &exchange)
}

/// `H = H_A + H_B` from the physical parameters `(E_j, ħω_j, ħκ_j)`.
pub fn build_hamiltonian(params: &SystemParams, n_max: usize) -> Result<MatrixOperator> {
    if n_max < 1 {
        return Err(Error::InvalidParameter(format!(
            "truncation must be at least 1, got {n_max}"
        )));
    }
    params.a.validate()?;
    params.b.validate()?;
    let h_a = subsystem_hamiltonian(
        Subsystem::A,
        params.a.omega,
        params.a.e_atom,
        params.a.kappa,
        n_max,
    )?;
    let h_b = subsystem_hamiltonian(
        Subsystem::B,
        params.b.omega,
        params.b.e_atom,
        params.b.kappa,
        n_max,
    )?;
    Ok(&h_a + &h_b)
}

/// Same Hamiltonian written as `H_j = (1+ε_j)E_j(N_j + 1/2) + E_jσ_zj/2 + λ_jE_j(a_j†σ_−j + a_jσ_+j)`.
pub fn build_hamiltonian_dimensionless(
    e_atom_a: f64,
    e_atom_b: f64,
    dims: &DimensionlessParams,
    n_max: usize,
) -> Result<MatrixOperator> {
    if n_max < 1 {
        return Err(Error::InvalidParameter(format!(
            "truncation must be at least 1, got {n_max}"
        )));
    }
    for e in [e_atom_a, e_atom_b] {
        if !(e.is_finite() && e > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "atomic splitting must be positive and finite, got {e}"
            )));
        }
    }
    let h_a = subsystem_hamiltonian(
        Subsystem::A,
        (1.0 + dims.epsilon_a) * e_atom_a,
        e_atom_a,
        dims.lambda_a * e_atom_a,
        n_max,
    )?;
    let h_b = subsystem_hamiltonian(
        Subsystem::B,
        (1.0 + dims.epsilon_b) * e_atom_b,
        e_atom_b,
        dims.lambda_b * e_atom_b,
        n_max,
    )?;
    Ok(&h_a + &h_b)
}

/// Eigenpairs of a Hermitian operator, eigenvalues ascending and column `k`
/// of `eigenvectors` belonging to `eigenvalues[k]`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
    pub n_max: usize,
}

pub fn eigendecompose(h: &MatrixOperator) -> Result<Spectrum> {
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian { defect });
    }
    // symmetrize so rounding-level anti-Hermitian noise never reaches the solver
    let herm = (&h.entries + h.entries.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(herm);

    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let dim = h.dim();
    let mut eigenvectors = CMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(Spectrum {
        eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        eigenvectors,
        n_max: h.n_max,
    })
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest entry of `H V − V diag(E)`.
    pub fn residual(&self, h: &MatrixOperator) -> f64 {
        let mut scaled = self.eigenvectors.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= Complex64::from(self.eigenvalues[k]);
        }
        max_abs(&(&h.entries * &self.eigenvectors - scaled))
    }

    /// Largest entry of `V†V − I`.
    pub fn unitarity_defect(&self) -> f64 {
        let gram = self.eigenvectors.adjoint() * &self.eigenvectors;
        max_abs(&(gram - CMatrix::identity(self.dim(), self.dim())))
    }

    /// Index and distance of the eigenvalue closest to `energy`.
    pub fn nearest(&self, energy: f64) -> (usize, f64) {
        self.eigenvalues
            .iter()
            .enumerate()
            .map(|(k, e)| (k, (e - energy).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("spectrum is never empty")
    }

    /// Indices of all eigenvalues within `tol` of `energy`.
    pub fn eigenspace(&self, energy: f64, tol: f64) -> Vec<usize> {
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, e)| (*e - energy).abs() <= tol)
            .map(|(k, _)| k)
            .collect()
    }

    /// Norm of the projection of `state` onto the span of the given eigenvectors.
    pub fn projection_norm(&self, state: &StateVector, indices: &[usize]) -> f64 {
        indices
            .iter()
            .map(|&k| {
                self.eigenvectors
                    .column(k)
                    .dotc(&state.amplitudes)
                    .norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `Σ_k ⟨v_k|ψ⟩ e^{−iE_k t} v_k`.
    pub fn evolve(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        let mut coefficients: CVector = self.eigenvectors.ad_mul(&state.amplitudes);
        for (c, e) in coefficients.iter_mut().zip(&self.eigenvalues) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        Ok(StateVector {
            amplitudes: &self.eigenvectors * coefficients,
            n_max: state.n_max,
        })
    }
}

/// Exact propagation `e^{−iHt}|ψ₀⟩` through the eigendecomposition of `h`.
pub fn evolve_exact(state0: &StateVector, h: &MatrixOperator, t: f64) -> Result<StateVector> {
    eigendecompose(h)?.evolve(state0, t)
}

/// Max-entry norm of `[H, O]`.
pub fn check_conserved(h: &MatrixOperator, op: &MatrixOperator) -> Result<f64> {
    Ok(h.commutator(op)?.max_abs())
}
