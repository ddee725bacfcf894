//! Closed-form dressed states of each atom-mode pair and the exact evolution
//! of `|ψ_α⟩ = (|Φ1⟩ + |Φ2⟩)/√2` inside the one-excitation space.
//!
//! Dressed level `n` of subsystem `j` lives in the doublet `{|n;+⟩, |n+1;−⟩}`
//! of excitation number `n + 1`. Its splitting is
//! `q_n = √(ε²/4 + (n+1)λ²)` and its energies are `(1+ε)(n+1)E ± q_n E`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::model::{
    AtomState, CVector, LocalState, StateVector, Subsystem, SubsystemParams, SystemParams,
};
use crate::{Error, Result};

/// Which photon count enters the splitting `q` of dressed level `n`.
///
/// `Shifted` is the physically correct choice (`n + 1`, the excitation
/// number of the doublet). `Printed` uses `n` and exists only so the
/// verification suite can show that the oracle rejects it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QIndex {
    #[default]
    Shifted,
    Printed,
}

/// Splitting `√(ε²/4 + (n+1)λ²)` of dressed level `n`.
pub fn q_split(n: usize, epsilon: f64, lambda: f64) -> f64 {
    q_split_with(n, epsilon, lambda, QIndex::Shifted)
}

pub fn q_split_with(n: usize, epsilon: f64, lambda: f64, convention: QIndex) -> f64 {
    let photons = match convention {
        QIndex::Shifted => n + 1,
        QIndex::Printed => n,
    };
    (0.25 * epsilon * epsilon + photons as f64 * lambda * lambda).sqrt()
}

/// `λ/|λ|`, taken as +1 at λ = 0 so the angle stays on the unit circle.
fn coupling_sign(lambda: f64) -> f64 {
    if lambda < 0.0 {
        -1.0
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingAngle {
    pub cos: f64,
    pub sin: f64,
}

impl MixingAngle {
    /// `sin 2θ`.
    pub fn sin2(&self) -> f64 {
        2.0 * self.sin * self.cos
    }

    /// `cos 2θ`.
    pub fn cos2(&self) -> f64 {
        self.cos * self.cos - self.sin * self.sin
    }
}

/// `cos θ = √((q+ε/2)/2q)`, `sin θ = sgn(λ)√((q−ε/2)/2q)` with `q = q_split(n)`.
pub fn mixing_angle(n: usize, epsilon: f64, lambda: f64) -> Result<MixingAngle> {
    mixing_angle_with(n, epsilon, lambda, QIndex::Shifted)
}

pub fn mixing_angle_with(
    n: usize,
    epsilon: f64,
    lambda: f64,
    convention: QIndex,
) -> Result<MixingAngle> {
    let q = q_split_with(n, epsilon, lambda, convention);
    if q == 0.0 {
        return Err(Error::DegenerateLevel);
    }
    let half = 0.5 * epsilon;
    // clamp guards the radicands against rounding just below zero at |ε|/2 = q
    let cos = ((q + half) / (2.0 * q)).max(0.0).sqrt();
    let sin = coupling_sign(lambda) * ((q - half) / (2.0 * q)).max(0.0).sqrt();
    Ok(MixingAngle { cos, sin })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sign::Minus => f.write_str("-"),
            Sign::Plus => f.write_str("+"),
        }
    }
}

/// A dressed eigenpair of one atom-mode pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedLevel {
    pub n: usize,
    pub sign: Sign,
    pub subsystem: Subsystem,
    pub energy: f64,
    pub cos_theta: f64,
    pub sin_theta: f64,
    pub state: LocalState,
}

impl DressedLevel {
    /// This level tensored with the other subsystem's ground state, and the
    /// total energy of that product eigenstate.
    pub fn with_partner_ground(&self, params: &SystemParams) -> Result<(StateVector, f64)> {
        let (ground, ground_energy) =
            ground_level(self.subsystem.other(), params, self.state.n_max)?;
        let state = match self.subsystem {
            Subsystem::A => StateVector::product(&self.state, &ground)?,
            Subsystem::B => StateVector::product(&ground, &self.state)?,
        };
        Ok((state, self.energy + ground_energy))
    }
}

/// `|ψ_n^−⟩ = cos θ|n;+⟩ − sin θ|n+1;−⟩` or `|ψ_n^+⟩ = sin θ|n;+⟩ + cos θ|n+1;−⟩`.
pub fn dressed_state(
    n: usize,
    sign: Sign,
    subsystem: Subsystem,
    params: &SystemParams,
    n_max: usize,
) -> Result<DressedLevel> {
    dressed_state_with(n, sign, subsystem, params, n_max, QIndex::Shifted)
}

pub fn dressed_state_with(
    n: usize,
    sign: Sign,
    subsystem: Subsystem,
    params: &SystemParams,
    n_max: usize,
    convention: QIndex,
) -> Result<DressedLevel> {
    if n + 1 > n_max {
        return Err(Error::Truncation {
            required: n + 1,
            n_max,
        });
    }
    let p = params.get(subsystem);
    p.validate()?;
    let (eps, lam) = (p.epsilon(), p.lambda());
    let angle = mixing_angle_with(n, eps, lam, convention)?;
    let q = q_split_with(n, eps, lam, convention);
    let centre = (1.0 + eps) * (n + 1) as f64 * p.e_atom;
    let energy = centre + sign.factor() * q * p.e_atom;
    let state = match sign {
        Sign::Minus => LocalState::doublet(n, angle.cos, -angle.sin, n_max)?,
        Sign::Plus => LocalState::doublet(n, angle.sin, angle.cos, n_max)?,
    };
    Ok(DressedLevel {
        n,
        sign,
        subsystem,
        energy,
        cos_theta: angle.cos,
        sin_theta: angle.sin,
        state,
    })
}

/// `|0;−⟩_j` with energy `ε_j E_j / 2`.
pub fn ground_level(
    subsystem: Subsystem,
    params: &SystemParams,
    n_max: usize,
) -> Result<(LocalState, f64)> {
    let p = params.get(subsystem);
    let state = LocalState::basis(0, AtomState::Ground, n_max)?;
    Ok((state, 0.5 * p.epsilon() * p.e_atom))
}

fn lower_upper(p: &SubsystemParams, convention: QIndex) -> (f64, f64) {
    let (eps, lam) = (p.epsilon(), p.lambda());
    let centre = (1.0 + eps) * p.e_atom;
    let q = q_split_with(0, eps, lam, convention);
    (centre - q * p.e_atom, centre + q * p.e_atom)
}

/// Energies of `|ψ1⟩..|ψ4⟩`:
/// `E1 = E_G,A + E_0B^−`, `E2 = E_G,B + E_0A^−`, `E3 = E_G,A + E_0B^+`, `E4 = E_G,B + E_0A^+`.
pub fn four_state_energies(params: &SystemParams) -> [f64; 4] {
    four_state_energies_with(params, QIndex::Shifted)
}

pub fn four_state_energies_with(params: &SystemParams, convention: QIndex) -> [f64; 4] {
    let ground_a = 0.5 * params.a.epsilon() * params.a.e_atom;
    let ground_b = 0.5 * params.b.epsilon() * params.b.e_atom;
    let (lower_a, upper_a) = lower_upper(&params.a, convention);
    let (lower_b, upper_b) = lower_upper(&params.b, convention);
    [
        ground_a + lower_b,
        ground_b + lower_a,
        ground_a + upper_b,
        ground_b + upper_a,
    ]
}

/// Coefficients of `|ψ_α⟩ = (1/√2) Σ c_k |ψ_k⟩`: `(−sin θ_B, −sin θ_A, cos θ_B, cos θ_A)`.
pub fn expansion_coefficients(theta_a: MixingAngle, theta_b: MixingAngle) -> [f64; 4] {
    [-theta_b.sin, -theta_a.sin, theta_b.cos, theta_a.cos]
}

/// The stationary states `|ψ1⟩..|ψ4⟩` spanning the one-excitation space:
/// `|G⟩_A|ψ_0^−⟩_B`, `|ψ_0^−⟩_A|G⟩_B`, `|G⟩_A|ψ_0^+⟩_B`, `|ψ_0^+⟩_A|G⟩_B`.
pub fn stationary_states(params: &SystemParams, n_max: usize) -> Result<[StateVector; 4]> {
    let level = |sign, sub| dressed_state(0, sign, sub, params, n_max);
    let embed = |lvl: DressedLevel| lvl.with_partner_ground(params).map(|(s, _)| s);
    Ok([
        embed(level(Sign::Minus, Subsystem::B)?)?,
        embed(level(Sign::Minus, Subsystem::A)?)?,
        embed(level(Sign::Plus, Subsystem::B)?)?,
        embed(level(Sign::Plus, Subsystem::A)?)?,
    ])
}

/// `|ψ_α(t)⟩ = (1/√2) Σ_k c_k e^{−iE_k t} |ψ_k⟩` for arbitrary subsystem parameters.
pub fn evolve_general(t: f64, params: &SystemParams, n_max: usize) -> Result<StateVector> {
    if n_max < 1 {
        return Err(Error::Truncation { required: 1, n_max });
    }
    let theta_a = mixing_angle(0, params.a.epsilon(), params.a.lambda())?;
    let theta_b = mixing_angle(0, params.b.epsilon(), params.b.lambda())?;
    let coefficients = expansion_coefficients(theta_a, theta_b);
    let energies = four_state_energies(params);
    let states = stationary_states(params, n_max)?;

    let mut amplitudes = CVector::zeros(states[0].dim());
    for ((c, e), psi) in coefficients.iter().zip(energies).zip(&states) {
        let weight = Complex64::from_polar(FRAC_1_SQRT_2 * c, -e * t);
        amplitudes.axpy(weight, &psi.amplitudes, Complex64::new(1.0, 0.0));
    }
    Ok(StateVector { amplitudes, n_max })
}

/// Equal-subsystem evolution `|ψ_α(t)⟩ = e^{−iE′t}(F|ψ_α⟩ + G|ψ_β⟩)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionAmplitudes {
    pub t: f64,
    /// `F = cos(qEt) − i cos 2θ sin(qEt)`.
    pub f_amp: Complex64,
    /// `G = −i sin 2θ sin(qEt)`.
    pub g_amp: Complex64,
    /// `e^{−iE′t}` with `E′ = E(1 + 3ε/2)`.
    pub global_phase: Complex64,
}

impl EvolutionAmplitudes {
    pub fn to_state(&self, n_max: usize) -> Result<StateVector> {
        let f = self.global_phase * self.f_amp * FRAC_1_SQRT_2;
        let g = self.global_phase * self.g_amp * FRAC_1_SQRT_2;
        StateVector::from_phi_coefficients([f, f, g, g], n_max)
    }
}

pub fn evolve_detuned_special(t: f64, params: &SubsystemParams) -> Result<EvolutionAmplitudes> {
    params.validate()?;
    let (e, eps, lam) = (params.e_atom, params.epsilon(), params.lambda());
    let theta = mixing_angle(0, eps, lam)?;
    let q = q_split(0, eps, lam);
    let (s, c) = (q * e * t).sin_cos();
    let i = Complex64::i();
    Ok(EvolutionAmplitudes {
        t,
        f_amp: c - i * theta.cos2() * s,
        g_amp: -i * theta.sin2() * s,
        global_phase: Complex64::from_polar(1.0, -e * (1.0 + 1.5 * eps) * t),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiPair {
    /// `|ψ1⟩ + |ψ2⟩`
    Lower,
    /// `|ψ3⟩ + |ψ4⟩`
    Upper,
}

/// Coefficients of `|ψ1⟩+|ψ2⟩` (`f`) or `|ψ3⟩+|ψ4⟩` (`g`) on `|Φ1⟩..|Φ4⟩`
/// for equal subsystems.
pub fn phi_basis_expansion(which: PhiPair, theta: MixingAngle) -> [f64; 4] {
    let (s, c) = (theta.sin, theta.cos);
    match which {
        PhiPair::Lower => [-s, -s, c, c],
        PhiPair::Upper => [c, c, s, s],
    }
}

/// First maximum of the atom-atom entanglement, `π/(2qE)`.
pub fn entanglement_peak_time(params: &SubsystemParams) -> Result<f64> {
    Ok(PI / (2.0 * nonzero_q(params)? * params.e_atom))
}

/// Period `2π/(qE)` of the amplitudes `F`, `G`.
pub fn revival_period(params: &SubsystemParams) -> Result<f64> {
    Ok(2.0 * PI / (nonzero_q(params)? * params.e_atom))
}

fn nonzero_q(params: &SubsystemParams) -> Result<f64> {
    let q = q_split(0, params.epsilon(), params.lambda());
    if q == 0.0 {
        Err(Error::DegenerateLevel)
    } else {
        Ok(q)
    }
}
