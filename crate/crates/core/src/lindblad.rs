//! Cavity-loss master equation
//!
//! ```text
//! dρ/dt = −i[H, ρ] + Σ_j γ_j (a_j ρ a_j† − ½ a_j†a_j ρ − ½ ρ a_j†a_j)
//! ```
//!
//! on the joint two-atom, two-mode density operator, integrated with fixed-step RK4.

use log::warn;
use num_complex::Complex64;

use crate::model::{
    build_operator, CMatrix, DensityOperator, MatrixOperator, OperatorKind, Subsystem,
};
use crate::oracle::eigendecompose;
use crate::{Error, Result};

/// A step is flagged when `dt · max|E_k|` exceeds this.
pub const STEP_WARNING: f64 = 0.1;
/// Integration aborts once `|tr ρ − 1|` exceeds this.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipationConfig {
    /// Photon loss rate of mode A.
    pub gamma_a: f64,
    /// Photon loss rate of mode B.
    pub gamma_b: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Keep every `record_every`-th step in the trajectory (the endpoint is always kept).
    pub record_every: usize,
}

impl DissipationConfig {
    /// Both modes lose photons at the same rate `gamma`.
    pub fn new(gamma: f64, dt: f64, t_end: f64) -> Result<Self> {
        Self::with_rates(gamma, gamma, dt, t_end)
    }

    pub fn with_rates(gamma_a: f64, gamma_b: f64, dt: f64, t_end: f64) -> Result<Self> {
        let cfg = Self {
            gamma_a,
            gamma_b,
            dt,
            t_end,
            record_every: 1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn recording_every(mut self, steps: usize) -> Self {
        self.record_every = steps.max(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, g) in [("gamma_a", self.gamma_a), ("gamma_b", self.gamma_b)] {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be >= 0, got {g}"
                )));
            }
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be >= 0, got {}",
                self.t_end
            )));
        }
        Ok(())
    }
}

fn check_dims(rho: &DensityOperator, h: &MatrixOperator) -> Result<()> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

/// Right-hand side of the master equation with a common rate `gamma` on every loss operator.
pub fn lindblad_rhs(
    rho: &DensityOperator,
    h: &MatrixOperator,
    loss_ops: &[MatrixOperator],
    gamma: f64,
) -> Result<DensityOperator> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be >= 0, got {gamma}"
        )));
    }
    check_dims(rho, h)?;
    let r = &rho.entries;
    let minus_i = Complex64::new(0.0, -1.0);
    let mut out = (&h.entries * r - r * &h.entries) * minus_i;
    for a in loss_ops {
        check_dims(rho, a)?;
        let a_dag = a.entries.adjoint();
        let number = &a_dag * &a.entries;
        let jump = &a.entries * r * &a_dag;
        let anti = (&number * r + r * &number).scale(0.5);
        out += (jump - anti).scale(gamma);
    }
    DensityOperator::from_matrix(out, rho.dims.clone())
}

/// Precomputed generator `L(ρ) = −i(H_eff ρ − ρ H_eff†) + Σ γ a ρ a†` with
/// `H_eff = H − (i/2) Σ γ a†a`.
struct Generator {
    h_eff: CMatrix,
    h_eff_dag: CMatrix,
    jumps: Vec<(CMatrix, CMatrix)>,
}

impl Generator {
    fn new(h: &MatrixOperator, channels: &[(MatrixOperator, f64)]) -> Self {
        let mut h_eff = h.entries.clone();
        let mut jumps = Vec::new();
        for (op, rate) in channels {
            if *rate == 0.0 {
                continue;
            }
            let a_dag = op.entries.adjoint();
            h_eff -= (&a_dag * &op.entries) * Complex64::new(0.0, 0.5 * rate);
            jumps.push((op.entries.scale(rate.sqrt()), a_dag.scale(rate.sqrt())));
        }
        let h_eff_dag = h_eff.adjoint();
        Self {
            h_eff,
            h_eff_dag,
            jumps,
        }
    }

    fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = (&self.h_eff * rho - rho * &self.h_eff_dag) * Complex64::new(0.0, -1.0);
        for (a, a_dag) in &self.jumps {
            out += a * rho * a_dag;
        }
        out
    }

    fn rk4_step(&self, rho: &CMatrix, dt: f64) -> CMatrix {
        let half = Complex64::from(0.5 * dt);
        let full = Complex64::from(dt);
        let k1 = self.apply(rho);
        let k2 = self.apply(&(rho + &k1 * half));
        let k3 = self.apply(&(rho + &k2 * half));
        let k4 = self.apply(&(rho + &k3 * full));
        rho + (k1 + (k2 + k3) * Complex64::from(2.0) + k4) * Complex64::from(dt / 6.0)
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub rho: DensityOperator,
}

/// Photon annihilation operators of both modes paired with their loss rates.
pub fn cavity_loss_channels(
    n_max: usize,
    config: &DissipationConfig,
) -> Result<Vec<(MatrixOperator, f64)>> {
    Ok(vec![
        (
            build_operator(OperatorKind::Annihilation, Subsystem::A, n_max)?,
            config.gamma_a,
        ),
        (
            build_operator(OperatorKind::Annihilation, Subsystem::B, n_max)?,
            config.gamma_b,
        ),
    ])
}

/// Fixed-step RK4 from `rho0` to `config.t_end`. The first snapshot is `rho0` at t = 0.
pub fn integrate(
    rho0: &DensityOperator,
    h: &MatrixOperator,
    config: &DissipationConfig,
) -> Result<Vec<Snapshot>> {
    config.validate()?;
    check_dims(rho0, h)?;
    let trace0 = rho0.trace();
    if (trace0.re - 1.0).abs() > 1e-9 || trace0.im.abs() > 1e-9 {
        return Err(Error::NotNormalized {
            norm: trace0.norm(),
        });
    }
    let defect = rho0.hermiticity_defect();
    if defect > 1e-9 {
        return Err(Error::NotHermitian { defect });
    }

    let spectrum = eigendecompose(h)?;
    let max_energy = spectrum
        .eigenvalues
        .iter()
        .map(|e| e.abs())
        .fold(0.0, f64::max);
    if config.dt * max_energy > STEP_WARNING {
        warn!(
            "dt * max|E| = {:.3} exceeds {STEP_WARNING}; RK4 accuracy may suffer",
            config.dt * max_energy
        );
    }

    let generator = Generator::new(h, &cavity_loss_channels(h.n_max, config)?);
    let steps = (config.t_end / config.dt - 1e-9).ceil().max(0.0) as usize;

    let mut trajectory = vec![Snapshot {
        t: 0.0,
        rho: rho0.clone(),
    }];
    let mut rho = rho0.entries.clone();
    for step in 1..=steps {
        let t_prev = (step - 1) as f64 * config.dt;
        let t = (step as f64 * config.dt).min(config.t_end);
        rho = generator.rk4_step(&rho, t - t_prev);

        let drift = (rho.trace() - Complex64::from(1.0)).norm();
        if drift.is_nan() || drift > TRACE_DRIFT_LIMIT {
            return Err(Error::TraceDrift { drift, t });
        }
        if step % config.record_every == 0 || step == steps {
            trajectory.push(Snapshot {
                t,
                rho: DensityOperator::from_matrix(rho.clone(), rho0.dims.clone())?,
            });
        }
    }
    Ok(trajectory)
}
