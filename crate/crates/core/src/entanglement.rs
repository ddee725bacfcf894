//! Entanglement measures and timing extraction.
//!
//! The composite space factors as `mode A ⊗ atom A ⊗ mode B ⊗ atom B`, in
//! that index order. Atom-atom entanglement is graded by the Wootters
//! concurrence of the two-qubit reduced state; bipartite entropies are in bits.

use nalgebra::SVD;
use num_complex::Complex64;

use crate::model::{AtomState, CMatrix, DensityOperator, StateVector};
use crate::{Error, Result};

/// Reduced-state eigenvalues at or below this are treated as exact zeros.
pub const RANK_CUTOFF: f64 = 1e-12;

/// Purity below `1 - PURITY_TOLERANCE` marks an input as mixed.
const PURITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Factor {
    ModeA,
    AtomA,
    ModeB,
    AtomB,
}

impl Factor {
    pub const ALL: [Factor; 4] = [Factor::ModeA, Factor::AtomA, Factor::ModeB, Factor::AtomB];

    fn position(self) -> usize {
        self as usize
    }
}

/// The tensor factors kept by a partial trace. Always a non-empty proper subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bipartition {
    kept: [bool; 4],
}

impl Bipartition {
    pub fn new(kept: &[Factor]) -> Result<Self> {
        let mut mask = [false; 4];
        for f in kept {
            mask[f.position()] = true;
        }
        let count = mask.iter().filter(|k| **k).count();
        if count == 0 || count == 4 {
            return Err(Error::InvalidBipartition);
        }
        Ok(Self { kept: mask })
    }

    /// Both atoms; the photon modes are traced out.
    pub fn atoms() -> Self {
        Self::new(&[Factor::AtomA, Factor::AtomB]).expect("proper subset")
    }

    pub fn photons() -> Self {
        Self::atoms().complement()
    }

    /// Atom A with its own mode.
    pub fn pair_a() -> Self {
        Self::new(&[Factor::ModeA, Factor::AtomA]).expect("proper subset")
    }

    pub fn pair_b() -> Self {
        Self::pair_a().complement()
    }

    pub fn complement(&self) -> Self {
        Self {
            kept: self.kept.map(|k| !k),
        }
    }

    pub fn keeps(&self, factor: Factor) -> bool {
        self.kept[factor.position()]
    }

    pub fn kept(&self) -> impl Iterator<Item = Factor> + '_ {
        Factor::ALL.into_iter().filter(|f| self.keeps(*f))
    }
}

/// Traces out every factor not kept by `keep`.
pub fn partial_trace(rho: &DensityOperator, keep: &Bipartition) -> Result<DensityOperator> {
    if rho.dims.len() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dims.len(),
        });
    }
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-9 {
        return Err(Error::NotNormalized { norm: trace.norm() });
    }

    let dims = &rho.dims;
    let kept_dims: Vec<usize> = (0..4).filter(|&i| keep.kept[i]).map(|i| dims[i]).collect();
    let kept_dim: usize = kept_dims.iter().product();
    let traced_dim = rho.dim() / kept_dim;

    // full index for every (kept, traced) pair of sub-indices
    let mut table = vec![0usize; kept_dim * traced_dim];
    for full in 0..rho.dim() {
        let mut rem = full;
        let (mut k, mut t) = (0usize, 0usize);
        let mut digits = [0usize; 4];
        for i in (0..4).rev() {
            digits[i] = rem % dims[i];
            rem /= dims[i];
        }
        for i in 0..4 {
            if keep.kept[i] {
                k = k * dims[i] + digits[i];
            } else {
                t = t * dims[i] + digits[i];
            }
        }
        table[k * traced_dim + t] = full;
    }

    let mut reduced = CMatrix::zeros(kept_dim, kept_dim);
    for r in 0..kept_dim {
        for c in 0..kept_dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..traced_dim {
                acc += rho.entries[(table[r * traced_dim + t], table[c * traced_dim + t])];
            }
            reduced[(r, c)] = acc;
        }
    }
    DensityOperator::from_matrix(reduced, kept_dims)
}

pub fn partial_trace_pure(state: &StateVector, keep: &Bipartition) -> Result<DensityOperator> {
    partial_trace(&state.density(), keep)
}

/// Eigenvalues of the Hermitian part, with anything at or below [`RANK_CUTOFF`] set to zero.
fn clamped_spectrum(rho: &DensityOperator) -> Vec<(f64, nalgebra::DVector<Complex64>)> {
    let herm = (&rho.entries + rho.entries.adjoint()).scale(0.5);
    let eig = herm.symmetric_eigen();
    eig.eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .filter(|(p, _)| **p > RANK_CUTOFF)
        .map(|(p, v)| (*p, v.into_owned()))
        .collect()
}

/// Wootters concurrence of a two-qubit state, basis order `(atom A, atom B)`.
///
/// Uses the decomposition `ρ = Σ_k w_k w_k†`; the λ_i are the singular
/// values of `τ_ij = w_iᵀ (σ_y ⊗ σ_y) w_j`, which avoids taking square roots
/// of rounding-level eigenvalues of `ρρ̃`.
pub fn concurrence(rho: &DensityOperator) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho.dim(),
        });
    }
    let components = clamped_spectrum(rho);
    if components.is_empty() {
        return Ok(0.0);
    }
    let weighted: Vec<_> = components
        .iter()
        .map(|(p, v)| v * Complex64::from(p.sqrt()))
        .collect();

    // σ_y ⊗ σ_y only reverses the basis order, with signs (−, +, +, −)
    let flip = |w: &nalgebra::DVector<Complex64>| {
        nalgebra::DVector::from_vec(vec![-w[3], w[2], w[1], -w[0]])
    };
    let r = weighted.len();
    let mut tau = CMatrix::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            tau[(i, j)] = weighted[i].dot(&flip(&weighted[j]));
        }
    }
    let mut lambdas: Vec<f64> = SVD::new(tau, false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let rest: f64 = lambdas[1..].iter().sum();
    Ok((lambdas[0] - rest).clamp(0.0, 1.0))
}

/// `−Σ p log₂ p` over the spectrum of `rho`, with `0 log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    clamped_spectrum(rho)
        .iter()
        .map(|(p, _)| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Entropy in bits of the reduced state across `cut`. Requires a pure input.
pub fn entanglement_entropy(rho: &DensityOperator, cut: &Bipartition) -> Result<f64> {
    let purity = rho.purity();
    if purity < 1.0 - PURITY_TOLERANCE {
        return Err(Error::NotPure { purity });
    }
    Ok(von_neumann_entropy(&partial_trace(rho, cut)?))
}

pub fn entanglement_entropy_pure(state: &StateVector, cut: &Bipartition) -> Result<f64> {
    entanglement_entropy(&state.density(), cut)
}

/// Probability that both atoms are in their ground states.
pub fn joint_ground_probability(state: &StateVector) -> f64 {
    state
        .basis()
        .labels()
        .zip(state.amplitudes.iter())
        .filter(|(l, _)| l.s_a == AtomState::Ground && l.s_b == AtomState::Ground)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Probability that exactly one atom is excited.
pub fn single_excitation_probability(state: &StateVector) -> f64 {
    state
        .basis()
        .labels()
        .zip(state.amplitudes.iter())
        .filter(|(l, _)| (l.s_a == AtomState::Excited) != (l.s_b == AtomState::Excited))
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Mixed-state version of [`joint_ground_probability`].
pub fn joint_ground_probability_mixed(rho: &DensityOperator) -> Result<f64> {
    let atoms = partial_trace(rho, &Bipartition::atoms())?;
    // (ground, ground) is index 0 of the atom pair
    Ok(atoms.entries[(0, 0)].re)
}

/// Atomic concurrence of a full-system state, pure or mixed.
pub fn atomic_concurrence(rho: &DensityOperator) -> Result<f64> {
    concurrence(&partial_trace(rho, &Bipartition::atoms())?)
}

/// Metrics of one pure state at time `t`. `entropy_bits` is taken across
/// the atoms-versus-photons cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementReport {
    pub t: f64,
    pub concurrence_atoms: f64,
    pub entropy_bits: f64,
    pub p_joint_ground: f64,
}

impl EntanglementReport {
    pub fn for_state(t: f64, state: &StateVector) -> Result<Self> {
        let rho = state.density();
        let atoms = partial_trace(&rho, &Bipartition::atoms())?;
        Ok(Self {
            t,
            concurrence_atoms: concurrence(&atoms)?,
            entropy_bits: von_neumann_entropy(&atoms),
            p_joint_ground: joint_ground_probability(state),
        })
    }
}

/// Uniformly sampled scalar signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidSeries(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 3 {
            return Err(Error::InvalidSeries("need at least three samples".into()));
        }
        if times.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidSeries("non-finite sample".into()));
        }
        let dt = times[1] - times[0];
        if dt <= 0.0 {
            return Err(Error::InvalidSeries("times must increase".into()));
        }
        if times
            .windows(2)
            .any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt)
        {
            return Err(Error::InvalidSeries(
                "samples are not uniformly spaced".into(),
            ));
        }
        Ok(Self { times, values })
    }

    /// Samples `f` at `samples` evenly spaced points over `[t_start, t_end]`.
    pub fn sample<F>(t_start: f64, t_end: f64, samples: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let times = uniform_grid(t_start, t_end, samples)?;
        let values = times.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
        Self::new(times, values)
    }

    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `samples` evenly spaced times from `t_start` to `t_end` inclusive.
pub fn uniform_grid(t_start: f64, t_end: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 || t_end <= t_start || !(t_start.is_finite() && t_end.is_finite()) {
        return Err(Error::InvalidSeries(format!(
            "need samples >= 2 and t_end > t_start, got {samples} samples over [{t_start}, {t_end}]"
        )));
    }
    let dt = (t_end - t_start) / (samples - 1) as f64;
    Ok((0..samples).map(|i| t_start + dt * i as f64).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakPeriod {
    pub t_peak: f64,
    pub period: f64,
}

/// Vertex offset, in samples, of the parabola through three equally spaced points.
fn parabolic_offset(y0: f64, y1: f64, y2: f64) -> f64 {
    let curvature = y0 - 2.0 * y1 + y2;
    if curvature >= 0.0 {
        return 0.0;
    }
    (0.5 * (y0 - y2) / curvature).clamp(-0.5, 0.5)
}

/// Time of the first sample that reaches the global maximum, refined by a
/// parabola through its neighbours.
pub fn find_peak(series: &TimeSeries) -> Result<f64> {
    let v = &series.values;
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let range = max - min;
    if range <= 1e-12 * max.abs().max(1.0) {
        return Err(Error::NoPeak);
    }
    let threshold = max - 1e-3 * range;
    let mut i = v
        .iter()
        .position(|&x| x >= threshold)
        .expect("max is in the series");
    while i + 1 < v.len() && v[i + 1] > v[i] {
        i += 1;
    }
    let offset = if i > 0 && i + 1 < v.len() {
        parabolic_offset(v[i - 1], v[i], v[i + 1])
    } else {
        0.0
    };
    Ok(series.times[i] + offset * series.dt())
}

/// Pearson correlation between `x[..n-lag]` and `x[lag..]`.
fn lagged_correlation(x: &[f64], lag: usize) -> f64 {
    let n = x.len() - lag;
    let (a, b) = (&x[..n], &x[lag..]);
    let mean_a = a.iter().sum::<f64>() / n as f64;
    let mean_b = b.iter().sum::<f64>() / n as f64;
    let (mut cov, mut var_a, mut var_b) = (0.0, 0.0, 0.0);
    for (p, q) in a.iter().zip(b) {
        let (da, db) = (p - mean_a, q - mean_b);
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return 0.0;
    }
    cov / (var_a * var_b).sqrt()
}

/// Period from the first autocorrelation maximum after the correlation has
/// gone negative. Needs at least two full periods of samples.
pub fn find_period(series: &TimeSeries) -> Result<f64> {
    let v = &series.values;
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    if max - min <= 1e-12 * max.abs().max(1.0) {
        return Err(Error::NoPeak);
    }
    let n = v.len();
    // keep at least a quarter of the samples in the overlap window
    let max_lag = n - (n / 4).max(3);
    let r: Vec<f64> = (0..=max_lag).map(|k| lagged_correlation(v, k)).collect();

    let dip = r
        .iter()
        .position(|&c| c < 0.0)
        .ok_or_else(|| Error::InvalidSeries("autocorrelation never turns negative".into()))?;
    let peak = (dip.max(1)..max_lag)
        .find(|&k| r[k] > 0.5 && r[k] >= r[k - 1] && r[k] >= r[k + 1])
        .ok_or_else(|| Error::InvalidSeries("no repeating structure within the series".into()))?;
    let offset = parabolic_offset(r[peak - 1], r[peak], r[peak + 1]);
    Ok((peak as f64 + offset) * series.dt())
}

pub fn find_peak_and_period(series: &TimeSeries) -> Result<PeakPeriod> {
    Ok(PeakPeriod {
        t_peak: find_peak(series)?,
        period: find_period(series)?,
    })
}

/// `Re(e^{iE′t} ⟨reference|ψ(t)⟩)`: the overlap seen in a frame rotating at
/// `frame_energy`. Its period is the revival time of the state amplitudes.
pub fn corotating_overlap(
    reference: &StateVector,
    state: &StateVector,
    frame_energy: f64,
    t: f64,
) -> f64 {
    (Complex64::from_polar(1.0, frame_energy * t) * reference.inner(state)).re
}
