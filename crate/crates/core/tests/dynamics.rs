use std::f64::consts::PI;

use jcqed::analytic::{
    dressed_state, evolve_detuned_special, evolve_general, revival_period, Sign,
};
use jcqed::entanglement::{atomic_concurrence, EntanglementReport};
use jcqed::lindblad::{integrate, DissipationConfig};
use jcqed::model::{StateVector, Subsystem, SubsystemParams, SystemParams};
use jcqed::oracle::{build_hamiltonian, eigendecompose};
use proptest::prelude::*;

fn max_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes
        .iter()
        .zip(b.amplitudes.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn params() -> impl Strategy<Value = SystemParams> {
    (
        0.5..2.0f64,
        -0.6..0.6f64,
        -1.0..1.0f64,
        0.5..2.0f64,
        -0.6..0.6f64,
        -1.0..1.0f64,
    )
        .prop_filter("nonzero coupling", |p| p.2.abs() > 1e-3 && p.5.abs() > 1e-3)
        .prop_map(|(ea, xa, la, eb, xb, lb)| {
            SystemParams::new(
                SubsystemParams::from_dimensionless(ea, xa, la).unwrap(),
                SubsystemParams::from_dimensionless(eb, xb, lb).unwrap(),
            )
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dressed_states_are_eigenvectors(p in params(), n in 0usize..3, plus in any::<bool>(), on_b in any::<bool>()) {
        let n_max = 4;
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let sub = if on_b { Subsystem::B } else { Subsystem::A };
        let h = build_hamiltonian(&p, n_max).unwrap();
        let (state, energy) = dressed_state(n, sign, sub, &p, n_max).unwrap().with_partner_ground(&p).unwrap();
        let residual = &h.entries * &state.amplitudes - &state.amplitudes * jcqed::Complex64::from(energy);
        prop_assert!(residual.norm() < 1e-12 * (1.0 + energy.abs()));
    }

    #[test]
    fn general_evolution_matches_oracle(p in params(), t in 0.0..50.0f64) {
        let spectrum = eigendecompose(&build_hamiltonian(&p, 1).unwrap()).unwrap();
        let exact = spectrum.evolve(&StateVector::psi_alpha(1).unwrap(), t).unwrap();
        let analytic = evolve_general(t, &p, 1).unwrap();
        prop_assert!(max_diff(&exact, &analytic) < 1e-10);
    }

    #[test]
    fn special_case_agrees_with_general(e in 0.5..2.0f64, eps in -0.6..0.6f64, lam in 0.01..1.0f64, t in 0.0..30.0f64) {
        let sub = SubsystemParams::from_dimensionless(e, eps, lam).unwrap();
        let p = SystemParams::new(sub, sub).unwrap();
        let special = evolve_detuned_special(t, &sub).unwrap().to_state(1).unwrap();
        prop_assert!(max_diff(&special, &evolve_general(t, &p, 1).unwrap()) < 1e-11);
    }

    #[test]
    fn state_repeats_after_half_period_up_to_phase(eps in -0.6..0.6f64, lam in 0.05..1.0f64, t in 0.0..10.0f64) {
        let sub = SubsystemParams::from_dimensionless(1.0, eps, lam).unwrap();
        let p = SystemParams::new(sub, sub).unwrap();
        let half = 0.5 * revival_period(&sub).unwrap();
        let now = evolve_general(t, &p, 1).unwrap();
        let later = evolve_general(t + half, &p, 1).unwrap();
        prop_assert!((now.inner(&later).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn report_stays_physical(p in params(), t in 0.0..40.0f64) {
        let report = EntanglementReport::for_state(t, &evolve_general(t, &p, 1).unwrap()).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&report.concurrence_atoms));
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&report.entropy_bits));
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&report.p_joint_ground));
    }
}

#[test]
fn resonant_atoms_swap_excitation_into_bell_state() {
    let sub = SubsystemParams::from_dimensionless(1.0, 0.0, 1.0).unwrap();
    let p = SystemParams::new(sub, sub).unwrap();
    let at_peak = evolve_general(PI / 2.0, &p, 1).unwrap();
    let report = EntanglementReport::for_state(PI / 2.0, &at_peak).unwrap();
    assert!((report.concurrence_atoms - 1.0).abs() < 1e-12);
    assert!(report.entropy_bits.abs() < 1e-9);
    assert!(report.p_joint_ground < 1e-12);
}

#[test]
fn damping_lowers_peak_concurrence() {
    let p = SystemParams::symmetric(1.0, 0.0, 1.0).unwrap();
    let h = build_hamiltonian(&p, 1).unwrap();
    let rho0 = StateVector::psi_alpha(1).unwrap().density();
    let peak = |gamma: f64| {
        let cfg = DissipationConfig::new(gamma, 1e-3, PI / 2.0)
            .unwrap()
            .recording_every(usize::MAX);
        let rho = integrate(&rho0, &h, &cfg).unwrap().pop().unwrap().rho;
        atomic_concurrence(&rho).unwrap()
    };
    let (closed, damped) = (peak(0.0), peak(0.2));
    assert!((closed - 1.0).abs() < 1e-6);
    assert!(damped < closed - 1e-3);
}
