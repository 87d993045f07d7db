//! Self-Kerr nonlinearity of the fundamental mode in the rotating-wave approximation.
//!
//! Normal-ordering the junction cosine across all retained modes leaves the
//! displacement product factor pf = exp(-sum_k lambda_k^2 / 2). The fundamental
//! then acquires a frequency pull delta_omega = (E_J/hbar) lambda_1^2 (1 - pf)
//! and a self-Kerr U = (E_J/hbar) (lambda_1^4 / 4) pf, i.e. the two-photon state
//! sits 2U below twice the one-photon energy.

use crate::error::{Error, Result};
use crate::modes::{ModeSet, TRUNCATION_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrResult {
    /// Linear eigenfrequency of the fundamental, rad/s.
    pub omega_1: f64,
    /// Junction-induced downward frequency pull, rad/s.
    pub delta_omega: f64,
    /// Self-Kerr coefficient U in H = omega_eff n - U n(n-1), rad/s.
    pub self_kerr: f64,
    /// Displacement product factor over the retained modes.
    pub product_factor: f64,
    pub n_modes_used: usize,
    pub truncation_bound: f64,
}

/// Effective single-mode parameters of the dressed fundamental.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveMode {
    /// omega_1 - delta_omega, rad/s.
    pub omega_eff: f64,
    pub self_kerr: f64,
}

/// Kerr parameters of the fundamental. Refuses mode sets whose truncation bound
/// exceeds the gate: the product factor would silently miss phase weight.
pub fn kerr_parameters(ms: &ModeSet) -> Result<KerrResult> {
    if !ms.converged {
        return Err(Error::TruncationNotConverged {
            bound: ms.truncation_bound,
            tol: TRUNCATION_TOL,
        });
    }
    let sum_l2: f64 = ms.modes.iter().map(|m| m.lambda * m.lambda).sum();
    let pf = (-0.5 * sum_l2).exp();
    let l1 = ms.modes[0].lambda;
    let l1sq = l1 * l1;
    let ej = ms.e_j_over_hbar;
    Ok(KerrResult {
        omega_1: ms.modes[0].omega,
        delta_omega: ej * l1sq * (1.0 - pf),
        self_kerr: ej * (l1sq * l1sq / 4.0) * pf,
        product_factor: pf,
        n_modes_used: ms.modes.len(),
        truncation_bound: ms.truncation_bound,
    })
}

pub fn effective_mode_hamiltonian(ms: &ModeSet) -> Result<EffectiveMode> {
    let k = kerr_parameters(ms)?;
    Ok(EffectiveMode {
        omega_eff: k.omega_1 - k.delta_omega,
        self_kerr: k.self_kerr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::table_demo_params;
    use crate::modes::build_modes;
    use approx::assert_relative_eq;

    #[test]
    fn frozen_kerr_at_one_microamp() {
        let ms = build_modes(&table_demo_params(), 10).unwrap();
        let k = kerr_parameters(&ms).unwrap();
        assert_relative_eq!(k.product_factor, 0.996913279939637, max_relative = 1e-9);
        assert_relative_eq!(k.delta_omega, 15297087.5392408, max_relative = 1e-8);
        assert_relative_eq!(k.self_kerr, 1961375.71796403, max_relative = 1e-8);
        assert_eq!(k.n_modes_used, 10);
    }

    #[test]
    fn frozen_kerr_at_tenth_microamp() {
        // Smallest default-sweep I_c: the junction mode is most line-like and the
        // Kerr peaks near 3.7 MHz.
        let ms = build_modes(&table_demo_params().with_i_c(1e-7), 10).unwrap();
        let k = kerr_parameters(&ms).unwrap();
        assert_relative_eq!(k.product_factor, 0.990603894236652, max_relative = 1e-9);
        assert_relative_eq!(k.delta_omega, 50839626.1652649, max_relative = 1e-8);
        assert_relative_eq!(k.self_kerr, 23232146.2258363, max_relative = 1e-8);
        assert_relative_eq!(k.self_kerr / crate::constants::TWO_PI, 3.69752e6, max_relative = 1e-5);
    }

    #[test]
    fn truncation_gate_rejects_shallow_sets() {
        for n in [2usize, 3] {
            let ms = build_modes(&table_demo_params(), n).unwrap();
            assert!(matches!(
                kerr_parameters(&ms),
                Err(Error::TruncationNotConverged { .. })
            ));
        }
    }

    #[test]
    fn shift_kerr_identity() {
        // U / delta_omega = lambda_1^2 pf / (4 (1 - pf)) by construction.
        let ms = build_modes(&table_demo_params(), 10).unwrap();
        let k = kerr_parameters(&ms).unwrap();
        let l1sq = ms.modes[0].lambda.powi(2);
        let expect = l1sq * k.product_factor / (4.0 * (1.0 - k.product_factor));
        assert_relative_eq!(k.self_kerr / k.delta_omega, expect, max_relative = 1e-12);
        let eff = effective_mode_hamiltonian(&ms).unwrap();
        assert_relative_eq!(eff.omega_eff, k.omega_1 - k.delta_omega, max_relative = 1e-15);
        assert!(k.delta_omega > 0.0 && k.self_kerr > 0.0);
        assert!(k.product_factor > 0.0 && k.product_factor < 1.0);
    }

    #[test]
    fn kerr_peaks_at_smallest_detuning() {
        // Across a coarse sweep the self-Kerr is largest where the fundamental is
        // fractionally closest to the plasma frequency (the left edge here).
        let p = table_demo_params();
        let grid = crate::spectrum::log_grid(1e-7, 1e-5, 20);
        let mut kerrs = Vec::new();
        let mut detunings = Vec::new();
        for &i_c in &grid {
            let ms = build_modes(&p.with_i_c(i_c), 10).unwrap();
            let k = kerr_parameters(&ms).unwrap();
            kerrs.push(k.self_kerr);
            detunings.push((ms.modes[0].omega - ms.derived.omega_p).abs() / ms.derived.omega_p);
        }
        let argmax_u = (0..20).max_by(|&a, &b| kerrs[a].total_cmp(&kerrs[b])).unwrap();
        let argmin_d = (0..20).min_by(|&a, &b| detunings[a].total_cmp(&detunings[b])).unwrap();
        assert_eq!(argmax_u, argmin_d);
    }
}
