//! Mode normalization, zero-point amplitudes and current fluctuations.
//!
//! Each eigenmode is the piecewise-cosine flux profile
//!   f(x) = cos(k(x + L/2)) on the left half, -cos(k(x - L/2)) on the right,
//! discontinuous across the junction by delta_f = 2 cos(u). The capacitive scalar
//! product <f,g> = int c f g dx + C_J df dg makes distinct eigenmodes orthogonal;
//! its diagonal is the effective mode capacitance eta that sets the zero-point
//! flux phi_zp = sqrt(hbar / (2 eta omega)) and the junction phase amplitude
//! lambda = (2 pi / Phi0) delta_f phi_zp.

use crate::circuit::{derive, CircuitParams, DerivedParams};
use crate::constants::{HBAR, PHI0, TWO_PI};
use crate::error::{Error, Result};
use crate::spectrum::solve_spectrum;

/// Truncation gate on the junction-phase weight carried by dropped modes.
pub const TRUNCATION_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// 1-based mode label, ascending in frequency.
    pub n: usize,
    /// Eigenfrequency, rad/s.
    pub omega: f64,
    /// Wavenumber omega / v, 1/m.
    pub k: f64,
    /// Flux-profile jump across the junction, 2 cos(kL/2).
    pub delta_f: f64,
    /// Effective capacitance <f,f>, F.
    pub eta: f64,
    /// Zero-point flux amplitude, Wb.
    pub phi_zp: f64,
    /// Zero-point junction phase amplitude (signed, dimensionless).
    pub lambda: f64,
}

impl Mode {
    pub(crate) fn profile_unchecked(&self, x: f64, half: f64) -> f64 {
        if x <= 0.0 {
            (self.k * (x + half)).cos()
        } else {
            -(self.k * (x - half)).cos()
        }
    }

    pub(crate) fn slope_unchecked(&self, x: f64, half: f64) -> f64 {
        if x <= 0.0 {
            -self.k * (self.k * (x + half)).sin()
        } else {
            self.k * (self.k * (x - half)).sin()
        }
    }

    /// Flux profile at position x in [-L/2, L/2]; x = 0 takes the left-side value.
    pub fn profile(&self, x: f64, length: f64) -> Result<f64> {
        check_domain(x, length)?;
        Ok(self.profile_unchecked(x, 0.5 * length))
    }

    /// Spatial derivative of the flux profile (continuous across the junction).
    pub fn profile_slope(&self, x: f64, length: f64) -> Result<f64> {
        check_domain(x, length)?;
        Ok(self.slope_unchecked(x, 0.5 * length))
    }
}

fn check_domain(x: f64, length: f64) -> Result<()> {
    let half = 0.5 * length;
    if !x.is_finite() || x.abs() > half * (1.0 + 1e-12) {
        return Err(Error::OutOfDomain { x });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    pub modes: Vec<Mode>,
    /// Whether the retained modes carry all but a negligible share of the
    /// junction phase weight (truncation bound below [`TRUNCATION_TOL`]).
    pub converged: bool,
    /// Estimated product-factor error from the dropped modes.
    pub truncation_bound: f64,
    /// E_J / hbar, rad/s.
    pub e_j_over_hbar: f64,
    pub params: CircuitParams,
    pub derived: DerivedParams,
}

/// Estimated error of the flux-displacement product factor from modes beyond the
/// set: lambda^2 omega approaches a constant (lambda^2 ~ 1/omega), so the dropped
/// tail is summed with the asymptote fitted on the last retained modes.
pub fn truncation_bound(modes: &[Mode]) -> f64 {
    if modes.len() < 2 {
        return f64::INFINITY;
    }
    let fit = modes.len().min(3);
    let a = modes[modes.len() - fit..]
        .iter()
        .map(|m| m.lambda * m.lambda * m.omega)
        .sum::<f64>()
        / fit as f64;
    let last = modes[modes.len() - 1].omega;
    let delta = last - modes[modes.len() - 2].omega;
    let tail: f64 = (1..=40).map(|j| a / (last + j as f64 * delta)).sum();
    1.0 - (-0.5 * tail).exp()
}

/// Solve the spectrum and normalize the lowest `n_modes` modes.
pub fn build_modes(p: &CircuitParams, n_modes: usize) -> Result<ModeSet> {
    let d = derive(p)?;
    let spec = solve_spectrum(p, n_modes)?;
    let modes: Vec<Mode> = spec
        .omegas
        .iter()
        .enumerate()
        .map(|(i, &omega)| {
            let k = omega / d.v;
            let u = 0.5 * k * p.length;
            let delta_f = 2.0 * u.cos();
            let ratio = omega / d.omega_p;
            let eta = p.c
                * (0.5 * p.length
                    + (delta_f * delta_f / (k * k)) * (p.l / (2.0 * d.l_j)) * (1.0 + ratio * ratio));
            let phi_zp = (HBAR / (2.0 * eta * omega)).sqrt();
            let lambda = (TWO_PI / PHI0) * delta_f * phi_zp;
            Mode {
                n: i + 1,
                omega,
                k,
                delta_f,
                eta,
                phi_zp,
                lambda,
            }
        })
        .collect();
    let bound = truncation_bound(&modes);
    Ok(ModeSet {
        converged: bound < TRUNCATION_TOL,
        truncation_bound: bound,
        e_j_over_hbar: d.e_j / HBAR,
        params: *p,
        derived: d,
        modes,
    })
}

impl ModeSet {
    /// Capacitive scalar product of modes i and j (0-based), in closed form.
    /// On the spectrum the off-diagonal vanishes and the diagonal equals eta.
    pub fn scalar_product(&self, i: usize, j: usize) -> f64 {
        let (p, a, b) = (&self.params, &self.modes[i], &self.modes[j]);
        let (ua, ub) = (0.5 * a.k * p.length, 0.5 * b.k * p.length);
        let line = if i == j {
            p.c * (0.5 * p.length + ua.sin() * ua.cos() / a.k)
        } else {
            p.c * ((ua - ub).sin() / (a.k - b.k) + (ua + ub).sin() / (a.k + b.k))
        };
        line + p.c_j * a.delta_f * b.delta_f
    }
}

/// RMS current through the junction with `n_photons` in the lowest mode and the
/// rest in vacuum. Exact for n <= 2; larger occupations need the Fock oracle.
pub fn junction_current_variance(ms: &ModeSet, n_photons: usize) -> Result<f64> {
    if n_photons > 2 {
        return Err(Error::PhotonNumber {
            n: n_photons,
            message: "closed form holds for n <= 2".into(),
        });
    }
    let s = junction_sin_sq(ms, n_photons);
    Ok(ms.params.i_c * s.sqrt())
}

/// <sin^2 Phi> in |n, 0, 0, ...>: 1/2 (1 - prod_k e^{-2 lambda_k^2} P_{n_k}) with
/// the populated-mode polynomial P_n = 1 - 4 lambda^2 n + 4 lambda^4 n (n - 1).
pub(crate) fn junction_sin_sq(ms: &ModeSet, n_photons: usize) -> f64 {
    let n = n_photons as f64;
    let mut prod = 1.0;
    for (i, m) in ms.modes.iter().enumerate() {
        let l2 = m.lambda * m.lambda;
        let mut factor = (-2.0 * l2).exp();
        if i == 0 {
            factor *= 1.0 - 4.0 * l2 * n + 4.0 * l2 * l2 * n * (n - 1.0);
        }
        prod *= factor;
    }
    0.5 * (1.0 - prod)
}

/// RMS current along the line at each requested position, with `n_photons` in the
/// lowest mode and modes 2..=n_cut in vacuum.
pub fn line_current_variance_profile(
    ms: &ModeSet,
    xs: &[f64],
    n_photons: usize,
    n_cut: usize,
) -> Result<Vec<f64>> {
    if n_cut == 0 || n_cut > ms.modes.len() {
        return Err(Error::InvalidParameter {
            field: "n_cut",
            message: format!("need 1..={} retained modes", ms.modes.len()),
        });
    }
    let half = 0.5 * ms.params.length;
    for &x in xs {
        check_domain(x, ms.params.length)?;
    }
    let n = n_photons as f64;
    Ok(xs
        .iter()
        .map(|&x| {
            let mut var = 0.0;
            for (i, m) in ms.modes[..n_cut].iter().enumerate() {
                let sl = m.slope_unchecked(x, half);
                let occ = if i == 0 { 2.0 * n + 1.0 } else { 1.0 };
                var += sl * sl * m.phi_zp * m.phi_zp * occ;
            }
            var.sqrt() / ms.params.l
        })
        .collect())
}
