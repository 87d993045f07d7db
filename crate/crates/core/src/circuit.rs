//! Circuit parameters of a transmission line resonator intersected by a
//! Josephson junction at its midpoint, and the constants derived from them.

use crate::constants::{PHI0, TWO_PI};
use crate::error::{Error, Result};

/// Raw device parameters, SI units throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams {
    /// Inductance per unit length of the line, H/m.
    pub l: f64,
    /// Capacitance per unit length of the line, F/m.
    pub c: f64,
    /// Total resonator length, m.
    pub length: f64,
    /// Junction capacitance, F.
    pub c_j: f64,
    /// Junction critical current, A.
    pub i_c: f64,
    /// Capacitance coupling the resonator to its neighbours in a lattice, F.
    pub c_c: f64,
}

/// Quantities derived from [`CircuitParams`]; all follow algebraically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// Josephson energy phi0*I_c/(2 pi), J.
    pub e_j: f64,
    /// Josephson inductance phi0/(2 pi I_c), H.
    pub l_j: f64,
    /// Junction plasma frequency 1/sqrt(L_J C_J), rad/s.
    pub omega_p: f64,
    /// Phase velocity 1/sqrt(l c), m/s.
    pub v: f64,
    /// Line impedance sqrt(l/c), Ohm.
    pub z0: f64,
    /// Flux quantum, Wb.
    pub phi0: f64,
}

impl CircuitParams {
    pub fn validate(&self) -> Result<()> {
        let positive: [(&'static str, f64); 5] = [
            ("l", self.l),
            ("c", self.c),
            ("L", self.length),
            ("C_J", self.c_j),
            ("I_c", self.i_c),
        ];
        for (field, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidParameter {
                    field,
                    message: format!("must be finite and positive, got {value}"),
                });
            }
        }
        if self.length < 1e-6 {
            return Err(Error::InvalidParameter {
                field: "L",
                message: format!("degenerate geometry, need L >= 1e-6 m, got {}", self.length),
            });
        }
        if !self.c_c.is_finite() || self.c_c < 0.0 {
            return Err(Error::InvalidParameter {
                field: "C_c",
                message: format!("must be finite and non-negative, got {}", self.c_c),
            });
        }
        Ok(())
    }

    pub fn with_i_c(&self, i_c: f64) -> CircuitParams {
        CircuitParams { i_c, ..*self }
    }
}

/// Derive junction and line constants. Pure; errors on invalid parameters.
pub fn derive(p: &CircuitParams) -> Result<DerivedParams> {
    p.validate()?;
    let e_j = PHI0 * p.i_c / TWO_PI;
    let l_j = PHI0 / (TWO_PI * p.i_c);
    Ok(DerivedParams {
        e_j,
        l_j,
        omega_p: 1.0 / (l_j * p.c_j).sqrt(),
        v: 1.0 / (p.l * p.c).sqrt(),
        z0: (p.l / p.c).sqrt(),
        phi0: PHI0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeParity {
    /// Even mode of the bare line, omega = 2 m pi v / L; blind to the junction.
    Symmetric,
    /// Odd-mode asymptote omega = (2m-1) pi v / L, reached in the stiff-junction limit.
    Antisymmetric,
}

/// Bare-resonator frequencies up to `n_max` of each parity, sorted ascending.
pub fn bare_mode_frequencies(p: &CircuitParams, n_max: usize) -> Result<Vec<(ModeParity, f64)>> {
    let d = derive(p)?;
    let base = std::f64::consts::PI * d.v / p.length;
    let mut out = Vec::with_capacity(2 * n_max);
    for m in 1..=n_max {
        out.push((ModeParity::Antisymmetric, (2 * m - 1) as f64 * base));
        out.push((ModeParity::Symmetric, (2 * m) as f64 * base));
    }
    Ok(out)
}

pub fn table_demo_params() -> CircuitParams {
    CircuitParams {
        l: 5e-7,
        c: 2e-10,
        length: 0.010,
        c_j: 1.9e-12,
        i_c: 1e-6,
        c_c: 0.0,
    }
}
