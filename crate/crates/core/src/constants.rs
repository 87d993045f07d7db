//! Physical constants (SI, CODATA 2018 exact values where defined).

/// Magnetic flux quantum h/2e in Wb.
pub const PHI0: f64 = 2.067833848e-15;

/// Elementary charge in C.
pub const E_CHARGE: f64 = 1.602176634e-19;

/// Planck constant in J s.
pub const PLANCK_H: f64 = 6.62607015e-34;

/// Reduced Planck constant in J s.
pub const HBAR: f64 = 1.054571817e-34;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
