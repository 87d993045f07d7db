//! Brute-force Fock-space diagonalization of the junction cosine.
//!
//! The residual nonlinearity left after the linear modes absorb the junction
//! inductance is V = -E_J (cos Phi - 1 + Phi^2/2) with the junction phase
//! Phi = sum_k lambda_k (a_k + a_k^dag). Truncating each mode at a finite cutoff
//! gives a dense symmetric Hamiltonian whose exact ladder of |n, 0, 0, ...>-like
//! eigenstates checks the rotating-wave Kerr formulas without sharing any of
//! their algebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kerr::kerr_parameters;
use crate::modes::ModeSet;

/// Hard cap on the truncated Fock dimension.
pub const DIMENSION_GUARD: usize = 200_000;
/// Minimum squared overlap with the bare state for ladder identification.
pub const OVERLAP_MIN: f64 = 0.9;

/// Truncated multimode Fock basis, mode-1-major: the occupation of the first
/// mode varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct FockBasis {
    pub cutoffs: Vec<usize>,
    pub dim: usize,
    strides: Vec<usize>,
}

impl FockBasis {
    pub fn new(cutoffs: &[usize]) -> Result<Self> {
        if cutoffs.is_empty() || cutoffs.iter().any(|&d| d < 2) {
            return Err(Error::InvalidParameter {
                field: "cutoffs",
                message: "need at least one mode with cutoff >= 2".into(),
            });
        }
        let mut dim = 1usize;
        for &d in cutoffs {
            dim = dim.saturating_mul(d);
            if dim > DIMENSION_GUARD {
                return Err(Error::DimensionGuard {
                    dimension: dim,
                    limit: DIMENSION_GUARD,
                });
            }
        }
        let mut strides = vec![1usize; cutoffs.len()];
        for i in (0..cutoffs.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * cutoffs[i + 1];
        }
        Ok(FockBasis {
            cutoffs: cutoffs.to_vec(),
            dim,
            strides,
        })
    }

    pub fn index(&self, occ: &[usize]) -> usize {
        occ.iter()
            .zip(&self.strides)
            .map(|(n, s)| n * s)
            .sum()
    }

    pub fn occupation(&self, idx: usize, mode: usize) -> usize {
        (idx / self.strides[mode]) % self.cutoffs[mode]
    }
}

/// Phi = sum_k lambda_k (a_k + a_k^dag) as a dense symmetric matrix.
pub fn quadrature_operator(basis: &FockBasis, lambdas: &[f64]) -> DMatrix<f64> {
    assert_eq!(lambdas.len(), basis.cutoffs.len());
    let mut m = DMatrix::zeros(basis.dim, basis.dim);
    for idx in 0..basis.dim {
        for (k, &lam) in lambdas.iter().enumerate() {
            let n = basis.occupation(idx, k);
            if n + 1 < basis.cutoffs[k] {
                let jdx = idx + basis.strides[k];
                let val = lam * ((n + 1) as f64).sqrt();
                m[(idx, jdx)] += val;
                m[(jdx, idx)] += val;
            }
        }
    }
    m
}

/// Diagonal of sum_k omega_k (N_k + 1/2).
pub fn harmonic_diagonal(basis: &FockBasis, omegas: &[f64]) -> DVector<f64> {
    assert_eq!(omegas.len(), basis.cutoffs.len());
    DVector::from_fn(basis.dim, |idx, _| {
        omegas
            .iter()
            .enumerate()
            .map(|(k, &w)| w * (basis.occupation(idx, k) as f64 + 0.5))
            .sum()
    })
}

/// Apply a scalar function to a symmetric matrix through its eigendecomposition.
fn symmetric_map(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> Result<DMatrix<f64>> {
    let dim = m.nrows();
    let eig = nalgebra::SymmetricEigen::try_new(m.clone(), f64::EPSILON, 100_000)
        .ok_or(Error::Eigensolver { dim })?;
    let vals = eig.eigenvalues.map(f);
    let q = &eig.eigenvectors;
    let scaled = DMatrix::from_fn(dim, dim, |i, j| q[(i, j)] * vals[j]);
    Ok(&scaled * q.transpose())
}

pub fn cosine_operator(phi: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    symmetric_map(phi, f64::cos)
}

pub fn sine_operator(phi: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    symmetric_map(phi, f64::sin)
}

/// H/hbar = sum_k omega_k (N_k + 1/2) - (E_J/hbar)(cos Phi - 1 + Phi^2/2).
pub fn hamiltonian(
    basis: &FockBasis,
    omegas: &[f64],
    lambdas: &[f64],
    ej_over_hbar: f64,
) -> Result<DMatrix<f64>> {
    let phi = quadrature_operator(basis, lambdas);
    let cos = cosine_operator(&phi)?;
    let mut h = cos;
    h += 0.5 * (&phi * &phi);
    for i in 0..basis.dim {
        h[(i, i)] -= 1.0;
    }
    h *= -ej_over_hbar;
    let diag = harmonic_diagonal(basis, omegas);
    for i in 0..basis.dim {
        h[(i, i)] += diag[i];
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderState {
    /// Bare photon number of the first mode this eigenstate tracks.
    pub n: usize,
    /// Absolute eigenvalue, rad/s.
    pub energy: f64,
    /// Squared overlap with |n, 0, 0, ...>.
    pub overlap: f64,
}

/// Identify the eigenstates adiabatically connected to |n, 0, ..., 0> for
/// n = 0..ladder_len by their dominant bare component.
fn extract_ladder(
    basis: &FockBasis,
    h: &DMatrix<f64>,
    ladder_len: usize,
) -> Result<Vec<LadderState>> {
    let eig = nalgebra::SymmetricEigen::try_new(h.clone(), f64::EPSILON, 100_000)
        .ok_or(Error::Eigensolver { dim: basis.dim })?;
    let mut ladder = Vec::with_capacity(ladder_len);
    for n in 0..ladder_len {
        let bare = n * basis.strides[0];
        let mut best = (0usize, -1.0f64);
        for col in 0..basis.dim {
            let w = eig.eigenvectors[(bare, col)].powi(2);
            if w > best.1 {
                best = (col, w);
            }
        }
        if best.1 <= OVERLAP_MIN {
            return Err(Error::LadderIdentification {
                target: n,
                overlap: best.1,
            });
        }
        ladder.push(LadderState {
            n,
            energy: eig.eigenvalues[best.0],
            overlap: best.1,
        });
    }
    Ok(ladder)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// E(n) - E(0) for n = 1..ladder_len, rad/s.
    pub excitation_energies: Vec<f64>,
    /// Squared bare-state overlaps for n = 0..ladder_len.
    pub overlaps: Vec<f64>,
    /// Exact anharmonicity (2 E_1 - E_2)/2, rad/s.
    pub u_eff: f64,
    /// Exact frequency pull omega_1 - E_1, rad/s.
    pub delta_omega_eff: f64,
    /// Relative change of u_eff when every cutoff is raised by one.
    pub convergence: f64,
    pub dim: usize,
}

fn ladder_at(ms: &ModeSet, cutoffs: &[usize], ladder_len: usize) -> Result<Vec<LadderState>> {
    let basis = FockBasis::new(cutoffs)?;
    let omegas: Vec<f64> = ms.modes[..cutoffs.len()].iter().map(|m| m.omega).collect();
    let lambdas: Vec<f64> = ms.modes[..cutoffs.len()].iter().map(|m| m.lambda).collect();
    let h = hamiltonian(&basis, &omegas, &lambdas, ms.e_j_over_hbar)?;
    extract_ladder(&basis, &h, ladder_len)
}

/// Diagonalize the cosine Hamiltonian over the first `cutoffs.len()` modes of the
/// set, track the fundamental's ladder, and report the exact Kerr parameters with
/// a cutoff-convergence estimate (every cutoff raised by one).
pub fn diagonalize_full(
    ms: &ModeSet,
    cutoffs: &[usize],
    ladder_len: usize,
) -> Result<OracleResult> {
    if cutoffs.len() > ms.modes.len() {
        return Err(Error::InvalidParameter {
            field: "cutoffs",
            message: format!("{} cutoffs but only {} modes", cutoffs.len(), ms.modes.len()),
        });
    }
    if ladder_len < 3 || cutoffs.is_empty() || cutoffs[0] < ladder_len + 2 {
        return Err(Error::InvalidParameter {
            field: "ladder_len",
            message: "ladder needs n = 0..=2 and cutoff headroom of two levels".into(),
        });
    }
    let ladder = ladder_at(ms, cutoffs, ladder_len)?;
    let bumped: Vec<usize> = cutoffs.iter().map(|&c| c + 1).collect();
    let ladder_up = ladder_at(ms, &bumped, ladder_len)?;
    let e0 = ladder[0].energy;
    let exc: Vec<f64> = ladder[1..].iter().map(|s| s.energy - e0).collect();
    let u_eff = (2.0 * exc[0] - exc[1]) / 2.0;
    let e0_up = ladder_up[0].energy;
    let u_up = (2.0 * (ladder_up[1].energy - e0_up) - (ladder_up[2].energy - e0_up)) / 2.0;
    Ok(OracleResult {
        overlaps: ladder.iter().map(|s| s.overlap).collect(),
        excitation_energies: exc.clone(),
        u_eff,
        delta_omega_eff: ms.modes[0].omega - exc[0],
        convergence: ((u_eff - u_up) / u_eff).abs(),
        dim: cutoffs.iter().product(),
    })
}

/// <n, 0, ...| sin^2 Phi |n, 0, ...> from the truncated operators, as an RMS
/// current in amps. Valid well below the cutoff only.
pub fn oracle_current_variance(
    ms: &ModeSet,
    cutoffs: &[usize],
    n_photons: usize,
) -> Result<f64> {
    if cutoffs.len() > ms.modes.len() {
        return Err(Error::InvalidParameter {
            field: "cutoffs",
            message: format!("{} cutoffs but only {} modes", cutoffs.len(), ms.modes.len()),
        });
    }
    let basis = FockBasis::new(cutoffs)?;
    if n_photons + 2 > basis.cutoffs[0] {
        return Err(Error::PhotonNumber {
            n: n_photons,
            message: format!(
                "needs two levels of headroom below the cutoff {}",
                basis.cutoffs[0]
            ),
        });
    }
    let lambdas: Vec<f64> = ms.modes[..cutoffs.len()].iter().map(|m| m.lambda).collect();
    let phi = quadrature_operator(&basis, &lambdas);
    let sin = sine_operator(&phi)?;
    let col = sin.column(n_photons * basis.strides[0]);
    Ok(ms.params.i_c * col.dot(&col).sqrt())
}

/// Side-by-side closed-form and exact Kerr parameters for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwaComparison {
    pub rwa_u: f64,
    pub oracle_u: f64,
    pub u_rel_dev: f64,
    pub rwa_shift: f64,
    pub oracle_shift: f64,
    pub shift_rel_dev: f64,
    pub min_overlap: f64,
    pub convergence: f64,
}

/// The comparison restricts the closed forms to the same modes the oracle keeps:
/// both sides then share one truncation and any deviation is RWA error alone.
/// The full mode set must still pass the production truncation gate.
pub fn compare_rwa(ms: &ModeSet, cutoffs: &[usize], ladder_len: usize) -> Result<RwaComparison> {
    kerr_parameters(ms)?;
    let oracle = diagonalize_full(ms, cutoffs, ladder_len)?;
    let sum_l2: f64 = ms.modes[..cutoffs.len()]
        .iter()
        .map(|m| m.lambda * m.lambda)
        .sum();
    let pf = (-0.5 * sum_l2).exp();
    let l1sq = ms.modes[0].lambda.powi(2);
    let rwa_u = ms.e_j_over_hbar * (l1sq * l1sq / 4.0) * pf;
    let rwa_shift = ms.e_j_over_hbar * l1sq * (1.0 - pf);
    Ok(RwaComparison {
        rwa_u,
        oracle_u: oracle.u_eff,
        u_rel_dev: ((rwa_u - oracle.u_eff) / oracle.u_eff).abs(),
        rwa_shift,
        oracle_shift: oracle.delta_omega_eff,
        shift_rel_dev: ((rwa_shift - oracle.delta_omega_eff) / oracle.delta_omega_eff).abs(),
        min_overlap: oracle.overlaps.iter().copied().fold(f64::INFINITY, f64::min),
        convergence: oracle.convergence,
    })
}
