//! Capacitively coupled resonator chains as Bose-Hubbard lattices.
//!
//! A coupling capacitor C_c between neighboring resonator ends exchanges photons
//! at g_n = C_c omega_n / (4 eta_n) per mode. Keeping only the dressed fundamental
//! of each resonator gives the attractive Bose-Hubbard chain
//!   H = sum_i [omega n_i - U n_i (n_i - 1)] - g sum_<ij> (a_i^dag a_j + h.c.),
//! diagonalized here either over the full truncated chain or within one
//! total-photon-number sector (the hopping conserves sum_i n_i).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kerr::EffectiveMode;
use crate::modes::ModeSet;

/// Full-chain Hilbert dimension cap.
pub const CHAIN_GUARD: usize = 200_000;
/// Photon-number-sector dimension cap.
pub const SECTOR_GUARD: usize = 20_000;
/// Above this C_c / eta_1 the single-mode mapping starts mixing modes.
pub const STRONG_COUPLING_RATIO: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingResult {
    /// Hopping per mode, C_c omega_n / (4 eta_n), rad/s.
    pub g: Vec<f64>,
    /// Effective capacitance per mode, F.
    pub eta: Vec<f64>,
    /// C_c is zero: the chain does not couple.
    pub zero_coupling: bool,
    pub c_c_over_eta1: f64,
    /// The coupling capacitor rivals the mode capacitance; treating sites as
    /// single dressed modes is then unreliable.
    pub strong_coupling_warning: bool,
}

pub fn coupling_strengths(ms: &ModeSet) -> CouplingResult {
    let c_c = ms.params.c_c;
    let g: Vec<f64> = ms
        .modes
        .iter()
        .map(|m| c_c * m.omega / (4.0 * m.eta))
        .collect();
    let eta: Vec<f64> = ms.modes.iter().map(|m| m.eta).collect();
    let ratio = c_c / eta[0];
    CouplingResult {
        g,
        eta,
        zero_coupling: c_c == 0.0,
        c_c_over_eta1: ratio,
        strong_coupling_warning: ratio > STRONG_COUPLING_RATIO,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoseHubbardModel {
    pub n_sites: usize,
    /// On-site photon energy, rad/s.
    pub omega: f64,
    /// Attractive anharmonicity U in -U n(n-1), rad/s.
    pub u: f64,
    /// Nearest-neighbor hopping, rad/s.
    pub g: f64,
    pub boundary: Boundary,
}

impl BoseHubbardModel {
    pub fn from_parts(
        eff: &EffectiveMode,
        g: f64,
        n_sites: usize,
        boundary: Boundary,
    ) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidParameter {
                field: "n_sites",
                message: "chain needs at least one site".into(),
            });
        }
        Ok(BoseHubbardModel {
            n_sites,
            omega: eff.omega_eff,
            u: eff.self_kerr,
            g,
            boundary,
        })
    }

    /// Nearest-neighbor edges; a periodic 2-site ring has a single bond, not two.
    fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = (0..self.n_sites.saturating_sub(1))
            .map(|i| (i, i + 1))
            .collect();
        if self.boundary == Boundary::Periodic && self.n_sites > 2 {
            e.push((self.n_sites - 1, 0));
        }
        e
    }
}

/// Dense Hamiltonian on the full chain with per-site cutoff `d` (occupations
/// 0..d-1), site-0-major index order.
pub fn build_chain(model: &BoseHubbardModel, d: usize) -> Result<DMatrix<f64>> {
    if d < 2 {
        return Err(Error::InvalidParameter {
            field: "cutoff",
            message: "per-site cutoff must be >= 2".into(),
        });
    }
    let mut dim = 1usize;
    for _ in 0..model.n_sites {
        dim = dim.saturating_mul(d);
        if dim > CHAIN_GUARD {
            return Err(Error::DimensionGuard {
                dimension: dim,
                limit: CHAIN_GUARD,
            });
        }
    }
    let mut strides = vec![1usize; model.n_sites];
    for i in (0..model.n_sites - 1).rev() {
        strides[i] = strides[i + 1] * d;
    }
    let occ = |idx: usize, site: usize| (idx / strides[site]) % d;
    let mut h = DMatrix::zeros(dim, dim);
    let edges = model.edges();
    for idx in 0..dim {
        let mut diag = 0.0;
        for site in 0..model.n_sites {
            let n = occ(idx, site) as f64;
            diag += model.omega * n - model.u * n * (n - 1.0);
        }
        h[(idx, idx)] = diag;
        for &(p, q) in &edges {
            // a_p^dag a_q from this state; the transpose handles a_q^dag a_p.
            let (np, nq) = (occ(idx, p), occ(idx, q));
            if nq >= 1 && np + 1 < d {
                let jdx = idx + strides[p] - strides[q];
                let amp = -model.g * (((np + 1) * nq) as f64).sqrt();
                h[(jdx, idx)] += amp;
                h[(idx, jdx)] += amp;
            }
        }
    }
    Ok(h)
}

/// Sorted eigenvalues of the full truncated chain.
pub fn diagonalize_chain(model: &BoseHubbardModel, d: usize) -> Result<Vec<f64>> {
    let h = build_chain(model, d)?;
    let dim = h.nrows();
    let eig = nalgebra::SymmetricEigen::try_new(h, f64::EPSILON, 100_000)
        .ok_or(Error::Eigensolver { dim })?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Occupation vectors with sum `n_total` and per-site maximum `max_occ`,
/// lexicographic.
pub fn sector_basis(n_sites: usize, n_total: usize, max_occ: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut state = vec![0usize; n_sites];
    fn rec(
        state: &mut Vec<usize>,
        site: usize,
        rem: usize,
        max_occ: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if site + 1 == state.len() {
            if rem <= max_occ {
                state[site] = rem;
                out.push(state.clone());
            }
            return;
        }
        for k in 0..=rem.min(max_occ) {
            state[site] = k;
            rec(state, site + 1, rem - k, max_occ, out);
        }
    }
    rec(&mut state, 0, n_total, max_occ, &mut out);
    out
}

/// Sorted eigenvalues within the total-photon-number sector `n_total`, with
/// per-site occupation capped at `max_occ`.
pub fn diagonalize_sector(
    model: &BoseHubbardModel,
    n_total: usize,
    max_occ: usize,
) -> Result<Vec<f64>> {
    let basis = sector_basis(model.n_sites, n_total, max_occ);
    let dim = basis.len();
    if dim == 0 {
        return Err(Error::InvalidParameter {
            field: "sector",
            message: format!("no states with {n_total} photons at max occupancy {max_occ}"),
        });
    }
    if dim > SECTOR_GUARD {
        return Err(Error::DimensionGuard {
            dimension: dim,
            limit: SECTOR_GUARD,
        });
    }
    let index: std::collections::HashMap<&[usize], usize> = basis
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    let edges = model.edges();
    let mut h = DMatrix::zeros(dim, dim);
    let mut scratch = vec![0usize; model.n_sites];
    for (i, s) in basis.iter().enumerate() {
        let diag: f64 = s
            .iter()
            .map(|&n| {
                let n = n as f64;
                model.omega * n - model.u * n * (n - 1.0)
            })
            .sum();
        h[(i, i)] = diag;
        for &(p, q) in &edges {
            if s[q] >= 1 && s[p] < max_occ {
                scratch.copy_from_slice(s);
                scratch[p] += 1;
                scratch[q] -= 1;
                let j = index[scratch.as_slice()];
                let amp = -model.g * (((s[p] + 1) * s[q]) as f64).sqrt();
                h[(j, i)] += amp;
                h[(i, j)] += amp;
            }
        }
    }
    let eig = nalgebra::SymmetricEigen::try_new(h, f64::EPSILON, 100_000)
        .ok_or(Error::Eigensolver { dim })?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::table_demo_params;
    use crate::modes::build_modes;
    use approx::assert_relative_eq;

    fn model(n_sites: usize, boundary: Boundary) -> BoseHubbardModel {
        BoseHubbardModel {
            n_sites,
            omega: 2.8e10,
            u: 2e6,
            g: 2e3,
            boundary,
        }
    }

    #[test]
    fn coupling_formula_and_warnings() {
        let p = crate::circuit::CircuitParams {
            c_c: 1e-15,
            ..table_demo_params()
        };
        let ms = build_modes(&p, 5).unwrap();
        let cpl = coupling_strengths(&ms);
        for (i, m) in ms.modes.iter().enumerate() {
            assert_relative_eq!(cpl.g[i], 1e-15 * m.omega / (4.0 * m.eta), max_relative = 1e-15);
        }
        assert!(!cpl.zero_coupling && !cpl.strong_coupling_warning);
        let bare = build_modes(&table_demo_params(), 5).unwrap();
        let none = coupling_strengths(&bare);
        assert!(none.zero_coupling);
        assert!(none.g.iter().all(|&g| g == 0.0));
        let strong = build_modes(
            &crate::circuit::CircuitParams {
                c_c: 1.5e-13,
                ..table_demo_params()
            },
            5,
        )
        .unwrap();
        assert!(coupling_strengths(&strong).strong_coupling_warning);
    }

    #[test]
    fn single_site_ladder() {
        let m = model(1, Boundary::Open);
        let vals = diagonalize_chain(&m, 5).unwrap();
        for (n, v) in vals.iter().enumerate() {
            let n = n as f64;
            assert_relative_eq!(*v, m.omega * n - m.u * n * (n - 1.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn hopping_conserves_total_number() {
        let m = model(3, Boundary::Periodic);
        let h = build_chain(&m, 3).unwrap();
        let occ_sum = |idx: usize| (idx / 9) % 3 + (idx / 3) % 3 + idx % 3;
        for i in 0..h.nrows() {
            for j in 0..h.ncols() {
                if h[(i, j)] != 0.0 {
                    assert_eq!(occ_sum(i), occ_sum(j), "number-violating element at ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn periodic_band_structure() {
        let m = model(4, Boundary::Periodic);
        let mut vals = diagonalize_sector(&m, 1, 1).unwrap();
        let mut expect: Vec<f64> = (0..4)
            .map(|q| m.omega - 2.0 * m.g * (std::f64::consts::TAU * q as f64 / 4.0).cos())
            .collect();
        expect.sort_by(f64::total_cmp);
        vals.sort_by(f64::total_cmp);
        for (v, e) in vals.iter().zip(&expect) {
            assert_relative_eq!(v, e, max_relative = 1e-12);
        }
    }

    #[test]
    fn open_band_structure() {
        let m = model(5, Boundary::Open);
        let vals = diagonalize_sector(&m, 1, 1).unwrap();
        let mut expect: Vec<f64> = (1..=5)
            .map(|q| m.omega - 2.0 * m.g * (std::f64::consts::PI * q as f64 / 6.0).cos())
            .collect();
        expect.sort_by(f64::total_cmp);
        for (v, e) in vals.iter().zip(&expect) {
            assert_relative_eq!(v, e, max_relative = 1e-12);
        }
    }

    #[test]
    fn two_photon_binding() {
        // g/U = 1e-3: photon pairs bind at 2U up to a kinetic correction.
        let m = model(6, Boundary::Open);
        let e1 = diagonalize_sector(&m, 1, 2).unwrap();
        let e2 = diagonalize_sector(&m, 2, 2).unwrap();
        let binding = 2.0 * e1[0] - e2[0];
        assert_relative_eq!(binding, 3_992_799.713, max_relative = 1e-7);
        assert_relative_eq!(binding, 2.0 * m.u, max_relative = 2e-3);
    }

    #[test]
    fn sector_embeds_in_full_chain() {
        let m = model(3, Boundary::Open);
        let full = diagonalize_chain(&m, 3).unwrap();
        for n_total in 0..=2usize {
            for v in diagonalize_sector(&m, n_total, 2).unwrap() {
                let nearest = full
                    .iter()
                    .map(|f| (f - v).abs())
                    .fold(f64::INFINITY, f64::min);
                assert!(
                    nearest < 1e-9 * m.omega.max(1.0),
                    "sector value {v} missing from full spectrum"
                );
            }
        }
    }

    #[test]
    fn on_site_energy_is_a_gauge_shift() {
        let m = model(4, Boundary::Open);
        let shifted = BoseHubbardModel {
            omega: m.omega + 5e8,
            ..m
        };
        for n_total in 1..=2usize {
            let a = diagonalize_sector(&m, n_total, 2).unwrap();
            let b = diagonalize_sector(&shifted, n_total, 2).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert_relative_eq!(y - x, n_total as f64 * 5e8, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn periodic_two_site_ring_has_single_bond() {
        let open = model(2, Boundary::Open);
        let ring = model(2, Boundary::Periodic);
        let a = diagonalize_chain(&open, 4).unwrap();
        let b = diagonalize_chain(&ring, 4).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_relative_eq!(x, y, max_relative = 1e-14);
        }
    }

    #[test]
    fn guards() {
        assert!(matches!(
            build_chain(&model(8, Boundary::Open), 6),
            Err(Error::DimensionGuard { .. })
        ));
        assert!(matches!(
            diagonalize_sector(&model(24, Boundary::Open), 6, 6),
            Err(Error::DimensionGuard { .. })
        ));
        assert!(diagonalize_sector(&model(2, Boundary::Open), 5, 2).is_err());
        assert!(build_chain(&model(2, Boundary::Open), 1).is_err());
        let basis = sector_basis(3, 2, 2);
        assert_eq!(basis.len(), 6);
        assert!(basis.iter().all(|s| s.iter().sum::<usize>() == 2));
    }
}
