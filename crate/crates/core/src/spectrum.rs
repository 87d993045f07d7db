//! Antisymmetric eigenmode spectrum of the junction-intersected line.
//!
//! Mode wavenumbers solve omega/v = cot(omega L / 2v) * (2l/L_J) * (1 - omega^2/omega_p^2).
//! Everything here works in the normalized variable u = omega L / (2v), where the
//! equation reads F(u) = u - cot(u) * (l L / L_J) * (1 - u^2/u_p^2) = 0 and each branch
//! interval (m pi, (m+1) pi) hosts one root, or two where the plasma branch crosses.
//! Root counts are always established by sign-change scanning, never assumed.

use crate::circuit::{derive, CircuitParams, DerivedParams};
use crate::error::{Error, Result};

/// Accepted relative residual |F(u)| / max(u, 1) for a converged root.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Inset from the cotangent poles bounding each scanned branch interval.
const INTERVAL_INSET: f64 = 1e-9;
/// Initial sign-change scan density per branch interval; doubled until stable.
const SCAN_START: usize = 1024;
const SCAN_MAX: usize = 1 << 20;
const MAX_REFINE_ITERS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Mode frequencies in rad/s, ascending.
    pub omegas: Vec<f64>,
    /// Achieved relative residual per root.
    pub residuals: Vec<f64>,
    /// Number of branch intervals scanned to collect the roots.
    pub branch_count: usize,
    /// Index of the root closest to omega_p (diagnostic).
    pub plasma_branch_index: usize,
}

/// The normalized transcendental function and its parameters.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SpectrumEq {
    /// l L / L_J.
    pub coef: f64,
    /// omega_p L / (2 v).
    pub u_p: f64,
}

impl SpectrumEq {
    pub fn new(p: &CircuitParams, d: &DerivedParams) -> Self {
        SpectrumEq {
            coef: p.l * p.length / d.l_j,
            u_p: d.omega_p * p.length / (2.0 * d.v),
        }
    }

    pub fn f(&self, u: f64) -> f64 {
        let (s, c) = u.sin_cos();
        let r = u / self.u_p;
        u - (c / s) * self.coef * (1.0 - r * r)
    }

    pub fn rel(&self, u: f64) -> f64 {
        self.f(u) / u.max(1.0)
    }
}

/// Relative residual of the spectrum equation at `omega`.
///
/// Errors within |sin u| < 1e-13 of a cotangent pole, where the equation is singular.
pub fn residual(omega: f64, p: &CircuitParams, d: &DerivedParams) -> Result<f64> {
    let u = omega * p.length / (2.0 * d.v);
    if u.sin().abs() < 1e-13 {
        return Err(Error::PoleProximity { u });
    }
    Ok(SpectrumEq::new(p, d).rel(u))
}

/// Sign-change brackets of `eq` on [lo, hi], grid-doubled until the count is stable
/// for two consecutive doublings.
fn scan_interval(eq: &SpectrumEq, lo: f64, hi: f64) -> Vec<(f64, f64, f64, f64)> {
    let mut n = SCAN_START;
    let mut prev_count: Option<usize> = None;
    let mut stable = 0usize;
    loop {
        let step = (hi - lo) / n as f64;
        let mut brackets = Vec::new();
        let mut ua = lo;
        let mut fa = eq.f(ua);
        for i in 1..=n {
            let ub = if i == n { hi } else { lo + step * i as f64 };
            let fb = eq.f(ub);
            if fa == 0.0 {
                brackets.push((ua, ua, 0.0, 0.0));
            } else if fa * fb < 0.0 {
                brackets.push((ua, ub, fa, fb));
            }
            ua = ub;
            fa = fb;
        }
        if fa == 0.0 {
            brackets.push((ua, ua, 0.0, 0.0));
        }
        match prev_count {
            Some(c) if c == brackets.len() => stable += 1,
            _ => stable = 0,
        }
        if stable >= 2 || n >= SCAN_MAX {
            return brackets;
        }
        prev_count = Some(brackets.len());
        n *= 2;
    }
}

/// Refine a sign-changing bracket with safeguarded secant/bisection steps, to
/// machine resolution in u. Returns the point with the smallest relative residual.
fn refine(eq: &SpectrumEq, bracket: (f64, f64, f64, f64)) -> Result<(f64, f64)> {
    let (mut a, mut b, mut fa, mut fb) = bracket;
    if a == b {
        return Ok((a, eq.rel(a)));
    }
    let mut best = (a, eq.rel(a));
    let rb = eq.rel(b);
    if rb.abs() < best.1.abs() {
        best = (b, rb);
    }
    let mut iters = 0usize;
    while iters < MAX_REFINE_ITERS {
        iters += 1;
        let width = b - a;
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break; // adjacent floats: resolved to machine precision
        }
        // Secant proposal on even iterations, safeguarded well inside the bracket;
        // forced bisection otherwise keeps worst-case convergence logarithmic.
        let secant = b - fb * (b - a) / (fb - fa);
        let x = if iters % 2 == 0
            && secant.is_finite()
            && secant > a + 0.01 * width
            && secant < b - 0.01 * width
        {
            secant
        } else {
            mid
        };
        let fx = eq.f(x);
        let rx = fx / x.max(1.0);
        if rx.abs() < best.1.abs() {
            best = (x, rx);
        }
        if fx == 0.0 {
            return Ok((x, 0.0));
        }
        if (fx > 0.0) == (fa > 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    let (u, res) = best;
    if res.abs() < RESIDUAL_TOL {
        return Ok((u, res));
    }
    // At extreme junction stiffness F is so steep that one ulp of u moves F by more
    // than the tolerance; a sign change across an ulp-wide bracket is then a stronger
    // certificate than any residual bound.
    let ulp = f64::EPSILON * b.abs().max(1.0);
    if fa * fb < 0.0 && (b - a) <= 4.0 * ulp {
        return Ok((u, res));
    }
    Err(Error::ConvergenceFailure {
        bracket_lo: a,
        bracket_hi: b,
        iterations: iters,
        residual: res,
    })
}

/// Lowest `n_modes` antisymmetric eigenfrequencies for the given parameters.
pub fn solve_spectrum(p: &CircuitParams, n_modes: usize) -> Result<SpectrumResult> {
    let d = derive(p)?;
    if n_modes == 0 {
        return Err(Error::InvalidParameter {
            field: "n_modes",
            message: "need at least one mode".into(),
        });
    }
    let eq = SpectrumEq::new(p, &d);
    let mut roots: Vec<(f64, f64)> = Vec::with_capacity(n_modes + 1);
    let mut branch_count = 0usize;
    let max_intervals = 4 * n_modes + 16;
    while roots.len() < n_modes && branch_count < max_intervals {
        let m = branch_count as f64;
        let lo = m * std::f64::consts::PI + INTERVAL_INSET;
        let hi = (m + 1.0) * std::f64::consts::PI - INTERVAL_INSET;
        let brackets = scan_interval(&eq, lo, hi);
        let scanned = brackets.len();
        let mut refined = 0usize;
        for br in brackets {
            let (u, res) = refine(&eq, br)?;
            if let Some(&(u_prev, _)) = roots.last() {
                if (u - u_prev).abs() < 1e-12 * u.max(1.0) {
                    return Err(Error::BranchMiscount {
                        scanned,
                        refined,
                    });
                }
            }
            roots.push((u, res));
            refined += 1;
        }
        if refined != scanned {
            return Err(Error::BranchMiscount { scanned, refined });
        }
        branch_count += 1;
    }
    if roots.len() < n_modes {
        return Err(Error::BranchMiscount {
            scanned: roots.len(),
            refined: n_modes,
        });
    }
    roots.truncate(n_modes);
    let scale = 2.0 * d.v / p.length;
    let omegas: Vec<f64> = roots.iter().map(|&(u, _)| u * scale).collect();
    let residuals: Vec<f64> = roots.iter().map(|&(_, r)| r).collect();
    let plasma_branch_index = omegas
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (*a - d.omega_p).abs().total_cmp(&(*b - d.omega_p).abs())
        })
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(SpectrumResult {
        omegas,
        residuals,
        branch_count,
        plasma_branch_index,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub i_c: f64,
    pub spectrum: SpectrumResult,
}

/// Minimum frequency gap between adjacent branches over a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchGap {
    /// Lower branch of the adjacent pair (0-based).
    pub lower_branch: usize,
    pub min_gap: f64,
    pub at_i_c: f64,
    pub at_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub branch_gaps: Vec<BranchGap>,
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter {
            field: "sweep",
            message: "empty I_c grid".into(),
        });
    }
    for w in grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidParameter {
                field: "sweep",
                message: format!("grid not strictly increasing at {} -> {}", w[0], w[1]),
            });
        }
    }
    if !grid.iter().all(|x| x.is_finite() && *x > 0.0) {
        return Err(Error::InvalidParameter {
            field: "sweep",
            message: "grid values must be finite and positive".into(),
        });
    }
    Ok(())
}

/// Branch-gap summary of an already-solved sweep (branches labelled by sorted order).
pub fn assemble_sweep(points: Vec<SweepPoint>, n_modes: usize) -> SweepResult {
    let mut branch_gaps = Vec::new();
    for b in 0..n_modes.saturating_sub(1) {
        let mut gap = (f64::INFINITY, 0.0, 0usize);
        for (i, pt) in points.iter().enumerate() {
            let g = pt.spectrum.omegas[b + 1] - pt.spectrum.omegas[b];
            if g < gap.0 {
                gap = (g, pt.i_c, i);
            }
        }
        branch_gaps.push(BranchGap {
            lower_branch: b,
            min_gap: gap.0,
            at_i_c: gap.1,
            at_index: gap.2,
        });
    }
    SweepResult { points, branch_gaps }
}

/// Solve the spectrum over an I_c grid (sequential; the grid points are independent).
pub fn sweep_spectrum(p: &CircuitParams, grid: &[f64], n_modes: usize) -> Result<SweepResult> {
    validate_grid(grid)?;
    let points = grid
        .iter()
        .enumerate()
        .map(|(index, &i_c)| {
            solve_spectrum(&p.with_i_c(i_c), n_modes)
                .map(|spectrum| SweepPoint { i_c, spectrum })
                .map_err(|e| Error::SweepPoint {
                    index,
                    i_c,
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_sweep(points, n_modes))
}

/// Logarithmically spaced grid with exact endpoints.
pub fn log_grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![min];
    }
    let ratio = max / min;
    (0..n)
        .map(|i| match i {
            0 => min,
            i if i == n - 1 => max,
            i => min * ratio.powf(i as f64 / (n - 1) as f64),
        })
        .collect()
}

/// Uniformly spaced grid with exact endpoints.
pub fn linear_grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![min];
    }
    let step = (max - min) / (n - 1) as f64;
    (0..n)
        .map(|i| match i {
            0 => min,
            i if i == n - 1 => max,
            i => min + step * i as f64,
        })
        .collect()
}

/// Default critical-current sweep: 0.1 uA to 10 uA, 200 points, log spacing,
/// chosen so omega_p traverses the lowest antisymmetric modes of the demo geometry.
pub fn default_sweep_grid() -> Vec<f64> {
    log_grid(1e-7, 1e-5, 200)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::table_demo_params;
    use crate::constants::TWO_PI;
    use approx::assert_relative_eq;

    #[test]
    fn fundamental_at_one_microamp() {
        let res = solve_spectrum(&table_demo_params(), 3).unwrap();
        // Frozen from an independent dense-scan + bisection run. The lower hybridized
        // branch sits below the bare 5 GHz mode: the junction-line repulsion is strong.
        assert_relative_eq!(res.omegas[0], 27_881_932_456.0, max_relative = 1e-10);
        assert_relative_eq!(res.omegas[0] / TWO_PI, 4.43754737333e9, max_relative = 1e-10);
        assert_relative_eq!(res.omegas[1] / TWO_PI, 6.97688526926e9, max_relative = 1e-10);
        assert_relative_eq!(res.omegas[2] / TWO_PI, 15.2121563426e9, max_relative = 1e-10);
        assert!(res.residuals.iter().all(|r| r.abs() < RESIDUAL_TOL));
        // Plasma at 6.365 GHz -> nearest root is the second branch.
        assert_eq!(res.plasma_branch_index, 1);
    }

    #[test]
    fn matches_in_test_bisection_oracle() {
        // Plain bisection on a dense grid, sharing nothing with solve_spectrum
        // beyond the equation itself.
        let p = table_demo_params();
        let d = derive(&p).unwrap();
        let coef = p.l * p.length / d.l_j;
        let u_p = d.omega_p * p.length / (2.0 * d.v);
        let f = |u: f64| u - (u.cos() / u.sin()) * coef * (1.0 - (u / u_p).powi(2));
        let mut roots = Vec::new();
        let n = 2_000_000;
        for m in 0..2 {
            let lo = m as f64 * std::f64::consts::PI + 1e-9;
            let hi = (m + 1) as f64 * std::f64::consts::PI - 1e-9;
            let step = (hi - lo) / n as f64;
            let mut ua = lo;
            let mut fa = f(ua);
            for i in 1..=n {
                let ub = lo + step * i as f64;
                let fb = f(ub);
                if fa * fb < 0.0 {
                    let (mut a, mut b) = (ua, ub);
                    let mut ga = fa;
                    for _ in 0..200 {
                        let mid = 0.5 * (a + b);
                        if mid <= a || mid >= b {
                            break;
                        }
                        let gm = f(mid);
                        if gm == 0.0 {
                            a = mid;
                            b = mid;
                            break;
                        }
                        if (gm > 0.0) == (ga > 0.0) {
                            a = mid;
                            ga = gm;
                        } else {
                            b = mid;
                        }
                    }
                    roots.push(0.5 * (a + b));
                }
                ua = ub;
                fa = fb;
            }
        }
        let res = solve_spectrum(&p, 3).unwrap();
        assert_eq!(roots.len(), 3);
        let scale = 2.0 * d.v / p.length;
        for (oracle_u, omega) in roots.iter().zip(&res.omegas) {
            assert_relative_eq!(oracle_u * scale, *omega, max_relative = 1e-12);
        }
    }

    #[test]
    fn stiff_junction_limit() {
        // Coefficient l L / L_J = 1e4: roots at the antisymmetric asymptotes.
        let p = table_demo_params().with_i_c(6.58212e-4);
        let d = derive(&p).unwrap();
        assert!(p.l * p.length / d.l_j >= 0.999e4);
        let res = solve_spectrum(&p, 3).unwrap();
        for (m, omega) in res.omegas.iter().enumerate() {
            let bare = (2 * m + 1) as f64 * std::f64::consts::PI * d.v / p.length;
            assert_relative_eq!(*omega, bare, max_relative = 1e-3);
        }
    }

    #[test]
    fn extreme_stiffness_uses_bracket_certificate() {
        // I_c = 1 kA: F is so steep at the root that the 1e-10 residual is below the
        // f64 floor; the sign-change certificate must still accept the roots.
        let p = table_demo_params().with_i_c(1e3);
        let d = derive(&p).unwrap();
        let res = solve_spectrum(&p, 3).unwrap();
        let expect = [5e9, 15e9, 25e9];
        for (omega, f_ghz) in res.omegas.iter().zip(expect) {
            assert_relative_eq!(omega / TWO_PI, f_ghz, max_relative = 1e-3);
        }
        assert!((res.omegas[0] * p.length / (2.0 * d.v) - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn open_junction_limit() {
        // Decoupled halves need the whole junction admittance small: tiny I_c AND
        // tiny C_J. The first branch interval then holds a collapsing series-LC root
        // (L_J against cL/4), and the pole-approaching roots follow from the second.
        let p = CircuitParams {
            c_j: 1e-18,
            ..table_demo_params().with_i_c(6.58212e-12)
        };
        let d = derive(&p).unwrap();
        assert!(p.l * p.length / d.l_j <= 1.001e-4);
        let res = solve_spectrum(&p, 4).unwrap();
        let lc_series = 1.0 / (d.l_j * p.c * p.length / 4.0).sqrt();
        assert_relative_eq!(res.omegas[0], lc_series, max_relative = 1e-2);
        for m in 1..=3 {
            let pole = 2.0 * m as f64 * std::f64::consts::PI * d.v / p.length;
            assert_relative_eq!(res.omegas[m], pole, max_relative = 1e-3);
        }
    }

    #[test]
    fn residual_errors_at_pole() {
        let p = table_demo_params();
        let d = derive(&p).unwrap();
        // u = pi exactly (to f64) is within 1e-13 of the pole.
        let omega = std::f64::consts::PI * 2.0 * d.v / p.length;
        assert!(matches!(
            residual(omega, &p, &d),
            Err(Error::PoleProximity { .. })
        ));
        // Away from poles it evaluates, and vanishes at a solver root.
        let res = solve_spectrum(&p, 1).unwrap();
        let r = residual(res.omegas[0], &p, &d).unwrap();
        assert!(r.abs() < 1e-9);
    }

    #[test]
    fn no_root_reported_at_plasma_zero() {
        // The RHS changes sign at omega_p; that zero of the right-hand side is not a
        // root of F and must not be returned.
        let p = table_demo_params();
        let d = derive(&p).unwrap();
        let res = solve_spectrum(&p, 5).unwrap();
        for omega in &res.omegas {
            let rel = (omega - d.omega_p).abs() / d.omega_p;
            assert!(rel > 1e-4, "root at {omega} sits on omega_p = {}", d.omega_p);
        }
    }

    #[test]
    fn default_sweep_properties() {
        let grid = default_sweep_grid();
        assert_eq!(grid.len(), 200);
        assert_eq!(grid[0], 1e-7);
        assert_eq!(grid[199], 1e-5);
        let sweep = sweep_spectrum(&table_demo_params(), &grid, 4).unwrap();
        for pt in &sweep.points {
            assert!(pt.spectrum.residuals.iter().all(|r| r.abs() < RESIDUAL_TOL));
            for w in pt.spectrum.omegas.windows(2) {
                assert!(w[1] > w[0]);
            }
        }
        // Every branch is non-decreasing in I_c.
        for b in 0..4 {
            for w in sweep.points.windows(2) {
                assert!(
                    w[1].spectrum.omegas[b] >= w[0].spectrum.omegas[b] * (1.0 - 1e-12),
                    "branch {b} decreasing"
                );
            }
        }
        // The 1-2 anticrossing: a genuine minimum gap in the interior of the sweep.
        let gap12 = &sweep.branch_gaps[0];
        assert!(gap12.at_index > 0 && gap12.at_index < 199);
        assert_relative_eq!(gap12.at_i_c, 6.51734e-7, max_relative = 1e-3);
    }

    #[test]
    fn asymptote_approach_needs_large_detuning() {
        // On the default sweep the lowest branch never reaches its asymptotes closer
        // than ~0.7%: junction-line hybridization stays strong. Far outside
        // (I_c = 1e-4 A) it approaches the bare antisymmetric mode within 0.5%.
        let p = table_demo_params();
        let d = derive(&p).unwrap();
        let bare1 = std::f64::consts::PI * d.v / p.length;
        let near = solve_spectrum(&p.with_i_c(1e-5), 1).unwrap().omegas[0];
        assert!((near - bare1).abs() / bare1 > 5e-3);
        let far = solve_spectrum(&p.with_i_c(1e-4), 1).unwrap().omegas[0];
        assert!((far - bare1).abs() / bare1 < 5e-3);
        // Small-I_c end: the lowest branch is the junction mode loaded by the line
        // capacitance cL/4, a fixed fraction below omega_p.
        let d7 = derive(&p.with_i_c(1e-7)).unwrap();
        let w1 = solve_spectrum(&p.with_i_c(1e-7), 1).unwrap().omegas[0];
        let loaded = (p.c_j / (p.c_j + p.c * p.length / 4.0)).sqrt();
        assert_relative_eq!(w1 / d7.omega_p, loaded, max_relative = 2e-2);
    }

    #[test]
    fn grid_helpers() {
        let g = log_grid(1e-7, 1e-5, 200);
        assert_eq!(g.len(), 200);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let lin = linear_grid(1.0, 2.0, 5);
        assert_eq!(lin, vec![1.0, 1.25, 1.5, 1.75, 2.0]);
        assert!(validate_grid(&[1.0, 0.5]).is_err());
        assert!(validate_grid(&[]).is_err());
        assert!(validate_grid(&[-1.0, 1.0]).is_err());
    }
}
