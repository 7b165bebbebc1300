//! Asymptotic count formulas for (k1,k2)-dicores and the diagnostic
//! functions H, K, rho*, u_min behind the source/sink-set bounds.
//!
//! Counts are returned in natural-log scale with a full component
//! breakdown: the magnitudes overflow any fixed-width float, and the
//! breakdown makes discrepancies attributable to a specific factor.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::truncated_poisson::{cond_mean, cond_variance, ln_factorial, solve_z, tail_prob};

/// Default density slack: the formulas require M/N above max(k1,k2) by a
/// fixed margin.
pub const DEFAULT_DENSITY_EPS: f64 = 0.05;

/// Default guard coefficient for the strongly-connected (1,1) count:
/// requires `M - N >= coeff * N^{2/3}`.
pub const DEFAULT_C11_GUARD_COEFF: f64 = 5.0;

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// ln f_k(z) computed as `z + ln p_k(z)`, safe for any rate.
fn ln_tail_series(z: f64, k: i64) -> Result<f64> {
    Ok(z + tail_prob(z, k)?.ln())
}

/// One side (in or out) of the dicore count formula.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SideComponent {
    /// Root of `E[Poi(z|k)] = M/N` for this side's cutoff.
    pub z: f64,
    /// `N ln f_k(z) - M ln z`.
    pub log_tail_power: f64,
    /// `-0.5 ln(2 pi N Var(Poi(z|k)))`.
    pub log_var_term: f64,
}

/// Log-scale estimate of the number of (k1,k2)-dicores (equivalently, of
/// k-strongly connected dicores) with component breakdown.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticCount {
    pub log_value: f64,
    pub log_m_factorial: f64,
    pub sides: [SideComponent; 2],
    /// `-M/N - (1/2) prod_j E[Poi(z_j|k_j - 1)]`, always nonpositive.
    pub simplicity_exponent: f64,
}

impl AsymptoticCount {
    /// Bookkeeping check: the components must sum to `log_value`.
    pub fn components_sum(&self) -> f64 {
        self.log_m_factorial
            + self.sides[0].log_tail_power
            + self.sides[0].log_var_term
            + self.sides[1].log_tail_power
            + self.sides[1].log_var_term
            + self.simplicity_exponent
    }
}

/// Log of the asymptotic dicore count
/// `exp(-M/N - (1/2) m_1 m_2) M! prod_j f_{k_j}(z_j)^N / (z_j^M sqrt(2 pi N Var_j))`
/// where `z_j` solves `E[Poi(z_j|k_j)] = M/N` and `m_j = E[Poi(z_j|k_j-1)]`.
pub fn dicore_count_asymptotic(
    n: usize,
    m: usize,
    k1: usize,
    k2: usize,
) -> Result<AsymptoticCount> {
    dicore_count_asymptotic_with_eps(n, m, k1, k2, DEFAULT_DENSITY_EPS)
}

pub fn dicore_count_asymptotic_with_eps(
    n: usize,
    m: usize,
    k1: usize,
    k2: usize,
    eps: f64,
) -> Result<AsymptoticCount> {
    if n == 0 {
        return Err(Error::Precondition("need at least one vertex".into()));
    }
    let density = m as f64 / n as f64;
    let kmax = k1.max(k2) as f64;
    if density < kmax + eps {
        return Err(Error::Precondition(format!(
            "density M/N = {density:.6} violates M/N >= max(k1,k2) + eps = {:.6}",
            kmax + eps
        )));
    }
    let mut sides = [SideComponent {
        z: 0.0,
        log_tail_power: 0.0,
        log_var_term: 0.0,
    }; 2];
    let mut cond_means_below = [0.0f64; 2];
    for (side, &k) in sides.iter_mut().zip([k1, k2].iter()) {
        let z = solve_z(density, k as i64)?;
        let var = cond_variance(z, k as i64)?;
        side.z = z;
        side.log_tail_power = n as f64 * ln_tail_series(z, k as i64)? - m as f64 * z.ln();
        side.log_var_term = -0.5 * (TAU * n as f64 * var).ln();
    }
    cond_means_below[0] = cond_mean(sides[0].z, k1 as i64 - 1)?;
    cond_means_below[1] = cond_mean(sides[1].z, k2 as i64 - 1)?;
    let simplicity_exponent = -density - 0.5 * cond_means_below[0] * cond_means_below[1];
    let log_m_factorial = ln_factorial(m as u64);
    let count = AsymptoticCount {
        log_value: 0.0,
        log_m_factorial,
        sides,
        simplicity_exponent,
    };
    Ok(AsymptoticCount {
        log_value: count.components_sum(),
        ..count
    })
}

/// Log-scale count of strongly connected (1,1)-cores with its correction
/// factor spelled out.
#[derive(Debug, Clone, Serialize)]
pub struct SccCount11 {
    pub log_value: f64,
    pub z: f64,
    pub log_m_factorial: f64,
    /// `2N ln f_1(z) - 2M ln z`.
    pub log_tail_power: f64,
    /// `-ln(2 pi N Var(Poi(z|1)))`.
    pub log_var_term: f64,
    /// `-M/N - z^2/2`.
    pub simplicity_exponent: f64,
    /// `(1 - z/f_1)^2 / (1 - z/(e^z f_1)) * exp[(z/f_1)(2 - e^{-z})]`,
    /// tending to 1 as z grows.
    pub correction_factor: f64,
}

impl SccCount11 {
    pub fn components_sum(&self) -> f64 {
        self.log_m_factorial
            + self.log_tail_power
            + self.log_var_term
            + self.simplicity_exponent
            + self.correction_factor.ln()
    }
}

/// The connectivity correction in the (1,1) count at rate z.
pub fn c11_correction(z: f64) -> Result<f64> {
    let f1 = crate::truncated_poisson::tail_series(z, 1)?;
    let ratio = z / f1;
    Ok((1.0 - ratio).powi(2) / (1.0 - z / (z.exp() * f1)) * (ratio * (2.0 - (-z).exp())).exp())
}

/// Number of strongly connected digraphs with all in/out degrees positive,
/// in the `M - N >> N^{2/3}` regime.
pub fn scc_core_count_11(n: usize, m: usize) -> Result<SccCount11> {
    scc_core_count_11_with_guard(n, m, DEFAULT_C11_GUARD_COEFF)
}

pub fn scc_core_count_11_with_guard(n: usize, m: usize, guard_coeff: f64) -> Result<SccCount11> {
    if n == 0 {
        return Err(Error::Precondition("need at least one vertex".into()));
    }
    let excess = m as f64 - n as f64;
    let needed = guard_coeff * (n as f64).powf(2.0 / 3.0);
    if excess < needed {
        return Err(Error::Precondition(format!(
            "M - N = {excess} below the guard {guard_coeff} * N^(2/3) = {needed:.3}"
        )));
    }
    let density = m as f64 / n as f64;
    let z = solve_z(density, 1)?;
    let var = cond_variance(z, 1)?;
    let count = SccCount11 {
        log_value: 0.0,
        z,
        log_m_factorial: ln_factorial(m as u64),
        log_tail_power: 2.0 * n as f64 * ln_tail_series(z, 1)? - 2.0 * m as f64 * z.ln(),
        log_var_term: -(TAU * n as f64 * var).ln(),
        simplicity_exponent: -density - z * z / 2.0,
        correction_factor: c11_correction(z)?,
    };
    Ok(SccCount11 {
        log_value: count.components_sum(),
        ..count
    })
}

/// Exponential-rate bound `H(rho, sigma)` controlling source sets of
/// relative size rho when the Chernoff parameter is free:
/// `rho log(1/rho) + (1-rho) log(1/(1-rho))
///  + sigma log((sigma - sigma rho)/(sigma - k1 rho))
///  - k1 rho log(k1 (1-rho)/(rho (sigma - k1 rho)))`.
pub fn rate_h(rho: f64, sigma: f64, k1: usize) -> f64 {
    let k = k1 as f64;
    rho * (1.0 / rho).ln()
        + (1.0 - rho) * (1.0 / (1.0 - rho)).ln()
        + sigma * ((sigma - sigma * rho) / (sigma - k * rho)).ln()
        - k * rho * (k * (1.0 - rho) / (rho * (sigma - k * rho))).ln()
}

/// Exponential-rate bound `K(rho, sigma)` when the Chernoff parameter is
/// pinned at 1: `rho log(1/rho) + (1-rho) log(1/(1-rho)) + sigma log(1 - rho + rho^2)`.
pub fn rate_k(rho: f64, sigma: f64) -> f64 {
    rho * (1.0 / rho).ln()
        + (1.0 - rho) * (1.0 / (1.0 - rho)).ln()
        + sigma * (1.0 - rho + rho * rho).ln()
}

/// Closed form of the second rho-derivative of K:
/// `-1/(rho(1-rho)) + sigma (1 + 2 rho(1-rho)) / (1 - rho(1-rho))^2`.
pub fn rate_k_second_derivative(rho: f64, sigma: f64) -> f64 {
    let q = rho * (1.0 - rho);
    -1.0 / q + sigma * (1.0 + 2.0 * q) / (1.0 - q).powi(2)
}

/// Threshold `rho* = 2 k1 / (k1 + sigma + sqrt((sigma - k1)(sigma + 3 k1)))`
/// below which the optimal Chernoff parameter stays above 1.
pub fn rho_star(sigma: f64, k1: usize) -> f64 {
    let k = k1 as f64;
    2.0 * k / (k + sigma + ((sigma - k) * (sigma + 3.0 * k)).sqrt())
}

/// Optimal Chernoff parameter `u_min = k1 (1-rho) / (rho (sigma - k1 rho))`.
pub fn u_min(rho: f64, sigma: f64, k1: usize) -> f64 {
    let k = k1 as f64;
    k * (1.0 - rho) / (rho * (sigma - k * rho))
}

/// The diagnostic quantities of the source-set bound at one point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundDiagnostics {
    pub rho: f64,
    pub sigma: f64,
    pub k1: usize,
    pub h: f64,
    pub k: f64,
    pub rho_star: f64,
    pub u_min: f64,
}

pub fn bound_diagnostics(rho: f64, sigma: f64, k1: usize) -> Result<BoundDiagnostics> {
    if !(rho > 0.0 && rho <= 0.5) {
        return Err(Error::Domain(format!(
            "rho must lie in (0, 1/2], got {rho}"
        )));
    }
    if sigma < k1 as f64 {
        return Err(Error::Domain(format!(
            "sigma = {sigma} must be at least k1 = {k1}"
        )));
    }
    Ok(BoundDiagnostics {
        rho,
        sigma,
        k1,
        h: rate_h(rho, sigma, k1),
        k: rate_k(rho, sigma),
        rho_star: rho_star(sigma, k1),
        u_min: u_min(rho, sigma, k1),
    })
}

/// Which scan a violation was found in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScanKind {
    H,
    K,
}

#[derive(Debug, Clone, Serialize)]
pub struct NegativityReport {
    pub sigma: f64,
    pub k1: usize,
    pub step: f64,
    pub rho_star: f64,
    /// Largest H over the scanned rho range and where it occurred.
    pub h_max: f64,
    pub h_argmax: f64,
    /// Largest K over `[rho*, 1/2]` when `sigma > 3 k1 / 2`.
    pub k_max: Option<f64>,
    pub k_argmax: Option<f64>,
    /// First nonnegative value encountered, if any (a failure, not an
    /// expected outcome).
    pub violation: Option<(ScanKind, f64)>,
}

/// Grid scan asserting `H < 0` on `(0, min(rho*, 1/2)]` and, when
/// `sigma > 3 k1/2`, `K < 0` on `[rho*, 1/2]`. The H grid is refined
/// geometrically near rho -> 0 where H vanishes.
pub fn scan_negativity(sigma: f64, k1: usize, step: f64) -> Result<NegativityReport> {
    if k1 < 2 {
        return Err(Error::Domain(format!("k1 must be at least 2, got {k1}")));
    }
    if sigma <= k1 as f64 {
        return Err(Error::Domain(format!(
            "sigma = {sigma} must exceed k1 = {k1}"
        )));
    }
    if !(step > 0.0 && step <= 1e-3) {
        return Err(Error::Domain(format!(
            "grid step must lie in (0, 1e-3], got {step}"
        )));
    }
    let rs = rho_star(sigma, k1);
    let h_end = rs.min(0.5);

    let mut report = NegativityReport {
        sigma,
        k1,
        step,
        rho_star: rs,
        h_max: f64::NEG_INFINITY,
        h_argmax: f64::NAN,
        k_max: None,
        k_argmax: None,
        violation: None,
    };

    let mut grid: Vec<f64> = Vec::new();
    // refinement toward the open endpoint at 0
    let mut fine = step;
    for _ in 0..12 {
        fine /= 2.0;
        grid.push(fine);
    }
    let mut i = 1usize;
    loop {
        let rho = i as f64 * step;
        if rho >= h_end {
            break;
        }
        grid.push(rho);
        i += 1;
    }
    grid.push(h_end);
    for &rho in &grid {
        let h = rate_h(rho, sigma, k1);
        if h > report.h_max {
            report.h_max = h;
            report.h_argmax = rho;
        }
        if h >= 0.0 && report.violation.is_none() {
            report.violation = Some((ScanKind::H, rho));
        }
    }

    if sigma > 1.5 * k1 as f64 {
        let mut k_max = f64::NEG_INFINITY;
        let mut k_argmax = f64::NAN;
        let mut rho = rs;
        loop {
            let k = rate_k(rho, sigma);
            if k > k_max {
                k_max = k;
                k_argmax = rho;
            }
            if k >= 0.0 && report.violation.is_none() {
                report.violation = Some((ScanKind::K, rho));
            }
            if rho >= 0.5 {
                break;
            }
            rho = (rho + step).min(0.5);
        }
        report.k_max = Some(k_max);
        report.k_argmax = Some(k_argmax);
    }
    Ok(report)
}
