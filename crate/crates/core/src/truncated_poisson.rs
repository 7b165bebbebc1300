//! Truncated (conditioned) Poisson machinery.
//!
//! For a rate `z > 0` and integer cutoff `k`, `Poi(z|k)` is a Poisson(z)
//! variable conditioned on being at least `k`. The unnormalized tail series
//! is `f_k(z) = sum_{j>=k} z^j/j!` and the tail probability is
//! `p_k(z) = e^{-z} f_k(z)`. By convention `f_j(z) = e^z` for every `j <= 0`,
//! which keeps the factorial-moment formulas uniform at small cutoffs.
//!
//! The mean equation `z f_{k-1}(z)/f_k(z) = mu` has a unique root for every
//! `mu > k`; [`solve_z`] computes it. These roots are what tie the sequence
//! model's edge density `M/N` to the per-side rates `z_i`, `z_o`.

use crate::error::{Error, Result};

/// ln(n!) — exact accumulation for small n, Stirling series beyond.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 16 {
        let mut acc = 0.0;
        for j in 2..=n {
            acc += (j as f64).ln();
        }
        return acc;
    }
    let x = n as f64;
    let x2 = x * x;
    (x + 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x * x2)
        + 1.0 / (1260.0 * x2 * x2 * x)
}

fn check_rate(z: f64) -> Result<()> {
    if z.is_nan() || z <= 0.0 || z.is_infinite() {
        return Err(Error::Domain(format!(
            "Poisson rate must be positive, got {z}"
        )));
    }
    Ok(())
}

/// Tail series `f_k(z) = sum_{j>=k} z^j/j!`; `e^z` for `k <= 0`.
pub fn tail_series(z: f64, k: i64) -> Result<f64> {
    check_rate(z)?;
    if k <= 0 {
        return Ok(z.exp());
    }
    let k = k as u64;
    if z <= k as f64 + 30.0 {
        // Direct tail summation: all terms nonnegative, no cancellation.
        let mut term = pow_over_factorial(z, k);
        let mut sum = term;
        let mut j = k;
        while term > sum * 1e-18 {
            j += 1;
            term *= z / j as f64;
            sum += term;
        }
        Ok(sum)
    } else {
        // Head is far below the Poisson bulk here, so e^z - head is safe.
        let mut head = 0.0f64;
        let mut carry = 0.0f64;
        let mut term = 1.0f64;
        for j in 0..k {
            if j > 0 {
                term *= z / j as f64;
            }
            let y = term - carry;
            let t = head + y;
            carry = (t - head) - y;
            head = t;
        }
        Ok(z.exp() - head)
    }
}

/// z^k / k!, by repeated multiplication with a log-space fallback on underflow.
fn pow_over_factorial(z: f64, k: u64) -> f64 {
    let mut value = 1.0f64;
    for j in 1..=k {
        value *= z / j as f64;
    }
    if value > 0.0 {
        value
    } else {
        (k as f64 * z.ln() - ln_factorial(k)).exp()
    }
}

/// Tail probability `p_k(z) = P(Poisson(z) >= k) = e^{-z} f_k(z)`; 1 for `k <= 0`.
pub fn tail_prob(z: f64, k: i64) -> Result<f64> {
    check_rate(z)?;
    if k <= 0 {
        return Ok(1.0);
    }
    if z <= 700.0 {
        return Ok((tail_series(z, k)? * (-z).exp()).min(1.0));
    }
    // Rates beyond e^z overflow: work with pmf terms in log space.
    let k = k as u64;
    if z <= k as f64 + 30.0 {
        let mut term = (k as f64 * z.ln() - z - ln_factorial(k)).exp();
        let mut sum = term;
        let mut j = k;
        while term > sum * 1e-18 {
            j += 1;
            term *= z / j as f64;
            sum += term;
        }
        Ok(sum.min(1.0))
    } else {
        let mut head = 0.0f64;
        for j in 0..k {
            head += (j as f64 * z.ln() - z - ln_factorial(j)).exp();
        }
        Ok((1.0 - head).clamp(0.0, 1.0))
    }
}

/// `E[Poi(z|k)] = z f_{k-1}(z)/f_k(z)`, strictly increasing in z with infimum k.
pub fn cond_mean(z: f64, k: i64) -> Result<f64> {
    Ok(z * tail_prob(z, k - 1)? / tail_prob(z, k)?)
}

/// Second factorial moment `E[X(X-1)] = z^2 f_{k-2}(z)/f_k(z)` of `Poi(z|k)`.
pub fn cond_second_factorial_moment(z: f64, k: i64) -> Result<f64> {
    Ok(z * z * tail_prob(z, k - 2)? / tail_prob(z, k)?)
}

/// `Var(Poi(z|k)) = E[X(X-1)] + m - m^2` with `m = E[Poi(z|k)]`.
pub fn cond_variance(z: f64, k: i64) -> Result<f64> {
    let m = cond_mean(z, k)?;
    Ok(cond_second_factorial_moment(z, k)? + m - m * m)
}

/// Solves `E[Poi(z|k)] = mean_target` for z.
///
/// Unique by strict monotonicity; requires `mean_target > k` (for positive k).
/// Bisection brings the bracket in, a few Newton steps polish the root to
/// relative accuracy 1e-12 on the mean equation.
pub fn solve_z(mean_target: f64, k: i64) -> Result<f64> {
    if !mean_target.is_finite() || mean_target <= 0.0 {
        return Err(Error::Domain(format!(
            "mean target must be positive, got {mean_target}"
        )));
    }
    if k <= 0 {
        // Unconditioned Poisson (and the f_{j<=0} = e^z convention): mean is z.
        return Ok(mean_target);
    }
    if mean_target <= k as f64 {
        return Err(Error::NoRoot {
            target: mean_target,
            cutoff: k,
        });
    }
    // cond_mean(z, k) > z for all z, so z = mean_target is an upper bracket;
    // cond_mean -> k < mean_target as z -> 0+ gives a lower one.
    let mut hi = mean_target;
    while cond_mean(hi, k)? < mean_target {
        hi *= 2.0;
    }
    let mut lo = hi;
    loop {
        let next = lo / 2.0;
        if !(cond_mean(next, k)?.is_finite()) || next < 1e-280 {
            lo = next;
            break;
        }
        lo = next;
        if cond_mean(lo, k)? < mean_target {
            break;
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if cond_mean(mid, k)? < mean_target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton refinement: d/dz E[Poi(z|k)] = Var(Poi(z|k)) / z.
    let mut z = 0.5 * (lo + hi);
    for _ in 0..4 {
        let m = cond_mean(z, k)?;
        let v = cond_variance(z, k)?;
        if v <= 0.0 {
            break;
        }
        let step = (m - mean_target) * z / v;
        let next = z - step;
        if next > 0.0 && next.is_finite() {
            z = next;
        }
        if step.abs() <= 1e-14 * z {
            break;
        }
    }
    Ok(z)
}

/// Rate and cutoff of a conditioned Poisson `Poi(z|k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedPoissonParams {
    z: f64,
    k: u32,
}

impl TruncatedPoissonParams {
    pub fn new(z: f64, k: u32) -> Result<Self> {
        check_rate(z)?;
        Ok(Self { z, k })
    }

    /// Parameters whose conditioned mean equals `mean_target`.
    pub fn from_mean(mean_target: f64, k: u32) -> Result<Self> {
        let z = solve_z(mean_target, k as i64)?;
        Ok(Self { z, k })
    }

    pub fn rate(&self) -> f64 {
        self.z
    }

    pub fn cutoff(&self) -> u32 {
        self.k
    }

    pub fn tail_series(&self) -> f64 {
        tail_series(self.z, self.k as i64).expect("rate validated at construction")
    }

    pub fn tail_prob(&self) -> f64 {
        tail_prob(self.z, self.k as i64).expect("rate validated at construction")
    }

    pub fn mean(&self) -> f64 {
        cond_mean(self.z, self.k as i64).expect("rate validated at construction")
    }

    pub fn second_factorial_moment(&self) -> f64 {
        cond_second_factorial_moment(self.z, self.k as i64).expect("rate validated at construction")
    }

    pub fn variance(&self) -> f64 {
        cond_variance(self.z, self.k as i64).expect("rate validated at construction")
    }

    /// pmf of `Poi(z|k)` at j (zero below the cutoff).
    pub fn pmf(&self, j: u64) -> f64 {
        if j < self.k as u64 {
            return 0.0;
        }
        (j as f64 * self.z.ln() - self.z - ln_factorial(j)).exp() / self.tail_prob()
    }
}
