//! Truncated power series: exact big-rational coefficients, plus a
//! log-space floating-point mirror for sizes where exact arithmetic is
//! too slow.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

/// n! as a big integer.
pub fn factorial_big(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for j in 2..=n {
        acc *= BigInt::from(j);
    }
    acc
}

/// Binomial coefficient C(n, k) as a big integer.
pub fn binomial_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    acc
}

/// Natural log of a positive big integer, accurate to ~1e-15 relative.
pub fn ln_big(x: &BigInt) -> f64 {
    assert!(x.is_positive(), "ln_big requires a positive integer");
    let bits = x.bits();
    if bits <= 52 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 53;
    let top = (x >> shift).to_f64().expect("53 bits fit in f64");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// A power series truncated at a fixed degree, with exact rational
/// coefficients. Degree-`<= D` coefficients of products are exact; higher
/// degrees are discarded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSeries {
    coeffs: Vec<BigRational>,
}

impl ExactSeries {
    /// Series with the given coefficients; index is the degree.
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "series needs at least the degree-0 coefficient"
        );
        Self { coeffs }
    }

    /// The zero series truncated at `degree`.
    pub fn zero(degree: usize) -> Self {
        Self {
            coeffs: vec![BigRational::zero(); degree + 1],
        }
    }

    /// The constant-one series truncated at `degree`.
    pub fn one(degree: usize) -> Self {
        let mut s = Self::zero(degree);
        s.coeffs[0] = BigRational::one();
        s
    }

    /// Truncation of `f_k(x) = sum_{j>=k} x^j/j!`: zero below degree k,
    /// `1/j!` from degree k on.
    pub fn tail_series(k: usize, degree: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); degree + 1];
        let mut fact = factorial_big(k.min(degree + 1));
        for (j, c) in coeffs.iter_mut().enumerate().take(degree + 1).skip(k) {
            if j > k {
                fact *= BigInt::from(j);
            }
            *c = BigRational::new(BigInt::one(), fact.clone());
        }
        Self { coeffs }
    }

    pub fn truncation_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of degree `j` (zero beyond the truncation degree).
    pub fn coeff(&self, j: usize) -> BigRational {
        self.coeffs
            .get(j)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Product, truncated at the smaller of the two truncation degrees.
    pub fn mul(&self, other: &Self) -> Self {
        let degree = self.truncation_degree().min(other.truncation_degree());
        let mut out = vec![BigRational::zero(); degree + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(degree + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(degree + 1 - i) {
                if b.is_zero() {
                    continue;
                }
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    /// Power by iterated squaring.
    pub fn pow(&self, exponent: u64) -> Self {
        let mut result = Self::one(self.truncation_degree());
        let mut base = self.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }
}

/// Floating-point mirror of [`ExactSeries`] storing natural logs of the
/// (nonnegative) coefficients; `-inf` encodes a zero coefficient. Relative
/// error stays near machine precision because every coefficient in our
/// series is a sum of positive terms.
#[derive(Debug, Clone)]
pub struct LogSeries {
    ln_coeffs: Vec<f64>,
}

impl LogSeries {
    pub fn one(degree: usize) -> Self {
        let mut ln_coeffs = vec![f64::NEG_INFINITY; degree + 1];
        ln_coeffs[0] = 0.0;
        Self { ln_coeffs }
    }

    /// Log-space truncation of `f_k`.
    pub fn tail_series(k: usize, degree: usize) -> Self {
        let mut ln_coeffs = vec![f64::NEG_INFINITY; degree + 1];
        for (j, c) in ln_coeffs.iter_mut().enumerate().take(degree + 1).skip(k) {
            *c = -crate::truncated_poisson::ln_factorial(j as u64);
        }
        Self { ln_coeffs }
    }

    pub fn truncation_degree(&self) -> usize {
        self.ln_coeffs.len() - 1
    }

    /// ln of the degree-`j` coefficient (`-inf` if the coefficient is zero).
    pub fn ln_coeff(&self, j: usize) -> f64 {
        self.ln_coeffs.get(j).copied().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let degree = self.truncation_degree().min(other.truncation_degree());
        let mut out = vec![f64::NEG_INFINITY; degree + 1];
        for (d, slot) in out.iter_mut().enumerate() {
            // log-sum-exp over i + j = d, shifted by the max exponent
            let mut max = f64::NEG_INFINITY;
            for i in 0..=d {
                let v = self.ln_coeffs[i] + other.ln_coeffs[d - i];
                if v > max {
                    max = v;
                }
            }
            if max == f64::NEG_INFINITY {
                continue;
            }
            let mut acc = 0.0;
            for i in 0..=d {
                let v = self.ln_coeffs[i] + other.ln_coeffs[d - i];
                if v > f64::NEG_INFINITY {
                    acc += (v - max).exp();
                }
            }
            *slot = max + acc.ln();
        }
        Self { ln_coeffs: out }
    }

    pub fn pow(&self, exponent: u64) -> Self {
        let mut result = Self::one(self.truncation_degree());
        let mut base = self.clone();
        let mut e = exponent;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }
}
