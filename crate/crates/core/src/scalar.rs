//! Scalars for pointwise geometry: plain `f64` and truncated power series in `t`.
//!
//! Writing the pointwise curvature formulas once over [`Scalar`] lets the
//! same code evaluate a Ricci tensor at a point and expand it order by order
//! along a Fefferman–Graham series.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    fn from_f64(x: f64) -> Self;

    /// Leading (constant) part.
    fn lead(&self) -> f64;

    /// Multiply by a plain float.
    fn scale(self, c: f64) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn lead(&self) -> f64 {
        *self
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
}

pub const TPS_CAP: usize = 24;

/// Truncated power series `Σ_{k<len} c_k t^k`.
///
/// Binary operations truncate to the shorter operand's length, so mixing a
/// constant ([`Scalar::from_f64`], full length) with a series keeps the
/// series length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tps {
    coef: [f64; TPS_CAP],
    len: usize,
}

impl Tps {
    pub fn new(len: usize) -> Self {
        assert!(len <= TPS_CAP, "series length {len} exceeds {TPS_CAP}");
        Self {
            coef: [0.0; TPS_CAP],
            len,
        }
    }

    pub fn from_coeffs(c: &[f64], len: usize) -> Self {
        let mut s = Self::new(len);
        for (k, v) in c.iter().take(len).enumerate() {
            s.coef[k] = *v;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn coeff(&self, k: usize) -> f64 {
        if k < self.len {
            self.coef[k]
        } else {
            0.0
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coef[..self.len]
    }

    /// `d/dt`; the top coefficient is lost to truncation.
    pub fn derivative(&self) -> Self {
        let mut d = Self::new(self.len);
        for k in 1..self.len {
            d.coef[k - 1] = k as f64 * self.coef[k];
        }
        d
    }

    /// Multiplication by `t`.
    pub fn times_t(&self) -> Self {
        let mut d = Self::new(self.len);
        for k in 1..self.len {
            d.coef[k] = self.coef[k - 1];
        }
        d
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs().iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
}

impl Scalar for Tps {
    fn from_f64(x: f64) -> Self {
        let mut s = Self::new(TPS_CAP);
        s.coef[0] = x;
        s
    }
    fn lead(&self) -> f64 {
        self.coef[0]
    }
    fn scale(mut self, c: f64) -> Self {
        for v in &mut self.coef[..self.len] {
            *v *= c;
        }
        self
    }
}

impl Add for Tps {
    type Output = Tps;
    fn add(self, rhs: Tps) -> Tps {
        let len = self.len.min(rhs.len);
        let mut out = Tps::new(len);
        for k in 0..len {
            out.coef[k] = self.coef[k] + rhs.coef[k];
        }
        out
    }
}

impl Sub for Tps {
    type Output = Tps;
    fn sub(self, rhs: Tps) -> Tps {
        let len = self.len.min(rhs.len);
        let mut out = Tps::new(len);
        for k in 0..len {
            out.coef[k] = self.coef[k] - rhs.coef[k];
        }
        out
    }
}

impl Neg for Tps {
    type Output = Tps;
    fn neg(self) -> Tps {
        self.scale(-1.0)
    }
}

impl Mul for Tps {
    type Output = Tps;
    fn mul(self, rhs: Tps) -> Tps {
        let len = self.len.min(rhs.len);
        let mut out = Tps::new(len);
        for i in 0..len {
            let a = self.coef[i];
            if a == 0.0 {
                continue;
            }
            for j in 0..len - i {
                out.coef[i + j] += a * rhs.coef[j];
            }
        }
        out
    }
}

impl Div for Tps {
    type Output = Tps;
    /// Series division; requires a nonzero constant term in the divisor.
    fn div(self, rhs: Tps) -> Tps {
        let len = self.len.min(rhs.len);
        let b0 = rhs.coef[0];
        let mut q = Tps::new(len);
        for k in 0..len {
            let mut acc = self.coef[k];
            for j in 1..=k {
                acc -= rhs.coef[j] * q.coef[k - j];
            }
            q.coef[k] = acc / b0;
        }
        q
    }
}

impl AddAssign for Tps {
    fn add_assign(&mut self, rhs: Tps) {
        *self = *self + rhs;
    }
}

impl SubAssign for Tps {
    fn sub_assign(&mut self, rhs: Tps) {
        *self = *self - rhs;
    }
}
