//! Truncated Taylor series ("jets") for exact high-order derivatives of
//! closed-form profiles.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Taylor coefficients `c[m] = f^(m)(x0) / m!` of a function around a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<const N: usize>(pub [f64; N]);

impl<const N: usize> Jet<N> {
    pub fn constant(c: f64) -> Self {
        let mut a = [0.0; N];
        a[0] = c;
        Self(a)
    }

    /// The independent variable expanded around `x0`.
    pub fn variable(x0: f64) -> Self {
        let mut a = [0.0; N];
        a[0] = x0;
        if N > 1 {
            a[1] = 1.0;
        }
        Self(a)
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// `m`-th derivative at the expansion point.
    pub fn derivative(&self, m: usize) -> f64 {
        let factorial: f64 = (1..=m).map(|j| j as f64).product();
        self.0[m] * factorial
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|c| c * s))
    }

    /// `(sech^2 u, tanh u)` via `S' = -2 S T u'`, `T' = S u'`.
    pub fn sech2_tanh(&self) -> (Self, Self) {
        let u = self.0;
        let mut s = [0.0; N];
        let mut t = [0.0; N];
        let u0 = u[0];
        s[0] = crate::refwaves::sech2(u0);
        t[0] = u0.tanh();
        // du[m] = coefficient m of u'
        let du: Vec<f64> = (0..N.saturating_sub(1)).map(|m| (m + 1) as f64 * u[m + 1]).collect();
        for n in 0..N.saturating_sub(1) {
            let mut st_du = 0.0;
            let mut s_du = 0.0;
            for j in 0..=n {
                let st: f64 = (0..=j).map(|i| s[i] * t[j - i]).sum();
                st_du += st * du[n - j];
                s_du += s[j] * du[n - j];
            }
            s[n + 1] = -2.0 * st_du / (n + 1) as f64;
            t[n + 1] = s_du / (n + 1) as f64;
        }
        (Self(s), Self(t))
    }

    pub fn recip(&self) -> Self {
        let a = self.0;
        let mut r = [0.0; N];
        r[0] = 1.0 / a[0];
        for n in 1..N {
            let acc: f64 = (1..=n).map(|j| a[j] * r[n - j]).sum();
            r[n] = -acc / a[0];
        }
        Self(r)
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut a = self.0;
        a.iter_mut().zip(rhs.0).for_each(|(x, y)| *x += y);
        Self(a)
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut a = self.0;
        a.iter_mut().zip(rhs.0).for_each(|(x, y)| *x -= y);
        Self(a)
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut c = [0.0; N];
        for (n, cn) in c.iter_mut().enumerate() {
            *cn = (0..=n).map(|j| self.0[j] * rhs.0[n - j]).sum();
        }
        Self(c)
    }
}

impl<const N: usize> Mul<f64> for Jet<N> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl<const N: usize> Add<f64> for Jet<N> {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.0[0] += rhs;
        self
    }
}

impl<const N: usize> Div for Jet<N> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}
