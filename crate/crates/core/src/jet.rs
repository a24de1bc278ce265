//! Third-order bivariate Taylor jets.
//!
//! A [`Jet`] stores the normalized Taylor coefficients `c[i][j]` of
//! `f(x1 + e1, x2 + e2) = sum c[i][j] e1^i e2^j` for `i + j <= 3`. Arithmetic on
//! jets is truncated polynomial arithmetic, so every partial derivative up to
//! third order propagates exactly through products, quotients and smooth
//! univariate maps.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

pub const ORDER: usize = 3;
const LEN: usize = 10;

/// Monomial exponents in storage order: degree 0, 1, 2, 3.
const EXPONENTS: [(usize, usize); LEN] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

const fn index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

const fn product_table() -> [(u8, u8, u8); 35] {
    let mut out = [(0u8, 0u8, 0u8); 35];
    let mut n = 0;
    let mut a = 0;
    while a < LEN {
        let mut b = 0;
        while b < LEN {
            let (ia, ja) = EXPONENTS[a];
            let (ib, jb) = EXPONENTS[b];
            if ia + ja + ib + jb <= ORDER {
                out[n] = (a as u8, b as u8, index(ia + ib, ja + jb) as u8);
                n += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
}

const PRODUCTS: [(u8, u8, u8); 35] = product_table();

const FACTORIAL: [f64; 4] = [1.0, 1.0, 2.0, 6.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    c: [f64; LEN],
}

impl Jet {
    pub const fn constant(v: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = v;
        Self { c }
    }

    /// The coordinate `x1` at value `v`.
    pub const fn var1(v: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = v;
        c[1] = 1.0;
        Self { c }
    }

    /// The coordinate `x2` at value `v`.
    pub const fn var2(v: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = v;
        c[2] = 1.0;
        Self { c }
    }

    /// Function of `x1` only, from its derivatives `[f, f', f'', f''']`.
    pub fn from_x1_derivatives(d: &[f64]) -> Self {
        let mut c = [0.0; LEN];
        for (k, dk) in d.iter().take(ORDER + 1).enumerate() {
            c[index(k, 0)] = dk / FACTORIAL[k];
        }
        Self { c }
    }

    /// Function of `x2` only, from its derivatives.
    pub fn from_x2_derivatives(d: &[f64]) -> Self {
        let mut c = [0.0; LEN];
        for (k, dk) in d.iter().take(ORDER + 1).enumerate() {
            c[index(0, k)] = dk / FACTORIAL[k];
        }
        Self { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Same derivatives with the value replaced, e.g. by a more accurate one.
    pub fn with_value(&self, v: f64) -> Self {
        let mut out = *self;
        out.c[0] = v;
        out
    }

    /// Partial derivative `d^(i+j) f / dx1^i dx2^j`.
    pub fn d(&self, i: usize, j: usize) -> f64 {
        assert!(i + j <= ORDER, "jet holds derivatives up to order {ORDER}");
        self.c[index(i, j)] * FACTORIAL[i] * FACTORIAL[j]
    }

    pub fn gradient(&self) -> [f64; 2] {
        [self.d(1, 0), self.d(0, 1)]
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    /// `f(self)` for a smooth univariate `f` given `[f, f', f'', f''']` at
    /// `self.value()`.
    pub fn compose(&self, f: [f64; 4]) -> Self {
        let mut dx = *self;
        dx.c[0] = 0.0;
        let dx2 = dx * dx;
        let dx3 = dx2 * dx;
        let mut out = Jet::constant(f[0]);
        for k in 1..LEN {
            out.c[k] = f[1] * dx.c[k] + 0.5 * f[2] * dx2.c[k] + f[3] / 6.0 * dx3.c[k];
        }
        out
    }

    pub fn recip(&self) -> Self {
        let v = self.c[0];
        let r = 1.0 / v;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    pub fn sqrt(&self) -> Self {
        let s = self.c[0].sqrt();
        let v = self.c[0];
        self.compose([s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v)])
    }

    pub fn exp(&self) -> Self {
        let e = self.c[0].exp();
        self.compose([e; 4])
    }

    pub fn powi(&self, n: i32) -> Self {
        match n {
            0 => Jet::constant(1.0),
            1 => *self,
            2 => *self * *self,
            3 => *self * *self * *self,
            _ => {
                let v = self.c[0];
                let nf = n as f64;
                self.compose([
                    v.powi(n),
                    nf * v.powi(n - 1),
                    nf * (nf - 1.0) * v.powi(n - 2),
                    nf * (nf - 1.0) * (nf - 2.0) * v.powi(n - 3),
                ])
            }
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for v in out.c.iter_mut() {
            *v *= s;
        }
        out
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        for k in 0..LEN {
            self.c[k] += rhs.c[k];
        }
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        for k in 0..LEN {
            self.c[k] -= rhs.c[k];
        }
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut c = [0.0; LEN];
        for &(a, b, k) in PRODUCTS.iter() {
            c[k as usize] += self.c[a as usize] * rhs.c[b as usize];
        }
        Jet { c }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}
