//! Forward-mode automatic differentiation with nested first-order dual numbers.
//!
//! Mixed partial derivatives up to total order 4 are obtained by nesting
//! `Dual` four levels deep and seeding one infinitesimal per differentiation.
//! Each seeded level carries a distinct nilpotent, so the coefficient of
//! ε₁···ε_k after evaluation is exactly the order-k mixed partial, with no
//! factorial bookkeeping and no cancellation from difference quotients.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar types a cost function can be evaluated over: plain `f64` or a
/// dual-number tower. Branch decisions inside cost formulas must use
/// [`DiffScalar::re`] so that both paths stay consistent under nesting.
pub trait DiffScalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    /// Real part, all levels collapsed.
    fn re(&self) -> f64;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn acos(self) -> Self;
    fn powi(self, n: i32) -> Self;

    /// Inverse hyperbolic cosine for arguments > 1.
    fn acosh(self) -> Self {
        let one = Self::from_f64(1.0);
        (self + (self * self - one).sqrt()).ln()
    }
}

impl DiffScalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn re(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn acos(self) -> Self {
        f64::acos(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// First-order dual number over `T`: value plus one infinitesimal direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub du: T,
}

impl<T: DiffScalar> Dual<T> {
    pub fn new(re: T, du: T) -> Self {
        Dual { re, du }
    }

    pub fn constant(v: f64) -> Self {
        Dual {
            re: T::from_f64(v),
            du: T::from_f64(0.0),
        }
    }
}

impl<T: DiffScalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual::new(self.re + rhs.re, self.du + rhs.du)
    }
}

impl<T: DiffScalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual::new(self.re - rhs.re, self.du - rhs.du)
    }
}

impl<T: DiffScalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Dual::new(self.re * rhs.re, self.re * rhs.du + self.du * rhs.re)
    }
}

impl<T: DiffScalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let inv = T::from_f64(1.0) / rhs.re;
        let q = self.re * inv;
        Dual::new(q, (self.du - q * rhs.du) * inv)
    }
}

impl<T: DiffScalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.du)
    }
}

impl<T: DiffScalar> DiffScalar for Dual<T> {
    fn from_f64(v: f64) -> Self {
        Dual::constant(v)
    }

    fn re(&self) -> f64 {
        self.re.re()
    }

    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        Dual::new(s, self.du / (T::from_f64(2.0) * s))
    }

    fn exp(self) -> Self {
        let e = self.re.exp();
        Dual::new(e, self.du * e)
    }

    fn ln(self) -> Self {
        Dual::new(self.re.ln(), self.du / self.re)
    }

    fn sin(self) -> Self {
        Dual::new(self.re.sin(), self.du * self.re.cos())
    }

    fn cos(self) -> Self {
        Dual::new(self.re.cos(), -self.du * self.re.sin())
    }

    fn acos(self) -> Self {
        let one = T::from_f64(1.0);
        let d = -(one / (one - self.re * self.re).sqrt());
        Dual::new(self.re.acos(), self.du * d)
    }

    fn powi(self, n: i32) -> Self {
        match n {
            0 => Dual::constant(1.0),
            1 => self,
            _ if n > 0 => {
                let d = T::from_f64(f64::from(n)) * self.re.powi(n - 1);
                Dual::new(self.re.powi(n), self.du * d)
            }
            _ => Dual::constant(1.0) / self.powi(-n),
        }
    }
}

pub type D1 = Dual<f64>;
pub type D2 = Dual<D1>;
pub type D3 = Dual<D2>;
pub type D4 = Dual<D3>;

/// Build a `D4` input with value `v`, seeded with a unit infinitesimal at
/// every level where `levels` is true. Level 0 is the outermost nesting.
pub fn d4_seeded(v: f64, levels: [bool; 4]) -> D4 {
    let mut x = D4::constant(v);
    if levels[0] {
        x.du.re.re.re = 1.0;
    }
    if levels[1] {
        x.re.du.re.re = 1.0;
    }
    if levels[2] {
        x.re.re.du.re = 1.0;
    }
    if levels[3] {
        x.re.re.re.du = 1.0;
    }
    x
}

/// Coefficient of ε₀···ε_{order−1} in `x`, i.e. the mixed partial of the
/// evaluated function when levels 0..order were seeded with distinct inputs.
pub fn d4_coeff(x: &D4, order: usize) -> f64 {
    match order {
        0 => x.re.re.re.re,
        1 => x.du.re.re.re,
        2 => x.du.du.re.re,
        3 => x.du.du.du.re,
        4 => x.du.du.du.du,
        _ => panic!("derivative order {order} exceeds nesting depth 4"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn f<S: DiffScalar>(x: S, y: S) -> S {
        // x² y³ + sin(x y)
        x * x * y * y * y + (x * y).sin()
    }

    #[test]
    fn mixed_partials_of_polynomial_trig() {
        let (x0, y0) = (0.7, -0.4);
        // ∂³/∂x²∂y f = 6 x y² ... plus trig chain terms, derived by hand:
        // ∂f/∂x = 2xy³ + y cos(xy)
        // ∂²f/∂x² = 2y³ − y² sin(xy)
        // ∂³f/∂x²∂y = 6y² − 2y sin(xy) − xy² cos(xy)
        let expect = 6.0 * y0 * y0
            - 2.0 * y0 * (x0 * y0).sin()
            - x0 * y0 * y0 * (x0 * y0).cos();
        let xd = d4_seeded(x0, [true, true, false, false]);
        let yd = d4_seeded(y0, [false, false, true, false]);
        let out = f(xd, yd);
        assert_relative_eq!(d4_coeff(&out, 3), expect, max_relative = 1e-13);
    }

    #[test]
    fn fourth_order_pure() {
        // d⁴/dx⁴ exp(2x) = 16 exp(2x)
        let x0 = 0.3;
        let xd = d4_seeded(x0, [true, true, true, true]);
        let out = (xd * D4::constant(2.0)).exp();
        assert_relative_eq!(d4_coeff(&out, 4), 16.0 * (2.0 * x0).exp(), max_relative = 1e-12);
    }

    #[test]
    fn acos_and_sqrt_chain() {
        // g(x) = acos(1 − x²), g'(x) = 2x / sqrt(1 − (1−x²)²)
        let x0 = 0.6;
        let xd = d4_seeded(x0, [true, false, false, false]);
        let g = (D4::constant(1.0) - xd * xd).acos();
        let t = 1.0 - x0 * x0;
        assert_relative_eq!(d4_coeff(&g, 1), 2.0 * x0 / (1.0 - t * t).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn acosh_value_and_slope() {
        let x0 = 1.8;
        let xd = d4_seeded(x0, [true, false, false, false]);
        let g = xd.acosh();
        assert_relative_eq!(d4_coeff(&g, 0), x0.acosh(), max_relative = 1e-14);
        assert_relative_eq!(d4_coeff(&g, 1), 1.0 / (x0 * x0 - 1.0).sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn division_matches_product_rule() {
        let (x0, y0) = (1.3, 0.9);
        let xd = d4_seeded(x0, [true, false, false, false]);
        let yd = d4_seeded(y0, [false, true, false, false]);
        let q = xd / yd;
        // ∂²(x/y)/∂x∂y = −1/y²
        assert_relative_eq!(d4_coeff(&q, 2), -1.0 / (y0 * y0), max_relative = 1e-13);
    }
}
