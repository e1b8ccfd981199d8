//! Integer-order Bessel and Hankel functions needed by the 2D kernel.

use num_complex::Complex64;

pub fn j0(x: f64) -> f64 {
    libm::j0(x)
}

pub fn y0(x: f64) -> f64 {
    libm::y0(x)
}

pub fn j1(x: f64) -> f64 {
    libm::j1(x)
}

pub fn y1(x: f64) -> f64 {
    libm::y1(x)
}

/// `H₀⁽¹⁾(x) = J₀(x) + i Y₀(x)` for `x > 0`.
pub fn hankel1_0(x: f64) -> Complex64 {
    Complex64::new(j0(x), y0(x))
}

/// `H₁⁽¹⁾(x) = J₁(x) + i Y₁(x)` for `x > 0`.
pub fn hankel1_1(x: f64) -> Complex64 {
    Complex64::new(j1(x), y1(x))
}
