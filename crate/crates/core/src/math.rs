//! Scalar math shims usable with and without `std`.
//!
//! All transcendentals route through `libm` in `no_std` builds and through
//! the intrinsic `f64` methods otherwise. Within one build the choice is
//! fixed, which is what the reproducibility contract needs.

use num_complex::Complex64;

#[cfg(feature = "std")]
macro_rules! shim {
    ($name:ident) => {
        #[inline(always)]
        pub(crate) fn $name(x: f64) -> f64 {
            f64::$name(x)
        }
    };
}

#[cfg(not(feature = "std"))]
macro_rules! shim {
    ($name:ident) => {
        #[inline(always)]
        pub(crate) fn $name(x: f64) -> f64 {
            libm::$name(x)
        }
    };
}

shim!(exp);
shim!(sqrt);
shim!(cos);
shim!(sin);

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn ln(x: f64) -> f64 {
    x.ln()
}

#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline(always)]
pub(crate) fn abs(x: f64) -> f64 {
    f64::from_bits(x.to_bits() & (u64::MAX >> 1))
}

/// exp(re + i·im) without pulling transcendental impls into `Complex64`.
#[inline]
pub(crate) fn cexp(re: f64, im: f64) -> Complex64 {
    let r = exp(re);
    Complex64::new(r * cos(im), r * sin(im))
}
