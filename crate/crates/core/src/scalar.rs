//! Scalar types shared by the numeric parts of the crate.
//!
//! Field arithmetic is exact and lives in [`crate::ff`]. Everything that is
//! genuinely real-valued (spectral gaps, walk bounds, Kővári–Sós–Turán
//! bounds) is written against [`Real`], so it runs unchanged in `f32` or
//! `f64`. Exact probabilities obtained by enumeration are [`Fraction`]s.

use nalgebra as na;
use num_rational::Ratio;
use num_traits as nt;

/// Floating point types usable by the spectral and bound computations.
pub trait Real: Copy + nt::Float + nt::FromPrimitive + na::RealField + std::fmt::Display {
    /// Converts from `f64`, rounding if the target type is narrower.
    fn of(x: f64) -> Self;

    fn to_f64(self) -> f64;
}

macro_rules! impl_real {
    ($f:ty) => {
        impl Real for $f {
            #[inline]
            fn of(x: f64) -> Self {
                x as $f
            }

            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Exact non-negative rational, used for enumerated rates and distances.
pub type Fraction = Ratio<u64>;

/// Converts a fraction to the nearest `f64`.
pub fn fraction_to_f64(x: Fraction) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}
