//! Scalar abstraction shared by the spectral layer.

use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};

/// Floating-point scalar usable by the zonal algebra (`f32` or `f64`).
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static {
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite constant")
    }
    fn of_usize(k: usize) -> Self {
        Self::from_usize(k).expect("representable integer")
    }
}

impl<T> Real for T where T: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static {}

/// Volume of the unit ball in R^n: κ_0 = 1, κ_1 = 2, κ_n = (2π/n) κ_{n-2}.
pub fn kappa<T: Real>(n: usize) -> T {
    match n {
        0 => T::one(),
        1 => T::of(2.0),
        _ => T::of(2.0) * T::PI() / T::of_usize(n) * kappa::<T>(n - 2),
    }
}

/// Surface area of the unit sphere S^{n-1}, ω_n = n κ_n (ω_0 = 0).
pub fn omega<T: Real>(n: usize) -> T {
    T::of_usize(n) * kappa::<T>(n)
}

/// Binomial coefficient as a float.
pub fn binomial<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(T::one(), |acc, j| acc * T::of_usize(n - j) / T::of_usize(j + 1))
}
