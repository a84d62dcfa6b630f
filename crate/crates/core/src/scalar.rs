//! Numeric traits the simulation core is generic over.
//!
//! [`Scalar`] is the minimal ordered field the queueing recursion needs and is
//! satisfied by exact rationals as well as floats. [`Real`] adds the
//! transcendental functions used by the delay laws and distances, and is
//! implemented for `f32` and `f64`.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};
use rand::RngCore;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Ordered number type: floats or exact rationals.
pub trait Scalar: Copy + PartialOrd + Num + Debug + Send + Sync + 'static {}

impl<T> Scalar for T where T: Copy + PartialOrd + Num + Debug + Send + Sync + 'static {}

/// Floating point scalar with the special functions the delay laws need.
pub trait Real:
    Scalar + Float + FromPrimitive + ToPrimitive + Display + Default + Serialize + DeserializeOwned
{
    fn gauss_erf(self) -> Self;
    fn gauss_erfc(self) -> Self;

    /// Uniform draw from the open interval (0, 1), so logarithms stay finite.
    fn unit_open<R: RngCore + ?Sized>(rng: &mut R) -> Self;

    /// Converts an `f64` constant. Every constant used in the crate is finite,
    /// so the conversion cannot fail for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite constant")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits the scalar type")
    }

    /// Tolerance used for "sums to one" checks on this precision.
    fn mass_tolerance(bins: usize) -> Self {
        let floor = Self::lit(1e-12);
        let scaled = Self::epsilon() * Self::from_count(bins.max(1)) * Self::lit(4.0);
        floor.max(scaled)
    }
}

impl Real for f64 {
    #[inline]
    fn gauss_erf(self) -> Self {
        libm::erf(self)
    }

    #[inline]
    fn gauss_erfc(self) -> Self {
        libm::erfc(self)
    }

    #[inline]
    fn unit_open<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

impl Real for f32 {
    #[inline]
    fn gauss_erf(self) -> Self {
        libm::erff(self)
    }

    #[inline]
    fn gauss_erfc(self) -> Self {
        libm::erfcf(self)
    }

    #[inline]
    fn unit_open<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        ((rng.next_u32() >> 8) as f32 + 0.5) * (1.0 / (1u32 << 24) as f32)
    }
}
