use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floating-point scalar used by the statistics, synthesis and fitting code.
///
/// Sampling hooks live on the trait so generic code does not have to carry
/// `rand_distr` bounds around.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + FromStr + Send + Sync + 'static
{
    /// One draw from N(0, 1).
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from U[lo, hi).
    fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: Self, hi: Self) -> Self;

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as float")
    }

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable as float")
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                <StandardNormal as Distribution<$t>>::sample(&StandardNormal, rng)
            }

            fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: Self, hi: Self) -> Self {
                lo + (hi - lo) * rng.random::<$t>()
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);
