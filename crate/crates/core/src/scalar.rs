//! Scalar abstraction shared by every numeric part of the crate.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point type a network can be instantiated over (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + Debug + Default + Serialize + DeserializeOwned + Send + Sync + 'static
{
    /// Type name recorded in snapshots.
    const NAME: &'static str;

    /// Converts an `f64` literal into this scalar.
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite literal")
    }
}

impl Scalar for f32 {
    const NAME: &'static str = "f32";
}

impl Scalar for f64 {
    const NAME: &'static str = "f64";
}

/// Euclidean length.
pub fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &c| acc + c * c).sqrt()
}

/// Scales `v` to unit Euclidean length. The zero vector maps to itself.
pub fn normalize<T: Scalar>(v: &[T]) -> Vec<T> {
    let n = norm(v);
    if n > T::zero() {
        v.iter().map(|&c| c / n).collect()
    } else {
        vec![T::zero(); v.len()]
    }
}

/// Dot product of two equal-length slices.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Cosine of the angle between `a` and `b`, counting only components where
/// `live` is set. Either side being zero on the live components yields 0.
pub fn masked_cosine<T: Scalar>(a: &[T], b: &[T], live: &[bool]) -> T {
    let live_norm = |v: &[T]| {
        v.iter()
            .zip(live)
            .fold(
                T::zero(),
                |acc, (&c, &on)| if on { acc + c * c } else { acc },
            )
            .sqrt()
    };
    let (na, nb) = (live_norm(a), live_norm(b));
    if !(na > T::zero() && nb > T::zero()) {
        return T::zero();
    }
    // same rounding as normalizing both sides first and taking the dot product
    a.iter().zip(b).zip(live).fold(
        T::zero(),
        |acc, ((&x, &y), &on)| if on { acc + (x / na) * (y / nb) } else { acc },
    )
}
