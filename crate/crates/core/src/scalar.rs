//! Scalar abstraction shared by every algorithm in the crate.
//!
//! All message-passing, cover and certificate code is written against
//! [`Scalar`], which is satisfied by `f32` and `f64`. Routines that need a
//! dense factorization or a symmetric eigensolve additionally require
//! [`DenseScalar`], which pulls in `nalgebra::RealField`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

pub trait Scalar:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    fn half() -> Self {
        Self::lit(0.5)
    }

    fn two() -> Self {
        Self::lit(2.0)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Scalars usable with the dense `nalgebra` kernels.
///
/// `RealField` and `Float` both define `abs`, `sqrt`, ... so generic code
/// bounded by this trait should call those through `Float::` explicitly.
pub trait DenseScalar: Scalar + nalgebra::RealField {}

impl<T: Scalar + nalgebra::RealField> DenseScalar for T {}
