use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type the solver can run on: `f32` or `f64`.
///
/// Each implementation carries its own default tolerances, since the
/// defaults that make sense for `f64` are below `f32` resolution.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Inversion tolerance.
    const EPS_INV: f64;
    /// Equality-subgraph membership band.
    const EPS_EQ: f64;
    /// Split-sum tolerance.
    const EPS_FEAS: f64;

    /// Converts an `f64` literal. Panics only for non-representable values,
    /// which never happens for the finite constants used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Bit-level key for memo tables.
    fn bits_key(self) -> (u64, i16, i8) {
        self.integer_decode()
    }
}

impl Scalar for f64 {
    const EPS_INV: f64 = 1e-10;
    const EPS_EQ: f64 = 1e-8;
    const EPS_FEAS: f64 = 1e-6;
}

impl Scalar for f32 {
    const EPS_INV: f64 = 1e-6;
    const EPS_EQ: f64 = 1e-4;
    const EPS_FEAS: f64 = 1e-3;
}
