use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point type usable by the closed-form formulas.
pub trait Scalar: Float + FloatConst + FromPrimitive + ToPrimitive + std::fmt::Debug + Send + Sync + 'static {
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }

    /// Tolerance for closed-form identities in this precision.
    fn identity_tolerance() -> Self;
}

impl Scalar for f64 {
    fn identity_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn identity_tolerance() -> Self {
        1e-5
    }
}
