//! Scalar abstraction for all numeric code in this crate.
//!
//! Every quantum object is generic over a real scalar implementing [`Scalar`];
//! complex amplitudes are `num_complex::Complex<T>`. Concrete `f64` aliases
//! live at the crate root. The associated tolerances are the only place where
//! the numeric validation windows are defined, so an `f32` instantiation gets
//! windows scaled to its precision instead of silently failing every check.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Window for identities enforced at construction time
    /// (state norms, hermiticity, unit trace).
    const EPS_CONSTRUCT: Self;
    /// Window for derived structure checked after arithmetic
    /// (Kraus completeness, POVM sums, table normalization).
    const EPS_VALIDATE: Self;
    /// Window for comparing an uncertainty-relation left-hand side to its
    /// bound, and for deciding whether a slightly negative radicand is noise.
    const EPS_FLAG: Self;

    /// Lossy conversion from `f64` literals; panics only if the target type
    /// cannot represent any nearby value, which none of the supported
    /// scalars do.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 literal must convert")
    }

    fn c(re: Self, im: Self) -> Complex<Self> {
        Complex::new(re, im)
    }

    fn cre(re: Self) -> Complex<Self> {
        Complex::new(re, Self::zero())
    }
}

macro_rules! impl_scalar {
    ($t:ty, $construct:expr, $validate:expr, $flag:expr) => {
        impl Scalar for $t {
            const EPS_CONSTRUCT: $t = $construct;
            const EPS_VALIDATE: $t = $validate;
            const EPS_FLAG: $t = $flag;
        }
    };
}

impl_scalar!(f64, 1e-12, 1e-10, 1e-9);
impl_scalar!(f32, 1e-5, 1e-4, 1e-3);
