//! Scalar abstraction shared by the double and double-double code paths.
//!
//! Every route that works directly with the three-term recurrence (matrix
//! sections, Miller shooting) is generic over [`Real`]. Eigenvalues of the
//! truncated operator are extremely sensitive to rounding for moderate index,
//! so those routes default to [`DoubleDouble`].


use core::fmt::Debug;
use core::ops::Neg;

use num_complex::Complex;
use num_traits::Num;

pub use crate::dd::DoubleDouble;

/// Complex number over a working scalar.
pub type Cx<R> = Complex<R>;

/// Floating point scalar usable by the generic solvers.
pub trait Real:
    Num + Neg<Output = Self> + Copy + PartialOrd + Debug + Send + Sync + 'static
{
    /// Short name used in diagnostics.
    const NAME: &'static str;

    fn from_f64(x: f64) -> Self;

    fn to_f64(self) -> f64;

    fn abs(self) -> Self;

    fn sqrt(self) -> Self;

    fn is_finite(self) -> bool;

    /// Unit roundoff of the format.
    fn unit_roundoff() -> Self;

    /// Exact for integers below 2^53.
    #[inline]
    fn from_usize(n: usize) -> Self {
        Self::from_f64(n as f64)
    }

    #[inline]
    fn max(self, o: Self) -> Self {
        if o > self {
            o
        } else {
            self
        }
    }

    #[inline]
    fn min(self, o: Self) -> Self {
        if o < self {
            o
        } else {
            self
        }
    }
}

impl Real for f64 {
    const NAME: &'static str = "double";

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self
    }

    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }

    #[inline]
    fn sqrt(self) -> Self {
        libm::sqrt(self)
    }

    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }

    #[inline]
    fn unit_roundoff() -> Self {
        f64::EPSILON / 2.0
    }
}

impl Real for DoubleDouble {
    const NAME: &'static str = "double-double";

    #[inline]
    fn from_f64(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }

    #[inline]
    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }

    #[inline]
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }

    #[inline]
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }

    #[inline]
    fn is_finite(self) -> bool {
        DoubleDouble::is_finite(self)
    }

    #[inline]
    fn unit_roundoff() -> Self {
        DoubleDouble::EPSILON
    }
}

/// Arithmetic precision selectable at run time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Precision {
    Double,
    #[default]
    DoubleDouble,
}

impl Precision {
    pub fn name(self) -> &'static str {
        match self {
            Precision::Double => <f64 as Real>::NAME,
            Precision::DoubleDouble => <DoubleDouble as Real>::NAME,
        }
    }
}

#[inline]
pub(crate) fn cx_from<R: Real>(z: Complex<f64>) -> Cx<R> {
    Complex::new(R::from_f64(z.re), R::from_f64(z.im))
}

#[inline]
pub(crate) fn cx_to_f64<R: Real>(z: Cx<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

#[inline]
pub(crate) fn real<R: Real>(x: R) -> Cx<R> {
    Complex::new(x, R::zero())
}

/// Modulus without the overflow-guarded `hypot`, which is slow for
/// double-double. Inputs here never approach the overflow threshold.
#[inline]
pub(crate) fn cabs<R: Real>(z: Cx<R>) -> R {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// Cheap magnitude (|re| + |im|) for comparisons and deflation tests.
#[inline]
pub(crate) fn l1<R: Real>(z: Cx<R>) -> R {
    z.re.abs() + z.im.abs()
}

/// Principal square root.
pub(crate) fn csqrt<R: Real>(z: Cx<R>) -> Cx<R> {
    let zero = R::zero();
    if z.re == zero && z.im == zero {
        return z;
    }
    let half = R::from_f64(0.5);
    let m = cabs(z);
    if z.re >= zero {
        let t = ((m + z.re) * half).sqrt();
        Complex::new(t, z.im / (t + t))
    } else {
        let t = ((m - z.re) * half).sqrt();
        let re = z.im.abs() / (t + t);
        let im = if z.im < zero { -t } else { t };
        Complex::new(re, im)
    }
}

/// Neumaier-compensated complex sum.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: Complex<f64>,
    carry: Complex<f64>,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: Complex<f64>) {
        self.sum.re = neumaier(self.sum.re, x.re, &mut self.carry.re);
        self.sum.im = neumaier(self.sum.im, x.im, &mut self.carry.im);
    }

    pub(crate) fn value(&self) -> Complex<f64> {
        self.sum + self.carry
    }
}

#[inline]
fn neumaier(sum: f64, x: f64, carry: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *carry += (sum - t) + x;
    } else {
        *carry += (x - t) + sum;
    }
    t
}
