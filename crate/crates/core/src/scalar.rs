//! Exact scalar types used for every geometric coordinate.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// An exact ordered field.
///
/// Every geometric predicate in this crate is written against this trait, so
/// the arithmetic must be exact: no rounding, total order, exact equality.
/// The by-reference operations exist because big rationals are expensive to
/// clone.
pub trait Scalar:
    Clone + Debug + Display + Ord + Hash + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    /// Panics on division by zero.
    fn over(&self, rhs: &Self) -> Self;
    /// Largest integer not above `self`.
    fn floor_int(&self) -> i64;
    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn half(&self) -> Self {
        self.over(&Self::from_ratio(2, 1))
    }
}

macro_rules! impl_ratio_scalar {
    ($int:ty, $floor:expr) => {
        impl Scalar for Ratio<$int> {
            #[inline]
            fn plus(&self, rhs: &Self) -> Self {
                self + rhs
            }
            #[inline]
            fn minus(&self, rhs: &Self) -> Self {
                self - rhs
            }
            #[inline]
            fn times(&self, rhs: &Self) -> Self {
                self * rhs
            }
            #[inline]
            fn over(&self, rhs: &Self) -> Self {
                self / rhs
            }
            fn floor_int(&self) -> i64 {
                let f: fn(&Ratio<$int>) -> i64 = $floor;
                f(self)
            }
            fn from_ratio(numer: i64, denom: i64) -> Self {
                Ratio::new(<$int>::from(numer), <$int>::from(denom))
            }
        }
    };
}

impl_ratio_scalar!(BigInt, |r| r
    .floor()
    .to_integer()
    .to_i64()
    .expect("floor exceeds i64 range"));
impl_ratio_scalar!(i64, |r| r.floor().to_integer());
impl_ratio_scalar!(i128, |r| i64::try_from(r.floor().to_integer())
    .expect("floor exceeds i64 range"));

/// Parses `"p/q"` or a bare integer into a rational.
pub fn parse_rational<S: Scalar>(text: &str) -> Option<S> {
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let is_int = |t: &str| {
        let digits = t.strip_prefix('-').unwrap_or(t);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !is_int(numer) || !is_int(denom) || denom.trim_start_matches(['-', '0']).is_empty() {
        return None;
    }
    S::from_str_radix(&format!("{numer}/{denom}"), 10).ok()
}
