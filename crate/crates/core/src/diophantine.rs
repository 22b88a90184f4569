//! Linear Diophantine equations `a·x − b·y = c`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Solutions `x = x0 + k·dx`, `y = y0 + k·dy` for all integers `k`.
///
/// Normalized so that `dx > 0` and `0 ≤ x0 < dx`; when `dx = 0` the same is
/// done for `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiophantineFamily {
    pub x0: BigInt,
    pub y0: BigInt,
    pub dx: BigInt,
    pub dy: BigInt,
}

impl DiophantineFamily {
    pub fn at(&self, k: &BigInt) -> (BigInt, BigInt) {
        (&self.x0 + k * &self.dx, &self.y0 + k * &self.dy)
    }

    /// Smallest range of `k` with `x(k)` in `[lo, hi]`, or `None` if empty.
    /// With `dx = 0` the range is unbounded (`None` bounds) when `x0` fits.
    pub fn k_range_for_x(&self, lo: &BigRational, hi: &BigRational) -> Option<KRange> {
        k_range(&self.x0, &self.dx, lo, hi)
    }

    pub fn k_range_for_y(&self, lo: &BigRational, hi: &BigRational) -> Option<KRange> {
        k_range(&self.y0, &self.dy, lo, hi)
    }
}

/// Inclusive range of the family parameter; a `None` end is unbounded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KRange {
    pub lo: Option<BigInt>,
    pub hi: Option<BigInt>,
}

impl KRange {
    pub fn all() -> Self {
        KRange { lo: None, hi: None }
    }

    pub fn intersect(&self, other: &KRange) -> Option<KRange> {
        let lo = match (&self.lo, &other.lo) {
            (Some(a), Some(b)) => Some(a.max(b).clone()),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        let hi = match (&self.hi, &other.hi) {
            (Some(a), Some(b)) => Some(a.min(b).clone()),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        match (&lo, &hi) {
            (Some(l), Some(h)) if l > h => None,
            _ => Some(KRange { lo, hi }),
        }
    }

    /// Number of members, or `None` if unbounded.
    pub fn len(&self) -> Option<BigInt> {
        match (&self.lo, &self.hi) {
            (Some(l), Some(h)) => Some(h - l + 1),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len().is_some_and(|n| !n.is_positive())
    }
}

fn k_range(base: &BigInt, step: &BigInt, lo: &BigRational, hi: &BigRational) -> Option<KRange> {
    if lo > hi {
        return None;
    }
    if step.is_zero() {
        let b = BigRational::from_integer(base.clone());
        return (lo <= &b && &b <= hi).then(KRange::all);
    }
    let b = BigRational::from_integer(base.clone());
    let s = BigRational::from_integer(step.clone());
    let (from, to) = if step.is_positive() { (lo, hi) } else { (hi, lo) };
    let k_lo = ((from - &b) / &s).ceil().to_integer();
    let k_hi = ((to - &b) / &s).floor().to_integer();
    (k_lo <= k_hi).then_some(KRange { lo: Some(k_lo), hi: Some(k_hi) })
}

/// General solution of `a·x − b·y = c` via the extended Euclidean algorithm.
pub fn diophantine_solve(a: &BigInt, b: &BigInt, c: &BigInt) -> Result<DiophantineFamily> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::Malformed("a and b are both zero".into()));
    }
    // a·s + (−b)·t = g
    let ext = a.extended_gcd(&-b);
    let g = ext.gcd;
    if !(c % &g).is_zero() {
        return Err(Error::NoSolution);
    }
    let q = c / &g;
    let x0 = ext.x * &q;
    let y0 = ext.y * &q;
    let (mut dx, mut dy) = (b / &g, a / &g);
    if dx.is_negative() || (dx.is_zero() && dy.is_negative()) {
        dx = -dx;
        dy = -dy;
    }
    let mut fam = DiophantineFamily { x0, y0, dx, dy };
    let shift = if fam.dx.is_positive() {
        fam.x0.div_floor(&fam.dx)
    } else {
        fam.y0.div_floor(&fam.dy)
    };
    let (x0, y0) = fam.at(&-shift);
    fam.x0 = x0;
    fam.y0 = y0;
    debug_assert_eq!(a * &fam.x0 - b * &fam.y0, *c);
    debug_assert!(fam.dx.is_positive() || fam.dy.is_one());
    Ok(fam)
}
