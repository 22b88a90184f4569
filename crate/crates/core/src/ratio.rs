//! Fixed points and convergence of the ratio map `a ↦ t − d/a`, the exact
//! row-ratio interval used for checking, and column ratios.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::coding::CodingMatrix;
use crate::{Error, Mat2, Result};

/// Default orbit length for convergence profiling.
pub const DEFAULT_ORBIT_STEPS: usize = 64;

/// An element `r + c·√D` of the quadratic field over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    pub rational: BigRational,
    pub coeff: BigRational,
    pub radicand: BigInt,
}

impl Surd {
    pub fn from_rational(q: BigRational, radicand: BigInt) -> Self {
        Surd { rational: q, coeff: BigRational::zero(), radicand }
    }

    pub fn add(&self, other: &Surd) -> Surd {
        debug_assert_eq!(self.radicand, other.radicand);
        Surd {
            rational: &self.rational + &other.rational,
            coeff: &self.coeff + &other.coeff,
            radicand: self.radicand.clone(),
        }
    }

    pub fn mul(&self, other: &Surd) -> Surd {
        debug_assert_eq!(self.radicand, other.radicand);
        let d = BigRational::from_integer(self.radicand.clone());
        Surd {
            rational: &self.rational * &other.rational + &self.coeff * &other.coeff * d,
            coeff: &self.rational * &other.coeff + &self.coeff * &other.rational,
            radicand: self.radicand.clone(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> Surd {
        Surd { rational: &self.rational * k, coeff: &self.coeff * k, radicand: self.radicand.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && (self.coeff.is_zero() || self.radicand.is_zero())
    }
}

/// Roots `φ± = (t ± √(t² − 4d))/2` of `x² − t·x + d = 0`, kept exactly as
/// `(t, t² − 4d)` with float approximations for estimates and display.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoints {
    t: BigInt,
    d: BigInt,
    disc: BigInt,
    phi_plus: f64,
    phi_minus: f64,
}

impl FixedPoints {
    pub fn new(t: &BigInt, d: &BigInt) -> Result<Self> {
        let disc: BigInt = t * t - d * 4;
        if disc.is_negative() {
            return Err(Error::ComplexFixedPoints);
        }
        let tf = to_f64(t);
        let phi_plus = (tf + libm::sqrt(to_f64(&disc))) / 2.0;
        // product of the roots is d; avoids cancellation in t − √disc
        let phi_minus = if phi_plus != 0.0 { to_f64(d) / phi_plus } else { tf - phi_plus };
        Ok(FixedPoints { t: t.clone(), d: d.clone(), disc, phi_plus, phi_minus })
    }

    pub fn t(&self) -> &BigInt {
        &self.t
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    /// `t² − 4d`.
    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }

    pub fn phi_plus(&self) -> f64 {
        self.phi_plus
    }

    pub fn phi_minus(&self) -> f64 {
        self.phi_minus
    }

    pub fn surd_plus(&self) -> Surd {
        self.surd(1)
    }

    pub fn surd_minus(&self) -> Surd {
        self.surd(-1)
    }

    fn surd(&self, sign: i32) -> Surd {
        let half = BigRational::new(1.into(), 2.into());
        Surd {
            rational: BigRational::from_integer(self.t.clone()) * &half,
            coeff: half * BigRational::from_integer(sign.into()),
            radicand: self.disc.clone(),
        }
    }

    /// Evaluates `x² − t·x + d` at `x` in exact surd arithmetic.
    pub fn characteristic_at(&self, x: &Surd) -> Surd {
        let t = BigRational::from_integer(self.t.clone());
        let d = Surd::from_rational(BigRational::from_integer(self.d.clone()), self.disc.clone());
        x.mul(x).add(&x.scale(&-t)).add(&d)
    }

    /// Orders `q` against `φ₊` exactly.
    pub fn cmp_plus(&self, q: &BigRational) -> Ordering {
        // q ⋛ φ₊  ⇔  2q − t ⋛ √disc
        let w = self.shifted(q);
        if w.is_negative() {
            return Ordering::Less;
        }
        (&w * &w).cmp(&BigRational::from_integer(self.disc.clone()))
    }

    /// Orders `q` against `φ₋` exactly.
    pub fn cmp_minus(&self, q: &BigRational) -> Ordering {
        // q ⋛ φ₋  ⇔  2q − t ⋛ −√disc
        let w = self.shifted(q);
        if !w.is_negative() {
            return if w.is_zero() && self.disc.is_zero() { Ordering::Equal } else { Ordering::Greater };
        }
        BigRational::from_integer(self.disc.clone()).cmp(&(&w * &w))
    }

    /// `|q − φ₊|`, evaluated without cancellation when `q` is near `φ₊`.
    pub fn distance_to_plus(&self, q: &BigRational) -> f64 {
        let w = self.shifted(q);
        let wf = w.to_f64().unwrap_or(f64::NAN);
        if wf > 0.0 {
            // q − φ₊ = (w² − disc) / (2(w + √disc))
            let num = &w * &w - BigRational::from_integer(self.disc.clone());
            let root = libm::sqrt(to_f64(&self.disc));
            (num.to_f64().unwrap_or(f64::NAN) / (2.0 * (wf + root))).abs()
        } else {
            (q.to_f64().unwrap_or(f64::NAN) - self.phi_plus).abs()
        }
    }

    fn shifted(&self, q: &BigRational) -> BigRational {
        q * BigInt::from(2) - BigRational::from_integer(self.t.clone())
    }
}

pub fn fixed_points(t: &BigInt, d: &BigInt) -> Result<FixedPoints> {
    FixedPoints::new(t, d)
}

/// Parameters of the ratio iteration `aₙ₊₁ = t − d/aₙ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioParams {
    pub t: BigInt,
    pub d: BigInt,
    pub a0: BigRational,
}

impl RatioParams {
    pub fn new(t: BigInt, d: BigInt, a0: BigRational) -> Result<Self> {
        if a0.is_zero() {
            return Err(Error::ZeroInitialRatio);
        }
        if d.is_positive() && &t * &t < &d * 4 {
            return Err(Error::ComplexFixedPoints);
        }
        Ok(RatioParams { t, d, a0 })
    }
}

/// Exact orbit `a₀, a₁, …, a_steps`.
pub fn ratio_iterate(params: &RatioParams, steps: usize) -> Result<Vec<BigRational>> {
    let t = BigRational::from_integer(params.t.clone());
    let d = BigRational::from_integer(params.d.clone());
    let mut orbit = Vec::with_capacity(steps + 1);
    orbit.push(params.a0.clone());
    for index in 0..steps {
        let a = &orbit[index];
        if a.is_zero() {
            return Err(Error::DivisionByZeroInOrbit { index });
        }
        let next = &t - &d / a;
        orbit.push(next);
    }
    Ok(orbit)
}

/// Observed shape of an orbit relative to `φ₊`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceMode {
    /// Non-increasing and never below `φ₊`.
    MonotoneDecreasing,
    /// Non-decreasing and never above `φ₊`.
    MonotoneIncreasing,
    /// Even and odd subsequences are monotone in opposite directions on
    /// opposite sides of `φ₊`.
    AlternatingSplit { evens_decreasing: bool },
    Divergent,
}

impl fmt::Display for ConvergenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConvergenceMode::MonotoneDecreasing => f.write_str("monotone-decreasing"),
            ConvergenceMode::MonotoneIncreasing => f.write_str("monotone-increasing"),
            ConvergenceMode::AlternatingSplit { evens_decreasing: true } => {
                f.write_str("alternating-split (evens decrease, odds increase)")
            }
            ConvergenceMode::AlternatingSplit { evens_decreasing: false } => {
                f.write_str("alternating-split (evens increase, odds decrease)")
            }
            ConvergenceMode::Divergent => f.write_str("divergent"),
        }
    }
}

/// Geometric envelope `|aₙ − φ₊| ≤ C·λⁿ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricFit {
    pub c: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceProfile {
    pub mode: ConvergenceMode,
    pub fixed_points: FixedPoints,
    pub orbit: Vec<BigRational>,
    /// `|aₙ − φ₊|` for every orbit element.
    pub errors: Vec<f64>,
}

impl ConvergenceProfile {
    /// Fits `λ` from the decay over the second half of the orbit, then the
    /// smallest `C` that bounds every recorded error.
    pub fn geometric_fit(&self) -> Option<GeometricFit> {
        let usable: Vec<(usize, f64)> =
            self.errors.iter().copied().enumerate().filter(|(_, e)| *e > 0.0 && e.is_finite()).collect();
        if usable.len() < 4 {
            return None;
        }
        let (i0, e0) = usable[usable.len() / 2];
        let (i1, e1) = *usable.last()?;
        if i1 == i0 {
            return None;
        }
        let lambda = libm::pow(e1 / e0, 1.0 / (i1 - i0) as f64);
        if !(lambda.is_finite() && lambda > 0.0) {
            return None;
        }
        let c = usable.iter().map(|&(i, e)| e / libm::pow(lambda, i as f64)).fold(0.0, f64::max);
        Some(GeometricFit { c, lambda })
    }
}

pub fn convergence_profile(params: &RatioParams, steps: usize) -> Result<ConvergenceProfile> {
    let fixed_points = FixedPoints::new(&params.t, &params.d)?;
    let orbit = ratio_iterate(params, steps)?;
    let errors = orbit.iter().map(|a| fixed_points.distance_to_plus(a)).collect();
    let mode = classify(&orbit, &fixed_points);
    Ok(ConvergenceProfile { mode, fixed_points, orbit, errors })
}

fn classify(orbit: &[BigRational], fp: &FixedPoints) -> ConvergenceMode {
    let side = |pred: fn(Ordering) -> bool, xs: &[&BigRational]| xs.iter().all(|a| pred(fp.cmp_plus(a)));
    let monotone = |xs: &[&BigRational], decreasing: bool| {
        xs.windows(2).all(|w| if decreasing { w[1] <= w[0] } else { w[1] >= w[0] })
    };
    let all: Vec<&BigRational> = orbit.iter().collect();
    let above = |o: Ordering| o != Ordering::Less;
    let below = |o: Ordering| o != Ordering::Greater;

    if monotone(&all, true) && side(above, &all) {
        return ConvergenceMode::MonotoneDecreasing;
    }
    if monotone(&all, false) && side(below, &all) {
        return ConvergenceMode::MonotoneIncreasing;
    }
    let evens: Vec<&BigRational> = orbit.iter().step_by(2).collect();
    let odds: Vec<&BigRational> = orbit.iter().skip(1).step_by(2).collect();
    for evens_decreasing in [true, false] {
        let (hi, lo) = if evens_decreasing { (&evens, &odds) } else { (&odds, &evens) };
        if monotone(hi, true)
            && monotone(lo, false)
            && side(above, hi)
            && side(below, lo)
        {
            return ConvergenceMode::AlternatingSplit { evens_decreasing };
        }
    }
    ConvergenceMode::Divergent
}

/// Closed rational interval `[lo, hi]` containing every admissible row ratio
/// `c_{i1}/c_{i2}` of a ciphertext.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RowInterval {
    /// Whether the row `(x, y)` can come from a non-negative plaintext row:
    /// either the zero row or `y > 0` with `lo ≤ x/y ≤ hi`.
    pub fn contains_row(&self, x: &BigInt, y: &BigInt) -> bool {
        if x.is_zero() && y.is_zero() {
            return true;
        }
        if x.is_negative() || !y.is_positive() {
            return false;
        }
        self.lo.numer() * y <= x * self.lo.denom() && x * self.hi.denom() <= self.hi.numer() * y
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo <= q && q <= &self.hi
    }
}

/// `[min, max]` of `{Aₙ₊₁/Aₙ, Bₙ₊₁/Bₙ}`.
pub fn row_ratio_interval(cm: &CodingMatrix) -> Result<RowInterval> {
    if !cm.a().is_positive() || !cm.b().is_positive() || cm.a_next().is_negative() || cm.b_next().is_negative() {
        return Err(Error::ZeroSequenceEntry);
    }
    let ra = BigRational::new(cm.a_next().clone(), cm.a().clone());
    let rb = BigRational::new(cm.b_next().clone(), cm.b().clone());
    let (lo, hi) = if ra <= rb { (ra, rb) } else { (rb, ra) };
    Ok(RowInterval { lo, hi })
}

/// Which way round a column ratio is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RatioOrientation {
    /// `c21/c11` (and `c22/c12`).
    BottomOverTop,
    /// `c11/c21` (and `c12/c22`).
    TopOverBottom,
}

impl RatioOrientation {
    pub fn as_str(self) -> &'static str {
        match self {
            RatioOrientation::BottomOverTop => "bottom-over-top",
            RatioOrientation::TopOverBottom => "top-over-bottom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bottom-over-top" => Some(RatioOrientation::BottomOverTop),
            "top-over-bottom" => Some(RatioOrientation::TopOverBottom),
            _ => None,
        }
    }
}

/// Both column ratios of a ciphertext, `c21/c11` and `c22/c12`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnRatio {
    pub first: BigRational,
    pub second: BigRational,
}

impl ColumnRatio {
    pub fn mean(&self) -> f64 {
        (self.first.to_f64().unwrap_or(f64::NAN) + self.second.to_f64().unwrap_or(f64::NAN)) / 2.0
    }

    /// The ratios in the given orientation, or `None` when a bottom entry
    /// is zero and the top-over-bottom form is undefined.
    pub fn oriented(&self, orientation: RatioOrientation) -> Option<(BigRational, BigRational)> {
        match orientation {
            RatioOrientation::BottomOverTop => Some((self.first.clone(), self.second.clone())),
            RatioOrientation::TopOverBottom => {
                if self.first.is_zero() || self.second.is_zero() {
                    None
                } else {
                    Some((self.first.recip(), self.second.recip()))
                }
            }
        }
    }
}

pub fn column_ratio(c: &Mat2) -> Result<ColumnRatio> {
    if c.a11.is_zero() || c.a12.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(ColumnRatio {
        first: BigRational::new(c.a21.clone(), c.a11.clone()),
        second: BigRational::new(c.a22.clone(), c.a12.clone()),
    })
}

/// Rounds `q` half-to-even at `digits` decimal places, returning the scaled
/// integer `round(q·10^digits)`.
pub fn round_half_even_scaled(q: &BigRational, digits: u32) -> BigInt {
    let scale = BigInt::from(10).pow(digits);
    let num = q.numer() * &scale;
    let den = q.denom();
    let (quot, rem) = num.div_mod_floor(den);
    let twice: BigInt = rem * 2;
    match twice.cmp(den) {
        Ordering::Less => quot,
        Ordering::Greater => quot + 1,
        Ordering::Equal => {
            if quot.is_even() {
                quot
            } else {
                quot + 1
            }
        }
    }
}

/// Decimal rendering of `scaled / 10^digits`, e.g. `(51, 2) → "0.51"`.
pub fn format_scaled(scaled: &BigInt, digits: u32) -> alloc::string::String {
    use alloc::string::ToString;
    let neg = scaled.is_negative();
    let mut s = scaled.abs().to_string();
    let digits = digits as usize;
    if digits > 0 {
        while s.len() <= digits {
            s.insert(0, '0');
        }
        s.insert(s.len() - digits, '.');
    }
    if neg {
        s.insert(0, '-');
    }
    s
}

/// Parses a plain decimal (`"0.51"`, `"-3"`, `"1.5"`) or a fraction
/// (`"3/2"`) into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Malformed(alloc::format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut digits = alloc::string::String::from(if int.is_empty() { "0" } else { int });
    digits.push_str(frac);
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let q = BigRational::new(num, BigInt::from(10).pow(frac.len() as u32));
    Ok(if neg { -q } else { q })
}

fn to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::{build_coding_matrix, golden_matrix, SeedPair, UnimodularKeyMatrix};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn params(t: i64, d: i64, a0: BigRational) -> RatioParams {
        RatioParams::new(t.into(), d.into(), a0).unwrap()
    }

    #[test]
    fn fixed_points_of_running_examples() {
        let cat = fixed_points(&3.into(), &1.into()).unwrap();
        assert!((cat.phi_plus() - 2.618_033_988_749_895).abs() < 1e-15);
        let golden = fixed_points(&1.into(), &(-1).into()).unwrap();
        assert!((golden.phi_plus() - 1.618_033_988_749_895).abs() < 1e-15);
        assert!((golden.phi_minus() + 0.618_033_988_749_895).abs() < 1e-15);
        let double = fixed_points(&2.into(), &1.into()).unwrap();
        assert_eq!(double.phi_plus(), 1.0);
        assert_eq!(double.phi_minus(), 1.0);
        assert_eq!(fixed_points(&1.into(), &1.into()), Err(Error::ComplexFixedPoints));
    }

    #[test]
    fn fixed_points_solve_characteristic_exactly() {
        for (t, d) in [(3, 1), (1, -1), (2, 1), (7, -1), (5, 6)] {
            let fp = fixed_points(&t.into(), &d.into()).unwrap();
            assert!(fp.characteristic_at(&fp.surd_plus()).is_zero(), "t={t} d={d}");
            assert!(fp.characteristic_at(&fp.surd_minus()).is_zero(), "t={t} d={d}");
        }
    }

    #[test]
    fn exact_comparisons_against_surds() {
        let fp = fixed_points(&3.into(), &1.into()).unwrap();
        assert_eq!(fp.cmp_plus(&q(13, 5)), Ordering::Less);
        assert_eq!(fp.cmp_plus(&q(55, 21)), Ordering::Greater);
        assert_eq!(fp.cmp_minus(&q(1, 2)), Ordering::Greater);
        assert_eq!(fp.cmp_minus(&q(1, 3)), Ordering::Less);
        let double = fixed_points(&2.into(), &1.into()).unwrap();
        assert_eq!(double.cmp_plus(&q(1, 1)), Ordering::Equal);
        assert_eq!(double.cmp_minus(&q(1, 1)), Ordering::Equal);
    }

    #[test]
    fn orbits() {
        assert_eq!(ratio_iterate(&params(3, 1, q(1, 1)), 3).unwrap(), [q(1, 1), q(2, 1), q(5, 2), q(13, 5)]);
        assert_eq!(
            ratio_iterate(&params(1, -1, q(1, 1)), 4).unwrap(),
            [q(1, 1), q(2, 1), q(3, 2), q(5, 3), q(8, 5)]
        );
        assert_eq!(ratio_iterate(&params(2, 1, q(1, 1)), 5).unwrap(), vec![q(1, 1); 6]);
    }

    #[test]
    fn orbit_through_zero_is_an_error() {
        // 3 − 2/(2/3) = 0
        assert_eq!(ratio_iterate(&params(3, 2, q(2, 3)), 3), Err(Error::DivisionByZeroInOrbit { index: 1 }));
        assert_eq!(RatioParams::new(1.into(), 1.into(), q(1, 1)), Err(Error::ComplexFixedPoints));
        assert_eq!(RatioParams::new(3.into(), 1.into(), q(0, 1)), Err(Error::ZeroInitialRatio));
    }

    #[test]
    fn convergence_modes() {
        let dec = convergence_profile(&params(3, 1, q(10, 1)), 64).unwrap();
        assert_eq!(dec.mode, ConvergenceMode::MonotoneDecreasing);
        assert!(dec.errors.last().unwrap() < &1e-40);

        let inc = convergence_profile(&params(3, 1, q(1, 1)), 64).unwrap();
        assert_eq!(inc.mode, ConvergenceMode::MonotoneIncreasing);

        let alt = convergence_profile(&params(1, -1, q(3, 1)), 64).unwrap();
        assert_eq!(alt.mode, ConvergenceMode::AlternatingSplit { evens_decreasing: true });
        let alt = convergence_profile(&params(1, -1, q(1, 1)), 64).unwrap();
        assert_eq!(alt.mode, ConvergenceMode::AlternatingSplit { evens_decreasing: false });

        let fixed = convergence_profile(&params(2, 1, q(1, 1)), 8).unwrap();
        assert_eq!(fixed.mode, ConvergenceMode::MonotoneDecreasing);

        // below φ₋ with d > 0: the orbit runs negative and jumps
        let div = convergence_profile(&params(3, 1, q(1, 10)), 16).unwrap();
        assert_eq!(div.mode, ConvergenceMode::Divergent);
    }

    #[test]
    fn exponential_fit_matches_derivative_at_fixed_point() {
        let prof = convergence_profile(&params(3, 1, q(10, 1)), 64).unwrap();
        let fit = prof.geometric_fit().unwrap();
        let fp = &prof.fixed_points;
        let expected = (fp.phi_minus() / fp.phi_plus()).abs();
        assert!((fit.lambda - expected).abs() < 1e-6, "{} vs {}", fit.lambda, expected);
        for (i, e) in prof.errors.iter().enumerate() {
            assert!(*e <= fit.c * fit.lambda.powi(i as i32) * (1.0 + 1e-9));
        }
    }

    #[test]
    fn row_interval_examples() {
        let g = row_ratio_interval(&golden_matrix(10)).unwrap();
        assert_eq!((g.lo, g.hi), (q(55, 34), q(89, 55)));

        let cm = build_coding_matrix(&UnimodularKeyMatrix::arnolds_cat(), &SeedPair::unit(), 4);
        let iv = row_ratio_interval(&cm).unwrap();
        assert_eq!((iv.lo.clone(), iv.hi.clone()), (q(34, 13), q(55, 21)));
        assert!(!iv.contains_row(&770.into(), &494.into()));
        assert!(iv.contains_row(&1846.into(), &705.into()));
        assert!(iv.contains_row(&0.into(), &0.into()));
        assert!(!iv.contains_row(&5.into(), &0.into()));

        // n = 1 golden: Bₙ = F₀ = 0
        assert_eq!(row_ratio_interval(&golden_matrix(1)), Err(Error::ZeroSequenceEntry));

        let shear = UnimodularKeyMatrix::new(Mat2::from_i64([[1, 1], [0, 1]])).unwrap();
        let cm = build_coding_matrix(&shear, &SeedPair::from_i64(0, 1).unwrap(), 3);
        // A: 0 1 2 3 4, B: 1 1 1 1 1
        let iv = row_ratio_interval(&cm).unwrap();
        assert_eq!(iv.lo, q(1, 1));
        assert_eq!(iv.hi, q(4, 3));
    }

    #[test]
    fn column_ratios() {
        let c1 = column_ratio(&Mat2::from_i64([[251, 96], [128, 49]])).unwrap();
        let (a, _) = c1.oriented(RatioOrientation::TopOverBottom).unwrap();
        assert_eq!(a, q(251, 128));
        let c = column_ratio(&Mat2::from_i64([[1450, 554], [733, 280]])).unwrap();
        assert!((c.first.to_f64().unwrap() - 0.5055).abs() < 1e-4);
        assert!((c.second.to_f64().unwrap() - 0.5054).abs() < 1e-4);
        assert_eq!(column_ratio(&Mat2::from_i64([[0, 1], [1, 1]])), Err(Error::ZeroDenominator));
    }

    #[test]
    fn half_even_rounding() {
        assert_eq!(round_half_even_scaled(&q(733, 1450), 2), BigInt::from(51));
        assert_eq!(round_half_even_scaled(&q(733, 1450), 1), BigInt::from(5));
        assert_eq!(round_half_even_scaled(&q(263, 296), 1), BigInt::from(9));
        assert_eq!(round_half_even_scaled(&q(1, 8), 2), BigInt::from(12));
        assert_eq!(round_half_even_scaled(&q(3, 8), 2), BigInt::from(38));
        assert_eq!(round_half_even_scaled(&q(5, 2), 0), BigInt::from(2));
        assert_eq!(format_scaled(&51.into(), 2), "0.51");
        assert_eq!(format_scaled(&5.into(), 1), "0.5");
        assert_eq!(format_scaled(&1376.into(), 2), "13.76");
        assert_eq!(format_scaled(&7.into(), 0), "7");
        assert_eq!(format_scaled(&(-5).into(), 3), "-0.005");
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("0.51").unwrap(), q(51, 100));
        assert_eq!(parse_rational("1.5").unwrap(), q(3, 2));
        assert_eq!(parse_rational("3/2").unwrap(), q(3, 2));
        assert_eq!(parse_rational("-2").unwrap(), q(-2, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational(".").is_err());
    }
}
