//! Detection and correction of single and double errors in a received
//! ciphertext.
//!
//! Every candidate repair is accepted only if it has non-negative entries,
//! meets `det C = μ·dⁿ·det P`, keeps both rows inside the row-ratio
//! interval, decrypts to an integral non-negative plaintext (inside the
//! alphabet when a bound is known), and, when a column ratio was sent,
//! rounds to it. Several surviving candidates are reported as ambiguous
//! rather than guessed between.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::cipher::{decrypt_matrix, verify_matrix, CipherKey, CipherPackage, ColumnRatioCheck, Verification};
use crate::coding::CodingMatrix;
use crate::diophantine::{diophantine_solve, DiophantineFamily, KRange};
use crate::matrix::Position;
use crate::ratio::{row_ratio_interval, RowInterval};
use crate::{Error, Mat2};

/// Error pattern assumed by a repair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorClass {
    None,
    Single(Position),
    /// `c11` and `c22`.
    Diagonal,
    /// `c12` and `c21`.
    AntiDiagonal,
    ColumnLeft,
    ColumnRight,
    RowTop,
    RowBottom,
}

impl ErrorClass {
    pub fn name(self) -> &'static str {
        match self {
            ErrorClass::None => "none",
            ErrorClass::Single(_) => "single",
            ErrorClass::Diagonal => "diagonal",
            ErrorClass::AntiDiagonal => "anti-diagonal",
            ErrorClass::ColumnLeft => "column-left",
            ErrorClass::ColumnRight => "column-right",
            ErrorClass::RowTop => "row-top",
            ErrorClass::RowBottom => "row-bottom",
        }
    }

    /// Positions a repair of this class may change.
    pub fn positions(self) -> Vec<Position> {
        use Position::*;
        match self {
            ErrorClass::None => vec![],
            ErrorClass::Single(p) => vec![p],
            ErrorClass::Diagonal => vec![R1C1, R2C2],
            ErrorClass::AntiDiagonal => vec![R1C2, R2C1],
            ErrorClass::ColumnLeft => vec![R1C1, R2C1],
            ErrorClass::ColumnRight => vec![R1C2, R2C2],
            ErrorClass::RowTop => vec![R1C1, R1C2],
            ErrorClass::RowBottom => vec![R2C1, R2C2],
        }
    }
}

impl fmt::Display for ErrorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorClass::Single(p) => write!(f, "single({p})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnSide {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSide {
    Top,
    Bottom,
}

/// Why a single candidate matrix was turned down.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    /// The determinant equation has no integer solution for the entry.
    NonIntegralSolution,
    /// The entry does not appear in the determinant equation.
    Unconstrained,
    NegativeEntry,
    Determinant,
    RowInterval,
    NonIntegralPlaintext,
    NegativePlaintext,
    OutsideAlphabet,
    ColumnRatio,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rejection::NonIntegralSolution => "non-integral-solution",
            Rejection::Unconstrained => "unconstrained",
            Rejection::NegativeEntry => "negative-entry",
            Rejection::Determinant => "determinant",
            Rejection::RowInterval => "row-interval",
            Rejection::NonIntegralPlaintext => "non-integral-plaintext",
            Rejection::NegativePlaintext => "negative-plaintext",
            Rejection::OutsideAlphabet => "outside-alphabet",
            Rejection::ColumnRatio => "column-ratio",
        })
    }
}

/// Why a strategy, or the whole pipeline, produced no repair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorrectionFailure {
    NoSingleCandidate,
    AmbiguousSingle(Vec<Position>),
    NonPositiveTarget,
    NoFactorNearEstimate,
    NoDiophantineSolution,
    NoSolutionNearEstimate,
    /// Row errors need the column ratio. `feasible` counts the family
    /// members inside the plaintext bounds, when those are known.
    ColumnRatioMissing { feasible: Option<u64> },
    /// More than one candidate passed every check.
    Ambiguous(Vec<(ErrorClass, Mat2)>),
    Uncorrectable(Vec<(ErrorClass, CorrectionFailure)>),
}

impl CorrectionFailure {
    pub fn name(&self) -> &'static str {
        match self {
            CorrectionFailure::NoSingleCandidate => "no-single-candidate",
            CorrectionFailure::AmbiguousSingle(_) => "ambiguous-single",
            CorrectionFailure::NonPositiveTarget => "non-positive-target",
            CorrectionFailure::NoFactorNearEstimate => "no-factor-near-estimate",
            CorrectionFailure::NoDiophantineSolution => "no-diophantine-solution",
            CorrectionFailure::NoSolutionNearEstimate => "no-solution-near-estimate",
            CorrectionFailure::ColumnRatioMissing { .. } => "column-ratio-missing",
            CorrectionFailure::Ambiguous(_) => "ambiguous",
            CorrectionFailure::Uncorrectable(_) => "uncorrectable",
        }
    }

    /// Several repairs fit; the receiver has to decide.
    pub fn is_ambiguity(&self) -> bool {
        matches!(self, CorrectionFailure::AmbiguousSingle(_) | CorrectionFailure::Ambiguous(_))
    }
}

impl fmt::Display for CorrectionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorrectionFailure::AmbiguousSingle(ps) => {
                f.write_str("ambiguous-single(")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
            CorrectionFailure::ColumnRatioMissing { feasible: Some(k) } => {
                write!(f, "column-ratio-missing({k} feasible)")
            }
            CorrectionFailure::Ambiguous(c) => write!(f, "ambiguous({} candidates)", c.len()),
            other => f.write_str(other.name()),
        }
    }
}

/// One step of a correction search.
#[derive(Debug, Clone, PartialEq)]
pub struct Attempt {
    pub class: ErrorClass,
    /// Float estimates of the unknown entries, in position order.
    pub estimates: Vec<f64>,
    /// Determinant with the unknown set to its rounded estimate (single
    /// errors only).
    pub det_at_estimate: Option<BigInt>,
    /// Exact solution for the unknown entry (single errors only).
    pub solution: Option<BigInt>,
    pub examined: u64,
    pub outcome: AttemptOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttemptOutcome {
    Accepted(Vec<Mat2>),
    Rejected(Rejection),
    Failed(CorrectionFailure),
}

/// Result of a correction call.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionReport {
    pub verification: Verification,
    pub assumed_class: ErrorClass,
    pub candidates_examined: u64,
    pub repaired: Option<Mat2>,
    pub residual_failure: Option<CorrectionFailure>,
    pub attempts: Vec<Attempt>,
}

impl CorrectionReport {
    pub fn is_repaired(&self) -> bool {
        self.repaired.is_some()
    }

    pub fn is_ambiguous(&self) -> bool {
        self.residual_failure.as_ref().is_some_and(CorrectionFailure::is_ambiguity)
    }
}

/// Search window around an estimate: `± max(min, ⌈percent% · |estimate|⌉)`.
/// Used when the exact ranges are unbounded or longer than
/// [`CorrectionOptions::max_candidates`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchWindow {
    pub min: u64,
    pub percent: u32,
}

impl Default for SearchWindow {
    fn default() -> Self {
        SearchWindow { min: 8, percent: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrectionOptions {
    /// Alphabet size: plaintext entries lie in `0..bound`.
    pub plaintext_bound: Option<u32>,
    pub window: SearchWindow,
    /// Largest number of trial divisors or family members per strategy.
    pub max_candidates: u64,
    /// Without a column ratio, report a repair as ambiguous when a double
    /// error in one row (inside the plaintext bounds) explains the
    /// received matrix as well. Rules out wrong repairs of row errors at
    /// the cost of most single-error repairs.
    pub guard_row_errors: bool,
}

impl Default for CorrectionOptions {
    fn default() -> Self {
        CorrectionOptions { plaintext_bound: None, window: SearchWindow::default(), max_candidates: 1 << 16, guard_row_errors: false }
    }
}

impl CorrectionOptions {
    pub fn with_bound(bound: u32) -> Self {
        CorrectionOptions { plaintext_bound: Some(bound), ..Self::default() }
    }
}

/// Inclusive ranges of ciphertext entries implied by an alphabet bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaintextBounds {
    /// `[0, (s − 1)(Aₙ₊₁ + Bₙ₊₁)]`.
    pub first_column: (BigInt, BigInt),
    /// `[0, (s − 1)(Aₙ + Bₙ)]`.
    pub second_column: (BigInt, BigInt),
}

impl PlaintextBounds {
    pub fn new(cm: &CodingMatrix, alphabet_size: u32) -> Self {
        let s = BigInt::from(alphabet_size.max(1) - 1);
        PlaintextBounds {
            first_column: (BigInt::zero(), &s * (cm.a_next() + cm.b_next())),
            second_column: (BigInt::zero(), &s * (cm.a() + cm.b())),
        }
    }

    pub fn for_position(&self, pos: Position) -> &(BigInt, BigInt) {
        if pos.row_col().1 == 1 {
            &self.first_column
        } else {
            &self.second_column
        }
    }
}

/// Everything the receiver knows besides the ciphertext.
#[derive(Debug, Clone)]
pub struct CorrectionContext {
    pub key: CipherKey,
    pub expected_det: BigInt,
    pub phi: f64,
    pub interval: Option<RowInterval>,
    pub rho: Option<ColumnRatioCheck>,
    pub plaintext_bound: Option<u32>,
    pub options: CorrectionOptions,
}

impl CorrectionContext {
    pub fn new(key: &CipherKey, det_p: &BigInt, rho: Option<ColumnRatioCheck>, options: CorrectionOptions) -> Self {
        let cm = key.coding_matrix();
        let phi = cm.phi().unwrap_or_else(|| {
            let (a, b) = (cm.a_next().to_f64().unwrap_or(1.0), cm.a().to_f64().unwrap_or(1.0));
            if b != 0.0 {
                a / b
            } else {
                1.0
            }
        });
        CorrectionContext {
            key: key.clone(),
            expected_det: key.expected_det(det_p),
            phi,
            interval: row_ratio_interval(cm).ok(),
            rho,
            plaintext_bound: options.plaintext_bound,
            options,
        }
    }

    pub fn from_package(pkg: &CipherPackage, key: &CipherKey, options: CorrectionOptions) -> Self {
        Self::new(key, &pkg.det_p, pkg.column_ratio.clone(), options)
    }

    pub fn coding_matrix(&self) -> &CodingMatrix {
        self.key.coding_matrix()
    }

    pub fn verify(&self, c: &Mat2) -> Verification {
        verify_matrix(c, &self.expected_det, self.interval.as_ref())
    }

    /// Runs every acceptance check on a candidate.
    pub fn check(&self, c: &Mat2) -> Result<(), Rejection> {
        if !c.is_non_negative() {
            return Err(Rejection::NegativeEntry);
        }
        if c.det() != self.expected_det {
            return Err(Rejection::Determinant);
        }
        if let Some(iv) = &self.interval {
            if !iv.contains_row(&c.a11, &c.a12) || !iv.contains_row(&c.a21, &c.a22) {
                return Err(Rejection::RowInterval);
            }
        }
        let p = match decrypt_matrix(c, &self.key) {
            Ok(p) => p,
            Err(Error::NegativePlaintext) => return Err(Rejection::NegativePlaintext),
            Err(_) => return Err(Rejection::NonIntegralPlaintext),
        };
        if let Some(bound) = self.plaintext_bound {
            let bound = BigInt::from(bound);
            if p.entries().iter().any(|e| **e >= bound) {
                return Err(Rejection::OutsideAlphabet);
            }
        }
        if let Some(rho) = &self.rho {
            if !rho.is_consistent(c) {
                return Err(Rejection::ColumnRatio);
            }
        }
        Ok(())
    }

    pub fn plaintext_bounds(&self) -> Option<PlaintextBounds> {
        self.plaintext_bound.map(|s| PlaintextBounds::new(self.coding_matrix(), s))
    }

    fn bound_span(&self, pos: Position) -> Span {
        match self.plaintext_bounds() {
            Some(b) => {
                let (lo, hi) = b.for_position(pos);
                Span::closed(q(lo), q(hi))
            }
            None => Span::non_negative(),
        }
    }

    /// Range of an unknown first-column entry whose row partner is `y`.
    fn span_given_second(&self, y: &BigInt) -> Option<Span> {
        match &self.interval {
            None => Some(Span::non_negative()),
            Some(_) if y.is_negative() => None,
            Some(iv) => Some(Span::closed(&iv.lo * q(y), &iv.hi * q(y))),
        }
    }

    /// Range of an unknown second-column entry whose row partner is `x`.
    fn span_given_first(&self, x: &BigInt) -> Option<Span> {
        match &self.interval {
            None => Some(Span::non_negative()),
            Some(_) if x.is_negative() => None,
            Some(iv) if x.is_zero() && iv.lo.is_positive() => Some(Span::closed(q(x), q(x))),
            Some(iv) => {
                let hi = iv.lo.is_positive().then(|| q(x) / &iv.lo);
                Some(Span { lo: q(x) / &iv.hi, hi })
            }
        }
    }

    /// `ρ` as `c21/c11` with its rounding range.
    fn rho_bottom_over_top(&self) -> Option<(f64, BigRational, Option<BigRational>)> {
        let rho = self.rho.as_ref()?;
        let (lo, hi) = rho.bottom_over_top_range().ok()?;
        let est = match &hi {
            Some(h) => ((&lo + h) / BigInt::from(2)).to_f64()?,
            None => lo.to_f64()?,
        };
        Some((est, lo, hi))
    }

    fn window(&self, est: f64) -> Span {
        let w = &self.options.window;
        let half = libm::ceil(libm::fabs(est) * f64::from(w.percent) / 100.0).max(w.min as f64);
        let lo = BigInt::from_f64(libm::floor(est - half)).unwrap_or_default();
        let hi = BigInt::from_f64(libm::ceil(est + half)).unwrap_or_default();
        Span::closed(q(&lo), q(&hi))
    }
}

fn q(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

fn f(n: &BigInt) -> f64 {
    n.to_f64().unwrap_or(f64::NAN)
}

/// Closed rational range with an optional upper end.
#[derive(Debug, Clone)]
struct Span {
    lo: BigRational,
    hi: Option<BigRational>,
}

impl Span {
    fn closed(lo: BigRational, hi: BigRational) -> Span {
        Span { lo, hi: Some(hi) }
    }

    fn non_negative() -> Span {
        Span { lo: BigRational::zero(), hi: None }
    }

    fn intersect(&self, other: &Span) -> Option<Span> {
        let lo = if self.lo >= other.lo { self.lo.clone() } else { other.lo.clone() };
        let hi = match (&self.hi, &other.hi) {
            (Some(a), Some(b)) => Some(if a <= b { a.clone() } else { b.clone() }),
            (a, b) => a.clone().or_else(|| b.clone()),
        };
        match &hi {
            Some(h) if &lo > h => None,
            _ => Some(Span { lo, hi }),
        }
    }

    /// Integer members `[⌈lo⌉, ⌊hi⌋]`.
    fn integers(&self) -> Option<(BigInt, Option<BigInt>)> {
        let lo = self.lo.ceil().to_integer();
        let hi = self.hi.as_ref().map(|h| h.floor().to_integer());
        match &hi {
            Some(h) if &lo > h => None,
            _ => Some((lo, hi)),
        }
    }

    fn k_range(&self, base: &BigInt, step: &BigInt) -> Option<KRange> {
        let hi = self.hi.clone();
        let fam = DiophantineFamily { x0: base.clone(), y0: BigInt::zero(), dx: step.clone(), dy: BigInt::zero() };
        match hi {
            Some(h) => fam.k_range_for_x(&self.lo, &h),
            None => {
                if step.is_zero() {
                    return (q(base) >= self.lo).then(KRange::all);
                }
                let t = (&self.lo - q(base)) / q(step);
                Some(if step.is_positive() {
                    KRange { lo: Some(t.ceil().to_integer()), hi: None }
                } else {
                    KRange { lo: None, hi: Some(t.floor().to_integer()) }
                })
            }
        }
    }
}

/// Finite `[lo, hi]` of length at most `cap`, re-centred on `center` when the
/// range is longer.
fn clamp_range(lo: Option<BigInt>, hi: Option<BigInt>, center: f64, cap: u64) -> Option<(BigInt, BigInt)> {
    let cap = BigInt::from(cap.max(1));
    let c = BigInt::from_f64(libm::round(center)).unwrap_or_default();
    let half: BigInt = &cap / 2;
    let lo = lo.unwrap_or_else(|| &c - &half);
    let hi = hi.unwrap_or_else(|| &c + &half);
    if lo > hi {
        return None;
    }
    if &hi - &lo < cap {
        return Some((lo, hi));
    }
    let start: BigInt = (&c - &half).max(lo).min(&hi - &cap + 1);
    let end = &start + cap - 1;
    Some((start, end))
}

/// Candidates that passed every check, deduplicated, with the number tried.
struct Search {
    accepted: Vec<Mat2>,
    examined: u64,
}

impl Search {
    fn new() -> Self {
        Search { accepted: Vec::new(), examined: 0 }
    }

    fn offer(&mut self, ctx: &CorrectionContext, c: Mat2) {
        self.examined += 1;
        if ctx.check(&c).is_ok() && !self.accepted.contains(&c) {
            self.accepted.push(c);
        }
    }
}

/// Single-error search. Uses the flagged row when exactly one row fails the
/// interval check, otherwise all four positions.
pub fn correct_single(c: &Mat2, ctx: &CorrectionContext) -> CorrectionReport {
    let verification = ctx.verify(c);
    if verification.is_clean() {
        return clean_report(c, verification);
    }
    let (attempts, found) = single_attempts(c, ctx, verification);
    let examined = attempts.len() as u64;
    let mut report = CorrectionReport {
        verification,
        assumed_class: ErrorClass::None,
        candidates_examined: examined,
        repaired: None,
        residual_failure: None,
        attempts,
    };
    match found.len() {
        0 => report.residual_failure = Some(CorrectionFailure::NoSingleCandidate),
        1 => {
            let (pos, m) = found.into_iter().next().expect("one");
            report.assumed_class = ErrorClass::Single(pos);
            report.repaired = Some(m);
        }
        _ => report.residual_failure = Some(CorrectionFailure::AmbiguousSingle(found.iter().map(|f| f.0).collect())),
    }
    report
}

fn single_positions(verification: Verification) -> Vec<Position> {
    let rows = verification.rows();
    use Position::*;
    match (rows.top, rows.bottom) {
        (true, false) => vec![R1C1, R1C2],
        (false, true) => vec![R2C1, R2C2],
        _ => vec![R1C1, R1C2, R2C1, R2C2],
    }
}

fn single_attempts(c: &Mat2, ctx: &CorrectionContext, verification: Verification) -> (Vec<Attempt>, Vec<(Position, Mat2)>) {
    let e = &ctx.expected_det;
    let phi = ctx.phi;
    let mut attempts = Vec::new();
    let mut found = Vec::new();
    for pos in single_positions(verification) {
        // coefficient·u = rhs for the unknown u at pos
        let (coeff, rhs, estimate) = match pos {
            Position::R1C1 => (c.a22.clone(), e + &c.a12 * &c.a21, phi * f(&c.a12)),
            Position::R1C2 => (c.a21.clone(), &c.a11 * &c.a22 - e, f(&c.a11) / phi),
            Position::R2C1 => (c.a12.clone(), &c.a11 * &c.a22 - e, phi * f(&c.a22)),
            Position::R2C2 => (c.a11.clone(), e + &c.a12 * &c.a21, f(&c.a21) / phi),
        };
        let det_at_estimate = BigInt::from_f64(libm::round(estimate)).map(|u| c.with(pos, u).det());
        let (solution, outcome) = if coeff.is_zero() {
            (None, AttemptOutcome::Rejected(Rejection::Unconstrained))
        } else if !(&rhs % &coeff).is_zero() {
            (None, AttemptOutcome::Rejected(Rejection::NonIntegralSolution))
        } else {
            let u = &rhs / &coeff;
            let cand = c.with(pos, u.clone());
            match ctx.check(&cand) {
                Ok(()) => {
                    found.push((pos, cand.clone()));
                    (Some(u), AttemptOutcome::Accepted(vec![cand]))
                }
                Err(r) => (Some(u), AttemptOutcome::Rejected(r)),
            }
        };
        attempts.push(Attempt {
            class: ErrorClass::Single(pos),
            estimates: vec![estimate],
            det_at_estimate,
            solution,
            examined: 1,
            outcome,
        });
    }
    (attempts, found)
}

/// Double error on the diagonal (`anti = false`: `c11, c22`) or the
/// anti-diagonal (`anti = true`: `c12, c21`), solved by bounded trial
/// division of the target product.
pub fn correct_diagonal(c: &Mat2, ctx: &CorrectionContext, anti: bool) -> CorrectionReport {
    let class = if anti { ErrorClass::AntiDiagonal } else { ErrorClass::Diagonal };
    let (attempt, found) = diagonal_attempt(c, ctx, anti);
    strategy_report(c, ctx, class, attempt, found)
}

fn diagonal_attempt(c: &Mat2, ctx: &CorrectionContext, anti: bool) -> (Attempt, Vec<Mat2>) {
    let phi = ctx.phi;
    let e = &ctx.expected_det;
    use Position::*;
    // unknown pair (p1, p2) with p1·p2 = n
    let (n, p1, p2, est, span1, span2) = if anti {
        (
            &c.a11 * &c.a22 - e,
            R1C2,
            R2C1,
            [f(&c.a11) / phi, phi * f(&c.a22)],
            ctx.span_given_first(&c.a11).and_then(|s| s.intersect(&ctx.bound_span(R1C2))),
            ctx.span_given_second(&c.a22).and_then(|s| s.intersect(&ctx.bound_span(R2C1))),
        )
    } else {
        (
            &c.a12 * &c.a21 + e,
            R1C1,
            R2C2,
            [phi * f(&c.a12), f(&c.a21) / phi],
            ctx.span_given_second(&c.a12).and_then(|s| s.intersect(&ctx.bound_span(R1C1))),
            ctx.span_given_first(&c.a21).and_then(|s| s.intersect(&ctx.bound_span(R2C2))),
        )
    };
    let class = if anti { ErrorClass::AntiDiagonal } else { ErrorClass::Diagonal };
    let mut attempt = Attempt {
        class,
        estimates: est.to_vec(),
        det_at_estimate: None,
        solution: None,
        examined: 0,
        outcome: AttemptOutcome::Failed(CorrectionFailure::NoFactorNearEstimate),
    };
    if !n.is_positive() {
        attempt.outcome = AttemptOutcome::Failed(CorrectionFailure::NonPositiveTarget);
        return (attempt, vec![]);
    }
    let positive = Span { lo: BigRational::one(), hi: None };
    let bounded = |s: Option<Span>, est: f64| -> Option<(BigInt, BigInt)> {
        let s = s?.intersect(&positive)?;
        let (lo, hi) = s.integers()?;
        let cap = ctx.options.max_candidates;
        match &hi {
            Some(h) if h - &lo < BigInt::from(cap) => Some((lo, h.clone())),
            _ => {
                let w = s.intersect(&ctx.window(est))?;
                let (wlo, whi) = w.integers()?;
                clamp_range(Some(wlo), whi, est, cap)
            }
        }
    };
    let r1 = bounded(span1, est[0]);
    let r2 = bounded(span2, est[1]);
    // enumerate the shorter range as trial divisors
    let (divisor_is_first, range) = match (&r1, &r2) {
        (Some(a), Some(b)) => {
            if &a.1 - &a.0 <= &b.1 - &b.0 {
                (true, a.clone())
            } else {
                (false, b.clone())
            }
        }
        _ => return (attempt, vec![]),
    };
    let mut search = Search::new();
    let mut d = range.0;
    while d <= range.1 {
        if (&n % &d).is_zero() {
            let other = &n / &d;
            let (v1, v2) = if divisor_is_first { (d.clone(), other) } else { (other, d.clone()) };
            search.offer(ctx, c.with(p1, v1).with(p2, v2));
        } else {
            search.examined += 1;
        }
        d += 1;
    }
    attempt.examined = search.examined;
    if !search.accepted.is_empty() {
        attempt.outcome = AttemptOutcome::Accepted(search.accepted.clone());
    }
    (attempt, search.accepted)
}

/// Double error in one column, solved as a linear Diophantine equation.
pub fn correct_column(c: &Mat2, ctx: &CorrectionContext, side: ColumnSide) -> CorrectionReport {
    let class = match side {
        ColumnSide::Left => ErrorClass::ColumnLeft,
        ColumnSide::Right => ErrorClass::ColumnRight,
    };
    let (attempt, found) = column_attempt(c, ctx, side);
    strategy_report(c, ctx, class, attempt, found)
}

fn column_attempt(c: &Mat2, ctx: &CorrectionContext, side: ColumnSide) -> (Attempt, Vec<Mat2>) {
    let phi = ctx.phi;
    let e = &ctx.expected_det;
    use Position::*;
    match side {
        // x·c22 − c12·z = E
        ColumnSide::Left => family_attempt(
            c,
            ctx,
            ErrorClass::ColumnLeft,
            diophantine_solve(&c.a22, &c.a12, e),
            (R1C1, R2C1),
            [phi * f(&c.a12), phi * f(&c.a22)],
            ctx.span_given_second(&c.a12),
            ctx.span_given_second(&c.a22),
        ),
        // c11·v − y·c21 = E, family over (v, y)
        ColumnSide::Right => family_attempt(
            c,
            ctx,
            ErrorClass::ColumnRight,
            diophantine_solve(&c.a11, &c.a21, e),
            (R2C2, R1C2),
            [f(&c.a21) / phi, f(&c.a11) / phi],
            ctx.span_given_first(&c.a21),
            ctx.span_given_first(&c.a11),
        ),
    }
}

/// Double error in one row. Needs the column ratio; without it only the
/// number of family members inside the plaintext bounds is reported.
pub fn correct_row(c: &Mat2, ctx: &CorrectionContext, row: RowSide) -> CorrectionReport {
    let class = match row {
        RowSide::Top => ErrorClass::RowTop,
        RowSide::Bottom => ErrorClass::RowBottom,
    };
    let (attempt, found) = row_attempt(c, ctx, row);
    strategy_report(c, ctx, class, attempt, found)
}

fn row_attempt(c: &Mat2, ctx: &CorrectionContext, row: RowSide) -> (Attempt, Vec<Mat2>) {
    let e = &ctx.expected_det;
    use Position::*;
    let (class, fam, positions) = match row {
        // x·c22 − y·c21 = E
        RowSide::Top => (ErrorClass::RowTop, diophantine_solve(&c.a22, &c.a21, e), (R1C1, R1C2)),
        // c11·v − c12·z = E, family over (v, z)
        RowSide::Bottom => (ErrorClass::RowBottom, diophantine_solve(&c.a11, &c.a12, e), (R2C2, R2C1)),
    };
    let Some((rho, rho_lo, rho_hi)) = ctx.rho_bottom_over_top() else {
        let feasible = match (&fam, ctx.plaintext_bounds()) {
            (Ok(fam), Some(bounds)) => {
                Some(feasible_in_bounds(fam, &bounds, positions).map_or(0, |k| k.len().and_then(|n| n.to_u64()).unwrap_or(u64::MAX)))
            }
            _ => None,
        };
        let attempt = Attempt {
            class,
            estimates: vec![],
            det_at_estimate: None,
            solution: None,
            examined: 0,
            outcome: AttemptOutcome::Failed(CorrectionFailure::ColumnRatioMissing { feasible }),
        };
        return (attempt, vec![]);
    };
    match row {
        RowSide::Top => {
            // c21/x rounds to ρ
            let lo = rho_hi.as_ref().filter(|h| h.is_positive()).map_or(BigRational::zero(), |h| q(&c.a21) / h);
            let x_span = Span { lo, hi: rho_lo.is_positive().then(|| q(&c.a21) / &rho_lo) };
            family_attempt(
                c,
                ctx,
                class,
                fam,
                positions,
                [f(&c.a21) / rho, f(&c.a22) / rho],
                Some(x_span),
                Some(Span::non_negative()),
            )
        }
        RowSide::Bottom => {
            // z/c11 rounds to ρ
            let z_span = Span { lo: &rho_lo * q(&c.a11), hi: rho_hi.as_ref().map(|h| h * q(&c.a11)) };
            family_attempt(
                c,
                ctx,
                class,
                fam,
                positions,
                [rho * f(&c.a12), rho * f(&c.a11)],
                Some(Span::non_negative()),
                Some(z_span),
            )
        }
    }
}

/// Enumerates `(u1, u2) = family(k)` placed at `positions`, restricted to
/// `span1 × span2` and the plaintext bounds.
#[allow(clippy::too_many_arguments)]
fn family_attempt(
    c: &Mat2,
    ctx: &CorrectionContext,
    class: ErrorClass,
    fam: crate::Result<DiophantineFamily>,
    positions: (Position, Position),
    est: [f64; 2],
    span1: Option<Span>,
    span2: Option<Span>,
) -> (Attempt, Vec<Mat2>) {
    let mut attempt = Attempt {
        class,
        estimates: est.to_vec(),
        det_at_estimate: None,
        solution: None,
        examined: 0,
        outcome: AttemptOutcome::Failed(CorrectionFailure::NoSolutionNearEstimate),
    };
    let fam = match fam {
        Ok(f) => f,
        Err(_) => {
            attempt.outcome = AttemptOutcome::Failed(CorrectionFailure::NoDiophantineSolution);
            return (attempt, vec![]);
        }
    };
    let span1 = span1.and_then(|s| s.intersect(&ctx.bound_span(positions.0)));
    let span2 = span2.and_then(|s| s.intersect(&ctx.bound_span(positions.1)));
    let k = match (span1, span2) {
        (Some(s1), Some(s2)) => s1
            .k_range(&fam.x0, &fam.dx)
            .zip(s2.k_range(&fam.y0, &fam.dy))
            .and_then(|(a, b)| a.intersect(&b)),
        _ => None,
    };
    let Some(k) = k else { return (attempt, vec![]) };
    // family parameter nearest the estimate of the first unknown
    let k_est = if fam.dx.is_zero() {
        (est[1] - f(&fam.y0)) / f(&fam.dy)
    } else {
        (est[0] - f(&fam.x0)) / f(&fam.dx)
    };
    let cap = ctx.options.max_candidates;
    let bounded = matches!(k.len(), Some(n) if n <= BigInt::from(cap));
    let (k_lo, k_hi) = if bounded {
        (k.lo.expect("bounded"), k.hi.expect("bounded"))
    } else {
        let w = ctx.window(k_est);
        let wk = KRange { lo: w.integers().map(|r| r.0), hi: w.integers().and_then(|r| r.1) };
        let Some(k) = k.intersect(&wk) else { return (attempt, vec![]) };
        match clamp_range(k.lo, k.hi, k_est, cap) {
            Some(r) => r,
            None => return (attempt, vec![]),
        }
    };
    let mut search = Search::new();
    let mut kk = k_lo;
    while kk <= k_hi {
        let (u1, u2) = fam.at(&kk);
        search.offer(ctx, c.with(positions.0, u1).with(positions.1, u2));
        kk += 1;
    }
    attempt.examined = search.examined;
    if !search.accepted.is_empty() {
        attempt.outcome = AttemptOutcome::Accepted(search.accepted.clone());
    }
    (attempt, search.accepted)
}

fn clean_report(c: &Mat2, verification: Verification) -> CorrectionReport {
    CorrectionReport {
        verification,
        assumed_class: ErrorClass::None,
        candidates_examined: 0,
        repaired: Some(c.clone()),
        residual_failure: None,
        attempts: vec![],
    }
}

fn strategy_report(c: &Mat2, ctx: &CorrectionContext, class: ErrorClass, attempt: Attempt, found: Vec<Mat2>) -> CorrectionReport {
    let verification = ctx.verify(c);
    let mut report = CorrectionReport {
        verification,
        assumed_class: class,
        candidates_examined: attempt.examined,
        repaired: None,
        residual_failure: None,
        attempts: vec![],
    };
    match (found.len(), &attempt.outcome) {
        (1, _) => report.repaired = found.into_iter().next(),
        (0, AttemptOutcome::Failed(f)) => report.residual_failure = Some(f.clone()),
        (0, _) => report.residual_failure = Some(CorrectionFailure::NoSolutionNearEstimate),
        _ => report.residual_failure = Some(CorrectionFailure::Ambiguous(found.into_iter().map(|m| (class, m)).collect())),
    }
    report.attempts.push(attempt);
    report
}

/// The full pipeline: verify, then single errors, then every double-error
/// class (rows only when a column ratio was sent). A stage that leaves
/// exactly one candidate wins; several distinct candidates are reported as
/// ambiguous.
pub fn correct(pkg: &CipherPackage, key: &CipherKey) -> CorrectionReport {
    correct_with(pkg, key, CorrectionOptions::default())
}

pub fn correct_with(pkg: &CipherPackage, key: &CipherKey, options: CorrectionOptions) -> CorrectionReport {
    let ctx = CorrectionContext::from_package(pkg, key, options);
    correct_matrix(&pkg.c, &ctx)
}

pub fn correct_matrix(c: &Mat2, ctx: &CorrectionContext) -> CorrectionReport {
    let verification = ctx.verify(c);
    if verification.is_clean() {
        return clean_report(c, verification);
    }
    let mut report = CorrectionReport {
        verification,
        assumed_class: ErrorClass::None,
        candidates_examined: 0,
        repaired: None,
        residual_failure: None,
        attempts: vec![],
    };
    let mut reasons = Vec::new();

    let (attempts, found) = single_attempts(c, ctx, verification);
    report.candidates_examined += attempts.len() as u64;
    report.attempts.extend(attempts);
    match found.len() {
        0 => reasons.push((ErrorClass::Single(Position::R1C1), CorrectionFailure::NoSingleCandidate)),
        1 => {
            let (pos, m) = found.into_iter().next().expect("one");
            return settle(report, c, ctx, ErrorClass::Single(pos), m);
        }
        _ => {
            report.residual_failure = Some(CorrectionFailure::AmbiguousSingle(found.iter().map(|f| f.0).collect()));
            return report;
        }
    }

    let doubles = [
        diagonal_attempt(c, ctx, false),
        diagonal_attempt(c, ctx, true),
        column_attempt(c, ctx, ColumnSide::Left),
        column_attempt(c, ctx, ColumnSide::Right),
        row_attempt(c, ctx, RowSide::Top),
        row_attempt(c, ctx, RowSide::Bottom),
    ];
    let mut pool: Vec<(ErrorClass, Mat2)> = Vec::new();
    for (attempt, found) in doubles {
        report.candidates_examined += attempt.examined;
        if let AttemptOutcome::Failed(f) = &attempt.outcome {
            reasons.push((attempt.class, f.clone()));
        }
        for m in found {
            if !pool.iter().any(|(_, p)| p == &m) {
                pool.push((attempt.class, m));
            }
        }
        report.attempts.push(attempt);
    }
    match pool.len() {
        0 => report.residual_failure = Some(CorrectionFailure::Uncorrectable(reasons)),
        1 => {
            let (class, m) = pool.pop().expect("one");
            return settle(report, c, ctx, class, m);
        }
        _ => report.residual_failure = Some(CorrectionFailure::Ambiguous(pool)),
    }
    report
}

/// Accepts `m`, unless some double error in one row also explains `c`.
/// Rows are searched through ρ when it is present, and through the
/// plaintext bounds only when row errors are guarded against.
fn settle(mut report: CorrectionReport, c: &Mat2, ctx: &CorrectionContext, class: ErrorClass, m: Mat2) -> CorrectionReport {
    let mut rivals: Vec<(ErrorClass, Mat2)> = Vec::new();
    for row in [RowSide::Top, RowSide::Bottom] {
        let found = if ctx.rho.is_some() {
            row_attempt(c, ctx, row).1
        } else if ctx.options.guard_row_errors {
            row_family_in_bounds(c, ctx, row)
        } else {
            vec![]
        };
        for r in found {
            if r != m && !rivals.iter().any(|(_, x)| x == &r) {
                rivals.push((row_class(row), r));
            }
        }
    }
    if rivals.is_empty() {
        report.assumed_class = class;
        report.repaired = Some(m);
    } else {
        rivals.insert(0, (class, m));
        report.residual_failure = Some(CorrectionFailure::Ambiguous(rivals));
    }
    report
}

fn row_class(row: RowSide) -> ErrorClass {
    match row {
        RowSide::Top => ErrorClass::RowTop,
        RowSide::Bottom => ErrorClass::RowBottom,
    }
}

/// Row-family members inside the plaintext bounds that pass every check;
/// empty without a bound.
fn row_family_in_bounds(c: &Mat2, ctx: &CorrectionContext, row: RowSide) -> Vec<Mat2> {
    use Position::*;
    let e = &ctx.expected_det;
    let (fam, positions) = match row {
        RowSide::Top => (diophantine_solve(&c.a22, &c.a21, e), (R1C1, R1C2)),
        RowSide::Bottom => (diophantine_solve(&c.a11, &c.a12, e), (R2C2, R2C1)),
    };
    let (Ok(fam), Some(bounds)) = (fam, ctx.plaintext_bounds()) else { return vec![] };
    let Some(KRange { lo: Some(lo), hi: Some(hi) }) = feasible_in_bounds(&fam, &bounds, positions) else {
        return vec![];
    };
    let hi = hi.min(&lo + BigInt::from(ctx.options.max_candidates));
    let mut search = Search::new();
    let mut k = lo;
    while k <= hi {
        let (u1, u2) = fam.at(&k);
        search.offer(ctx, c.with(positions.0, u1).with(positions.1, u2));
        k += 1;
    }
    search.accepted
}

/// Integer `k` values of a family with both unknowns inside the plaintext
/// bounds; `None` without a bound.
pub fn feasible_in_bounds(fam: &DiophantineFamily, bounds: &PlaintextBounds, positions: (Position, Position)) -> Option<KRange> {
    let (lo1, hi1) = bounds.for_position(positions.0);
    let (lo2, hi2) = bounds.for_position(positions.1);
    let a = fam.k_range_for_x(&q(lo1), &q(hi1))?;
    let b = fam.k_range_for_y(&q(lo2), &q(hi2))?;
    a.intersect(&b)
}
