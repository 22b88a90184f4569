//! Keys, encryption `C = P·Mₙ`, decryption `P = C·Mₙ⁻¹`, and check numbers.
//!
//! The check number `det P` travels in clear next to the ciphertext, and so
//! does the optional column ratio. Both leak information about the
//! plaintext; they trade secrecy for correctability.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::coding::{build_coding_matrix, CodingMatrix, SeedPair, UnimodularKeyMatrix};
use crate::ratio::{format_scaled, parse_rational, round_half_even_scaled, row_ratio_interval, RatioOrientation, RowInterval};
use crate::text::{decode_blocks, encode_text, Alphabet, Permutation, PlaintextMatrix};
use crate::{Error, Mat2, Result};

/// Largest exponent accepted by [`CipherKey::new`]; entries of `Mₙ` grow
/// exponentially in `n`.
pub const DEFAULT_MAX_EXPONENT: u64 = 512;

/// Default number of decimal digits for the transmitted column ratio.
pub const DEFAULT_RATIO_DIGITS: u32 = 2;

/// The secret key: key matrix, seed, exponent and block permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherKey {
    u: UnimodularKeyMatrix,
    seed: SeedPair,
    n: u64,
    perm: Permutation,
    cm: CodingMatrix,
}

impl CipherKey {
    pub fn new(u: UnimodularKeyMatrix, seed: SeedPair, n: u64, perm: Permutation) -> Result<Self> {
        Self::with_max_exponent(u, seed, n, perm, DEFAULT_MAX_EXPONENT)
    }

    pub fn with_max_exponent(
        u: UnimodularKeyMatrix,
        seed: SeedPair,
        n: u64,
        perm: Permutation,
        max_exponent: u64,
    ) -> Result<Self> {
        if n > max_exponent {
            return Err(Error::InvalidKey(format!("exponent {n} exceeds the cap {max_exponent}")));
        }
        let cm = build_coding_matrix(&u, &seed, n);
        if cm.mu().is_zero() {
            return Err(Error::InvalidKey(format!(
                "seed ({}, {}) makes M₀ singular",
                seed.a0(),
                seed.b0()
            )));
        }
        Ok(CipherKey { u, seed, n, perm, cm })
    }

    /// `Qⁿ` with the identity permutation.
    pub fn golden(n: u64) -> Result<Self> {
        Self::new(UnimodularKeyMatrix::golden(), SeedPair::unit(), n, Permutation::identity())
    }

    pub fn k_golden(k: u64, n: u64) -> Result<Self> {
        Self::new(UnimodularKeyMatrix::k_golden(k)?, SeedPair::unit(), n, Permutation::identity())
    }

    /// Arnold's cat matrix `[[2,1],[1,1]]` with seed `(0, 1)`, so that
    /// `M₀ = [[1,0],[1,1]]`.
    pub fn arnolds_cat(n: u64) -> Result<Self> {
        Self::new(UnimodularKeyMatrix::arnolds_cat(), SeedPair::unit(), n, Permutation::identity())
    }

    pub fn key_matrix(&self) -> &UnimodularKeyMatrix {
        &self.u
    }

    pub fn seed(&self) -> &SeedPair {
        &self.seed
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    pub fn coding_matrix(&self) -> &CodingMatrix {
        &self.cm
    }

    /// `det C` expected for a plaintext with determinant `det_p`.
    pub fn expected_det(&self, det_p: &BigInt) -> BigInt {
        self.cm.det() * det_p
    }
}

/// The optional column-ratio check number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnRatioCheck {
    pub orientation: RatioOrientation,
    /// Decimal string with exactly `digits` fractional digits.
    pub value: String,
    pub digits: u32,
}

impl ColumnRatioCheck {
    /// Rounds `c21/c11` half-to-even at `digits` places.
    pub fn compute(c: &Mat2, digits: u32) -> Result<Self> {
        Self::compute_oriented(c, digits, RatioOrientation::BottomOverTop)
    }

    pub fn compute_oriented(c: &Mat2, digits: u32, orientation: RatioOrientation) -> Result<Self> {
        let ratio = first_column_ratio(c, orientation)?;
        let value = format_scaled(&round_half_even_scaled(&ratio, digits), digits);
        Ok(ColumnRatioCheck { orientation, value, digits })
    }

    /// The transmitted value as `round(ρ·10^digits)`.
    pub fn scaled(&self) -> Result<BigInt> {
        let q = parse_rational(&self.value)? * BigInt::from(10).pow(self.digits);
        if !q.is_integer() {
            return Err(Error::Malformed(format!(
                "column ratio {:?} has more than {} fractional digits",
                self.value, self.digits
            )));
        }
        Ok(q.to_integer())
    }

    pub fn value_rational(&self) -> Result<BigRational> {
        parse_rational(&self.value)
    }

    /// Whether `c` rounds to the transmitted value.
    pub fn is_consistent(&self, c: &Mat2) -> bool {
        match (first_column_ratio(c, self.orientation), self.scaled()) {
            (Ok(r), Ok(s)) => round_half_even_scaled(&r, self.digits) == s,
            _ => false,
        }
    }

    /// Closed range of `c21/c11` values that round to the transmitted value;
    /// `hi` is `None` when the range is unbounded above.
    pub fn bottom_over_top_range(&self) -> Result<(BigRational, Option<BigRational>)> {
        let v = self.value_rational()?;
        let half = BigRational::new(1.into(), BigInt::from(10).pow(self.digits) * 2);
        let lo = &v - &half;
        let hi = &v + &half;
        let zero = BigRational::zero();
        Ok(match self.orientation {
            RatioOrientation::BottomOverTop => (if lo.is_negative() { zero } else { lo }, Some(hi)),
            RatioOrientation::TopOverBottom => {
                let lo_inv = if hi.is_positive() { hi.recip() } else { zero };
                let hi_inv = if lo.is_positive() { Some(lo.recip()) } else { None };
                (lo_inv, hi_inv)
            }
        })
    }
}

fn first_column_ratio(c: &Mat2, orientation: RatioOrientation) -> Result<BigRational> {
    let (num, den) = match orientation {
        RatioOrientation::BottomOverTop => (&c.a21, &c.a11),
        RatioOrientation::TopOverBottom => (&c.a11, &c.a21),
    };
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(BigRational::new(num.clone(), den.clone()))
}

/// A ciphertext block with its check numbers and framing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherPackage {
    pub c: Mat2,
    pub det_p: BigInt,
    pub column_ratio: Option<ColumnRatioCheck>,
    pub block_index: u64,
    /// Padding symbols in the final block of the message; zero elsewhere.
    pub pad_len: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EncryptOptions {
    /// Emit the column ratio at this many digits.
    pub ratio_digits: Option<u32>,
}

impl EncryptOptions {
    pub fn with_column_ratio(digits: u32) -> Self {
        EncryptOptions { ratio_digits: Some(digits) }
    }
}

/// `C = P·Mₙ` with `det P` as check number. The column ratio is omitted when
/// `c11` or `c12` is zero.
pub fn encrypt(p: &PlaintextMatrix, key: &CipherKey, opts: &EncryptOptions) -> CipherPackage {
    let c = &p.p * key.coding_matrix().matrix();
    let column_ratio = match opts.ratio_digits {
        Some(digits) if !c.a11.is_zero() && !c.a12.is_zero() => ColumnRatioCheck::compute(&c, digits).ok(),
        _ => None,
    };
    CipherPackage { det_p: p.p.det(), c, column_ratio, block_index: 0, pad_len: 0 }
}

/// Encodes and encrypts a whole message, one package per block.
pub fn encrypt_text(text: &str, alphabet: &Alphabet, key: &CipherKey, opts: &EncryptOptions) -> Result<Vec<CipherPackage>> {
    let enc = encode_text(text, alphabet, key.permutation())?;
    let last = enc.blocks.len().saturating_sub(1);
    Ok(enc
        .blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mut pkg = encrypt(b, key, opts);
            pkg.block_index = i as u64;
            pkg.pad_len = if i == last { enc.pad_len } else { 0 };
            pkg
        })
        .collect())
}

/// `P = C·adj(Mₙ)/det(Mₙ)`, requiring exact divisibility and non-negative
/// entries.
pub fn decrypt_matrix(c: &Mat2, key: &CipherKey) -> Result<Mat2> {
    let (adj, det) = key.coding_matrix().matrix().inverse_exact()?;
    let p = (c * &adj).div_exact(&det).ok_or(Error::NonIntegralPlaintext)?;
    if !p.is_non_negative() {
        return Err(Error::NegativePlaintext);
    }
    Ok(p)
}

pub fn decrypt(pkg: &CipherPackage, key: &CipherKey) -> Result<PlaintextMatrix> {
    decrypt_matrix(&pkg.c, key).map(PlaintextMatrix::new)
}

/// Decrypts and decodes a message; the padding count is read from the last
/// package.
pub fn decrypt_text(pkgs: &[CipherPackage], alphabet: &Alphabet, key: &CipherKey) -> Result<String> {
    let blocks = pkgs.iter().map(|p| decrypt_matrix(&p.c, key)).collect::<Result<Vec<_>>>()?;
    let pad = pkgs.last().map_or(0, |p| p.pad_len);
    decode_blocks(&blocks, alphabet, key.permutation(), pad)
}

/// Rows failing the row-ratio interval check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RowFlags {
    pub top: bool,
    pub bottom: bool,
}

impl RowFlags {
    pub fn any(self) -> bool {
        self.top || self.bottom
    }

    pub fn count(self) -> usize {
        self.top as usize + self.bottom as usize
    }
}

/// Outcome of checking a received package.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verification {
    Clean,
    DeterminantMismatch,
    RowIntervalViolation(RowFlags),
    Both(RowFlags),
}

impl Verification {
    pub fn is_clean(self) -> bool {
        self == Verification::Clean
    }

    pub fn rows(self) -> RowFlags {
        match self {
            Verification::RowIntervalViolation(r) | Verification::Both(r) => r,
            _ => RowFlags::default(),
        }
    }

    pub fn determinant_ok(self) -> bool {
        matches!(self, Verification::Clean | Verification::RowIntervalViolation(_))
    }
}

/// Checks `det C` against `expected_det` and each row against `interval`
/// (skipped when the interval is unavailable).
pub fn verify_matrix(c: &Mat2, expected_det: &BigInt, interval: Option<&RowInterval>) -> Verification {
    let det_ok = &c.det() == expected_det;
    let rows = interval.map_or(RowFlags::default(), |iv| RowFlags {
        top: !iv.contains_row(&c.a11, &c.a12),
        bottom: !iv.contains_row(&c.a21, &c.a22),
    });
    match (det_ok, rows.any()) {
        (true, false) => Verification::Clean,
        (false, false) => Verification::DeterminantMismatch,
        (true, true) => Verification::RowIntervalViolation(rows),
        (false, true) => Verification::Both(rows),
    }
}

pub fn verify_package(pkg: &CipherPackage, key: &CipherKey) -> Verification {
    let interval = row_ratio_interval(key.coding_matrix()).ok();
    verify_matrix(&pkg.c, &key.expected_det(&pkg.det_p), interval.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: [[i64; 2]; 2]) -> Mat2 {
        Mat2::from_i64(a)
    }

    fn pkg(c: Mat2, det_p: i64) -> CipherPackage {
        CipherPackage { c, det_p: det_p.into(), column_ratio: None, block_index: 0, pad_len: 0 }
    }

    #[test]
    fn golden_worked_example() {
        let key = CipherKey::golden(10).unwrap();
        let out = encrypt(&PlaintextMatrix::new(m([[12, 0], [19, 7]])), &key, &EncryptOptions::default());
        assert_eq!(out.c, m([[1068, 660], [2076, 1283]]));
        assert_eq!(out.det_p, BigInt::from(84));
        assert_eq!(out.column_ratio, None);
        assert_eq!(decrypt(&out, &key).unwrap().p, m([[12, 0], [19, 7]]));
        assert_eq!(verify_package(&out, &key), Verification::Clean);
    }

    #[test]
    fn cat_examples() {
        let key = CipherKey::arnolds_cat(4).unwrap();
        let out = encrypt(&PlaintextMatrix::new(m([[19, 7], [2, 10]])), &key, &EncryptOptions::default());
        assert_eq!(out.c, m([[1283, 490], [450, 172]]));
        assert_eq!(out.det_p, BigInt::from(176));

        let out = encrypt(&PlaintextMatrix::new(m([[14, 20], [9, 7]])), &key, &EncryptOptions::with_column_ratio(2));
        assert_eq!(out.c, m([[1450, 554], [733, 280]]));
        assert_eq!(out.det_p, BigInt::from(-82));
        let rho = out.column_ratio.unwrap();
        assert_eq!(rho.value, "0.51");
        assert_eq!(rho.orientation, RatioOrientation::BottomOverTop);
        assert!(rho.is_consistent(&out.c));

        let p = decrypt(&pkg(m([[770, 294], [1846, 705]]), 126), &key).unwrap();
        assert_eq!(p.p, m([[14, 0], [28, 9]]));
        assert_eq!(p.p.det(), BigInt::from(126));
    }

    #[test]
    fn zero_exponent_round_trip() {
        let key = CipherKey::arnolds_cat(0).unwrap();
        let p = m([[3, 4], [5, 6]]);
        let c = &p * key.coding_matrix().matrix();
        assert_eq!(decrypt(&pkg(c, 0), &key).unwrap().p, p);
    }

    #[test]
    fn column_ratio_omitted_on_zero_denominator() {
        let key = CipherKey::golden(4).unwrap();
        let out = encrypt(&PlaintextMatrix::new(m([[0, 0], [3, 1]])), &key, &EncryptOptions::with_column_ratio(2));
        assert_eq!(out.column_ratio, None);
    }

    #[test]
    fn corrupted_packages_fail_decryption_or_checks() {
        let key = CipherKey::arnolds_cat(4).unwrap();
        let received = pkg(m([[770, 494], [1846, 705]]), 126);
        assert_eq!(
            verify_package(&received, &key),
            Verification::Both(RowFlags { top: true, bottom: false })
        );
        assert!(decrypt(&received, &key).is_err());

        // a rank-one perturbation along a valid row keeps both rows in range
        let clean = pkg(m([[770, 294], [1846, 705]]), 126);
        assert_eq!(verify_package(&clean, &key), Verification::Clean);
        let both = pkg(m([[770 + 1846, 294 + 705], [1846, 705]]), 126);
        assert_eq!(verify_package(&both, &key), Verification::Clean);
        let drift = pkg(m([[770 + 1846, 294 + 705], [1846, 705]]), 125);
        assert_eq!(verify_package(&drift, &key), Verification::DeterminantMismatch);
    }

    #[test]
    fn non_integral_and_negative_plaintexts() {
        let u = UnimodularKeyMatrix::arnolds_cat();
        // μ = (2 − 1)·1·2 + 1·4 − 1·1 = 5
        let key = CipherKey::new(u, SeedPair::from_i64(1, 2).unwrap(), 3, Permutation::identity()).unwrap();
        assert_eq!(key.coding_matrix().mu(), &BigInt::from(5));
        let c = m([[1, 0], [0, 1]]);
        assert_eq!(decrypt_matrix(&c, &key), Err(Error::NonIntegralPlaintext));
        let cat = CipherKey::arnolds_cat(1).unwrap();
        // M₁ = [[3,1],[2,1]], P = [[-1, 0], [0, 1]]
        assert_eq!(decrypt_matrix(&m([[-3, -1], [2, 1]]), &cat), Err(Error::NegativePlaintext));
    }

    #[test]
    fn key_validation() {
        let u = UnimodularKeyMatrix::new(m([[1, 1], [0, 1]])).unwrap();
        // (1, 0) is an eigenvector of the shear, so M₀ is singular
        assert!(CipherKey::new(u, SeedPair::from_i64(1, 0).unwrap(), 3, Permutation::identity()).is_err());
        assert!(CipherKey::golden(513).is_err());
        assert!(CipherKey::with_max_exponent(
            UnimodularKeyMatrix::golden(),
            SeedPair::unit(),
            600,
            Permutation::identity(),
            1000
        )
        .is_ok());
    }

    #[test]
    fn text_round_trip_with_padding() {
        let key = CipherKey::new(
            UnimodularKeyMatrix::arnolds_cat(),
            SeedPair::from_i64(3, 1).unwrap(),
            7,
            Permutation::new([2, 0, 3, 1]).unwrap(),
        )
        .unwrap();
        let pkgs = encrypt_text("GOLDENRATIO", &Alphabet::Latin, &key, &EncryptOptions::with_column_ratio(2)).unwrap();
        assert_eq!(pkgs.len(), 3);
        assert_eq!(pkgs[2].pad_len, 1);
        assert_eq!(pkgs.iter().map(|p| p.block_index).collect::<Vec<_>>(), [0, 1, 2]);
        assert_eq!(decrypt_text(&pkgs, &Alphabet::Latin, &key).unwrap(), "GOLDENRATIO");
    }

    #[test]
    fn ratio_ranges() {
        let check = ColumnRatioCheck { orientation: RatioOrientation::BottomOverTop, value: "0.9".into(), digits: 1 };
        let (lo, hi) = check.bottom_over_top_range().unwrap();
        assert_eq!(lo, BigRational::new(85.into(), 100.into()));
        assert_eq!(hi, Some(BigRational::new(95.into(), 100.into())));
        let inv = ColumnRatioCheck { orientation: RatioOrientation::TopOverBottom, value: "2.0".into(), digits: 1 };
        let (lo, hi) = inv.bottom_over_top_range().unwrap();
        assert_eq!(lo, BigRational::new(100.into(), 205.into()));
        assert_eq!(hi, Some(BigRational::new(100.into(), 195.into())));
        let bad = ColumnRatioCheck { orientation: RatioOrientation::BottomOverTop, value: "0.123".into(), digits: 2 };
        assert!(bad.scaled().is_err());
    }
}
