//! Exact 2×2 integer matrices.

use core::fmt;
use core::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// A 2×2 matrix of arbitrary-precision signed integers, `[[a11, a12], [a21, a22]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat2 {
    pub a11: BigInt,
    pub a12: BigInt,
    pub a21: BigInt,
    pub a22: BigInt,
}

/// One of the four entry positions of a [`Mat2`], 1-based as in `c12`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Position {
    R1C1,
    R1C2,
    R2C1,
    R2C2,
}

impl Position {
    pub const ALL: [Position; 4] = [Position::R1C1, Position::R1C2, Position::R2C1, Position::R2C2];

    /// `(row, col)`, both 1-based.
    pub fn row_col(self) -> (u8, u8) {
        match self {
            Position::R1C1 => (1, 1),
            Position::R1C2 => (1, 2),
            Position::R2C1 => (2, 1),
            Position::R2C2 => (2, 2),
        }
    }

    pub fn from_row_col(row: u8, col: u8) -> Option<Position> {
        match (row, col) {
            (1, 1) => Some(Position::R1C1),
            (1, 2) => Some(Position::R1C2),
            (2, 1) => Some(Position::R2C1),
            (2, 2) => Some(Position::R2C2),
            _ => None,
        }
    }

    /// Row-major slot index in `0..4`.
    pub fn slot(self) -> usize {
        match self {
            Position::R1C1 => 0,
            Position::R1C2 => 1,
            Position::R2C1 => 2,
            Position::R2C2 => 3,
        }
    }

    pub fn from_slot(slot: usize) -> Option<Position> {
        Position::ALL.get(slot).copied()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (r, c) = self.row_col();
        write!(f, "c{r}{c}")
    }
}

impl Mat2 {
    pub fn new(a11: BigInt, a12: BigInt, a21: BigInt, a22: BigInt) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    pub fn from_i64(m: [[i64; 2]; 2]) -> Self {
        Mat2::new(m[0][0].into(), m[0][1].into(), m[1][0].into(), m[1][1].into())
    }

    pub fn from_entries(entries: [BigInt; 4]) -> Self {
        let [a11, a12, a21, a22] = entries;
        Mat2 { a11, a12, a21, a22 }
    }

    pub fn identity() -> Self {
        Mat2::new(BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one())
    }

    pub fn zero() -> Self {
        Mat2::new(BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero())
    }

    /// Row-major entries.
    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a11, &self.a12, &self.a21, &self.a22]
    }

    pub fn into_entries(self) -> [BigInt; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn get(&self, pos: Position) -> &BigInt {
        match pos {
            Position::R1C1 => &self.a11,
            Position::R1C2 => &self.a12,
            Position::R2C1 => &self.a21,
            Position::R2C2 => &self.a22,
        }
    }

    pub fn get_mut(&mut self, pos: Position) -> &mut BigInt {
        match pos {
            Position::R1C1 => &mut self.a11,
            Position::R1C2 => &mut self.a12,
            Position::R2C1 => &mut self.a21,
            Position::R2C2 => &mut self.a22,
        }
    }

    /// Copy of `self` with the entry at `pos` replaced.
    pub fn with(&self, pos: Position, value: BigInt) -> Mat2 {
        let mut m = self.clone();
        *m.get_mut(pos) = value;
        m
    }

    pub fn det(&self) -> BigInt {
        &self.a11 * &self.a22 - &self.a12 * &self.a21
    }

    pub fn trace(&self) -> BigInt {
        &self.a11 + &self.a22
    }

    /// `[[a22, −a12], [−a21, a11]]`, so that `self · adj = det · I`.
    pub fn adjugate(&self) -> Mat2 {
        Mat2::new(self.a22.clone(), -&self.a12, -&self.a21, self.a11.clone())
    }

    /// Adjugate and determinant; callers divide exactly. For `|det| = 1` the
    /// inverse is `adj · det`.
    pub fn inverse_exact(&self) -> Result<(Mat2, BigInt)> {
        let det = self.det();
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok((self.adjugate(), det))
    }

    /// `self^n` by binary exponentiation; `self^0 = I`.
    pub fn pow(&self, mut n: u64) -> Mat2 {
        let mut acc = Mat2::identity();
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, k: &BigInt) -> Mat2 {
        Mat2::new(&self.a11 * k, &self.a12 * k, &self.a21 * k, &self.a22 * k)
    }

    /// Divides every entry by `k`, or `None` if any entry is not divisible.
    pub fn div_exact(&self, k: &BigInt) -> Option<Mat2> {
        if k.is_zero() {
            return None;
        }
        let mut out = [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
        for (slot, e) in out.iter_mut().zip(self.entries()) {
            if !(e % k).is_zero() {
                return None;
            }
            *slot = e / k;
        }
        Some(Mat2::from_entries(out))
    }

    pub fn is_non_negative(&self) -> bool {
        self.entries().iter().all(|e| !e.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|e| e.is_zero())
    }

    /// Positions where `self` and `other` differ.
    pub fn diff_positions(&self, other: &Mat2) -> impl Iterator<Item = Position> + '_ {
        let other = other.clone();
        Position::ALL.into_iter().filter(move |&p| self.get(p) != other.get(p))
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: &Mat2) -> Mat2 {
        Mat2::new(
            &self.a11 * &rhs.a11 + &self.a12 * &rhs.a21,
            &self.a11 * &rhs.a12 + &self.a12 * &rhs.a22,
            &self.a21 * &rhs.a11 + &self.a22 * &rhs.a21,
            &self.a21 * &rhs.a12 + &self.a22 * &rhs.a22,
        )
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        &self * &rhs
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a11, self.a12, self.a21, self.a22)
    }
}
