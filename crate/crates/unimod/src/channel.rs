//! Seeded noisy channel: mutates ciphertext entries by error class.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use unimod_core::cipher::CipherPackage;
use unimod_core::matrix::Position;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorruptionMode {
    Single,
    Diagonal,
    AntiDiagonal,
    ColumnLeft,
    ColumnRight,
    RowTop,
    RowBottom,
    /// One of the other modes, drawn per package.
    Random,
}

impl CorruptionMode {
    pub const CLASSES: [CorruptionMode; 7] = [
        CorruptionMode::Single,
        CorruptionMode::Diagonal,
        CorruptionMode::AntiDiagonal,
        CorruptionMode::ColumnLeft,
        CorruptionMode::ColumnRight,
        CorruptionMode::RowTop,
        CorruptionMode::RowBottom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CorruptionMode::Single => "single",
            CorruptionMode::Diagonal => "diagonal",
            CorruptionMode::AntiDiagonal => "antidiagonal",
            CorruptionMode::ColumnLeft => "column_left",
            CorruptionMode::ColumnRight => "column_right",
            CorruptionMode::RowTop => "row_top",
            CorruptionMode::RowBottom => "row_bottom",
            CorruptionMode::Random => "random",
        }
    }

    fn positions(self, rng: &mut ChaCha8Rng) -> Vec<Position> {
        use Position::*;
        match self {
            CorruptionMode::Single => vec![*Position::ALL.choose(rng).expect("non-empty")],
            CorruptionMode::Diagonal => vec![R1C1, R2C2],
            CorruptionMode::AntiDiagonal => vec![R1C2, R2C1],
            CorruptionMode::ColumnLeft => vec![R1C1, R2C1],
            CorruptionMode::ColumnRight => vec![R1C2, R2C2],
            CorruptionMode::RowTop => vec![R1C1, R1C2],
            CorruptionMode::RowBottom => vec![R2C1, R2C2],
            CorruptionMode::Random => {
                let m = *Self::CLASSES.choose(rng).expect("non-empty");
                m.positions(rng)
            }
        }
    }
}

impl fmt::Display for CorruptionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorruptionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        CorruptionMode::CLASSES
            .into_iter()
            .chain([CorruptionMode::Random])
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown corruption mode {s:?}"))
    }
}

/// How a chosen entry is changed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Magnitude {
    /// Adds a uniform offset in `±[1, M]`, `M = max` or `max(1, |x|/2)`;
    /// results below zero flip the sign of the offset.
    Additive { max: Option<u64> },
    /// Replaces one decimal digit with a different one.
    DigitFlip,
}

impl Default for Magnitude {
    fn default() -> Self {
        Magnitude::Additive { max: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorruptionSpec {
    pub mode: CorruptionMode,
    pub seed: u64,
    pub magnitude: Magnitude,
}

impl CorruptionSpec {
    pub fn new(mode: CorruptionMode, seed: u64) -> Self {
        CorruptionSpec { mode, seed, magnitude: Magnitude::default() }
    }
}

/// One changed entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryChange {
    pub position: String,
    pub from: String,
    pub to: String,
}

/// Ground truth for one corrupted package.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorruptionDiff {
    pub block_index: u64,
    pub mode: String,
    pub changes: Vec<EntryChange>,
}

/// A seeded channel; packages are corrupted in sequence from one stream.
pub struct Channel {
    spec: CorruptionSpec,
    rng: ChaCha8Rng,
}

impl Channel {
    pub fn new(spec: CorruptionSpec) -> Self {
        Channel { spec, rng: ChaCha8Rng::seed_from_u64(spec.seed) }
    }

    /// Corrupts the entries the mode dictates; every touched entry differs
    /// from its original. Check numbers are left alone.
    pub fn corrupt(&mut self, pkg: &CipherPackage) -> (CipherPackage, CorruptionDiff) {
        let mode = match self.spec.mode {
            CorruptionMode::Random => *CorruptionMode::CLASSES.choose(&mut self.rng).expect("non-empty"),
            m => m,
        };
        let positions = mode.positions(&mut self.rng);
        let mut out = pkg.clone();
        let mut changes = Vec::new();
        for pos in positions {
            let old = pkg.c.get(pos).clone();
            let new = self.mutate(&old);
            debug_assert_ne!(old, new);
            changes.push(EntryChange { position: pos.to_string(), from: old.to_string(), to: new.to_string() });
            *out.c.get_mut(pos) = new;
        }
        let diff = CorruptionDiff { block_index: pkg.block_index, mode: mode.as_str().into(), changes };
        (out, diff)
    }

    fn mutate(&mut self, x: &BigInt) -> BigInt {
        match self.spec.magnitude {
            Magnitude::Additive { max } => {
                let m = max.unwrap_or_else(|| (x.abs() / 2u32).to_u64().unwrap_or(u64::MAX)).max(1);
                let delta = BigInt::from(self.rng.gen_range(1..=m));
                let up = x + &delta;
                let down = x - &delta;
                if self.rng.gen_bool(0.5) && !down.is_negative() {
                    down
                } else {
                    up
                }
            }
            Magnitude::DigitFlip => {
                let s = x.abs().to_string();
                let mut digits: Vec<u8> = s.bytes().collect();
                let i = self.rng.gen_range(0..digits.len());
                let old = digits[i] - b'0';
                // a leading digit stays non-zero unless the number is one digit
                let lowest = if i == 0 && digits.len() > 1 { 1 } else { 0 };
                let choices: Vec<u8> = (lowest..10).filter(|&d| d != old).collect();
                digits[i] = b'0' + *choices.choose(&mut self.rng).expect("at least eight digits");
                let v: BigInt = std::str::from_utf8(&digits).expect("ascii").parse().expect("digits");
                if x.is_negative() && !v.is_zero() {
                    -v
                } else {
                    v
                }
            }
        }
    }
}

/// Corrupts every package with one channel.
pub fn corrupt_all(pkgs: &[CipherPackage], spec: CorruptionSpec) -> Vec<(CipherPackage, CorruptionDiff)> {
    let mut ch = Channel::new(spec);
    pkgs.iter().map(|p| ch.corrupt(p)).collect()
}
