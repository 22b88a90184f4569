//! Symbol alphabets and packing of symbol streams into 2×2 plaintext blocks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::matrix::Position;
use crate::{Error, Mat2, Result};

/// Maps symbols to indices `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Alphabet {
    /// `A–Z → 0–25`.
    #[default]
    Latin,
    /// Raw bytes of the UTF-8 text, `0–255`.
    Bytes,
    /// An explicit table: the i-th char has index i.
    Custom(Vec<char>),
}

impl Alphabet {
    pub fn custom(symbols: &str) -> Result<Self> {
        let table: Vec<char> = symbols.chars().collect();
        if table.is_empty() {
            return Err(Error::Malformed("empty alphabet".into()));
        }
        for (i, c) in table.iter().enumerate() {
            if table[..i].contains(c) {
                return Err(Error::Malformed(format!("alphabet repeats {c:?}")));
            }
        }
        Ok(Alphabet::Custom(table))
    }

    pub fn size(&self) -> u32 {
        match self {
            Alphabet::Latin => 26,
            Alphabet::Bytes => 256,
            Alphabet::Custom(t) => t.len() as u32,
        }
    }

    /// Symbol indices of `text`.
    pub fn indices(&self, text: &str) -> Result<Vec<u32>> {
        match self {
            Alphabet::Latin => text
                .chars()
                .map(|c| if c.is_ascii_uppercase() { Ok(c as u32 - 'A' as u32) } else { Err(Error::UnknownSymbol(c)) })
                .collect(),
            Alphabet::Bytes => Ok(text.bytes().map(u32::from).collect()),
            Alphabet::Custom(t) => text
                .chars()
                .map(|c| t.iter().position(|&s| s == c).map(|i| i as u32).ok_or(Error::UnknownSymbol(c)))
                .collect(),
        }
    }

    /// Inverse of [`Alphabet::indices`].
    pub fn render(&self, indices: &[u32]) -> Result<String> {
        let out_of_range = |i: u32| Error::SymbolOutOfRange(i.into());
        match self {
            Alphabet::Latin => indices
                .iter()
                .map(|&i| if i < 26 { Ok((b'A' + i as u8) as char) } else { Err(out_of_range(i)) })
                .collect(),
            Alphabet::Bytes => {
                let bytes = indices
                    .iter()
                    .map(|&i| u8::try_from(i).map_err(|_| out_of_range(i)))
                    .collect::<Result<Vec<u8>>>()?;
                String::from_utf8(bytes).map_err(|_| Error::Malformed("decrypted bytes are not UTF-8".into()))
            }
            Alphabet::Custom(t) => {
                indices.iter().map(|&i| t.get(i as usize).copied().ok_or_else(|| out_of_range(i))).collect()
            }
        }
    }
}

/// Bijection from block positions `0..4` to row-major matrix slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Permutation([u8; 4]);

impl Permutation {
    pub fn new(slots: [u8; 4]) -> Result<Self> {
        let mut seen = [false; 4];
        for &s in &slots {
            if s > 3 || core::mem::replace(&mut seen[s as usize], true) {
                return Err(Error::InvalidPermutation(format!("{slots:?} is not a permutation of 0..4")));
            }
        }
        Ok(Permutation(slots))
    }

    pub fn identity() -> Self {
        Permutation([0, 1, 2, 3])
    }

    pub fn slots(&self) -> [u8; 4] {
        self.0
    }

    /// Slot of block position `i`.
    pub fn slot(&self, i: usize) -> Position {
        Position::from_slot(self.0[i] as usize).expect("validated permutation")
    }

    /// Places four symbols into a matrix.
    pub fn place(&self, symbols: [u32; 4]) -> Mat2 {
        let mut m = Mat2::zero();
        for (i, s) in symbols.into_iter().enumerate() {
            *m.get_mut(self.slot(i)) = BigInt::from(s);
        }
        m
    }

    /// Reads the four block symbols back out of a matrix.
    pub fn read(&self, m: &Mat2) -> Result<[u32; 4]> {
        let mut out = [0u32; 4];
        for (i, slot) in out.iter_mut().enumerate() {
            let v = m.get(self.slot(i));
            *slot = v.to_u32().ok_or_else(|| Error::SymbolOutOfRange(v.to_u64().unwrap_or(u64::MAX)))?;
        }
        Ok(out)
    }
}

impl Default for Permutation {
    fn default() -> Self {
        Permutation::identity()
    }
}

/// A plaintext block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaintextMatrix {
    pub p: Mat2,
    pub alphabet_size: u32,
}

impl PlaintextMatrix {
    pub const DEFAULT_ALPHABET_SIZE: u32 = 26;

    pub fn new(p: Mat2) -> Self {
        PlaintextMatrix { p, alphabet_size: Self::DEFAULT_ALPHABET_SIZE }
    }

    pub fn with_alphabet_size(p: Mat2, alphabet_size: u32) -> Self {
        PlaintextMatrix { p, alphabet_size }
    }

    /// All-zero block: no row ratio is defined for its ciphertext.
    pub fn is_degenerate(&self) -> bool {
        self.p.is_zero()
    }

    /// Some entry is negative or not below the alphabet size.
    pub fn exceeds_alphabet(&self) -> bool {
        let size = BigInt::from(self.alphabet_size);
        !self.p.is_non_negative() || self.p.entries().iter().any(|e| **e >= size)
    }
}

/// Blocks of an encoded message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedText {
    pub blocks: Vec<PlaintextMatrix>,
    /// Padding symbols (index 0) appended to the final block.
    pub pad_len: u8,
}

/// Splits the message into blocks of four symbols, padding the last block
/// with symbol index 0.
pub fn encode_text(text: &str, alphabet: &Alphabet, perm: &Permutation) -> Result<EncodedText> {
    let mut symbols = alphabet.indices(text)?;
    let pad_len = ((4 - symbols.len() % 4) % 4) as u8;
    symbols.resize(symbols.len() + pad_len as usize, 0);
    let blocks = symbols
        .chunks_exact(4)
        .map(|c| PlaintextMatrix::with_alphabet_size(perm.place([c[0], c[1], c[2], c[3]]), alphabet.size()))
        .collect();
    Ok(EncodedText { blocks, pad_len })
}

/// Inverse of [`encode_text`].
pub fn decode_blocks(blocks: &[Mat2], alphabet: &Alphabet, perm: &Permutation, pad_len: u8) -> Result<String> {
    let mut symbols = Vec::with_capacity(blocks.len() * 4);
    for b in blocks {
        symbols.extend(perm.read(b)?);
    }
    if pad_len as usize > symbols.len().min(3) {
        return Err(Error::Malformed(format!("padding {pad_len} exceeds the message")));
    }
    symbols.truncate(symbols.len() - pad_len as usize);
    alphabet.render(&symbols)
}
