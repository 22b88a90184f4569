//! Key and package files: compact JSON with a fixed field order and every
//! arbitrary-precision integer written as a decimal string.

use std::io::BufRead;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use unimod_core::cipher::{CipherKey, CipherPackage, ColumnRatioCheck};
use unimod_core::coding::{SeedPair, UnimodularKeyMatrix};
use unimod_core::ratio::RatioOrientation;
use unimod_core::text::{Alphabet, Permutation};
use unimod_core::Mat2;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("not a canonical decimal integer: {0:?}")]
    Decimal(String),
    #[error(transparent)]
    Core(#[from] unimod_core::Error),
    #[error("line {line}: {source}")]
    Line { line: usize, source: Box<FormatError> },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FormatError {
    pub fn category(&self) -> &'static str {
        match self {
            FormatError::Core(e) => e.category(),
            FormatError::Line { source, .. } => source.category(),
            FormatError::Io(_) => "io",
            _ => "malformed-input",
        }
    }
}

type Result<T> = std::result::Result<T, FormatError>;

/// Parses a decimal string, accepting only the form `to_string` produces.
pub fn parse_decimal(s: &str) -> Result<BigInt> {
    let n: BigInt = s.parse().map_err(|_| FormatError::Decimal(s.into()))?;
    if n.to_string() != s {
        return Err(FormatError::Decimal(s.into()));
    }
    Ok(n)
}

fn decimals<const N: usize>(xs: &[String; N]) -> Result<[BigInt; N]> {
    let v = xs.iter().map(|s| parse_decimal(s)).collect::<Result<Vec<_>>>()?;
    Ok(v.try_into().expect("length N"))
}

fn check_version(v: u32) -> Result<()> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(FormatError::Version(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum AlphabetSpec {
    Latin,
    Bytes,
    Custom { symbols: String },
}

impl AlphabetSpec {
    pub fn to_alphabet(&self) -> Result<Alphabet> {
        Ok(match self {
            AlphabetSpec::Latin => Alphabet::Latin,
            AlphabetSpec::Bytes => Alphabet::Bytes,
            AlphabetSpec::Custom { symbols } => Alphabet::custom(symbols)?,
        })
    }

    pub fn from_alphabet(a: &Alphabet) -> Self {
        match a {
            Alphabet::Latin => AlphabetSpec::Latin,
            Alphabet::Bytes => AlphabetSpec::Bytes,
            Alphabet::Custom(t) => AlphabetSpec::Custom { symbols: t.iter().collect() },
        }
    }
}

/// On-disk key: `{"version","u","seed","n","perm","alphabet"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyFile {
    pub version: u32,
    /// `[α, β, γ, δ]`.
    pub u: [String; 4],
    /// `[A₀, B₀]`.
    pub seed: [String; 2],
    pub n: String,
    pub perm: [u8; 4],
    pub alphabet: AlphabetSpec,
}

impl KeyFile {
    pub fn from_key(key: &CipherKey, alphabet: &Alphabet) -> Self {
        let u = key.key_matrix().matrix();
        KeyFile {
            version: FORMAT_VERSION,
            u: [u.a11.to_string(), u.a12.to_string(), u.a21.to_string(), u.a22.to_string()],
            seed: [key.seed().a0().to_string(), key.seed().b0().to_string()],
            n: key.n().to_string(),
            perm: key.permutation().slots(),
            alphabet: AlphabetSpec::from_alphabet(alphabet),
        }
    }

    pub fn to_key(&self) -> Result<(CipherKey, Alphabet)> {
        check_version(self.version)?;
        let u = UnimodularKeyMatrix::new(Mat2::from_entries(decimals(&self.u)?))?;
        let [a0, b0] = decimals(&self.seed)?;
        let n: u64 = self.n.parse().map_err(|_| FormatError::Decimal(self.n.clone()))?;
        if n.to_string() != self.n {
            return Err(FormatError::Decimal(self.n.clone()));
        }
        let key = CipherKey::new(u, SeedPair::new(a0, b0)?, n, Permutation::new(self.perm)?)?;
        Ok((key, self.alphabet.to_alphabet()?))
    }

    pub fn parse(s: &str) -> Result<Self> {
        let k: KeyFile = serde_json::from_str(s.trim_end_matches('\n'))?;
        check_version(k.version)?;
        Ok(k)
    }

    /// Canonical text, newline-terminated.
    pub fn serialize(&self) -> String {
        let mut s = serde_json::to_string(self).expect("plain data");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnRatioField {
    pub orientation: String,
    pub value: String,
    pub digits: u32,
}

/// On-disk ciphertext block, one JSON object per line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackageFile {
    pub version: u32,
    /// `[c11, c12, c21, c22]`.
    pub c: [String; 4],
    pub det_p: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column_ratio: Option<ColumnRatioField>,
    pub block_index: u64,
    pub pad_len: u8,
}

impl PackageFile {
    pub fn from_package(p: &CipherPackage) -> Self {
        PackageFile {
            version: FORMAT_VERSION,
            c: p.c.entries().map(|e| e.to_string()),
            det_p: p.det_p.to_string(),
            column_ratio: p.column_ratio.as_ref().map(|r| ColumnRatioField {
                orientation: r.orientation.as_str().into(),
                value: r.value.clone(),
                digits: r.digits,
            }),
            block_index: p.block_index,
            pad_len: p.pad_len,
        }
    }

    pub fn to_package(&self) -> Result<CipherPackage> {
        check_version(self.version)?;
        let column_ratio = match &self.column_ratio {
            None => None,
            Some(r) => {
                let orientation = RatioOrientation::parse(&r.orientation).ok_or_else(|| {
                    unimod_core::Error::Malformed(format!("unknown orientation {:?}", r.orientation))
                })?;
                let check = ColumnRatioCheck { orientation, value: r.value.clone(), digits: r.digits };
                check.scaled()?;
                Some(check)
            }
        };
        Ok(CipherPackage {
            c: Mat2::from_entries(decimals(&self.c)?),
            det_p: parse_decimal(&self.det_p)?,
            column_ratio,
            block_index: self.block_index,
            pad_len: self.pad_len,
        })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let p: PackageFile = serde_json::from_str(s)?;
        check_version(p.version)?;
        Ok(p)
    }

    pub fn serialize(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }
}

/// Reads newline-separated packages, skipping blank lines.
pub fn read_packages(r: impl BufRead) -> Result<Vec<CipherPackage>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let wrap = |e: FormatError| FormatError::Line { line: i + 1, source: Box::new(e) };
        out.push(PackageFile::parse(&line).and_then(|p| p.to_package()).map_err(wrap)?);
    }
    Ok(out)
}

pub fn write_packages(pkgs: &[CipherPackage]) -> String {
    pkgs.iter().map(|p| PackageFile::from_package(p).serialize() + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_key_text() {
        let key = CipherKey::golden(10).unwrap();
        let text = KeyFile::from_key(&key, &Alphabet::Latin).serialize();
        assert_eq!(
            text,
            "{\"version\":1,\"u\":[\"1\",\"1\",\"1\",\"0\"],\"seed\":[\"0\",\"1\"],\"n\":\"10\",\"perm\":[0,1,2,3],\"alphabet\":{\"kind\":\"latin\"}}\n"
        );
        assert_eq!(KeyFile::parse(&text).unwrap().serialize(), text);
        let (back, _) = KeyFile::parse(&text).unwrap().to_key().unwrap();
        assert_eq!(back, key);
    }

    #[test]
    fn package_text() {
        let text = r#"{"version":1,"c":["1450","554","733","280"],"det_p":"-82","column_ratio":{"orientation":"bottom-over-top","value":"0.51","digits":2},"block_index":3,"pad_len":1}"#;
        let p = PackageFile::parse(text).unwrap();
        assert_eq!(p.serialize(), text);
        let pkg = p.to_package().unwrap();
        assert_eq!(pkg.c, Mat2::from_i64([[1450, 554], [733, 280]]));
        assert_eq!(pkg.det_p, BigInt::from(-82));
        assert_eq!(PackageFile::from_package(&pkg), p);
    }

    #[test]
    fn rejects_non_canonical_input() {
        assert!(parse_decimal("007").is_err());
        assert!(parse_decimal("+7").is_err());
        assert!(parse_decimal("-0").is_err());
        assert!(parse_decimal("12345678901234567890123").is_ok());
        let bad_version = r#"{"version":2,"c":["1","0","0","1"],"det_p":"1","block_index":0,"pad_len":0}"#;
        assert!(matches!(PackageFile::parse(bad_version), Err(FormatError::Version(2))));
        let extra = r#"{"version":1,"c":["1","0","0","1"],"det_p":"1","block_index":0,"pad_len":0,"x":1}"#;
        assert!(PackageFile::parse(extra).is_err());
    }
}
