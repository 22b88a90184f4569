//! Key matrices, seeds, and the coding matrices `Mₙ = Uⁿ·M₀` built from them.

use alloc::format;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::ratio::FixedPoints;
use crate::{Error, Mat2, Result};

/// Which family a key matrix belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeyFamily {
    /// `[[1,1],[1,0]]`.
    Golden,
    /// `[[k,1],[1,0]]` with `k ≥ 2`.
    KGolden(BigInt),
    Unimodular,
}

/// Non-fatal observations about an admissible key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyWarning {
    /// `d = 1`, `t = 2`: the fixed points coincide and the row ratios
    /// converge only polynomially.
    DegenerateConvergence,
}

/// A non-negative unimodular key matrix `U = [[α, β], [γ, δ]]`.
///
/// Admissible keys have `det U = ±1` and non-negative entries. With
/// `det U = −1` the key must either have `tr U > 2` and `α, δ ≥ 1`, or be a
/// (k-)golden matrix `[[k,1],[1,0]]`, whose ratios converge by the
/// alternating argument directly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnimodularKeyMatrix {
    u: Mat2,
    trace: BigInt,
    det: BigInt,
}

impl UnimodularKeyMatrix {
    pub fn new(u: Mat2) -> Result<Self> {
        if !u.is_non_negative() {
            return Err(Error::InvalidKey(format!("key matrix {u} has a negative entry")));
        }
        let det = u.det();
        let trace = u.trace();
        if det.abs() != BigInt::one() {
            return Err(Error::InvalidKey(format!("key matrix {u} has determinant {det}, expected ±1")));
        }
        if det.is_negative() {
            let corollary = trace > BigInt::from(2) && u.a11 >= BigInt::one() && u.a22 >= BigInt::one();
            if !corollary && bare_power_k(&u).is_none() {
                return Err(Error::InvalidKey(format!(
                    "key matrix {u} has determinant -1 but neither trace > 2 with α, δ ≥ 1 nor the form [[k,1],[1,0]]"
                )));
            }
        } else if trace < BigInt::from(2) {
            return Err(Error::InvalidKey(format!("key matrix {u} has determinant 1 and trace < 2")));
        }
        Ok(UnimodularKeyMatrix { u, trace, det })
    }

    pub fn golden() -> Self {
        Self::k_golden(1).expect("Q is admissible")
    }

    pub fn k_golden(k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidKey("k-golden key needs k ≥ 1".into()));
        }
        Self::new(Mat2::from_i64([[k as i64, 1], [1, 0]]))
    }

    pub fn arnolds_cat() -> Self {
        Self::new(Mat2::from_i64([[2, 1], [1, 1]])).expect("cat matrix is admissible")
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.u
    }

    /// `t = α + δ`.
    pub fn trace(&self) -> &BigInt {
        &self.trace
    }

    /// `d = αδ − βγ`, always ±1.
    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn family(&self) -> KeyFamily {
        match bare_power_k(&self.u) {
            Some(k) if k.is_one() => KeyFamily::Golden,
            Some(k) => KeyFamily::KGolden(k),
            None => KeyFamily::Unimodular,
        }
    }

    pub fn warning(&self) -> Option<KeyWarning> {
        (self.det.is_one() && self.trace == BigInt::from(2)).then_some(KeyWarning::DegenerateConvergence)
    }
}

fn bare_power_k(u: &Mat2) -> Option<BigInt> {
    (u.a12.is_one() && u.a21.is_one() && u.a22.is_zero() && u.a11 >= BigInt::one()).then(|| u.a11.clone())
}

/// Seed pair `(A₀, B₀)`. Entries are non-negative and not both zero; a zero
/// entry is allowed because `A₁ = αA₀ + βB₀`, `B₁ = γA₀ + δB₀` are positive
/// for the keys of interest, so the ratio arguments apply from index 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedPair {
    a0: BigInt,
    b0: BigInt,
}

impl SeedPair {
    pub fn new(a0: BigInt, b0: BigInt) -> Result<Self> {
        if a0.is_negative() || b0.is_negative() {
            return Err(Error::InvalidKey(format!("seed ({a0}, {b0}) has a negative entry")));
        }
        if a0.is_zero() && b0.is_zero() {
            return Err(Error::InvalidKey("seed (0, 0) is degenerate".into()));
        }
        Ok(SeedPair { a0, b0 })
    }

    pub fn from_i64(a0: i64, b0: i64) -> Result<Self> {
        Self::new(a0.into(), b0.into())
    }

    /// The seed `(0, 1)`, which makes `M₀ = [[β, 0], [δ, 1]]`; for bare-power
    /// keys this is the identity, so `Mₙ = Uⁿ`.
    pub fn unit() -> Self {
        SeedPair { a0: BigInt::zero(), b0: BigInt::one() }
    }

    pub fn a0(&self) -> &BigInt {
        &self.a0
    }

    pub fn b0(&self) -> &BigInt {
        &self.b0
    }
}

/// The coding matrix `Mₙ = [[Aₙ₊₁, Aₙ], [Bₙ₊₁, Bₙ]]` together with its
/// sequence context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodingMatrix {
    m: Mat2,
    n: u64,
    t: BigInt,
    d: BigInt,
    mu: BigInt,
    det: BigInt,
    prev: Option<(BigInt, BigInt)>,
}

impl CodingMatrix {
    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    pub fn into_matrix(self) -> Mat2 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn trace(&self) -> &BigInt {
        &self.t
    }

    pub fn det_u(&self) -> &BigInt {
        &self.d
    }

    /// `μ = det M₀`.
    pub fn mu(&self) -> &BigInt {
        &self.mu
    }

    /// `det Mₙ = μ·dⁿ`.
    pub fn det(&self) -> &BigInt {
        &self.det
    }

    /// `Aₙ₊₁`.
    pub fn a_next(&self) -> &BigInt {
        &self.m.a11
    }

    /// `Aₙ`.
    pub fn a(&self) -> &BigInt {
        &self.m.a12
    }

    /// `Bₙ₊₁`.
    pub fn b_next(&self) -> &BigInt {
        &self.m.a21
    }

    /// `Bₙ`.
    pub fn b(&self) -> &BigInt {
        &self.m.a22
    }

    /// `(Aₙ₋₁, Bₙ₋₁)` for `n ≥ 1`.
    pub fn prev(&self) -> Option<(&BigInt, &BigInt)> {
        self.prev.as_ref().map(|(a, b)| (a, b))
    }

    /// Unimodular ratio `φ = (t + √(t² − 4d))/2` as a float estimate.
    pub fn phi(&self) -> Option<f64> {
        FixedPoints::new(&self.t, &self.d).ok().map(|fp| fp.phi_plus())
    }
}

/// Builds `Mₙ` by iterating `Xₖ₊₁ = t·Xₖ − d·Xₖ₋₁` from `X₀` and
/// `(A₁, B₁) = U·(A₀, B₀)`.
pub fn build_coding_matrix(u: &UnimodularKeyMatrix, seed: &SeedPair, n: u64) -> CodingMatrix {
    let um = u.matrix();
    let a1 = &um.a11 * &seed.a0 + &um.a12 * &seed.b0;
    let b1 = &um.a21 * &seed.a0 + &um.a22 * &seed.b0;
    let t = u.trace().clone();
    let d = u.det().clone();

    // (Xₖ₋₁, Xₖ, Xₖ₊₁) starting at k = 0, with X₋₁ unused until k ≥ 1
    let mut a = (None, seed.a0.clone(), a1);
    let mut b = (None, seed.b0.clone(), b1);
    for _ in 0..n {
        let a_next = &t * &a.2 - &d * &a.1;
        let b_next = &t * &b.2 - &d * &b.1;
        a = (Some(a.1), a.2, a_next);
        b = (Some(b.1), b.2, b_next);
    }

    let mu = mu_of_seed(um, &seed.a0, &seed.b0);
    let det = &mu * d.pow((n % 2) as u32);
    let prev = a.0.zip(b.0);
    CodingMatrix { m: Mat2::new(a.2, a.1, b.2, b.1), n, t, d, mu, det, prev }
}

/// `Qⁿ = [[Fₙ₊₁, Fₙ], [Fₙ, Fₙ₋₁]]`.
pub fn golden_matrix(n: u64) -> CodingMatrix {
    build_coding_matrix(&UnimodularKeyMatrix::golden(), &SeedPair::unit(), n)
}

/// `[[k,1],[1,0]]ⁿ`, whose entries follow `Fₙ₊₁ = k·Fₙ + Fₙ₋₁`.
pub fn k_golden_matrix(k: u64, n: u64) -> Result<CodingMatrix> {
    Ok(build_coding_matrix(&UnimodularKeyMatrix::k_golden(k)?, &SeedPair::unit(), n))
}

/// `μ = det M₀ = (α − δ)·A₀·B₀ + β·B₀² − γ·A₀²`.
pub fn mu_of_seed(u: &Mat2, a0: &BigInt, b0: &BigInt) -> BigInt {
    let mu = (&u.a11 - &u.a22) * a0 * b0 + &u.a12 * b0 * b0 - &u.a21 * a0 * a0;
    let a1 = &u.a11 * a0 + &u.a12 * b0;
    let b1 = &u.a21 * a0 + &u.a22 * b0;
    assert_eq!(mu, a1 * b0 - a0 * b1, "closed form of det M₀ disagrees with its definition");
    mu
}

/// `S = [[t, 1], [−d, 0]]`, for which `Mₙ = M₀·Sⁿ`.
pub fn s_matrix(t: &BigInt, d: &BigInt) -> Mat2 {
    Mat2::new(t.clone(), BigInt::one(), -d, BigInt::zero())
}

/// Classification of a matrix against the bare-power structure
/// `Uⁿ = [[Aₙ₊₁, Aₙ], [Bₙ₊₁, Bₙ]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerForm {
    /// `β = 1`, `δ = 0`.
    BarePowerForm,
    Degenerate,
    Neither,
}

pub fn check_bare_power_form(u: &Mat2) -> PowerForm {
    if u.det().is_zero() {
        PowerForm::Degenerate
    } else if u.a12.is_one() && u.a22.is_zero() {
        PowerForm::BarePowerForm
    } else {
        PowerForm::Neither
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: [[i64; 2]; 2]) -> Mat2 {
        Mat2::from_i64(a)
    }

    #[test]
    fn golden_powers() {
        assert_eq!(golden_matrix(10).matrix(), &m([[89, 55], [55, 34]]));
        assert_eq!(golden_matrix(1).matrix(), &m([[1, 1], [1, 0]]));
        // F: 0 1 1 2 3 5 8 13
        assert_eq!(golden_matrix(6).matrix(), &m([[13, 8], [8, 5]]));
        assert_eq!(golden_matrix(7).det(), &BigInt::from(-1));
        assert_eq!(golden_matrix(10).det(), &BigInt::one());
    }

    #[test]
    fn k_golden_powers() {
        assert_eq!(k_golden_matrix(1, 10).unwrap().matrix(), golden_matrix(10).matrix());
        assert_eq!(k_golden_matrix(2, 2).unwrap().matrix(), &m([[5, 2], [2, 1]]));
        assert_eq!(k_golden_matrix(3, 1).unwrap().matrix(), &m([[3, 1], [1, 0]]));
        assert!(k_golden_matrix(0, 3).is_err());
    }

    #[test]
    fn cat_matrix_coding_matrices() {
        let cat = UnimodularKeyMatrix::arnolds_cat();
        let seed = SeedPair::unit();
        let m4 = build_coding_matrix(&cat, &seed, 4);
        assert_eq!(m4.matrix(), &m([[55, 21], [34, 13]]));
        assert_eq!(m4.prev(), Some((&BigInt::from(8), &BigInt::from(5))));
        assert_eq!(build_coding_matrix(&cat, &seed, 3).matrix(), &m([[21, 8], [13, 5]]));
        let m0 = build_coding_matrix(&cat, &seed, 0);
        assert_eq!(m0.matrix(), &m([[1, 0], [1, 1]]));
        assert_eq!(m0.prev(), None);
        assert_eq!(m0.mu(), &BigInt::one());
    }

    #[test]
    fn recurrence_holds_at_the_top_entry() {
        let u = UnimodularKeyMatrix::new(m([[3, 2], [1, 1]])).unwrap();
        let seed = SeedPair::from_i64(2, 5).unwrap();
        for n in 1..12 {
            let cm = build_coding_matrix(&u, &seed, n);
            let (ap, bp) = cm.prev().unwrap();
            assert_eq!(cm.a_next(), &(cm.trace() * cm.a() - cm.det_u() * ap));
            assert_eq!(cm.b_next(), &(cm.trace() * cm.b() - cm.det_u() * bp));
            assert_eq!(cm.matrix().det(), cm.det().clone());
        }
    }

    #[test]
    fn mu_formula() {
        let cat = m([[2, 1], [1, 1]]);
        assert_eq!(mu_of_seed(&cat, &BigInt::zero(), &BigInt::one()), BigInt::one());
        assert_eq!(mu_of_seed(&cat, &BigInt::zero(), &BigInt::zero()), BigInt::zero());
        assert_eq!(mu_of_seed(&cat, &BigInt::one(), &BigInt::one()), BigInt::one());
    }

    #[test]
    fn s_matrices() {
        assert_eq!(s_matrix(&3.into(), &1.into()), m([[3, 1], [-1, 0]]));
        assert_eq!(s_matrix(&1.into(), &(-1).into()), m([[1, 1], [1, 0]]));
        assert_eq!(s_matrix(&0.into(), &0.into()), m([[0, 1], [0, 0]]));
    }

    #[test]
    fn bare_power_classification() {
        assert_eq!(check_bare_power_form(&m([[1, 1], [1, 0]])), PowerForm::BarePowerForm);
        assert_eq!(check_bare_power_form(&m([[2, 1], [1, 1]])), PowerForm::Neither);
        assert_eq!(check_bare_power_form(&m([[2, 4], [1, 2]])), PowerForm::Degenerate);
    }

    #[test]
    fn key_admissibility() {
        assert!(UnimodularKeyMatrix::new(m([[2, 1], [1, 1]])).is_ok());
        assert!(UnimodularKeyMatrix::new(m([[1, 1], [1, 0]])).is_ok());
        assert_eq!(UnimodularKeyMatrix::golden().family(), KeyFamily::Golden);
        assert_eq!(UnimodularKeyMatrix::k_golden(3).unwrap().family(), KeyFamily::KGolden(3.into()));
        assert_eq!(UnimodularKeyMatrix::new(m([[2, 1], [1, 0]])).unwrap().family(), KeyFamily::KGolden(2.into()));
        assert!(UnimodularKeyMatrix::new(m([[0, 1], [1, 0]])).is_err());
        // det −1, trace 2, α = δ = 1
        assert!(UnimodularKeyMatrix::new(m([[1, 2], [1, 1]])).is_err());
        // det −1, trace 3
        assert!(UnimodularKeyMatrix::new(m([[1, 1], [3, 2]])).is_ok());
        assert!(UnimodularKeyMatrix::new(m([[2, 1], [1, 2]])).is_err());
        assert!(UnimodularKeyMatrix::new(m([[1, -1], [0, 1]])).is_err());
        let shear = UnimodularKeyMatrix::new(m([[1, 1], [0, 1]])).unwrap();
        assert_eq!(shear.warning(), Some(KeyWarning::DegenerateConvergence));
        assert_eq!(UnimodularKeyMatrix::arnolds_cat().warning(), None);
    }

    #[test]
    fn seed_validation() {
        assert!(SeedPair::from_i64(0, 0).is_err());
        assert!(SeedPair::from_i64(-1, 2).is_err());
        assert!(SeedPair::from_i64(0, 1).is_ok());
    }
}
