use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use unimod_core::cipher::{decrypt, decrypt_matrix, encrypt, verify_package, CipherKey, EncryptOptions};
use unimod_core::coding::{build_coding_matrix, golden_matrix, s_matrix, SeedPair, UnimodularKeyMatrix};
use unimod_core::correction::{correct_with, CorrectionOptions};
use unimod_core::diophantine::diophantine_solve;
use unimod_core::ratio::{column_ratio, fixed_points, row_ratio_interval};
use unimod_core::text::{decode_blocks, encode_text, Alphabet, Permutation, PlaintextMatrix};
use unimod_core::Mat2;

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn key_matrix() -> impl Strategy<Value = UnimodularKeyMatrix> {
    (0i64..=6, 0i64..=6, 0i64..=6, 0i64..=6)
        .prop_filter_map("not admissible", |(a, b, c, d)| UnimodularKeyMatrix::new(Mat2::from_i64([[a, b], [c, d]])).ok())
}

fn seed() -> impl Strategy<Value = SeedPair> {
    (0i64..=6, 0i64..=6).prop_filter_map("zero seed", |(a, b)| SeedPair::from_i64(a, b).ok())
}

fn permutation() -> impl Strategy<Value = Permutation> {
    Just([0u8, 1, 2, 3]).prop_shuffle().prop_map(|s| Permutation::new(s).expect("shuffled"))
}

fn key(max_n: u64) -> impl Strategy<Value = CipherKey> {
    (key_matrix(), seed(), 0..=max_n, permutation())
        .prop_filter_map("singular M0", |(u, s, n, p)| CipherKey::new(u, s, n, p).ok())
}

fn plaintext(bound: i64) -> impl Strategy<Value = Mat2> {
    (0..bound, 0..bound, 0..bound, 0..bound).prop_map(|(a, b, c, d)| Mat2::from_i64([[a, b], [c, d]]))
}

fn nonzero_rows(p: &Mat2) -> bool {
    !(p.a11.is_zero() && p.a12.is_zero()) && !(p.a21.is_zero() && p.a22.is_zero())
}

/// `Uⁿ` by repeated multiplication.
fn naive_pow(u: &Mat2, n: u64) -> Mat2 {
    (0..n).fold(Mat2::identity(), |acc, _| &acc * u)
}

/// `(A₀..A_{n+1}, B₀..B_{n+1})` from the three-term recurrence.
fn sequences(u: &Mat2, a0: &BigInt, b0: &BigInt, n: usize) -> (Vec<BigInt>, Vec<BigInt>) {
    let t = &u.a11 + &u.a22;
    let d = &u.a11 * &u.a22 - &u.a12 * &u.a21;
    let run = |x0: BigInt, x1: BigInt| {
        let mut xs = vec![x0, x1];
        while xs.len() < n + 2 {
            let k = xs.len();
            xs.push(&t * &xs[k - 1] - &d * &xs[k - 2]);
        }
        xs
    };
    let a1 = &u.a11 * a0 + &u.a12 * b0;
    let b1 = &u.a21 * a0 + &u.a22 * b0;
    (run(a0.clone(), a1), run(b0.clone(), b1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn coding_matrix_is_power_times_seed_matrix(u in key_matrix(), s in seed(), n in 0u64..=64) {
        let cm = build_coding_matrix(&u, &s, n);
        let m0 = build_coding_matrix(&u, &s, 0).into_matrix();
        prop_assert_eq!(cm.matrix(), &(&naive_pow(u.matrix(), n) * &m0));
        let (a, b) = sequences(u.matrix(), s.a0(), s.b0(), n as usize);
        let n = n as usize;
        prop_assert_eq!(cm.matrix(), &Mat2::new(a[n + 1].clone(), a[n].clone(), b[n + 1].clone(), b[n].clone()));
    }

    #[test]
    fn s_representation(u in key_matrix(), s in seed(), n in 0u64..=64) {
        let m0 = build_coding_matrix(&u, &s, 0).into_matrix();
        let sm = s_matrix(u.trace(), u.det());
        prop_assert_eq!(&m0 * &naive_pow(&sm, n), build_coding_matrix(&u, &s, n).into_matrix());
    }

    #[test]
    fn coding_determinant(u in key_matrix(), s in seed(), n in 0u64..=64) {
        let cm = build_coding_matrix(&u, &s, n);
        let m0 = build_coding_matrix(&u, &s, 0).into_matrix();
        let expected = m0.det() * u.det().pow(n as u32);
        prop_assert_eq!(cm.matrix().det(), expected.clone());
        prop_assert_eq!(cm.det(), &expected);
        prop_assert_eq!(cm.mu(), &m0.det());
    }

    #[test]
    fn roundtrip_and_check_number(k in key(64), p in plaintext(300)) {
        let pkg = encrypt(&PlaintextMatrix::new(p.clone()), &k, &EncryptOptions::default());
        prop_assert_eq!(&pkg.c, &(&p * k.coding_matrix().matrix()));
        prop_assert_eq!(decrypt(&pkg, &k).unwrap().p, p.clone());
        let cm = k.coding_matrix();
        prop_assert_eq!(pkg.c.det(), cm.mu() * cm.det_u().pow(k.n() as u32) * p.det());
        prop_assert_eq!(&pkg.det_p, &p.det());
        prop_assert!(verify_package(&pkg, &k).is_clean());
    }

    #[test]
    fn rows_of_ciphertext_lie_between_sequence_ratios(k in key(40), p in plaintext(1000)) {
        prop_assume!(nonzero_rows(&p));
        let cm = k.coding_matrix();
        prop_assume!(cm.a().is_positive() && cm.b().is_positive());
        let iv = row_ratio_interval(cm).unwrap();
        let c = &p * cm.matrix();
        let (ra, rb) = (
            BigRational::new(cm.a_next().clone(), cm.a().clone()),
            BigRational::new(cm.b_next().clone(), cm.b().clone()),
        );
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        for (x, y) in [(&c.a11, &c.a12), (&c.a21, &c.a22)] {
            let q = BigRational::new(x.clone(), y.clone());
            prop_assert!(lo <= q && q <= hi);
            prop_assert!(iv.contains_row(x, y));
        }
    }

    #[test]
    fn golden_cassini(n in 1u64..=200) {
        let m = golden_matrix(n).into_matrix();
        let sign = if n % 2 == 0 { big(1) } else { big(-1) };
        prop_assert_eq!(&m.a11 * &m.a22 - &m.a12 * &m.a12, sign);
        prop_assert_eq!(&m.a12, &m.a21);
    }

    #[test]
    fn fixed_points_are_roots(t in 0i64..50, d in prop_oneof![Just(1i64), Just(-1i64), -20i64..20]) {
        prop_assume!(d <= 0 || t * t >= 4 * d);
        let fp = fixed_points(&big(t), &big(d)).unwrap();
        prop_assert!(fp.characteristic_at(&fp.surd_plus()).is_zero());
        prop_assert!(fp.characteristic_at(&fp.surd_minus()).is_zero());
        prop_assert!(fp.phi_plus() >= fp.phi_minus());
        prop_assert!((fp.phi_plus() + fp.phi_minus() - t as f64).abs() < 1e-9 * (1.0 + t as f64));
        prop_assert!((fp.phi_plus() * fp.phi_minus() - d as f64).abs() < 1e-6 * (1.0 + (t * t) as f64));
    }

    #[test]
    fn diophantine_family_substitutes(a in -100_000i64..100_000, b in -100_000i64..100_000, x in -5000i64..5000, y in -5000i64..5000) {
        prop_assume!(a != 0 || b != 0);
        let c = a * x - b * y;
        let fam = diophantine_solve(&big(a), &big(b), &big(c)).unwrap();
        for k in -1000i64..=1000 {
            let (xk, yk) = fam.at(&big(k));
            prop_assert_eq!(big(a) * xk - big(b) * yk, big(c));
        }
        let g = big(a).gcd(&big(b));
        prop_assert_eq!(fam.dx.clone(), big(b).abs() / &g);
        prop_assert_eq!(fam.dy.abs(), big(a).abs() / &g);
    }

    #[test]
    fn diophantine_solvability_matches_search(a in -60i64..60, b in -60i64..60, c in -500i64..500) {
        prop_assume!(a != 0 || b != 0);
        // brute force: some x in one full period of b solves a·x ≡ c (mod b)
        let found = if b == 0 { c % a == 0 } else { (0..b.abs()).any(|x| (a * x - c) % b == 0) };
        let got = diophantine_solve(&big(a), &big(b), &big(c));
        prop_assert_eq!(got.is_ok(), found, "a={} b={} c={}", a, b, c);
    }

    #[test]
    fn text_roundtrip(text in "[A-Z]{0,41}", k in key(30)) {
        let enc = encode_text(&text, &Alphabet::Latin, k.permutation()).unwrap();
        let blocks: Vec<Mat2> = enc.blocks.iter().map(|b| b.p.clone()).collect();
        prop_assert_eq!(decode_blocks(&blocks, &Alphabet::Latin, k.permutation(), enc.pad_len).unwrap(), text.clone());
        let cipher: Vec<Mat2> = blocks.iter().map(|p| p * k.coding_matrix().matrix()).collect();
        let back: Vec<Mat2> = cipher.iter().map(|c| decrypt_matrix(c, &k).unwrap()).collect();
        prop_assert_eq!(decode_blocks(&back, &Alphabet::Latin, k.permutation(), enc.pad_len).unwrap(), text);
    }

    #[test]
    fn permutation_places_and_reads(p in permutation(), s in proptest::array::uniform4(0u32..256)) {
        let m = p.place(s);
        prop_assert_eq!(p.read(&m).unwrap(), s);
        for (i, v) in s.iter().enumerate() {
            prop_assert_eq!(m.get(p.slot(i)), &BigInt::from(*v));
        }
    }

    #[test]
    fn accepted_repairs_pass_every_check(k in key(24), p in plaintext(26), pos in 0usize..4, delta in 1i64..500, rho in any::<bool>()) {
        prop_assume!(k.n() >= 4 && nonzero_rows(&p));
        let opts = if rho { EncryptOptions::with_column_ratio(2) } else { EncryptOptions::default() };
        let pkg = encrypt(&PlaintextMatrix::new(p), &k, &opts);
        let mut bad = pkg.clone();
        let slot = unimod_core::matrix::Position::from_slot(pos).unwrap();
        *bad.c.get_mut(slot) += delta;
        let report = correct_with(&bad, &k, CorrectionOptions::with_bound(26));
        if let Some(m) = &report.repaired {
            let cm = k.coding_matrix();
            prop_assert_eq!(m.det(), k.expected_det(&pkg.det_p));
            if let Ok(iv) = row_ratio_interval(cm) {
                prop_assert!(iv.contains_row(&m.a11, &m.a12) && iv.contains_row(&m.a21, &m.a22));
            }
            let adj = m * &cm.matrix().adjugate();
            prop_assert!(adj.entries().iter().all(|e| e.is_multiple_of(cm.det())));
            let plain = decrypt_matrix(m, &k).unwrap();
            prop_assert!(plain.entries().iter().all(|e| !e.is_negative() && *e < &big(26)));
        }
    }
}

/// `|c21/c11 − c22/c12|` shrinks as `n` grows.
#[test]
fn column_ratios_draw_together() {
    let keys = [[[2, 1], [1, 1]], [[1, 1], [1, 0]], [[3, 1], [1, 0]], [[3, 2], [1, 1]], [[1, 2], [1, 3]]];
    let plains = [[[12, 0], [19, 7]], [[1, 25], [25, 1]], [[0, 3], [9, 0]], [[5, 5], [1, 2]]];
    for u in keys {
        for p in plains {
            let u = UnimodularKeyMatrix::new(Mat2::from_i64(u)).unwrap();
            let p = Mat2::from_i64(p);
            let gaps: Vec<f64> = (2..=20)
                .map(|n| {
                    let c = &p * build_coding_matrix(&u, &SeedPair::unit(), n).matrix();
                    let r = column_ratio(&c).unwrap();
                    (r.first - r.second).abs().to_f64().unwrap()
                })
                .collect();
            for w in gaps.windows(2) {
                assert!(w[1] <= w[0], "{u:?} {p}: {gaps:?}");
            }
            assert!(gaps[18] < gaps[0] * 1e-3 || gaps[0] == 0.0, "{gaps:?}");
        }
    }
}

#[test]
fn determinant_of_unit_seed_is_one() {
    for (a, b) in [(0, 1), (1, 0)] {
        let cm = build_coding_matrix(&UnimodularKeyMatrix::arnolds_cat(), &SeedPair::from_i64(a, b).unwrap(), 0);
        assert_eq!(cm.mu().abs(), BigInt::one());
    }
}
