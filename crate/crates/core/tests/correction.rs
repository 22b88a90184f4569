use unimod_core::cipher::{encrypt, CipherKey, EncryptOptions};
use unimod_core::coding::{SeedPair, UnimodularKeyMatrix};
use unimod_core::correction::{correct_with, CorrectionOptions, ErrorClass};
use unimod_core::text::{Permutation, PlaintextMatrix};
use unimod_core::Mat2;

#[test]
fn single_repair_with_a_row_rival_is_ambiguous() {
    let u = UnimodularKeyMatrix::new(Mat2::from_i64([[1, 0], [3, 1]])).unwrap();
    let key = CipherKey::new(u, SeedPair::from_i64(1, 4).unwrap(), 20, Permutation::new([1, 2, 3, 0]).unwrap()).unwrap();
    let p = PlaintextMatrix::new(Mat2::from_i64([[2, 2], [7, 0]]));
    let mut pkg = encrypt(&p, &key, &EncryptOptions::with_column_ratio(2));
    assert_eq!(pkg.c, Mat2::from_i64([[136, 130], [7, 7]]));
    // both top entries hit; c12 alone also repairs to a valid ciphertext
    pkg.c = Mat2::from_i64([[155, 159], [7, 7]]);
    let r = correct_with(&pkg, &key, CorrectionOptions::with_bound(26));
    assert_eq!(r.repaired, None);
    assert!(r.is_ambiguous());

    pkg.column_ratio = None;
    let r = correct_with(&pkg, &key, CorrectionOptions::with_bound(26));
    assert_eq!(r.repaired, Some(Mat2::from_i64([[155, 149], [7, 7]])));
    assert!(matches!(r.assumed_class, ErrorClass::Single(_)));
    let mut guarded = CorrectionOptions::with_bound(26);
    guarded.guard_row_errors = true;
    assert!(correct_with(&pkg, &key, guarded).is_ambiguous());
}
