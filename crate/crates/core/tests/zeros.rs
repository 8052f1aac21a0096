// SPDX-License-Identifier: Apache-2.0

use cheb_core::lfunc::{count_slack, find_zeros, l_value, zero_count_estimate};
use cheb_core::{character_group, CharacterDescriptor, Complex64, ZeroDb, ZeroSet};

#[test]
fn zero_counts_for_small_moduli() {
    let height: f64 = 100.0;
    for q in 1..=12u64 {
        for chi in character_group(q).unwrap().iter().filter(|c| c.is_primitive()) {
            let z = find_zeros(chi, height).unwrap();
            assert!(z.certified, "{}: {:?}", chi.descriptor(), z.diagnostics);
            let n = z.count_both_signs(height) as f64;
            let main = zero_count_estimate(q, height);
            assert!((n - main).abs() <= count_slack(q, height), "{}: {n} vs {main}", chi.descriptor());
            // no unit interval holds more than 2 log(qT) zeros
            let ords = z.signed_ordinates_below(height);
            for start in -100..100 {
                let t = start as f64;
                let inside = ords.iter().filter(|&&g| g >= t && g < t + 1.0).count() as f64;
                assert!(inside <= 2.0 * (q as f64 * height).ln(), "{} near {t}", chi.descriptor());
            }
            // every reported ordinate is a zero
            for &g in &z.ordinates {
                assert!(l_value(chi, Complex64::new(0.5, g)).unwrap().norm() < 1e-7);
            }
        }
    }
}

#[test]
fn counts_grow_with_height() {
    let chi = &character_group(5).unwrap()[2];
    let mut last = 0;
    for height in [10.0, 25.0, 50.0, 100.0] {
        let n = find_zeros(chi, height).unwrap().count_both_signs(height);
        assert!(n >= last);
        last = n;
    }
}

#[test]
fn conjugate_character_mirrors_ordinates() {
    let g = character_group(5).unwrap();
    let chi = g.iter().find(|c| !c.is_real()).unwrap();
    let z = find_zeros(chi, 40.0).unwrap();
    let zc = find_zeros(&cheb_core::characters::character(chi.conj_descriptor()).unwrap(), 40.0).unwrap();
    let mut mirrored: Vec<f64> = z.ordinates.iter().map(|g| -g).collect();
    mirrored.sort_by(f64::total_cmp);
    assert_eq!(mirrored.len(), zc.ordinates.len());
    for (a, b) in mirrored.iter().zip(&zc.ordinates) {
        assert!((a - b).abs() < 1e-9);
    }
    let via_method = z.conjugate(chi.conj_descriptor());
    assert_eq!(via_method.ordinates.len(), zc.ordinates.len());
}

#[test]
fn database_reuses_disk_cache() {
    let dir = tempfile::tempdir().unwrap();
    let desc = CharacterDescriptor { modulus: 3, index: 1 };
    let first = ZeroDb::with_cache_dir(dir.path()).ensure(desc, 30.0).unwrap().clone();
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let path = files[0].as_ref().unwrap().path();
    let on_disk = ZeroSet::read(&path).unwrap();
    assert_eq!(on_disk.ordinates.len(), first.ordinates.len());
    let mut db = ZeroDb::with_cache_dir(dir.path());
    let second = db.ensure(desc, 30.0).unwrap();
    assert_eq!(second.ordinates, first.ordinates);
}
