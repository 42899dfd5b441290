mod common;

use common::arb_cfg;
use proptest::prelude::*;
use tah_core::{
    decode_hash, decode_hash_with, encode_hash, exact_similarity, extract_features,
    hamming_similarity, hash_similarity, project, FuzzyHash, ProjectionParams,
};

fn params() -> ProjectionParams {
    ProjectionParams::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn exact_similarity_is_symmetric_and_bounded(a in arb_cfg(10, 0.25, true), b in arb_cfg(10, 0.25, true)) {
        let sa = extract_features(&a, 5).unwrap();
        let sb = extract_features(&b, 5).unwrap();
        let ab = exact_similarity(&sa, &sb).unwrap().value();
        let ba = exact_similarity(&sb, &sa).unwrap().value();
        prop_assert_eq!(ab, ba);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(exact_similarity(&sa, &sa).unwrap().value(), 1.0);
    }

    #[test]
    fn projection_ignores_positive_scale(g in arb_cfg(10, 0.25, true), c in 1u32..50) {
        let sig = extract_features(&g, 5).unwrap();
        let h1 = project(&sig, &params()).unwrap();
        let h2 = project(&sig.scaled(c).unwrap(), &params()).unwrap();
        prop_assert_eq!(h1.bytes(), h2.bytes());
        prop_assert_eq!(h2.total(), h1.total() * c);
    }

    #[test]
    fn hash_text_round_trip(g in arb_cfg(12, 0.25, true), k in (1usize..=64).prop_map(|x| x * 8), seed in any::<u64>()) {
        let p = ProjectionParams::new(k, seed, 5).unwrap();
        let h = project(&extract_features(&g, 5).unwrap(), &p).unwrap();
        let text = encode_hash(&h);
        prop_assert_eq!(text.len(), 5 + 8 + k / 4);
        prop_assert_eq!(decode_hash_with(&text, &p).unwrap(), h);
    }

    #[test]
    fn hash_similarity_is_symmetric_and_bounded(a in arb_cfg(10, 0.25, true), b in arb_cfg(10, 0.25, true)) {
        let ha = project(&extract_features(&a, 5).unwrap(), &params()).unwrap();
        let hb = project(&extract_features(&b, 5).unwrap(), &params()).unwrap();
        let ab = hash_similarity(&ha, &hb).unwrap().value();
        prop_assert_eq!(ab, hash_similarity(&hb, &ha).unwrap().value());
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(hash_similarity(&ha, &ha).unwrap().value(), 1.0);
    }

    #[test]
    fn hamming_counts_differing_bits(bits in proptest::collection::vec(any::<u8>(), 32), flips in proptest::collection::btree_set(0usize..256, 0..=256)) {
        let a = FuzzyHash::from_parts(bits.clone(), 7, params()).unwrap();
        let mut flipped = bits;
        for &i in &flips {
            flipped[i / 8] ^= 0x80 >> (i % 8);
        }
        let b = FuzzyHash::from_parts(flipped, 7, params()).unwrap();
        let h = hamming_similarity(&a, &b).unwrap();
        prop_assert_eq!(h, 1.0 - flips.len() as f64 / 256.0);
    }
}

#[test]
fn default_decode_matches_default_params() {
    let g = tah_core::Cfg::from_edges("c", [(0, 1), (1, 2), (2, 0)]).unwrap();
    let h = project(&extract_features(&g, 5).unwrap(), &params()).unwrap();
    assert_eq!(decode_hash(&encode_hash(&h)).unwrap(), h);
}

#[test]
fn doubled_totals_halve_similarity() {
    let bits = vec![0xA5; 32];
    let a = FuzzyHash::from_parts(bits.clone(), 20, params()).unwrap();
    let b = FuzzyHash::from_parts(bits, 40, params()).unwrap();
    assert_eq!(hash_similarity(&a, &b).unwrap().value(), 0.5);
}
