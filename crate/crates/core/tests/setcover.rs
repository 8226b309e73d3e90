use approxlab::connective::standard_basis;
use approxlab::distance::*;
use approxlab::formats::{emit_cert, parse_cert};
use approxlab::model::gen_rs_poly_model;
use approxlab::setcover::{greedy_set_cover, min_cover, Bits, Cover};
use approxlab::TruthTable;
use proptest::prelude::*;

// Smallest cover size by trying every subset of the set list.
fn brute_min(target: u32, sets: &[u32]) -> Option<usize> {
    (0u32..1 << sets.len())
        .filter(|m| {
            let u = (0..sets.len()).filter(|i| m >> i & 1 == 1).fold(0, |a, i| a | sets[i]);
            target & !u == 0
        })
        .map(|m| m.count_ones() as usize)
        .min()
}

fn bits(len: usize, m: u32) -> Bits {
    Bits::from_indices(len, (0..len).filter(|i| m >> i & 1 == 1))
}

proptest! {
    #[test]
    fn min_cover_matches_subset_search(len in 1usize..10, target in any::<u32>(), sets in prop::collection::vec(any::<u32>(), 0..9)) {
        let mask = (1u32 << len) - 1;
        let target = target & mask;
        let sets: Vec<u32> = sets.into_iter().map(|s| s & mask).collect();
        let bs: Vec<Bits> = sets.iter().map(|&s| bits(len, s)).collect();
        let got = min_cover(len, &bits(len, target), &bs, None);
        match brute_min(target, &sets) {
            None => prop_assert_eq!(got, Cover::Infeasible),
            Some(k) => {
                let Cover::Optimal(idx) = got else { panic!("expected a cover") };
                prop_assert_eq!(idx.len(), k);
                let u = idx.iter().fold(0, |a, &i| a | sets[i]);
                prop_assert_eq!(target & !u, 0);
                match greedy_set_cover(len, &bits(len, target), &bs) {
                    Cover::Optimal(g) => prop_assert!(g.len() >= k),
                    other => panic!("greedy returned {other:?}"),
                }
                if k > 0 {
                    prop_assert_eq!(min_cover(len, &bits(len, target), &bs, Some(k - 1)), Cover::ExceedsCap);
                }
            }
        }
    }

    #[test]
    fn certificate_text_preserves_verdict(f in 0u64..16, seed in 0u64..20, asym in any::<bool>(), drop in any::<prop::sample::Index>()) {
        let f = TruthTable::from_u64(2, f);
        let m = gen_rs_poly_model(2, 1, seed);
        let mode = if asym { CertMode::Asymmetric } else { CertMode::Symmetric };
        let r = rho_exact(&f, &m, mode, &RhoBudget::full(standard_basis(), 2)).unwrap();
        let Some(cert) = r.certificate else { return Ok(()) };
        let mut variants = vec![cert.clone()];
        if !cert.tuples.is_empty() {
            let mut short = cert.clone();
            short.tuples.remove(drop.index(cert.tuples.len()));
            variants.push(short);
        }
        for c in variants {
            let back = parse_cert(&emit_cert(&c)).unwrap();
            prop_assert_eq!(&back, &c);
            prop_assert_eq!(verify_cover(&f, &m, &back).unwrap().ok(), verify_cover(&f, &m, &c).unwrap().ok());
        }
    }
}
