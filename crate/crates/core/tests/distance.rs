use approxlab::connective::Connective;
use approxlab::distance::*;
use approxlab::fusion::{enumerate_semifilters, rho_f0, PairUniverse, Universe};
use approxlab::model::gen_fusion_model;
use approxlab::TruthTable;

#[test]
fn fusion_model_distance_matches_pair_cover() {
    let f = TruthTable::from_hex(3, "69").unwrap();
    let all = enumerate_semifilters(&Universe::new(&f)).unwrap();
    let fm = gen_fusion_model(&f, &all).unwrap();
    let basis = vec![Connective::And(2), Connective::Or(2)];
    let r = rho_exact(&fm.f_prime, &fm.model, CertMode::Asymmetric, &RhoBudget::full(basis, 2)).unwrap();
    let pairs = rho_f0(&all, PairUniverse::All).unwrap();
    assert_eq!(r.value, RhoValue::Finite(pairs.value.unwrap()));
}
