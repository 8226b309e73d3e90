use approxlab::circuit::CircuitBuilder;
use approxlab::connective::standard_basis;
use approxlab::distance::{cert_from_circuit, rho_exact, verify_cover, verify_depth_cover, CertMode, Pool, RhoBudget, RhoValue};
use approxlab::enumerate::{enumerate_circuits, EnumSpec};
use approxlab::localize::{localize_0proj, localize_depth, localize_general, localize_general_with, localize_projective};
use approxlab::model::{gen_exact_model, gen_rs_poly_model};
use approxlab::{Circuit, Connective, TruthTable};

fn bottom_oracle(n: usize, t: &TruthTable, lits: &[(usize, bool)]) -> Circuit {
    let mut b = CircuitBuilder::tree(n);
    let ch: Vec<usize> = lits.iter().map(|&(k, s)| b.literal(k, s)).collect();
    let o = b.apply(Connective::Oracle(t.clone()), ch);
    b.finish(o)
}

#[test]
fn oracle_free_circuits_reduce_to_circuit_certificates() {
    let m = gen_rs_poly_model(2, 1, 2);
    let cs = enumerate_circuits(&EnumSpec::new(2, standard_basis(), 3)).unwrap();
    for c in cs.iter().take(40) {
        let f = c.truth_table();
        let (cert, r) = localize_general(&m, c, &f).unwrap();
        assert_eq!(cert, cert_from_circuit(&f, &m, c).unwrap());
        assert!(r.complete());
    }
}

#[test]
fn arity_three_oracle_under_an_and() {
    let m = gen_rs_poly_model(3, 1, 4);
    let maj = TruthTable::from_hex(3, "e8").unwrap();
    let mut b = CircuitBuilder::tree(3);
    let (x, y, z) = (b.input(0), b.input(1), b.input(2));
    let a = b.and2(x, y);
    let o = b.apply(Connective::Oracle(maj), vec![a, z, x]);
    let c = b.finish(o);
    let f = c.truth_table();
    let (cert, r) = localize_general(&m, &c, &f).unwrap();
    assert!(verify_cover(&f, &m, &cert).unwrap().ok());
    assert!(r.complete());
    assert_eq!(r.k, 1);
    let (dc, r) = localize_depth(&m, &c, &f, 2).unwrap();
    assert!(verify_depth_cover(&f, &m, &dc).unwrap().ok());
    assert!(r.combiner_ok && r.base.complete());
    assert!(r.depth_rows.iter().all(|row| row.witness_depth <= row.bound));
}

#[test]
fn bottom_oracles_zero_projective() {
    let xor = TruthTable::from_hex(2, "6").unwrap();
    let fam = |n| EnumSpec::new(n, standard_basis(), 2);
    let ex = gen_exact_model(2);
    let c = bottom_oracle(2, &xor, &[(0, true), (1, false)]);
    let f = c.truth_table();
    let (cert, _) = localize_0proj(&ex, &c, &f, &fam(2)).unwrap();
    assert_eq!(cert.size(), 0);
    let mut sizes = vec![];
    for n in [2, 3] {
        let m = gen_rs_poly_model(n, 1, 6);
        let c = bottom_oracle(n, &xor, &[(0, true), (1, false)]);
        let f = c.truth_table();
        let (cert, r) = localize_0proj(&m, &c, &f, &fam(n)).unwrap();
        assert!(verify_cover(&f, &m, &cert).unwrap().ok());
        assert_eq!(r.oracle_points, vec![4]);
        sizes.push(cert.size());
    }
    assert!(sizes.iter().all(|&s| s > 0));
}

#[test]
fn projective_oracle_inside_circuit() {
    let m = gen_rs_poly_model(2, 1, 8);
    let fam = EnumSpec::new(2, standard_basis(), 1);
    let nand = TruthTable::from_hex(2, "7").unwrap();
    let mut b = CircuitBuilder::tree(2);
    let (x, y) = (b.input(0), b.input(1));
    let o = b.or2(x, y);
    let g = b.apply(Connective::Oracle(nand), vec![o, y]);
    let c = b.finish(g);
    let f = c.truth_table();
    let (cert, r) = localize_projective(&m, &c, &f, &fam, 64).unwrap();
    assert!(verify_cover(&f, &m, &cert).unwrap().ok());
    assert!(r.oracle_points.iter().all(|&p| p <= 4));
}

#[test]
fn localization_never_beats_the_distance() {
    let m = gen_rs_poly_model(2, 1, 3);
    let xor = TruthTable::from_hex(2, "6").unwrap();
    let c = bottom_oracle(2, &xor, &[(0, true), (1, true)]);
    for expand in [0, 2] {
        let (cert, _) = localize_general_with(&m, &c, &xor, expand).unwrap();
        let budget = RhoBudget { pool: Pool::Explicit(cert.keys()), ..RhoBudget::full(standard_basis(), 2) };
        let r = rho_exact(&xor, &m, CertMode::Symmetric, &budget).unwrap();
        match r.value {
            RhoValue::Finite(v) => assert!(v <= cert.size()),
            other => panic!("{other}"),
        }
    }
}
