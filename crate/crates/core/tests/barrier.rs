use approxlab::barrier::{
    barrier_cover, barrier_cover_depth, build_d_g_frame, positions_cover_check, verify_distr_lemma, Frame,
};
use approxlab::distance::verify_cover;
use approxlab::model::gen_rs_poly_model;
use approxlab::truth_table::all_functions;
use approxlab::{Error, TruthTable};
use std::collections::BTreeSet;

#[test]
fn lemma_holds_on_all_two_variable_functions() {
    for t in [1, 2] {
        for seed in [1, 2, 3] {
            let m = gen_rs_poly_model(2, t, seed);
            for f in all_functions(2) {
                let r = verify_distr_lemma(&m, &f, None).unwrap();
                assert!(r.pass(), "t={t} seed={seed} f={f} witness={:?}", r.witness);
                assert_eq!(r.factor, 12 * (f.essential_vars().len() + 1));
            }
        }
    }
}

#[test]
fn depth_lemma_at_three_variables() {
    let m = gen_rs_poly_model(3, 1, 7);
    for d in [1, 2] {
        for f in all_functions(3).iter().step_by(17) {
            let r = verify_distr_lemma(&m, f, Some(d)).unwrap();
            assert!(r.pass(), "d={d} f={f}");
        }
        let frame = Frame::depth(3, d);
        let f = TruthTable::from_hex(3, "96").unwrap();
        let g = TruthTable::from_hex(3, "3c").unwrap();
        assert_eq!(build_d_g_frame(&f, &g, &frame).circuit.depth(), 2 * d + 3);
    }
}

#[test]
fn claim_positions_exhaustive() {
    let m = gen_rs_poly_model(2, 1, 1);
    let mut used = BTreeSet::new();
    let mut errors = 0;
    for f in all_functions(2) {
        for g in all_functions(2) {
            for x in 0..4 {
                match positions_cover_check(&m, &f, &g, x) {
                    Ok(w) => {
                        errors += 1;
                        assert_eq!(w.positions, 27);
                        used.insert((w.ty, w.rank));
                    }
                    Err(Error::Precondition(_)) => {}
                    Err(e) => panic!("f={f} g={g} x={x}: {e}"),
                }
            }
        }
    }
    assert!(errors > 0);
}

#[test]
fn covers_verify() {
    let m = gen_rs_poly_model(3, 1, 9);
    for f in all_functions(3).iter().step_by(37) {
        let (cert, r) = barrier_cover(&m, f).unwrap();
        assert!(verify_cover(f, &m, &cert).unwrap().ok());
        assert_eq!(r.size, cert.size());
    }
    let f = TruthTable::from_hex(3, "96").unwrap();
    for d in [1, 2] {
        let (_, r) = barrier_cover_depth(&m, &f, d).unwrap();
        assert!(r.base.types_used <= r.base.type_bound);
        assert_eq!(r.dg_depth, 2 * d + 3);
    }
}
