use super::construct::{build_d_g_frame, TypeIndex};
use super::distr::Instance;
use crate::circuit::Gate;
use crate::distance::Side;
use crate::error::{Error, Result};
use crate::model::{ApproxModel, OpKey};
use crate::truth_table::TruthTable;

/// Where an error of D̄_g at x is located.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionWitness {
    pub gate: usize,
    /// Index of the gate in the canonical position list of x.
    pub rank: usize,
    pub positions: usize,
    pub ty: TypeIndex,
    pub key: OpKey,
    pub side: Side,
}

/// Follow the error of D̄_g at x down from the output: stop at the first
/// gate whose approximation differs from its connective applied to the
/// approximated inputs, otherwise descend into the first erring input.
pub fn positions_cover_check(model: &ApproxModel, f: &TruthTable, g: &TruthTable, x: usize) -> Result<PositionWitness> {
    if f.n() != model.n() || g.n() != model.n() {
        return Err(Error::Precondition("f, g and the model disagree on n".into()));
    }
    if x >= f.len() {
        return Err(Error::Precondition(format!("x={x} is not a point of {{0,1}}^{}", f.n())));
    }
    let inst = Instance::full_general(model, f)?;
    let dg = build_d_g_frame(f, g, &inst.frame);
    let approx = model.approximate_gates_with(&dg.circuit, &inst.leaves)?;
    let ebar: Vec<bool> = approx.iter().map(|&id| model.member(id).get(x)).collect();
    let exact: Vec<bool> = {
        let mut v = Vec::with_capacity(dg.circuit.gates().len());
        for gate in dg.circuit.gates() {
            let b = match gate {
                Gate::Input(k) => (x >> k) & 1 == 1,
                Gate::Const(b) => *b,
                Gate::Apply(c, ch) => c.apply_bits(&ch.iter().map(|&j| v[j]).collect::<Vec<bool>>()),
            };
            v.push(b);
        }
        v
    };
    let out = dg.circuit.output();
    if ebar[out] == f.get(x) {
        return Err(Error::Precondition(format!("D̄_g agrees with f at x={x}: no error to locate")));
    }
    let mut cur = out;
    loop {
        let Gate::Apply(conn, ch) = &dg.circuit.gates()[cur] else {
            return Err(Error::Structure(format!("the error walk reached leaf g{cur}")));
        };
        let ins: Vec<bool> = ch.iter().map(|&j| ebar[j]).collect();
        let v = conn.apply_bits(&ins);
        if v != ebar[cur] {
            let canon = dg.canonical_positions(x);
            let Some(rank) = canon.iter().position(|&p| p == cur) else {
                return Err(Error::Structure(format!("error at x={x} located at g{cur}, outside the canonical positions")));
            };
            let key = OpKey::new(conn.clone(), ch.iter().map(|&j| approx[j]).collect());
            let side = if v { Side::Plus } else { Side::Minus };
            let ty = dg.gate_type(cur).expect("canonical positions are typed");
            return Ok(PositionWitness { gate: cur, rank, positions: canon.len(), ty, key, side });
        }
        match ch.iter().find(|&&j| ebar[j] != exact[j]) {
            Some(&j) => cur = j,
            None => return Err(Error::Structure(format!("g{cur} errs at x={x} with correct inputs and no error"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::gen_rs_poly_model;
    use crate::truth_table::all_functions;

    #[test]
    fn every_error_is_located_on_a_canonical_position() {
        let m = gen_rs_poly_model(2, 1, 11);
        let mut found = 0;
        for f in all_functions(2).iter().step_by(3) {
            for g in all_functions(2) {
                for x in 0..4 {
                    match positions_cover_check(&m, f, &g, x) {
                        Ok(w) => {
                            found += 1;
                            assert!(w.positions == 27);
                            let e = m.error_set(&w.key.conn, &w.key.inputs).unwrap();
                            let set = if w.side == Side::Plus { e.delta_plus } else { e.delta_minus };
                            assert!(set.get(x));
                        }
                        Err(Error::Precondition(_)) => {}
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
        assert!(found > 0);
    }
}
