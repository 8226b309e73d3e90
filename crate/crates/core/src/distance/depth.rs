use super::cert::{CertMode, DepthCoverCertificate};
use super::rho::{rho_over, tuples_over, RhoValue};
use crate::circuit::Circuit;
use crate::connective::Connective;
use crate::enumerate::{visit_circuits, EnumSpec};
use crate::error::{Error, Result};
use crate::model::{ApproxModel, MemberId};
use crate::truth_table::TruthTable;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct DepthBudget {
    /// Witness circuits: n, basis and size cap. The depth cap and constants
    /// are set by the search.
    pub family: EnumSpec,
    /// Connectives of the error-set tuples.
    pub tuple_basis: Vec<Connective>,
    pub arity_cap: usize,
    pub cover_cap: Option<usize>,
}

/// First witness (in enumeration order) of each member approximated by a
/// circuit of the family with depth at most `depth`.
pub fn depth_witnesses(model: &ApproxModel, family: &EnumSpec, depth: usize) -> Result<BTreeMap<MemberId, Circuit>> {
    let spec = family.clone().with_depth(Some(depth)).with_constants(true);
    let mut out: BTreeMap<MemberId, Circuit> = BTreeMap::new();
    let mut err = None;
    visit_circuits(&spec, |p| {
        let c = p.to_circuit();
        match model.approximate_circuit(&c) {
            Ok(id) => {
                out.entry(id).or_insert(c);
                true
            }
            Err(Error::IncompleteModel(_)) => true,
            Err(e) => {
                err = Some(e);
                false
            }
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoDOutcome {
    pub value: RhoValue,
    pub certificate: Option<DepthCoverCertificate>,
    pub pool_size: usize,
    pub candidates: usize,
}

/// ρ_d relative to the witness family: g is the approximator of a depth ≤ d
/// circuit and every tuple input that of a depth ≤ d-1 circuit.
pub fn rho_d_exact(f: &TruthTable, model: &ApproxModel, d: usize, mode: CertMode, budget: &DepthBudget) -> Result<RhoDOutcome> {
    if d == 0 {
        return Err(Error::Precondition("depth must be at least 1".into()));
    }
    if budget.family.n != model.n() || f.n() != model.n() {
        return Err(Error::Precondition("f, model and witness family disagree on n".into()));
    }
    let g_wit = depth_witnesses(model, &budget.family, d)?;
    let in_wit = depth_witnesses(model, &budget.family, d - 1)?;
    let inputs: Vec<MemberId> = in_wit.keys().copied().collect();
    let mut pool = tuples_over(model, &inputs, &budget.tuple_basis, budget.arity_cap)?;
    pool.sort_by(|a, b| a.key.cmp(&b.key));
    pool.dedup_by(|a, b| a.key == b.key);
    let candidates: Vec<MemberId> = g_wit.keys().copied().collect();
    let r = rho_over(f, model, mode, &candidates, &pool, budget.cover_cap, true, false)?;
    let certificate = r.certificate.map(|cert| {
        let mut input_witnesses = BTreeMap::new();
        for t in &cert.tuples {
            for id in &t.key.inputs {
                input_witnesses.insert(*id, in_wit[id].clone());
            }
        }
        DepthCoverCertificate { g_witness: g_wit[&cert.g].clone(), d, cert, input_witnesses }
    });
    Ok(RhoDOutcome { value: r.value, certificate, pool_size: r.pool_size, candidates: r.candidates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connective::standard_basis;
    use crate::distance::verify_depth_cover;
    use crate::model::gen_exact_model;

    #[test]
    fn exact_model_depth_two() {
        let m = gen_exact_model(2);
        let f = TruthTable::from_hex(2, "8").unwrap();
        let b = DepthBudget {
            family: EnumSpec::new(2, standard_basis(), 3),
            tuple_basis: standard_basis(),
            arity_cap: 2,
            cover_cap: None,
        };
        let r = rho_d_exact(&f, &m, 2, CertMode::Symmetric, &b).unwrap();
        assert_eq!(r.value, RhoValue::Finite(0));
        let c = r.certificate.unwrap();
        assert!(verify_depth_cover(&f, &m, &c).unwrap().ok());
        assert!(c.g_witness.depth() <= 2);
    }
}
