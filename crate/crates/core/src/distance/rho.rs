use super::cert::{CertMode, CertTuple, CoverCertificate, Side};
use crate::budget;
use crate::connective::Connective;
use crate::enumerate::{visit_circuits, EnumSpec};
use crate::error::{Error, Result};
use crate::model::{multiset_count, next_multiset, ApproxModel, ErrorSetTuple, MemberId, OpKey};
use crate::setcover::{greedy_set_cover, min_cover, Bits, Cover};
use crate::truth_table::TruthTable;
use rayon::prelude::*;
use std::collections::BTreeSet;

/// Which op-table tuples a distance computation may use.
#[derive(Clone, Debug)]
pub enum Pool {
    /// Every multiset tuple over all members (closed models only).
    Full { basis: Vec<Connective>, arity_cap: usize },
    /// Every multiset tuple over the members that approximate some gate of
    /// some circuit in the family.
    Reachable { family: EnumSpec, basis: Vec<Connective>, arity_cap: usize },
    Explicit(Vec<OpKey>),
}

#[derive(Clone, Debug)]
pub struct RhoBudget {
    /// g ranges over these; None means every member known once the pool
    /// is built.
    pub g_candidates: Option<Vec<MemberId>>,
    pub pool: Pool,
    /// Keep only the first this many tuples (in key order). A truncated
    /// pool makes the result an upper bound.
    pub pool_cap: Option<usize>,
    /// Report values above this as exceeding the cap.
    pub cover_cap: Option<usize>,
}

impl RhoBudget {
    pub fn full(basis: Vec<Connective>, arity_cap: usize) -> Self {
        RhoBudget { g_candidates: None, pool: Pool::Full { basis, arity_cap }, pool_cap: None, cover_cap: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoValue {
    Finite(usize),
    /// No g and tuple set cover f.
    Infinite,
    /// Every cover needs more than the cap.
    ExceedsCap(usize),
}

impl std::fmt::Display for RhoValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RhoValue::Finite(v) => write!(f, "{v}"),
            RhoValue::Infinite => f.write_str("inf"),
            RhoValue::ExceedsCap(c) => write!(f, ">{c}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoOutcome {
    pub value: RhoValue,
    pub certificate: Option<CoverCertificate>,
    /// False when the pool was truncated: the value is then only an upper
    /// bound on the minimum over the untruncated pool.
    pub exact: bool,
    pub pool_size: usize,
    pub candidates: usize,
}

/// The pool's error sets in key order, deduplicated, plus whether it was
/// truncated.
pub fn build_pool(model: &ApproxModel, pool: &Pool, cap: Option<usize>) -> Result<(Vec<ErrorSetTuple>, bool)> {
    let mut out = match pool {
        Pool::Full { basis, arity_cap } => model.enumerate_error_sets(basis, *arity_cap)?,
        Pool::Reachable { family, basis, arity_cap } => {
            let members = reachable_members(model, family)?;
            tuples_over(model, &members, basis, *arity_cap)?
        }
        Pool::Explicit(keys) => {
            let mut v = Vec::with_capacity(keys.len());
            for k in keys {
                v.push(model.error_set(&k.conn, &k.inputs)?);
            }
            v
        }
    };
    out.sort_by(|a, b| a.key.cmp(&b.key));
    out.dedup_by(|a, b| a.key == b.key);
    let truncated = matches!(cap, Some(c) if out.len() > c);
    if let Some(c) = cap {
        out.truncate(c);
    }
    Ok((out, truncated))
}

/// Members that approximate some gate of some circuit of the family.
pub fn reachable_members(model: &ApproxModel, family: &EnumSpec) -> Result<Vec<MemberId>> {
    let mut seen = BTreeSet::new();
    let mut err = None;
    visit_circuits(family, |p| match model.approximate_gates(&p.to_circuit()) {
        Ok(v) => {
            seen.extend(v.into_iter().filter(|&id| id != usize::MAX));
            true
        }
        Err(Error::IncompleteModel(_)) => true,
        Err(e) => {
            err = Some(e);
            false
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(seen.into_iter().collect())
}

/// Error sets of every multiset tuple over `members`.
pub fn tuples_over(
    model: &ApproxModel,
    members: &[MemberId],
    basis: &[Connective],
    arity_cap: usize,
) -> Result<Vec<ErrorSetTuple>> {
    let m = members.len();
    let conns: Vec<&Connective> = basis.iter().filter(|c| c.arity() <= arity_cap && !c.is_oracle()).collect();
    let estimate: u128 = conns.iter().map(|c| multiset_count(m, c.arity())).sum();
    budget::check("tuple pool", estimate)?;
    let mut out = Vec::new();
    if m == 0 {
        return Ok(out);
    }
    for c in conns {
        let mut idx = vec![0usize; c.arity()];
        loop {
            let ids: Vec<MemberId> = idx.iter().map(|&i| members[i]).collect();
            match model.error_set(c, &ids) {
                Ok(e) => out.push(e),
                Err(Error::IncompleteModel(_)) => {}
                Err(e) => return Err(e),
            }
            if !next_multiset(&mut idx, m) {
                break;
            }
        }
    }
    Ok(out)
}

/// Element sets of the pool. Symmetric: points of δ. Asymmetric: points
/// of δ⁺ followed by points of δ⁻ offset by 2^n.
fn pool_sets(pool: &[ErrorSetTuple], len: usize, mode: CertMode) -> Vec<Bits> {
    pool.iter()
        .map(|e| match mode {
            CertMode::Symmetric => Bits::from_indices(len, e.delta.ones()),
            CertMode::Asymmetric => {
                Bits::from_indices(2 * len, e.delta_plus.ones().chain(e.delta_minus.ones().map(|x| x + len)))
            }
        })
        .collect()
}

/// Per-g cover problem over the elements of `pool_sets`.
fn cover_for_g(f: &TruthTable, g: &TruthTable, sets: &[Bits], mode: CertMode, cap: Option<usize>, greedy: bool) -> Cover {
    let len = f.len();
    let (len, target) = match mode {
        CertMode::Symmetric => (len, Bits::from_indices(len, f.xor(g).ones())),
        CertMode::Asymmetric => {
            (2 * len, Bits::from_indices(2 * len, f.minus(g).ones().chain(g.minus(f).ones().map(|x| x + len))))
        }
    };
    if greedy {
        greedy_set_cover(len, &target, sets)
    } else {
        min_cover(len, &target, sets, cap)
    }
}

/// The certificate for a chosen g and pool indices, with side tags
/// recording which part of the difference each tuple helps cover.
pub(crate) fn certificate_for(
    f: &TruthTable,
    g_id: MemberId,
    g: &TruthTable,
    pool: &[ErrorSetTuple],
    idx: &[usize],
    mode: CertMode,
) -> CoverCertificate {
    let mut tuples = Vec::new();
    for &i in idx {
        let e = &pool[i];
        match mode {
            CertMode::Symmetric => tuples.push(CertTuple { side: None, key: e.key.clone() }),
            CertMode::Asymmetric => {
                if e.delta_plus.intersects(&f.minus(g)) {
                    tuples.push(CertTuple { side: Some(Side::Plus), key: e.key.clone() });
                }
                if e.delta_minus.intersects(&g.minus(f)) {
                    tuples.push(CertTuple { side: Some(Side::Minus), key: e.key.clone() });
                }
            }
        }
    }
    tuples.sort();
    CoverCertificate { mode, g: g_id, tuples }
}

/// Minimum over g candidates and the pool, lexicographically least by
/// (g, sorted tuple keys) among optimal certificates.
pub fn rho_exact(f: &TruthTable, model: &ApproxModel, mode: CertMode, budget: &RhoBudget) -> Result<RhoOutcome> {
    if f.n() != model.n() {
        return Err(Error::Precondition(format!("f has {} variables, model order {}", f.n(), model.n())));
    }
    let (pool, truncated) = build_pool(model, &budget.pool, budget.pool_cap)?;
    let candidates: Vec<MemberId> = match &budget.g_candidates {
        Some(c) => c.clone(),
        None => (0..model.member_count()).collect(),
    };
    rho_over(f, model, mode, &candidates, &pool, budget.cover_cap, !truncated, false)
}

/// Greedy covers per g: a verified certificate whose size only bounds ρ
/// from above. `exact` is always false.
pub fn rho_greedy(f: &TruthTable, model: &ApproxModel, mode: CertMode, budget: &RhoBudget) -> Result<RhoOutcome> {
    if f.n() != model.n() {
        return Err(Error::Precondition(format!("f has {} variables, model order {}", f.n(), model.n())));
    }
    let (pool, _) = build_pool(model, &budget.pool, budget.pool_cap)?;
    let candidates: Vec<MemberId> = match &budget.g_candidates {
        Some(c) => c.clone(),
        None => (0..model.member_count()).collect(),
    };
    rho_over(f, model, mode, &candidates, &pool, None, false, true)
}

pub(crate) fn rho_over(
    f: &TruthTable,
    model: &ApproxModel,
    mode: CertMode,
    candidates: &[MemberId],
    pool: &[ErrorSetTuple],
    cap: Option<usize>,
    exact: bool,
    greedy: bool,
) -> Result<RhoOutcome> {
    if let Some(&bad) = candidates.iter().find(|&&g| g >= model.member_count()) {
        return Err(Error::Precondition(format!("candidate g={bad} is not a member")));
    }
    budget::check("distance search", candidates.len() as u128 * pool.len() as u128)?;
    let tables: Vec<TruthTable> = candidates.iter().map(|&g| model.member(g)).collect();
    let sets = pool_sets(pool, f.len(), mode);
    let results: Vec<Cover> = tables.par_iter().map(|g| cover_for_g(f, g, &sets, mode, cap, greedy)).collect();
    let mut best: Option<(usize, usize, Vec<usize>)> = None;
    let mut over_cap = false;
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Cover::Optimal(idx) => {
                let key = (idx.len(), candidates[k]);
                if best.as_ref().map_or(true, |(v, g, _)| key < (*v, *g)) {
                    best = Some((idx.len(), candidates[k], idx));
                }
            }
            Cover::ExceedsCap => over_cap = true,
            Cover::Infeasible => {}
        }
    }
    let (value, certificate) = match best {
        Some((v, g, idx)) => {
            let gt = model.member(g);
            (RhoValue::Finite(v), Some(certificate_for(f, g, &gt, pool, &idx, mode)))
        }
        None if over_cap => (RhoValue::ExceedsCap(cap.unwrap_or(0)), None),
        None => (RhoValue::Infinite, None),
    };
    Ok(RhoOutcome { value, certificate, exact, pool_size: pool.len(), candidates: candidates.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connective::standard_basis;
    use crate::distance::verify_cover;
    use crate::model::{gen_exact_model, gen_rs_poly_model};
    use crate::truth_table::all_functions;

    #[test]
    fn exact_model_distance_zero() {
        let m = gen_exact_model(2);
        for f in all_functions(2) {
            let r = rho_exact(&f, &m, CertMode::Symmetric, &RhoBudget::full(standard_basis(), 2)).unwrap();
            assert_eq!(r.value, RhoValue::Finite(0));
            assert_eq!(m.member(r.certificate.unwrap().g), f);
        }
    }

    #[test]
    fn unreachable_function_is_infinite() {
        let n = 2;
        let f = TruthTable::from_hex(2, "6").unwrap();
        let members = vec![TruthTable::zero(n), TruthTable::one(n), TruthTable::var(n, 0), TruthTable::var(n, 1)];
        let m = ApproxModel::from_members(n, "tiny", members, true);
        // No connectives, so no tuples, and f is not a member.
        let r = rho_exact(&f, &m, CertMode::Symmetric, &RhoBudget::full(vec![], 2)).unwrap();
        assert_eq!(r.value, RhoValue::Infinite);
    }

    #[test]
    fn rs_certificates_verify() {
        let m = gen_rs_poly_model(2, 1, 3);
        for f in all_functions(2) {
            for mode in [CertMode::Symmetric, CertMode::Asymmetric] {
                let r = rho_exact(&f, &m, mode, &RhoBudget::full(standard_basis(), 2)).unwrap();
                if let Some(c) = &r.certificate {
                    assert!(verify_cover(&f, &m, c).unwrap().ok());
                    assert_eq!(RhoValue::Finite(c.size()), r.value);
                }
            }
        }
    }

    #[test]
    fn capped_pool_is_labelled() {
        let m = gen_rs_poly_model(2, 1, 3);
        let f = TruthTable::from_hex(2, "6").unwrap();
        let mut b = RhoBudget::full(standard_basis(), 2);
        b.pool_cap = Some(3);
        let r = rho_exact(&f, &m, CertMode::Symmetric, &b).unwrap();
        assert!(!r.exact);
        assert_eq!(r.pool_size, 3);
    }

    #[test]
    fn greedy_bounds_the_minimum_from_above() {
        let m = gen_rs_poly_model(2, 1, 4);
        let b = RhoBudget::full(standard_basis(), 2);
        for f in all_functions(2) {
            let ex = rho_exact(&f, &m, CertMode::Symmetric, &b).unwrap();
            let gr = rho_greedy(&f, &m, CertMode::Symmetric, &b).unwrap();
            assert!(!gr.exact);
            match (ex.value, gr.value) {
                (RhoValue::Finite(a), RhoValue::Finite(g)) => assert!(a <= g),
                (a, g) => assert_eq!(a, g),
            }
            if let Some(c) = gr.certificate {
                assert!(verify_cover(&f, &m, &c).unwrap().ok());
            }
        }
    }
}
