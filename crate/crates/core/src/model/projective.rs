use super::{ApproxModel, MemberId};
use crate::circuit::{Circuit, Gate};
use crate::enumerate::{visit_circuits, EnumSpec};
use crate::error::{Error, Result};
use crate::truth_table::TruthTable;
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjectivityVerdict {
    /// No violation found among the checked (circuit, tuple) pairs.
    Pass { checked: usize },
    /// C̄ differs on z and y although the implication's premise holds.
    Fail { circuit: Circuit, tuple: Vec<MemberId>, z: usize, y: usize },
}

impl ProjectivityVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, ProjectivityVerdict::Pass { .. })
    }
}

/// Variables read by gates that reach the output.
pub fn used_inputs(c: &Circuit) -> Vec<usize> {
    let mut j: Vec<usize> = c
        .live_gates()
        .into_iter()
        .filter_map(|i| if let Gate::Input(k) = c.gates()[i] { Some(k) } else { None })
        .collect();
    j.sort_unstable();
    j.dedup();
    j
}

/// First pair z, y with equal keys but different values of t.
fn split_class(t: &TruthTable, key: impl Fn(usize) -> usize) -> Option<(usize, usize)> {
    let mut seen: HashMap<usize, usize> = HashMap::new();
    for x in 0..t.len() {
        match seen.get(&key(x)) {
            Some(&z) if t.get(z) != t.get(x) => return Some((z, x)),
            Some(_) => {}
            None => {
                seen.insert(key(x), x);
            }
        }
    }
    None
}

/// C̄ depends only on the variables C reads, for every circuit of the family.
/// Circuits whose approximator is not defined in the model are skipped.
pub fn check_0_projective(model: &ApproxModel, family: &EnumSpec) -> Result<ProjectivityVerdict> {
    if family.n != model.n() {
        return Err(Error::Precondition(format!("family over {} variables, model order {}", family.n, model.n())));
    }
    let mut checked = 0;
    let mut fail = None;
    let mut err = None;
    visit_circuits(family, |p| {
        let c = p.to_circuit();
        let out = match model.approximate_circuit(&c) {
            Ok(id) => id,
            Err(Error::IncompleteModel(_)) => return true,
            Err(e) => {
                err = Some(e);
                return false;
            }
        };
        checked += 1;
        let mask: usize = used_inputs(&c).iter().map(|j| 1 << j).sum();
        if let Some((z, y)) = split_class(&model.member(out), |x| x & mask) {
            fail = Some(ProjectivityVerdict::Fail { circuit: c, tuple: vec![], z, y });
            return false;
        }
        true
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(fail.unwrap_or(ProjectivityVerdict::Pass { checked }))
}

/// For circuits C over m inputs (the family's n) and member tuples
/// f_1..f_m, C̄(f_1,..,f_m) is constant on each class of points with the
/// same value profile (f_1(x),..,f_m(x)). Tuples are taken in lexicographic
/// order over the members known when the check starts, at most `tuple_cap`
/// per circuit.
pub fn check_projective(model: &ApproxModel, family: &EnumSpec, tuple_cap: usize) -> Result<ProjectivityVerdict> {
    let m = family.n;
    let members = model.members();
    let count = members.len();
    let mut checked = 0;
    let mut fail = None;
    let mut err = None;
    visit_circuits(family, |p| {
        let c = p.to_circuit();
        let mut tuple = vec![0usize; m];
        for _ in 0..tuple_cap {
            let out = match model.approximate_gates_with(&c, &tuple) {
                Ok(v) => Some(v[c.output()]),
                Err(Error::IncompleteModel(_)) => None,
                Err(e) => {
                    err = Some(e);
                    return false;
                }
            };
            if let Some(out) = out {
                checked += 1;
                let profile = |x: usize| {
                    tuple.iter().enumerate().fold(0, |k, (j, &id)| k | ((members[id].get(x) as usize) << j))
                };
                if let Some((z, y)) = split_class(&model.member(out), profile) {
                    fail = Some(ProjectivityVerdict::Fail { circuit: c.clone(), tuple: tuple.clone(), z, y });
                    return false;
                }
            }
            if !next_tuple(&mut tuple, count) {
                break;
            }
        }
        true
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(fail.unwrap_or(ProjectivityVerdict::Pass { checked }))
}

fn next_tuple(t: &mut [usize], base: usize) -> bool {
    for d in t.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connective::{standard_basis, Connective};
    use crate::model::{gen_exact_model, gen_rs_poly_model};

    fn broken_model() -> ApproxModel {
        let m = gen_exact_model(3);
        let (x1, x2, x3) = (m.var_member(0).unwrap(), m.var_member(1).unwrap(), m.var_member(2).unwrap());
        m.set_op(Connective::And(2), vec![x1, x2], x3);
        m
    }

    #[test]
    fn exact_model_is_projective() {
        let m = gen_exact_model(2);
        let spec = EnumSpec::new(2, standard_basis(), 2);
        assert!(check_0_projective(&m, &spec).unwrap().passed());
        assert!(check_projective(&m, &spec, 50).unwrap().passed());
    }

    #[test]
    fn broken_model_fails_both() {
        let m = broken_model();
        let spec = EnumSpec::new(3, vec![Connective::And(2)], 1);
        assert!(!check_0_projective(&m, &spec).unwrap().passed());
        let spec2 = EnumSpec::new(2, vec![Connective::And(2)], 1);
        match check_projective(&m, &spec2, 1 << 16).unwrap() {
            ProjectivityVerdict::Fail { tuple, .. } => assert_eq!(tuple.len(), 2),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn rs_model_passes_small_family() {
        let m = gen_rs_poly_model(3, 1, 7);
        let spec = EnumSpec::new(3, standard_basis(), 2);
        assert!(check_0_projective(&m, &spec).unwrap().passed());
    }
}
