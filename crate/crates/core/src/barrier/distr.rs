use super::construct::{build_d_g_frame, cofactor, Branch, Frame, Level, TypeIndex};
use crate::budget;
use crate::circuit::{Circuit, CircuitBuilder};
use crate::connective::Connective;
use crate::distance::Q;
use crate::error::{Error, Result};
use crate::model::{ApproxModel, ErrorSetTuple, MemberId, OpKey};
use crate::truth_table::{all_functions, TruthTable};
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};

/// The abstract setting: m abstract inputs standing for the members
/// `leaves`, a target φ on {0,1}^m and the branching frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub frame: Frame,
    pub phi: TruthTable,
    pub leaves: Vec<MemberId>,
}

impl Instance {
    /// The essential-variable instance for f: φ is f on its essential
    /// variables and the leaves are those variables.
    pub fn essential(model: &ApproxModel, f: &TruthTable) -> Result<Instance> {
        let vars = f.essential_vars();
        let phi = TruthTable::from_fn(vars.len(), |a| {
            let x = vars.iter().enumerate().fold(0, |x, (j, &v)| x | (((a >> j) & 1) << v));
            f.get(x)
        });
        let leaves = vars.iter().map(|&v| model.var_member(v)).collect::<Result<Vec<_>>>()?;
        Ok(Instance { frame: Frame::general(vars.len()), phi, leaves })
    }

    /// All n variables, width ⌈n/d⌉.
    pub fn full_depth(model: &ApproxModel, f: &TruthTable, d: usize) -> Result<Instance> {
        let n = f.n();
        let leaves = (0..n).map(|v| model.var_member(v)).collect::<Result<Vec<_>>>()?;
        Ok(Instance { frame: Frame::depth(n, d), phi: f.clone(), leaves })
    }

    /// All n variables, one per level.
    pub fn full_general(model: &ApproxModel, f: &TruthTable) -> Result<Instance> {
        let n = f.n();
        let leaves = (0..n).map(|v| model.var_member(v)).collect::<Result<Vec<_>>>()?;
        Ok(Instance { frame: Frame::general(n), phi: f.clone(), leaves })
    }

    pub fn m(&self) -> usize {
        self.frame.m
    }

    /// a(x): the abstract point seen at x.
    pub fn project(&self, model: &ApproxModel) -> Vec<usize> {
        let tables: Vec<TruthTable> = self.leaves.iter().map(|&l| model.member(l)).collect();
        (0..1usize << model.n())
            .map(|x| tables.iter().enumerate().fold(0, |a, (j, t)| a | ((t.get(x) as usize) << j)))
            .collect()
    }

    /// φ composed with the leaves, on {0,1}^n.
    pub fn target(&self, model: &ApproxModel) -> TruthTable {
        let a = self.project(model);
        TruthTable::from_fn(model.n(), |x| self.phi.get(a[x]))
    }
}

/// Approximators of C_h and its pieces, computed structurally and memoized.
pub(crate) struct Approx<'a> {
    model: &'a ApproxModel,
    frame: &'a Frame,
    pos: Vec<MemberId>,
    neg: Vec<MemberId>,
    memo: HashMap<(usize, TruthTable), MemberId>,
}

impl<'a> Approx<'a> {
    pub(crate) fn new(model: &'a ApproxModel, inst: &'a Instance) -> Result<Self> {
        let neg = inst.leaves.iter().map(|&l| model.op(&Connective::Not, &[l])).collect::<Result<Vec<_>>>()?;
        Ok(Approx { model, frame: &inst.frame, pos: inst.leaves.clone(), neg, memo: HashMap::new() })
    }

    fn lits(&self, level: usize, z: usize) -> Vec<MemberId> {
        let low = self.frame.prefix(level - 1);
        (0..self.frame.blocks[level - 1])
            .map(|i| if (z >> i) & 1 == 1 { self.pos[low + i] } else { self.neg[low + i] })
            .collect()
    }

    /// Inputs of the AND for arm z of the node for h at `level`.
    pub(crate) fn and_inputs(&mut self, level: usize, h: &TruthTable, z: usize) -> Result<Vec<MemberId>> {
        let u = self.frame.blocks[level - 1];
        let mut v = vec![self.c(level - 1, &cofactor(h, u, z))?];
        v.extend(self.lits(level, z));
        Ok(v)
    }

    fn and_conn(&self, level: usize) -> Connective {
        Connective::And(self.frame.blocks[level - 1] + 1)
    }

    fn or_conn(&self, level: usize) -> Connective {
        Connective::Or(1 << self.frame.blocks[level - 1])
    }

    pub(crate) fn or_inputs(&mut self, level: usize, h: &TruthTable) -> Result<Vec<MemberId>> {
        let mut v = Vec::new();
        for z in (0..1usize << self.frame.blocks[level - 1]).rev() {
            let ins = self.and_inputs(level, h, z)?;
            v.push(self.model.op(&self.and_conn(level), &ins)?);
        }
        Ok(v)
    }

    /// The approximator of C_h for h on the variables below `level`.
    pub(crate) fn c(&mut self, level: usize, h: &TruthTable) -> Result<MemberId> {
        if let Some(&id) = self.memo.get(&(level, h.clone())) {
            return Ok(id);
        }
        let id = if level == 0 {
            self.model.const_member(h.get(0))?
        } else {
            let ins = self.or_inputs(level, h)?;
            self.model.op(&self.or_conn(level), &ins)?
        };
        self.memo.insert((level, h.clone()), id);
        Ok(id)
    }

    /// Members of C_{φ⊕g}, C_{¬g}, C_{¬(φ⊕g)}, C_g.
    pub(crate) fn parts(&mut self, phi: &TruthTable, g: &TruthTable) -> Result<[MemberId; 4]> {
        let top = self.frame.levels();
        let fg = phi.xor(g);
        Ok([self.c(top, &fg)?, self.c(top, &g.not())?, self.c(top, &fg.not())?, self.c(top, g)?])
    }

    /// Output, first AND, second AND of D̄_g.
    pub(crate) fn top(&mut self, phi: &TruthTable, g: &TruthTable) -> Result<[MemberId; 3]> {
        let p = self.parts(phi, g)?;
        let a1 = self.model.op(&Connective::And(2), &[p[0], p[1]])?;
        let a2 = self.model.op(&Connective::And(2), &[p[2], p[3]])?;
        Ok([self.model.op(&Connective::Or(2), &[a1, a2])?, a1, a2])
    }

    /// Connective and inputs of the tuple of a type for the random g.
    pub(crate) fn tuple(&mut self, phi: &TruthTable, ty: TypeIndex, g: &TruthTable) -> Result<(Connective, Vec<MemberId>)> {
        match (ty.level, ty.t) {
            (Level::Xor, Branch::Or) => {
                let t = self.top(phi, g)?;
                Ok((Connective::Or(2), vec![t[1], t[2]]))
            }
            (Level::Xor, Branch::Bits(t)) => {
                let p = self.parts(phi, g)?;
                Ok((Connective::And(2), if t == 0 { vec![p[0], p[1]] } else { vec![p[2], p[3]] }))
            }
            (Level::Block(l), Branch::Or) => Ok((self.or_conn(l), self.or_inputs(l, g)?)),
            (Level::Block(l), Branch::Bits(z)) => Ok((self.and_conn(l), self.and_inputs(l, g, z)?)),
        }
    }
}

/// A distribution with exact weights, support in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDistribution<T> {
    pub support: Vec<(T, Q)>,
}

impl<T> ExactDistribution<T> {
    pub fn total(&self) -> Q {
        self.support.iter().map(|(_, p)| *p).sum()
    }
}

/// How an error-set tuple arises: its type and the random function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recipe {
    pub ty: TypeIndex,
    pub g: TruthTable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaEntry {
    pub tuple: ErrorSetTuple,
    pub prob: Q,
    /// The first (type, g) producing the tuple.
    pub recipe: Recipe,
}

#[derive(Clone, Debug)]
pub struct Distributions {
    pub inst: Instance,
    /// φ composed with the leaves.
    pub target: TruthTable,
    pub h: ExactDistribution<MemberId>,
    /// The first g with D̄_g = h.
    pub h_mask: BTreeMap<MemberId, TruthTable>,
    /// Sorted by tuple key.
    pub delta: Vec<DeltaEntry>,
}

impl Distributions {
    pub fn delta_distribution(&self) -> ExactDistribution<ErrorSetTuple> {
        ExactDistribution { support: self.delta.iter().map(|e| (e.tuple.clone(), e.prob)).collect() }
    }

    /// Pr[h(x) ≠ target(x)] for every x.
    pub fn h_error(&self, model: &ApproxModel) -> Vec<Q> {
        let n = model.n();
        let mut v = vec![Q::zero(); 1 << n];
        for (id, p) in &self.h.support {
            for x in model.member(*id).xor(&self.target).ones() {
                v[x] += *p;
            }
        }
        v
    }

    /// Pr[x ∈ δ] for every x.
    pub fn delta_mass(&self, n: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); 1 << n];
        for e in &self.delta {
            for x in e.tuple.delta.ones() {
                v[x] += e.prob;
            }
        }
        v
    }
}

fn check_size(m: usize) -> Result<()> {
    if m > 4 {
        return Err(Error::Budget { what: format!("exact distributions over F_{m}"), estimate: u128::MAX, cap: budget::global() });
    }
    budget::check("exact distributions", (1u128 << (1 << m)) * (1u128 << m) * 16)
}

/// Exact laws of h = D̄_g for uniform g and of the error set of a uniform
/// type with its own uniform random function.
pub fn instance_distributions(model: &ApproxModel, inst: &Instance) -> Result<Distributions> {
    if !model.neg_is_exact {
        return Err(Error::Precondition("the model must approximate negation exactly".into()));
    }
    let m = inst.m();
    check_size(m)?;
    let mut ap = Approx::new(model, inst)?;
    let gs = all_functions(m);
    let wg = Q::new(1, gs.len() as i128);
    let mut h: BTreeMap<MemberId, Q> = BTreeMap::new();
    let mut h_mask = BTreeMap::new();
    for g in &gs {
        let id = ap.top(&inst.phi, g)?[0];
        *h.entry(id).or_insert_with(Q::zero) += wg;
        h_mask.entry(id).or_insert_with(|| g.clone());
    }
    let types = inst.frame.types();
    let wt = Q::new(1, types.len() as i128);
    let mut delta: BTreeMap<OpKey, (Q, Recipe)> = BTreeMap::new();
    for ty in types {
        let k = match ty.level {
            Level::Xor => m,
            Level::Block(l) => inst.frame.prefix(l),
        };
        let fam = all_functions(k);
        let w = wt * Q::new(1, fam.len() as i128);
        for g in fam {
            let (conn, ins) = ap.tuple(&inst.phi, ty, &g)?;
            let key = OpKey::new(conn, ins);
            let e = delta.entry(key).or_insert_with(|| (Q::zero(), Recipe { ty, g: g.clone() }));
            e.0 += w;
        }
    }
    let delta = delta
        .into_iter()
        .map(|(key, (prob, recipe))| {
            Ok(DeltaEntry { tuple: model.error_set(&key.conn, &key.inputs)?, prob, recipe })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Distributions {
        target: inst.target(model),
        inst: inst.clone(),
        h: ExactDistribution { support: h.into_iter().collect() },
        h_mask,
        delta,
    })
}

/// The instance used by the lemma: essential variables with width 1, or
/// all variables with width ⌈n/d⌉ when a depth is given.
pub fn lemma_instance(model: &ApproxModel, f: &TruthTable, depth: Option<usize>) -> Result<Instance> {
    if f.n() != model.n() {
        return Err(Error::Precondition(format!("f has {} variables, model order {}", f.n(), model.n())));
    }
    match depth {
        None => Instance::essential(model, f),
        Some(0) => Err(Error::Precondition("depth must be at least 1".into())),
        Some(d) => Instance::full_depth(model, f, d),
    }
}

pub fn distr_h_delta(
    model: &ApproxModel,
    f: &TruthTable,
    depth: Option<usize>,
) -> Result<(ExactDistribution<MemberId>, ExactDistribution<ErrorSetTuple>)> {
    let d = instance_distributions(model, &lemma_instance(model, f, depth)?)?;
    Ok((d.h.clone(), d.delta_distribution()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaRow {
    pub x: usize,
    /// Pr[h(x) ≠ f(x)]
    pub lhs: Q,
    /// Pr[x ∈ δ]
    pub mass: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub factor: usize,
    pub type_count: usize,
    pub rows: Vec<LemmaRow>,
    /// Largest lhs/mass over points with mass > 0.
    pub max_ratio: Option<Q>,
    /// First point violating lhs ≤ factor · mass.
    pub witness: Option<usize>,
}

impl LemmaReport {
    pub fn pass(&self) -> bool {
        self.witness.is_none()
    }
}

pub fn check_lemma(model: &ApproxModel, dist: &Distributions, factor: usize) -> LemmaReport {
    let n = model.n();
    let lhs = dist.h_error(model);
    let mass = dist.delta_mass(n);
    let mut rows = Vec::with_capacity(1 << n);
    let mut max_ratio: Option<Q> = None;
    let mut witness = None;
    for x in 0..1usize << n {
        if !mass[x].is_zero() {
            let r = lhs[x] / mass[x];
            if max_ratio.map_or(true, |m| r > m) {
                max_ratio = Some(r);
            }
        }
        if witness.is_none() && lhs[x] > Q::from_integer(factor as i128) * mass[x] {
            witness = Some(x);
        }
        rows.push(LemmaRow { x, lhs: lhs[x], mass: mass[x] });
    }
    LemmaReport { factor, type_count: dist.inst.frame.type_count(), rows, max_ratio, witness }
}

/// Pr[h(x) ≠ f(x)] ≤ K · Pr[x ∈ δ] at every x, exactly, with K = 12(n₀+1)
/// or, with a depth, K = 4(d+1)(2^⌈n/d⌉+1).
pub fn verify_distr_lemma(model: &ApproxModel, f: &TruthTable, depth: Option<usize>) -> Result<LemmaReport> {
    let inst = lemma_instance(model, f, depth)?;
    let factor = match depth {
        None => 12 * (inst.m() + 1),
        Some(d) => 4 * (d + 1) * ((1usize << f.n().div_ceil(d)) + 1),
    };
    let dist = instance_distributions(model, &inst)?;
    Ok(check_lemma(model, &dist, factor))
}

/// Abstract circuits (over the m abstract inputs) whose approximators are
/// the inputs of the tuple produced by `recipe`.
pub fn recipe_inputs(inst: &Instance, recipe: &Recipe) -> Vec<Circuit> {
    let frame = &inst.frame;
    match recipe.ty.level {
        Level::Xor => {
            let dg = build_d_g_frame(&inst.phi, &recipe.g, frame);
            let gates: Vec<usize> = match recipe.ty.t {
                Branch::Or => vec![dg.top[1], dg.top[2]],
                Branch::Bits(0) => vec![dg.nodes[dg.parts[0]].gate, dg.nodes[dg.parts[1]].gate],
                Branch::Bits(_) => vec![dg.nodes[dg.parts[2]].gate, dg.nodes[dg.parts[3]].gate],
            };
            gates.into_iter().map(|i| dg.circuit.cone(i)).collect()
        }
        Level::Block(l) => {
            // C_g on the variables below level l, lifted to m inputs
            let sub = Frame { m: frame.prefix(l), blocks: frame.blocks[..l].to_vec() };
            let c = super::construct::build_c_h_frame(&recipe.g, &sub);
            let lift = |cc: &Circuit| {
                let mut b = CircuitBuilder::tree(frame.m);
                let o = b.embed(cc);
                b.finish(o)
            };
            let root = &c.nodes[c.root];
            match recipe.ty.t {
                Branch::Or => root.arms.iter().map(|a| lift(&c.circuit.cone(a.and_gate))).collect(),
                Branch::Bits(z) => {
                    let arm = root.arms.iter().find(|a| a.z == z).expect("arm exists");
                    match &c.circuit.gates()[arm.and_gate] {
                        crate::circuit::Gate::Apply(_, ch) => ch.iter().map(|&j| lift(&c.circuit.cone(j))).collect(),
                        _ => unreachable!("arms are AND gates"),
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{gen_exact_model, gen_rs_poly_model};

    #[test]
    fn exact_model_point_mass_and_empty_sets() {
        let m = gen_exact_model(2);
        let f = TruthTable::from_hex(2, "8").unwrap();
        let (h, d) = distr_h_delta(&m, &f, None).unwrap();
        assert_eq!(h.support.len(), 1);
        assert_eq!(m.member(h.support[0].0), f);
        assert!(d.support.iter().all(|(e, _)| e.delta.is_zero()));
        assert_eq!(d.total(), Q::from_integer(1));
        assert!(verify_distr_lemma(&m, &f, None).unwrap().pass());
    }

    #[test]
    fn structural_approximation_matches_circuit() {
        let m = gen_rs_poly_model(2, 1, 3);
        let f = TruthTable::from_hex(2, "8").unwrap();
        let inst = Instance::full_general(&m, &f).unwrap();
        let mut ap = Approx::new(&m, &inst).unwrap();
        for g in all_functions(2) {
            let dg = build_d_g_frame(&f, &g, &inst.frame);
            let gates = m.approximate_gates_with(&dg.circuit, &inst.leaves).unwrap();
            let t = ap.top(&f, &g).unwrap();
            assert_eq!([gates[dg.top[0]], gates[dg.top[1]], gates[dg.top[2]]], t);
        }
    }

    #[test]
    fn recipes_rebuild_their_tuples() {
        let m = gen_rs_poly_model(3, 1, 2);
        let f = TruthTable::from_hex(3, "e8").unwrap();
        let inst = Instance::full_depth(&m, &f, 2).unwrap();
        let dist = instance_distributions(&m, &inst).unwrap();
        for e in dist.delta.iter().step_by(3) {
            let cs = recipe_inputs(&inst, &e.recipe);
            let mut ids: Vec<MemberId> = cs
                .iter()
                .map(|c| m.approximate_gates_with(c, &inst.leaves).unwrap()[c.output()])
                .collect();
            ids.sort_unstable();
            assert_eq!(ids, e.tuple.key.inputs);
        }
    }

    #[test]
    fn weights_sum_to_one() {
        let m = gen_rs_poly_model(2, 2, 1);
        let f = TruthTable::from_hex(2, "6").unwrap();
        let (h, d) = distr_h_delta(&m, &f, None).unwrap();
        assert_eq!(h.total(), Q::from_integer(1));
        assert_eq!(d.total(), Q::from_integer(1));
    }
}
