//! Covers read off oracle circuits: ordinary gates contribute their own
//! tuple, oracle gates are replaced by the majority-plus-error-sets
//! construction over their children's members.

use crate::barrier::{
    build_c_h, build_d_g_frame, cover_instance, instance_distributions, recipe_inputs, CaseOptions,
    Combiner, Distributions, Frame, Instance, InstanceCover,
};
use crate::circuit::{Circuit, CircuitBuilder, Gate, OracleCircuit};
use crate::connective::Connective;
use crate::distance::{gate_keys, verify_cover, verify_depth_cover, CoverCertificate, DepthCoverCertificate, Q};
use crate::enumerate::EnumSpec;
use crate::error::{Error, Result};
use crate::model::{check_0_projective, check_projective, ApproxModel, MemberId, OpKey};
use crate::truth_table::TruthTable;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub fn eval_oracle_circuit(c: &OracleCircuit, assignment: &[bool]) -> Result<bool> {
    c.evaluate(assignment)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerRow {
    pub gate: usize,
    pub label: String,
    pub member: MemberId,
    /// Tuples first used at this gate.
    pub added: usize,
    pub cumulative: usize,
    /// Non-input gates processed so far.
    pub steps: usize,
    /// Oracle gates processed so far.
    pub oracles: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizationReport {
    pub mode: &'static str,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub rows: Vec<LedgerRow>,
    /// Per-oracle unit of the budget: m·n in general, d(2^⌈m/d⌉+1)·n in
    /// the depth transform.
    pub unit: usize,
    /// Smallest C with cumulative ≤ steps + C·oracles·unit on every row.
    pub constant: Q,
    /// Points fed to the covering step of each oracle, in gate order.
    pub oracle_points: Vec<usize>,
    pub size: usize,
}

impl LocalizationReport {
    /// Rows are monotone and end at the certificate size.
    pub fn complete(&self) -> bool {
        let mono = self.rows.windows(2).all(|w| w[0].cumulative <= w[1].cumulative);
        let sums = self.rows.iter().map(|r| r.added).sum::<usize>() == self.size;
        let last = self.rows.last().map_or(self.size == 0, |r| r.cumulative == self.size);
        mono && sums && last && self.within_budget()
    }

    pub fn within_budget(&self) -> bool {
        self.rows.iter().all(|r| {
            let rhs = Q::from_integer(r.steps as i128) + self.constant * Q::from_integer((r.oracles * self.unit) as i128);
            Q::from_integer(r.cumulative as i128) <= rhs
        })
    }
}

impl fmt::Display for LocalizationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>5} {:<16} {:>6} {:>5} {:>5} {:>5} {:>7}", "gate", "kind", "member", "added", "cum", "steps", "oracles")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>5} {:<16} {:>6} {:>5} {:>5} {:>5} {:>7}",
                format!("g{}", r.gate),
                r.label,
                r.member,
                r.added,
                r.cumulative,
                r.steps,
                r.oracles
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Points {
    All,
    /// One point per assignment to the oracle's variables.
    Variables,
    /// One point per value profile of the children.
    Profiles,
}

struct Walk {
    keys: Vec<OpKey>,
    seen: BTreeSet<OpKey>,
    rows: Vec<LedgerRow>,
    steps: usize,
    oracles: usize,
    oracle_points: Vec<usize>,
}

impl Walk {
    fn new() -> Self {
        Walk { keys: vec![], seen: BTreeSet::new(), rows: vec![], steps: 0, oracles: 0, oracle_points: vec![] }
    }

    fn add(&mut self, key: OpKey) -> usize {
        if self.seen.insert(key.clone()) {
            self.keys.push(key);
            1
        } else {
            0
        }
    }

    fn row(&mut self, gate: usize, label: String, member: MemberId, added: usize) {
        self.rows.push(LedgerRow {
            gate,
            label,
            member,
            added,
            cumulative: self.keys.len(),
            steps: self.steps,
            oracles: self.oracles,
        });
    }
}

fn check_computes(c: &OracleCircuit, f: &TruthTable, model: &ApproxModel) -> Result<()> {
    if f.n() != model.n() || c.n() != model.n() {
        return Err(Error::Precondition("circuit, f and model disagree on n".into()));
    }
    if &c.truth_table() != f {
        return Err(Error::Precondition("the circuit does not compute f".into()));
    }
    Ok(())
}

fn points_for(model: &ApproxModel, inst: &Instance, c: &OracleCircuit, children: &[usize], how: Points) -> Option<Vec<usize>> {
    match how {
        Points::All => None,
        Points::Variables => {
            let mask = children.iter().fold(0usize, |m, &j| match c.gates()[j] {
                Gate::Input(k) => m | (1 << k),
                _ => m,
            });
            Some((0..1usize << model.n()).filter(|&x| x & !mask == 0).collect())
        }
        Points::Profiles => {
            let a = inst.project(model);
            let mut seen = BTreeSet::new();
            Some((0..1usize << model.n()).filter(|&x| seen.insert(a[x])).collect())
        }
    }
}

fn cover_oracle(
    model: &ApproxModel,
    inst: &Instance,
    opts: &CaseOptions,
) -> Result<(Distributions, InstanceCover)> {
    let dist = instance_distributions(model, inst)?;
    let cover = cover_instance(model, &dist, opts)?;
    let gt = model.member(cover.g);
    let mut covered = TruthTable::zero(model.n());
    for k in cover.keys(&dist) {
        covered = covered.or(&model.error_set(&k.conn, &k.inputs)?.delta);
    }
    if let Some(x) = gt.xor(&dist.target).minus(&covered).first_one() {
        return Err(Error::NotACover(format!("oracle replacement errs at x={x} outside its error sets")));
    }
    Ok((dist, cover))
}

fn oracle_label(t: &TruthTable) -> String {
    format!("oracle[{}]", t.n())
}

fn finish(
    f: &TruthTable,
    model: &ApproxModel,
    mode: &'static str,
    c: &OracleCircuit,
    walk: Walk,
    g: MemberId,
    unit: usize,
) -> Result<(CoverCertificate, LocalizationReport)> {
    let cert = CoverCertificate::symmetric(g, walk.keys.clone());
    if let Some(x) = verify_cover(f, model, &cert)?.uncovered {
        return Err(Error::NotACover(format!("localized certificate misses x={x}")));
    }
    let mut constant = Q::from_integer(0);
    for r in &walk.rows {
        if r.oracles > 0 && r.cumulative > r.steps {
            let q = Q::new((r.cumulative - r.steps) as i128, (r.oracles * unit.max(1)) as i128);
            constant = constant.max(q);
        }
    }
    let report = LocalizationReport {
        mode,
        n: model.n(),
        k: c.oracle_count(),
        m: c.max_oracle_arity(),
        rows: walk.rows,
        unit,
        constant,
        oracle_points: walk.oracle_points,
        size: cert.size(),
    };
    Ok((cert, report))
}

fn localize_walk(
    model: &ApproxModel,
    c: &OracleCircuit,
    f: &TruthTable,
    mode: &'static str,
    how: Points,
    expand_upto: usize,
) -> Result<(CoverCertificate, LocalizationReport)> {
    check_computes(c, f, model)?;
    let mut walk = Walk::new();
    let mut member = vec![usize::MAX; c.gates().len()];
    for i in c.live_gates() {
        match &c.gates()[i] {
            Gate::Input(k) => member[i] = model.var_member(*k)?,
            Gate::Const(b) => member[i] = model.const_member(*b)?,
            Gate::Apply(Connective::Oracle(t), ch) => {
                walk.steps += 1;
                walk.oracles += 1;
                let leaves: Vec<MemberId> = ch.iter().map(|&j| member[j]).collect();
                let before = walk.keys.len();
                if t.n() <= expand_upto {
                    // small oracles become their branching circuit
                    let cc = build_c_h(t, 1).circuit;
                    let approx = model.approximate_gates_with(&cc, &leaves)?;
                    for key in gate_keys(&cc, &approx) {
                        walk.add(key);
                    }
                    member[i] = approx[cc.output()];
                    walk.oracle_points.push(0);
                } else {
                    let inst = Instance { frame: Frame::general(t.n()), phi: t.clone(), leaves };
                    let points = points_for(model, &inst, c, ch, how);
                    walk.oracle_points.push(points.as_ref().map_or(1 << model.n(), |p| p.len()));
                    let opts = CaseOptions { points, ..CaseOptions::general() };
                    let (dist, cover) = cover_oracle(model, &inst, &opts)?;
                    for key in cover.keys(&dist) {
                        walk.add(key);
                    }
                    member[i] = cover.g;
                }
                let added = walk.keys.len() - before;
                walk.row(i, oracle_label(t), member[i], added);
            }
            Gate::Apply(conn, ch) => {
                walk.steps += 1;
                let ins: Vec<MemberId> = ch.iter().map(|&j| member[j]).collect();
                member[i] = model.op(conn, &ins)?;
                let added = walk.add(OpKey::new(conn.clone(), ins));
                walk.row(i, conn.to_string(), member[i], added);
            }
        }
    }
    let unit = c.max_oracle_arity() * model.n();
    finish(f, model, mode, c, walk, member[c.output()], unit)
}

/// Oracles of arity at most this are expanded into explicit circuits.
pub const EXPAND_ARITY: usize = 2;

pub fn localize_general(model: &ApproxModel, c: &OracleCircuit, f: &TruthTable) -> Result<(CoverCertificate, LocalizationReport)> {
    localize_walk(model, c, f, "general", Points::All, EXPAND_ARITY)
}

/// As `localize_general` with the expansion threshold chosen by the caller;
/// 0 sends every oracle through the majority construction.
pub fn localize_general_with(
    model: &ApproxModel,
    c: &OracleCircuit,
    f: &TruthTable,
    expand_upto: usize,
) -> Result<(CoverCertificate, LocalizationReport)> {
    localize_walk(model, c, f, "general", Points::All, expand_upto)
}

/// Rewrite oracles reading negated inputs or repeated inputs into oracles
/// over distinct plain inputs. Errors if an oracle reads anything else.
pub fn normalize_bottom_oracles(c: &OracleCircuit) -> Result<OracleCircuit> {
    let mut b = CircuitBuilder::tree(c.n());
    let mut map = Vec::with_capacity(c.gates().len());
    for (i, g) in c.gates().iter().enumerate() {
        let id = match g {
            Gate::Input(k) => b.input(*k),
            Gate::Const(v) => b.constant(*v),
            Gate::Apply(Connective::Oracle(t), ch) => {
                let mut lits = Vec::with_capacity(ch.len());
                for &j in ch {
                    let lit = match &c.gates()[j] {
                        Gate::Input(k) => (*k, true),
                        Gate::Apply(Connective::Not, inner) => match c.gates()[inner[0]] {
                            Gate::Input(k) => (k, false),
                            _ => return Err(not_bottom(i)),
                        },
                        _ => return Err(not_bottom(i)),
                    };
                    lits.push(lit);
                }
                let mut vars: Vec<usize> = lits.iter().map(|l| l.0).collect();
                vars.sort_unstable();
                vars.dedup();
                let t2 = TruthTable::from_fn(vars.len(), |a| {
                    let v = lits.iter().enumerate().fold(0usize, |acc, (pos, &(k, sign))| {
                        let bit = (a >> vars.iter().position(|&u| u == k).unwrap()) & 1 == 1;
                        acc | (((bit == sign) as usize) << pos)
                    });
                    t.get(v)
                });
                let ins: Vec<usize> = vars.iter().map(|&k| b.input(k)).collect();
                b.apply(Connective::Oracle(t2), ins)
            }
            Gate::Apply(conn, ch) => b.apply(conn.clone(), ch.iter().map(|&j| map[j]).collect()),
        };
        map.push(id);
    }
    Ok(b.finish(map[c.output()]))
}

fn not_bottom(i: usize) -> Error {
    Error::Structure(format!("oracle g{i} reads a gate that is not a literal; use localize_general"))
}

/// Oracles at the bottom over literals, under a model that passes the
/// 0-projectivity check on `family`: each oracle's cover is computed on one
/// point per assignment to its variables.
pub fn localize_0proj(
    model: &ApproxModel,
    c: &OracleCircuit,
    f: &TruthTable,
    family: &EnumSpec,
) -> Result<(CoverCertificate, LocalizationReport)> {
    let norm = normalize_bottom_oracles(c)?;
    let v = check_0_projective(model, family)?;
    if !v.passed() {
        return Err(Error::NotProjective(format!("{} fails the 0-projectivity check; use localize_general", model.name())));
    }
    localize_walk(model, &norm, f, "0proj", Points::Variables, 0)
}

/// Under a model that passes the projectivity check, each oracle's cover is
/// computed on one point per value profile of its children.
pub fn localize_projective(
    model: &ApproxModel,
    c: &OracleCircuit,
    f: &TruthTable,
    family: &EnumSpec,
    tuple_cap: usize,
) -> Result<(CoverCertificate, LocalizationReport)> {
    let v = check_projective(model, family, tuple_cap)?;
    if !v.passed() {
        return Err(Error::NotProjective(format!("{} fails the projectivity check; use localize_general", model.name())));
    }
    localize_walk(model, c, f, "proj", Points::Profiles, 0)
}

/// Per-gate depth bookkeeping of the depth transform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthLedgerRow {
    pub gate: usize,
    /// Depth of the gate in the oracle circuit.
    pub level: usize,
    pub witness_depth: usize,
    /// level · (2d+6)
    pub bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthLocalizationReport {
    pub base: LocalizationReport,
    pub d: usize,
    pub depth_rows: Vec<DepthLedgerRow>,
    /// Every realized vector of majority inputs was classified correctly
    /// (1 above 3/4 ones, 0 below 1/4).
    pub combiner_ok: bool,
}

fn approx_majority_ok(model: &ApproxModel, cover: &InstanceCover) -> bool {
    let k = cover.chosen.len();
    let tables: Vec<TruthTable> = cover.chosen.iter().map(|&h| model.member(h)).collect();
    (0..1usize << model.n()).all(|x| {
        let bits: Vec<bool> = tables.iter().map(|t| t.get(x)).collect();
        let ones = bits.iter().filter(|b| **b).count();
        let out = cover.combiner.evaluate(&bits).expect("k inputs");
        if 4 * ones > 3 * k {
            out
        } else if 4 * ones < k {
            !out
        } else {
            true
        }
    })
}

/// The depth transform: c has depth at most d; oracles use branching width
/// ⌈m/d⌉, Case I threshold 1/6 and a depth-2 majority. Witness circuits of
/// gate i have depth at most depth_i · (2d+6).
pub fn localize_depth(
    model: &ApproxModel,
    c: &OracleCircuit,
    f: &TruthTable,
    d: usize,
) -> Result<(DepthCoverCertificate, DepthLocalizationReport)> {
    check_computes(c, f, model)?;
    if d == 0 || c.depth() > d {
        return Err(Error::Precondition(format!("the circuit has depth {} but d={d}", c.depth())));
    }
    let n = model.n();
    let scale = 2 * d + 6;
    let levels = c.gate_depths();
    let mut walk = Walk::new();
    let mut member = vec![usize::MAX; c.gates().len()];
    let mut wit: Vec<Option<Circuit>> = vec![None; c.gates().len()];
    let mut inputs: BTreeMap<MemberId, Circuit> = BTreeMap::new();
    let mut depth_rows = Vec::new();
    let mut combiner_ok = true;
    let mut max_unit = 0;
    for i in c.live_gates() {
        match &c.gates()[i] {
            Gate::Input(k) => {
                member[i] = model.var_member(*k)?;
                let mut b = CircuitBuilder::tree(n);
                let o = b.input(*k);
                wit[i] = Some(b.finish(o));
            }
            Gate::Const(v) => {
                member[i] = model.const_member(*v)?;
                let mut b = CircuitBuilder::tree(n);
                let o = b.constant(*v);
                wit[i] = Some(b.finish(o));
            }
            Gate::Apply(conn, ch) => {
                walk.steps += 1;
                let leaves: Vec<MemberId> = ch.iter().map(|&j| member[j]).collect();
                let leaf_w: Vec<Circuit> = ch.iter().map(|&j| wit[j].clone().expect("children come first")).collect();
                let before = walk.keys.len();
                if let Connective::Oracle(t) = conn {
                    walk.oracles += 1;
                    let m = t.n();
                    max_unit = max_unit.max(d * ((1usize << m.div_ceil(d)) + 1) * n);
                    let inst = Instance { frame: Frame::depth(m, d), phi: t.clone(), leaves: leaves.clone() };
                    let opts = CaseOptions {
                        threshold: Q::new(1, 6),
                        margin: Q::new(3, 4),
                        combiner: Combiner::Dnf,
                        points: None,
                    };
                    walk.oracle_points.push(1 << n);
                    let (dist, cover) = cover_oracle(model, &inst, &opts)?;
                    combiner_ok &= approx_majority_ok(model, &cover);
                    let dgs: Vec<Circuit> = cover
                        .chosen
                        .iter()
                        .map(|h| build_d_g_frame(t, &dist.h_mask[h], &inst.frame).circuit.substitute(n, &leaf_w))
                        .collect();
                    let approx = model.approximate_gates_with(&cover.combiner, &cover.chosen)?;
                    for (k, gate) in cover.combiner.gates().iter().enumerate() {
                        if matches!(gate, Gate::Apply(..)) && k != cover.combiner.output() {
                            inputs.entry(approx[k]).or_insert_with(|| cover.combiner.cone(k).substitute(n, &dgs));
                        }
                    }
                    for (k, &h) in cover.chosen.iter().enumerate() {
                        inputs.entry(h).or_insert_with(|| dgs[k].clone());
                    }
                    for &e in &cover.case2_entries {
                        for w in recipe_inputs(&inst, &dist.delta[e].recipe) {
                            let id = model.approximate_gates_with(&w, &leaves)?[w.output()];
                            inputs.entry(id).or_insert_with(|| w.substitute(n, &leaf_w));
                        }
                    }
                    for key in cover.keys(&dist) {
                        walk.add(key);
                    }
                    member[i] = cover.g;
                    wit[i] = Some(cover.combiner.substitute(n, &dgs));
                } else {
                    member[i] = model.op(conn, &leaves)?;
                    for (j, w) in leaves.iter().zip(&leaf_w) {
                        inputs.entry(*j).or_insert_with(|| w.clone());
                    }
                    walk.add(OpKey::new(conn.clone(), leaves.clone()));
                    let mut b = CircuitBuilder::shared(n);
                    let roots: Vec<usize> = leaf_w.iter().map(|w| b.embed(w)).collect();
                    let o = b.apply(conn.clone(), roots);
                    wit[i] = Some(b.finish(o));
                }
                let w = wit[i].as_ref().unwrap();
                let bound = levels[i] * scale;
                assert!(
                    w.depth() <= bound,
                    "depth ledger violated at g{i}: witness depth {} > {bound}",
                    w.depth()
                );
                depth_rows.push(DepthLedgerRow { gate: i, level: levels[i], witness_depth: w.depth(), bound });
                let added = walk.keys.len() - before;
                let label = match conn {
                    Connective::Oracle(t) => oracle_label(t),
                    c => c.to_string(),
                };
                walk.row(i, label, member[i], added);
            }
        }
    }
    let out = c.output();
    let g_witness = wit[out].clone().expect("output processed");
    let (cert, base) = finish(f, model, "depth", c, walk, member[out], max_unit)?;
    let used: BTreeSet<MemberId> = cert.tuples.iter().flat_map(|t| t.key.inputs.iter().copied()).collect();
    inputs.retain(|id, _| used.contains(id));
    let dc = DepthCoverCertificate { cert, d: levels[out].max(1) * scale, g_witness, input_witnesses: inputs };
    let check = verify_depth_cover(f, model, &dc)?;
    if let Some(s) = check.side_condition {
        return Err(Error::NotACover(format!("depth side condition: {s}")));
    }
    Ok((dc, DepthLocalizationReport { base, d, depth_rows, combiner_ok }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::cert_from_circuit;
    use crate::model::{gen_exact_model, gen_rs_poly_model};

    fn oracle_circuit(n: usize, t: TruthTable, children: &[(usize, bool)]) -> Circuit {
        let mut b = CircuitBuilder::tree(n);
        let ch: Vec<usize> = children.iter().map(|&(k, s)| b.literal(k, s)).collect();
        let o = b.apply(Connective::Oracle(t), ch);
        b.finish(o)
    }

    #[test]
    fn oracle_evaluation() {
        let xor3 = TruthTable::from_hex(3, "96").unwrap();
        let c = oracle_circuit(3, xor3.clone(), &[(0, true), (1, true), (2, true)]);
        assert_eq!(c.truth_table(), xor3);
        let id = oracle_circuit(1, TruthTable::var(1, 0), &[(0, true)]);
        assert!(eval_oracle_circuit(&id, &[true]).unwrap());
        assert!(!eval_oracle_circuit(&id, &[false]).unwrap());
    }

    #[test]
    fn oracle_free_circuit_matches_circuit_certificate() {
        let m = gen_rs_poly_model(2, 1, 3);
        let mut b = CircuitBuilder::tree(2);
        let (x, y) = (b.input(0), b.input(1));
        let a = b.and2(x, y);
        let na = b.not(a);
        let o = b.or2(x, y);
        let out = b.and2(o, na);
        let c = b.finish(out);
        let f = c.truth_table();
        let (cert, r) = localize_general(&m, &c, &f).unwrap();
        assert_eq!(cert, cert_from_circuit(&f, &m, &c).unwrap());
        assert!(r.complete());
    }

    #[test]
    fn nand_oracle_exact_model() {
        let m = gen_exact_model(2);
        let nand = TruthTable::from_hex(2, "7").unwrap();
        let c = oracle_circuit(2, nand.clone(), &[(0, true), (1, true)]);
        for expand in [0, 2] {
            let (cert, r) = localize_general_with(&m, &c, &nand, expand).unwrap();
            for t in &cert.tuples {
                assert!(m.error_set(&t.key.conn, &t.key.inputs).unwrap().delta.is_zero());
            }
            assert!(r.complete());
        }
    }

    #[test]
    fn rs_model_oracle_covers() {
        let m = gen_rs_poly_model(2, 1, 5);
        let xor = TruthTable::from_hex(2, "6").unwrap();
        let c = oracle_circuit(2, xor.clone(), &[(0, true), (1, true)]);
        for expand in [0, 2] {
            let (cert, r) = localize_general_with(&m, &c, &xor, expand).unwrap();
            assert!(verify_cover(&xor, &m, &cert).unwrap().ok());
            assert!(r.complete());
        }
        let (dc, r) = localize_depth(&m, &c, &xor, 2).unwrap();
        assert!(verify_depth_cover(&xor, &m, &dc).unwrap().ok());
        assert!(r.combiner_ok);
        assert!(r.base.complete());
    }

    #[test]
    fn negated_children_are_normalized() {
        let t = TruthTable::from_hex(2, "6").unwrap();
        let c = oracle_circuit(2, t, &[(0, true), (1, false)]);
        let norm = normalize_bottom_oracles(&c).unwrap();
        assert_eq!(norm.truth_table(), c.truth_table());
        assert!(norm.live_gates().iter().all(|&i| !matches!(norm.gates()[i], Gate::Apply(Connective::Not, _))));
    }

    #[test]
    fn oracle_above_a_gate_is_not_bottom() {
        let mut b = CircuitBuilder::tree(2);
        let (x, y) = (b.input(0), b.input(1));
        let a = b.and2(x, y);
        let o = b.apply(Connective::Oracle(TruthTable::var(1, 0)), vec![a]);
        let c = b.finish(o);
        assert!(matches!(normalize_bottom_oracles(&c), Err(Error::Structure(_))));
    }
}
