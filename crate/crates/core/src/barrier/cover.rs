use super::construct::{build_d_g_frame, TypeIndex};
use super::distr::{instance_distributions, recipe_inputs, Distributions};
use crate::circuit::{Circuit, CircuitBuilder};
use crate::distance::{gate_keys, verify_cover, verify_depth_cover, CoverCertificate, DepthCoverCertificate, Q};
use crate::enumerate::EnumSpec;
use crate::error::{Error, Result};
use crate::model::{check_0_projective, ApproxModel, MemberId, OpKey};
use crate::truth_table::TruthTable;
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combiner {
    /// Binary threshold network T(i,j) = T(i-1,j) ∨ (x_i ∧ T(i-1,j-1)).
    Threshold,
    /// Depth-2 OR of ANDs over all minimal winning subsets.
    Dnf,
}

/// Strict majority of k inputs: at least ⌊k/2⌋+1 ones.
pub fn majority_circuit(k: usize, combiner: Combiner) -> Result<Circuit> {
    assert!(k >= 1);
    let need = k / 2 + 1;
    match combiner {
        Combiner::Threshold => {
            let mut b = CircuitBuilder::shared(k);
            // t[j] = gate for "at least j of the inputs so far", None = false
            let mut t: Vec<Option<usize>> = vec![None; need + 1];
            for i in 0..k {
                let x = b.input(i);
                for j in (1..=need.min(i + 1)).rev() {
                    let with = if j == 1 { Some(x) } else { t[j - 1].map(|p| b.and2(x, p)) };
                    t[j] = match (t[j], with) {
                        (Some(a), Some(c)) => Some(b.or2(a, c)),
                        (a, c) => a.or(c),
                    };
                }
            }
            Ok(b.finish(t[need].expect("need <= k")))
        }
        Combiner::Dnf => {
            let terms = binomial(k, need);
            crate::budget::check("majority DNF terms", terms * k as u128)?;
            let mut b = CircuitBuilder::tree(k);
            let mut ands = Vec::new();
            let mut sub: Vec<usize> = (0..need).collect();
            loop {
                let ch: Vec<usize> = sub.iter().map(|&i| b.input(i)).collect();
                ands.push(b.and_n(ch));
                // next need-subset in lexicographic order
                let Some(p) = (0..need).rev().find(|&p| sub[p] < k - need + p) else { break };
                sub[p] += 1;
                for q in p + 1..need {
                    sub[q] = sub[q - 1] + 1;
                }
            }
            let out = b.or_n(ands);
            Ok(b.finish(out))
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

#[derive(Clone, Debug)]
pub struct CaseOptions {
    /// Case I holds at x when Pr[h(x) ≠ target(x)] < threshold.
    pub threshold: Q,
    /// Fraction of the chosen h's that must be correct at every Case I point.
    pub margin: Q,
    pub combiner: Combiner,
    /// Points to cover; all of {0,1}^n when None.
    pub points: Option<Vec<usize>>,
}

impl CaseOptions {
    pub fn general() -> Self {
        CaseOptions { threshold: Q::new(1, 3), margin: Q::new(1, 2), combiner: Combiner::Threshold, points: None }
    }

    pub fn depth() -> Self {
        CaseOptions { threshold: Q::new(1, 3), margin: Q::new(1, 2), combiner: Combiner::Dnf, points: None }
    }
}

#[derive(Clone, Debug)]
pub struct InstanceCover {
    pub g: MemberId,
    /// h_1..h_k in the order chosen.
    pub chosen: Vec<MemberId>,
    pub combiner: Circuit,
    pub case1_points: usize,
    pub case2_points: usize,
    pub case1_keys: Vec<OpKey>,
    /// Indices into the distribution's δ entries.
    pub case2_entries: Vec<usize>,
}

impl InstanceCover {
    pub fn keys(&self, dist: &Distributions) -> Vec<OpKey> {
        let mut v = self.case1_keys.clone();
        v.extend(self.case2_entries.iter().map(|&i| dist.delta[i].tuple.key.clone()));
        v.sort();
        v.dedup();
        v
    }
}

/// Largest number of majority inputs tried: ⌊48 ln 2^n⌋ + 1.
pub fn majority_cap(n: usize) -> usize {
    (48.0 * (n as f64) * std::f64::consts::LN_2).floor() as usize + 1
}

/// Case I then Case II over the exact distributions.
pub fn cover_instance(model: &ApproxModel, dist: &Distributions, opts: &CaseOptions) -> Result<InstanceCover> {
    let n = model.n();
    let points: Vec<usize> = opts.points.clone().unwrap_or_else(|| (0..1usize << n).collect());
    let err = dist.h_error(model);
    let target = &dist.target;
    let x1: Vec<usize> = points.iter().copied().filter(|&x| err[x] < opts.threshold).collect();
    let x2: Vec<usize> = points.iter().copied().filter(|&x| err[x] >= opts.threshold).collect();

    let mut order: Vec<(MemberId, Q)> = dist.h.support.clone();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let tables: HashMap<MemberId, TruthTable> = order.iter().map(|(id, _)| (*id, model.member(*id))).collect();
    let right = |id: MemberId, x: usize| tables[&id].get(x) == target.get(x);

    let mut chosen: Vec<MemberId> = Vec::new();
    let mut correct: Vec<usize> = vec![0; 1 << n];
    let satisfied = |correct: &[usize], k: usize| {
        x1.iter().all(|&x| Q::from_integer(correct[x] as i128) > opts.margin * Q::from_integer(k as i128))
    };
    if x1.is_empty() {
        chosen.push(order[0].0);
    } else {
        let cap = majority_cap(n);
        while chosen.is_empty() || !satisfied(&correct, chosen.len()) {
            if chosen.len() >= cap {
                return Err(Error::Derandomization(format!(
                    "no majority of {cap} approximators is correct on all {} Case I points",
                    x1.len()
                )));
            }
            let k = chosen.len() as f64 + 1.0;
            let margin = *opts.margin.numer() as f64 / *opts.margin.denom() as f64;
            let weight = |x: usize| 2f64.powf(margin * k - correct[x] as f64);
            let mut best: Option<(f64, MemberId)> = None;
            for (id, _) in &order {
                let s: f64 = x1.iter().filter(|&&x| right(*id, x)).map(|&x| weight(x)).sum();
                if best.map_or(true, |(b, _)| s > b) {
                    best = Some((s, *id));
                }
            }
            let (_, id) = best.expect("the support is not empty");
            for &x in &x1 {
                if right(id, x) {
                    correct[x] += 1;
                }
            }
            chosen.push(id);
        }
    }

    let combiner = majority_circuit(chosen.len(), opts.combiner)?;
    let approx = model.approximate_gates_with(&combiner, &chosen)?;
    let g = approx[combiner.output()];
    let gt = model.member(g);
    let wrong1: Vec<usize> = x1.iter().copied().filter(|&x| gt.get(x) != target.get(x)).collect();
    let mut case1_keys = Vec::new();
    let mut seen = BTreeSet::new();
    for key in gate_keys(&combiner, &approx) {
        if seen.contains(&key) {
            continue;
        }
        let e = model.error_set(&key.conn, &key.inputs)?;
        if wrong1.iter().any(|&x| e.delta.get(x)) {
            seen.insert(key.clone());
            case1_keys.push(key);
        }
    }
    for &x in &wrong1 {
        let hit = case1_keys.iter().any(|k| model.error_set(&k.conn, &k.inputs).map(|e| e.delta.get(x)).unwrap_or(false));
        if !hit {
            return Err(Error::Derandomization(format!("Case I point {x} is not covered by a majority gate")));
        }
    }

    let mut rest: BTreeSet<usize> = x2.iter().copied().filter(|&x| gt.get(x) != target.get(x)).collect();
    let case2_points = rest.len();
    let mut case2_entries = Vec::new();
    while let Some(&first) = rest.iter().next() {
        let mut best: Option<(Q, usize)> = None;
        for (i, e) in dist.delta.iter().enumerate() {
            let c = rest.iter().filter(|&&x| e.tuple.delta.get(x)).count();
            if c == 0 {
                continue;
            }
            let s = e.prob * Q::from_integer(c as i128);
            if best.map_or(true, |(b, _)| s > b) {
                best = Some((s, i));
            }
        }
        let Some((_, i)) = best else {
            return Err(Error::Derandomization(format!("Case II point {first} lies in no error set of the distribution")));
        };
        rest.retain(|&x| !dist.delta[i].tuple.delta.get(x));
        case2_entries.push(i);
    }
    Ok(InstanceCover {
        g,
        chosen,
        combiner,
        case1_points: x1.len(),
        case2_points,
        case1_keys,
        case2_entries,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarrierReport {
    pub n: usize,
    pub n0: usize,
    /// Number of approximators fed to the majority.
    pub k: usize,
    pub majority_size: usize,
    pub case1_points: usize,
    pub case1_tuples: usize,
    pub case2_points: usize,
    pub case2_tuples: usize,
    pub size: usize,
    /// size / (n · max(n₀, 1))
    pub constant: Q,
    /// Types of the Case II tuples.
    pub types_used: usize,
    pub type_bound: usize,
}

fn report(model: &ApproxModel, dist: &Distributions, c: &InstanceCover, cert: &CoverCertificate, n0: usize, type_bound: usize) -> BarrierReport {
    let n = model.n();
    let types: BTreeSet<TypeIndex> = c.case2_entries.iter().map(|&i| dist.delta[i].recipe.ty).collect();
    BarrierReport {
        n,
        n0,
        k: c.chosen.len(),
        majority_size: c.combiner.size(),
        case1_points: c.case1_points,
        case1_tuples: c.case1_keys.len(),
        case2_points: c.case2_points,
        case2_tuples: c.case2_entries.len(),
        size: cert.size(),
        constant: Q::new(cert.size() as i128, (n * n0.max(1)) as i128),
        types_used: types.len(),
        type_bound,
    }
}

fn ensure_covers(f: &TruthTable, model: &ApproxModel, cert: &CoverCertificate) -> Result<()> {
    match verify_cover(f, model, cert)?.uncovered {
        None => Ok(()),
        Some(x) => Err(Error::NotACover(format!("barrier certificate misses x={x}"))),
    }
}

/// A cover of f built from the exact distributions on f's essential
/// variables: majority of derandomized approximators, then greedy error sets.
pub fn barrier_cover(model: &ApproxModel, f: &TruthTable) -> Result<(CoverCertificate, BarrierReport)> {
    let inst = super::distr::lemma_instance(model, f, None)?;
    let dist = instance_distributions(model, &inst)?;
    let c = cover_instance(model, &dist, &CaseOptions::general())?;
    let cert = CoverCertificate::symmetric(c.g, c.keys(&dist));
    ensure_covers(f, model, &cert)?;
    let r = report(model, &dist, &c, &cert, inst.m(), inst.frame.type_count());
    Ok((cert, r))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjReport {
    pub base: BarrierReport,
    /// Points covered: one per assignment to the essential variables.
    pub classes: usize,
    /// Every emitted δ is a union of classes.
    pub lifted_inputs: bool,
    /// n₀²
    pub n0_squared: usize,
}

/// x with the variables outside `vars` cleared.
fn class_rep(x: usize, vars: &[usize]) -> usize {
    vars.iter().fold(0, |r, &v| r | (x & (1 << v)))
}

/// As `barrier_cover`, covering only one point per assignment to the
/// essential variables. The model must pass the 0-projectivity check on
/// `family`.
pub fn barrier_cover_0proj(model: &ApproxModel, f: &TruthTable, family: &EnumSpec) -> Result<(CoverCertificate, ProjReport)> {
    let verdict = check_0_projective(model, family)?;
    if !verdict.passed() {
        return Err(Error::NotProjective(format!(
            "{} fails the 0-projectivity check ({verdict:?}); use barrier_cover instead",
            model.name()
        )));
    }
    let inst = super::distr::lemma_instance(model, f, None)?;
    let vars = f.essential_vars();
    let reps: Vec<usize> = (0..f.len()).filter(|&x| class_rep(x, &vars) == x).collect();
    let dist = instance_distributions(model, &inst)?;
    let opts = CaseOptions { points: Some(reps.clone()), ..CaseOptions::general() };
    let c = cover_instance(model, &dist, &opts)?;
    let cert = CoverCertificate::symmetric(c.g, c.keys(&dist));
    ensure_covers(f, model, &cert)?;
    let mut lifted = true;
    for key in cert.keys() {
        let e = model.error_set(&key.conn, &key.inputs)?;
        if (0..f.len()).any(|x| e.delta.get(x) != e.delta.get(class_rep(x, &vars))) {
            lifted = false;
        }
    }
    let base = report(model, &dist, &c, &cert, inst.m(), inst.frame.type_count());
    let n0 = inst.m();
    Ok((cert, ProjReport { base, classes: reps.len(), lifted_inputs: lifted, n0_squared: n0 * n0 }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthReport {
    pub base: BarrierReport,
    pub d: usize,
    /// Depth of the certificate, 3d+5.
    pub cert_depth: usize,
    /// Structural depth of D_g.
    pub dg_depth: usize,
    pub g_witness_depth: usize,
    pub width: usize,
}

/// Depth-bounded barrier cover on all n variables with branching width
/// ⌈n/d⌉; the result is a depth-(3d+5) certificate.
pub fn barrier_cover_depth(model: &ApproxModel, f: &TruthTable, d: usize) -> Result<(DepthCoverCertificate, DepthReport)> {
    let inst = super::distr::lemma_instance(model, f, Some(d))?;
    let dist = instance_distributions(model, &inst)?;
    let c = cover_instance(model, &dist, &CaseOptions::depth())?;
    let cert = CoverCertificate::symmetric(c.g, c.keys(&dist));
    let n = model.n();
    let d_circuit = |h: MemberId| build_d_g_frame(&inst.phi, &dist.h_mask[&h], &inst.frame).circuit;
    let dgs: Vec<Circuit> = c.chosen.iter().map(|&h| d_circuit(h)).collect();
    let dg_depth = dgs[0].depth();
    let g_witness = c.combiner.substitute(n, &dgs);
    let mut input_witnesses: BTreeMap<MemberId, Circuit> = BTreeMap::new();
    // majority gates: inputs are h's or AND terms over them
    let approx = model.approximate_gates_with(&c.combiner, &c.chosen)?;
    for (i, gate) in c.combiner.gates().iter().enumerate() {
        if let crate::circuit::Gate::Apply(..) = gate {
            if i != c.combiner.output() {
                input_witnesses.entry(approx[i]).or_insert_with(|| c.combiner.cone(i).substitute(n, &dgs));
            }
        }
    }
    for (k, &h) in c.chosen.iter().enumerate() {
        input_witnesses.entry(h).or_insert_with(|| dgs[k].clone());
    }
    for &i in &c.case2_entries {
        let e = &dist.delta[i];
        for w in recipe_inputs(&inst, &e.recipe) {
            let id = model.approximate_gates_with(&w, &inst.leaves)?[w.output()];
            input_witnesses.entry(id).or_insert(w);
        }
    }
    let keys: BTreeSet<MemberId> = cert.tuples.iter().flat_map(|t| t.key.inputs.iter().copied()).collect();
    input_witnesses.retain(|id, _| keys.contains(id));
    let dc = DepthCoverCertificate { cert, d: 3 * d + 5, g_witness, input_witnesses };
    let check = verify_depth_cover(f, model, &dc)?;
    if let Some(s) = check.side_condition {
        return Err(Error::NotACover(format!("depth side condition: {s}")));
    }
    if let Some(x) = check.uncovered {
        return Err(Error::NotACover(format!("depth barrier certificate misses x={x}")));
    }
    let v = inst.frame.width();
    let base = report(model, &dist, &c, &dc.cert, f.essential_vars().len(), ((1 << v) + 1) * (d + 1));
    let g_witness_depth = dc.g_witness.depth();
    Ok((dc, DepthReport { base, d, cert_depth: 3 * d + 5, dg_depth, g_witness_depth, width: v }))
}
