//! Exhaustive enumeration of small circuits in a canonical normal form.
//!
//! Normal form: base nodes (inputs, then optionally the constants 0 and 1)
//! come first; gates follow in strictly increasing order of
//! (depth, connective name, arity, child list), commutative children are
//! distinct and sorted, and every gate except the last (the output) feeds
//! some later gate. Each circuit whose gates are all live is produced once.

use crate::budget;
use crate::circuit::{Circuit, Gate};
use crate::connective::Connective;
use crate::error::{Error, Result};
use crate::truth_table::TruthTable;

#[derive(Clone, Debug)]
pub struct EnumSpec {
    pub n: usize,
    pub basis: Vec<Connective>,
    pub max_size: usize,
    pub max_depth: Option<usize>,
    pub constants: bool,
}

impl EnumSpec {
    pub fn new(n: usize, basis: Vec<Connective>, max_size: usize) -> Self {
        let mut basis = basis;
        basis.sort_by(|a, b| (a.name(), a.arity()).cmp(&(b.name(), b.arity())));
        basis.dedup();
        EnumSpec { n, basis, max_size, max_depth: None, constants: false }
    }

    pub fn with_depth(mut self, d: Option<usize>) -> Self {
        self.max_depth = d;
        self
    }

    pub fn with_constants(mut self, c: bool) -> Self {
        self.constants = c;
        self
    }

    fn base_count(&self) -> usize {
        self.n + if self.constants { 2 } else { 0 }
    }

    /// Product of per-step choice counts divided by k! (one canonical order
    /// per gate set), summed over sizes.
    pub fn estimate(&self) -> u128 {
        let b = self.base_count();
        let mut total: f64 = b as f64;
        let mut prod: f64 = 1.0;
        for k in 1..=self.max_size {
            let m = b + k - 1;
            let c: f64 = self.basis.iter().map(|c| binom(m, c.arity())).sum();
            prod *= c / k as f64;
            total += prod;
        }
        if total > 1e30 {
            u128::MAX
        } else {
            total.ceil() as u128
        }
    }
}

fn binom(m: usize, k: usize) -> f64 {
    if k > m {
        return 0.0;
    }
    let mut r = 1.0;
    for i in 0..k {
        r = r * (m - i) as f64 / (i + 1) as f64;
    }
    r
}

/// A circuit under construction, exposed to visitors.
pub struct Partial<'a> {
    n: usize,
    nodes: &'a [Gate],
    tables: &'a [TruthTable],
    depths: &'a [usize],
    base: usize,
    output: usize,
}

impl Partial<'_> {
    pub fn table(&self) -> &TruthTable {
        &self.tables[self.output]
    }

    pub fn size(&self) -> usize {
        self.nodes.len() - self.base
    }

    pub fn depth(&self) -> usize {
        self.depths[self.output]
    }

    pub fn to_circuit(&self) -> Circuit {
        if self.size() == 0 {
            return Circuit::new(self.n, vec![self.nodes[self.output].clone()], 0).unwrap();
        }
        Circuit::new(self.n, self.nodes.to_vec(), self.output).unwrap()
    }
}

type Key = (usize, &'static str, usize, Vec<usize>);

struct Walker<'s, F> {
    spec: &'s EnumSpec,
    nodes: Vec<Gate>,
    tables: Vec<TruthTable>,
    depths: Vec<usize>,
    uses: Vec<usize>,
    keys: Vec<Key>,
    max_arity: usize,
    visit: F,
    stop: bool,
}

impl<F: FnMut(&Partial) -> bool> Walker<'_, F> {
    fn base(&self) -> usize {
        self.spec.base_count()
    }

    fn unused(&self) -> usize {
        (self.base()..self.nodes.len()).filter(|&i| self.uses[i] == 0).count()
    }

    fn emit(&mut self, output: usize) {
        let p = Partial {
            n: self.spec.n,
            nodes: &self.nodes,
            tables: &self.tables,
            depths: &self.depths,
            base: self.base(),
            output,
        };
        if !(self.visit)(&p) {
            self.stop = true;
        }
    }

    fn run(&mut self) {
        for i in 0..self.base() {
            if self.stop {
                return;
            }
            // Size-0 circuits: the output is a base node. Visitors see only
            // that node as the circuit.
            let (nodes, tables, depths) = (
                self.nodes[..self.base()].to_vec(),
                self.tables[..self.base()].to_vec(),
                self.depths[..self.base()].to_vec(),
            );
            let p = Partial { n: self.spec.n, nodes: &nodes, tables: &tables, depths: &depths, base: self.base(), output: i };
            if !(self.visit)(&p) {
                self.stop = true;
            }
        }
        self.dfs();
    }

    fn dfs(&mut self) {
        if self.stop {
            return;
        }
        let size = self.nodes.len() - self.base();
        if size == self.spec.max_size {
            return;
        }
        let remaining_after = self.spec.max_size - size - 1;
        let m = self.nodes.len();
        let basis = self.spec.basis.clone();
        for c in &basis {
            let a = c.arity();
            if a > m {
                continue;
            }
            let mut ch: Vec<usize> = (0..a).collect();
            loop {
                self.try_gate(c, &ch, remaining_after);
                if self.stop {
                    return;
                }
                if !next_combination(&mut ch, m) {
                    break;
                }
            }
        }
    }

    fn try_gate(&mut self, c: &Connective, ch: &[usize], remaining_after: usize) {
        let depth = 1 + ch.iter().map(|&j| self.depths[j]).max().unwrap();
        if let Some(d) = self.spec.max_depth {
            if depth > d {
                return;
            }
        }
        let key: Key = (depth, c.name(), c.arity(), ch.to_vec());
        if let Some(last) = self.keys.last() {
            if key <= *last {
                return;
            }
        }
        // Unused gates after adding this one; each later gate can absorb at
        // most max_arity - 1 net unused gates, and one must remain.
        let absorbed = ch.iter().filter(|&&j| j >= self.base() && self.uses[j] == 0).count();
        let unused_after = self.unused() - absorbed + 1;
        if unused_after > 1 + remaining_after * (self.max_arity - 1) {
            return;
        }
        let args: Vec<&TruthTable> = ch.iter().map(|&j| &self.tables[j]).collect();
        let t = c.apply(&args);
        for &j in ch {
            self.uses[j] += 1;
        }
        self.nodes.push(Gate::Apply(c.clone(), ch.to_vec()));
        self.tables.push(t);
        self.depths.push(depth);
        self.uses.push(0);
        self.keys.push(key);
        if unused_after == 1 {
            let out = self.nodes.len() - 1;
            self.emit(out);
        }
        self.dfs();
        self.keys.pop();
        self.uses.pop();
        self.depths.pop();
        self.tables.pop();
        self.nodes.pop();
        for &j in ch {
            self.uses[j] -= 1;
        }
    }
}

fn next_combination(c: &mut [usize], m: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < m - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Visit every normal-form circuit; the visitor returns false to stop.
pub fn visit_circuits(spec: &EnumSpec, visit: impl FnMut(&Partial) -> bool) -> Result<()> {
    budget::check("circuit enumeration", spec.estimate())?;
    let n = spec.n;
    let mut nodes = Vec::new();
    let mut tables = Vec::new();
    for k in 0..n {
        nodes.push(Gate::Input(k));
        tables.push(TruthTable::var(n, k));
    }
    if spec.constants {
        for b in [false, true] {
            nodes.push(Gate::Const(b));
            tables.push(TruthTable::constant(n, b));
        }
    }
    let base = nodes.len();
    let mut w = Walker {
        spec,
        nodes,
        tables,
        depths: vec![0; base],
        uses: vec![0; base],
        keys: Vec::new(),
        max_arity: spec.basis.iter().map(|c| c.arity()).max().unwrap_or(1),
        visit,
        stop: false,
    };
    w.run();
    Ok(())
}

pub fn enumerate_circuits(spec: &EnumSpec) -> Result<Vec<Circuit>> {
    let mut out = Vec::new();
    visit_circuits(spec, |p| {
        out.push(p.to_circuit());
        true
    })?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinSize {
    Size(usize, Circuit),
    ExceedsCap,
}

/// Least size of a normal-form circuit computing f, with a witness that is
/// the first such circuit in enumeration order.
pub fn min_circuit_size(
    f: &TruthTable,
    basis: &[Connective],
    cap: usize,
    depth_cap: Option<usize>,
) -> Result<MinSize> {
    if f.n() == 0 {
        return Err(Error::Precondition("min_circuit_size needs n >= 1".into()));
    }
    budget::check(
        "circuit enumeration",
        EnumSpec::new(f.n(), basis.to_vec(), cap).with_depth(depth_cap).estimate(),
    )?;
    for s in 0..=cap {
        let spec = EnumSpec::new(f.n(), basis.to_vec(), s).with_depth(depth_cap);
        let mut found = None;
        visit_circuits(&spec, |p| {
            if p.size() == s && p.table() == f {
                found = Some(p.to_circuit());
                false
            } else {
                true
            }
        })?;
        if let Some(c) = found {
            return Ok(MinSize::Size(s, c));
        }
    }
    Ok(MinSize::ExceedsCap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connective::standard_basis;
    use std::collections::BTreeSet;

    #[test]
    fn negation_only_n1() {
        let spec = EnumSpec::new(1, vec![Connective::Not], 1);
        let cs = enumerate_circuits(&spec).unwrap();
        let tables: Vec<String> = cs.iter().map(|c| c.truth_table().to_hex()).collect();
        assert_eq!(tables, vec!["2", "1"]);
    }

    #[test]
    fn size_zero_is_inputs_only() {
        let spec = EnumSpec::new(2, standard_basis(), 0);
        let cs = enumerate_circuits(&spec).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|c| c.size() == 0));
        let with_consts = enumerate_circuits(&spec.clone().with_constants(true)).unwrap();
        assert_eq!(with_consts.len(), 4);
    }

    #[test]
    fn canonical_circuits_are_distinct_and_live() {
        let spec = EnumSpec::new(2, standard_basis(), 3);
        let cs = enumerate_circuits(&spec).unwrap();
        let set: BTreeSet<String> = cs.iter().map(|c| format!("{c:?}")).collect();
        assert_eq!(set.len(), cs.len());
        for c in &cs {
            let live = c.live_gates();
            for (i, g) in c.gates().iter().enumerate() {
                if matches!(g, Gate::Apply(..)) {
                    assert!(live.contains(&i));
                }
            }
        }
    }

    #[test]
    fn budget_refusal_names_estimate() {
        let spec = EnumSpec::new(4, crate::connective::unbounded_basis(4), 9);
        match enumerate_circuits(&spec) {
            Err(Error::Budget { estimate, .. }) => assert!(estimate > 100_000_000),
            other => panic!("expected refusal, got {:?}", other.map(|v| v.len())),
        }
    }
}
