use crate::connective::Connective;
use crate::error::{Error, Result};
use crate::truth_table::{TruthTable, MAX_VARS};
use std::collections::HashMap;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Gate {
    /// 0-based variable index.
    Input(usize),
    Const(bool),
    Apply(Connective, Vec<usize>),
}

/// Topologically ordered gate list; children always precede their parent.
/// Oracle gates make this an oracle circuit.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
    output: usize,
}

pub type OracleCircuit = Circuit;

impl Circuit {
    pub fn new(n: usize, gates: Vec<Gate>, output: usize) -> Result<Self> {
        if n > MAX_VARS {
            return Err(Error::MalformedCircuit(format!("{n} variables exceeds {MAX_VARS}")));
        }
        for (i, g) in gates.iter().enumerate() {
            match g {
                Gate::Input(k) if *k >= n => {
                    return Err(Error::MalformedCircuit(format!("g{i} reads x{} but n={n}", k + 1)))
                }
                Gate::Apply(c, ch) => {
                    if ch.len() != c.arity() {
                        return Err(Error::MalformedCircuit(format!(
                            "g{i}: {} expects {} inputs, got {}",
                            c.name(),
                            c.arity(),
                            ch.len()
                        )));
                    }
                    if let Some(bad) = ch.iter().find(|&&j| j >= i) {
                        return Err(Error::MalformedCircuit(format!("g{i} reads g{bad}, which is not earlier")));
                    }
                }
                _ => {}
            }
        }
        if output >= gates.len() {
            return Err(Error::MalformedCircuit(format!("output g{output} does not exist")));
        }
        Ok(Circuit { n, gates, output })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn output(&self) -> usize {
        self.output
    }

    /// Number of gates that are neither inputs nor constants.
    pub fn size(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Apply(..))).count()
    }

    /// Longest edge path below each gate.
    pub fn gate_depths(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.gates.len()];
        for (i, g) in self.gates.iter().enumerate() {
            if let Gate::Apply(_, ch) = g {
                d[i] = 1 + ch.iter().map(|&j| d[j]).max().unwrap_or(0);
            }
        }
        d
    }

    pub fn depth(&self) -> usize {
        self.gate_depths()[self.output]
    }

    pub fn oracle_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Apply(c, _) if c.is_oracle())).count()
    }

    pub fn max_oracle_arity(&self) -> usize {
        self.gates
            .iter()
            .filter_map(|g| match g {
                Gate::Apply(c, _) if c.is_oracle() => Some(c.arity()),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn connectives(&self) -> Vec<Connective> {
        let mut v: Vec<Connective> = Vec::new();
        for g in &self.gates {
            if let Gate::Apply(c, _) = g {
                if !v.contains(c) {
                    v.push(c.clone());
                }
            }
        }
        v
    }

    pub fn evaluate(&self, assignment: &[bool]) -> Result<bool> {
        if assignment.len() != self.n {
            return Err(Error::Precondition(format!(
                "assignment has {} bits, circuit has {} variables",
                assignment.len(),
                self.n
            )));
        }
        let mut val = vec![false; self.gates.len()];
        let mut buf = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            val[i] = match g {
                Gate::Input(k) => assignment[*k],
                Gate::Const(b) => *b,
                Gate::Apply(c, ch) => {
                    buf.clear();
                    buf.extend(ch.iter().map(|&j| val[j]));
                    c.apply_bits(&buf)
                }
            };
        }
        Ok(val[self.output])
    }

    /// Evaluate on the assignment encoded by the integer x.
    pub fn eval_index(&self, x: usize) -> bool {
        let a: Vec<bool> = (0..self.n).map(|i| (x >> i) & 1 == 1).collect();
        self.evaluate(&a).expect("assignment length matches")
    }

    /// The table computed at every gate.
    pub fn gate_tables(&self) -> Vec<TruthTable> {
        let mut t: Vec<TruthTable> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let v = match g {
                Gate::Input(k) => TruthTable::var(self.n, *k),
                Gate::Const(b) => TruthTable::constant(self.n, *b),
                Gate::Apply(c, ch) => {
                    let args: Vec<&TruthTable> = ch.iter().map(|&j| &t[j]).collect();
                    c.apply(&args)
                }
            };
            t.push(v);
        }
        t
    }

    pub fn truth_table(&self) -> TruthTable {
        self.gate_tables().swap_remove(self.output)
    }

    /// Gates that the output depends on, in increasing order.
    pub fn live_gates(&self) -> Vec<usize> {
        let mut live = vec![false; self.gates.len()];
        live[self.output] = true;
        for i in (0..self.gates.len()).rev() {
            if live[i] {
                if let Gate::Apply(_, ch) = &self.gates[i] {
                    for &j in ch {
                        live[j] = true;
                    }
                }
            }
        }
        (0..self.gates.len()).filter(|&i| live[i]).collect()
    }

    /// The subcircuit below gate `root`, renumbered, as a circuit on its own.
    pub fn cone(&self, root: usize) -> Circuit {
        let probe = Circuit { n: self.n, gates: self.gates[..=root].to_vec(), output: root };
        let keep = probe.live_gates();
        let mut map = vec![usize::MAX; root + 1];
        let mut gates = Vec::with_capacity(keep.len());
        for &i in &keep {
            map[i] = gates.len();
            gates.push(match &self.gates[i] {
                Gate::Apply(c, ch) => Gate::Apply(c.clone(), ch.iter().map(|&j| map[j]).collect()),
                g => g.clone(),
            });
        }
        Circuit { n: self.n, output: gates.len() - 1, gates }
    }

    /// Replace input k by the circuit `inner[k]`, all on `n` variables.
    /// Identical gates are shared.
    pub fn substitute(&self, n: usize, inner: &[Circuit]) -> Circuit {
        let mut b = CircuitBuilder::shared(n);
        let mut roots: Vec<Option<usize>> = vec![None; inner.len()];
        let mut map = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let id = match g {
                Gate::Input(k) => match roots[*k] {
                    Some(r) => r,
                    None => {
                        let r = b.embed(&inner[*k]);
                        roots[*k] = Some(r);
                        r
                    }
                },
                Gate::Const(v) => b.constant(*v),
                Gate::Apply(c, ch) => b.apply(c.clone(), ch.iter().map(|&j| map[j]).collect()),
            };
            map.push(id);
        }
        b.finish(map[self.output])
    }
}

/// Incremental construction with optional structural sharing.
#[derive(Clone, Debug, Default)]
pub struct CircuitBuilder {
    n: usize,
    gates: Vec<Gate>,
    index: HashMap<Gate, usize>,
    share: bool,
}

impl CircuitBuilder {
    /// Every call adds a new gate, so the result is a formula-like tree
    /// wherever the caller builds one.
    pub fn tree(n: usize) -> Self {
        CircuitBuilder { n, gates: Vec::new(), index: HashMap::new(), share: false }
    }

    /// Identical gates are shared; commutative children are sorted.
    pub fn shared(n: usize) -> Self {
        CircuitBuilder { n, gates: Vec::new(), index: HashMap::new(), share: true }
    }

    fn push(&mut self, g: Gate) -> usize {
        if self.share {
            if let Some(&i) = self.index.get(&g) {
                return i;
            }
            self.index.insert(g.clone(), self.gates.len());
        }
        self.gates.push(g);
        self.gates.len() - 1
    }

    pub fn input(&mut self, k: usize) -> usize {
        assert!(k < self.n);
        self.push(Gate::Input(k))
    }

    pub fn constant(&mut self, b: bool) -> usize {
        self.push(Gate::Const(b))
    }

    pub fn apply(&mut self, c: Connective, mut ch: Vec<usize>) -> usize {
        assert_eq!(ch.len(), c.arity());
        if self.share && c.commutative() {
            ch.sort_unstable();
        }
        self.push(Gate::Apply(c, ch))
    }

    pub fn not(&mut self, a: usize) -> usize {
        self.apply(Connective::Not, vec![a])
    }

    pub fn literal(&mut self, k: usize, positive: bool) -> usize {
        let x = self.input(k);
        if positive {
            x
        } else {
            self.not(x)
        }
    }

    pub fn and2(&mut self, a: usize, b: usize) -> usize {
        self.apply(Connective::And(2), vec![a, b])
    }

    pub fn or2(&mut self, a: usize, b: usize) -> usize {
        self.apply(Connective::Or(2), vec![a, b])
    }

    /// AND of arbitrary width; width 1 is the child itself.
    pub fn and_n(&mut self, ch: Vec<usize>) -> usize {
        if ch.len() == 1 {
            ch[0]
        } else {
            let a = ch.len();
            self.apply(Connective::And(a), ch)
        }
    }

    pub fn or_n(&mut self, ch: Vec<usize>) -> usize {
        if ch.len() == 1 {
            ch[0]
        } else {
            let a = ch.len();
            self.apply(Connective::Or(a), ch)
        }
    }

    /// Balanced tree of binary gates of kind `and`/`or`.
    pub fn balanced(&mut self, and: bool, ch: &[usize]) -> usize {
        match ch.len() {
            0 => panic!("empty balanced tree"),
            1 => ch[0],
            k => {
                let l = self.balanced(and, &ch[..k / 2]);
                let r = self.balanced(and, &ch[k / 2..]);
                if and {
                    self.and2(l, r)
                } else {
                    self.or2(l, r)
                }
            }
        }
    }

    /// Copy the gates of `c` (same variables) and return its output gate.
    pub fn embed(&mut self, c: &Circuit) -> usize {
        assert!(c.n() <= self.n);
        let mut map = Vec::with_capacity(c.gates().len());
        for g in c.gates() {
            let id = match g {
                Gate::Input(k) => self.input(*k),
                Gate::Const(v) => self.constant(*v),
                Gate::Apply(conn, ch) => self.apply(conn.clone(), ch.iter().map(|&j| map[j]).collect()),
            };
            map.push(id);
        }
        map[c.output()]
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gate(&self, i: usize) -> &Gate {
        &self.gates[i]
    }

    pub fn finish(self, output: usize) -> Circuit {
        Circuit::new(self.n, self.gates, output).expect("builder keeps gates well formed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xor_circuit() -> Circuit {
        // (x1 OR x2) AND NOT (x1 AND x2)
        let mut b = CircuitBuilder::tree(2);
        let x1 = b.input(0);
        let x2 = b.input(1);
        let o = b.or2(x1, x2);
        let a = b.and2(x1, x2);
        let na = b.not(a);
        let out = b.and2(o, na);
        b.finish(out)
    }

    #[test]
    fn xor_table_and_accounting() {
        let c = xor_circuit();
        assert_eq!(c.truth_table().to_hex(), "6");
        assert_eq!(c.size(), 4);
        assert_eq!(c.depth(), 3);
        assert!(c.evaluate(&[true, false]).unwrap());
    }

    #[test]
    fn constant_and_identity() {
        let c = Circuit::new(1, vec![Gate::Input(0)], 0).unwrap();
        assert!(c.evaluate(&[true]).unwrap());
        assert_eq!(c.size(), 0);
        let z = Circuit::new(2, vec![Gate::Const(false)], 0).unwrap();
        assert!((0..4).all(|x| !z.eval_index(x)));
        let one = Circuit::new(2, vec![Gate::Const(true)], 0).unwrap();
        assert_eq!(one.truth_table().to_hex(), "f");
        let x1 = Circuit::new(2, vec![Gate::Input(0)], 0).unwrap();
        assert_eq!(x1.truth_table().to_hex(), "a");
    }

    #[test]
    fn rejects_bad_arity_and_forward_reference() {
        let bad = Circuit::new(2, vec![Gate::Input(0), Gate::Apply(Connective::And(2), vec![0])], 1);
        assert!(matches!(bad, Err(Error::MalformedCircuit(_))));
        let fwd = Circuit::new(2, vec![Gate::Apply(Connective::Not, vec![1]), Gate::Input(0)], 0);
        assert!(fwd.is_err());
    }

    #[test]
    fn evaluate_rejects_wrong_length() {
        assert!(xor_circuit().evaluate(&[true]).is_err());
    }

    #[test]
    fn cone_keeps_only_the_subcircuit() {
        let c = xor_circuit();
        let sub = c.cone(3);
        assert_eq!(sub.size(), 1);
        assert_eq!(sub.truth_table().to_hex(), "8");
    }

    #[test]
    fn substitute_composes() {
        // XOR(x1 AND x2, NOT x1)
        let and = {
            let mut b = CircuitBuilder::tree(2);
            let (p, q) = (b.input(0), b.input(1));
            let o = b.and2(p, q);
            b.finish(o)
        };
        let not1 = {
            let mut b = CircuitBuilder::tree(2);
            let p = b.input(0);
            let o = b.not(p);
            b.finish(o)
        };
        let c = xor_circuit().substitute(2, &[and.clone(), not1.clone()]);
        let want = and.truth_table().xor(&not1.truth_table());
        assert_eq!(c.truth_table(), want);
    }
}
