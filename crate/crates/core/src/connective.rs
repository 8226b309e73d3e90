use crate::truth_table::TruthTable;
use std::fmt;

/// A gate type. `Oracle` gates carry an arbitrary truth function and read
/// their children in order; all other connectives are commutative.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Connective {
    Not,
    And(usize),
    Or(usize),
    Xor(usize),
    Oracle(TruthTable),
}

impl Connective {
    pub fn name(&self) -> &'static str {
        match self {
            Connective::Not => "NOT",
            Connective::And(_) => "AND",
            Connective::Or(_) => "OR",
            Connective::Xor(_) => "XOR",
            Connective::Oracle(_) => "ORACLE",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Connective::Not => 1,
            Connective::And(a) | Connective::Or(a) | Connective::Xor(a) => *a,
            Connective::Oracle(t) => t.n(),
        }
    }

    pub fn commutative(&self) -> bool {
        !matches!(self, Connective::Oracle(_))
    }

    pub fn is_oracle(&self) -> bool {
        matches!(self, Connective::Oracle(_))
    }

    /// Build from a name and arity as written in text formats.
    pub fn from_name(name: &str, arity: usize) -> Option<Self> {
        match name {
            "NOT" if arity == 1 => Some(Connective::Not),
            "AND" if arity >= 1 => Some(Connective::And(arity)),
            "OR" if arity >= 1 => Some(Connective::Or(arity)),
            "XOR" if arity >= 1 => Some(Connective::Xor(arity)),
            _ => None,
        }
    }

    pub fn apply_bits(&self, v: &[bool]) -> bool {
        debug_assert_eq!(v.len(), self.arity());
        match self {
            Connective::Not => !v[0],
            Connective::And(_) => v.iter().all(|b| *b),
            Connective::Or(_) => v.iter().any(|b| *b),
            Connective::Xor(_) => v.iter().filter(|b| **b).count() % 2 == 1,
            Connective::Oracle(t) => {
                let x = v.iter().enumerate().fold(0usize, |acc, (i, b)| acc | ((*b as usize) << i));
                t.get(x)
            }
        }
    }

    /// Apply pointwise to tables of equal variable count.
    pub fn apply(&self, args: &[&TruthTable]) -> TruthTable {
        assert_eq!(args.len(), self.arity(), "arity mismatch for {}", self.name());
        match self {
            Connective::Not => args[0].not(),
            Connective::And(_) => fold(args, |a, b| a.and(b)),
            Connective::Or(_) => fold(args, |a, b| a.or(b)),
            Connective::Xor(_) => fold(args, |a, b| a.xor(b)),
            Connective::Oracle(_) => {
                let n = args[0].n();
                let mut v = vec![false; args.len()];
                TruthTable::from_fn(n, |x| {
                    for (k, a) in args.iter().enumerate() {
                        v[k] = a.get(x);
                    }
                    self.apply_bits(&v)
                })
            }
        }
    }

    /// The connective's own truth function on `arity` variables.
    pub fn semantics(&self) -> TruthTable {
        let m = self.arity();
        let mut v = vec![false; m];
        TruthTable::from_fn(m, |x| {
            for (i, b) in v.iter_mut().enumerate() {
                *b = (x >> i) & 1 == 1;
            }
            self.apply_bits(&v)
        })
    }

    /// Exhaustive check that the semantics ignore input order (m <= 8).
    pub fn is_permutation_invariant(&self) -> bool {
        let m = self.arity();
        assert!(m <= 8);
        let s = self.semantics();
        (0..(1usize << m)).all(|x| {
            (0..m.saturating_sub(1)).all(|i| {
                let (a, b) = ((x >> i) & 1, (x >> (i + 1)) & 1);
                let y = x & !(3 << i) | (b << i) | (a << (i + 1));
                s.get(x) == s.get(y)
            })
        })
    }
}

fn fold(args: &[&TruthTable], op: impl Fn(&TruthTable, &TruthTable) -> TruthTable) -> TruthTable {
    let mut acc = args[0].clone();
    for a in &args[1..] {
        acc = op(&acc, a);
    }
    acc
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Connective::Oracle(t) => write!(f, "ORACLE[{t}]"),
            c => write!(f, "{}{}", c.name(), c.arity()),
        }
    }
}

/// {NOT, AND2, OR2}.
pub fn standard_basis() -> Vec<Connective> {
    vec![Connective::Not, Connective::And(2), Connective::Or(2)]
}

/// NOT plus AND_a and OR_a for 2 <= a <= max_arity.
pub fn unbounded_basis(max_arity: usize) -> Vec<Connective> {
    let mut b = vec![Connective::Not];
    for a in 2..=max_arity {
        b.push(Connective::And(a));
        b.push(Connective::Or(a));
    }
    b
}

pub const DEFAULT_MAX_ARITY: usize = 16;
