use crate::circuit::{Circuit, CircuitBuilder};
use crate::truth_table::TruthTable;
use std::fmt;

/// Split of m abstract variables into consecutive blocks, listed from the
/// bottom of the branching recursion (x_1 side) to the top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub m: usize,
    pub blocks: Vec<usize>,
}

impl Frame {
    /// Blocks of width u (clamped to [1, m]) from the top; the bottom block
    /// takes the remainder m mod u, or u when that is 0.
    pub fn with_width(m: usize, u: usize) -> Frame {
        if m == 0 {
            return Frame { m, blocks: vec![] };
        }
        let u = u.clamp(1, m);
        let w = if m % u == 0 { u } else { m % u };
        let mut blocks = vec![w];
        while blocks.iter().sum::<usize>() < m {
            blocks.push(u);
        }
        Frame { m, blocks }
    }

    /// One variable per level.
    pub fn general(m: usize) -> Frame {
        Frame::with_width(m, 1)
    }

    /// Width ⌈m/d⌉, so at most d levels.
    pub fn depth(m: usize, d: usize) -> Frame {
        assert!(d >= 1);
        Frame::with_width(m, m.div_ceil(d))
    }

    pub fn levels(&self) -> usize {
        self.blocks.len()
    }

    /// Number of variables below level `l` (levels are 1-based).
    pub fn prefix(&self, l: usize) -> usize {
        self.blocks[..l].iter().sum()
    }

    /// Widest block.
    pub fn width(&self) -> usize {
        self.blocks.iter().copied().max().unwrap_or(0)
    }

    /// Types: three for the top combination plus 2^r + 1 per block of width r.
    pub fn type_count(&self) -> usize {
        3 + self.blocks.iter().map(|&r| (1usize << r) + 1).sum::<usize>()
    }

    /// Canonical positions visited for one input point.
    pub fn positions_per_point(&self) -> usize {
        3 + 4 * self.blocks.iter().map(|&r| (1usize << r) + 1).sum::<usize>()
    }

    /// Every type, top ones first.
    pub fn types(&self) -> Vec<TypeIndex> {
        let mut v = vec![
            TypeIndex { level: Level::Xor, t: Branch::Or },
            TypeIndex { level: Level::Xor, t: Branch::Bits(0) },
            TypeIndex { level: Level::Xor, t: Branch::Bits(1) },
        ];
        for (i, &r) in self.blocks.iter().enumerate() {
            v.push(TypeIndex { level: Level::Block(i + 1), t: Branch::Or });
            for z in (0..1usize << r).rev() {
                v.push(TypeIndex { level: Level::Block(i + 1), t: Branch::Bits(z) });
            }
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    /// The top combination of the four subcircuits.
    Xor,
    /// Branching level, 1-based from the bottom.
    Block(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Or,
    /// An AND gate; for blocks z is the assignment to the block's variables,
    /// at the top 0 and 1 pick the first and second conjunction.
    Bits(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeIndex {
    pub level: Level,
    pub t: Branch,
}

impl fmt::Display for TypeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.level {
            Level::Xor => write!(f, "⊕,")?,
            Level::Block(l) => write!(f, "{l},")?,
        }
        match self.t {
            Branch::Or => write!(f, "∨"),
            Branch::Bits(z) => write!(f, "{z}"),
        }
    }
}

/// h^z: h with its top u variables fixed to z, on the remaining ones.
pub fn cofactor(h: &TruthTable, u: usize, z: usize) -> TruthTable {
    let low = h.n() - u;
    TruthTable::from_fn(low, |y| h.get(y | (z << low)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arm {
    pub z: usize,
    pub and_gate: usize,
    pub child: usize,
}

/// A node of the recursion: at level 0 a constant gate, above it an OR of
/// one conjunction per assignment z, in decreasing order of z.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CNode {
    pub level: usize,
    pub gate: usize,
    pub arms: Vec<Arm>,
}

struct Build<'a> {
    b: CircuitBuilder,
    frame: &'a Frame,
    nodes: Vec<CNode>,
}

impl Build<'_> {
    fn c(&mut self, h: &TruthTable, level: usize) -> usize {
        if level == 0 {
            let gate = self.b.constant(h.get(0));
            self.nodes.push(CNode { level, gate, arms: vec![] });
            return self.nodes.len() - 1;
        }
        let u = self.frame.blocks[level - 1];
        let low = self.frame.prefix(level - 1);
        let mut arms = Vec::with_capacity(1 << u);
        for z in (0..1usize << u).rev() {
            let child = self.c(&cofactor(h, u, z), level - 1);
            let mut ch = vec![self.nodes[child].gate];
            for i in 0..u {
                ch.push(self.b.literal(low + i, (z >> i) & 1 == 1));
            }
            let and_gate = self.b.and_n(ch);
            arms.push(Arm { z, and_gate, child });
        }
        let gate = self.b.or_n(arms.iter().map(|a| a.and_gate).collect());
        self.nodes.push(CNode { level, gate, arms });
        self.nodes.len() - 1
    }
}

/// C_h for a fixed frame.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchingDecomposition {
    pub h: TruthTable,
    pub frame: Frame,
    pub circuit: Circuit,
    pub nodes: Vec<CNode>,
    pub root: usize,
}

pub fn build_c_h_frame(h: &TruthTable, frame: &Frame) -> BranchingDecomposition {
    assert_eq!(h.n(), frame.m);
    let mut st = Build { b: CircuitBuilder::tree(frame.m), frame, nodes: vec![] };
    let root = st.c(h, frame.levels());
    let out = st.nodes[root].gate;
    let nodes = st.nodes;
    BranchingDecomposition { h: h.clone(), frame: frame.clone(), circuit: st.b.finish(out), nodes, root }
}

/// C_h with branching width u (clamped to the number of variables).
pub fn build_c_h(h: &TruthTable, u: usize) -> BranchingDecomposition {
    build_c_h_frame(h, &Frame::with_width(h.n(), u))
}

/// D_g = (C_{f⊕g} ∧ C_{¬g}) ∨ (C_{¬(f⊕g)} ∧ C_g).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgCircuit {
    pub f: TruthTable,
    pub g: TruthTable,
    pub frame: Frame,
    pub circuit: Circuit,
    pub nodes: Vec<CNode>,
    /// Roots of C_{f⊕g}, C_{¬g}, C_{¬(f⊕g)}, C_g.
    pub parts: [usize; 4],
    /// Output OR, first AND, second AND.
    pub top: [usize; 3],
}

pub fn build_d_g_frame(f: &TruthTable, g: &TruthTable, frame: &Frame) -> DgCircuit {
    assert_eq!(f.n(), g.n());
    assert_eq!(f.n(), frame.m);
    let fg = f.xor(g);
    let mut st = Build { b: CircuitBuilder::tree(frame.m), frame, nodes: vec![] };
    let p0 = st.c(&fg, frame.levels());
    let p1 = st.c(&g.not(), frame.levels());
    let a1 = st.b.and2(st.nodes[p0].gate, st.nodes[p1].gate);
    let p2 = st.c(&fg.not(), frame.levels());
    let p3 = st.c(g, frame.levels());
    let a2 = st.b.and2(st.nodes[p2].gate, st.nodes[p3].gate);
    let out = st.b.or2(a1, a2);
    let nodes = st.nodes;
    DgCircuit {
        f: f.clone(),
        g: g.clone(),
        frame: frame.clone(),
        circuit: st.b.finish(out),
        nodes,
        parts: [p0, p1, p2, p3],
        top: [out, a1, a2],
    }
}

pub fn build_d_g(f: &TruthTable, g: &TruthTable, u: usize) -> DgCircuit {
    build_d_g_frame(f, g, &Frame::with_width(f.n(), u))
}

impl DgCircuit {
    /// The type of the gate at a position, if it is one.
    pub fn gate_type(&self, gate: usize) -> Option<TypeIndex> {
        if let Some(i) = self.top.iter().position(|&t| t == gate) {
            let t = if i == 0 { Branch::Or } else { Branch::Bits(i - 1) };
            return Some(TypeIndex { level: Level::Xor, t });
        }
        for node in &self.nodes {
            if node.level == 0 {
                continue;
            }
            if node.gate == gate {
                return Some(TypeIndex { level: Level::Block(node.level), t: Branch::Or });
            }
            if let Some(a) = node.arms.iter().find(|a| a.and_gate == gate) {
                return Some(TypeIndex { level: Level::Block(node.level), t: Branch::Bits(a.z) });
            }
        }
        None
    }

    /// The positions for the point a: the top three gates and, in each
    /// subcircuit, every OR and AND on the path selected by a.
    pub fn canonical_positions(&self, a: usize) -> Vec<usize> {
        let mut v = self.top.to_vec();
        for &root in &self.parts {
            let mut node = &self.nodes[root];
            while node.level > 0 {
                v.push(node.gate);
                let low = self.frame.prefix(node.level - 1);
                let u = self.frame.blocks[node.level - 1];
                let za = (a >> low) & ((1 << u) - 1);
                let mut next = None;
                for arm in &node.arms {
                    v.push(arm.and_gate);
                    if arm.z == za {
                        next = Some(arm.child);
                    }
                }
                node = &self.nodes[next.expect("every z has an arm")];
            }
        }
        v
    }
}
