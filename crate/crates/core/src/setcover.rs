//! Exact minimum set cover by branch and bound, returning the
//! lexicographically least optimal index list.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bits(Vec<u64>);

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64).max(1)])
    }

    pub fn from_indices(len: usize, it: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Bits::new(len);
        for i in it {
            b.insert(i);
        }
        b
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i >> 6] |= 1 << (i & 63);
    }

    pub fn contains(&self, i: usize) -> bool {
        (self.0[i >> 6] >> (i & 63)) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    pub fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }

    pub fn minus(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & !b).collect())
    }

    pub fn or_assign(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a |= b;
        }
    }

    pub fn intersection_count(&self, o: &Bits) -> usize {
        self.0.iter().zip(&o.0).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn is_subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + b)
                }
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cover {
    /// Indices into the set list, ascending.
    Optimal(Vec<usize>),
    Infeasible,
    /// The minimum exceeds the given cap.
    ExceedsCap,
}

/// Cover `target` (elements 0..len) with the fewest sets.
pub fn min_cover(len: usize, target: &Bits, sets: &[Bits], cap: Option<usize>) -> Cover {
    if target.is_empty() {
        return Cover::Optimal(vec![]);
    }
    // Sets restricted to the target; duplicates keep their lowest index,
    // which is the one any lexicographically least cover would use.
    let mut seen = std::collections::HashMap::new();
    let mut cand: Vec<(usize, Bits)> = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        let r = s.and(target);
        if !r.is_empty() && !seen.contains_key(&r) {
            seen.insert(r.clone(), i);
            cand.push((i, r));
        }
    }
    let mut union = Bits::new(len);
    for (_, s) in &cand {
        union.or_assign(s);
    }
    if !target.is_subset_of(&union) {
        return Cover::Infeasible;
    }
    let greedy = greedy_cover(target, &cand);
    let mut solver = Solver { len, cand: &cand, best: greedy.len(), best_set: greedy };
    solver.optimum(target, &mut Vec::new());
    let k = solver.best;
    if let Some(c) = cap {
        if k > c {
            return Cover::ExceedsCap;
        }
    }
    let mut out = Vec::new();
    let found = lex_least(target, &cand, k, 0, &mut out, len);
    debug_assert!(found);
    Cover::Optimal(out.iter().map(|&p| cand[p].0).collect())
}

/// Largest-gain greedy cover, ties to the lowest index. An upper bound on
/// the minimum within a factor ln(len)+1.
pub fn greedy_set_cover(len: usize, target: &Bits, sets: &[Bits]) -> Cover {
    let cand: Vec<(usize, Bits)> = sets.iter().enumerate().map(|(i, s)| (i, s.and(target))).collect();
    let mut union = Bits::new(len);
    for (_, s) in &cand {
        union.or_assign(s);
    }
    if !target.is_subset_of(&union) {
        return Cover::Infeasible;
    }
    let mut idx: Vec<usize> = greedy_cover(target, &cand).into_iter().map(|p| cand[p].0).collect();
    idx.sort_unstable();
    Cover::Optimal(idx)
}

fn greedy_cover(target: &Bits, cand: &[(usize, Bits)]) -> Vec<usize> {
    let mut left = target.clone();
    let mut chosen = Vec::new();
    while !left.is_empty() {
        let (p, _) = cand
            .iter()
            .enumerate()
            .max_by_key(|(p, (_, s))| (s.intersection_count(&left), std::cmp::Reverse(*p)))
            .unwrap();
        chosen.push(p);
        left = left.minus(&cand[p].1);
    }
    chosen
}

struct Solver<'a> {
    len: usize,
    cand: &'a [(usize, Bits)],
    best: usize,
    best_set: Vec<usize>,
}

impl Solver<'_> {
    fn lower_bound(&self, left: &Bits) -> usize {
        let max = self.cand.iter().map(|(_, s)| s.intersection_count(left)).max().unwrap_or(0);
        if max == 0 {
            usize::MAX / 2
        } else {
            left.count().div_ceil(max)
        }
    }

    fn optimum(&mut self, left: &Bits, chosen: &mut Vec<usize>) {
        if left.is_empty() {
            if chosen.len() < self.best {
                self.best = chosen.len();
                self.best_set = chosen.clone();
            }
            return;
        }
        if chosen.len() + self.lower_bound(left) >= self.best {
            return;
        }
        // Branch on the element with the fewest covering sets.
        let mut pick = None;
        let mut fewest = usize::MAX;
        for e in left.iter() {
            let c = self.cand.iter().filter(|(_, s)| s.contains(e)).count();
            if c < fewest {
                fewest = c;
                pick = Some(e);
            }
        }
        let e = pick.unwrap();
        let mut opts: Vec<usize> = (0..self.cand.len()).filter(|&p| self.cand[p].1.contains(e)).collect();
        opts.sort_by_key(|&p| std::cmp::Reverse(self.cand[p].1.intersection_count(left)));
        for p in opts {
            chosen.push(p);
            let next = left.minus(&self.cand[p].1);
            self.optimum(&next, chosen);
            chosen.pop();
        }
        let _ = self.len;
    }
}

fn lex_least(left: &Bits, cand: &[(usize, Bits)], k: usize, from: usize, out: &mut Vec<usize>, len: usize) -> bool {
    if left.is_empty() {
        return true;
    }
    if out.len() == k {
        return false;
    }
    let slots = k - out.len();
    let rest = &cand[from..];
    let mut reach = Bits::new(len);
    for (_, s) in rest {
        reach.or_assign(s);
    }
    if !left.is_subset_of(&reach) {
        return false;
    }
    let max = rest.iter().map(|(_, s)| s.intersection_count(left)).max().unwrap_or(0);
    if max == 0 || left.count().div_ceil(max) > slots {
        return false;
    }
    for p in from..cand.len() {
        if !cand[p].1.intersects_bits(left) {
            continue;
        }
        out.push(p);
        if lex_least(&left.minus(&cand[p].1), cand, k, p + 1, out, len) {
            return true;
        }
        out.pop();
    }
    false
}

impl Bits {
    fn intersects_bits(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).any(|(a, b)| a & b != 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(len: usize, v: &[usize]) -> Bits {
        Bits::from_indices(len, v.iter().copied())
    }

    #[test]
    fn picks_lexicographically_least_minimum() {
        let sets = vec![b(4, &[0]), b(4, &[0, 1]), b(4, &[2, 3]), b(4, &[1, 2, 3]), b(4, &[0, 1])];
        let t = b(4, &[0, 1, 2, 3]);
        assert_eq!(min_cover(4, &t, &sets, None), Cover::Optimal(vec![0, 3]));
    }

    #[test]
    fn infeasible_and_cap() {
        let sets = vec![b(3, &[0]), b(3, &[1])];
        assert_eq!(min_cover(3, &b(3, &[0, 2]), &sets, None), Cover::Infeasible);
        assert_eq!(min_cover(3, &b(3, &[0, 1]), &sets, Some(1)), Cover::ExceedsCap);
        assert_eq!(min_cover(3, &b(3, &[]), &sets, Some(0)), Cover::Optimal(vec![]));
    }
}
