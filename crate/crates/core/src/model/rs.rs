//! GF(2) polynomial approximation of AND/OR by products of seeded random
//! parities.

use super::{ApproxModel, MemberId, OpRule};
use crate::connective::Connective;
use crate::truth_table::TruthTable;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// OR_a(p) ~ 1 + prod_j (1 + sum_{i in S_j} p_i) with t random subsets S_j
/// drawn from a stream seeded by (seed, connective, inputs). AND is handled
/// through negated inputs. NOT and XOR are exact.
///
/// Degree closure: members are the polynomials of degree <= `degree`. If
/// the full product would exceed it, only the longest prefix of the t
/// parities whose product stays within the bound is used; a single parity
/// of members never exceeds it.
#[derive(Clone, Debug)]
pub struct RsRule {
    pub n: usize,
    pub t: usize,
    pub degree: usize,
    pub seed: u64,
}

pub(crate) fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn mix(seed: u64, words: &[u64]) -> u64 {
    words.iter().fold(splitmix(seed), |h, w| splitmix(h ^ w))
}

impl RsRule {
    /// The t subsets (as index lists into the sorted inputs) used for a key.
    pub fn sampled_sets(&self, conn: &Connective, ids: &[MemberId]) -> Vec<Vec<usize>> {
        let tag = match conn {
            Connective::And(_) => 1,
            _ => 2,
        };
        let mut words = vec![tag, ids.len() as u64];
        words.extend(ids.iter().map(|&i| i as u64));
        let mut rng = ChaCha8Rng::seed_from_u64(mix(self.seed, &words));
        (0..self.t)
            .map(|_| (0..ids.len()).filter(|_| rng.gen_bool(0.5)).collect())
            .collect()
    }

    fn approx_or(&self, inputs: &[TruthTable], sets: &[Vec<usize>]) -> TruthTable {
        let n = self.n;
        let mut prod = TruthTable::one(n);
        for (j, s) in sets.iter().enumerate() {
            let mut q = TruthTable::zero(n);
            for &i in s {
                q = q.xor(&inputs[i]);
            }
            let next = prod.and(&q.not());
            if j > 0 && next.degree() > self.degree {
                break;
            }
            prod = next;
        }
        prod.not()
    }
}

impl OpRule for RsRule {
    fn approximate(&self, conn: &Connective, inputs: &[TruthTable], ids: &[MemberId]) -> Option<TruthTable> {
        match conn {
            Connective::Not => Some(inputs[0].not()),
            Connective::Xor(_) => Some(inputs.iter().fold(TruthTable::zero(self.n), |a, b| a.xor(b))),
            Connective::Or(_) => Some(self.approx_or(inputs, &self.sampled_sets(conn, ids))),
            Connective::And(_) => {
                let neg: Vec<TruthTable> = inputs.iter().map(|p| p.not()).collect();
                Some(self.approx_or(&neg, &self.sampled_sets(conn, ids)).not())
            }
            Connective::Oracle(_) => None,
        }
    }

    fn describe(&self) -> String {
        format!("rs n={} t={} degree={} seed={}", self.n, self.t, self.degree, self.seed)
    }
}

/// Members: every polynomial of degree <= t, listed in numeric table order
/// when there are at most 2^16 of them, discovered lazily otherwise.
pub fn gen_rs_poly_model(n: usize, t: usize, seed: u64) -> ApproxModel {
    assert!(t >= 1, "degree budget must be at least 1");
    assert!(n <= 10, "polynomial models are limited to n <= 10");
    let degree = t.min(n.max(1));
    let monomials: Vec<usize> = (0..(1usize << n)).filter(|m| m.count_ones() as usize <= degree).collect();
    let (members, closed) = if monomials.len() <= 16 {
        let mut v: Vec<TruthTable> = (0..(1u64 << monomials.len()))
            .map(|b| {
                let mut coeffs = TruthTable::zero(n);
                for (k, &m) in monomials.iter().enumerate() {
                    if (b >> k) & 1 == 1 {
                        coeffs.set(m, true);
                    }
                }
                TruthTable::from_anf(&coeffs)
            })
            .collect();
        v.sort();
        (v, true)
    } else {
        let mut v = vec![TruthTable::zero(n), TruthTable::one(n)];
        v.extend((0..n).map(|i| TruthTable::var(n, i)));
        (v, false)
    };
    let rule = RsRule { n, t, degree, seed };
    let mut m = ApproxModel::from_members(n, &format!("gen:rs:{n}:{t}:{seed}"), members, closed)
        .with_rule(Arc::new(rule));
    m.neg_is_exact = true;
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negation_and_parity_exact() {
        let m = gen_rs_poly_model(3, 1, 7);
        let x1 = m.var_member(0).unwrap();
        let x2 = m.var_member(1).unwrap();
        let e = m.error_set(&Connective::Not, &[x1]).unwrap();
        assert!(e.delta.is_zero());
        let p = m.error_set(&Connective::Xor(2), &[x1, x2]).unwrap();
        assert!(p.delta.is_zero());
    }

    #[test]
    fn members_respect_degree_budget() {
        let m = gen_rs_poly_model(3, 2, 1);
        assert!(m.is_closed());
        // 1 + 3 + 3 monomials of degree <= 2
        assert_eq!(m.member_count(), 1 << 7);
        assert!(m.members().iter().all(|p| p.degree() <= 2));
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = gen_rs_poly_model(2, 1, 42);
        let b = gen_rs_poly_model(2, 1, 42);
        for x in 0..a.member_count() {
            for y in x..a.member_count() {
                let ea = a.op(&Connective::Or(2), &[x, y]).unwrap();
                let eb = b.op(&Connective::Or(2), &[x, y]).unwrap();
                assert_eq!(a.member(ea), b.member(eb));
            }
        }
    }
}
