use crate::error::{Error, Result};
use std::fmt;

pub const MAX_VARS: usize = 12;

/// A Boolean function on `n` variables stored as 2^n bits.
///
/// Position `x` holds f(x) where x = sum of x_i * 2^(i-1), so x_1 is the
/// least significant bit. Variables are 0-based in the API.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    n: u8,
    words: Vec<u64>,
}

fn word_count(n: usize) -> usize {
    if n <= 6 {
        1
    } else {
        1 << (n - 6)
    }
}

fn tail_mask(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

// Bit pattern of variable i inside one 64-bit word, for i < 6.
const VAR_WORDS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

impl TruthTable {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_VARS, "at most {MAX_VARS} variables");
        TruthTable { n: n as u8, words: vec![0; word_count(n)] }
    }

    pub fn one(n: usize) -> Self {
        Self::zero(n).not()
    }

    pub fn constant(n: usize, b: bool) -> Self {
        if b {
            Self::one(n)
        } else {
            Self::zero(n)
        }
    }

    /// The projection x_{i+1}.
    pub fn var(n: usize, i: usize) -> Self {
        assert!(i < n, "variable {i} out of range for n={n}");
        let mut t = Self::zero(n);
        if i < 6 {
            let m = tail_mask(n);
            for w in &mut t.words {
                *w = VAR_WORDS[i] & m;
            }
        } else {
            let stride = 1 << (i - 6);
            for (k, w) in t.words.iter_mut().enumerate() {
                if (k / stride) % 2 == 1 {
                    *w = u64::MAX;
                }
            }
        }
        t
    }

    pub fn literal(n: usize, i: usize, positive: bool) -> Self {
        let v = Self::var(n, i);
        if positive {
            v
        } else {
            v.not()
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut t = Self::zero(n);
        for x in 0..(1usize << n) {
            if f(x) {
                t.set(x, true);
            }
        }
        t
    }

    /// Table for n <= 6 from the low 2^n bits of `bits`.
    pub fn from_u64(n: usize, bits: u64) -> Self {
        assert!(n <= 6);
        TruthTable { n: n as u8, words: vec![bits & tail_mask(n)] }
    }

    /// The low 64 bits; the whole table when n <= 6.
    pub fn low_u64(&self) -> u64 {
        self.words[0]
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, x: usize) -> bool {
        (self.words[x >> 6] >> (x & 63)) & 1 == 1
    }

    pub fn set(&mut self, x: usize, b: bool) {
        let bit = 1u64 << (x & 63);
        if b {
            self.words[x >> 6] |= bit;
        } else {
            self.words[x >> 6] &= !bit;
        }
    }

    fn zip(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.n, other.n, "variable count mismatch");
        TruthTable {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| op(*a, *b)).collect(),
        }
    }

    pub fn not(&self) -> Self {
        let m = tail_mask(self.n());
        TruthTable { n: self.n, words: self.words.iter().map(|w| !w & m).collect() }
    }

    pub fn and(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    pub fn xor(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a ^ b)
    }

    /// Set difference self \ other.
    pub fn minus(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & !b)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_one(&self) -> bool {
        self.not().is_zero()
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
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

    pub fn first_one(&self) -> Option<usize> {
        self.ones().next()
    }

    /// g with variable i fixed to `a`, still as a function of n variables.
    pub fn fix(&self, i: usize, a: bool) -> Self {
        let bit = 1usize << i;
        Self::from_fn(self.n(), |x| self.get(if a { x | bit } else { x & !bit }))
    }

    pub fn depends_on(&self, i: usize) -> bool {
        let bit = 1usize << i;
        (0..self.len()).any(|x| x & bit == 0 && self.get(x) != self.get(x | bit))
    }

    /// Indices i such that flipping x_i changes f somewhere.
    pub fn essential_vars(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.depends_on(i)).collect()
    }

    /// The same function viewed over `m >= n` variables.
    pub fn extend(&self, m: usize) -> Self {
        assert!(m >= self.n());
        let mask = self.len() - 1;
        Self::from_fn(m, |x| self.get(x & mask))
    }

    /// Hex digits of the table, most significant first, ceil(2^n/4) digits.
    pub fn to_hex(&self) -> String {
        let digits = self.len().div_ceil(4);
        let mut s = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let nib = (self.words[(d * 4) >> 6] >> ((d * 4) & 63)) & 0xF;
            s.push(char::from_digit(nib as u32, 16).unwrap());
        }
        s
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        if n > MAX_VARS {
            return Err(Error::Precondition(format!("n={n} exceeds {MAX_VARS}")));
        }
        let mut t = Self::zero(n);
        let digits: Vec<char> = hex.chars().collect();
        if digits.is_empty() {
            return Err(Error::parse(1, 1, "empty hex string"));
        }
        for (pos, c) in digits.iter().rev().enumerate() {
            let v = c
                .to_digit(16)
                .ok_or_else(|| Error::parse(1, digits.len() - pos, format!("bad hex digit {c:?}")))?;
            for b in 0..4 {
                if (v >> b) & 1 == 1 {
                    let x = pos * 4 + b;
                    if x >= t.len() {
                        return Err(Error::parse(
                            1,
                            digits.len() - pos,
                            format!("bit {x} is outside a table of {} bits", t.len()),
                        ));
                    }
                    t.set(x, true);
                }
            }
        }
        Ok(t)
    }
}

impl TruthTable {
    /// Algebraic normal form over GF(2): bit m of the result is the
    /// coefficient of the monomial whose variables are the set bits of m.
    pub fn anf(&self) -> TruthTable {
        let mut a = self.clone();
        for i in 0..self.n() {
            let bit = 1usize << i;
            for x in 0..self.len() {
                if x & bit != 0 && a.get(x ^ bit) {
                    let v = a.get(x);
                    a.set(x, !v);
                }
            }
        }
        a
    }

    /// Inverse of `anf` (the transform is an involution).
    pub fn from_anf(coeffs: &TruthTable) -> TruthTable {
        coeffs.anf()
    }

    /// Degree of the GF(2) polynomial computing this function; 0 for constants.
    pub fn degree(&self) -> usize {
        self.anf().ones().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tt {} {}", self.n, self.to_hex())
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All 2^(2^n) functions on n variables, in numeric order of their tables.
pub fn all_functions(n: usize) -> Vec<TruthTable> {
    assert!(n <= 4, "all_functions is only sensible for n <= 4");
    (0..(1u64 << (1 << n))).map(|b| TruthTable::from_u64(n, b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_hex() {
        let x = TruthTable::var(2, 0).xor(&TruthTable::var(2, 1));
        assert_eq!(x.to_hex(), "6");
        assert_eq!(TruthTable::from_hex(2, "6").unwrap(), x);
    }

    #[test]
    fn var_words_match_pointwise() {
        for n in [1, 3, 6, 8] {
            for i in 0..n {
                let v = TruthTable::var(n, i);
                for x in 0..(1 << n) {
                    assert_eq!(v.get(x), (x >> i) & 1 == 1);
                }
            }
        }
    }

    #[test]
    fn essential_examples() {
        assert!(TruthTable::zero(3).essential_vars().is_empty());
        assert_eq!(TruthTable::var(3, 1).essential_vars(), vec![1]);
        let x3 = TruthTable::from_fn(3, |x| (x as u32).count_ones() % 2 == 1);
        assert_eq!(x3.essential_vars(), vec![0, 1, 2]);
    }

    #[test]
    fn hex_rejects_overflow() {
        assert!(TruthTable::from_hex(1, "4").is_err());
        assert_eq!(TruthTable::from_hex(3, "96").unwrap().to_hex(), "96");
    }

    #[test]
    fn anf_roundtrip_and_degree() {
        let and = TruthTable::var(3, 0).and(&TruthTable::var(3, 2));
        assert_eq!(and.degree(), 2);
        assert_eq!(TruthTable::from_anf(&and.anf()), and);
        let xor = TruthTable::var(3, 0).xor(&TruthTable::var(3, 1)).not();
        assert_eq!(xor.degree(), 1);
        assert_eq!(TruthTable::zero(3).degree(), 0);
    }

    #[test]
    fn not_masks_tail() {
        assert_eq!(TruthTable::zero(2).not().count_ones(), 4);
        assert_eq!(TruthTable::one(8).count_ones(), 256);
    }
}
