use super::rho::{build_pool, Pool};
use crate::error::{Error, Result};
use crate::model::{ApproxModel, MemberId, OpKey};
use crate::truth_table::TruthTable;
use num_rational::Ratio;
use num_traits::{One, Zero};

pub type Q = Ratio<i128>;

/// A distribution on {0,1}^n with exact rational weights summing to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputDistribution {
    n: usize,
    weights: Vec<Q>,
}

impl InputDistribution {
    pub fn uniform(n: usize) -> Self {
        let w = Q::new(1, 1i128 << n);
        InputDistribution { n, weights: vec![w; 1 << n] }
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(n: usize, weights: Vec<Q>) -> Result<Self> {
        if weights.len() != 1 << n {
            return Err(Error::Precondition(format!("{} weights for {} points", weights.len(), 1usize << n)));
        }
        if weights.iter().any(|w| *w < Q::zero()) {
            return Err(Error::Precondition("negative weight".into()));
        }
        let total: Q = weights.iter().sum();
        if total.is_zero() {
            return Err(Error::Precondition("weights sum to 0".into()));
        }
        Ok(InputDistribution { n, weights: weights.into_iter().map(|w| w / total).collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, x: usize) -> Q {
        self.weights[x]
    }

    pub fn prob(&self, set: &TruthTable) -> Q {
        set.ones().map(|x| self.weights[x]).sum()
    }

    pub fn is_normalized(&self) -> bool {
        self.weights.iter().sum::<Q>().is_one()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbRho {
    pub value: Q,
    /// First member attaining the minimum.
    pub g: MemberId,
    /// max over the pool of Pr[x ∈ δ].
    pub d: Q,
    /// A tuple attaining d.
    pub d_tuple: OpKey,
}

/// min_g Pr[f(x) ≠ g(x)] / d with d the largest error probability of a
/// pool tuple. Candidates are all members.
pub fn rho_probabilistic(
    f: &TruthTable,
    model: &ApproxModel,
    dist: &InputDistribution,
    pool: &Pool,
) -> Result<ProbRho> {
    if dist.n() != f.n() || f.n() != model.n() {
        return Err(Error::Precondition("f, model and distribution disagree on n".into()));
    }
    let (pool, _) = build_pool(model, pool, None)?;
    let mut d = Q::zero();
    let mut d_tuple = None;
    for e in &pool {
        let p = dist.prob(&e.delta);
        if p > d {
            d = p;
            d_tuple = Some(e.key.clone());
        }
    }
    let Some(d_tuple) = d_tuple else {
        return Err(Error::DegenerateModel("every error set in the pool has probability 0".into()));
    };
    let mut best: Option<(Q, MemberId)> = None;
    for g in 0..model.member_count() {
        let p = dist.prob(&f.xor(&model.member(g)));
        if best.as_ref().map_or(true, |(b, _)| p < *b) {
            best = Some((p, g));
        }
    }
    let (p, g) = best.expect("models contain the constants");
    Ok(ProbRho { value: p / d, g, d, d_tuple })
}
