use rand::Rng;

use super::{RateCache, WeightedIndex};
use crate::attraction::AttractionSpec;
use crate::error::{invalid, Result};
use crate::tree::GrowingTree;

/// Step-by-step discrete-time growth: each new vertex picks its parent with
/// probability proportional to `f(out-degree)`.
#[derive(Debug, Clone)]
pub struct DiscreteGrowth {
    rates: RateCache,
    tree: GrowingTree,
    weights: WeightedIndex,
}

impl DiscreteGrowth {
    /// Starts from the single vertex `v_1`.
    pub fn new(spec: &AttractionSpec) -> Result<Self> {
        Self::from_tree(spec, GrowingTree::new())
    }

    pub fn from_tree(spec: &AttractionSpec, tree: GrowingTree) -> Result<Self> {
        let mut rates = RateCache::new(spec)?;
        let mut weights = WeightedIndex::new();
        for v in 0..tree.len() {
            weights.push(rates.rate(tree.out_degree(v))?);
        }
        Ok(Self { rates, tree, weights })
    }

    /// Adds one vertex; returns its parent.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<usize> {
        let parent = self.weights.sample(rng);
        let k = self.tree.out_degree(parent);
        // Fetch both rates before mutating so an undefined degree leaves the
        // tree untouched.
        let grown = self.rates.rate(k + 1)?;
        let fresh = self.rates.rate(0)?;
        self.tree.attach(parent);
        self.weights.set(parent, grown);
        self.weights.push(fresh);
        Ok(parent)
    }

    pub fn tree(&self) -> &GrowingTree {
        &self.tree
    }

    pub fn into_tree(self) -> GrowingTree {
        self.tree
    }
}

/// Grows an `n`-vertex tree in discrete time.
pub fn grow_discrete<R: Rng + ?Sized>(spec: &AttractionSpec, n: usize, rng: &mut R) -> Result<GrowingTree> {
    if n == 0 {
        return invalid("n must be at least 1");
    }
    let mut g = DiscreteGrowth::new(spec)?;
    for _ in 1..n {
        g.step(rng)?;
    }
    Ok(g.into_tree())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attraction::TailRule;
    use crate::error::Error;
    use crate::seeds::trial_rng;

    #[test]
    fn two_vertices_always_attach_to_root() {
        let mut rng = trial_rng(3, 0);
        for _ in 0..50 {
            let t = grow_discrete(&AttractionSpec::Linear, 2, &mut rng).unwrap();
            assert_eq!(t.parent(1), Some(0));
        }
    }

    #[test]
    fn rejects_zero_and_invalid_specs() {
        let mut rng = trial_rng(0, 0);
        assert!(grow_discrete(&AttractionSpec::Uniform, 0, &mut rng).is_err());
        let bad = AttractionSpec::Table { values: vec![2.0, 1.0], tail: TailRule::ConstantLast, alpha: None };
        assert!(matches!(grow_discrete(&bad, 5, &mut rng), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn table_without_tail_eventually_fails() {
        let spec = AttractionSpec::Table { values: vec![1.0, 1.5], tail: TailRule::Reject, alpha: None };
        let mut rng = trial_rng(0, 0);
        assert!(matches!(grow_discrete(&spec, 100, &mut rng), Err(Error::UndefinedDegree(_))));
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = AttractionSpec::alpha_sublinear(0.5).unwrap();
        let a = grow_discrete(&spec, 500, &mut trial_rng(11, 2)).unwrap();
        let b = grow_discrete(&spec, 500, &mut trial_rng(11, 2)).unwrap();
        assert_eq!(a, b);
        assert_eq!((0..500).map(|v| a.out_degree(v)).sum::<usize>(), 499);
    }
}
