//! Exact two-stage draws: a cardinality from `q`, a subset of that size with
//! probability proportional to `prod_{i in I} a_i`, then the slab values.

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::SubsetPosterior;
use crate::error::{Error, Result};
use crate::types::{IndexSet, Observation};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorDraw {
    pub subset: IndexSet,
    /// Zero off `subset`.
    pub value: Vec<f64>,
}

pub struct PosteriorSampler<'a> {
    post: &'a SubsetPosterior,
    x: &'a Observation,
    cardinality: WeightedIndex<f64>,
}

impl<'a> PosteriorSampler<'a> {
    pub(super) fn new(post: &'a SubsetPosterior, x: &'a Observation) -> Result<Self> {
        post.check_matches(x)?;
        let cardinality = WeightedIndex::new(&post.cardinality_posterior)
            .map_err(|e| Error::Numeric(format!("cardinality posterior: {e}")))?;
        Ok(Self { post, x, cardinality })
    }

    pub fn draw_cardinality<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.cardinality.sample(rng)
    }

    /// Size-`k` subset with probability `prod_{i in I} a_i / e_k(a)`.
    ///
    /// Walks the coordinates in order; with `r` slots left at coordinate `i`
    /// it is included with probability `a_i e_{r-1}(a_{>i}) / e_r(a_{>=i})`.
    pub fn draw_subset_of_size<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> IndexSet {
        let n = self.post.n();
        let table = self.post.suffix();
        let log_a = &self.post.log_a;
        let mut chosen = Vec::with_capacity(k);
        let mut remaining = k;
        for i in 0..n {
            if remaining == 0 {
                break;
            }
            if remaining == n - i {
                chosen.extend(i..n);
                break;
            }
            let log_p = log_a[i] + table.get(i + 1, remaining - 1) - table.get(i, remaining);
            if rng.random::<f64>() < log_p.exp() {
                chosen.push(i);
                remaining -= 1;
            }
        }
        IndexSet::from_sorted(chosen)
    }

    pub fn draw_subset<R: Rng + ?Sized>(&self, rng: &mut R) -> IndexSet {
        let k = self.draw_cardinality(rng);
        self.draw_subset_of_size(k, rng)
    }

    /// A full draw: subset, then `N(X_i, sigma^2 K/(K+1))` on it and 0 elsewhere.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> PosteriorDraw {
        let subset = self.draw_subset(rng);
        let sd = self.post.conditional_sd[subset.len()];
        let mut value = vec![0.0; self.post.n()];
        for i in subset.iter() {
            let z: f64 = rng.sample(StandardNormal);
            value[i] = self.x.x()[i] + sd * z;
        }
        PosteriorDraw { subset, value }
    }
}

#[cfg(test)]
mod tests {
    use super::super::build;
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn dirac_component_is_exact() {
        let x = Observation::new(vec![0.5, 3.0, -2.2, 0.0, 4.4, -0.1], 1.0).unwrap();
        let post = build(&x, 0.7).unwrap();
        for d in post.sample(&x, 3, 500).unwrap() {
            for (i, v) in d.value.iter().enumerate() {
                if !d.subset.contains(i) {
                    assert_eq!(*v, 0.0);
                }
            }
        }
    }

    #[test]
    fn fixed_size_subsets_have_right_size() {
        let x = Observation::new(vec![1.0, 2.0, 0.1, -3.0, 0.7], 1.0).unwrap();
        let post = build(&x, 0.7).unwrap();
        let sampler = post.sampler(&x).unwrap();
        let mut rng = stream_rng(1, &[]);
        for k in 0..=5 {
            for _ in 0..50 {
                assert_eq!(sampler.draw_subset_of_size(k, &mut rng).len(), k);
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let x = Observation::new(vec![1.0, 2.0, 0.1, -3.0, 0.7], 1.0).unwrap();
        let post = build(&x, 0.7).unwrap();
        assert_eq!(post.sample(&x, 9, 20).unwrap(), post.sample(&x, 9, 20).unwrap());
    }

    #[test]
    fn null_data_mostly_empty_draws() {
        let x = Observation::new(vec![0.0; 500], 1.0).unwrap();
        let post = build(&x, 0.7).unwrap();
        // 1 / (1 + 0.0869 + 0.0200 + ...): the empty set carries about 90% of the mass.
        let q0 = post.cardinality_posterior[0];
        assert!((q0 - 0.8966).abs() < 1e-4, "q0 = {q0}");
        let draws = post.sample(&x, 17, 20_000).unwrap();
        let empty = draws.iter().filter(|d| d.subset.is_empty()).count() as f64 / 20_000.0;
        let se = (q0 * (1.0 - q0) / 20_000.0).sqrt();
        assert!((empty - q0).abs() < 4.0 * se, "{empty} vs {q0}");
        assert!(draws.iter().filter(|d| d.subset.is_empty()).all(|d| d.value.iter().all(|v| *v == 0.0)));
    }
}
