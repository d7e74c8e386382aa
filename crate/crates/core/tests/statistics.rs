mod common;

use cmjtree::experiments::{race, InitialShape};
use cmjtree::growth::population_trajectory;
use cmjtree::seeds::trial_rng;
use cmjtree::{grow_cmj, grow_discrete, AttractionSpec, Stop, WeightedIndex};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use common::{all_recursive_trees, sequence_probability};

fn within(p_hat: f64, p: f64, trials: usize, z: f64) -> bool {
    (p_hat - p).abs() <= z * (p * (1.0 - p) / trials as f64).sqrt()
}

#[test]
fn third_vertex_joins_root_with_weight_ratio() {
    let trials = 100_000;
    for (spec, p) in [
        (AttractionSpec::Linear, 2.0 / 3.0),
        (AttractionSpec::alpha_sublinear(0.5).unwrap(), 2f64.sqrt() / (1.0 + 2f64.sqrt())),
        (AttractionSpec::Uniform, 0.5),
    ] {
        let mut rng = trial_rng(11, 0);
        let hits = (0..trials).filter(|_| grow_discrete(&spec, 3, &mut rng).unwrap().parent(2) == Some(0)).count();
        let p_hat = hits as f64 / trials as f64;
        assert!(within(p_hat, p, trials, 4.0), "{spec:?}: {p_hat} vs {p}");
    }
}

#[test]
fn yule_mean_population_is_exponential() {
    let trials = 20_000;
    let t = 2.0;
    let mut rng = trial_rng(12, 0);
    let pops: Vec<f64> = (0..trials)
        .map(|_| grow_cmj(&AttractionSpec::Uniform, Stop::Time(t), &mut rng).unwrap().0.len() as f64)
        .collect();
    let mean = pops.iter().sum::<f64>() / trials as f64;
    // Z_t is geometric with mean e^t and variance e^{2t} - e^t.
    let sd = ((2.0 * t).exp() - t.exp()).sqrt();
    assert!((mean - t.exp()).abs() < 4.0 * sd / (trials as f64).sqrt(), "{mean}");
}

#[test]
fn trajectory_grid_is_regular() {
    let mut rng = trial_rng(13, 0);
    let tr = population_trajectory(&AttractionSpec::Uniform, 3.0, 0.5, Some(1.0), &mut rng).unwrap();
    assert_eq!(tr.times.len(), 7);
    assert!(tr.populations.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(tr.normalized.as_ref().unwrap().len(), 7);
}

#[test]
fn identical_seed_trees_race_evenly() {
    let spec = AttractionSpec::alpha_sublinear(0.5).unwrap();
    let r = race(&InitialShape::Star(5), &InitialShape::Star(5), &spec, 3.0, 2000, 5).unwrap();
    assert!((r.p_first - 0.5).abs() < 3.0 * r.std_error, "{r:?}");
}

#[test]
fn weighted_index_frequencies() {
    let weights = [1.0, 0.5, 3.0, 5.5];
    let mut idx = WeightedIndex::from_weights(&weights);
    let mut rng = trial_rng(14, 0);
    let trials = 100_000;
    let mut counts = [0usize; 4];
    for _ in 0..trials {
        counts[idx.sample(&mut rng)] += 1;
    }
    for (c, w) in counts.iter().zip(weights) {
        assert!(within(*c as f64 / trials as f64, w / 10.0, trials, 4.0));
    }
    idx.set(3, 0.5);
    idx.push(5.0);
    let mut counts = [0usize; 5];
    for _ in 0..trials {
        counts[idx.sample(&mut rng)] += 1;
    }
    assert!(within(counts[3] as f64 / trials as f64, 0.05, trials, 4.0));
    assert!(within(counts[4] as f64 / trials as f64, 0.5, trials, 4.0));
}

#[test]
fn continuous_and_discrete_shapes_agree_on_four_vertices() {
    let trials = 100_000;
    let shapes = all_recursive_trees(4);
    for spec in [AttractionSpec::Uniform, AttractionSpec::Linear, AttractionSpec::alpha_sublinear(0.5).unwrap()] {
        let f = |k: usize| spec.evaluate(k).unwrap();
        let mut counts = vec![0usize; shapes.len()];
        let mut rng = trial_rng(15, 0);
        for _ in 0..trials {
            let (t, _) = grow_cmj(&spec, Stop::Vertices(4), &mut rng).unwrap();
            counts[shapes.iter().position(|s| s.as_slice() == t.parents()).unwrap()] += 1;
        }
        let stat: f64 = shapes
            .iter()
            .zip(&counts)
            .map(|(s, &c)| {
                let e = sequence_probability(s, f) * trials as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        let p = 1.0 - ChiSquared::new((shapes.len() - 1) as f64).unwrap().cdf(stat);
        assert!(p > 0.01, "{spec:?}: chi2 {stat}, p {p}");
    }
}
