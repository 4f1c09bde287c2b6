//! End-to-end behaviour of the simulation drivers.

use sparse_eb::experiments::{
    contraction_curve, dimension_check, dimension_check_sampled, log_affine_fit, selector_quality,
    table1, ExperimentConfig, MonteCarlo, RadiusScale,
};
use sparse_eb::{NoiseSpec, Signal};

const REPORTED: [(f64, f64); 9] = [
    (1.5, 0.96),
    (1.23, 0.98),
    (1.11, 0.99),
    (1.34, 0.96),
    (1.22, 0.98),
    (1.15, 0.98),
    (1.3, 0.98),
    (1.2, 0.97),
    (1.16, 0.99),
];

#[test]
fn published_grid_reproduces_reported_ratios() {
    let rows = table1(&ExperimentConfig::published(2024)).unwrap();
    for (row, (ratio, _)) in rows.iter().zip(REPORTED) {
        assert!((row.ratio - ratio).abs() <= 0.12, "p={} A={}: {}", row.p, row.amplitude, row.ratio);
    }
    // Strong signals are recovered: the modal selection size is the support size.
    let strong = &rows[2];
    assert!((strong.mean_k_hat - 25.0).abs() < 5.0);
}

#[test]
fn reported_coverage_matches_radius_linear_in_m() {
    let config = ExperimentConfig { radius_scale: RadiusScale::M, ..ExperimentConfig::published(2024) };
    let rows = table1(&config).unwrap();
    for (row, (_, coverage)) in rows.iter().zip(REPORTED) {
        assert!((row.coverage - coverage).abs() <= 0.05, "p={} A={}: {}", row.p, row.amplitude, row.coverage);
    }
}

#[test]
fn sqrt_m_ball_undercovers_weak_signals() {
    let rows = table1(&ExperimentConfig::published(2024)).unwrap();
    for (row, (_, coverage)) in rows.iter().zip(REPORTED) {
        if row.amplitude == 3.0 {
            assert!(row.coverage < coverage - 0.15, "p={}: {}", row.p, row.coverage);
        }
    }
}

#[test]
fn table1_depends_only_on_seed() {
    let mut config = ExperimentConfig::published(7);
    config.replications = 10;
    let a = table1(&config).unwrap();
    let b = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| table1(&config).unwrap());
    assert_eq!(a, b);
}

#[test]
fn contraction_mass_decays_log_affinely() {
    let theta = Signal::spikes(500, 25, 8.0).unwrap();
    let grid: Vec<f64> = (0..=8).map(|j| 10.0 * j as f64).collect();
    let mc = MonteCarlo { replications: 8, draws: 4000 };
    let curve = contraction_curve(&theta, 1.0, 4.0, &NoiseSpec::GaussianIid, 3, &grid, 1.0, mc).unwrap();
    for w in curve.windows(2) {
        assert!(w[1].mass <= w[0].mass);
    }
    let fit = log_affine_fit(&curve, 1e-3).unwrap();
    assert!(fit.slope < 0.0);
    assert!(fit.r_squared > 0.9, "{fit:?}");
}

#[test]
fn oversized_subsets_carry_little_mass() {
    let theta = Signal::spikes(500, 25, 5.0).unwrap();
    let grid = [1.0, 1.5, 2.0, 3.0];
    let exact = dimension_check(&theta, 1.0, 2.0, &NoiseSpec::GaussianIid, 11, &grid, 20).unwrap();
    assert!(exact[3].mass < 0.01);
    assert!(exact.windows(2).all(|w| w[1].mass <= w[0].mass));
    let sampled = dimension_check_sampled(
        &theta,
        1.0,
        2.0,
        &NoiseSpec::GaussianIid,
        11,
        &grid,
        MonteCarlo { replications: 20, draws: 2000 },
    )
    .unwrap();
    for (e, s) in exact.iter().zip(&sampled) {
        assert!((e.mass - s.mass).abs() <= 4.0 * s.se + 1e-3, "{e:?} {s:?}");
    }
}

#[test]
fn small_kappa_posterior_overfits() {
    // Below the theory bound the subset prior does not offset the number of
    // subsets of each size, and the posterior spreads far past the support.
    let theta = Signal::spikes(500, 25, 5.0).unwrap();
    let mass = dimension_check(&theta, 1.0, 0.7, &NoiseSpec::GaussianIid, 11, &[3.0], 10).unwrap();
    assert!(mass[0].mass > 0.5);
}

#[test]
fn selection_tracks_oracle_under_bounded_noise() {
    let theta = Signal::spikes(400, 20, 6.0).unwrap();
    for noise in [NoiseSpec::GaussianIid, NoiseSpec::Rademacher, NoiseSpec::UniformBounded { bound: 3f64.sqrt() }] {
        let runs = selector_quality(&theta, 1.0, 0.7, 1.0, &noise, 4, 30).unwrap();
        let mean: f64 = runs.iter().map(|r| r.ratio.unwrap()).sum::<f64>() / runs.len() as f64;
        assert!(mean < 2.0, "{noise:?}: {mean}");
    }
}
