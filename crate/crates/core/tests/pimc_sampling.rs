use epac_kit::model::PolynomialPotential;
use epac_kit::pimc::{
    harmonic_ring_log_z, log_partition_function, sample_tilted_q, sample_tilted_q2,
    thermo_integrate, PimcConfig, PimcEstimate, RingPolymer,
};
use epac_kit::series::linspace;
use epac_kit::spectral::{solve_thermal, SolverSettings};

fn short() -> PimcConfig {
    PimcConfig {
        sweeps: 60_000,
        burn_in: 10_000,
        ..PimcConfig::default()
    }
}

fn within(est: &PimcEstimate, expect: f64, sigmas: f64) -> bool {
    (est.mean - expect).abs() <= sigmas * est.stderr
}

#[test]
fn harmonic_source_response() {
    let p = PolynomialPotential::harmonic(1.0, 1.0, 1.0).unwrap();
    let est = sample_tilted_q(&p, 1.0, 1.0, &PimcConfig::default()).unwrap();
    assert!(within(&est, 1.0, 3.0), "{est:?}");
    assert!(est.stderr > 0.0 && est.stderr < 0.02);
    assert!(est.n_blocks >= 20);
    assert!((0.3..=0.6).contains(&est.acceptance));
}

#[test]
fn symmetric_potential_has_zero_mean() {
    let p = PolynomialPotential::new(vec![0.0, 0.0, 0.5, 0.0, 0.1], 1.0, 1.0).unwrap();
    let est = sample_tilted_q(&p, 2.0, 0.0, &short()).unwrap();
    assert!(within(&est, 0.0, 3.0), "{est:?}");
}

#[test]
fn quartic_mean_matches_spectral() {
    let p = PolynomialPotential::asymmetric_quartic();
    let exact = solve_thermal(&p, 1.0, &SolverSettings::default())
        .unwrap()
        .thermal_expectation(1, 1.0)
        .unwrap();
    let est = sample_tilted_q(&p, 1.0, 0.0, &PimcConfig::default()).unwrap();
    assert!(within(&est, exact, 3.0), "{est:?} vs {exact}");
}

#[test]
fn seeded_runs_are_reproducible() {
    let p = PolynomialPotential::asymmetric_quartic();
    let cfg = PimcConfig {
        sweeps: 5_000,
        burn_in: 1_000,
        ..PimcConfig::default()
    };
    let a = sample_tilted_q(&p, 1.0, 0.3, &cfg).unwrap();
    let b = sample_tilted_q(&p, 1.0, 0.3, &cfg).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a, b);
    let c = sample_tilted_q(
        &p,
        1.0,
        0.3,
        &PimcConfig {
            seed: cfg.seed + 1,
            ..cfg
        },
    )
    .unwrap();
    assert_ne!(a.mean, c.mean);
}

fn integrate(p: &PolynomialPotential, sources: &[f64]) -> Vec<(f64, PimcEstimate)> {
    sources
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            let cfg = PimcConfig {
                seed: 1_000 + i as u64,
                ..short()
            };
            (j, sample_tilted_q(p, 1.0, j, &cfg).unwrap())
        })
        .collect()
}

#[test]
fn harmonic_thermodynamic_integration() {
    let p = PolynomialPotential::harmonic(1.0, 1.0, 1.0).unwrap();
    let points = thermo_integrate(&integrate(&p, &linspace(0.0, 1.0, 6))).unwrap();
    assert_eq!(points[0].value, 0.0);
    let last = points.last().unwrap();
    assert!(
        (last.value - 0.5).abs() <= 3.0 * last.stderr + 1e-12,
        "{last:?}"
    );
}

#[test]
fn quartic_thermodynamic_integration_matches_spectral() {
    let p = PolynomialPotential::asymmetric_quartic();
    let mut sources = linspace(-1.0, 1.0, 21);
    sources[10] = 0.0;
    let points = thermo_integrate(&integrate(&p, &sources)).unwrap();
    let w = |j: f64| {
        solve_thermal(&p.tilted(j), 1.0, &SolverSettings::default())
            .unwrap()
            .log_partition_function(1.0)
            .unwrap()
    };
    let w0 = w(0.0);
    for point in &points {
        let exact = w(point.source) - w0;
        // Trapezoid error on this grid is far below the statistical error.
        assert!(
            (point.value - exact).abs() <= 3.0 * point.stderr + 1e-3,
            "{point:?} vs {exact}"
        );
    }
}

/// `⟨q_i²⟩` of the primitive harmonic ring at finite `P`, from its normal
/// modes: `(1/P) Σ_k 1/λ_k` with `λ_k = (mP/βħ²)(2 − 2cos θ_k) + βmω²/P`.
fn ring_q2(beta: f64, beads: usize) -> f64 {
    let p = beads as f64;
    (0..beads)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / p;
            1.0 / (p / beta * (2.0 - 2.0 * theta.cos()) + beta / p)
        })
        .sum::<f64>()
        / p
}

#[test]
fn bead_convergence_against_discrete_oracle() {
    let p = PolynomialPotential::harmonic(1.0, 1.0, 1.0).unwrap();
    let exact = 0.5 / 0.5f64.tanh();
    let mut last_bias = f64::INFINITY;
    for beads in [8, 16, 32, 64] {
        let oracle = ring_q2(1.0, beads);
        let bias = (exact - oracle).abs();
        assert!(bias < last_bias, "discrete bias must shrink with P");
        last_bias = bias;
        let est = sample_tilted_q2(&p, 1.0, 0.0, &PimcConfig { beads, ..short() }).unwrap();
        assert!(
            within(&est, oracle, 3.0),
            "P = {beads}: {est:?} vs {oracle}"
        );
    }
}

#[test]
fn free_ring_link_variance() {
    let (beta, beads) = (1.0, 32usize);
    let ring = RingPolymer {
        potential: |_: f64| 0.0,
        mass: 1.0,
        hbar: 1.0,
        beta,
        start: 0.0,
    };
    let est = ring
        .sample(&PimcConfig { beads, ..short() }, |path| {
            let n = path.len();
            (0..n)
                .map(|i| (path[(i + 1) % n] - path[i]).powi(2))
                .sum::<f64>()
                / n as f64
        })
        .unwrap();
    let p = beads as f64;
    // Ring closure removes the centroid mode: ħ²β/(mP) · (P − 1)/P.
    let expect = beta / p * (p - 1.0) / p;
    assert!(within(&est, expect, 3.0), "{est:?} vs {expect}");
}

#[test]
fn quartic_log_partition_function() {
    let p = PolynomialPotential::asymmetric_quartic();
    let exact = solve_thermal(&p, 1.0, &SolverSettings::default())
        .unwrap()
        .log_partition_function(1.0)
        .unwrap();
    let cfg = PimcConfig {
        sweeps: 50_000,
        burn_in: 10_000,
        ..PimcConfig::default()
    };
    let est = log_partition_function(&p, 1.0, 0.0, &cfg, 8).unwrap();
    assert!(within(&est, exact, 3.0), "{est:?} vs {exact}");
}

#[test]
fn harmonic_ring_reference_converges() {
    let continuum = -(2.0 * 0.5f64.sinh()).ln();
    let coarse = (harmonic_ring_log_z(1.0, 1.0, 1.0, 8) - continuum).abs();
    let fine = (harmonic_ring_log_z(1.0, 1.0, 1.0, 256) - continuum).abs();
    assert!(fine < coarse && fine < 1e-5);
}
