use epac_kit::analytic::{
    cmd_classical_op_q2, cmd_effective_classical_op_q2, harmonic_canonical_q2, harmonic_exact_q2,
    rpmd_harmonic_q2, HarmonicParams, RpmdSpec,
};
use epac_kit::model::PolynomialPotential;
use epac_kit::series::linspace;
use epac_kit::spectral::{solve_thermal, SolverSettings};

#[test]
fn rpmd_is_exact_at_zero_time() {
    for beta in [1.0, 10.0] {
        let hp = HarmonicParams::natural(beta).unwrap();
        let r = rpmd_harmonic_q2(&hp, &RpmdSpec::default(), &[0.0])
            .unwrap()
            .values[0]
            .re;
        let c = harmonic_canonical_q2(&hp, &[0.0]).unwrap().values[0].re;
        assert!((r - c).abs() < 1e-3, "beta {beta}");
    }
    let hp = HarmonicParams::natural(1.0).unwrap();
    let c = harmonic_canonical_q2(&hp, &[0.0]).unwrap().values[0].re;
    assert!((c - 3.17332).abs() < 1e-5);
}

#[test]
fn effective_classical_operator_equals_second_order_kubo() {
    let h = PolynomialPotential::harmonic(1.0, 1.0, 1.0).unwrap();
    let times = linspace(0.0, 15.0, 301);
    for beta in [1.0, 10.0] {
        let s = solve_thermal(&h, beta, &SolverSettings::default()).unwrap();
        let hp = HarmonicParams::natural(beta).unwrap();
        let diff = s
            .kubo2_corr(beta, &times)
            .unwrap()
            .max_abs_diff(&cmd_effective_classical_op_q2(&hp, &times).unwrap());
        assert!(diff < 1e-6, "beta {beta}: {diff:e}");
    }
}

#[test]
fn canonical_matches_eigenbasis_kubo() {
    let h = PolynomialPotential::harmonic(1.0, 1.0, 1.0).unwrap();
    let times = linspace(0.0, 15.0, 151);
    let s = solve_thermal(&h, 1.0, &SolverSettings::default()).unwrap();
    let hp = HarmonicParams::natural(1.0).unwrap();
    let diff = s
        .kubo_corr(2, 1.0, &times)
        .unwrap()
        .max_abs_diff(&harmonic_canonical_q2(&hp, &times).unwrap());
    assert!(diff < 1e-8, "{diff:e}");
}

#[test]
fn rpmd_damps() {
    let hp = HarmonicParams::natural(10.0).unwrap();
    let peak = |lo: f64, hi: f64| {
        rpmd_harmonic_q2(&hp, &RpmdSpec::default(), &linspace(lo, hi, 4001))
            .unwrap()
            .values
            .iter()
            .map(|v| v.re)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    assert!(peak(20.0, 40.0) < peak(0.0, 5.0));
}

#[test]
fn classical_limit_at_zero_time() {
    let hp = HarmonicParams::natural(0.01).unwrap();
    let classical = cmd_classical_op_q2(&hp, &[0.0]).unwrap().values[0].re;
    assert!((classical - 3.0e4).abs() < 1e-8);
    let others = [
        harmonic_exact_q2(&hp, &[0.0]).unwrap().values[0].re,
        harmonic_canonical_q2(&hp, &[0.0]).unwrap().values[0].re,
        cmd_effective_classical_op_q2(&hp, &[0.0]).unwrap().values[0].re,
        rpmd_harmonic_q2(&hp, &RpmdSpec::default(), &[0.0])
            .unwrap()
            .values[0]
            .re,
    ];
    for v in others {
        assert!((v / classical - 1.0).abs() < 0.01, "{v}");
    }
}

#[test]
fn ring_mode_frequencies() {
    let hp = HarmonicParams::new(1.3, 0.7, 1.0, 2.0).unwrap();
    let f = RpmdSpec::new(64).unwrap().frequencies(&hp);
    assert_eq!(f[63], 1.3);
    assert_eq!(f.iter().cloned().fold(f64::INFINITY, f64::min), 1.3);
}
