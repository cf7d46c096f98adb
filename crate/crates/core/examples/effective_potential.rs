//! Standard effective potential of the asymmetric quartic oscillator and its
//! expansion about the minimum, compared with the published coefficients.

use epac_kit::effpot::{
    expansion_direct, expansion_from_spectral, FitSettings, SourceGridSpec, BENCHMARK_EXPANSIONS,
};
use epac_kit::model::PolynomialPotential;
use epac_kit::spectral::SolverSettings;

fn main() -> epac_kit::error::Result<()> {
    let p = PolynomialPotential::asymmetric_quartic();
    let settings = SolverSettings::default();
    for row in BENCHMARK_EXPANSIONS.iter().skip(1) {
        let (curve, fit) = expansion_from_spectral(
            &p,
            row.beta,
            &SourceGridSpec::default(),
            &settings,
            &FitSettings::default(),
        )?;
        let direct = expansion_direct(&p, row.beta, &settings)?;
        let curve = curve.normalized();
        println!(
            "beta = {}: {} curve nodes, V(Q=0) = {:.6}",
            row.beta,
            curve.len(),
            curve.interpolate(0.0).unwrap_or(f64::NAN)
        );
        println!("  fit       {:?}", fit.row());
        println!("  direct    {:?}", direct.row());
        println!("  published {:?}", row.values());
    }
    Ok(())
}
