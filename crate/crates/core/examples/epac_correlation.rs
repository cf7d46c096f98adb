//! Real-time `⟨q²(t)q²(0)⟩` from the effective potential expansion, full and
//! truncated, next to the exact eigenbasis result.

use epac_kit::effpot::{expansion_from_spectral, FitSettings, SourceGridSpec};
use epac_kit::epac::{
    continuation_check, epac_q2, epac_q2_components, epac_q2_truncated, EpacInputs,
};
use epac_kit::model::PolynomialPotential;
use epac_kit::series::linspace;
use epac_kit::spectral::{solve_thermal, SolverSettings};

fn main() -> epac_kit::error::Result<()> {
    let p = PolynomialPotential::asymmetric_quartic();
    let beta = 10.0;
    let settings = SolverSettings::default();
    let (_, e) = expansion_from_spectral(
        &p,
        beta,
        &SourceGridSpec::default(),
        &settings,
        &FitSettings::default(),
    )?;
    let input = EpacInputs::new(e)?;
    let times = linspace(0.0, 20.0, 11);
    let full = epac_q2(&input, &times)?;
    let truncated = epac_q2_truncated(&input, &times)?;
    let exact = solve_thermal(&p, beta, &settings)?.exact_corr(2, beta, &times)?;
    println!("     t        epac   truncated       exact");
    for (i, t) in times.iter().enumerate() {
        let row = [&full, &truncated, &exact].map(|s| s.values[i].re);
        println!("{t:6.1} {:11.6} {:11.6} {:11.6}", row[0], row[1], row[2]);
    }
    let parts = epac_q2_components(&input, 0.0)?.weighted();
    println!("t = 0 weighted components: {:?}", parts.map(|c| c.re));
    let taus = linspace(0.0, beta, 101);
    println!(
        "continuation residual: {:.2e}",
        continuation_check(&input, &taus)?
    );
    Ok(())
}
