//! Eigenstates of the asymmetric quartic oscillator and its exact
//! `⟨q²(t)q²(0)⟩` from the eigenbasis.

use epac_kit::model::PolynomialPotential;
use epac_kit::series::linspace;
use epac_kit::spectral::{solve_thermal, SolverSettings};

fn main() -> epac_kit::error::Result<()> {
    let p = PolynomialPotential::asymmetric_quartic();
    let beta = 1.0;
    let s = solve_thermal(&p, beta, &SolverSettings::default())?;
    println!("{} states on {:?}", s.n_states(), s.grid());
    for (n, e) in s.energies().iter().take(5).enumerate() {
        println!("E_{n} = {e:.10}");
    }
    println!("<q>  = {:.10}", s.thermal_expectation(1, beta)?);
    println!("<q2> = {:.10}", s.thermal_expectation(2, beta)?);
    let c = s.exact_corr(2, beta, &linspace(0.0, 5.0, 6))?;
    for (t, v) in c.times.iter().zip(&c.values) {
        println!("t = {t:4.1}  C = {:.8} {:+.8}i", v.re, v.im);
    }
    Ok(())
}
