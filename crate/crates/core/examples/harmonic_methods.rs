//! Exact, canonical, centroid MD and ring-polymer MD `q²` correlators of the
//! harmonic oscillator at one temperature.

use epac_kit::analytic::{
    cmd_classical_op_q2, cmd_effective_classical_op_q2, harmonic_canonical_q2, harmonic_exact_q2,
    rpmd_harmonic_q2, HarmonicParams, RpmdSpec,
};
use epac_kit::series::linspace;

fn main() -> epac_kit::error::Result<()> {
    let hp = HarmonicParams::natural(10.0)?;
    let times = linspace(0.0, 10.0, 11);
    let exact = harmonic_exact_q2(&hp, &times)?;
    let canonical = harmonic_canonical_q2(&hp, &times)?;
    let co = cmd_classical_op_q2(&hp, &times)?;
    let eco = cmd_effective_classical_op_q2(&hp, &times)?;
    let rpmd = rpmd_harmonic_q2(&hp, &RpmdSpec::default(), &times)?;
    println!("     t    Re exact   canonical      cmd-co     cmd-eco        rpmd");
    for (i, t) in times.iter().enumerate() {
        let row = [&exact, &canonical, &co, &eco, &rpmd].map(|s| s.values[i].re);
        println!(
            "{t:6.1} {:11.6} {:11.6} {:11.6} {:11.6} {:11.6}",
            row[0], row[1], row[2], row[3], row[4]
        );
    }
    Ok(())
}
