//! Closed-form `q̂²` autocorrelation functions of the harmonic oscillator
//! `½mω²q²`: exact, canonical (Kubo), centroid MD with the classical and
//! the effective classical operator, and ring-polymer MD at finite `P`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{CorrelationSeries, SeriesMeta, TimeAxis};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicParams {
    pub omega: f64,
    pub mass: f64,
    pub hbar: f64,
    pub beta: f64,
}

impl HarmonicParams {
    pub fn new(omega: f64, mass: f64, hbar: f64, beta: f64) -> Result<Self> {
        for (name, v) in [
            ("omega", omega),
            ("mass", mass),
            ("hbar", hbar),
            ("beta", beta),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("{v} must be finite and > 0")));
            }
        }
        Ok(Self {
            omega,
            mass,
            hbar,
            beta,
        })
    }

    /// `ħ = m = ω = 1`.
    pub fn natural(beta: f64) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, beta)
    }

    /// `βħω/2`.
    pub fn alpha(&self) -> f64 {
        self.beta * self.hbar * self.omega / 2.0
    }

    /// `1/(β²m²ω⁴)`, the classical `⟨q²⟩²`.
    fn classical_scale(&self) -> f64 {
        1.0 / (self.beta * self.mass * self.omega * self.omega).powi(2)
    }

    /// `ħ²/(4m²ω²)`, the ground-state `⟨q²⟩²`.
    fn quantum_scale(&self) -> f64 {
        (self.hbar / (2.0 * self.mass * self.omega)).powi(2)
    }

    fn meta(&self, method: &str) -> SeriesMeta {
        SeriesMeta {
            method: method.into(),
            beta: self.beta,
            order: 2,
            axis: TimeAxis::Real,
            potential_hash: None,
            grid: None,
        }
    }

    fn series(
        &self,
        method: &str,
        times: &[f64],
        f: impl Fn(f64) -> Complex64,
    ) -> Result<CorrelationSeries> {
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::param("times", "must be finite"));
        }
        CorrelationSeries::new(
            self.meta(method),
            times.to_vec(),
            times.iter().map(|&t| f(t)).collect(),
        )
    }
}

/// Ring-polymer discretization with `P` beads.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RpmdSpec {
    pub beads: usize,
}

impl Default for RpmdSpec {
    fn default() -> Self {
        Self { beads: 1000 }
    }
}

impl RpmdSpec {
    pub fn new(beads: usize) -> Result<Self> {
        if beads == 0 {
            return Err(Error::param("beads", "must be >= 1"));
        }
        Ok(Self { beads })
    }

    /// `k_P = mP²/(β²ħ²)`.
    pub fn spring_constant(&self, hp: &HarmonicParams) -> f64 {
        hp.mass * (self.beads as f64 / (hp.beta * hp.hbar)).powi(2)
    }

    /// `ω_n = sqrt(ω² + (2k_P/m)(1 − cos(2πn/P)))` for `n = 1..=P`; the last
    /// mode is the centroid with `ω_P = ω`.
    pub fn frequencies(&self, hp: &HarmonicParams) -> Vec<f64> {
        let p = self.beads;
        let stiff = 2.0 * self.spring_constant(hp) / hp.mass;
        (1..=p)
            .map(|n| {
                if n == p {
                    hp.omega
                } else {
                    let theta = 2.0 * std::f64::consts::PI * n as f64 / p as f64;
                    (hp.omega * hp.omega + stiff * (1.0 - theta.cos())).sqrt()
                }
            })
            .collect()
    }
}

/// `(ħ²/4m²ω²)[2 coth α (coth 2α cos 2ωt − i sin 2ωt) + 2coth²α − 1]`.
pub fn harmonic_exact_q2(hp: &HarmonicParams, times: &[f64]) -> Result<CorrelationSeries> {
    let a = hp.alpha();
    let (c1, c2) = (1.0 / a.tanh(), 1.0 / (2.0 * a).tanh());
    let s = hp.quantum_scale();
    hp.series("harmonic_exact", times, |t| {
        let x = 2.0 * hp.omega * t;
        Complex64::new(
            s * (2.0 * c1 * c2 * x.cos() + 2.0 * c1 * c1 - 1.0),
            -s * 2.0 * c1 * x.sin(),
        )
    })
}

/// `(ħ²/4m²ω²)[(2/βħω) coth α cos 2ωt + 2coth²α − 1]`.
pub fn harmonic_canonical_q2(hp: &HarmonicParams, times: &[f64]) -> Result<CorrelationSeries> {
    let a = hp.alpha();
    let c1 = 1.0 / a.tanh();
    let s = hp.quantum_scale();
    hp.series("harmonic_canonical", times, |t| {
        let x = 2.0 * hp.omega * t;
        Complex64::new(s * (c1 / a * x.cos() + 2.0 * c1 * c1 - 1.0), 0.0)
    })
}

/// Centroid MD with the classical operator `q_c²`:
/// `(cos 2ωt + 2)/(β²m²ω⁴)`.
pub fn cmd_classical_op_q2(hp: &HarmonicParams, times: &[f64]) -> Result<CorrelationSeries> {
    let s = hp.classical_scale();
    hp.series("cmd_classical_operator", times, |t| {
        Complex64::new(s * ((2.0 * hp.omega * t).cos() + 2.0), 0.0)
    })
}

/// Centroid MD with the effective classical operator:
/// `(cos 2ωt + α coth α + 1)/(β²m²ω⁴)`.
pub fn cmd_effective_classical_op_q2(
    hp: &HarmonicParams,
    times: &[f64],
) -> Result<CorrelationSeries> {
    let a = hp.alpha();
    let s = hp.classical_scale();
    let k = a / a.tanh();
    hp.series("cmd_effective_classical_operator", times, |t| {
        Complex64::new(s * ((2.0 * hp.omega * t).cos() + k + 1.0), 0.0)
    })
}

/// Ring-polymer MD at finite `P`:
/// `(1/β²m²)[Σ_n (cos 2ω_n t + 1)/ω_n⁴ + (Σ_n 1/ω_n²)²]`.
pub fn rpmd_harmonic_q2(
    hp: &HarmonicParams,
    rpmd: &RpmdSpec,
    times: &[f64],
) -> Result<CorrelationSeries> {
    let freqs = rpmd.frequencies(hp);
    let inv2: f64 = freqs.iter().map(|w| 1.0 / (w * w)).sum();
    let inv4: Vec<f64> = freqs.iter().map(|w| 1.0 / w.powi(4)).collect();
    let s = 1.0 / (hp.beta * hp.mass).powi(2);
    hp.series("rpmd", times, |t| {
        let modes: f64 = freqs
            .iter()
            .zip(&inv4)
            .map(|(w, i4)| i4 * ((2.0 * w * t).cos() + 1.0))
            .sum();
        Complex64::new(s * (modes + inv2 * inv2), 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at0(s: Result<CorrelationSeries>) -> f64 {
        s.unwrap().values[0].re
    }

    #[test]
    fn t0_reference_values() {
        let b1 = HarmonicParams::natural(1.0).unwrap();
        let b10 = HarmonicParams::natural(10.0).unwrap();
        let c = 1.0 / 0.5f64.tanh();
        assert!(
            (at0(harmonic_canonical_q2(&b1, &[0.0])) - (2.0 * c + 2.0 * c * c - 1.0) / 4.0).abs()
                < 1e-14
        );
        assert!((at0(cmd_classical_op_q2(&b1, &[0.0])) - 3.0).abs() < 1e-14);
        assert!((at0(cmd_classical_op_q2(&b10, &[0.0])) - 0.03).abs() < 1e-15);
        assert!((at0(cmd_effective_classical_op_q2(&b1, &[0.0])) - (2.0 + 0.5 * c)).abs() < 1e-14);
        let c5 = 1.0 / 5.0f64.tanh();
        let c10 = 1.0 / 10.0f64.tanh();
        let expect = 0.25 * (2.0 * c5 * c10 + 2.0 * c5 * c5 - 1.0);
        assert!((at0(harmonic_exact_q2(&b10, &[0.0])) - expect).abs() < 1e-14);
    }

    #[test]
    fn single_bead_rpmd_is_classical() {
        let hp = HarmonicParams::natural(2.0).unwrap();
        let t = [0.0, 0.4, 3.3];
        let r = rpmd_harmonic_q2(&hp, &RpmdSpec::new(1).unwrap(), &t).unwrap();
        let c = cmd_classical_op_q2(&hp, &t).unwrap();
        assert!(r.max_abs_diff(&c) < 1e-14);
    }

    #[test]
    fn ring_frequencies() {
        let hp = HarmonicParams::natural(1.0).unwrap();
        let f = RpmdSpec::default().frequencies(&hp);
        assert_eq!(f.len(), 1000);
        assert_eq!(f[999], 1.0);
        assert!(f.iter().all(|&w| w >= 1.0));
        assert!(RpmdSpec::new(0).is_err());
    }

    #[test]
    fn rejects_nonpositive_params() {
        assert!(HarmonicParams::new(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(HarmonicParams::new(-1.0, 1.0, 1.0, 1.0).is_err());
    }
}
