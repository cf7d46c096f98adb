//! Physical system definition: a confining polynomial potential with its mass
//! and Planck constant, and the thermal state it is studied at.
//!
//! Natural units (ħ = k_B = m = 1) are the default everywhere, but every
//! quantity carries its mass and ħ explicitly so dimensional runs work.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// `V(q) = Σ_k c_k q^k` with dense coefficients from order 0 upward.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPotential")]
pub struct PolynomialPotential {
    coeffs: Vec<f64>,
    mass: f64,
    hbar: f64,
}

#[derive(Deserialize)]
struct RawPotential {
    coeffs: Vec<f64>,
    #[serde(default = "one")]
    mass: f64,
    #[serde(default = "one")]
    hbar: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawPotential> for PolynomialPotential {
    type Error = Error;

    fn try_from(raw: RawPotential) -> Result<Self> {
        PolynomialPotential::new(raw.coeffs, raw.mass, raw.hbar)
    }
}

impl PolynomialPotential {
    /// Validates that the potential is confining: the leading (last nonzero)
    /// coefficient has even order ≥ 2 and is positive.
    pub fn new(mut coeffs: Vec<f64>, mass: f64, hbar: f64) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPotential("non-finite coefficient".into()));
        }
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        let degree = coeffs.len().saturating_sub(1);
        if degree < 2 {
            return Err(Error::InvalidPotential(format!(
                "degree {degree} < 2 is not confining"
            )));
        }
        if degree % 2 == 1 || coeffs[degree] <= 0.0 {
            return Err(Error::InvalidPotential(format!(
                "leading term c_{degree} = {} must have even order and be positive",
                coeffs[degree]
            )));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::param(
                "mass",
                format!("{mass} must be finite and > 0"),
            ));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::param(
                "hbar",
                format!("{hbar} must be finite and > 0"),
            ));
        }
        Ok(Self { coeffs, mass, hbar })
    }

    /// `½ m ω² q²`.
    pub fn harmonic(mass: f64, omega: f64, hbar: f64) -> Result<Self> {
        Self::new(vec![0.0, 0.0, 0.5 * mass * omega * omega], mass, hbar)
    }

    /// `½q² + q³/10 + q⁴/100` in natural units, the asymmetric anharmonic
    /// benchmark oscillator.
    pub fn asymmetric_quartic() -> Self {
        Self::new(vec![0.0, 0.0, 0.5, 0.1, 0.01], 1.0, 1.0)
            .expect("benchmark potential is confining")
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn evaluate(&self, q: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * q + c)
    }

    pub fn derivative(&self, q: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * q + k as f64 * c)
    }

    pub fn second_derivative(&self, q: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(2)
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * q + (k * (k - 1)) as f64 * c)
    }

    /// Potential of the source-tilted Hamiltonian `H − J q̂`.
    pub fn tilted(&self, source: f64) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[1] -= source;
        Self {
            coeffs,
            mass: self.mass,
            hbar: self.hbar,
        }
    }

    /// True when every odd-order coefficient vanishes.
    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0)
    }

    /// Radius containing every real stationary point (Cauchy bound on the
    /// roots of `V'`).
    pub fn stationary_radius(&self) -> f64 {
        let k = self.degree();
        let lead = k as f64 * self.coeffs[k];
        let max_ratio = (1..k)
            .map(|i| (i as f64 * self.coeffs[i]).abs() / lead)
            .fold(0.0, f64::max);
        1.0 + max_ratio
    }

    /// Global minimum `(q*, V(q*))`, located by a dense scan over the
    /// stationary radius followed by Newton polishing.
    pub fn global_minimum(&self) -> (f64, f64) {
        let r = self.stationary_radius();
        let n = 4000;
        let mut best = (0.0, f64::INFINITY);
        for i in 0..=n {
            let q = -r + 2.0 * r * i as f64 / n as f64;
            let v = self.evaluate(q);
            if v < best.1 {
                best = (q, v);
            }
        }
        let mut q = best.0;
        for _ in 0..50 {
            let d2 = self.second_derivative(q);
            if d2 <= 0.0 {
                break;
            }
            let step = self.derivative(q) / d2;
            q -= step;
            if step.abs() < 1e-15 * (1.0 + q.abs()) {
                break;
            }
        }
        if self.evaluate(q) > best.1 {
            q = best.0;
        }
        (q, self.evaluate(q))
    }

    /// Hex SHA-256 over the coefficients, mass and ħ; used to tag outputs.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for c in &self.coeffs {
            hasher.update(c.to_le_bytes());
        }
        hasher.update(self.mass.to_le_bytes());
        hasher.update(self.hbar.to_le_bytes());
        hex::encode(hasher.finalize())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermoState {
    beta: f64,
}

impl ThermoState {
    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_finite() && beta > 0.0 {
            Ok(Self { beta })
        } else {
            Err(Error::param(
                "beta",
                format!("{beta} must be finite and > 0"),
            ))
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<f64> {
    ThermoState::new(beta).map(|t| t.beta())
}
