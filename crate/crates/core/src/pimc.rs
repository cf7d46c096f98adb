//! Path-integral Monte Carlo for a particle in `V(q) − Jq`.
//!
//! The ring polymer of `P` beads carries the primitive Trotter action
//! `S/ħ = Σ_i [ (mP/2βħ²)(q_{i+1} − q_i)² + (β/P)U(q_i) ]`. Moves are single-bead
//! displacements plus rigid translations of the whole ring, the latter
//! leaving the spring term unchanged. Steps are tuned during burn-in and
//! frozen for production; error bars come from blocking analysis.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_beta, PolynomialPotential};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PimcConfig {
    pub beads: usize,
    pub sweeps: usize,
    pub burn_in: usize,
    /// Initial single-bead step; `None` uses twice the free link width.
    pub bead_step: Option<f64>,
    /// Initial whole-ring translation step.
    pub translation_step: f64,
    /// Upper bound for the tuned translation step.
    pub max_translation: f64,
    pub seed: u64,
    /// Fixed block length for error bars; `None` selects it automatically.
    pub block_size: Option<usize>,
    /// Allowed single-bead acceptance after tuning.
    pub acceptance_range: (f64, f64),
}

impl Default for PimcConfig {
    fn default() -> Self {
        Self {
            beads: 64,
            sweeps: 200_000,
            burn_in: 20_000,
            bead_step: None,
            translation_step: 0.5,
            max_translation: 5.0,
            seed: 20_240_601,
            block_size: None,
            acceptance_range: (0.3, 0.6),
        }
    }
}

impl PimcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.beads < 8 {
            return Err(Error::param("beads", "must be >= 8"));
        }
        if self.sweeps <= self.burn_in {
            return Err(Error::param("sweeps", "must exceed burn_in"));
        }
        if self.sweeps - self.burn_in < 20 * 2 {
            return Err(Error::param(
                "sweeps",
                "too few production sweeps for 20 blocks",
            ));
        }
        if !(self.translation_step > 0.0 && self.max_translation >= self.translation_step) {
            return Err(Error::param(
                "translation_step",
                "must be in (0, max_translation]",
            ));
        }
        if let Some(s) = self.bead_step {
            if !(s > 0.0) {
                return Err(Error::param("bead_step", "must be positive"));
            }
        }
        let (lo, hi) = self.acceptance_range;
        if !(0.0 < lo && lo < hi && hi < 1.0) {
            return Err(Error::param("acceptance_range", "need 0 < lo < hi < 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PimcEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Production acceptance of single-bead moves.
    pub acceptance: f64,
    pub translation_acceptance: f64,
    pub beads: usize,
    pub sweeps: usize,
    pub seed: u64,
    pub block_size: usize,
    pub n_blocks: usize,
    /// False when the two halves of the production run disagree by more
    /// than four combined standard errors.
    pub equilibrated: bool,
}

/// Ring polymer in an arbitrary external potential `U(q)`.
pub struct RingPolymer<U> {
    pub potential: U,
    pub mass: f64,
    pub hbar: f64,
    pub beta: f64,
    /// Initial position of every bead.
    pub start: f64,
}

impl<U: Fn(f64) -> f64> RingPolymer<U> {
    /// Runs one chain and returns the blocked estimate of `observable`,
    /// evaluated on the bead positions after every production sweep.
    pub fn sample<O: Fn(&[f64]) -> f64>(
        &self,
        cfg: &PimcConfig,
        observable: O,
    ) -> Result<PimcEstimate> {
        cfg.validate()?;
        let beta = check_beta(self.beta)?;
        let p = cfg.beads;
        let spring = self.mass * p as f64 / (2.0 * beta * self.hbar * self.hbar);
        let dtau = beta / p as f64;
        let link = (beta * self.hbar * self.hbar / (self.mass * p as f64)).sqrt();
        let mut step = cfg.bead_step.unwrap_or(2.0 * link);
        let mut shift = cfg.translation_step;

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut path = vec![self.start; p];
        let mut u: Vec<f64> = path.iter().map(|&q| (self.potential)(q)).collect();
        let mut samples = Vec::with_capacity(cfg.sweeps - cfg.burn_in);
        let (mut bead_acc, mut bead_try) = (0usize, 0usize);
        let (mut trans_acc, mut trans_try) = (0usize, 0usize);
        let tune_every = 100;

        for sweep in 0..cfg.sweeps {
            for i in 0..p {
                let prev = path[(i + p - 1) % p];
                let next = path[(i + 1) % p];
                let old = path[i];
                let new = old + step * rng.gen_range(-1.0..1.0);
                let u_new = (self.potential)(new);
                let d_spring = spring
                    * ((next - new).powi(2) + (new - prev).powi(2)
                        - (next - old).powi(2)
                        - (old - prev).powi(2));
                let d_action = d_spring + dtau * (u_new - u[i]);
                bead_try += 1;
                if d_action <= 0.0 || rng.gen::<f64>() < (-d_action).exp() {
                    path[i] = new;
                    u[i] = u_new;
                    bead_acc += 1;
                }
            }

            let delta = shift * rng.gen_range(-1.0..1.0);
            let moved: Vec<f64> = path.iter().map(|&q| (self.potential)(q + delta)).collect();
            let d_action = dtau * moved.iter().zip(&u).map(|(a, b)| a - b).sum::<f64>();
            trans_try += 1;
            if d_action <= 0.0 || rng.gen::<f64>() < (-d_action).exp() {
                path.iter_mut().for_each(|q| *q += delta);
                u = moved;
                trans_acc += 1;
            }

            if sweep < cfg.burn_in {
                if (sweep + 1) % tune_every == 0 {
                    step *= tune_factor(bead_acc as f64 / bead_try as f64);
                    shift = (shift * tune_factor(trans_acc as f64 / trans_try as f64))
                        .min(cfg.max_translation);
                    bead_acc = 0;
                    bead_try = 0;
                    trans_acc = 0;
                    trans_try = 0;
                }
                if sweep + 1 == cfg.burn_in {
                    bead_acc = 0;
                    bead_try = 0;
                    trans_acc = 0;
                    trans_try = 0;
                }
            } else {
                samples.push(observable(&path));
            }
        }

        let acceptance = bead_acc as f64 / bead_try as f64;
        let (lo, hi) = cfg.acceptance_range;
        if !(lo..=hi).contains(&acceptance) {
            return Err(Error::Acceptance { acceptance, lo, hi });
        }
        let blocked = match cfg.block_size {
            Some(b) => block_fixed(&samples, b)?,
            None => blocking(&samples)?,
        };
        let half = samples.len() / 2;
        let first = blocking(&samples[..half])?;
        let second = blocking(&samples[half..])?;
        let drift = (first.mean - second.mean).abs();
        let equilibrated = drift <= 4.0 * first.stderr.hypot(second.stderr);
        Ok(PimcEstimate {
            mean: blocked.mean,
            stderr: blocked.stderr,
            acceptance,
            translation_acceptance: trans_acc as f64 / trans_try as f64,
            beads: p,
            sweeps: cfg.sweeps,
            seed: cfg.seed,
            block_size: blocked.block_size,
            n_blocks: blocked.n_blocks,
            equilibrated,
        })
    }
}

/// Multiplicative step update steering acceptance toward 30–60%.
fn tune_factor(acceptance: f64) -> f64 {
    if acceptance < 0.35 {
        0.8
    } else if acceptance > 0.55 {
        1.25
    } else {
        1.0
    }
}

fn centroid(path: &[f64]) -> f64 {
    path.iter().sum::<f64>() / path.len() as f64
}

/// Path-averaged `⟨q⟩` in the ensemble of `V(q) − Jq`.
pub fn sample_tilted_q(
    p: &PolynomialPotential,
    beta: f64,
    source: f64,
    cfg: &PimcConfig,
) -> Result<PimcEstimate> {
    let tilted = p.tilted(source);
    let (start, _) = tilted.global_minimum();
    RingPolymer {
        potential: |q: f64| tilted.evaluate(q),
        mass: p.mass(),
        hbar: p.hbar(),
        beta,
        start,
    }
    .sample(cfg, centroid)
}

/// Bead average of `⟨q²⟩` in the ensemble of `V(q) − Jq`.
pub fn sample_tilted_q2(
    p: &PolynomialPotential,
    beta: f64,
    source: f64,
    cfg: &PimcConfig,
) -> Result<PimcEstimate> {
    let tilted = p.tilted(source);
    let (start, _) = tilted.global_minimum();
    RingPolymer {
        potential: |q: f64| tilted.evaluate(q),
        mass: p.mass(),
        hbar: p.hbar(),
        beta,
        start,
    }
    .sample(cfg, |path| {
        path.iter().map(|q| q * q).sum::<f64>() / path.len() as f64
    })
}

/// Mean with a blocked standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockedMean {
    pub mean: f64,
    pub stderr: f64,
    pub block_size: usize,
    pub n_blocks: usize,
}

/// Minimum number of blocks behind any reported error bar.
pub const MIN_BLOCKS: usize = 20;

/// Block-doubling analysis. The error estimate at each level is
/// `sqrt(var/(n−1))` over `n` block means; the first level whose successors
/// all stay within ±20% while at least [`MIN_BLOCKS`] blocks remain is taken
/// as the plateau. Without a plateau the largest estimate is returned.
pub fn blocking(samples: &[f64]) -> Result<BlockedMean> {
    if samples.len() < MIN_BLOCKS {
        return Err(Error::param(
            "samples",
            format!("need at least {MIN_BLOCKS}"),
        ));
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let mut levels: Vec<(usize, usize, f64)> = Vec::new();
    let mut data = samples.to_vec();
    let mut size = 1;
    while data.len() >= MIN_BLOCKS {
        levels.push((size, data.len(), standard_error(&data)));
        data = data.chunks_exact(2).map(|c| 0.5 * (c[0] + c[1])).collect();
        size *= 2;
    }
    let plateau = (0..levels.len()).find(|&k| {
        let base = levels[k].2;
        k + 2 < levels.len()
            && levels[k + 1..]
                .iter()
                .all(|l| (l.2 - base).abs() <= 0.2 * base.max(f64::MIN_POSITIVE))
    });
    let (block_size, n_blocks, stderr) = match plateau {
        Some(k) => levels[k],
        None => *levels
            .iter()
            .max_by(|a, b| a.2.total_cmp(&b.2))
            .expect("at least one level"),
    };
    Ok(BlockedMean {
        mean,
        stderr,
        block_size,
        n_blocks,
    })
}

/// Blocked error with a fixed block length.
pub fn block_fixed(samples: &[f64], block_size: usize) -> Result<BlockedMean> {
    if block_size == 0 || samples.len() / block_size < MIN_BLOCKS {
        return Err(Error::param(
            "block_size",
            format!("must leave at least {MIN_BLOCKS} blocks"),
        ));
    }
    let means: Vec<f64> = samples
        .chunks_exact(block_size)
        .map(|c| c.iter().sum::<f64>() / block_size as f64)
        .collect();
    Ok(BlockedMean {
        mean: samples.iter().sum::<f64>() / samples.len() as f64,
        stderr: standard_error(&means),
        block_size,
        n_blocks: means.len(),
    })
}

fn standard_error(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (var / n).sqrt()
}

/// Value of `w(J) − w(0)` with its propagated standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratedPoint {
    pub source: f64,
    pub value: f64,
    pub stderr: f64,
}

/// `w(J) − w(0) = ∫₀^J Q(J′) dJ′` by the trapezoidal rule outward from
/// `J = 0`, treating the sampled points as independent.
pub fn thermo_integrate(q_of_j: &[(f64, PimcEstimate)]) -> Result<Vec<IntegratedPoint>> {
    let j: Vec<f64> = q_of_j.iter().map(|(j, _)| *j).collect();
    if j.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::SourceGrid);
    }
    let zero = j.iter().position(|&x| x == 0.0).ok_or(Error::SourceGrid)?;
    let mut out = Vec::with_capacity(j.len());
    for k in 0..j.len() {
        let (lo, hi) = if k < zero { (k, zero) } else { (zero, k) };
        let sign = if k < zero { -1.0 } else { 1.0 };
        let mut value = 0.0;
        let mut weights = vec![0.0; j.len()];
        for i in lo..hi {
            let h = 0.5 * (j[i + 1] - j[i]);
            value += h * (q_of_j[i].1.mean + q_of_j[i + 1].1.mean);
            weights[i] += h;
            weights[i + 1] += h;
        }
        let var: f64 = weights
            .iter()
            .zip(q_of_j)
            .map(|(w, (_, e))| (w * e.stderr).powi(2))
            .sum();
        out.push(IntegratedPoint {
            source: j[k],
            value: sign * value,
            stderr: var.sqrt(),
        });
    }
    Ok(out)
}

/// `ln Z` of the primitive-discretized ring for a harmonic well
/// `½mω²q²`, exact at finite `P` and independent of the mass.
pub fn harmonic_ring_log_z(omega: f64, hbar: f64, beta: f64, beads: usize) -> f64 {
    let p = beads as f64;
    let x = (beta * hbar * omega / p).powi(2);
    -0.5 * (0..beads)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / p;
            (2.0 - 2.0 * theta.cos() + x).ln()
        })
        .sum::<f64>()
}

/// `ln Z` at finite `P` relative to a harmonic reference centered at the
/// minimum of `V − Jq`, by coupling-constant integration
/// `ln Z = ln Z_ref − ∫₀¹ ⟨(β/P) Σ_i ΔU(q_i)⟩_λ dλ` on Gauss–Legendre nodes.
pub fn log_partition_function(
    p: &PolynomialPotential,
    beta: f64,
    source: f64,
    cfg: &PimcConfig,
    nodes: usize,
) -> Result<PimcEstimate> {
    let beta = check_beta(beta)?;
    let tilted = p.tilted(source);
    let (q0, v0) = tilted.global_minimum();
    let k = tilted.second_derivative(q0);
    if !(k > 0.0) {
        return Err(Error::param(
            "potential",
            "flat minimum has no harmonic reference",
        ));
    }
    let omega = (k / p.mass()).sqrt();
    let reference = |q: f64| v0 + 0.5 * k * (q - q0).powi(2);
    let dtau = beta / cfg.beads as f64;
    let (x, w) = gauss_legendre(nodes);
    let mut total = 0.0;
    let mut var = 0.0;
    let mut worst = PimcEstimate {
        mean: 0.0,
        stderr: 0.0,
        acceptance: 1.0,
        translation_acceptance: 1.0,
        beads: cfg.beads,
        sweeps: cfg.sweeps,
        seed: cfg.seed,
        block_size: 1,
        n_blocks: usize::MAX,
        equilibrated: true,
    };
    for (node, (&xi, &wi)) in x.iter().zip(&w).enumerate() {
        let lambda = 0.5 * (xi + 1.0);
        let weight = 0.5 * wi;
        let ring = RingPolymer {
            potential: |q: f64| (1.0 - lambda) * reference(q) + lambda * tilted.evaluate(q),
            mass: p.mass(),
            hbar: p.hbar(),
            beta,
            start: q0,
        };
        let node_cfg = PimcConfig {
            seed: cfg.seed.wrapping_add(node as u64),
            ..*cfg
        };
        let est = ring.sample(&node_cfg, |path| {
            dtau * path
                .iter()
                .map(|&q| tilted.evaluate(q) - reference(q))
                .sum::<f64>()
        })?;
        total += weight * est.mean;
        var += (weight * est.stderr).powi(2);
        worst.acceptance = worst.acceptance.min(est.acceptance);
        worst.translation_acceptance = worst.translation_acceptance.min(est.translation_acceptance);
        worst.block_size = worst.block_size.max(est.block_size);
        worst.n_blocks = worst.n_blocks.min(est.n_blocks);
        worst.equilibrated &= est.equilibrated;
    }
    let log_z_ref = harmonic_ring_log_z(omega, p.hbar(), beta, cfg.beads) - beta * v0;
    worst.mean = log_z_ref - total;
    worst.stderr = var.sqrt();
    Ok(worst)
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[n - 1 - i] = z;
        w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(6);
        let int = |f: &dyn Fn(f64) -> f64| x.iter().zip(&w).map(|(a, b)| b * f(*a)).sum::<f64>();
        assert!((int(&|_| 1.0) - 2.0).abs() < 1e-14);
        assert!((int(&|t| t.powi(10)) - 2.0 / 11.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn blocking_of_white_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..1 << 14).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = blocking(&x).unwrap();
        let naive = (1.0 / 3.0 / x.len() as f64).sqrt();
        assert!(
            (b.stderr / naive - 1.0).abs() < 0.25,
            "{} vs {naive}",
            b.stderr
        );
        assert!(b.n_blocks >= MIN_BLOCKS);
    }

    #[test]
    fn blocking_sees_correlation() {
        // AR(1) with φ = 0.9: error inflation √((1+φ)/(1−φ)) ≈ 4.36.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut v = 0.0;
        let x: Vec<f64> = (0..1 << 16)
            .map(|_| {
                v = 0.9 * v + rng.gen_range(-1.0..1.0);
                v
            })
            .collect();
        let b = blocking(&x).unwrap();
        let naive = standard_error(&x);
        let ratio = b.stderr / naive;
        assert!((3.0..6.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn thermo_integrate_zero_and_grid_errors() {
        let e = |m: f64| PimcEstimate {
            mean: m,
            stderr: 0.1,
            acceptance: 0.5,
            translation_acceptance: 0.5,
            beads: 8,
            sweeps: 1,
            seed: 0,
            block_size: 1,
            n_blocks: 20,
            equilibrated: true,
        };
        let pts = vec![(-1.0, e(-1.0)), (0.0, e(0.0)), (1.0, e(1.0))];
        let out = thermo_integrate(&pts).unwrap();
        assert_eq!(out[1].value, 0.0);
        assert_eq!(out[1].stderr, 0.0);
        assert!((out[2].value - 0.5).abs() < 1e-15);
        assert!((out[0].value - 0.5).abs() < 1e-15);
        assert!((out[2].stderr - (0.05f64.powi(2) * 2.0).sqrt()).abs() < 1e-15);
        let bad = vec![(0.5, e(0.0)), (1.0, e(1.0))];
        assert!(matches!(thermo_integrate(&bad), Err(Error::SourceGrid)));
    }

    #[test]
    fn config_validation() {
        let cfg = PimcConfig {
            beads: 4,
            ..PimcConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = PimcConfig {
            sweeps: 100,
            burn_in: 100,
            ..PimcConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn harmonic_ring_free_energy_limit() {
        // Large P approaches the continuum −ln(2 sinh(βħω/2)).
        let exact = -(2.0 * 0.5f64.sinh()).ln();
        let lz = harmonic_ring_log_z(1.0, 1.0, 1.0, 4096);
        assert!((lz - exact).abs() < 1e-6);
    }
}
