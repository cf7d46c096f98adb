//! Exact quantum reference: a grid eigensolver for 1D Hamiltonians and
//! eigenbasis evaluation of real-time, imaginary-time and Kubo-transformed
//! correlation functions.
//!
//! The kinetic energy is discretized with the sinc discrete-variable
//! representation on a uniform grid. Wavefunctions are stored as grid samples
//! normalized under trapezoidal quadrature, and every correlator is a finite
//! eigen-sum over the retained states. Imaginary-time and Kubo integrals are
//! done analytically per matrix element (see [`kernel`]).

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_beta, PolynomialPotential};
use crate::series::{CorrelationSeries, SeriesMeta, TimeAxis};

/// Uniform grid `q_lo = q_0 < … < q_{n-1} = q_hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub q_lo: f64,
    pub q_hi: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn new(q_lo: f64, q_hi: f64, n_points: usize) -> Result<Self> {
        if !(q_lo.is_finite() && q_hi.is_finite() && q_lo < q_hi) {
            return Err(Error::param(
                "grid",
                format!("need q_lo < q_hi, got [{q_lo}, {q_hi}]"),
            ));
        }
        if n_points < 3 {
            return Err(Error::param("grid", "n_points must be >= 3"));
        }
        Ok(Self {
            q_lo,
            q_hi,
            n_points,
        })
    }

    pub fn spacing(&self) -> f64 {
        (self.q_hi - self.q_lo) / (self.n_points - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        crate::series::linspace(self.q_lo, self.q_hi, self.n_points)
    }

    /// Trapezoidal weights.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.n_points];
        w[0] *= 0.5;
        w[self.n_points - 1] *= 0.5;
        w
    }

    /// Chooses bounds and spacing for the thermal problem at `beta`.
    ///
    /// States up to the energy cutoff `E_cut = V_min + ln(1/tol)/β + 10ħω₀`
    /// are classically allowed inside the turning points; the grid extends past
    /// them until the WKB decay exponent reaches `ln(1/leak) + 5`, and the
    /// spacing resolves momenta up to `safety × p_max`.
    pub fn auto(p: &PolynomialPotential, beta: f64, settings: &SolverSettings) -> Result<Self> {
        let beta = check_beta(beta)?;
        let e_cut = energy_cutoff(p, beta, settings, 1.0);
        Self::for_cutoff(p, e_cut, settings)
    }

    fn for_cutoff(p: &PolynomialPotential, e_cut: f64, settings: &SolverSettings) -> Result<Self> {
        let (q_min, v_min) = p.global_minimum();
        let left = turning_point(p, q_min, e_cut, -1.0);
        let right = turning_point(p, q_min, e_cut, 1.0);
        let decay = (1.0 / settings.leak_threshold).ln() + 5.0;
        let step = (right - left).max(1e-3) / 4000.0;
        let q_lo = wkb_extend(p, left, e_cut, -step, decay);
        let q_hi = wkb_extend(p, right, e_cut, step, decay);
        let p_max = (2.0 * p.mass() * (e_cut - v_min)).sqrt();
        let h = std::f64::consts::PI * p.hbar() / (settings.dvr_safety * p_max);
        let n_points = ((q_hi - q_lo) / h).ceil() as usize + 1;
        GridSpec::new(q_lo, q_hi, n_points.max(16))
    }
}

fn energy_cutoff(p: &PolynomialPotential, beta: f64, s: &SolverSettings, widen: f64) -> f64 {
    let (q_min, v_min) = p.global_minimum();
    let curvature = p.second_derivative(q_min);
    let quantum = if curvature > 0.0 {
        p.hbar() * (curvature / p.mass()).sqrt()
    } else {
        p.hbar()
    };
    v_min + widen * ((1.0 / s.tail_tolerance).ln() / beta + 10.0 * quantum)
}

fn turning_point(p: &PolynomialPotential, from: f64, energy: f64, dir: f64) -> f64 {
    let mut reach = 1.0;
    while p.evaluate(from + dir * reach) < energy {
        reach *= 2.0;
    }
    let (mut lo, mut hi) = (0.0, reach);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p.evaluate(from + dir * mid) < energy {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    from + dir * hi
}

fn wkb_extend(p: &PolynomialPotential, start: f64, energy: f64, step: f64, target: f64) -> f64 {
    let (m, hbar) = (p.mass(), p.hbar());
    let kappa = |q: f64| (2.0 * m * (p.evaluate(q) - energy)).max(0.0).sqrt() / hbar;
    let mut q = start;
    let mut action = 0.0;
    while action < target {
        action += 0.5 * (kappa(q) + kappa(q + step)) * step.abs();
        q += step;
    }
    q
}

/// Accuracy controls for the spectral backend.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverSettings {
    /// Required bound on `exp(-β(E_max − E_0))` for the retained states.
    pub tail_tolerance: f64,
    /// Largest allowed `|ψ_n|` at either grid edge, relative to `max |ψ_n|`.
    pub leak_threshold: f64,
    /// Ratio between the grid Nyquist momentum `πħ/h` and the largest
    /// classical momentum below the energy cutoff.
    pub dvr_safety: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tail_tolerance: 1e-12,
            leak_threshold: 1e-9,
            dvr_safety: 2.0,
        }
    }
}

/// Lowest eigenpairs of `H = p̂²/2m + V(q̂)` on a grid.
#[derive(Clone, Debug)]
pub struct Spectrum {
    energies: Vec<f64>,
    /// Column `n` holds `ψ_n(q_i)`.
    states: DMatrix<f64>,
    grid: GridSpec,
    mass: f64,
    hbar: f64,
}

/// Diagonalizes the sinc-DVR Hamiltonian and keeps the lowest `n_states`
/// pairs, with the default boundary-leak threshold.
pub fn solve_eigen(p: &PolynomialPotential, grid: GridSpec, n_states: usize) -> Result<Spectrum> {
    solve_eigen_with(p, grid, n_states, SolverSettings::default().leak_threshold)
}

pub fn solve_eigen_with(
    p: &PolynomialPotential,
    grid: GridSpec,
    n_states: usize,
    leak_threshold: f64,
) -> Result<Spectrum> {
    if n_states == 0 || n_states > grid.n_points {
        return Err(Error::param(
            "n_states",
            format!("{n_states} not in 1..={}", grid.n_points),
        ));
    }
    let (energies, states) = diagonalize(p, &grid)?;
    let spectrum = Spectrum {
        energies: energies[..n_states].to_vec(),
        states: states.columns(0, n_states).into_owned(),
        grid,
        mass: p.mass(),
        hbar: p.hbar(),
    };
    spectrum.check_boundaries(leak_threshold)?;
    Ok(spectrum)
}

/// Solves on an automatically sized grid. Every state below the energy
/// cutoff is retained: the thermally populated ones, for which
/// `exp(-β(E − E_0)) ≥ tail_tolerance`, plus the zero-point allowance of
/// higher states they couple to through powers of `q̂`.
pub fn solve_thermal(
    p: &PolynomialPotential,
    beta: f64,
    settings: &SolverSettings,
) -> Result<Spectrum> {
    let beta = check_beta(beta)?;
    let window = (1.0 / settings.tail_tolerance).ln() / beta;
    let mut widen = 1.0;
    for _ in 0..4 {
        let e_cut = energy_cutoff(p, beta, settings, widen);
        let grid = GridSpec::for_cutoff(p, e_cut, settings)?;
        let (energies, states) = diagonalize(p, &grid)?;
        let e0 = energies[0];
        let kept = energies.iter().take_while(|&&e| e <= e_cut).count();
        if kept > 0 && energies[kept - 1] - e0 > window {
            let spectrum = Spectrum {
                energies: energies[..kept].to_vec(),
                states: states.columns(0, kept).into_owned(),
                grid,
                mass: p.mass(),
                hbar: p.hbar(),
            };
            spectrum.check_boundaries(settings.leak_threshold)?;
            return Ok(spectrum);
        }
        widen *= 1.5;
    }
    Err(Error::Convergence(
        "could not size a grid that resolves the thermal window".into(),
    ))
}

fn diagonalize(p: &PolynomialPotential, grid: &GridSpec) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = grid.n_points;
    let h = grid.spacing();
    let q = grid.points();
    let kin = p.hbar() * p.hbar() / (2.0 * p.mass() * h * h);
    let diag = kin * std::f64::consts::PI.powi(2) / 3.0;
    let hamiltonian = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag + p.evaluate(q[i])
        } else {
            let d = i.abs_diff(j);
            let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
            sign * kin * 2.0 / (d * d) as f64
        }
    });
    let eig = SymmetricEigen::try_new(hamiltonian, 1e-14, 10_000)
        .ok_or_else(|| Error::Convergence("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let energies: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if energies.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Convergence(
            "eigenvalues are not strictly increasing".into(),
        ));
    }
    let norm = 1.0 / h.sqrt();
    let mut states = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let peak = v.amax();
        // Fix the phase so the outermost lobe on the right is positive.
        let tail = (0..n)
            .rev()
            .find(|&i| v[i].abs() > 1e-3 * peak)
            .unwrap_or(0);
        let sign = if v[tail] < 0.0 { -norm } else { norm };
        states.set_column(col, &(v * sign));
    }
    Ok((energies, states))
}

impl Spectrum {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn n_states(&self) -> usize {
        self.energies.len()
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Grid samples of `ψ_n`.
    pub fn state(&self, n: usize) -> Vec<f64> {
        self.states.column(n).iter().copied().collect()
    }

    fn check_boundaries(&self, threshold: f64) -> Result<()> {
        let last = self.grid.n_points - 1;
        for (n, col) in self.states.column_iter().enumerate() {
            let peak = col.amax();
            let edge = col[0].abs().max(col[last].abs()) / peak;
            if edge > threshold {
                return Err(Error::BoundaryLeak {
                    state: n,
                    amplitude: edge,
                    threshold,
                });
            }
        }
        Ok(())
    }

    /// `⟨ψ_n|ψ_m⟩` under trapezoidal quadrature.
    pub fn overlap_matrix(&self) -> DMatrix<f64> {
        self.weighted_elements(|_| 1.0)
    }

    /// `M_nm = ⟨n|q̂^power|m⟩`.
    pub fn matrix_elements(&self, power: u32) -> Result<DMatrix<f64>> {
        if power == 0 {
            return Err(Error::param("power", "must be >= 1"));
        }
        Ok(self.weighted_elements(|q| q.powi(power as i32)))
    }

    fn weighted_elements(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let q = self.grid.points();
        let w = self.grid.weights();
        let mut scaled = self.states.clone();
        for (i, mut row) in scaled.row_iter_mut().enumerate() {
            row *= w[i] * f(q[i]);
        }
        let m = self.states.transpose() * scaled;
        (&m + m.transpose()) * 0.5
    }

    /// Boltzmann factors relative to the ground state, after checking that
    /// the highest retained state is negligible at this temperature.
    fn boltzmann(&self, beta: f64, tolerance: f64) -> Result<(Vec<f64>, f64)> {
        let beta = check_beta(beta)?;
        let e0 = self.energies[0];
        let bound = (-beta * (self.energies[self.n_states() - 1] - e0)).exp();
        if bound >= tolerance {
            return Err(Error::Truncation { bound, tolerance });
        }
        let b: Vec<f64> = self
            .energies
            .iter()
            .map(|e| (-beta * (e - e0)).exp())
            .collect();
        let z = b.iter().sum();
        Ok((b, z))
    }

    fn shifted(&self) -> Vec<f64> {
        let e0 = self.energies[0];
        self.energies.iter().map(|e| e - e0).collect()
    }

    fn degeneracy_tol(&self) -> f64 {
        1e-10 * (self.energies[self.n_states() - 1] - self.energies[0])
    }

    /// `Z = Σ_n exp(-βE_n)`.
    pub fn partition_function(&self, beta: f64) -> Result<f64> {
        Ok(self.log_partition_function(beta)?.exp())
    }

    pub fn log_partition_function(&self, beta: f64) -> Result<f64> {
        let (_, z) = self.boltzmann(beta, TAIL)?;
        Ok(z.ln() - beta * self.energies[0])
    }

    /// Thermal average `⟨q̂^power⟩_β`.
    pub fn thermal_expectation(&self, power: u32, beta: f64) -> Result<f64> {
        let (b, z) = self.boltzmann(beta, TAIL)?;
        let m = self.matrix_elements(power)?;
        Ok(b.iter()
            .enumerate()
            .map(|(j, bj)| bj * m[(j, j)])
            .sum::<f64>()
            / z)
    }

    /// `dQ/dJ = β ⟨δq; δq⟩_Kubo`, the static response of `⟨q̂⟩` to a
    /// constant source.
    pub fn position_susceptibility(&self, beta: f64) -> Result<f64> {
        let (b, z) = self.boltzmann(beta, TAIL)?;
        let m = self.matrix_elements(1)?;
        let e = self.shifted();
        let tol = self.degeneracy_tol();
        let mean: f64 = b
            .iter()
            .enumerate()
            .map(|(j, bj)| bj * m[(j, j)])
            .sum::<f64>()
            / z;
        let mut sum = 0.0;
        for j in 0..self.n_states() {
            for k in 0..self.n_states() {
                sum += m[(j, k)].powi(2) * kernel::single(beta, e[j], e[k], tol);
            }
        }
        Ok(sum / z - beta * mean * mean)
    }

    fn meta(&self, method: &str, beta: f64, order: u32, axis: TimeAxis) -> SeriesMeta {
        SeriesMeta {
            method: method.into(),
            beta,
            order,
            axis,
            potential_hash: None,
            grid: Some(self.grid),
        }
    }

    /// `⟨q̂ⁿ(t) q̂ⁿ(0)⟩_β = Z⁻¹ Σ_{jk} e^{-βE_j} |⟨j|q̂ⁿ|k⟩|² e^{i(E_j−E_k)t/ħ}`.
    pub fn exact_corr(&self, n: u32, beta: f64, times: &[f64]) -> Result<CorrelationSeries> {
        let (b, z) = self.boltzmann(beta, TAIL)?;
        let m = self.matrix_elements(n)?;
        let terms = self.pair_terms(&m, |j, k| b[j] * m[(j, k)].powi(2) / z);
        let values = times.iter().map(|&t| oscillate(&terms, t)).collect();
        CorrelationSeries::new(
            self.meta("exact", beta, n, TimeAxis::Real),
            times.to_vec(),
            values,
        )
    }

    /// `⟨T q̂ⁿ(τ) q̂ⁿ(0)⟩_β` for `0 ≤ τ ≤ βħ`.
    pub fn exact_imag_corr(&self, n: u32, beta: f64, taus: &[f64]) -> Result<CorrelationSeries> {
        let (_, z) = self.boltzmann(beta, TAIL)?;
        let upper = beta * self.hbar;
        for &tau in taus {
            if !(tau >= 0.0 && tau <= upper * (1.0 + 1e-14)) {
                return Err(Error::Domain { value: tau, upper });
            }
        }
        let m = self.matrix_elements(n)?;
        let e = self.shifted();
        let ns = self.n_states();
        let values = taus
            .iter()
            .map(|&tau| {
                let s = (tau / self.hbar).min(beta);
                let mut acc = 0.0;
                for j in 0..ns {
                    for k in 0..ns {
                        acc += m[(j, k)].powi(2) * (-(beta - s) * e[j] - s * e[k]).exp();
                    }
                }
                Complex64::new(acc / z, 0.0)
            })
            .collect();
        CorrelationSeries::new(
            self.meta("exact_imaginary", beta, n, TimeAxis::Imaginary),
            taus.to_vec(),
            values,
        )
    }

    /// Canonical (Kubo-transformed) autocorrelation of `q̂ⁿ`,
    /// `β⁻¹ ∫₀^β dλ ⟨q̂ⁿ(t − iħλ) q̂ⁿ(0)⟩_β`.
    pub fn kubo_corr(&self, n: u32, beta: f64, times: &[f64]) -> Result<CorrelationSeries> {
        let (_, z) = self.boltzmann(beta, TAIL)?;
        let m = self.matrix_elements(n)?;
        let e = self.shifted();
        let tol = self.degeneracy_tol();
        let terms = self.pair_terms(&m, |j, k| {
            m[(j, k)].powi(2) * kernel::single(beta, e[j], e[k], tol) / (beta * z)
        });
        let values = times.iter().map(|&t| oscillate(&terms, t)).collect();
        CorrelationSeries::new(
            self.meta("kubo", beta, n, TimeAxis::Real),
            times.to_vec(),
            values,
        )
    }

    /// Second-order Kubo transform
    /// `(2/β²) ∫∫_{0<η<λ<β} ⟨q̂(t − iħλ) q̂(t − iħη) q̂²(0)⟩_β`, summed over
    /// `(j, k, l)` with the double imaginary-time integral in closed form.
    pub fn kubo2_corr(&self, beta: f64, times: &[f64]) -> Result<CorrelationSeries> {
        let (_, z) = self.boltzmann(beta, TAIL)?;
        let q1 = self.matrix_elements(1)?;
        let q2 = self.matrix_elements(2)?;
        let e = self.shifted();
        let tol = self.degeneracy_tol();
        let ns = self.n_states();
        let norm = 2.0 / (beta * beta * z);
        let mut terms = Vec::with_capacity(ns * ns);
        for j in 0..ns {
            for l in 0..ns {
                let s: f64 = (0..ns)
                    .map(|k| q1[(j, k)] * q1[(k, l)] * kernel::double(beta, e[j], e[k], e[l], tol))
                    .sum();
                let weight = norm * s * q2[(l, j)];
                if weight != 0.0 {
                    terms.push(((e[j] - e[l]) / self.hbar, weight));
                }
            }
        }
        let values = times.iter().map(|&t| oscillate(&terms, t)).collect();
        CorrelationSeries::new(
            self.meta("kubo2", beta, 2, TimeAxis::Real),
            times.to_vec(),
            values,
        )
    }

    /// `(ω_jk, weight)` pairs for sums of the form `Σ weight·e^{iω_jk t}`.
    fn pair_terms(
        &self,
        _m: &DMatrix<f64>,
        weight: impl Fn(usize, usize) -> f64,
    ) -> Vec<(f64, f64)> {
        let ns = self.n_states();
        let mut terms = Vec::with_capacity(ns * ns);
        for j in 0..ns {
            for k in 0..ns {
                let w = weight(j, k);
                if w != 0.0 {
                    terms.push(((self.energies[j] - self.energies[k]) / self.hbar, w));
                }
            }
        }
        terms
    }
}

/// Truncation tolerance applied by the thermal evaluators.
const TAIL: f64 = 1e-12;

fn oscillate(terms: &[(f64, f64)], t: f64) -> Complex64 {
    terms
        .iter()
        .map(|&(omega, w)| Complex64::from_polar(w, omega * t))
        .sum()
}

/// Closed-form imaginary-time integrals of Boltzmann factors.
///
/// With `f(x) = e^{-βx}`, `single(a, b) = ∫₀^β e^{-(β−λ)a − λb} dλ = −f[a, b]`
/// and `double(a, b, c) = ∫∫_{0<η<λ<β} e^{-(β−λ)a − (λ−η)b − ηc} = f[a, b, c]`
/// (divided differences). Both are symmetric in their energy arguments and
/// evaluated relative to the smallest one, switching to Taylor series when the
/// spread is small so coincident energies take the analytic limit.
pub mod kernel {
    /// `(1 − e^{-x})/x`, equal to 1 at `x = 0`.
    fn decay_ratio(x: f64) -> f64 {
        if x.abs() < 1e-8 {
            1.0 - 0.5 * x
        } else {
            -(-x).exp_m1() / x
        }
    }

    fn snap(d: f64, tol: f64) -> f64 {
        if d.abs() < tol {
            0.0
        } else {
            d
        }
    }

    pub fn single(beta: f64, a: f64, b: f64, tol: f64) -> f64 {
        let lo = a.min(b);
        let d = snap((a - b).abs(), tol);
        (-beta * lo).exp() * beta * decay_ratio(beta * d)
    }

    pub fn double(beta: f64, a: f64, b: f64, c: f64, tol: f64) -> f64 {
        let mut x = [a, b, c];
        x.sort_by(f64::total_cmp);
        let d1 = snap(x[1] - x[0], tol);
        let d2 = snap(x[2] - x[0], tol);
        (-beta * x[0]).exp() * shifted_double(beta, d1, d2)
    }

    /// `g[0, d1, d2]` for `g(y) = e^{-βy}`, `0 ≤ d1 ≤ d2`.
    fn shifted_double(beta: f64, d1: f64, d2: f64) -> f64 {
        if beta * d2 < 0.1 {
            // Σ_k (−β)^{k+2}/(k+2)! · h_k(d1, d2)
            let mut total = 0.0;
            let mut coeff = beta * beta / 2.0;
            let (u, v) = (beta * d1, beta * d2);
            for k in 0..40usize {
                let h: f64 = (0..=k)
                    .map(|i| u.powi(i as i32) * v.powi((k - i) as i32))
                    .sum();
                let term = coeff * h;
                total += term;
                if term.abs() < 1e-18 * total.abs() {
                    break;
                }
                coeff *= -1.0 / (k + 3) as f64;
            }
            total
        } else {
            let g01 = -beta * decay_ratio(beta * d1);
            let g12 = -(-beta * d1).exp() * beta * decay_ratio(beta * (d2 - d1));
            (g12 - g01) / d2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic() -> PolynomialPotential {
        PolynomialPotential::harmonic(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn degenerate_single_kernel_is_beta() {
        assert_eq!(kernel::single(2.5, 0.0, 0.0, 1e-12), 2.5);
        // ∫₀^β e^{-λ x} dλ = (1 − e^{-βx})/x
        let x: f64 = 0.7;
        let expect = (1.0 - (-2.0 * x).exp()) / x;
        assert!((kernel::single(2.0, 0.0, x, 0.0) - expect).abs() < 1e-15);
    }

    #[test]
    fn double_kernel_matches_quadrature() {
        // Brute-force midpoint rule over the triangle 0 < η < λ < β.
        let quad = |beta: f64, a: f64, b: f64, c: f64| {
            let n = 1500;
            let h = beta / n as f64;
            let mut s = 0.0;
            for i in 0..n {
                let lam = (i as f64 + 0.5) * h;
                let m = ((lam / h).round() as usize).max(1);
                let hh = lam / m as f64;
                for k in 0..m {
                    let eta = (k as f64 + 0.5) * hh;
                    s += h * hh * (-(beta - lam) * a - (lam - eta) * b - eta * c).exp();
                }
            }
            s
        };
        for &(beta, a, b, c) in &[
            (1.0, 0.0, 1.0, 2.0),
            (2.0, 0.3, 0.3, 1.1),
            (1.5, 0.0, 0.0, 0.0),
            (3.0, 2.0, 0.0, 0.01),
            (0.5, 0.0, 1e-3, 4.0),
        ] {
            let exact = kernel::double(beta, a, b, c, 0.0);
            let brute = quad(beta, a, b, c);
            assert!(
                (exact - brute).abs() < 2e-5 * brute.abs(),
                "{beta} {a} {b} {c}: {exact} vs {brute}"
            );
        }
        // analytic limit a = b = c: β²/2 e^{-βa}
        assert!((kernel::double(2.0, 1.0, 1.0, 1.0, 1e-12) - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn double_kernel_is_continuous_across_series_switch() {
        let beta = 2.0;
        let below = kernel::double(beta, 0.0, 0.01, 0.0499999, 0.0);
        let above = kernel::double(beta, 0.0, 0.01, 0.0500001, 0.0);
        assert!((below - above).abs() < 1e-6 * below);
    }

    #[test]
    fn harmonic_ladder_and_orthonormality() {
        let grid = GridSpec::new(-10.0, 10.0, 201).unwrap();
        let s = solve_eigen(&harmonic(), grid, 11).unwrap();
        for (n, e) in s.energies().iter().enumerate() {
            assert!((e - (n as f64 + 0.5)).abs() < 1e-6, "E_{n} = {e}");
        }
        let o = s.overlap_matrix();
        for i in 0..11 {
            for j in 0..11 {
                let d = if i == j { 1.0 } else { 0.0 };
                assert!((o[(i, j)] - d).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn harmonic_matrix_elements() {
        let grid = GridSpec::new(-10.0, 10.0, 201).unwrap();
        let s = solve_eigen(&harmonic(), grid, 10).unwrap();
        let q1 = s.matrix_elements(1).unwrap();
        let q2 = s.matrix_elements(2).unwrap();
        assert!((q1[(0, 1)] - 0.5f64.sqrt()).abs() < 1e-6);
        assert!((q2[(0, 0)] - 0.5).abs() < 1e-6);
        assert!((q2[(0, 2)] - 0.5f64.sqrt()).abs() < 1e-6);
        assert!(q2[(0, 1)].abs() < 1e-10);
        assert!(s.matrix_elements(0).is_err());
    }

    #[test]
    fn boundary_leak_detected() {
        let grid = GridSpec::new(-2.0, 2.0, 41).unwrap();
        let err = solve_eigen(&harmonic(), grid, 5).unwrap_err();
        assert!(matches!(err, Error::BoundaryLeak { .. }), "{err}");
    }

    #[test]
    fn harmonic_partition_function() {
        let grid = GridSpec::new(-12.0, 12.0, 241).unwrap();
        let s = solve_eigen(&harmonic(), grid, 34).unwrap();
        let z1 = s.partition_function(1.0).unwrap();
        let expect = (-0.5f64).exp() / (1.0 - (-1.0f64).exp());
        assert!((z1 - expect).abs() < 1e-10);
        let z10 = s.partition_function(10.0).unwrap();
        assert!((z10 / (-5.0f64).exp() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn truncation_error_when_too_few_states() {
        let grid = GridSpec::new(-10.0, 10.0, 201).unwrap();
        let s = solve_eigen(&harmonic(), grid, 5).unwrap();
        assert!(matches!(
            s.partition_function(1.0),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn imag_corr_domain_checked() {
        let p = harmonic();
        let s = solve_thermal(&p, 1.0, &SolverSettings::default()).unwrap();
        assert!(matches!(
            s.exact_imag_corr(1, 1.0, &[1.5]),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn auto_grid_retains_thermal_window() {
        let p = PolynomialPotential::asymmetric_quartic();
        let settings = SolverSettings::default();
        for beta in [0.1, 1.0, 10.0] {
            let s = solve_thermal(&p, beta, &settings).unwrap();
            let e = s.energies();
            let bound = (-beta * (e[e.len() - 1] - e[0])).exp();
            assert!(bound < 1e-12, "beta {beta}: {bound}");
        }
    }
}
