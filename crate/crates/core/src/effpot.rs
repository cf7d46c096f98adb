//! Standard effective potential from the constant-source generating function.
//!
//! For a constant source `J` the tilted Hamiltonian `H − Jq̂` gives
//! `w(J) = β⁻¹ ln Tr e^{-β(H − Jq̂)}` and `Q(J) = dw/dJ = ⟨q̂⟩_J`. The effective
//! potential is the Legendre transform `V_β(Q) = JQ − w(J)`, so along the
//! sampled curve `dV_β/dQ = J`: the source values double as exact slopes.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_beta, PolynomialPotential};
use crate::pimc::{self, PimcConfig, PimcEstimate};
use crate::spectral::{solve_thermal, SolverSettings};

/// Sampled `J ↦ (w(J), Q(J))` at fixed `β`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratingData {
    pub beta: f64,
    pub mass: f64,
    pub hbar: f64,
    pub sources: Vec<f64>,
    pub w_values: Vec<f64>,
    pub q_values: Vec<f64>,
    /// Standard errors of `Q(J)` for stochastic backends.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_stderr: Option<Vec<f64>>,
}

impl GeneratingData {
    pub fn new(
        beta: f64,
        mass: f64,
        hbar: f64,
        sources: Vec<f64>,
        w_values: Vec<f64>,
        q_values: Vec<f64>,
    ) -> Result<Self> {
        let beta = check_beta(beta)?;
        if sources.len() != w_values.len() || sources.len() != q_values.len() {
            return Err(Error::param("generating data", "length mismatch"));
        }
        check_sources(&sources)?;
        if let Some(index) = q_values.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NonMonotonic {
                index: index + 1,
                source_value: sources[index + 1],
            });
        }
        Ok(Self {
            beta,
            mass,
            hbar,
            sources,
            w_values,
            q_values,
            q_stderr: None,
        })
    }

    /// Index of the `J = 0` node.
    pub fn zero_index(&self) -> usize {
        self.sources
            .iter()
            .position(|&j| j == 0.0)
            .expect("validated source grid contains zero")
    }
}

fn check_sources(sources: &[f64]) -> Result<()> {
    if sources.len() < 3 || sources.windows(2).any(|w| !(w[1] > w[0])) || !sources.contains(&0.0) {
        return Err(Error::SourceGrid);
    }
    Ok(())
}

/// Uniform source grid sized so that `Q(J)` spans a target window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SourceGridSpec {
    /// Window of `Q`, relative to the classical minimum, to be covered.
    pub q_window: (f64, f64),
    /// Odd so that `J = 0` is a node.
    pub n_points: usize,
    /// Headroom factor on the classical force at the window edges.
    pub margin: f64,
}

impl Default for SourceGridSpec {
    fn default() -> Self {
        Self {
            q_window: (-4.0, 2.0),
            n_points: 201,
            margin: 1.1,
        }
    }
}

impl SourceGridSpec {
    /// `J ∈ [−J_max, J_max]` with `J_max = margin · max |V'(q)|` over the
    /// window edges.
    pub fn sources(&self, p: &PolynomialPotential) -> Result<Vec<f64>> {
        if self.n_points < 5 || self.n_points.is_multiple_of(2) {
            return Err(Error::param("source n_points", "must be odd and >= 5"));
        }
        let (q0, _) = p.global_minimum();
        let j_max = self.margin
            * p.derivative(q0 + self.q_window.0)
                .abs()
                .max(p.derivative(q0 + self.q_window.1).abs());
        if !(j_max > 0.0 && j_max.is_finite()) {
            return Err(Error::param("q_window", "gives a degenerate source range"));
        }
        let mut j = crate::series::linspace(-j_max, j_max, self.n_points);
        j[self.n_points / 2] = 0.0;
        Ok(j)
    }
}

/// Exact backend: one thermal eigensolve of `V(q) − Jq` per source value.
pub fn generating_data_spectral(
    p: &PolynomialPotential,
    beta: f64,
    sources: &[f64],
    settings: &SolverSettings,
) -> Result<GeneratingData> {
    check_sources(sources)?;
    let mut w = Vec::with_capacity(sources.len());
    let mut q = Vec::with_capacity(sources.len());
    for &j in sources {
        let s = solve_thermal(&p.tilted(j), beta, settings)?;
        w.push(s.log_partition_function(beta)? / beta);
        q.push(s.thermal_expectation(1, beta)?);
    }
    GeneratingData::new(beta, p.mass(), p.hbar(), sources.to_vec(), w, q)
}

/// Stochastic backend: `Q(J)` from path-integral Monte Carlo and
/// `w(J) − w(0)` by thermodynamic integration. The constant `w(0)` is not
/// estimated here and is set to zero, which shifts `V_β` by a constant.
pub fn generating_data_pimc(
    p: &PolynomialPotential,
    beta: f64,
    sources: &[f64],
    cfg: &PimcConfig,
) -> Result<GeneratingData> {
    check_sources(sources)?;
    // Distinct seeds keep the chains independent, as the error propagation
    // in the integration assumes.
    let samples: Vec<(f64, PimcEstimate)> = sources
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            let node_cfg = PimcConfig {
                seed: cfg.seed.wrapping_add(i as u64),
                ..*cfg
            };
            pimc::sample_tilted_q(p, beta, j, &node_cfg).map(|e| (j, e))
        })
        .collect::<Result<_>>()?;
    let integrated = pimc::thermo_integrate(&samples)?;
    let q: Vec<f64> = samples.iter().map(|(_, e)| e.mean).collect();
    let stderr: Vec<f64> = samples.iter().map(|(_, e)| e.stderr).collect();
    let w: Vec<f64> = integrated.iter().map(|r| r.value).collect();
    let mut gd = GeneratingData::new(beta, p.mass(), p.hbar(), sources.to_vec(), w, q)?;
    gd.q_stderr = Some(stderr);
    Ok(gd)
}

/// `V_β` sampled on the nonuniform grid induced by the source values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectivePotentialCurve {
    pub beta: f64,
    pub mass: f64,
    pub hbar: f64,
    pub q_grid: Vec<f64>,
    pub v_values: Vec<f64>,
    /// `dV_β/dQ` at each node, equal to the generating source value.
    pub slopes: Vec<f64>,
}

/// Tolerance on second divided differences for the convexity check.
pub const CONVEXITY_TOLERANCE: f64 = 1e-9;

/// `V_β(Q(J)) = −w(J) + J·Q(J)` pointwise, followed by a convexity check.
pub fn legendre_transform(gd: &GeneratingData) -> Result<EffectivePotentialCurve> {
    let v: Vec<f64> = gd
        .sources
        .iter()
        .zip(&gd.w_values)
        .zip(&gd.q_values)
        .map(|((&j, &w), &q)| -w + j * q)
        .collect();
    let curve = EffectivePotentialCurve {
        beta: gd.beta,
        mass: gd.mass,
        hbar: gd.hbar,
        q_grid: gd.q_values.clone(),
        v_values: v,
        slopes: gd.sources.clone(),
    };
    curve.check_convex(CONVEXITY_TOLERANCE)?;
    Ok(curve)
}

impl EffectivePotentialCurve {
    pub fn len(&self) -> usize {
        self.q_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q_grid.is_empty()
    }

    /// Second divided differences, one per interior node.
    pub fn second_differences(&self) -> Vec<f64> {
        let (q, v) = (&self.q_grid, &self.v_values);
        (1..q.len().saturating_sub(1))
            .map(|i| {
                let right = (v[i + 1] - v[i]) / (q[i + 1] - q[i]);
                let left = (v[i] - v[i - 1]) / (q[i] - q[i - 1]);
                2.0 * (right - left) / (q[i + 1] - q[i - 1])
            })
            .collect()
    }

    pub fn check_convex(&self, tolerance: f64) -> Result<()> {
        for (i, d) in self.second_differences().into_iter().enumerate() {
            if d < -tolerance {
                return Err(Error::Convexity {
                    q: self.q_grid[i + 1],
                    second_difference: d,
                });
            }
        }
        Ok(())
    }

    /// Node with the smallest `V_β`.
    pub fn argmin(&self) -> usize {
        self.v_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// Copy shifted so the smallest sampled value is zero. When the source
    /// grid contains `J = 0` that node is the exact minimum.
    pub fn normalized(&self) -> Self {
        let shift = self.v_values[self.argmin()];
        let mut out = self.clone();
        out.v_values.iter_mut().for_each(|v| *v -= shift);
        out
    }

    /// Cubic Hermite interpolant of `V_β` using the exact node slopes.
    pub fn interpolate(&self, q: f64) -> Option<f64> {
        let i = self.segment(q)?;
        Some(self.hermite(i, q).0)
    }

    fn segment(&self, q: f64) -> Option<usize> {
        let g = &self.q_grid;
        if g.len() < 2 || !(q >= g[0] && q <= g[g.len() - 1]) {
            return None;
        }
        let i = g.partition_point(|&x| x <= q).clamp(1, g.len() - 1) - 1;
        Some(i)
    }

    /// Value and slope of the Hermite cubic on segment `i`.
    fn hermite(&self, i: usize, q: f64) -> (f64, f64) {
        let (x0, x1) = (self.q_grid[i], self.q_grid[i + 1]);
        let (y0, y1) = (self.v_values[i], self.v_values[i + 1]);
        let (m0, m1) = (self.slopes[i], self.slopes[i + 1]);
        let h = x1 - x0;
        let s = (q - x0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * m1;
        let slope = ((6.0 * s2 - 6.0 * s) * y0 + (-6.0 * s2 + 6.0 * s) * y1) / h
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (3.0 * s2 - 2.0 * s) * m1;
        (value, slope)
    }

    /// `w(J) = sup_Q [JQ − V_β(Q)]` over the interpolated curve. Returns
    /// `None` when `J` lies outside the sampled slope range.
    pub fn convex_conjugate(&self, j: f64) -> Option<f64> {
        let s = &self.slopes;
        if !(j >= s[0] && j <= s[s.len() - 1]) {
            return None;
        }
        let i = s.partition_point(|&x| x <= j).clamp(1, s.len() - 1) - 1;
        // The Hermite slope moves from s[i] to s[i+1] on this segment; bisect
        // for the stationary point of JQ − V.
        let (mut lo, mut hi) = (self.q_grid[i], self.q_grid[i + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.hermite(i, mid).1 < j {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * mid.abs().max(1.0) {
                break;
            }
        }
        let q = 0.5 * (lo + hi);
        Some(j * q - self.hermite(i, q).0)
    }
}

/// Local expansion of `V_β` about its minimum:
/// `V_β(Q) ≈ V_β(Q_min) + a₂δ²/2 + a₃δ³/6 + a₄δ⁴/24`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveExpansion {
    #[serde(rename = "Q_min")]
    pub q_min: f64,
    pub omega_beta: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    /// `βħω_β/2`.
    pub alpha: f64,
    pub beta: f64,
    pub mass: f64,
    pub hbar: f64,
}

impl EffectiveExpansion {
    pub fn new(
        q_min: f64,
        a2: f64,
        a3: f64,
        a4: f64,
        beta: f64,
        mass: f64,
        hbar: f64,
    ) -> Result<Self> {
        let beta = check_beta(beta)?;
        if !(a2 > 0.0 && a2.is_finite()) {
            return Err(Error::param("a2", format!("{a2} must be positive")));
        }
        if !(q_min.is_finite() && a3.is_finite() && a4.is_finite()) {
            return Err(Error::param("expansion", "non-finite coefficient"));
        }
        if !(mass > 0.0 && hbar > 0.0) {
            return Err(Error::param("mass/hbar", "must be positive"));
        }
        let omega_beta = (a2 / mass).sqrt();
        Ok(Self {
            q_min,
            omega_beta,
            a2,
            a3,
            a4,
            alpha: beta * hbar * omega_beta / 2.0,
            beta,
            mass,
            hbar,
        })
    }

    /// Harmonic system, for which `V_β(Q) − V_β(0) = ½mω²Q²` at every `β`.
    pub fn harmonic(omega: f64, beta: f64, mass: f64, hbar: f64) -> Result<Self> {
        Self::new(0.0, mass * omega * omega, 0.0, 0.0, beta, mass, hbar)
    }

    /// `(Q_min, ω_β, a₃, a₄)`, the quantities tabulated per temperature.
    pub fn row(&self) -> [f64; 4] {
        [self.q_min, self.omega_beta, self.a3, self.a4]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitSettings {
    /// Half-width of the fit window around the minimum.
    pub window: f64,
    pub degree: usize,
    pub recenter_iterations: usize,
}

impl Default for FitSettings {
    fn default() -> Self {
        Self {
            window: 0.5,
            degree: 6,
            recenter_iterations: 3,
        }
    }
}

/// Least-squares polynomial fit of `V_β` in a window around its minimum;
/// `a_n` are the fitted derivatives at the stationary point.
pub fn extract_expansion(
    curve: &EffectivePotentialCurve,
    fit: &FitSettings,
) -> Result<EffectiveExpansion> {
    if fit.degree < 4 {
        return Err(Error::param("degree", "must be >= 4 to resolve a4"));
    }
    if !(fit.window > 0.0) {
        return Err(Error::param("window", "must be positive"));
    }
    let q = &curve.q_grid;
    let last = q.len() - 1;
    let k = curve.argmin();
    if k == 0 || k == last {
        return Err(Error::MinimumAtBoundary(q[k]));
    }
    let mut center = q[k];
    let mut fitted = None;
    for _ in 0..fit.recenter_iterations.max(1) {
        if center - fit.window < q[0] || center + fit.window > q[last] {
            return Err(Error::MinimumAtBoundary(center));
        }
        let poly = window_fit(curve, center, fit)?;
        let x = poly.stationary_point()?;
        fitted = Some((center, poly, x));
        center += x;
    }
    let (_, poly, x) = fitted.expect("at least one fit iteration");
    let a = |n: usize| poly.derivative(n, x);
    EffectiveExpansion::new(center, a(2), a(3), a(4), curve.beta, curve.mass, curve.hbar)
}

/// Polynomial in `(Q − center)/scale`.
struct ScaledPoly {
    coeffs: Vec<f64>,
    scale: f64,
}

impl ScaledPoly {
    /// `n`-th derivative with respect to `Q` at offset `x = Q − center`.
    fn derivative(&self, n: usize, x: f64) -> f64 {
        let u = x / self.scale;
        let mut acc = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate().skip(n).rev() {
            let falling: f64 = (k - n + 1..=k).map(|i| i as f64).product();
            acc = acc * u + c * falling;
        }
        // Horner above runs over consecutive k, so the power of u is k − n.
        acc / self.scale.powi(n as i32)
    }

    fn stationary_point(&self) -> Result<f64> {
        let mut x = 0.0;
        for _ in 0..100 {
            let d2 = self.derivative(2, x);
            if !(d2 > 0.0) {
                return Err(Error::IllConditionedFit(
                    "fitted curvature is not positive near the minimum".into(),
                ));
            }
            let step = self.derivative(1, x) / d2;
            x -= step;
            if step.abs() < 1e-15 * self.scale {
                return Ok(x);
            }
        }
        if self.derivative(1, x).abs() < 1e-10 * self.derivative(2, x) * self.scale {
            Ok(x)
        } else {
            Err(Error::IllConditionedFit(
                "stationary point did not converge".into(),
            ))
        }
    }
}

fn window_fit(
    curve: &EffectivePotentialCurve,
    center: f64,
    fit: &FitSettings,
) -> Result<ScaledPoly> {
    let pts: Vec<(f64, f64)> = curve
        .q_grid
        .iter()
        .zip(&curve.v_values)
        .filter(|(q, _)| (**q - center).abs() <= fit.window)
        .map(|(&q, &v)| ((q - center) / fit.window, v))
        .collect();
    let below = pts.iter().filter(|p| p.0 < 0.0).count();
    let above = pts.len() - below;
    let ncoef = fit.degree + 1;
    if pts.len() < ncoef + 2 || below < 2 || above < 2 {
        return Err(Error::IllConditionedFit(format!(
            "{} points in window ({below} below, {above} above) for degree {}",
            pts.len(),
            fit.degree
        )));
    }
    let a = DMatrix::from_fn(pts.len(), ncoef, |i, k| pts[i].0.powi(k as i32));
    let b = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let svd = a.svd(true, true);
    let sv = &svd.singular_values;
    let cond = sv.max() / sv.min();
    if !(cond < 1e10) {
        return Err(Error::IllConditionedFit(format!(
            "condition number {cond:.3e}"
        )));
    }
    let coeffs = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::IllConditionedFit(e.to_string()))?;
    Ok(ScaledPoly {
        coeffs: coeffs.iter().copied().collect(),
        scale: fit.window,
    })
}

/// Expansion without a curve fit. Since `dV_β/dQ = J`, the minimum is
/// `Q(0)` and `a₂ = 1/χ(0)` with `χ = dQ/dJ`; higher coefficients follow from
/// `d/dQ = a₂ d/dJ`: `a₃ = a₂a₂'` and `a₄ = a₂(a₂'² + a₂a₂'')`, where primes
/// are five-point central differences in `J`.
pub fn expansion_direct(
    p: &PolynomialPotential,
    beta: f64,
    settings: &SolverSettings,
) -> Result<EffectiveExpansion> {
    let beta = check_beta(beta)?;
    let s0 = solve_thermal(p, beta, settings)?;
    let q_min = s0.thermal_expectation(1, beta)?;
    let chi0 = s0.position_susceptibility(beta)?;
    let a2_0 = 1.0 / chi0;
    let spread = (s0.thermal_expectation(2, beta)? - q_min * q_min)
        .max(0.0)
        .sqrt();
    let dj = 0.05 * a2_0 * spread;
    let a2_at = |j: f64| -> Result<f64> {
        let s = solve_thermal(&p.tilted(j), beta, settings)?;
        Ok(1.0 / s.position_susceptibility(beta)?)
    };
    let f = [
        a2_at(-2.0 * dj)?,
        a2_at(-dj)?,
        a2_0,
        a2_at(dj)?,
        a2_at(2.0 * dj)?,
    ];
    let d1 = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * dj);
    let d2 = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * dj * dj);
    let a3 = a2_0 * d1;
    let a4 = a2_0 * (d1 * d1 + a2_0 * d2);
    EffectiveExpansion::new(q_min, a2_0, a3, a4, beta, p.mass(), p.hbar())
}

/// Full spectral pipeline: source grid, tilted solves, transform and fit.
pub fn expansion_from_spectral(
    p: &PolynomialPotential,
    beta: f64,
    grid: &SourceGridSpec,
    settings: &SolverSettings,
    fit: &FitSettings,
) -> Result<(EffectivePotentialCurve, EffectiveExpansion)> {
    let sources = grid.sources(p)?;
    let gd = generating_data_spectral(p, beta, &sources, settings)?;
    let curve = legendre_transform(&gd)?;
    let expansion = extract_expansion(&curve, fit)?;
    Ok((curve, expansion))
}

/// One row of published benchmark expansion coefficients for the asymmetric
/// quartic oscillator `½q² + q³/10 + q⁴/100`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub beta: f64,
    #[serde(rename = "Q_min")]
    pub q_min: f64,
    pub omega_beta: f64,
    pub a3: f64,
    pub a4: f64,
}

impl BenchmarkRow {
    pub fn values(&self) -> [f64; 4] {
        [self.q_min, self.omega_beta, self.a3, self.a4]
    }
}

pub const BENCHMARK_EXPANSIONS: [BenchmarkRow; 4] = [
    BenchmarkRow {
        beta: 0.1,
        q_min: -1.3735019,
        omega_beta: 1.07083695,
        a3: 0.10132291,
        a4: 0.1018375,
    },
    BenchmarkRow {
        beta: 1.0,
        q_min: -0.3375973,
        omega_beta: 0.91069063,
        a3: 0.41549732,
        a4: 0.3305302,
    },
    BenchmarkRow {
        beta: 10.0,
        q_min: -0.1501482,
        omega_beta: 0.96628105,
        a3: 0.54407872,
        a4: 0.2606658,
    },
    BenchmarkRow {
        beta: 100.0,
        q_min: -0.1501276,
        omega_beta: 0.96631313,
        a3: 0.54396628,
        a4: 0.2608735,
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic_data(beta: f64) -> GeneratingData {
        let p = PolynomialPotential::harmonic(1.0, 1.0, 1.0).unwrap();
        let sources = crate::series::linspace(-2.0, 2.0, 41);
        let mut sources = sources;
        sources[20] = 0.0;
        generating_data_spectral(&p, beta, &sources, &SolverSettings::default()).unwrap()
    }

    #[test]
    fn harmonic_shift() {
        let gd = harmonic_data(1.0);
        let k = gd.zero_index();
        let i = gd
            .sources
            .iter()
            .position(|&j| (j - 0.5).abs() < 1e-12)
            .unwrap();
        assert!((gd.q_values[i] - 0.5).abs() < 1e-8);
        assert!((gd.w_values[i] - gd.w_values[k] - 0.125).abs() < 1e-8);
    }

    #[test]
    fn harmonic_effective_potential() {
        let curve = legendre_transform(&harmonic_data(1.0)).unwrap();
        let c = (2.0 * 0.5f64.sinh()).ln();
        for (q, v) in curve.q_grid.iter().zip(&curve.v_values) {
            assert!((v - (0.5 * q * q + c)).abs() < 1e-8);
        }
        let e = extract_expansion(&curve, &FitSettings::default()).unwrap();
        assert!(e.q_min.abs() < 1e-6);
        assert!((e.omega_beta - 1.0).abs() < 1e-6);
        assert!(e.a3.abs() < 1e-6 && e.a4.abs() < 1e-6);
    }

    #[test]
    fn conjugate_recovers_w_off_nodes() {
        let gd = harmonic_data(1.0);
        let curve = legendre_transform(&gd).unwrap();
        let w0 = gd.w_values[gd.zero_index()];
        for j in [-1.23, -0.01, 0.37, 1.91] {
            let w = curve.convex_conjugate(j).unwrap();
            assert!((w - (w0 + 0.5 * j * j)).abs() < 1e-8, "{j}");
        }
        assert!(curve.convex_conjugate(5.0).is_none());
    }

    #[test]
    fn normalized_minimum_is_zero() {
        let curve = legendre_transform(&harmonic_data(10.0))
            .unwrap()
            .normalized();
        let min = curve.v_values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(min, 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            GeneratingData::new(
                1.0,
                1.0,
                1.0,
                vec![-1.0, 0.0, 1.0],
                vec![0.0; 3],
                vec![0.0, 0.1, 0.05]
            ),
            Err(Error::NonMonotonic { index: 2, .. })
        ));
        assert!(matches!(
            GeneratingData::new(
                1.0,
                1.0,
                1.0,
                vec![0.1, 0.2, 0.3],
                vec![0.0; 3],
                vec![0.0, 0.1, 0.2]
            ),
            Err(Error::SourceGrid)
        ));
        let curve = EffectivePotentialCurve {
            beta: 1.0,
            mass: 1.0,
            hbar: 1.0,
            q_grid: vec![0.0, 1.0, 2.0, 3.0],
            v_values: vec![3.0, 2.0, 1.0, 0.0],
            slopes: vec![-1.0; 4],
        };
        assert!(matches!(
            extract_expansion(&curve, &FitSettings::default()),
            Err(Error::MinimumAtBoundary(_))
        ));
        let bumpy = EffectivePotentialCurve {
            v_values: vec![0.0, 1.0, 0.5, 2.0],
            ..curve
        };
        assert!(matches!(
            bumpy.check_convex(1e-9),
            Err(Error::Convexity { .. })
        ));
    }

    #[test]
    fn too_narrow_window_is_ill_conditioned() {
        let curve = legendre_transform(&harmonic_data(1.0)).unwrap();
        let fit = FitSettings {
            window: 0.15,
            ..FitSettings::default()
        };
        assert!(matches!(
            extract_expansion(&curve, &fit),
            Err(Error::IllConditionedFit(_))
        ));
    }

    #[test]
    fn scaled_poly_derivatives() {
        // p(u) = 1 + 2u + 3u², u = x/2 → p''(x) = 6/4
        let p = ScaledPoly {
            coeffs: vec![1.0, 2.0, 3.0],
            scale: 2.0,
        };
        assert!((p.derivative(2, 0.7) - 1.5).abs() < 1e-15);
        assert!((p.derivative(1, 2.0) - (1.0 + 3.0)).abs() < 1e-15);
        assert!((p.derivative(0, 2.0) - 6.0).abs() < 1e-15);
    }
}
