//! Effective potential analytic continuation.
//!
//! Expanding `V_β` to fourth order about its minimum and keeping the free
//! kinetic term gives closed-form imaginary-time Green functions for `q̂` and
//! `q̂²`. Continuing `τ → it` yields the real-time correlator
//! `a₄A(t) + a₃²B(t) + a₃Q_min·C(t) + D(t)`; keeping only the quadratic part
//! of `V_β` leaves the bounded `D(t)`.
//!
//! Every bracket is a sum of `e^{kα}` terms over `(e^α − e^{-α})ⁿ`. For
//! `α < 50` it is evaluated as written; above that each exponent is shifted
//! by `−nα` and the denominator becomes `(1 − e^{-2α})ⁿ`, which cannot
//! overflow for any `α`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::effpot::EffectiveExpansion;
use crate::error::{Error, Result};
use crate::series::{CorrelationSeries, SeriesMeta, TimeAxis};

/// `α` above which the shifted (overflow-free) form is used.
pub const STABLE_ALPHA: f64 = 50.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpacInputs {
    pub expansion: EffectiveExpansion,
}

impl EpacInputs {
    pub fn new(expansion: EffectiveExpansion) -> Result<Self> {
        let e = &expansion;
        if !(e.omega_beta > 0.0 && e.omega_beta.is_finite()) {
            return Err(Error::param("omega_beta", "must be positive"));
        }
        let alpha = e.beta * e.hbar * e.omega_beta / 2.0;
        if (alpha - e.alpha).abs() > 1e-12 * alpha {
            return Err(Error::param(
                "alpha",
                format!("{} inconsistent with beta (expect {alpha})", e.alpha),
            ));
        }
        Ok(Self { expansion })
    }

    pub fn harmonic(omega: f64, beta: f64, mass: f64, hbar: f64) -> Result<Self> {
        Self::new(EffectiveExpansion::harmonic(omega, beta, mass, hbar)?)
    }

    fn upper(&self) -> f64 {
        self.expansion.beta * self.expansion.hbar
    }

    fn check_tau(&self, tau: f64) -> Result<f64> {
        let upper = self.upper();
        if tau >= 0.0 && tau <= upper * (1.0 + 1e-14) {
            Ok(tau.min(upper))
        } else {
            Err(Error::Domain { value: tau, upper })
        }
    }

    fn meta(&self, method: &str, order: u32, axis: TimeAxis) -> SeriesMeta {
        SeriesMeta {
            method: method.into(),
            beta: self.expansion.beta,
            order,
            axis,
            potential_hash: None,
            grid: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Form {
    Printed,
    Stable,
}

fn form_for(alpha: f64) -> Form {
    if alpha < STABLE_ALPHA {
        Form::Printed
    } else {
        Form::Stable
    }
}

/// `e^{kα + jx}/(e^α − e^{-α})ⁿ` split as `term(k, j)·prefactor`.
struct Bracket {
    alpha: f64,
    shift: f64,
    prefactor: f64,
}

impl Bracket {
    fn new(alpha: f64, n: i32, form: Form) -> Self {
        match form {
            Form::Printed => Self {
                alpha,
                shift: 0.0,
                prefactor: 1.0 / (2.0 * alpha.sinh()).powi(n),
            },
            Form::Stable => Self {
                alpha,
                shift: n as f64 * alpha,
                prefactor: 1.0 / (-(-2.0 * alpha).exp_m1()).powi(n),
            },
        }
    }

    /// `e^{kα}` with the shift applied.
    fn e(&self, k: f64) -> f64 {
        (k * self.alpha - self.shift).exp()
    }

    /// `e^{kα + jx}` with the shift applied, for real `x`.
    fn ex(&self, k: f64, j: f64, x: f64) -> f64 {
        (k * self.alpha + j * x - self.shift).exp()
    }
}

/// Linear imaginary-time Green function
/// `(ħ/2mω_β)[e^α e^{-ω_βτ} + e^{-α} e^{ω_βτ}]/(e^α − e^{-α}) + Q_min²`.
pub fn imag_linear(input: &EpacInputs, tau: f64) -> Result<f64> {
    let tau = input.check_tau(tau)?;
    Ok(green_linear(input, tau, form_for(input.expansion.alpha)))
}

fn green_linear(input: &EpacInputs, tau: f64, form: Form) -> f64 {
    let e = &input.expansion;
    let x = e.omega_beta * tau;
    let b = Bracket::new(e.alpha, 1, form);
    e.hbar / (2.0 * e.mass * e.omega_beta) * b.prefactor * (b.ex(1.0, -1.0, x) + b.ex(-1.0, 1.0, x))
        + e.q_min * e.q_min
}

/// Three-point term of the `q̂²` Green function, without its `2ħ²Q_min` weight.
fn green_three(input: &EpacInputs, tau: f64, form: Form) -> f64 {
    let e = &input.expansion;
    let (m, w) = (e.mass, e.omega_beta);
    let x = w * tau;
    let b = Bracket::new(e.alpha, 3, form);
    let ex = |k: f64, j: f64| b.ex(k, j, x);
    let sum = (ex(1.0, -2.0) - ex(3.0, -2.0))
        + (ex(-3.0, 2.0) - ex(-1.0, 2.0))
        + 2.0 * (ex(3.0, -1.0) - ex(-1.0, -1.0))
        + 2.0 * (ex(1.0, 1.0) - ex(-3.0, 1.0))
        + 6.0 * (ex(1.0, 0.0) - ex(-1.0, 0.0));
    -e.a3 / (6.0 * m.powi(3) * w.powi(4)) * b.prefactor * sum
}

/// Four-point term, without its `ħ³` weight.
fn green_four(input: &EpacInputs, tau: f64, form: Form) -> f64 {
    let e = &input.expansion;
    let (m, w, a) = (e.mass, e.omega_beta, e.alpha);
    let x = w * tau;

    let b4 = Bracket::new(a, 4, form);
    let ex = |k: f64, j: f64| b4.ex(k, j, x);
    let quartic = 4.0 * a * (4.0 * ex(0.0, 0.0) + ex(0.0, -2.0) + ex(0.0, 2.0))
        + 2.0 * x * (ex(4.0, -2.0) - ex(0.0, -2.0))
        + 2.0 * x * (ex(-4.0, 2.0) - ex(0.0, 2.0))
        + 8.0 * (ex(2.0, 0.0) - ex(-2.0, 0.0))
        + (ex(4.0, -2.0) - ex(0.0, -2.0))
        + (ex(0.0, 2.0) - ex(-4.0, 2.0));
    let quartic = -e.a4 / (32.0 * m.powi(4) * w.powi(5)) * b4.prefactor * quartic;

    let b5 = Bracket::new(a, 5, form);
    let ex = |k: f64, j: f64| b5.ex(k, j, x);
    let cubic = 60.0
        * a
        * (4.0 * (ex(1.0, 0.0) - ex(-1.0, 0.0)) + ex(1.0, -2.0) - ex(-1.0, -2.0) + ex(1.0, 2.0)
            - ex(-1.0, 2.0))
        + 30.0 * x * (ex(5.0, -2.0) - ex(3.0, -2.0) - ex(1.0, -2.0) + ex(-1.0, -2.0))
        + 30.0 * x * (-ex(1.0, 2.0) + ex(-1.0, 2.0) + ex(-3.0, 2.0) - ex(-5.0, 2.0))
        + 16.0 * (ex(5.0, -3.0) - 2.0 * ex(3.0, -3.0) + ex(1.0, -3.0))
        + 16.0 * (ex(-1.0, 3.0) - 2.0 * ex(-3.0, 3.0) + ex(-5.0, 3.0))
        - 17.0 * (ex(5.0, -2.0) - ex(3.0, -2.0) - ex(1.0, -2.0) + ex(-1.0, -2.0))
        - 17.0 * (ex(1.0, 2.0) - ex(-1.0, 2.0) - ex(-3.0, 2.0) + ex(-5.0, 2.0))
        + 16.0
            * (ex(5.0, -1.0) + 3.0 * ex(3.0, -1.0) - 8.0 * ex(1.0, -1.0)
                + 3.0 * ex(-1.0, -1.0)
                + ex(-3.0, -1.0))
        + 16.0
            * (ex(3.0, 1.0) + 3.0 * ex(1.0, 1.0) - 8.0 * ex(-1.0, 1.0)
                + 3.0 * ex(-3.0, 1.0)
                + ex(-5.0, 1.0))
        + 248.0 * (ex(3.0, 0.0) - ex(1.0, 0.0) - ex(-1.0, 0.0) + ex(-3.0, 0.0));
    let cubic = e.a3 * e.a3 / (288.0 * m.powi(5) * w.powi(7)) * b5.prefactor * cubic;

    quartic + cubic
}

/// Imaginary-time Green function of `q̂²`:
/// `ħ³δ⁴W + 2ħ²Q_min δ³W + 2G(τ)² + G(0)² − 2Q_min⁴`.
pub fn imag_q2(input: &EpacInputs, tau: f64) -> Result<f64> {
    let tau = input.check_tau(tau)?;
    Ok(green_q2(input, tau, form_for(input.expansion.alpha)))
}

fn green_q2(input: &EpacInputs, tau: f64, form: Form) -> f64 {
    let e = &input.expansion;
    let g = green_linear(input, tau, form);
    let g0 = green_linear(input, 0.0, form);
    e.hbar.powi(3) * green_four(input, tau, form)
        + 2.0 * e.hbar * e.hbar * e.q_min * green_three(input, tau, form)
        + 2.0 * g * g
        + g0 * g0
        - 2.0 * e.q_min.powi(4)
}

/// The four pieces of the real-time correlator at one time, with their
/// weights `(a₄, a₃², a₃Q_min, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentBreakdown {
    pub t: f64,
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub weights: [f64; 4],
}

impl ComponentBreakdown {
    pub fn total(&self) -> Complex64 {
        let [wa, wb, wc, wd] = self.weights;
        self.a * wa + self.b * wb + self.c * wc + self.d * wd
    }

    /// Weighted contributions `(a₄A, a₃²B, a₃Q_min C, D)`.
    pub fn weighted(&self) -> [Complex64; 4] {
        let [wa, wb, wc, wd] = self.weights;
        [self.a * wa, self.b * wb, self.c * wc, self.d * wd]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Part {
    Re,
    Im,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Trig {
    Const,
    Cos(i32),
    Sin(i32),
}

/// One printed term `[i] · [x] · [α] · Σ_j c_j e^{jα} · trig(kx)`, with
/// `x = ω_β t` and `c_j` stored at index `j + 5`.
struct Term {
    part: Part,
    trig: Trig,
    secular: bool,
    alpha: bool,
    coeffs: [i64; 11],
}

const fn term(part: Part, trig: Trig, secular: bool, alpha: bool, pairs: &[(i32, i64)]) -> Term {
    let mut coeffs = [0i64; 11];
    let mut k = 0;
    while k < pairs.len() {
        coeffs[(pairs[k].0 + 5) as usize] += pairs[k].1;
        k += 1;
    }
    Term {
        part,
        trig,
        secular,
        alpha,
        coeffs,
    }
}

use Part::{Im, Re};
use Trig::{Const, Cos, Sin};

/// Bracket of `A(t)`, over `(e^α − e^{-α})⁴`.
const BRACKET_A: [Term; 7] = [
    term(Re, Const, false, false, &[(2, 8), (-2, -8)]),
    term(Re, Cos(2), false, true, &[(0, 8)]),
    term(Re, Const, false, true, &[(0, 16)]),
    term(Re, Sin(2), true, false, &[(4, 2), (-4, -2)]),
    term(Re, Cos(2), false, false, &[(4, 1), (-4, -1)]),
    term(Im, Cos(2), true, false, &[(4, 2), (-4, 2), (0, -4)]),
    term(Im, Sin(2), false, false, &[(4, -1), (-4, -1), (0, 2)]),
];

/// Bracket of `B(t)`, over `(e^α − e^{-α})⁵`.
const BRACKET_B: [Term; 11] = [
    term(
        Re,
        Const,
        false,
        false,
        &[(3, 248), (1, -248), (-1, -248), (-3, 248)],
    ),
    term(Re, Cos(2), false, true, &[(1, 120), (-1, -120)]),
    term(Re, Const, false, true, &[(1, 240), (-1, -240)]),
    term(
        Re,
        Cos(3),
        false,
        false,
        &[(5, 16), (3, -32), (1, 16), (-1, 16), (-3, -32), (-5, 16)],
    ),
    term(
        Re,
        Sin(2),
        true,
        false,
        &[(5, 30), (3, -30), (-3, -30), (-5, 30)],
    ),
    term(
        Re,
        Cos(2),
        false,
        false,
        &[(5, -17), (3, 17), (-3, 17), (-5, -17)],
    ),
    term(
        Re,
        Cos(1),
        false,
        false,
        &[(5, 16), (3, 64), (1, -80), (-1, -80), (-3, 64), (-5, 16)],
    ),
    term(
        Im,
        Sin(3),
        false,
        false,
        &[(5, -16), (3, 32), (1, -16), (-1, 16), (-3, -32), (-5, 16)],
    ),
    term(
        Im,
        Cos(2),
        true,
        false,
        &[(5, 30), (3, -30), (1, -60), (-1, 60), (-3, 30), (-5, -30)],
    ),
    term(
        Im,
        Sin(2),
        false,
        false,
        &[(5, 17), (3, -17), (1, -34), (-1, 34), (-3, 17), (-5, -17)],
    ),
    term(
        Im,
        Sin(1),
        false,
        false,
        &[(5, -16), (3, -32), (1, 176), (-1, -176), (-3, 32), (-5, 16)],
    ),
];

/// Bracket of `C(t)`, over `(e^α − e^{-α})³`.
const BRACKET_C: [Term; 5] = [
    term(Re, Const, false, false, &[(1, 6), (-1, -6)]),
    term(
        Re,
        Cos(2),
        false,
        false,
        &[(3, -1), (1, 1), (-1, -1), (-3, 1)],
    ),
    term(
        Re,
        Cos(1),
        false,
        false,
        &[(3, 2), (1, 2), (-1, -2), (-3, -2)],
    ),
    term(
        Im,
        Sin(2),
        false,
        false,
        &[(3, 1), (1, -1), (-1, -1), (-3, 1)],
    ),
    term(
        Im,
        Sin(1),
        false,
        false,
        &[(3, -2), (1, 2), (-1, 2), (-3, -2)],
    ),
];

/// Quantum part of `D(t)` with `coth α`, `coth 2α` written over
/// `(e^α − e^{-α})²`.
const BRACKET_D2: [Term; 3] = [
    term(Re, Cos(2), false, false, &[(2, 2), (-2, 2)]),
    term(Im, Sin(2), false, false, &[(2, -2), (-2, 2)]),
    term(Re, Const, false, false, &[(2, 1), (0, 6), (-2, 1)]),
];

/// `Q_min²` part of `D(t)`, over `e^α − e^{-α}`.
const BRACKET_D1: [Term; 3] = [
    term(Re, Cos(1), false, false, &[(1, 2), (-1, 2)]),
    term(Im, Sin(1), false, false, &[(1, -2), (-1, 2)]),
    term(Re, Const, false, false, &[(1, 1), (-1, 1)]),
];

/// Evaluates `Σ terms / (e^α − e^{-α})ⁿ` at complex `x = ω_β t`.
///
/// On the real axis the trigonometric form is used directly. Elsewhere each
/// `cos`/`sin` is split into `e^{±ikx}` and the integer coefficients of
/// every `e^{jα ± ikx}` are summed exactly before exponentiation, so the
/// growing parts that cancel between `cos` and `i sin` never reach floating
/// point.
fn eval_bracket(terms: &[Term], n: i32, alpha: f64, x: Complex64, form: Form) -> Complex64 {
    let b = Bracket::new(alpha, n, form);
    let i = Complex64::i();
    let mut total = Complex64::new(0.0, 0.0);
    if x.im == 0.0 {
        for t in terms {
            let c: f64 = (-5..=5)
                .map(|j| t.coeffs[(j + 5) as usize])
                .zip(-5..=5)
                .filter(|&(c, _)| c != 0)
                .map(|(c, j)| c as f64 * b.e(j as f64))
                .sum();
            let trig = match t.trig {
                Const => Complex64::new(1.0, 0.0),
                Cos(k) => (x * k as f64).cos(),
                Sin(k) => (x * k as f64).sin(),
            };
            let mut v = trig * c;
            if t.secular {
                v *= x;
            }
            if t.alpha {
                v *= alpha;
            }
            if t.part == Im {
                v *= i;
            }
            total += v;
        }
        return total * b.prefactor;
    }
    eval_bracket_exp(terms, n, alpha, x, form)
}

/// Integer coefficients over `e^{jα}`, `j = −5..=5`, as `(re, im)` pairs.
type ExpCoeffs = [(i64, i64); 11];

fn eval_bracket_exp(terms: &[Term], n: i32, alpha: f64, x: Complex64, form: Form) -> Complex64 {
    let b = Bracket::new(alpha, n, form);
    let i = Complex64::i();
    let mut total = Complex64::new(0.0, 0.0);
    // (signed frequency, secular, α-weighted) → doubled complex coefficients
    // as (re, im) integer pairs.
    let mut groups: Vec<((i32, bool, bool), ExpCoeffs)> = Vec::new();
    for t in terms {
        let phase: (i64, i64) = if t.part == Im { (0, 1) } else { (1, 0) };
        // cos kx = (E₊ + E₋)/2, sin kx = (E₊ − E₋)/2i, E± = e^{±ikx}
        let pieces: Vec<(i32, (i64, i64))> = match t.trig {
            Const => vec![(0, (2, 0))],
            Cos(k) => vec![(k, (1, 0)), (-k, (1, 0))],
            Sin(k) => vec![(k, (0, -1)), (-k, (0, 1))],
        };
        for (k, w) in pieces {
            let w = (phase.0 * w.0 - phase.1 * w.1, phase.0 * w.1 + phase.1 * w.0);
            let key = (k, t.secular, t.alpha);
            let slot = match groups.iter().position(|g| g.0 == key) {
                Some(p) => p,
                None => {
                    groups.push((key, [(0, 0); 11]));
                    groups.len() - 1
                }
            };
            for (dst, &c) in groups[slot].1.iter_mut().zip(&t.coeffs) {
                dst.0 += w.0 * c;
                dst.1 += w.1 * c;
            }
        }
    }
    for ((k, secular, weighted), coeffs) in groups {
        for (idx, &(re, im)) in coeffs.iter().enumerate() {
            if re == 0 && im == 0 {
                continue;
            }
            let j = idx as f64 - 5.0;
            let exponent = Complex64::new(j * alpha - b.shift, 0.0) + i * x * k as f64;
            let mut v = Complex64::new(re as f64, im as f64) * 0.5 * exponent.exp();
            if secular {
                v *= x;
            }
            if weighted {
                v *= alpha;
            }
            total += v;
        }
    }
    total * b.prefactor
}

fn components(input: &EpacInputs, t: Complex64, form: Form) -> [Complex64; 4] {
    let e = &input.expansion;
    let (m, w, a, hbar) = (e.mass, e.omega_beta, e.alpha, e.hbar);
    let x = t * w;
    let big_a =
        eval_bracket(&BRACKET_A, 4, a, x, form) * (-hbar.powi(3) / (32.0 * m.powi(4) * w.powi(5)));
    let big_b =
        eval_bracket(&BRACKET_B, 5, a, x, form) * (hbar.powi(3) / (288.0 * m.powi(5) * w.powi(7)));
    let big_c =
        eval_bracket(&BRACKET_C, 3, a, x, form) * (-hbar * hbar / (3.0 * m.powi(3) * w.powi(4)));
    [big_a, big_b, big_c, truncated_at(input, t, form)]
}

/// `D(t)`: the correlator implied by the quadratic part of `V_β` alone,
/// `(ħ²/4m²ω²)[2coth α(coth 2α cos 2x − i sin 2x) + 2coth²α − 1]
///  + (ħQ²/mω)(2coth α cos x − 2i sin x + coth α) + Q⁴`.
fn truncated_at(input: &EpacInputs, t: Complex64, form: Form) -> Complex64 {
    let e = &input.expansion;
    let (m, w, hbar, q) = (e.mass, e.omega_beta, e.hbar, e.q_min);
    let x = t * w;
    if x.im == 0.0 {
        let i = Complex64::i();
        let coth = 1.0 / e.alpha.tanh();
        let coth2 = 1.0 / (2.0 * e.alpha).tanh();
        let (c1, s1) = (x.cos(), x.sin());
        let (c2, s2) = ((x * 2.0).cos(), (x * 2.0).sin());
        return (2.0 * coth * (c2 * coth2 - i * s2) + 2.0 * coth * coth - 1.0)
            * (hbar * hbar / (4.0 * m * m * w * w))
            + (2.0 * coth * c1 - 2.0 * i * s1 + coth) * (hbar * q * q / (m * w))
            + q.powi(4);
    }
    eval_bracket(&BRACKET_D2, 2, e.alpha, x, form) * (hbar * hbar / (4.0 * m * m * w * w))
        + eval_bracket(&BRACKET_D1, 1, e.alpha, x, form) * (hbar * q * q / (m * w))
        + q.powi(4)
}

fn weights(input: &EpacInputs) -> [f64; 4] {
    let e = &input.expansion;
    [e.a4, e.a3 * e.a3, e.a3 * e.q_min, 1.0]
}

fn combine(input: &EpacInputs, parts: [Complex64; 4]) -> Complex64 {
    let w = weights(input);
    parts[0] * w[0] + parts[1] * w[1] + parts[2] * w[2] + parts[3] * w[3]
}

/// Real-time `⟨q̂²(t) q̂²(0)⟩` at a complex time argument. Real `t` gives the
/// physical correlator; `t = −iτ` reproduces the imaginary-time function.
pub fn epac_q2_complex(input: &EpacInputs, t: Complex64) -> Complex64 {
    combine(input, components(input, t, form_for(input.expansion.alpha)))
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::param("times", "must be finite"));
    }
    Ok(())
}

pub fn epac_q2(input: &EpacInputs, times: &[f64]) -> Result<CorrelationSeries> {
    check_times(times)?;
    let values = times
        .iter()
        .map(|&t| epac_q2_complex(input, Complex64::new(t, 0.0)))
        .collect();
    CorrelationSeries::new(
        input.meta("epac", 2, TimeAxis::Real),
        times.to_vec(),
        values,
    )
}

pub fn epac_q2_components(input: &EpacInputs, t: f64) -> Result<ComponentBreakdown> {
    check_times(&[t])?;
    let [a, b, c, d] = components(
        input,
        Complex64::new(t, 0.0),
        form_for(input.expansion.alpha),
    );
    Ok(ComponentBreakdown {
        t,
        a,
        b,
        c,
        d,
        weights: weights(input),
    })
}

/// `D(t)` over a time grid; depends only on `Q_min` and `ω_β`.
pub fn epac_q2_truncated(input: &EpacInputs, times: &[f64]) -> Result<CorrelationSeries> {
    check_times(times)?;
    let values = times
        .iter()
        .map(|&t| {
            truncated_at(
                input,
                Complex64::new(t, 0.0),
                form_for(input.expansion.alpha),
            )
        })
        .collect();
    CorrelationSeries::new(
        input.meta("epac_truncated", 2, TimeAxis::Real),
        times.to_vec(),
        values,
    )
}

/// `⟨q̂(t) q̂(0)⟩ = (ħ/2mω_β)[coth α cos ω_βt − i sin ω_βt] + Q_min²` at a
/// complex time argument. Off the real axis it is evaluated as
/// `(ħ/2mω_β)[e^{-α}e^{ix} + e^{α}e^{-ix}]/(e^α − e^{-α})`, which avoids the
/// cancellation between the growing `cos` and `i sin` parts.
pub fn epac_q_linear_complex(input: &EpacInputs, t: Complex64) -> Complex64 {
    let e = &input.expansion;
    let x = t * e.omega_beta;
    let scale = e.hbar / (2.0 * e.mass * e.omega_beta);
    let i = Complex64::i();
    let bracket = if x.im == 0.0 {
        x.cos() / e.alpha.tanh() - i * x.sin()
    } else {
        let b = Bracket::new(e.alpha, 1, form_for(e.alpha));
        ((i * x).exp() * b.e(-1.0) + (-i * x).exp() * b.e(1.0)) * b.prefactor
    };
    bracket * scale + e.q_min * e.q_min
}

pub fn epac_q_linear(input: &EpacInputs, times: &[f64]) -> Result<CorrelationSeries> {
    check_times(times)?;
    let values = times
        .iter()
        .map(|&t| epac_q_linear_complex(input, Complex64::new(t, 0.0)))
        .collect();
    CorrelationSeries::new(
        input.meta("epac_linear", 1, TimeAxis::Real),
        times.to_vec(),
        values,
    )
}

/// `ħ = m = 1` leading-power estimates of the `t = 0` values of
/// `(a₄A, a₃²B, a₃Q_min C, D)`; the factors of `ħ` and `m` are restored from
/// the prefactors of the corresponding components.
pub fn t0_dominant_terms(input: &EpacInputs) -> [f64; 4] {
    let e = &input.expansion;
    let (m, w, hbar) = (e.mass, e.omega_beta, e.hbar);
    let coth = 1.0 / e.alpha.tanh();
    [
        -e.a4 * hbar.powi(3) / (32.0 * m.powi(4) * w.powi(5)) * coth.powi(3),
        5.0 * e.a3 * e.a3 * hbar.powi(3) / (96.0 * m.powi(5) * w.powi(7)) * coth.powi(5),
        -e.a3 * e.q_min * hbar * hbar / (3.0 * m.powi(3) * w.powi(4)) * coth * coth,
        0.75 * hbar * hbar / (m * m * w * w) * coth * coth,
    ]
}

/// `max_τ |epac_q2(−iτ) − imag_q2(τ)|`.
pub fn continuation_check(input: &EpacInputs, taus: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &tau in taus {
        let direct = imag_q2(input, tau)?;
        let continued = epac_q2_complex(input, Complex64::new(0.0, -tau));
        worst = worst.max((continued - direct).norm());
    }
    Ok(worst)
}

/// `max_τ |epac_q_linear(−iτ) − imag_linear(τ)|`.
pub fn continuation_check_linear(input: &EpacInputs, taus: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &tau in taus {
        let direct = imag_linear(input, tau)?;
        let continued = epac_q_linear_complex(input, Complex64::new(0.0, -tau));
        worst = worst.max((continued - direct).norm());
    }
    Ok(worst)
}

/// `max_τ |G(τ) − G(βħ − τ)|` for the `q̂²` Green function.
pub fn reflection_residual(input: &EpacInputs, taus: &[f64]) -> Result<f64> {
    let upper = input.upper();
    let mut worst: f64 = 0.0;
    for &tau in taus {
        let d = imag_q2(input, tau)? - imag_q2(input, (upper - tau).max(0.0))?;
        worst = worst.max(d.abs());
    }
    Ok(worst)
}

/// `(t*, max |f|)` over `[t_lo, t_hi]`: dense sampling followed by
/// golden-section refinement around the best sample.
pub fn max_modulus(
    f: impl Fn(f64) -> Complex64,
    t_lo: f64,
    t_hi: f64,
    samples: usize,
) -> (f64, f64) {
    let n = samples.max(2);
    let h = (t_hi - t_lo) / (n - 1) as f64;
    let (mut best_t, mut best) = (t_lo, f(t_lo).norm());
    for k in 1..n {
        let t = if k == n - 1 {
            t_hi
        } else {
            t_lo + h * k as f64
        };
        let v = f(t).norm();
        if v > best {
            best = v;
            best_t = t;
        }
    }
    let (mut a, mut b) = ((best_t - h).max(t_lo), (best_t + h).min(t_hi));
    let g = (5.0f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c).norm() > f(d).norm() {
            b = d;
        } else {
            a = c;
        }
        if b - a < 1e-13 * (1.0 + best_t.abs()) {
            break;
        }
    }
    let t = 0.5 * (a + b);
    let v = f(t).norm();
    if v > best {
        (t, v)
    } else {
        (best_t, best)
    }
}
