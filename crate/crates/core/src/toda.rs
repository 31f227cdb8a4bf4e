//! Radial tt*-Toda ODE, integrated inward from large `x`.
//!
//! The state is `(u, v, pu, pv)` with `u = 2w₀`, `v = 2w₁` and `p = x·d/dx`,
//! in the variable `τ = ln x`. In these variables the radial Laplacian
//! becomes `d²/dτ²` and the system reads
//!
//! ```text
//! u_ττ = 4x²(e^{au} − e^{v−u}),   v_ττ = 4x²(e^{v−u} − e^{−bv}).
//! ```
//!
//! Near `x = 0` the solutions are logarithmic, `2wᵢ ≈ γᵢ ln x`, so `p`
//! tends to the constant `γᵢ` and the fit is linear in `τ`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::case::Case;
use crate::dopri::{self, Stats, Stop};
use crate::error::{Error, Result};
use crate::quad::bessel_k;
use crate::region::{gamma_to_stokes, AsymptoticData};
use crate::stokes::StokesParams;

/// Exponent arguments beyond this overflow double precision.
pub const EXP_LIMIT: f64 = 700.0;
/// `|x·u′|` beyond this is treated as a blow-up.
pub const SLOPE_LIMIT: f64 = 1e3;
/// Largest initial amplitude accepted by [`asymptotic_init`].
pub const INIT_AMPLITUDE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitModel {
    /// Exact decaying solutions of the linearization (`K₀` profiles).
    Bessel,
    /// Large-`x` asymptotics of the same modes.
    LeadingOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeConfig {
    pub x_start: f64,
    pub x_min: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub a: u8,
    pub b: u8,
    pub init: InitModel,
    /// Output points per decade of `x`.
    pub samples_per_decade: usize,
}

impl Default for OdeConfig {
    fn default() -> Self {
        Self {
            x_start: 6.0,
            x_min: 1e-3,
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            a: 2,
            b: 2,
            init: InitModel::Bessel,
            samples_per_decade: 60,
        }
    }
}

impl OdeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_min > 0.0 && self.x_min < self.x_start) {
            return Err(Error::InvalidInput(format!("need 0 < x_min < x_start, got {} and {}", self.x_min, self.x_start)));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        if !matches!(self.a, 1 | 2) || !matches!(self.b, 1 | 2) {
            return Err(Error::InvalidInput("a and b must be 1 or 2".into()));
        }
        if self.samples_per_decade == 0 {
            return Err(Error::InvalidInput("samples_per_decade must be positive".into()));
        }
        Ok(())
    }

    /// Output radii, decreasing, log-spaced from `x_start` to `x_min`.
    pub fn output_grid(&self) -> Vec<f64> {
        let decades = (self.x_start / self.x_min).log10();
        let n = (decades * self.samples_per_decade as f64).ceil().max(1.0) as usize;
        let (l0, l1) = (self.x_start.ln(), self.x_min.ln());
        (0..=n).map(|i| (l0 + (l1 - l0) * i as f64 / n as f64).exp()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Termination {
    Completed,
    BlowUp { x: f64 },
    StepSizeUnderflow { x: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialSolution {
    pub xs: Vec<f64>,
    pub w0: Vec<f64>,
    pub w1: Vec<f64>,
    pub dw0: Vec<f64>,
    pub dw1: Vec<f64>,
    pub stats: Stats,
    pub termination: Termination,
}

impl RadialSolution {
    pub fn completed(&self) -> bool {
        self.termination == Termination::Completed
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// `(w₀, w₁)` at `x` by cubic Hermite interpolation between grid points.
    pub fn at(&self, x: f64) -> Option<(f64, f64)> {
        let n = self.xs.len();
        if n == 0 || x > self.xs[0] || x < self.xs[n - 1] {
            return None;
        }
        if n == 1 {
            return Some((self.w0[0], self.w1[0]));
        }
        // xs is decreasing
        let i = self.xs.partition_point(|&xi| xi > x).clamp(1, n - 1);
        // interpolate in ln x, where the solution is smoothest
        let (xa, xb) = (self.xs[i - 1], self.xs[i]);
        let h = (xb / xa).ln();
        let t = (x / xa).ln() / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * t) * (1.0 - t).powi(2),
            t * (1.0 - t).powi(2),
            t * t * (3.0 - 2.0 * t),
            t * t * (t - 1.0),
        );
        let herm = |w: &[f64], dw: &[f64]| {
            h00 * w[i - 1] + h10 * h * xa * dw[i - 1] + h01 * w[i] + h11 * h * xb * dw[i]
        };
        Some((herm(&self.w0, &self.dw0), herm(&self.w1, &self.dw1)))
    }

    /// Error for a run that stopped early.
    pub fn error(&self) -> Option<Error> {
        match self.termination {
            Termination::Completed => None,
            Termination::BlowUp { x } => Some(Error::BlowUp { x }),
            Termination::StepSizeUnderflow { x } => Some(Error::StepSizeUnderflow { x }),
        }
    }

    /// CSV with header `x,w0,w1,dw0,dw1`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,w0,w1,dw0,dw1\n");
        for i in 0..self.xs.len() {
            out.push_str(&format!(
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                self.xs[i], self.w0[i], self.w1[i], self.dw0[i], self.dw1[i]
            ));
        }
        out
    }
}

/// `(u′, v′, u″, v″)` in `x` for the state `(u, v, u′, v′)`.
pub fn ode_rhs(x: f64, state: [f64; 4], a: u8, b: u8) -> Result<[f64; 4]> {
    let [u, v, du, dv] = state;
    let (eu, evu, ev) = exps(u, v, a, b, x)?;
    Ok([du, dv, 4.0 * (eu - evu) - du / x, 4.0 * (evu - ev) - dv / x])
}

fn exps(u: f64, v: f64, a: u8, b: u8, x: f64) -> Result<(f64, f64, f64)> {
    let args = [f64::from(a) * u, v - u, -f64::from(b) * v];
    if args.iter().any(|z| !z.is_finite() || *z > EXP_LIMIT) {
        return Err(Error::BlowUp { x });
    }
    Ok((args[0].exp(), args[1].exp(), args[2].exp()))
}

fn rhs_tau(tau: f64, y: &[f64], dy: &mut [f64], a: u8, b: u8) -> Result<()> {
    let x = tau.exp();
    let (eu, evu, ev) = exps(y[0], y[1], a, b, x)?;
    let x2 = 4.0 * x * x;
    dy[0] = y[2];
    dy[1] = y[3];
    dy[2] = x2 * (eu - evu);
    dy[3] = x2 * (evu - ev);
    Ok(())
}

/// Decaying modes `(A, A′, B, B′)` with `A = w₀ + w₁`, `B = w₀ − w₁`.
fn modes(s: &StokesParams, x: f64, model: InitModel) -> (f64, f64, f64, f64) {
    let (s1, s2) = (s.s1, s.s2);
    let k1 = 2.0 * SQRT_2;
    match model {
        InitModel::Bessel => {
            let a = -SQRT_2 / PI * s1 * bessel_k(0.0, k1 * x);
            let da = SQRT_2 / PI * s1 * k1 * bessel_k(1.0, k1 * x);
            let b = s2 / PI * bessel_k(0.0, 4.0 * x);
            let db = -s2 / PI * 4.0 * bessel_k(1.0, 4.0 * x);
            (a, da, b, db)
        }
        InitModel::LeadingOrder => {
            let pre = (PI * x).powf(-0.5);
            let a = -s1 * 2f64.powf(-0.75) * pre * (-k1 * x).exp();
            let b = s2 * 2f64.powf(-1.5) * pre * (-4.0 * x).exp();
            (a, a * (-k1 - 0.5 / x), b, b * (-4.0 - 0.5 / x))
        }
    }
}

/// Initial `(u, v, u′, v′)` at `x_start` from the decaying large-`x` modes.
pub fn asymptotic_init(s: &StokesParams, x_start: f64, model: InitModel) -> Result<[f64; 4]> {
    if s.case != Case::A4 {
        return Err(Error::Unsupported { what: "asymptotic initial data", case: s.case });
    }
    if x_start <= 0.0 {
        return Err(Error::InvalidInput(format!("x_start must be positive, got {x_start}")));
    }
    let (a, da, b, db) = modes(s, x_start, model);
    let amplitude = a.abs().max(b.abs());
    if amplitude > INIT_AMPLITUDE {
        return Err(Error::InitTooClose { x_start, amplitude });
    }
    // u = 2w₀ = A + B, v = 2w₁ = A − B
    Ok([a + b, a - b, da + db, da - db])
}

/// Integrates from an explicit state `(u, v, u′, v′)` at `cfg.x_start`.
pub fn integrate_from(state: [f64; 4], cfg: &OdeConfig) -> Result<RadialSolution> {
    cfg.validate()?;
    let grid = cfg.output_grid();
    let t_out: Vec<f64> = grid.iter().map(|x| x.ln()).collect();
    let x0 = cfg.x_start;
    let y0 = [state[0], state[1], x0 * state[2], x0 * state[3]];
    let opts = dopri::Options { rel_tol: cfg.rel_tol, abs_tol: cfg.abs_tol, h0: Some(1e-3), max_steps: 500_000 };
    let (a, b) = (cfg.a, cfg.b);
    let out = dopri::integrate(
        |t, y, dy| rhs_tau(t, y, dy, a, b),
        x0.ln(),
        &y0,
        cfg.x_min.ln(),
        &t_out,
        &opts,
        |t, y| {
            if y[2].abs() > SLOPE_LIMIT || y[3].abs() > SLOPE_LIMIT {
                Err(Error::BlowUp { x: t.exp() })
            } else {
                Ok(())
            }
        },
    );
    let termination = match out.stop {
        None => Termination::Completed,
        Some(Stop::User(Error::BlowUp { x })) => Termination::BlowUp { x },
        Some(Stop::User(e)) => return Err(e),
        Some(Stop::StepSizeUnderflow { t }) | Some(Stop::TooManySteps { t }) => {
            Termination::StepSizeUnderflow { x: t.exp() }
        }
    };
    let n = out.ts.len();
    let mut sol = RadialSolution {
        xs: Vec::with_capacity(n),
        w0: Vec::with_capacity(n),
        w1: Vec::with_capacity(n),
        dw0: Vec::with_capacity(n),
        dw1: Vec::with_capacity(n),
        stats: out.stats,
        termination,
    };
    for (t, y) in out.ts.iter().zip(&out.ys) {
        let x = t.exp();
        sol.xs.push(x);
        sol.w0.push(0.5 * y[0]);
        sol.w1.push(0.5 * y[1]);
        sol.dw0.push(0.5 * y[2] / x);
        sol.dw1.push(0.5 * y[3] / x);
    }
    Ok(sol)
}

/// Inward integration with asymptotic initial data. A blow-up is not an
/// error here: the partial trajectory is returned with its marker.
pub fn integrate_inward(s: &StokesParams, cfg: &OdeConfig) -> Result<RadialSolution> {
    if (cfg.a, cfg.b) != (2, 2) {
        return Err(Error::InvalidInput("asymptotic initial data needs a = b = 2".into()));
    }
    let init = asymptotic_init(s, cfg.x_start, cfg.init)?;
    integrate_from(init, cfg)
}

/// Like [`integrate_inward`], but a blow-up is an error.
pub fn solve(s: &StokesParams, cfg: &OdeConfig) -> Result<RadialSolution> {
    let sol = integrate_inward(s, cfg)?;
    match sol.error() {
        Some(e) => Err(e),
        None => Ok(sol),
    }
}

/// Largest RMS residual of the linear fit accepted by [`extract_gammas`].
pub const FIT_RESIDUAL_LIMIT: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaFit {
    pub gammas: AsymptoticData,
    /// Constant terms of the fit `2wᵢ ≈ γᵢ ln x + ρᵢ`.
    pub intercepts: [f64; 2],
    pub residual: f64,
    /// `2x·wᵢ′` at the smallest radius.
    pub pointwise: [f64; 2],
    /// Largest relative difference between the two estimators.
    pub estimator_gap: f64,
    pub samples: usize,
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let icpt = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - icpt).powi(2)).sum();
    (slope, icpt, (rss / n).sqrt())
}

/// Fits `2wᵢ` against `ln x` over the last decade `[x_end, 10·x_end]`.
pub fn extract_gammas(sol: &RadialSolution) -> Result<GammaFit> {
    if let Some(e) = sol.error() {
        return Err(e);
    }
    let x_end = *sol.xs.last().ok_or(Error::EmptyGrid)?;
    let idx: Vec<usize> = (0..sol.len()).filter(|&i| sol.xs[i] <= 10.0 * x_end * (1.0 + 1e-12)).collect();
    if idx.len() < 3 {
        return Err(Error::InvalidInput("fewer than three samples in the fit window".into()));
    }
    let ts: Vec<f64> = idx.iter().map(|&i| sol.xs[i].ln()).collect();
    let u: Vec<f64> = idx.iter().map(|&i| 2.0 * sol.w0[i]).collect();
    let v: Vec<f64> = idx.iter().map(|&i| 2.0 * sol.w1[i]).collect();
    let (g0, r0, e0) = linear_fit(&ts, &u);
    let (g1, r1, e1) = linear_fit(&ts, &v);
    let last = sol.len() - 1;
    let pointwise = [2.0 * x_end * sol.dw0[last], 2.0 * x_end * sol.dw1[last]];
    let residual = e0.max(e1);
    if residual > FIT_RESIDUAL_LIMIT {
        return Err(Error::NotLogarithmic { residual });
    }
    let gap = |fit: f64, pw: f64| (fit - pw).abs() / fit.abs().max(pw.abs()).max(1e-12);
    Ok(GammaFit {
        gammas: AsymptoticData::new(g0, g1, Case::A4),
        intercepts: [r0, r1],
        residual,
        pointwise,
        estimator_gap: gap(g0, pointwise[0]).max(gap(g1, pointwise[1])),
        samples: idx.len(),
    })
}

/// Leading large-`x` prediction `(w₀ + w₁, w₀ − w₁)` for given Stokes data.
pub fn leading_amplitudes(s: &StokesParams, x: f64) -> (f64, f64) {
    let (a, _, b, _) = modes(s, x, InitModel::LeadingOrder);
    (a, b)
}

/// Sinh-Gordon amplitude `−(1/(2√2)) sin(πγ/2) (πx)^{−1/2} e^{−4x}` of `w₀`.
pub fn sinh_gordon_amplitude(gamma: f64, x: f64) -> f64 {
    -(0.5 / SQRT_2) * (PI * gamma / 2.0).sin() * (PI * x).powf(-0.5) * (-4.0 * x).exp()
}

#[derive(Debug, Clone, Serialize)]
pub struct ConnectionReport {
    pub gamma: AsymptoticData,
    pub stokes: StokesParams,
    pub recovered: AsymptoticData,
    /// `|γᵢ_recovered − γᵢ| / max(|γᵢ|, 1e-2)`.
    pub gamma_error: [f64; 2],
    pub fit: GammaFit,
    pub amplitude_x: f64,
    /// Relative residuals of `w₀ ± w₁` against the leading asymptotics.
    pub amplitude_error: [f64; 2],
    /// Relative residual of `w₀` against the sinh-Gordon formula, when `γ₀ = −γ₁`.
    pub sinh_gordon_error: Option<f64>,
}

impl ConnectionReport {
    pub fn max_gamma_error(&self) -> f64 {
        self.gamma_error[0].max(self.gamma_error[1])
    }
}

/// `γ → s → w(x) → γ`, plus the amplitude check at `x = 4`.
pub fn verify_connection(g: &AsymptoticData, cfg: &OdeConfig) -> Result<ConnectionReport> {
    if g.case != Case::A4 {
        return Err(Error::Unsupported { what: "ODE connection check", case: g.case });
    }
    if !g.in_domain() {
        return Err(Error::InvalidInput(format!("γ = ({}, {}) outside the fundamental domain", g.gamma0, g.gamma1)));
    }
    let s = gamma_to_stokes(g);
    let amplitude_x = 4.0f64.min(cfg.x_start);
    let sol = solve(&s, cfg)?;
    let fit = extract_gammas(&sol)?;
    let rel = |got: f64, want: f64, floor: f64| (got - want).abs() / want.abs().max(floor);
    let gamma_error = [
        rel(fit.gammas.gamma0, g.gamma0, 1e-2),
        rel(fit.gammas.gamma1, g.gamma1, 1e-2),
    ];
    let x = amplitude_x;
    let (w0, w1) = sol.at(x).ok_or(Error::EmptyGrid)?;
    let (pa, pb) = leading_amplitudes(&s, x);
    // a mode with vanishing Stokes parameter is measured against the other one
    let floor = 1e-3 * pa.abs().max(pb.abs()).max(1e-300);
    let amplitude_error = [rel(w0 + w1, pa, floor), rel(w0 - w1, pb, floor)];
    let sinh_gordon_error = ((g.gamma0 + g.gamma1).abs() < 1e-12 && g.gamma0 != 0.0)
        .then(|| rel(w0, sinh_gordon_amplitude(g.gamma0, x), 1e-300));
    Ok(ConnectionReport {
        gamma: *g,
        stokes: s,
        recovered: fit.gammas,
        gamma_error,
        fit,
        amplitude_x: x,
        amplitude_error,
        sinh_gordon_error,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitsReport {
    /// `max |wᵢ(x_start)|`.
    pub start_amplitude: f64,
    pub decays_at_start: bool,
    /// `βᵢ = sup_{x<0.1} |2wᵢ(x) / ln x|`.
    pub beta: [f64; 2],
    pub log_bound_holds: bool,
    /// `|2wᵢ(x_min) / ln x_min|`.
    pub ratio_at_min: [f64; 2],
}

/// Decay at the starting radius and the logarithmic bound near zero.
pub fn verify_limits(sol: &RadialSolution) -> LimitsReport {
    let start_amplitude = match (sol.w0.first(), sol.w1.first()) {
        (Some(a), Some(b)) => a.abs().max(b.abs()),
        _ => 0.0,
    };
    let mut beta = [0.0f64; 2];
    for i in 0..sol.len() {
        let x = sol.xs[i];
        if x < 0.1 {
            let l = x.ln().abs();
            beta[0] = beta[0].max((2.0 * sol.w0[i]).abs() / l);
            beta[1] = beta[1].max((2.0 * sol.w1[i]).abs() / l);
        }
    }
    let log_bound_holds = (0..sol.len()).filter(|&i| sol.xs[i] < 0.1).all(|i| {
        let l = sol.xs[i].ln().abs();
        (2.0 * sol.w0[i]).abs() <= beta[0] * l * (1.0 + 1e-12) && (2.0 * sol.w1[i]).abs() <= beta[1] * l * (1.0 + 1e-12)
    });
    let ratio_at_min = match (sol.xs.last(), sol.w0.last(), sol.w1.last()) {
        (Some(x), Some(a), Some(b)) => {
            let l = x.ln().abs();
            [(2.0 * a).abs() / l, (2.0 * b).abs() / l]
        }
        _ => [0.0; 2],
    };
    LimitsReport {
        start_amplitude,
        decays_at_start: start_amplitude <= INIT_AMPLITUDE,
        beta,
        log_bound_holds,
        ratio_at_min,
    }
}
