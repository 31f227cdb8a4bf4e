//! Dormand–Prince 5(4) with the standard fourth-order dense output.

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h0: Option<f64>,
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-14, h0: None, max_steps: 200_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Why integration stopped before reaching the end point.
#[derive(Debug, Clone, PartialEq)]
pub enum Stop<E> {
    /// Raised by the right-hand side or the step observer.
    User(E),
    StepSizeUnderflow { t: f64 },
    TooManySteps { t: f64 },
}

#[derive(Debug, Clone)]
pub struct Output<E> {
    /// Requested output times reached so far, with interpolated states.
    pub ts: Vec<f64>,
    pub ys: Vec<Vec<f64>>,
    pub t_end: f64,
    pub y_end: Vec<f64>,
    pub stats: Stats,
    pub stop: Option<Stop<E>>,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy(out: &mut [f64], y: &[f64], h: f64, terms: &[(f64, &[f64])]) {
    for i in 0..y.len() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] = y[i] + h * acc;
    }
}

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
///
/// `t_out` lists output times, monotone in the direction of integration;
/// they are filled by dense interpolation. `observe` runs after every
/// accepted step and can stop the integration with a user error.
pub fn integrate<E, F, O>(mut f: F, t0: f64, y0: &[f64], t1: f64, t_out: &[f64], opts: &Options, mut observe: O) -> Output<E>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), E>,
    O: FnMut(f64, &[f64]) -> Result<(), E>,
{
    let n = y0.len();
    let dir = (t1 - t0).signum();
    let mut stats = Stats::default();
    let mut out = Output { ts: Vec::new(), ys: Vec::new(), t_end: t0, y_end: y0.to_vec(), stats, stop: None };
    let mut next_out = 0;
    while next_out < t_out.len() && (t_out[next_out] - t0) * dir <= 0.0 {
        out.ts.push(t_out[next_out]);
        out.ys.push(y0.to_vec());
        next_out += 1;
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    if let Err(e) = f(t, &y, &mut k[0]) {
        out.stop = Some(Stop::User(e));
        return out;
    }
    stats.evaluations += 1;

    let mut h = opts.h0.unwrap_or_else(|| {
        let norm = y.iter().zip(&k[0]).map(|(yi, fi)| (fi / (opts.abs_tol + opts.rel_tol * yi.abs())).powi(2)).sum::<f64>();
        let guess = 0.01 / (norm / n as f64).sqrt().max(1e-10);
        guess.min((t1 - t0).abs())
    }) * dir;
    let mut last_rejected = false;

    loop {
        if (t1 - t) * dir <= 0.0 {
            break;
        }
        if stats.accepted + stats.rejected >= opts.max_steps {
            out.stop = Some(Stop::TooManySteps { t });
            break;
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            out.stop = Some(Stop::StepSizeUnderflow { t });
            break;
        }

        let (k0, rest) = k.split_at_mut(1);
        let [k1, k2, k3, k4, k5, k6] = rest else { unreachable!() };
        let k0 = &k0[0];
        let stages: Result<(), E> = (|| {
            axpy(&mut tmp, &y, h, &[(A21, k0)]);
            f(t + C2 * h, &tmp, k1)?;
            axpy(&mut tmp, &y, h, &[(A31, k0), (A32, k1)]);
            f(t + C3 * h, &tmp, k2)?;
            axpy(&mut tmp, &y, h, &[(A41, k0), (A42, k1), (A43, k2)]);
            f(t + C4 * h, &tmp, k3)?;
            axpy(&mut tmp, &y, h, &[(A51, k0), (A52, k1), (A53, k2), (A54, k3)]);
            f(t + C5 * h, &tmp, k4)?;
            axpy(&mut tmp, &y, h, &[(A61, k0), (A62, k1), (A63, k2), (A64, k3), (A65, k4)]);
            f(t + h, &tmp, k5)?;
            axpy(&mut ynew, &y, h, &[(A71, k0), (A73, k2), (A74, k3), (A75, k4), (A76, k5)]);
            f(t + h, &ynew, k6)
        })();
        stats.evaluations += 6;
        if let Err(e) = stages {
            // a failing stage may just be an overshoot; retry smaller first
            if h.abs() > 1e-6 * (t1 - t0).abs() {
                h *= 0.25;
                stats.rejected += 1;
                last_rejected = true;
                // keep the user error if the step keeps failing
                out.stop = Some(Stop::User(e));
                continue;
            }
            out.stop = Some(Stop::User(e));
            break;
        }
        out.stop = None;

        let mut err = 0.0;
        for i in 0..n {
            let e = h * (E1 * k0[i] + E3 * k2[i] + E4 * k3[i] + E5 * k4[i] + E6 * k5[i] + E7 * k6[i]);
            let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(ynew[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / n as f64).sqrt();

        if err <= 1.0 {
            // dense output coefficients
            let r5: Vec<f64> = (0..n)
                .map(|i| h * (D1 * k0[i] + D3 * k2[i] + D4 * k3[i] + D5 * k4[i] + D6 * k5[i] + D7 * k6[i]))
                .collect();
            let tn = t + h;
            while next_out < t_out.len() && (t_out[next_out] - tn) * dir <= 0.0 {
                let th = (t_out[next_out] - t) / h;
                let th1 = 1.0 - th;
                let yi: Vec<f64> = (0..n)
                    .map(|i| {
                        let ydiff = ynew[i] - y[i];
                        let bspl = h * k0[i] - ydiff;
                        let r4 = ydiff - h * k6[i] - bspl;
                        y[i] + th * (ydiff + th1 * (bspl + th * (r4 + th1 * r5[i])))
                    })
                    .collect();
                out.ts.push(t_out[next_out]);
                out.ys.push(yi);
                next_out += 1;
            }
            t = tn;
            y.copy_from_slice(&ynew);
            let (first, last) = k.split_at_mut(6);
            first[0].copy_from_slice(&last[0]);
            stats.accepted += 1;
            if let Err(e) = observe(t, &y) {
                out.stop = Some(Stop::User(e));
                break;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= if last_rejected { fac.min(1.0) } else { fac };
            last_rejected = false;
        } else {
            stats.rejected += 1;
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= fac;
            last_rejected = true;
        }
    }
    out.t_end = t;
    out.y_end = y;
    out.stats = stats;
    out
}
