//! Embedded Dormand–Prince 5(4) integrator with adaptive step control.
//!
//! A small, self-contained explicit Runge–Kutta integrator (the classic
//! `dopri5` pair with FSAL) used by the numeric laboratory and the
//! quadrature fallback. Implemented in-crate so the step-control policy,
//! tolerances, and failure semantics stay pinned and auditable: integration
//! either lands on the requested points within the error model or reports
//! exactly why it stopped (blow-up past a guard, step underflow, step
//! budget).
//!
//! Conventions: the right-hand side writes `y′` into a caller-provided
//! buffer; integration may run in either direction; requested sample points
//! are hit exactly by clipping the step, not by interpolation.

use thiserror::Error;

/// Why an integration stopped before reaching its target.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    /// The solution magnitude exceeded the blow-up guard.
    #[error("solution exceeded the blow-up guard near x = {x}")]
    Blowup {
        /// Position where the guard tripped.
        x: f64,
    },
    /// Error control forced the step below the resolvable spacing.
    #[error("step size underflow near x = {x}")]
    StepUnderflow {
        /// Position where the step collapsed.
        x: f64,
    },
    /// The step budget ran out before the target.
    #[error("exceeded {0} integration steps")]
    MaxSteps(usize),
    /// Sample points must move monotonically away from the start.
    #[error("sample points are not monotone in the direction of integration")]
    BadSamples,
}

/// Integrator options. The defaults match the numeric laboratory's
/// documented tolerances.
#[derive(Debug, Clone)]
pub struct OdeOptions {
    /// Relative tolerance per step.
    pub rtol: f64,
    /// Absolute tolerance per step.
    pub atol: f64,
    /// Hard cap on accepted + rejected steps.
    pub max_steps: usize,
    /// Magnitude guard: any component exceeding this aborts with
    /// [`OdeError::Blowup`].
    pub blowup: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 1_000_000,
            blowup: 1e12,
        }
    }
}

const STAGES: usize = 7;

/// Dormand–Prince coefficients (c, a, 5th-order b, embedded 4th-order b̂).
const C: [f64; STAGES] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; STAGES] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; STAGES] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; STAGES] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Stepper<'a, F> {
    f: &'a F,
    opts: &'a OdeOptions,
    x: f64,
    y: Vec<f64>,
    k: Vec<Vec<f64>>,
    /// FSAL: `k[0]` holds `f(x, y)` for the next step when `true`.
    fresh_k0: bool,
    h: f64,
    steps: usize,
}

impl<'a, F: Fn(f64, &[f64], &mut [f64])> Stepper<'a, F> {
    fn new(f: &'a F, x0: f64, y0: &[f64], opts: &'a OdeOptions) -> Self {
        let dim = y0.len();
        Stepper {
            f,
            opts,
            x: x0,
            y: y0.to_vec(),
            k: vec![vec![0.0; dim]; STAGES],
            fresh_k0: false,
            h: 0.0,
            steps: 0,
        }
    }

    /// Advance to exactly `target`, adapting the step size on the way.
    fn advance_to(&mut self, target: f64) -> Result<(), OdeError> {
        let dim = self.y.len();
        let direction = (target - self.x).signum();
        if direction == 0.0 {
            return Ok(());
        }
        // Re-aim a cached step from a previous segment if it points the
        // wrong way, and start conservatively on the first segment.
        if self.h == 0.0 || self.h.signum() != direction {
            self.h = direction * (target - self.x).abs().min(1e-2);
            self.fresh_k0 = false;
        }
        let mut y5 = vec![0.0; dim];
        let mut stage = vec![0.0; dim];
        while (target - self.x) * direction > 0.0 {
            if self.steps >= self.opts.max_steps {
                return Err(OdeError::MaxSteps(self.opts.max_steps));
            }
            self.steps += 1;
            let remaining = target - self.x;
            let mut h = if remaining.abs() <= self.h.abs() {
                remaining
            } else {
                self.h
            };
            if self.x + h == self.x {
                return Err(OdeError::StepUnderflow { x: self.x });
            }
            if !self.fresh_k0 {
                (self.f)(self.x, &self.y, &mut self.k[0]);
                self.fresh_k0 = true;
            }
            for s in 1..STAGES {
                for (i, si) in stage.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (t, kt) in self.k[..s].iter().enumerate() {
                        acc += A[s][t] * kt[i];
                    }
                    *si = self.y[i] + h * acc;
                }
                (self.f)(self.x + C[s] * h, &stage, &mut self.k[s]);
            }
            let mut err_sq = 0.0;
            for (i, y5i) in y5.iter_mut().enumerate() {
                let mut acc5 = 0.0;
                let mut acc_err = 0.0;
                for s in 0..STAGES {
                    acc5 += B5[s] * self.k[s][i];
                    acc_err += (B5[s] - B4[s]) * self.k[s][i];
                }
                *y5i = self.y[i] + h * acc5;
                let scale =
                    self.opts.atol + self.opts.rtol * self.y[i].abs().max(y5i.abs());
                let e = h * acc_err / scale;
                err_sq += e * e;
            }
            let err = (err_sq / dim as f64).sqrt();
            if !err.is_finite() {
                return Err(OdeError::Blowup { x: self.x });
            }
            if err <= 1.0 {
                self.x += h;
                self.y.copy_from_slice(&y5);
                if self.y.iter().any(|v| v.abs() > self.opts.blowup) {
                    return Err(OdeError::Blowup { x: self.x });
                }
                // FSAL: the last stage was evaluated at (x + h, y5).
                self.k.swap(0, STAGES - 1);
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                h *= factor;
            } else {
                // Rejected: k[0] = f(x, y) is still valid for the retry.
                h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            }
            self.h = h;
        }
        Ok(())
    }
}

/// Integrate `y′ = f(x, y)` from `(x0, y0)` to `x1` and return `y(x1)`.
pub fn integrate_to<F: Fn(f64, &[f64], &mut [f64])>(
    f: F,
    x0: f64,
    y0: &[f64],
    x1: f64,
    opts: &OdeOptions,
) -> Result<Vec<f64>, OdeError> {
    let mut stepper = Stepper::new(&f, x0, y0, opts);
    stepper.advance_to(x1)?;
    Ok(stepper.y)
}

/// Integrate from `(x0, y0)` and record the state at each point of `xs`,
/// which must move monotonically away from `x0` (either direction; `x0`
/// itself may be the first sample).
pub fn sample_path<F: Fn(f64, &[f64], &mut [f64])>(
    f: F,
    x0: f64,
    y0: &[f64],
    xs: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<Vec<f64>>, OdeError> {
    if xs.is_empty() {
        return Ok(Vec::new());
    }
    let direction = (xs[xs.len() - 1] - x0).signum();
    let mut prev = x0;
    for &x in xs {
        if (x - prev) * direction < 0.0 || (x - x0) * direction < 0.0 {
            return Err(OdeError::BadSamples);
        }
        prev = x;
    }
    let mut stepper = Stepper::new(&f, x0, y0, opts);
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        stepper.advance_to(x)?;
        out.push(stepper.y.clone());
    }
    Ok(out)
}

/// Record the state at each point of the ascending grid `xs`, integrating
/// outward from an anchor `x0` that may sit anywhere relative to the grid
/// (two independent sweeps, one per direction). Returns one state row per
/// sample, in grid order.
pub fn sample_bidirectional<F: Fn(f64, &[f64], &mut [f64])>(
    f: F,
    x0: f64,
    y0: &[f64],
    xs: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<Vec<f64>>, OdeError> {
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(OdeError::BadSamples);
    }
    let split = xs.partition_point(|&x| x < x0);
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); xs.len()];
    if split > 0 {
        let left: Vec<f64> = xs[..split].iter().rev().copied().collect();
        let got = sample_path(&f, x0, y0, &left, opts)?;
        for (k, row) in got.into_iter().enumerate() {
            rows[split - 1 - k] = row;
        }
    }
    if split < xs.len() {
        let got = sample_path(&f, x0, y0, &xs[split..], opts)?;
        for (k, row) in got.into_iter().enumerate() {
            rows[split + k] = row;
        }
    }
    Ok(rows)
}
