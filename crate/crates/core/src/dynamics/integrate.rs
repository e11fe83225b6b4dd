//! Dormand–Prince 5(4) with adaptive step size.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Integration stops once any coordinate falls below this value.
    pub positivity_floor: f64,
    pub max_steps: usize,
    /// Initial step; chosen automatically when `None`.
    pub initial_step: Option<f64>,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions { rtol: 1e-8, atol: 1e-10, positivity_floor: 1e-12, max_steps: 1_000_000, initial_step: None }
    }
}

/// Why an integration ended before `t_end`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Halt {
    PositivityFloor { t: f64, species: usize },
}

/// Accepted steps of an integration, including the initial point.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    pub halted: Option<Halt>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn final_state(&self) -> Option<&[f64]> {
        self.x.last().map(Vec::as_slice)
    }

    /// CSV with header `t,x1,...,xn`.
    pub fn to_csv(&self) -> String {
        let n = self.x.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 1..=n {
            let _ = write!(out, ",x{i}");
        }
        out.push('\n');
        for (t, x) in self.t.iter().zip(&self.x) {
            let _ = write!(out, "{t:e}");
            for v in x {
                let _ = write!(out, ",{v:e}");
            }
            out.push('\n');
        }
        out
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus the embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate `dx/dt = f(x)` from `x0` over `[0, t_end]`.
pub fn integrate_field<F>(f: F, x0: &[f64], t_end: f64, opts: &IntegrateOptions) -> Result<Trajectory>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Precondition("t_end must be positive and finite".into()));
    }
    let n = x0.len();
    let mut traj = Trajectory { t: vec![0.0], x: vec![x0.to_vec()], halted: None };
    let mut t = 0.0;
    let mut x = x0.to_vec();
    let mut k1 = f(&x);
    let mut h = opts.initial_step.unwrap_or_else(|| initial_step(&x, &k1, t_end, opts)).min(t_end);
    let mut stages = vec![vec![0.0; n]; 7];
    let mut steps = 0;

    while t < t_end {
        if steps >= opts.max_steps {
            return Err(Error::Numerical(format!("integration exceeded {} steps at t = {t}", opts.max_steps)));
        }
        steps += 1;
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t, partial: Box::new(traj) });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }

        stages[0].clone_from(&k1);
        let mut xs = vec![0.0; n];
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, stage) in stages.iter().enumerate().take(s) {
                    acc += A[s][j] * stage[i];
                }
                xs[i] = x[i] + h * acc;
            }
            stages[s] = f(&xs);
        }
        // xs now holds the fifth-order solution (the last row of A is its weights).
        let mut err = 0.0;
        for i in 0..n {
            let e: f64 = (0..7).map(|s| E[s] * stages[s][i]).sum::<f64>() * h;
            let sc = opts.atol + opts.rtol * x[i].abs().max(xs[i].abs());
            err += (e / sc).powi(2);
        }
        let err = if n == 0 { 0.0 } else { (err / n as f64).sqrt() };
        if !err.is_finite() {
            h *= 0.2;
            continue;
        }

        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            x.clone_from(&xs);
            k1.clone_from(&stages[6]);
            traj.t.push(t);
            traj.x.push(x.clone());
            if let Some(species) = x.iter().position(|v| *v < opts.positivity_floor) {
                traj.halted = Some(Halt::PositivityFloor { t, species });
                break;
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= if err <= 1.0 { factor } else { factor.min(1.0) };
    }
    Ok(traj)
}

fn initial_step(x: &[f64], f0: &[f64], t_end: f64, opts: &IntegrateOptions) -> f64 {
    let n = x.len().max(1) as f64;
    let scale = |i: usize| opts.atol + opts.rtol * x[i].abs();
    let d0 = (x.iter().enumerate().map(|(i, v)| (v / scale(i)).powi(2)).sum::<f64>() / n).sqrt();
    let d1 = (f0.iter().enumerate().map(|(i, v)| (v / scale(i)).powi(2)).sum::<f64>() / n).sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.min(t_end)
}
