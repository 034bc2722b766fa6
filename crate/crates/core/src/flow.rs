//! Time integration of Lax and Hamiltonian flows with drift reporting.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::lax::{LaxError, LaxSystem};
use crate::linalg::Matrix;
use crate::phase::{ChartMap, HamiltonianSystem, PhaseError};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("invalid integrator configuration: {0}")]
    Config(String),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("non-finite state at t = {0}")]
    NonFinite(f64),
    #[error("chart mismatch: {0}")]
    Chart(String),
    #[error(transparent)]
    Lax(#[from] LaxError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method<T> {
    /// Classical fixed-step Runge–Kutta; the step is shrunk so that it divides the horizon.
    Rk4 { h: T },
    /// Dormand–Prince 5(4) with mixed tolerance `atol + rtol·|z|`.
    DormandPrince { rtol: T, atol: T, h0: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<T> {
    pub method: Method<T>,
    pub horizon: T,
    /// Record every `stride`-th step; the final state is always recorded.
    pub stride: usize,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        IntegratorConfig { method: Method::Rk4 { h: T::lit(1e-3) }, horizon: T::lit(10.0), stride: 100 }
    }
}

impl<T: Real> IntegratorConfig<T> {
    pub fn rk4(h: T, horizon: T) -> Self {
        IntegratorConfig { method: Method::Rk4 { h }, horizon, stride: 1 }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        let pos = |x: T| x > T::zero() && x.is_finite();
        if !pos(self.horizon) {
            return Err(FlowError::Config("horizon must be positive".into()));
        }
        if self.stride == 0 {
            return Err(FlowError::Config("stride must be at least 1".into()));
        }
        match self.method {
            Method::Rk4 { h } if !pos(h) => Err(FlowError::Config("step must be positive".into())),
            Method::DormandPrince { rtol, atol, h0 } if !(pos(rtol) && pos(atol) && pos(h0)) => {
                Err(FlowError::Config("tolerances and initial step must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Sampled solution of an autonomous ODE.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
}

fn axpy<T: Real>(z: &[T], h: T, k: &[T]) -> Vec<T> {
    z.iter().zip(k).map(|(a, b)| *a + h * *b).collect()
}

fn finite<T: Real>(z: &[T], t: T) -> Result<(), FlowError> {
    if z.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(FlowError::NonFinite(t.to_f64_lossy()))
    }
}

/// Integrates `ż = f(z)` from `t = 0` to the configured horizon.
pub fn integrate_ode<T, E>(
    f: &dyn Fn(&[T]) -> Result<Vec<T>, E>,
    z0: &[T],
    cfg: &IntegratorConfig<T>,
) -> Result<Samples<T>, FlowError>
where
    T: Real,
    FlowError: From<E>,
{
    cfg.validate()?;
    finite(z0, T::zero())?;
    let mut out = Samples { times: vec![T::zero()], states: vec![z0.to_vec()] };
    match cfg.method {
        Method::Rk4 { h } => {
            let steps = (cfg.horizon / h).ceil().to_usize().unwrap_or(usize::MAX).max(1);
            let h = cfg.horizon / T::lit(steps as f64);
            let half = T::lit(0.5) * h;
            let sixth = h / T::lit(6.0);
            let two = T::lit(2.0);
            let mut z = z0.to_vec();
            for s in 1..=steps {
                let k1 = f(&z)?;
                let k2 = f(&axpy(&z, half, &k1))?;
                let k3 = f(&axpy(&z, half, &k2))?;
                let k4 = f(&axpy(&z, h, &k3))?;
                for i in 0..z.len() {
                    z[i] += sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
                }
                let t = if s == steps { cfg.horizon } else { h * T::lit(s as f64) };
                finite(&z, t)?;
                if s % cfg.stride == 0 || s == steps {
                    out.times.push(t);
                    out.states.push(z.clone());
                }
            }
        }
        Method::DormandPrince { rtol, atol, h0 } => dormand_prince(f, z0, cfg, rtol, atol, h0, &mut out)?,
    }
    Ok(out)
}

const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

fn dormand_prince<T, E>(
    f: &dyn Fn(&[T]) -> Result<Vec<T>, E>,
    z0: &[T],
    cfg: &IntegratorConfig<T>,
    rtol: T,
    atol: T,
    h0: T,
    out: &mut Samples<T>,
) -> Result<(), FlowError>
where
    T: Real,
    FlowError: From<E>,
{
    debug_assert_eq!(DP_C.len(), DP_A.len());
    let n = z0.len();
    let mut z = z0.to_vec();
    let mut t = T::zero();
    let mut h = h0.min(cfg.horizon);
    let mut accepted = 0usize;
    let hmin = T::epsilon() * T::lit(16.0) * cfg.horizon;
    while t < cfg.horizon {
        if h < hmin {
            return Err(FlowError::StepUnderflow(t.to_f64_lossy()));
        }
        let last = t + h >= cfg.horizon;
        if last {
            h = cfg.horizon - t;
        }
        let mut k: Vec<Vec<T>> = Vec::with_capacity(7);
        for s in 0..7 {
            let mut w = z.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = T::lit(DP_A[s][j]);
                if a != T::zero() {
                    for i in 0..n {
                        w[i] += h * a * kj[i];
                    }
                }
            }
            k.push(f(&w)?);
        }
        let mut znew = z.clone();
        let mut err = T::zero();
        for i in 0..n {
            let mut inc = T::zero();
            let mut e = T::zero();
            for s in 0..7 {
                inc += T::lit(DP_B[s]) * k[s][i];
                e += T::lit(DP_E[s]) * k[s][i];
            }
            znew[i] += h * inc;
            let sc = atol + rtol * z[i].abs().max(znew[i].abs());
            let r = h * e / sc;
            err += r * r;
        }
        let err = (err / T::lit(n as f64)).sqrt();
        if !err.is_finite() {
            h = h * T::lit(0.25);
            continue;
        }
        if err <= T::one() {
            t = if last { cfg.horizon } else { t + h };
            z = znew;
            finite(&z, t)?;
            accepted += 1;
            if accepted % cfg.stride == 0 || last {
                out.times.push(t);
                out.states.push(z.clone());
            }
        }
        let factor = if err == T::zero() { T::lit(5.0) } else { T::lit(0.9) * err.powf(T::lit(-0.2)) };
        h = h * factor.max(T::lit(0.2)).min(T::lit(5.0));
    }
    Ok(())
}

/// Lax trajectory: native states with `L(t)`, energy and spectrum per sample.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub names: Vec<String>,
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub lax: Vec<Matrix<T>>,
    pub energy: Vec<T>,
    /// Eigenvalues `(re, im)` of `L(t)`, sorted by real then imaginary part.
    pub eigenvalues: Vec<Vec<(T, T)>>,
    pub wall_clock: Duration,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &[T] {
        self.states.last().expect("nonempty trajectory")
    }

    /// Builds a trajectory from samples, rebuilding `L` at each one.
    pub fn from_samples(sys: &LaxSystem<T>, samples: Samples<T>, wall_clock: Duration) -> Result<Self, FlowError> {
        let mut lax = Vec::with_capacity(samples.times.len());
        let mut energy = Vec::with_capacity(samples.times.len());
        let mut eigenvalues = Vec::with_capacity(samples.times.len());
        for z in &samples.states {
            lax.push(sys.build_l(z)?);
            energy.push(sys.hamiltonian().energy(z)?);
            eigenvalues.push(sys.eigenvalues(z)?);
        }
        Ok(Trajectory {
            names: sys.state_names().to_vec(),
            times: samples.times,
            states: samples.states,
            lax,
            energy,
            eigenvalues,
            wall_clock,
        })
    }

    /// `t,<names>,trL,trL2,trL3,eig1..eign` with 17 significant digits; eigenvalue columns
    /// hold real parts.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push_str(",trL,trL2,trL3");
        let size = self.lax.first().map(Matrix::rows).unwrap_or(0);
        for k in 1..=size {
            let _ = write!(out, ",eig{k}");
        }
        out.push('\n');
        for i in 0..self.len() {
            let _ = write!(out, "{:.16e}", self.times[i]);
            for x in &self.states[i] {
                let _ = write!(out, ",{x:.16e}");
            }
            for k in 1..=3 {
                let _ = write!(out, ",{:.16e}", self.lax[i].pow(k).trace());
            }
            for (re, _) in &self.eigenvalues[i] {
                let _ = write!(out, ",{re:.16e}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn integrate<T: Real>(sys: &LaxSystem<T>, z0: &[T], cfg: &IntegratorConfig<T>) -> Result<Trajectory<T>, FlowError> {
    let start = Instant::now();
    let samples = integrate_ode(&|z: &[T]| sys.state_rhs(z), z0, cfg)?;
    Trajectory::from_samples(sys, samples, start.elapsed())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport<T> {
    /// `(k, max_t |tr Lᵏ(t) − tr Lᵏ(0)|)`.
    pub invariant_drift: Vec<(u32, T)>,
    /// `max_t max_k |λ_k(t) − λ_k(0)|` over the sorted spectra.
    pub eigenvalue_drift: T,
    pub energy_drift: T,
    pub wall_clock: Duration,
}

impl<T: Real> DriftReport<T> {
    pub fn invariant(&self, k: u32) -> Option<T> {
        self.invariant_drift.iter().find(|(j, _)| *j == k).map(|(_, d)| *d)
    }

    pub fn max_invariant_drift(&self) -> T {
        self.invariant_drift.iter().fold(T::zero(), |m, (_, d)| m.max(*d))
    }

    /// `# ...` footer lines appended to trajectory CSVs.
    pub fn csv_footer(&self) -> String {
        let mut out = String::new();
        for (k, d) in &self.invariant_drift {
            let _ = writeln!(out, "# drift trL{k} {d:.16e}");
        }
        let _ = writeln!(out, "# drift eigenvalues {:.16e}", self.eigenvalue_drift);
        let _ = writeln!(out, "# drift energy {:.16e}", self.energy_drift);
        out
    }
}

pub fn drift_report<T: Real>(traj: &Trajectory<T>, ks: &[u32]) -> DriftReport<T> {
    assert!(!traj.is_empty(), "drift of an empty trajectory");
    let invariant_drift = ks
        .iter()
        .map(|&k| {
            let t0 = traj.lax[0].pow(k).trace();
            (k, traj.lax.iter().fold(T::zero(), |m, l| m.max((l.pow(k).trace() - t0).abs())))
        })
        .collect();
    let e0 = &traj.eigenvalues[0];
    let eigenvalue_drift = traj
        .eigenvalues
        .iter()
        .fold(T::zero(), |m, ev| ev.iter().zip(e0).fold(m, |m, (a, b)| m.max((a.0 - b.0).hypot(a.1 - b.1))));
    let energy_drift = traj.energy.iter().fold(T::zero(), |m, e| m.max((*e - traj.energy[0]).abs()));
    DriftReport { invariant_drift, eigenvalue_drift, energy_drift, wall_clock: traj.wall_clock }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheckReport<T> {
    /// `sup_t ‖map(z_a(t)) − z_b(t)‖∞` over the common sample times.
    pub max_distance: T,
    pub samples: usize,
}

/// Integrates `a` from `z0` and `b` from `map(z0)` and compares through the map.
pub fn cross_check_flows<T: Real>(
    sys_a: &HamiltonianSystem<T>,
    sys_b: &HamiltonianSystem<T>,
    map: &ChartMap<T>,
    z0: &[T],
    cfg: &IntegratorConfig<T>,
) -> Result<CrossCheckReport<T>, FlowError> {
    if map.source_dim() != sys_a.dim() || map.target_dim() != sys_b.dim() {
        return Err(FlowError::Chart(format!(
            "map {} is {}->{}, systems are {} and {}",
            map.name(),
            map.source_dim(),
            map.target_dim(),
            sys_a.dim(),
            sys_b.dim()
        )));
    }
    if matches!(cfg.method, Method::DormandPrince { .. }) {
        return Err(FlowError::Config("cross checks need fixed-step sampling".into()));
    }
    let a = integrate_ode(&|z: &[T]| sys_a.vector_field(z), z0, cfg)?;
    let b = integrate_ode(&|z: &[T]| sys_b.vector_field(z), &map.forward(z0)?, cfg)?;
    let mut max_distance = T::zero();
    for (za, zb) in a.states.iter().zip(&b.states) {
        let w = map.forward(za)?;
        max_distance = w.iter().zip(zb).fold(max_distance, |m, (x, y)| m.max((*x - *y).abs()));
    }
    Ok(CrossCheckReport { max_distance, samples: a.states.len().min(b.states.len()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lax::LaxFamily;

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::<f64>::default().validate().is_ok());
        assert!(IntegratorConfig::rk4(0.0, 1.0).validate().is_err());
        assert!(IntegratorConfig::rk4(1e-3, -1.0).validate().is_err());
        assert!(IntegratorConfig::rk4(1e-3, 1.0).with_stride(0).validate().is_err());
    }

    #[test]
    fn exponential_decay_both_methods() {
        let f = |z: &[f64]| -> Result<Vec<f64>, FlowError> { Ok(vec![-z[0]]) };
        let rk = integrate_ode(&f, &[1.0], &IntegratorConfig::rk4(1e-2, 1.0)).unwrap();
        assert!((rk.states.last().unwrap()[0] - (-1f64).exp()).abs() < 1e-9);
        assert_eq!(*rk.times.last().unwrap(), 1.0);
        let cfg = IntegratorConfig {
            method: Method::DormandPrince { rtol: 1e-10, atol: 1e-12, h0: 0.1 },
            horizon: 1.0,
            stride: 1,
        };
        let dp = integrate_ode(&f, &[1.0], &cfg).unwrap();
        assert!((dp.states.last().unwrap()[0] - (-1f64).exp()).abs() < 1e-9);
        assert!(dp.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn blow_up_is_reported() {
        let f = |z: &[f64]| -> Result<Vec<f64>, FlowError> { Ok(vec![z[0] * z[0]]) };
        let r = integrate_ode(&f, &[1.0], &IntegratorConfig::rk4(1e-2, 2.0));
        assert!(matches!(r, Err(FlowError::NonFinite(_))));
    }

    #[test]
    fn constant_trajectory_has_zero_drift() {
        let sys = LaxSystem::<f64>::new(LaxFamily::GL(2));
        let traj = integrate(&sys, &[1.0, 0.0, 0.0, 2.0], &IntegratorConfig::rk4(1e-2, 1.0)).unwrap();
        let d = drift_report(&traj, &[1, 2, 3]);
        assert_eq!(d.max_invariant_drift(), 0.0);
        assert_eq!(d.eigenvalue_drift, 0.0);
    }

    #[test]
    fn csv_header_and_rows() {
        let sys = LaxSystem::<f64>::new(LaxFamily::A1Toy(0));
        let traj = integrate(&sys, &[0.0, 1.0], &IntegratorConfig::rk4(1e-2, 0.1).with_stride(5)).unwrap();
        let csv = traj.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,pt,qt,trL,trL2,trL3,eig1,eig2");
        assert_eq!(lines.count(), traj.len());
        assert_eq!(traj.len(), 3);
    }
}
