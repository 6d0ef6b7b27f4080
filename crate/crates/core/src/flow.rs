//! Trajectory integration on extended phase space.
//!
//! Time advances at unit rate and is carried as the last coordinate, so a
//! step from `p` with step `h` lands exactly at `p.t() + h`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::mechanics::Dynamics;
use crate::point::{ExtendedPoint, TangentVector};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "method", rename_all = "kebab-case", deny_unknown_fields))]
pub enum Method {
    /// Classical fourth-order Runge–Kutta with fixed step `h` (shortened so
    /// every requested time is hit exactly).
    Rk4Fixed { h: f64 },
    /// Dormand–Prince 5(4) with per-component error control.
    Rk45Adaptive { rtol: f64, atol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorParams {
    pub method: Method,
    pub max_steps: usize,
    /// Permit `t2 < t1`.
    pub allow_backward: bool,
}

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_MAX_STEPS: usize = 10_000_000;

impl Default for IntegratorParams {
    fn default() -> Self {
        IntegratorParams::rk4(DEFAULT_STEP)
    }
}

impl IntegratorParams {
    pub fn rk4(h: f64) -> Self {
        IntegratorParams { method: Method::Rk4Fixed { h }, max_steps: DEFAULT_MAX_STEPS, allow_backward: false }
    }

    pub fn rk45(rtol: f64, atol: f64) -> Self {
        IntegratorParams { method: Method::Rk45Adaptive { rtol, atol }, max_steps: DEFAULT_MAX_STEPS, allow_backward: false }
    }

    pub fn backward(mut self) -> Self {
        self.allow_backward = true;
        self
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.method {
            Method::Rk4Fixed { h } => h > 0.0 && h.is_finite(),
            Method::Rk45Adaptive { rtol, atol } => rtol > 0.0 && atol > 0.0,
        };
        if !ok {
            return Err(Error::InvalidInput("integrator step and tolerances must be positive".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidInput("max_steps must be positive".into()));
        }
        Ok(())
    }
}

/// Samples of a solution curve with their velocities; times are strictly
/// monotone (increasing unless integrated backward).
#[derive(Debug, Clone)]
pub struct Trajectory {
    points: Vec<ExtendedPoint>,
    velocities: Vec<TangentVector>,
}

impl Trajectory {
    pub fn points(&self) -> &[ExtendedPoint] {
        &self.points
    }

    pub fn velocities(&self) -> &[TangentVector] {
        &self.velocities
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> &ExtendedPoint {
        &self.points[0]
    }

    pub fn end(&self) -> &ExtendedPoint {
        self.points.last().expect("non-empty trajectory")
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(ExtendedPoint::t).collect()
    }

    /// Cubic Hermite interpolation on the stored (point, velocity) pairs.
    /// `None` outside the integrated time span.
    pub fn at(&self, t: f64) -> Option<ExtendedPoint> {
        let forward = self.end().t() >= self.start().t();
        let key = |p: &ExtendedPoint| if forward { p.t() } else { -p.t() };
        let tk = if forward { t } else { -t };
        if tk < key(self.start()) || tk > key(self.end()) {
            return None;
        }
        let k = self.points.partition_point(|p| key(p) <= tk).saturating_sub(1).min(self.len().saturating_sub(2));
        if self.len() == 1 {
            return Some(self.points[0]);
        }
        let (p0, p1) = (&self.points[k], &self.points[k + 1]);
        let (v0, v1) = (&self.velocities[k], &self.velocities[k + 1]);
        let dt = p1.t() - p0.t();
        let s = (t - p0.t()) / dt;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let mut out = *p0;
        for i in 0..p0.n() {
            out[i] = h00 * p0[i] + h10 * dt * v0[i] + h01 * p1[i] + h11 * dt * v1[i];
        }
        out.set_t(t);
        Some(out)
    }
}

/// Integrates from `p0` placed at time `t1` to `t2`, recording every step.
pub fn integrate(sys: &dyn Dynamics, p0: &ExtendedPoint, t1: f64, t2: f64, params: &IntegratorParams) -> Result<Trajectory> {
    check_direction(t1, t2, params)?;
    let mut p = *p0;
    p.set_t(t1);
    check_region(sys, &p)?;
    let mut traj = Trajectory { points: Vec::new(), velocities: Vec::new() };
    let mut steps = 0;
    let v = sys.velocity(&p)?;
    traj.points.push(p);
    traj.velocities.push(v);
    advance(sys, p, t2, params, &mut steps, &mut |q, v| {
        traj.points.push(*q);
        traj.velocities.push(*v);
    })?;
    Ok(traj)
}

/// The flow image of `p0` (taken at time `times[0]`) at each requested time.
/// Times must be monotone in the integration direction.
pub fn integrate_to_times(sys: &dyn Dynamics, p0: &ExtendedPoint, times: &[f64], params: &IntegratorParams) -> Result<Vec<ExtendedPoint>> {
    let Some(&t0) = times.first() else {
        return Ok(Vec::new());
    };
    let mut p = *p0;
    p.set_t(t0);
    check_region(sys, &p)?;
    let mut out = Vec::with_capacity(times.len());
    out.push(p);
    let mut steps = 0;
    for w in times.windows(2) {
        check_direction(w[0], w[1], params)?;
        if (w[1] - w[0]) * (times[times.len() - 1] - t0) < 0.0 {
            return Err(Error::InvalidInput("requested times are not monotone".into()));
        }
        p = advance(sys, p, w[1], params, &mut steps, &mut |_, _| {})?;
        out.push(p);
    }
    Ok(out)
}

/// `Φ_{t−t₀}(p)` for the single endpoint `t`.
pub fn flow_to(sys: &dyn Dynamics, p0: &ExtendedPoint, t: f64, params: &IntegratorParams) -> Result<ExtendedPoint> {
    Ok(*integrate_to_times(sys, p0, &[p0.t(), t], params)?.last().expect("two times"))
}

fn check_direction(t1: f64, t2: f64, params: &IntegratorParams) -> Result<()> {
    params.validate()?;
    if !t1.is_finite() || !t2.is_finite() {
        return Err(Error::InvalidInput("integration times must be finite".into()));
    }
    if t2 < t1 && !params.allow_backward {
        return Err(Error::InvalidInput("t2 < t1 requires backward integration to be enabled".into()));
    }
    Ok(())
}

fn check_region(sys: &dyn Dynamics, p: &ExtendedPoint) -> Result<()> {
    if !p.is_finite() || !sys.region().contains(p.x()) {
        return Err(Error::RegionExit { t: p.t(), coords: p.x().to_vec() });
    }
    Ok(())
}

fn advance(
    sys: &dyn Dynamics,
    p: ExtendedPoint,
    t_end: f64,
    params: &IntegratorParams,
    steps: &mut usize,
    record: &mut dyn FnMut(&ExtendedPoint, &TangentVector),
) -> Result<ExtendedPoint> {
    let span = t_end - p.t();
    if span == 0.0 {
        return Ok(p);
    }
    match params.method {
        Method::Rk4Fixed { h } => {
            let count = math::ceil(math::abs(span) / h - 1e-9).max(1.0) as usize;
            if *steps + count > params.max_steps {
                return Err(Error::MaxStepsExceeded { t: p.t(), steps: params.max_steps });
            }
            let t0 = p.t();
            let hh = span / count as f64;
            let mut p = p;
            for k in 0..count {
                p = rk4_step(sys, &p, hh)?;
                // pin time to the grid to avoid accumulated drift
                p.set_t(if k + 1 == count { t_end } else { t0 + (k + 1) as f64 * hh });
                check_region(sys, &p)?;
                record(&p, &sys.velocity(&p)?);
            }
            *steps += count;
            Ok(p)
        }
        Method::Rk45Adaptive { rtol, atol } => dopri(sys, p, t_end, rtol, atol, params.max_steps, steps, record),
    }
}

pub(crate) fn rk4_step(sys: &dyn Dynamics, p: &ExtendedPoint, h: f64) -> Result<ExtendedPoint> {
    let k1 = sys.velocity(p)?;
    let k2 = sys.velocity(&p.displaced(&k1, 0.5 * h))?;
    let k3 = sys.velocity(&p.displaced(&k2, 0.5 * h))?;
    let k4 = sys.velocity(&p.displaced(&k3, h))?;
    let mut out = *p;
    for i in 0..p.dim() {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B4: [f64; 7] = [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

#[allow(clippy::too_many_arguments)]
fn dopri(
    sys: &dyn Dynamics,
    mut p: ExtendedPoint,
    t_end: f64,
    rtol: f64,
    atol: f64,
    max_steps: usize,
    steps: &mut usize,
    record: &mut dyn FnMut(&ExtendedPoint, &TangentVector),
) -> Result<ExtendedPoint> {
    let dir = if t_end > p.t() { 1.0 } else { -1.0 };
    let mut h = dir * (1e-2 * math::abs(t_end - p.t())).min(0.1);
    let mut k = [TangentVector::zero(p.n()); 7];
    k[0] = sys.velocity(&p)?;
    loop {
        let remaining = t_end - p.t();
        if remaining * dir <= 0.0 {
            return Ok(p);
        }
        let last = math::abs(h) >= math::abs(remaining);
        if last {
            h = remaining;
        }
        if math::abs(h) < 1e-14 * math::abs(p.t()).max(1.0) {
            return Err(Error::StepSizeUnderflow { t: p.t(), h });
        }
        if *steps >= max_steps {
            return Err(Error::MaxStepsExceeded { t: p.t(), steps: max_steps });
        }
        *steps += 1;
        for s in 0..6 {
            let mut q = p;
            for (j, a) in A[s].iter().enumerate().take(s + 1) {
                if *a != 0.0 {
                    q = q.displaced(&k[j], h * a);
                }
            }
            if s == 5 {
                // fifth-order solution; k[6] is its (FSAL) velocity
                q.set_t(if last { t_end } else { p.t() + h });
                let y5 = q;
                k[6] = sys.velocity(&y5)?;
                let mut y4 = p;
                for (j, b) in B4.iter().enumerate() {
                    y4 = y4.displaced(&k[j], h * b);
                }
                let mut err = 0.0;
                for i in 0..p.n() {
                    let sc = atol + rtol * math::abs(p[i]).max(math::abs(y5[i]));
                    let e = (y5[i] - y4[i]) / sc;
                    err += e * e;
                }
                let err = math::sqrt(err / p.n() as f64);
                if !err.is_finite() {
                    h *= 0.2;
                    break;
                }
                if err <= 1.0 {
                    check_region(sys, &y5)?;
                    p = y5;
                    record(&p, &k[6]);
                    k[0] = k[6];
                }
                let factor = if err == 0.0 { 5.0 } else { (0.9 * math::pow(err, -0.2)).clamp(0.2, 5.0) };
                if !(err <= 1.0 && last) {
                    h *= factor;
                }
                break;
            }
            k[s + 1] = sys.velocity(&q)?;
        }
    }
}
