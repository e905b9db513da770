//! Single-area swing equation after the loss of the largest infeed, with the
//! three response speeds:
//!
//! ```text
//! 2·(H/f_o)·dΔf/dt = −ΔP_L + R(t) − D·d·Δf
//! R(t) = E·min(t/T_e, 1) + P·min(t/T_p, 1)       t < 30 s
//! R(t) = E·min(t/T_e, 1) + max(P, S)             t ≥ 30 s
//! ```
//!
//! `Δf` is signed (negative below nominal); reported nadir and QSS deviations
//! are drops, positive below nominal.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Scalar;
use crate::system::{FrequencyParams, SFR_START_S};

pub const DEFAULT_DT_S: f64 = 0.05;
pub const DEFAULT_T_END_S: f64 = 120.0;
pub const MIN_T_END_S: f64 = 60.0;
/// Length of the tail averaged into the quasi-steady-state value.
pub const QSS_WINDOW_S: f64 = 10.0;
/// Closed tolerance on both limits.
pub const COMPLIANCE_TOL_HZ: f64 = 1e-3;

#[derive(Debug, Error, PartialEq)]
pub enum SwingError {
    #[error("time step {dt} s does not resolve a {t_e} s EFR ramp (needs dt ≤ T_e/10)")]
    StepTooCoarse { dt: f64, t_e: f64 },
    #[error("simulation horizon {t_end} s is shorter than {MIN_T_END_S} s")]
    HorizonTooShort { t_end: f64 },
    #[error("zero inertia with a {loss} MW loss gives unbounded RoCoF")]
    ZeroInertia { loss: f64 },
    #[error("invalid portfolio: {0}")]
    Invalid(String),
}

/// One hour's response holdings as seen by the swing equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResponsePortfolio<T> {
    /// MVA·s.
    pub inertia: T,
    /// MW; multiplies `damping_per_hz`.
    pub demand_mw: T,
    pub efr_mw: T,
    pub efr_delivery_s: T,
    pub pfr_mw: T,
    pub pfr_delivery_s: T,
    pub sfr_mw: T,
    pub sfr_start_s: T,
    pub infeed_loss_mw: T,
    pub damping_per_hz: T,
    pub nominal_hz: T,
}

impl<T: Scalar> ResponsePortfolio<T> {
    /// Portfolio for an hour with demand `demand_mw`. Damping always uses
    /// that demand, whatever reference the schedule was built with.
    pub fn from_params(f: &FrequencyParams<T>, inertia: T, demand_mw: T, pfr_mw: T, sfr_mw: T) -> Self {
        ResponsePortfolio {
            inertia,
            demand_mw,
            efr_mw: f.efr_mw,
            efr_delivery_s: f.efr_delivery_s,
            pfr_mw,
            pfr_delivery_s: f.pfr_delivery_s,
            sfr_mw,
            sfr_start_s: T::lit(SFR_START_S),
            infeed_loss_mw: f.infeed_loss_mw,
            damping_per_hz: f.damping_per_hz,
            nominal_hz: f.nominal_hz,
        }
    }

    fn validate(&self) -> Result<(), SwingError> {
        let named = [
            ("inertia", self.inertia),
            ("demand_mw", self.demand_mw),
            ("efr_mw", self.efr_mw),
            ("pfr_mw", self.pfr_mw),
            ("sfr_mw", self.sfr_mw),
            ("infeed_loss_mw", self.infeed_loss_mw),
            ("damping_per_hz", self.damping_per_hz),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v >= T::zero()) {
                return Err(SwingError::Invalid(format!("{name} = {v}")));
            }
        }
        for (name, v) in [
            ("efr_delivery_s", self.efr_delivery_s),
            ("pfr_delivery_s", self.pfr_delivery_s),
            ("nominal_hz", self.nominal_hz),
        ] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(SwingError::Invalid(format!("{name} = {v}")));
            }
        }
        if self.inertia == T::zero() && self.infeed_loss_mw > T::zero() {
            return Err(SwingError::ZeroInertia {
                loss: self.infeed_loss_mw.as_f64(),
            });
        }
        Ok(())
    }

    /// Secondary holding is below primary, so the handover keeps primary
    /// in place instead of withdrawing it.
    pub fn sfr_below_pfr(&self) -> bool {
        self.sfr_mw < self.pfr_mw
    }

    /// Total response `R(t)`. `handed_over` selects the branch after
    /// secondary response has taken over. Nothing is deployed without a loss.
    pub fn response(&self, t: T, handed_over: bool) -> T {
        if self.infeed_loss_mw == T::zero() {
            return T::zero();
        }
        let efr = self.efr_mw * (t / self.efr_delivery_s).min(T::one());
        if handed_over {
            efr + self.pfr_mw.max(self.sfr_mw)
        } else {
            efr + self.pfr_mw * (t / self.pfr_delivery_s).min(T::one())
        }
    }

    /// `dΔf/dt`.
    fn rocof(&self, t: T, handed_over: bool, df: T) -> T {
        let imbalance = self.response(t, handed_over)
            - self.infeed_loss_mw
            - self.damping_per_hz * self.demand_mw * df;
        imbalance * self.nominal_hz / (T::lit(2.0) * self.inertia)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyTrace<T> {
    pub dt: T,
    /// `Δf` at `i·dt`, Hz.
    pub deviation: Vec<T>,
    /// `R` at `i·dt`, MW.
    pub response: Vec<T>,
    /// Largest drop below nominal, Hz (zero if frequency never falls).
    pub nadir_deviation: T,
    pub nadir_time: T,
    /// Mean drop over the last [`QSS_WINDOW_S`], Hz.
    pub qss_deviation: T,
    pub sfr_below_pfr: bool,
}

impl<T: Scalar> FrequencyTrace<T> {
    pub fn t_end(&self) -> T {
        self.dt * T::from_usize_lossy(self.deviation.len().saturating_sub(1))
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.deviation.len()).map(|i| self.dt * T::from_usize_lossy(i))
    }

    /// CSV with columns `time_s,delta_f_hz,response_mw`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time_s", "delta_f_hz", "response_mw"])?;
        for ((t, df), r) in self.times().zip(&self.deviation).zip(&self.response) {
            w.write_record([t.to_string(), df.to_string(), r.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn steps_for<T: Scalar>(dt: T, t_end: T) -> usize {
    (t_end / dt).round().to_usize().unwrap_or(0)
}

/// Integrates with classical fourth-order Runge–Kutta on a fixed grid.
pub fn simulate<T: Scalar>(p: &ResponsePortfolio<T>, dt: T, t_end: T) -> Result<FrequencyTrace<T>, SwingError> {
    p.validate()?;
    if !(dt > T::zero()) || dt > p.efr_delivery_s / T::lit(10.0) {
        return Err(SwingError::StepTooCoarse {
            dt: dt.as_f64(),
            t_e: p.efr_delivery_s.as_f64(),
        });
    }
    if !(t_end >= T::lit(MIN_T_END_S)) {
        return Err(SwingError::HorizonTooShort {
            t_end: t_end.as_f64(),
        });
    }
    let n = steps_for(dt, t_end);
    let mut deviation = Vec::with_capacity(n + 1);
    let mut response = Vec::with_capacity(n + 1);
    deviation.push(T::zero());
    response.push(p.response(T::zero(), false));
    if p.infeed_loss_mw == T::zero() {
        deviation.resize(n + 1, T::zero());
        response.resize(n + 1, T::zero());
        return Ok(finish(p, dt, deviation, response));
    }

    let half = dt / T::lit(2.0);
    let sixth = dt / T::lit(6.0);
    let mut df = T::zero();
    for i in 0..n {
        let t0 = dt * T::from_usize_lossy(i);
        // the branch is fixed over a step so the handover jump sits on the grid
        let after = t0 >= p.sfr_start_s;
        let k1 = p.rocof(t0, after, df);
        let k2 = p.rocof(t0 + half, after, df + half * k1);
        let k3 = p.rocof(t0 + half, after, df + half * k2);
        let k4 = p.rocof(t0 + dt, after, df + dt * k3);
        df = df + sixth * (k1 + T::lit(2.0) * (k2 + k3) + k4);
        let t1 = dt * T::from_usize_lossy(i + 1);
        deviation.push(df);
        response.push(p.response(t1, t1 >= p.sfr_start_s));
    }
    Ok(finish(p, dt, deviation, response))
}

/// Runs to at least `t_min` and then on, in whole QSS windows, until the
/// mean rate of change over the last window falls below `rocof_tol` or
/// `t_max` is reached. The returned trace ends there.
pub fn simulate_until_settled<T: Scalar>(
    p: &ResponsePortfolio<T>,
    dt: T,
    t_min: T,
    t_max: T,
    rocof_tol: T,
) -> Result<FrequencyTrace<T>, SwingError> {
    let full = simulate(p, dt, t_max.max(t_min))?;
    let window = steps_for(dt, T::lit(QSS_WINDOW_S)).max(1);
    let first = steps_for(dt, t_min);
    let last = full.deviation.len() - 1;
    let mut end = first;
    while end < last {
        let change = (full.deviation[end] - full.deviation[end - window]).abs();
        if change <= rocof_tol * T::lit(QSS_WINDOW_S) {
            break;
        }
        end = (end + window).min(last);
    }
    let mut deviation = full.deviation;
    let mut response = full.response;
    deviation.truncate(end + 1);
    response.truncate(end + 1);
    Ok(finish(p, dt, deviation, response))
}

fn finish<T: Scalar>(p: &ResponsePortfolio<T>, dt: T, deviation: Vec<T>, response: Vec<T>) -> FrequencyTrace<T> {
    let (mut i_min, mut v_min) = (0, deviation[0]);
    for (i, &v) in deviation.iter().enumerate() {
        if v < v_min {
            i_min = i;
            v_min = v;
        }
    }
    let mut nadir_time = dt * T::from_usize_lossy(i_min);
    // vertex of the parabola through the three samples around the minimum
    if i_min > 0 && i_min + 1 < deviation.len() {
        let (a, b, c) = (deviation[i_min - 1], v_min, deviation[i_min + 1]);
        let curv = a - T::lit(2.0) * b + c;
        if curv > T::zero() {
            let offset = (a - c) / (T::lit(2.0) * curv);
            nadir_time = nadir_time + offset * dt;
            v_min = b - (a - c) * (a - c) / (T::lit(8.0) * curv);
        }
    }
    let window = steps_for(dt, T::lit(QSS_WINDOW_S)).max(1);
    let tail = &deviation[deviation.len().saturating_sub(window + 1)..];
    let mean = tail.iter().fold(T::zero(), |acc, &v| acc + v) / T::from_usize_lossy(tail.len());
    FrequencyTrace {
        dt,
        nadir_deviation: (-v_min).max(T::zero()),
        nadir_time,
        qss_deviation: -mean,
        sfr_below_pfr: p.sfr_below_pfr(),
        deviation,
        response,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyLimit {
    Nadir,
    Qss,
}

impl std::fmt::Display for FrequencyLimit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FrequencyLimit::Nadir => "nadir limit",
            FrequencyLimit::Qss => "QSS limit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplianceReport {
    pub passed: bool,
    pub nadir_deviation_hz: f64,
    pub qss_deviation_hz: f64,
    /// Limit minus deviation; negative when breached.
    pub nadir_margin_hz: f64,
    pub qss_margin_hz: f64,
    pub violated: Vec<FrequencyLimit>,
    pub sfr_below_pfr: bool,
}

/// Pass iff both drops are within their limits plus [`COMPLIANCE_TOL_HZ`].
pub fn check_compliance<T: Scalar>(trace: &FrequencyTrace<T>, nadir_limit_hz: f64, qss_limit_hz: f64) -> ComplianceReport {
    let nadir = trace.nadir_deviation.as_f64();
    let qss = trace.qss_deviation.as_f64();
    let mut violated = Vec::new();
    if nadir > nadir_limit_hz + COMPLIANCE_TOL_HZ {
        violated.push(FrequencyLimit::Nadir);
    }
    if qss > qss_limit_hz + COMPLIANCE_TOL_HZ {
        violated.push(FrequencyLimit::Qss);
    }
    ComplianceReport {
        passed: violated.is_empty(),
        nadir_deviation_hz: nadir,
        qss_deviation_hz: qss,
        nadir_margin_hz: nadir_limit_hz - nadir,
        qss_margin_hz: qss_limit_hz - qss,
        violated,
        sfr_below_pfr: trace.sfr_below_pfr,
    }
}
