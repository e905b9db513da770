//! Unit commitment with multi-speed frequency response.
//!
//! A weekly-to-annual scheduling model for a thermal and storage fleet that
//! must hold enough inertia, primary (PFR) and secondary (SFR) response to
//! survive the largest infeed loss. Enhanced frequency response (EFR) is a
//! fixed block that offsets part of the primary requirement.
//!
//! - [`system`]: fleet, profiles, frequency parameters and TOML configs.
//! - [`mip`]: a solver-neutral MILP model with HiGHS and subprocess backends.
//! - [`uc`]: commitment, dispatch, ramping and storage constraints.
//! - [`fr`]: the nadir chord envelope, the QSS floor and provision limits.
//! - [`swing`]: a swing-equation simulator that checks scheduled hours.
//! - [`runner`]: rolling-window solves, EFR sweeps and the result files.
//!
//! The closed-form frequency maths and the simulator are generic over
//! [`Scalar`] (`f32` or `f64`); the MILP layer is `f64` throughout.

pub mod fr;
pub mod mip;
pub mod runner;
pub mod scalar;
pub mod swing;
pub mod system;
pub mod uc;

pub use scalar::Scalar;

pub type ChordSegments = fr::ChordSegmentSet<f64>;
pub type ChordSegments32 = fr::ChordSegmentSet<f32>;
pub type Frequency = system::FrequencyParams<f64>;
pub type Frequency32 = system::FrequencyParams<f32>;
pub type Portfolio = swing::ResponsePortfolio<f64>;
pub type Portfolio32 = swing::ResponsePortfolio<f32>;
pub type Trace = swing::FrequencyTrace<f64>;
pub type Trace32 = swing::FrequencyTrace<f32>;
