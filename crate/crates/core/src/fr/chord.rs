use serde::Serialize;

use crate::scalar::Scalar;
use crate::system::FrequencyParams;

use super::FrError;

/// `k` such that the nadir stays within limit iff `H·P_req ≥ k`, ignoring
/// damping and with EFR treated as instantaneous. Zero once EFR covers the
/// whole loss.
pub fn nadir_constant<T: Scalar>(f: &FrequencyParams<T>) -> T {
    let uncovered = f.infeed_loss_mw - f.efr_mw;
    if uncovered <= T::zero() {
        return T::zero();
    }
    f.nominal_hz * f.pfr_delivery_s * uncovered * uncovered / (T::lit(4.0) * f.nadir_deviation_hz)
}

/// Inertia absorbed by the EFR ramp: the drop accumulated while EFR ramps
/// over `T_e` is the drop `H_e` of inertia would have prevented. Zero when
/// the correction is disabled.
pub fn efr_inertia_shift<T: Scalar>(f: &FrequencyParams<T>) -> T {
    if !f.efr_ramp_correction || f.efr_mw <= T::zero() {
        return T::zero();
    }
    let e = f.efr_mw.min(f.infeed_loss_mw);
    f.nominal_hz * e * f.efr_delivery_s / (T::lit(4.0) * f.nadir_deviation_hz)
}

/// Exact primary requirement `k/(H − H_e)` from the nadir condition alone;
/// infinite when `H ≤ H_e` and there is uncovered loss.
pub fn nadir_requirement<T: Scalar>(f: &FrequencyParams<T>, h: T) -> T {
    let k = nadir_constant(f);
    if k == T::zero() {
        return T::zero();
    }
    let eff = h - efr_inertia_shift(f);
    if eff <= T::zero() {
        T::infinity()
    } else {
        k / eff
    }
}

/// `|∂P_req/∂E|` of `k/H` at fixed inertia: `2·f_o·T_p·(P_l − E)/(4·Δf_max·H)`.
pub fn pfr_offset_per_mw<T: Scalar>(f: &FrequencyParams<T>, h: T) -> T {
    let uncovered = (f.infeed_loss_mw - f.efr_mw).max(T::zero());
    T::lit(2.0) * f.nominal_hz * f.pfr_delivery_s * uncovered
        / (T::lit(4.0) * f.nadir_deviation_hz * h)
}

/// Average primary requirement displaced per MW of EFR when moving from
/// `e0` to `e1` at fixed inertia, using [`nadir_requirement`].
pub fn pfr_offset_between<T: Scalar>(f: &FrequencyParams<T>, h: T, e0: T, e1: T) -> T {
    let before = nadir_requirement(&f.with_efr(e0), h);
    let after = nadir_requirement(&f.with_efr(e1), h);
    (before - after) / (e1 - e0)
}

/// Secant envelope of the convex curve `P = k/H` on a grid uniform in `1/H`.
///
/// Every chord lies on or above the curve between its own end points and
/// below it outside them, so the maximum over all chords equals the
/// piecewise-linear interpolant and over-approximates `k/H` on the grid range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChordSegmentSet<T> {
    k: T,
    grid: Vec<T>,
    slopes: Vec<T>,
    intercepts: Vec<T>,
}

impl<T: Scalar> ChordSegmentSet<T> {
    pub fn build(k: T, h_min: T, h_max: T, n_segments: usize) -> Result<Self, FrError> {
        if n_segments == 0 {
            return Err(FrError::NoSegments);
        }
        if k == T::zero() {
            return Ok(ChordSegmentSet {
                k,
                grid: vec![h_min, h_max],
                slopes: vec![T::zero()],
                intercepts: vec![T::zero()],
            });
        }
        if !(k > T::zero() && h_min > T::zero() && h_min < h_max && h_max.is_finite()) {
            return Err(FrError::InvalidRange {
                h_min: h_min.as_f64(),
                h_max: h_max.as_f64(),
            });
        }
        let n = T::from_usize_lossy(n_segments);
        let (x0, x1) = (h_min.recip(), h_max.recip());
        let mut grid: Vec<T> = (0..=n_segments)
            .map(|i| (x0 + (x1 - x0) * T::from_usize_lossy(i) / n).recip())
            .collect();
        grid[0] = h_min;
        grid[n_segments] = h_max;
        let (slopes, intercepts) = grid
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                (-k / (a * b), k / a + k / b)
            })
            .unzip();
        Ok(ChordSegmentSet {
            k,
            grid,
            slopes,
            intercepts,
        })
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn len(&self) -> usize {
        self.slopes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slopes.is_empty()
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn h_min(&self) -> T {
        self.grid[0]
    }

    pub fn h_max(&self) -> T {
        self.grid[self.grid.len() - 1]
    }

    /// `(α_i, β_i)` of each chord, `P ≥ α_i + β_i·H`.
    pub fn segments(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.intercepts
            .iter()
            .copied()
            .zip(self.slopes.iter().copied())
    }

    pub fn chord(&self, i: usize, h: T) -> T {
        self.intercepts[i] + self.slopes[i] * h
    }

    /// `max_i (α_i + β_i·H)` with the index attaining it (lowest on ties).
    pub fn envelope(&self, h: T) -> (T, usize) {
        let mut best = (self.chord(0, h), 0);
        for i in 1..self.len() {
            let v = self.chord(i, h);
            if v > best.0 {
                best = (v, i);
            }
        }
        best
    }

    pub fn value(&self, h: T) -> T {
        self.envelope(h).0
    }

    pub fn exact(&self, h: T) -> T {
        if self.k == T::zero() {
            T::zero()
        } else {
            self.k / h
        }
    }
}
