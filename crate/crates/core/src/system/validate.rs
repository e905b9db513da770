use std::fmt;

use serde::Serialize;

use super::{DampingDemand, Scenario};

/// One failed scenario check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Where the problem is, e.g. `groups[ccgt].msg_mw`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

struct Collector(Vec<Violation>);

impl Collector {
    fn check(&mut self, ok: bool, location: impl Into<String>, message: impl Into<String>) {
        if !ok {
            self.0.push(Violation {
                location: location.into(),
                message: message.into(),
            });
        }
    }
}

fn nonneg_finite(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

/// Checks every data invariant plus a capacity pre-screen. Returns an empty
/// list when the scenario is usable.
pub fn validate_scenario(s: &Scenario) -> Vec<Violation> {
    let mut c = Collector(Vec::new());

    for g in &s.groups {
        let at = |field: &str| format!("groups[{}].{field}", g.name);
        c.check(
            nonneg_finite(g.unit_capacity_mw),
            at("unit_capacity_mw"),
            "capacity must be non-negative",
        );
        c.check(
            nonneg_finite(g.msg_mw),
            at("msg_mw"),
            "msg must be non-negative",
        );
        c.check(
            g.msg_mw <= g.unit_capacity_mw,
            at("msg_mw"),
            "msg exceeds capacity",
        );
        c.check(
            g.n_units >= 1,
            at("n_units"),
            "group needs at least one unit",
        );
        c.check(
            (0.0..=1.0).contains(&g.governor_slope),
            at("governor_slope"),
            "governor slope must lie in [0, 1]",
        );
        c.check(
            nonneg_finite(g.inertia_constant_s),
            at("inertia_constant_s"),
            "inertia constant must be non-negative",
        );
        for (name, v) in [
            ("marginal_cost", g.marginal_cost),
            ("no_load_cost", g.no_load_cost),
            ("startup_cost", g.startup_cost),
        ] {
            c.check(nonneg_finite(v), at(name), "costs must be non-negative");
        }
        for (name, v) in [
            ("ramp_up_mw_per_h", g.ramp_up_mw_per_h),
            ("ramp_down_mw_per_h", g.ramp_down_mw_per_h),
            ("pfr_max_mw", g.pfr_max_mw),
            ("sfr_max_mw", g.sfr_max_mw),
        ] {
            c.check(nonneg_finite(v), at(name), "must be non-negative");
        }
    }

    for st in &s.storage {
        let at = |field: &str| format!("storage[{}].{field}", st.name);
        c.check(
            st.e_min_mwh <= st.e_initial_mwh && st.e_initial_mwh <= st.e_max_mwh,
            at("e_initial_mwh"),
            "initial energy outside [e_min, e_max]",
        );
        c.check(
            nonneg_finite(st.e_min_mwh),
            at("e_min_mwh"),
            "must be non-negative",
        );
        c.check(
            nonneg_finite(st.p_charge_max_mw),
            at("p_charge_max_mw"),
            "must be non-negative",
        );
        c.check(
            nonneg_finite(st.p_discharge_max_mw),
            at("p_discharge_max_mw"),
            "must be non-negative",
        );
        c.check(
            st.efficiency > 0.0 && st.efficiency <= 1.0,
            at("efficiency"),
            "efficiency must lie in (0, 1]",
        );
        c.check(
            nonneg_finite(st.fr_max_mw),
            at("fr_max_mw"),
            "must be non-negative",
        );
    }

    let p = &s.profile;
    let t = p.horizon();
    c.check(t >= 1, "profile", "profile is empty");
    for (name, len) in [
        ("wind_mw", p.wind_mw.len()),
        ("solar_mw", p.solar_mw.len()),
        ("interconnector_mw", p.interconnector_mw.len()),
    ] {
        c.check(
            len == t,
            format!("profile.{name}"),
            format!("has {len} entries, demand has {t}"),
        );
    }
    for (name, series) in [
        ("demand_mw", &p.demand_mw),
        ("wind_mw", &p.wind_mw),
        ("solar_mw", &p.solar_mw),
    ] {
        if let Some(i) = series.iter().position(|v| !nonneg_finite(*v)) {
            c.check(
                false,
                format!("profile.{name}[{}]", i + 1),
                "must be non-negative",
            );
        }
    }

    let f = &s.freq;
    c.check(
        f.nominal_hz > 0.0,
        "frequency.nominal_hz",
        "must be positive",
    );
    c.check(
        f.qss_deviation_hz > 0.0,
        "frequency.qss_deviation_hz",
        "must be positive",
    );
    c.check(
        f.qss_deviation_hz <= f.nadir_deviation_hz,
        "frequency.qss_deviation_hz",
        "Δf_ss > Δf_max",
    );
    c.check(
        f.nadir_deviation_hz < f.nominal_hz,
        "frequency.nadir_deviation_hz",
        "Δf_max must be below nominal frequency",
    );
    c.check(
        f.efr_delivery_s > 0.0 && f.efr_delivery_s < f.pfr_delivery_s,
        "frequency.efr_delivery_s",
        "need 0 < T_e < T_p",
    );
    c.check(
        nonneg_finite(f.efr_mw),
        "frequency.efr_mw",
        "must be non-negative",
    );
    c.check(
        f.infeed_loss_mw > 0.0,
        "frequency.infeed_loss_mw",
        "must be positive",
    );
    c.check(
        nonneg_finite(f.damping_per_hz),
        "frequency.damping_per_hz",
        "must be non-negative",
    );
    c.check(
        nonneg_finite(f.load_inertia_s),
        "frequency.load_inertia_s",
        "must be non-negative",
    );
    if let DampingDemand::ConstantReference { demand_mw } = f.damping_demand {
        c.check(
            nonneg_finite(demand_mw),
            "frequency.reference_demand_mw",
            "must be non-negative",
        );
    }

    c.check(
        s.initial_state.len() == s.groups.len(),
        "initial_state",
        format!(
            "{} entries for {} groups",
            s.initial_state.len(),
            s.groups.len()
        ),
    );
    for (g, init) in s.groups.iter().zip(&s.initial_state) {
        let at = format!("groups[{}].initial", g.name);
        c.check(
            init.online <= g.n_units,
            &at,
            "more units online than exist",
        );
        let lo = init.online as f64 * g.msg_mw;
        let hi = init.online as f64 * g.unit_capacity_mw;
        c.check(
            init.output_mw >= lo - 1e-9 && init.output_mw <= hi + 1e-9,
            &at,
            "initial output outside MSG/capacity bounds",
        );
    }

    c.check(
        s.settings.chord_segments >= 1,
        "model.chord_segments",
        "need at least one segment",
    );
    c.check(
        s.settings.window_hours >= 1,
        "model.window_hours",
        "must be positive",
    );

    if t > 0 && p.wind_mw.len() == t && p.solar_mw.len() == t && p.interconnector_mw.len() == t {
        let fleet: f64 = s
            .groups
            .iter()
            .map(|g| g.unit_capacity_mw * g.n_units as f64)
            .sum::<f64>()
            + s.storage.iter().map(|st| st.p_discharge_max_mw).sum::<f64>();
        // renewables can be curtailed, so only demand net of them must be met
        let short = (0..t).find(|&h| {
            p.demand_mw[h] - p.wind_mw[h] - p.solar_mw[h] - p.interconnector_mw[h] > fleet + 1e-6
        });
        if let Some(h) = short {
            let net = p.demand_mw[h] - p.wind_mw[h] - p.solar_mw[h] - p.interconnector_mw[h];
            c.check(
                false,
                format!("profile.demand_mw[{}]", h + 1),
                format!("hour {}: net demand {net} MW exceeds dispatchable capacity {fleet} MW", h + 1),
            );
        }
    }

    c.0
}
