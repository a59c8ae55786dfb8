//! Per-frame decoding: SINRs of both phases, the adaptive decoding mechanism
//! (ADM) and the four fixed-order baselines.
//!
//! Phase 1: C sends `xC1` and E sends `xE`; the FC decodes `xC1` directly and
//! the UAV tries to recover `xE`, either after cancelling `xC1` (C-first) or
//! treating it as interference (E-first). Phase 2: C sends `xC2` and, if it
//! recovered `xE`, the UAV forwards it; the FC decodes both in the order its
//! mechanism dictates. A UAV that failed stays silent and the FC then sees an
//! interference-free `xC2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::num::Real;

/// Power split of the two phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation<T> {
    pub theta1: T,
    pub theta2: T,
    /// Phase budgets in watts.
    pub p_max1: T,
    pub p_max2: T,
}

impl<T: Real> PowerAllocation<T> {
    pub fn new(theta1: T, theta2: T, p_max1: T, p_max2: T) -> Result<Self> {
        for (name, t) in [("theta1", theta1), ("theta2", theta2)] {
            if !(t >= T::zero() && t <= T::one()) {
                return Err(invalid(name, format!("must lie in [0, 1], got {t}")));
            }
        }
        for (name, p) in [("p_max1", p_max1), ("p_max2", p_max2)] {
            if !(p > T::zero()) || !p.is_finite() {
                return Err(invalid(name, "power budget must be positive"));
            }
        }
        Ok(Self { theta1, theta2, p_max1, p_max2 })
    }

    pub fn p_c1(&self) -> T {
        self.theta1 * self.p_max1
    }

    pub fn p_e(&self) -> T {
        (T::one() - self.theta1) * self.p_max1
    }

    pub fn p_c2(&self) -> T {
        self.theta2 * self.p_max2
    }

    pub fn p_u(&self) -> T {
        (T::one() - self.theta2) * self.p_max2
    }
}

/// SINR thresholds and the normalized constants the analysis is written in.
///
/// Phase 1 (at the UAV): `a1 = tau_c s_u / P_C1`, `a2 = tau_e s_u / P_E`,
/// `alpha1 = tau_c P_E / P_C1`, `alpha2 = tau_e P_C1 / P_E`. Phase 2 (at the
/// FC) uses `b`/`beta` with `P_C2` and `P_U`. The crossover points
/// `big_a1 = a1 / (1 - alpha1)` etc. are only meaningful below one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds<T> {
    pub rate_c: T,
    pub rate_e: T,
    pub tau_c: T,
    pub tau_e: T,
    pub powers: PowerAllocation<T>,
    /// `tau_c s_f / P_C1`: FC threshold on the C-F gain in phase 1.
    pub c1: T,
    pub a1: T,
    pub a2: T,
    pub alpha1: T,
    pub alpha2: T,
    pub big_a1: Option<T>,
    pub big_a2: Option<T>,
    /// Residual threshold `(A1 - a2) / alpha2`, present when `A1 > a2`.
    pub script_a: Option<T>,
    pub b1: T,
    pub b2: T,
    pub beta1: T,
    pub beta2: T,
    pub big_b1: Option<T>,
    pub big_b2: Option<T>,
    /// `(B1 - b2) / beta2`, present when `B1 > b2`.
    pub script_b: Option<T>,
    /// `(B2 - b1) / beta1`, present when `B2 > b1`.
    pub script_b_hat: Option<T>,
    /// Mean transmit SNRs `P / sigma^2` of C and E in phase 1, C and U in phase 2.
    pub snr_c1: T,
    pub snr_e: T,
    pub snr_c2: T,
    pub snr_u: T,
    /// Some transmitter has zero power while its target rate is positive.
    pub degenerate: bool,
}

/// `2^{2R} - 1`: each phase occupies half the frame.
pub fn rate_to_tau<T: Real>(rate: T) -> T {
    T::lit(2.0).powf(T::lit(2.0) * rate) - T::one()
}

fn crossover<T: Real>(offset: T, slope: T) -> Option<T> {
    (slope < T::one()).then(|| offset / (T::one() - slope))
}

fn residual_cut<T: Real>(big: Option<T>, offset: T, slope: T) -> Option<T> {
    match big {
        Some(b) if b > offset && slope > T::zero() => Some((b - offset) / slope),
        _ => None,
    }
}

/// Builds all thresholds for given powers and noise powers (watts).
pub fn derive_thresholds<T: Real>(
    rate_c: T,
    rate_e: T,
    noise_u: T,
    noise_f: T,
    powers: &PowerAllocation<T>,
) -> Result<Thresholds<T>> {
    derive_thresholds_scaled(rate_c, rate_e, noise_u, noise_f, powers, T::one())
}

/// As [`derive_thresholds`] with both SINR thresholds multiplied by `tau_scale`.
pub fn derive_thresholds_scaled<T: Real>(
    rate_c: T,
    rate_e: T,
    noise_u: T,
    noise_f: T,
    powers: &PowerAllocation<T>,
    tau_scale: T,
) -> Result<Thresholds<T>> {
    if !(noise_u > T::zero()) || !(noise_f > T::zero()) {
        return Err(invalid("noise", "noise powers must be positive"));
    }
    if !(rate_c >= T::zero()) || !(rate_e >= T::zero()) {
        return Err(invalid("rate", "target rates must be non-negative"));
    }
    let tau_c = rate_to_tau(rate_c) * tau_scale;
    let tau_e = rate_to_tau(rate_e) * tau_scale;
    let (pc1, pe, pc2, pu) = (powers.p_c1(), powers.p_e(), powers.p_c2(), powers.p_u());

    // x / 0 is +inf here by design: a silent transmitter can never be decoded
    let ratio = |num: T, den: T| if num == T::zero() { T::zero() } else { num / den };

    let a1 = ratio(tau_c * noise_u, pc1);
    let a2 = ratio(tau_e * noise_u, pe);
    let alpha1 = ratio(tau_c * pe, pc1);
    let alpha2 = ratio(tau_e * pc1, pe);
    let big_a1 = crossover(a1, alpha1);
    let big_a2 = crossover(a2, alpha2);

    let b1 = ratio(tau_c * noise_f, pc2);
    let b2 = ratio(tau_e * noise_f, pu);
    let beta1 = ratio(tau_c * pu, pc2);
    let beta2 = ratio(tau_e * pc2, pu);
    let big_b1 = crossover(b1, beta1);
    let big_b2 = crossover(b2, beta2);

    let degenerate = (pc1 == T::zero() || pc2 == T::zero()) && rate_c > T::zero()
        || (pe == T::zero() || pu == T::zero()) && rate_e > T::zero();

    Ok(Thresholds {
        rate_c,
        rate_e,
        tau_c,
        tau_e,
        powers: *powers,
        c1: ratio(tau_c * noise_f, pc1),
        a1,
        a2,
        alpha1,
        alpha2,
        big_a1,
        big_a2,
        script_a: residual_cut(big_a1, a2, alpha2),
        b1,
        b2,
        beta1,
        beta2,
        big_b1,
        big_b2,
        script_b: residual_cut(big_b1, b2, beta2),
        script_b_hat: residual_cut(big_b2, b1, beta1),
        snr_c1: pc1 / noise_u,
        snr_e: pe / noise_u,
        snr_c2: pc2 / noise_f,
        snr_u: pu / noise_f,
        degenerate,
    })
}

/// Channel power gains (path loss included) and residuals of one frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrialRealization<T> {
    pub phi_cu: T,
    pub phi_eu: T,
    pub phi_uf: T,
    pub phi_cf: T,
    pub res_cu: T,
    pub res_cf: T,
    pub res_uf: T,
    pub noise_u: T,
    pub noise_f: T,
}

/// Every SINR a receiver may need in either phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrSet<T> {
    /// `xC1` at the FC.
    pub fc_xc1: T,
    /// `xC1` at the UAV with `xE` as interference.
    pub uav_xc1_first: T,
    /// `xE` at the UAV after cancelling `xC1`.
    pub uav_xe_after_sic: T,
    /// `xE` at the UAV with `xC1` as interference.
    pub uav_xe_first: T,
    /// `xC2` at the FC with the relayed `xE` as interference.
    pub fc_xc2_first: T,
    /// Relayed `xE` at the FC after cancelling `xC2`.
    pub fc_xe_after_sic: T,
    /// Relayed `xE` at the FC with `xC2` as interference.
    pub fc_xe_first: T,
    /// `xC2` at the FC after cancelling the relayed `xE`.
    pub fc_xc2_after_sic: T,
    /// `xC2` at the FC when the UAV is silent.
    pub fc_xc2_alone: T,
}

/// `signal / (interference + noise)`, with `x / 0 = inf` for `x > 0` and `0 / 0 = 0`.
fn sinr<T: Real>(signal: T, impairment: T) -> T {
    if impairment > T::zero() {
        signal / impairment
    } else if signal > T::zero() {
        T::infinity()
    } else {
        T::zero()
    }
}

pub fn sinr_set<T: Real>(t: &TrialRealization<T>, powers: &PowerAllocation<T>) -> SinrSet<T> {
    let (pc1, pe, pc2, pu) = (powers.p_c1(), powers.p_e(), powers.p_c2(), powers.p_u());
    SinrSet {
        fc_xc1: sinr(pc1 * t.phi_cf, t.noise_f),
        uav_xc1_first: sinr(pc1 * t.phi_cu, pe * t.phi_eu + t.noise_u),
        uav_xe_after_sic: sinr(pe * t.phi_eu, pc1 * t.res_cu + t.noise_u),
        uav_xe_first: sinr(pe * t.phi_eu, pc1 * t.phi_cu + t.noise_u),
        fc_xc2_first: sinr(pc2 * t.phi_cf, pu * t.phi_uf + t.noise_f),
        fc_xe_after_sic: sinr(pu * t.phi_uf, pc2 * t.res_cf + t.noise_f),
        fc_xe_first: sinr(pu * t.phi_uf, pc2 * t.phi_cf + t.noise_f),
        fc_xc2_after_sic: sinr(pc2 * t.phi_cf, pu * t.res_uf + t.noise_f),
        fc_xc2_alone: sinr(pc2 * t.phi_cf, t.noise_f),
    }
}

/// Which signal a receiver decodes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    /// Center user's signal first.
    C,
    /// Edge user's (or relayed) signal first.
    E,
}

/// Decoding mechanism: adaptive, or one of four fixed (UAV, FC) orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    Adm,
    D1,
    D2,
    D3,
    D4,
}

impl Mechanism {
    pub const ALL: [Mechanism; 5] = [Self::Adm, Self::D1, Self::D2, Self::D3, Self::D4];
    pub const FIXED: [Mechanism; 4] = [Self::D1, Self::D2, Self::D3, Self::D4];

    /// Fixed (UAV, FC) decoding orders; `None` for the adaptive mechanism.
    pub fn orders(self) -> Option<(Order, Order)> {
        match self {
            Self::Adm => None,
            Self::D1 => Some((Order::C, Order::C)),
            Self::D2 => Some((Order::E, Order::C)),
            Self::D3 => Some((Order::C, Order::E)),
            Self::D4 => Some((Order::E, Order::E)),
        }
    }

    pub fn from_orders(uav: Order, fc: Order) -> Self {
        match (uav, fc) {
            (Order::C, Order::C) => Self::D1,
            (Order::E, Order::C) => Self::D2,
            (Order::C, Order::E) => Self::D3,
            (Order::E, Order::E) => Self::D4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Adm => "adm",
            Self::D1 => "d1",
            Self::D2 => "d2",
            Self::D3 => "d3",
            Self::D4 => "d4",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "adm" => Ok(Self::Adm),
            "d1" => Ok(Self::D1),
            "d2" => Ok(Self::D2),
            "d3" => Ok(Self::D3),
            "d4" => Ok(Self::D4),
            other => Err(Error::Config(format!("unknown mechanism `{other}`"))),
        }
    }
}

/// Decoding result of one frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeOutcome {
    /// `xC1` recovered at the FC in phase 1.
    pub xc1_ok: bool,
    pub uav_order: Order,
    /// `xC1` recovered at the UAV (only attempted under C-first).
    pub xc1_at_uav_ok: bool,
    pub xe_at_uav_ok: bool,
    pub uav_silent: bool,
    /// FC order in phase 2; `None` when the UAV is silent.
    pub fc_order: Option<Order>,
    pub xc2_ok: bool,
    /// Relayed `xE` recovered at the FC.
    pub xe_ok: bool,
}

fn decode<T: Real>(
    trial: &TrialRealization<T>,
    powers: &PowerAllocation<T>,
    th: &Thresholds<T>,
    uav_order: Order,
    fc_order: Order,
) -> DecodeOutcome {
    let s = sinr_set(trial, powers);
    let xc1_ok = s.fc_xc1 > th.tau_c;

    let (xc1_at_uav_ok, xe_at_uav_ok) = match uav_order {
        Order::C => {
            let c_ok = s.uav_xc1_first > th.tau_c;
            (c_ok, c_ok && s.uav_xe_after_sic > th.tau_e)
        }
        Order::E => (false, s.uav_xe_first > th.tau_e),
    };
    let uav_silent = !xe_at_uav_ok;

    let (fc_order, xc2_ok, xe_ok) = if uav_silent {
        (None, s.fc_xc2_alone > th.tau_c, false)
    } else {
        match fc_order {
            Order::C => {
                let c_ok = s.fc_xc2_first > th.tau_c;
                (Some(Order::C), c_ok, c_ok && s.fc_xe_after_sic > th.tau_e)
            }
            Order::E => {
                let e_ok = s.fc_xe_first > th.tau_e;
                (Some(Order::E), e_ok && s.fc_xc2_after_sic > th.tau_c, e_ok)
            }
        }
    };

    DecodeOutcome {
        xc1_ok,
        uav_order,
        xc1_at_uav_ok,
        xe_at_uav_ok,
        uav_silent,
        fc_order,
        xc2_ok,
        xe_ok,
    }
}

/// Orders the adaptive mechanism picks: the stronger compared gain goes first,
/// ties going to the center user.
pub fn adm_orders<T: Real>(trial: &TrialRealization<T>) -> (Order, Order) {
    let uav = if trial.phi_cu >= trial.phi_eu { Order::C } else { Order::E };
    let fc = if trial.phi_cf >= trial.phi_uf { Order::C } else { Order::E };
    (uav, fc)
}

pub fn run_adm_trial<T: Real>(
    trial: &TrialRealization<T>,
    powers: &PowerAllocation<T>,
    th: &Thresholds<T>,
) -> DecodeOutcome {
    let (uav, fc) = adm_orders(trial);
    decode(trial, powers, th, uav, fc)
}

pub fn run_nadm_trial<T: Real>(
    trial: &TrialRealization<T>,
    powers: &PowerAllocation<T>,
    th: &Thresholds<T>,
    mechanism: Mechanism,
) -> DecodeOutcome {
    match mechanism.orders() {
        Some((uav, fc)) => decode(trial, powers, th, uav, fc),
        None => run_adm_trial(trial, powers, th),
    }
}

/// Indicators of the eight events the closed-form analysis is built from,
/// evaluated on one frame regardless of which receiver state actually occurs:
///
/// 1. UAV C-first and `xE` recovered
/// 2. UAV E-first and `xE` recovered
/// 3. FC C-first and relayed `xE` recovered
/// 4. FC E-first and relayed `xE` recovered
/// 5. FC E-first and `xC2` recovered
/// 6. FC C-first and `xC2` recovered
/// 7. `xC2` lost with a silent UAV
/// 8. `xC1` lost at the FC
pub fn analysis_events<T: Real>(
    trial: &TrialRealization<T>,
    powers: &PowerAllocation<T>,
    th: &Thresholds<T>,
) -> [bool; 8] {
    let s = sinr_set(trial, powers);
    let (uav, fc) = adm_orders(trial);
    let uav_c = uav == Order::C;
    let fc_c = fc == Order::C;
    let fc_c_ok = s.fc_xc2_first > th.tau_c;
    let fc_e_ok = s.fc_xe_first > th.tau_e;
    [
        uav_c && s.uav_xc1_first > th.tau_c && s.uav_xe_after_sic > th.tau_e,
        !uav_c && s.uav_xe_first > th.tau_e,
        fc_c && fc_c_ok && s.fc_xe_after_sic > th.tau_e,
        !fc_c && fc_e_ok,
        !fc_c && fc_e_ok && s.fc_xc2_after_sic > th.tau_c,
        fc_c && fc_c_ok,
        s.fc_xc2_alone <= th.tau_c,
        s.fc_xc1 <= th.tau_c,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_powers() -> PowerAllocation<f64> {
        PowerAllocation::new(0.5, 0.5, 2.0, 2.0).unwrap()
    }

    fn hand_trial() -> TrialRealization<f64> {
        TrialRealization {
            phi_cu: 4.0,
            phi_eu: 1.0,
            phi_uf: 1.0,
            phi_cf: 1.0,
            res_cu: 0.0,
            res_cf: 0.0,
            res_uf: 0.0,
            noise_u: 1.0,
            noise_f: 1.0,
        }
    }

    fn thresholds_with(tau_c: f64, tau_e: f64) -> Thresholds<f64> {
        let mut th = derive_thresholds(1.0, 0.05, 1.0, 1.0, &unit_powers()).unwrap();
        th.tau_c = tau_c;
        th.tau_e = tau_e;
        th
    }

    #[test]
    fn tau_convention() {
        assert!((rate_to_tau(1.0f64) - 3.0).abs() < 1e-15);
        assert_eq!(rate_to_tau(0.0f64), 0.0);
    }

    #[test]
    fn boundary_allocation_is_degenerate() {
        let p = PowerAllocation::new(1.0f64, 0.5, 1.0, 1.0).unwrap();
        let th = derive_thresholds(1.0, 0.05, 1e-10, 1e-10, &p).unwrap();
        assert!(th.degenerate);
        assert!(th.a2.is_infinite());
        let ok = derive_thresholds(1.0, 0.05, 1e-10, 1e-10, &unit_powers()).unwrap();
        assert!(!ok.degenerate);
    }

    #[test]
    fn alpha_constants_follow_definitions() {
        let p = PowerAllocation::new(0.7f64, 0.4, 3.0, 2.0).unwrap();
        let (nu, nf) = (1e-10, 2e-10);
        let th = derive_thresholds(1.0, 0.05, nu, nf, &p).unwrap();
        let ratio = p.p_e() / p.p_c1();
        assert!((th.alpha1 - ratio * th.tau_c).abs() < 1e-15);
        assert!((th.alpha1 - th.snr_e * th.tau_c / th.snr_c1).abs() < 1e-12);
        assert!((th.a1 - th.tau_c / th.snr_c1).abs() < 1e-25);
        assert!((th.b1 - th.tau_c / th.snr_c2).abs() < 1e-25);
        assert!((th.beta2 - th.tau_e * p.p_c2() / p.p_u()).abs() < 1e-15);
        assert!(PowerAllocation::new(1.2, 0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn hand_built_sinrs() {
        let p = PowerAllocation::new(0.5, 0.5, 2.0, 2.0).unwrap();
        let s = sinr_set(&hand_trial(), &p);
        assert!((s.uav_xc1_first - 2.0).abs() < 1e-15);
        assert!((s.uav_xe_after_sic - 1.0).abs() < 1e-15);
        let mut t = hand_trial();
        t.noise_u = 0.0;
        t.noise_f = 0.0;
        t.phi_eu = 0.0;
        let s = sinr_set(&t, &p);
        assert!(s.uav_xc1_first.is_infinite());
    }

    #[test]
    fn hand_trace_c_first() {
        let out = run_adm_trial(&hand_trial(), &unit_powers(), &thresholds_with(1.0, 0.5));
        assert_eq!(out.uav_order, Order::C);
        assert!(out.xc1_at_uav_ok && out.xe_at_uav_ok && !out.uav_silent);
    }

    #[test]
    fn e_first_failure_silences_uav() {
        let mut t = hand_trial();
        t.phi_cu = 1.0;
        t.phi_eu = 1.5;
        let out = run_adm_trial(&t, &unit_powers(), &thresholds_with(1.0, 5.0));
        assert_eq!(out.uav_order, Order::E);
        assert!(out.uav_silent && !out.xe_ok && out.fc_order.is_none());
    }

    #[test]
    fn no_outage_limit() {
        let t = TrialRealization { phi_cu: 10.0, phi_eu: 1.0, phi_uf: 1.0, phi_cf: 10.0, noise_u: 1e-12, noise_f: 1e-12, ..Default::default() };
        let p = PowerAllocation::new(0.5, 0.5, 1e6, 1e6).unwrap();
        let th = derive_thresholds(1.0, 0.05, 1e-12, 1e-12, &p).unwrap();
        let out = run_adm_trial(&t, &p, &th);
        assert!(out.xc1_ok && out.xe_at_uav_ok && out.xc2_ok && out.xe_ok && !out.uav_silent);
    }

    #[test]
    fn fixed_order_ignores_dominance() {
        let out = run_nadm_trial(&hand_trial(), &unit_powers(), &thresholds_with(1.0, 0.5), Mechanism::D4);
        assert_eq!(out.uav_order, Order::E);
        let adm = run_adm_trial(&hand_trial(), &unit_powers(), &thresholds_with(1.0, 0.5));
        let d1 = run_nadm_trial(&hand_trial(), &unit_powers(), &thresholds_with(1.0, 0.5), Mechanism::D1);
        assert_eq!(adm, d1);
    }

    #[test]
    fn mechanism_parsing() {
        assert_eq!("D3".parse::<Mechanism>().unwrap(), Mechanism::D3);
        assert!("d5".parse::<Mechanism>().is_err());
        for m in Mechanism::ALL {
            assert_eq!(m.name().parse::<Mechanism>().unwrap(), m);
        }
    }

    fn trial_strategy() -> impl Strategy<Value = TrialRealization<f64>> {
        let g = || 1e-3f64..10.0;
        (g(), g(), g(), g(), 0.0f64..0.5, 0.0f64..0.5, 0.0f64..0.5).prop_map(|(a, b, c, d, e, f, h)| {
            TrialRealization { phi_cu: a, phi_eu: b, phi_uf: c, phi_cf: d, res_cu: e, res_cf: f, res_uf: h, noise_u: 0.1, noise_f: 0.1 }
        })
    }

    proptest! {
        #[test]
        fn outcome_invariants(t in trial_strategy(), th1 in 0.0f64..=1.0, th2 in 0.0f64..=1.0) {
            let p = PowerAllocation::new(th1, th2, 1.0, 1.0).unwrap();
            let th = derive_thresholds(1.0, 0.3, 0.1, 0.1, &p).unwrap();
            let adm = run_adm_trial(&t, &p, &th);
            prop_assert!(!(adm.uav_silent && adm.xe_ok));
            prop_assert!(!adm.xe_ok || !adm.uav_silent);
            let matching = Mechanism::from_orders(adm.uav_order, adm.fc_order.unwrap_or(adm_orders(&t).1));
            prop_assert_eq!(run_nadm_trial(&t, &p, &th, matching), adm);
            prop_assert_eq!(run_adm_trial(&t, &p, &th), adm);
        }

        #[test]
        fn branch_invariant_under_common_scaling(t in trial_strategy(), k in 1e-3f64..1e3) {
            let mut s = t;
            s.phi_cu *= k;
            s.phi_eu *= k;
            s.phi_cf *= k;
            s.phi_uf *= k;
            prop_assert_eq!(adm_orders(&t), adm_orders(&s));
        }

        #[test]
        fn perfect_sic_never_hurts(t in trial_strategy()) {
            let p = PowerAllocation::new(0.6, 0.6, 1.0, 1.0).unwrap();
            let a = sinr_set(&t, &p);
            let perfect = TrialRealization { res_cu: 0.0, res_cf: 0.0, res_uf: 0.0, ..t };
            let b = sinr_set(&perfect, &p);
            prop_assert!(b.uav_xe_after_sic >= a.uav_xe_after_sic);
            prop_assert!(b.fc_xe_after_sic >= a.fc_xe_after_sic);
            prop_assert!(b.fc_xc2_after_sic >= a.fc_xc2_after_sic);
        }
    }
}
