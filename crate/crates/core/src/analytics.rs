//! Closed-form outage probabilities and throughput of the adaptive mechanism.
//!
//! Eight probabilities carry the whole analysis (numbering as in
//! [`crate::protocol::analysis_events`]):
//!
//! * `varrho1`, `varrho2`: the UAV recovers `xE` under C-first / E-first.
//! * `varrho3`, `varrho4`: the FC recovers the relayed `xE` under C-first / E-first.
//! * `varrho5`, `varrho6`: the FC recovers `xC2` under E-first / C-first.
//! * `varrho7`, `varrho8`: `xC2` lost with a silent UAV, `xC1` lost at the FC.
//!
//! The first six all reduce to two kernels over three MG variates. The SIC
//! kernel is `Pr[X0 >= X1, X0 > alpha X1 + a, X1 > s X2 + c]` and the direct
//! kernel is `Pr[X0 > X1, X0 > alpha X1 + a]`. Splitting `max(X1, alpha X1 + a)`
//! at its crossover turns each into a signed sum of exceedance integrals.

use crate::error::Result;
use crate::mgdist::{exceed_i0, exceed_i1, exceed_i2, ExceedanceSpec, MgDist};
use crate::num::Real;
use crate::protocol::{derive_thresholds, derive_thresholds_scaled, PowerAllocation, Thresholds};
use crate::system::SystemModel;

fn i1<T: Real>(d0: &MgDist<T>, d1: &MgDist<T>, p: T, q: T, w: T) -> Result<T> {
    exceed_i1(d0, d1, &ExceedanceSpec::depth1(p, q, w))
}

fn i2<T: Real>(d0: &MgDist<T>, d1: &MgDist<T>, d2: &MgDist<T>, p0: T, q0: T, p1: T, q1: T, w: T) -> Result<T> {
    exceed_i2(d0, d1, d2, &ExceedanceSpec::depth2(p0, q0, p1, q1, w))
}

fn clamp01<T: Real>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}

/// `Pr[X0 > X1, X0 > alpha X1 + a]`.
pub fn direct_kernel<T: Real>(d0: &MgDist<T>, d1: &MgDist<T>, alpha: T, a: T) -> Result<T> {
    if a.is_infinite() || alpha.is_infinite() {
        return Ok(T::zero());
    }
    if alpha >= T::one() {
        return i1(d0, d1, alpha, a, T::zero());
    }
    let cross = a / (T::one() - alpha);
    let below = i1(d0, d1, alpha, a, T::zero())? - i1(d0, d1, alpha, a, cross)?;
    Ok(clamp01(below + i1(d0, d1, T::one(), T::zero(), cross)?))
}

/// `Pr[X0 >= X1, X0 > alpha X1 + a, X1 > s X2 + c]`; `d2 = None` means `X2 = 0`.
pub fn sic_kernel<T: Real>(
    d0: &MgDist<T>,
    d1: &MgDist<T>,
    d2: Option<&MgDist<T>>,
    alpha: T,
    a: T,
    s: T,
    c: T,
) -> Result<T> {
    if [alpha, a, s, c].iter().any(|v| v.is_infinite()) {
        return Ok(T::zero());
    }
    let d2 = d2.filter(|_| s > T::zero());
    let Some(d2) = d2 else {
        // X1 > c only
        if alpha >= T::one() {
            return i1(d0, d1, alpha, a, c);
        }
        let low = c.max(a / (T::one() - alpha));
        let v = i1(d0, d1, alpha, a, c)? - i1(d0, d1, alpha, a, low)? + i1(d0, d1, T::one(), T::zero(), low)?;
        return Ok(clamp01(v));
    };
    if alpha >= T::one() {
        return i2(d0, d1, d2, alpha, a, s, c, T::zero());
    }
    let cross = a / (T::one() - alpha);
    if cross <= c {
        // X1 > c >= crossover: only the X0 >= X1 constraint binds
        return i2(d0, d1, d2, T::one(), T::zero(), s, c, T::zero());
    }
    // Pr[X0 > p X1 + q, X1 > max(s X2 + c, cross)]
    let cut = (cross - c) / s;
    let below_cut = T::one() - exceed_i0(d2, cut);
    let tail = |p: T, q: T| -> Result<T> {
        Ok(i2(d0, d1, d2, p, q, s, c, cut)? + i1(d0, d1, p, q, cross)? * below_cut)
    };
    let v = i2(d0, d1, d2, alpha, a, s, c, T::zero())? - tail(alpha, a)? + tail(T::one(), T::zero())?;
    Ok(clamp01(v))
}

/// Phase-1 blocks; they depend on `theta1` only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase1Terms<T> {
    pub varrho1: T,
    pub varrho2: T,
    pub varrho8: T,
}

/// Phase-2 blocks; they depend on `theta2` only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase2Terms<T> {
    pub varrho3: T,
    pub varrho4: T,
    pub varrho5: T,
    pub varrho6: T,
    pub varrho7: T,
}

pub fn varrho1<T: Real>(m: &SystemModel<T>, th: &Thresholds<T>) -> Result<T> {
    let res = crate::mgdist::MgDist::from_residual(&m.res_cu);
    sic_kernel(&m.cu.dist, &m.eu.dist, res.as_ref(), th.alpha1, th.a1, th.alpha2, th.a2)
}

pub fn varrho2<T: Real>(m: &SystemModel<T>, th: &Thresholds<T>) -> Result<T> {
    direct_kernel(&m.eu.dist, &m.cu.dist, th.alpha2, th.a2)
}

/// FC recovers the relayed `xE` under C-first and E-first.
pub fn varrho3_4<T: Real>(m: &SystemModel<T>, th: &Thresholds<T>) -> Result<(T, T)> {
    let res = crate::mgdist::MgDist::from_residual(&m.res_cf);
    Ok((
        sic_kernel(&m.cf, &m.uf.dist, res.as_ref(), th.beta1, th.b1, th.beta2, th.b2)?,
        direct_kernel(&m.uf.dist, &m.cf, th.beta2, th.b2)?,
    ))
}

/// FC recovers `xC2` under E-first (SIC on the relayed signal) and C-first.
pub fn varrho5_6<T: Real>(m: &SystemModel<T>, th: &Thresholds<T>) -> Result<(T, T)> {
    let res = crate::mgdist::MgDist::from_residual(&m.res_uf);
    Ok((
        sic_kernel(&m.uf.dist, &m.cf, res.as_ref(), th.beta2, th.b2, th.beta1, th.b1)?,
        direct_kernel(&m.cf, &m.uf.dist, th.beta1, th.b1)?,
    ))
}

/// C-F gain CDF at `b1`: `xC2` outage with a silent UAV.
pub fn varrho7<T: Real>(m: &SystemModel<T>, th: &Thresholds<T>) -> Result<T> {
    if th.b1.is_infinite() {
        return Ok(T::one());
    }
    m.cf.cdf(th.b1)
}

/// C-F gain CDF at the phase-1 threshold: `xC1` outage at the FC.
pub fn varrho8<T: Real>(m: &SystemModel<T>, th: &Thresholds<T>) -> Result<T> {
    if th.c1.is_infinite() {
        return Ok(T::one());
    }
    m.cf.cdf(th.c1)
}

pub fn phase1_terms<T: Real>(m: &SystemModel<T>, th: &Thresholds<T>) -> Result<Phase1Terms<T>> {
    Ok(Phase1Terms {
        varrho1: varrho1(m, th)?,
        varrho2: varrho2(m, th)?,
        varrho8: varrho8(m, th)?,
    })
}

pub fn phase2_terms<T: Real>(m: &SystemModel<T>, th: &Thresholds<T>) -> Result<Phase2Terms<T>> {
    let (varrho3, varrho4) = varrho3_4(m, th)?;
    let (varrho5, varrho6) = varrho5_6(m, th)?;
    Ok(Phase2Terms {
        varrho3,
        varrho4,
        varrho5,
        varrho6,
        varrho7: varrho7(m, th)?,
    })
}

/// End-to-end outage probabilities of the adaptive mechanism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageSet<T> {
    /// Relayed `xE` lost end to end.
    pub op_e: T,
    /// `xC1` lost at the FC in phase 1.
    pub op_c1: T,
    /// `xC2` lost at the FC in phase 2.
    pub op_c2: T,
    /// `varrho1` .. `varrho8`, index 0 holding `varrho1`.
    pub varrho: [T; 8],
}

impl<T: Real> OutageSet<T> {
    pub fn assemble(p1: &Phase1Terms<T>, p2: &Phase2Terms<T>) -> Self {
        let uav_ok = clamp01(p1.varrho1 + p1.varrho2);
        let relay_ok = clamp01(p2.varrho3 + p2.varrho4);
        let c2_ok = clamp01(p2.varrho5 + p2.varrho6);
        Self {
            op_e: clamp01(T::one() - uav_ok * relay_ok),
            op_c1: p1.varrho8,
            op_c2: clamp01(uav_ok * (T::one() - c2_ok) + (T::one() - uav_ok) * p2.varrho7),
            varrho: [
                p1.varrho1, p1.varrho2, p2.varrho3, p2.varrho4, p2.varrho5, p2.varrho6, p2.varrho7, p1.varrho8,
            ],
        }
    }

    /// Throughput in bits/s/Hz for the given target rates.
    pub fn throughput(&self, rate_c: T, rate_e: T) -> T {
        let half = T::lit(0.5);
        half * rate_c * (T::one() - self.op_c1) + half * rate_e * (T::one() - self.op_e) + half * rate_c * (T::one() - self.op_c2)
    }
}

pub fn model_thresholds<T: Real>(m: &SystemModel<T>, powers: &PowerAllocation<T>) -> Result<Thresholds<T>> {
    derive_thresholds(m.params.rate_c, m.params.rate_e, m.noise_u, m.noise_f, powers)
}

pub fn outage_set_with<T: Real>(m: &SystemModel<T>, th: &Thresholds<T>) -> Result<OutageSet<T>> {
    Ok(OutageSet::assemble(&phase1_terms(m, th)?, &phase2_terms(m, th)?))
}

pub fn outage_set<T: Real>(m: &SystemModel<T>, powers: &PowerAllocation<T>) -> Result<OutageSet<T>> {
    outage_set_with(m, &model_thresholds(m, powers)?)
}

/// Outage set with both SINR thresholds scaled, for negative controls.
pub fn outage_set_scaled<T: Real>(m: &SystemModel<T>, powers: &PowerAllocation<T>, tau_scale: T) -> Result<OutageSet<T>> {
    let th = derive_thresholds_scaled(m.params.rate_c, m.params.rate_e, m.noise_u, m.noise_f, powers, tau_scale)?;
    outage_set_with(m, &th)
}

pub fn throughput<T: Real>(m: &SystemModel<T>, powers: &PowerAllocation<T>) -> Result<T> {
    Ok(outage_set(m, powers)?.throughput(m.params.rate_c, m.params.rate_e))
}
