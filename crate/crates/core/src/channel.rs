//! Large- and small-scale channel models.
//!
//! The center-user to fusion-center link is ground-to-ground with shadowed
//! Rician small-scale fading and 3GPP UMi path loss. Every link that touches
//! the UAV is air-to-ground with a logistic LoS probability, Nakagami-m fading
//! on LoS and Rayleigh fading on NLoS, and free-space path loss plus a
//! LoS/NLoS excess attenuation. Imperfect SIC leaves an exponentially
//! distributed residual whose mean is a fraction `xi` of the mean link gain.
//!
//! Power gains here are always linear and include path loss (`g^2 * L`).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mgdist::MgDist;
use crate::num::{db_to_linear, factorial, Real};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Shadowed Rician fading of the G2G link (integer shadowing severity).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowedRicianParams<T> {
    /// Shadowing severity `m_CF`.
    pub m: u32,
    /// Half the average multipath power.
    pub b: T,
    /// Average power of the LoS component.
    pub omega: T,
}

impl<T: Real> ShadowedRicianParams<T> {
    pub fn new(m: u32, b: T, omega: T) -> Result<Self> {
        let p = Self { m, b, omega };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(invalid("m_cf", "must be an integer >= 1"));
        }
        if !(self.b > T::zero()) || !self.b.is_finite() {
            return Err(invalid("b", "must be positive"));
        }
        if !(self.omega >= T::zero()) || !self.omega.is_finite() {
            return Err(invalid("omega_cf", "must be non-negative"));
        }
        Ok(())
    }

    fn two_bm(&self) -> T {
        T::lit(2.0) * self.b * T::from_count(self.m as usize)
    }

    pub fn alpha(&self) -> T {
        let ratio = self.two_bm() / (self.two_bm() + self.omega);
        ratio.powi(self.m as i32) / (T::lit(2.0) * self.b)
    }

    pub fn beta(&self) -> T {
        T::one() / (T::lit(2.0) * self.b)
    }

    pub fn delta(&self) -> T {
        self.omega / (T::lit(2.0) * self.b * (self.two_bm() + self.omega))
    }

    /// `zeta(l) = (-1)^l (1-m)_l delta^l / l!`, non-negative for integer `m`.
    pub fn zeta(&self, l: usize) -> T {
        // (-1)^l (1-m)_l = (m-1)(m-2)...(m-l)
        let m = self.m as i64;
        let falling = (0..l as i64).fold(T::one(), |acc, i| acc * T::lit((m - 1 - i) as f64));
        falling * self.delta().powi(l as i32) / factorial::<T>(l)
    }

    /// Mean of `g^2`, i.e. `2b + Omega`.
    pub fn mean_power(&self) -> T {
        T::lit(2.0) * self.b + self.omega
    }

    /// CDF of `g^2 * pathloss` written with lower incomplete gamma functions,
    /// independent of the mixture representation.
    pub fn power_cdf(&self, pathloss: T, x: T) -> T {
        if x <= T::zero() {
            return T::zero();
        }
        // f(y) = alpha e^{-(beta-delta) y} sum_l zeta(l) y^l / l!, with y = x / L
        let rate = self.beta() - self.delta();
        let y = x / pathloss;
        let alpha = self.alpha();
        let mut total = alpha * (T::one() - (-rate * y).exp()) / rate;
        for l in 1..self.m as usize {
            let lower = lower_gamma_int(l + 1, rate * y);
            total = total + alpha * self.zeta(l) / factorial::<T>(l) * lower / rate.powi(l as i32 + 1);
        }
        total
    }
}

/// Lower incomplete gamma `gamma(n, x)` for integer `n`, via the series tail.
fn lower_gamma_int<T: Real>(n: usize, x: T) -> T {
    factorial::<T>(n - 1) * crate::mgdist::regularized_lower_gamma(n, x)
}

/// Air-to-ground / ground-to-air link parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct A2GLinkParams<T> {
    /// Nakagami shape on the LoS branch.
    pub m: u32,
    pub eta_los_db: T,
    pub eta_nlos_db: T,
    /// Carrier frequency in Hz.
    pub carrier_freq: T,
    pub p_los: T,
}

impl<T: Real> A2GLinkParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(invalid("m", "Nakagami shape must be an integer >= 1"));
        }
        if !self.eta_los_db.is_finite() || !self.eta_nlos_db.is_finite() {
            return Err(invalid("eta", "attenuation must be finite"));
        }
        if !(self.carrier_freq > T::zero()) {
            return Err(invalid("carrier_freq", "must be positive"));
        }
        if !(self.p_los >= T::zero() && self.p_los <= T::one()) {
            return Err(invalid("p_los", "must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Linear mean power gain on the LoS branch, `((c/fc)/(4 pi d))^2 / eta`.
    pub fn los_gain(&self, d: T) -> T {
        free_space_gain(d, self.carrier_freq) / db_to_linear(self.eta_los_db)
    }

    /// Linear mean power gain on the NLoS branch.
    pub fn nlos_gain(&self, d: T) -> T {
        free_space_gain(d, self.carrier_freq) / db_to_linear(self.eta_nlos_db)
    }

    /// Expected power gain `E[g^2 L]` averaged over the LoS state.
    pub fn mean_gain(&self, d: T) -> T {
        self.p_los * self.los_gain(d) + (T::one() - self.p_los) * self.nlos_gain(d)
    }
}

/// Residual interference left by imperfect SIC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualParams<T> {
    /// Residual level in `[0, 1]`.
    pub xi: T,
    /// Mean power gain of the cancelled link.
    pub mean_gain: T,
}

impl<T: Real> ResidualParams<T> {
    pub fn new(xi: T, mean_gain: T) -> Result<Self> {
        if !(xi >= T::zero() && xi <= T::one()) {
            return Err(invalid("xi", "residual level must lie in [0, 1]"));
        }
        if !(mean_gain > T::zero()) || !mean_gain.is_finite() {
            return Err(invalid("mean_gain", "must be positive"));
        }
        Ok(Self { xi, mean_gain })
    }

    pub fn mean(&self) -> T {
        self.xi * self.mean_gain
    }
}

/// `((c / fc) / (4 pi d))^2`.
pub fn free_space_gain<T: Real>(d: T, fc_hz: T) -> T {
    let wavelength = T::lit(SPEED_OF_LIGHT) / fc_hz;
    let r = wavelength / (T::lit(4.0) * T::PI() * d);
    r * r
}

/// Logistic LoS probability for an elevation angle in degrees.
pub fn los_probability<T: Real>(elev_deg: T) -> Result<T> {
    if !(elev_deg >= T::zero() && elev_deg <= T::lit(90.0)) {
        return Err(Error::Domain(format!(
            "elevation angle {elev_deg} outside [0, 90] degrees"
        )));
    }
    let a = T::lit(12.08);
    let b = T::lit(0.11);
    Ok(T::one() / (T::one() + a * (-b * (elev_deg - a)).exp()))
}

/// 3GPP UMi LoS path loss in dB (a gain, so negative), `fc` in GHz, `d0 = 1 m`.
pub fn umi_pathloss_db<T: Real>(d: T, fc_ghz: T, gain_tx_dbi: T, gain_rx_dbi: T) -> Result<T> {
    if !(d >= T::one()) {
        return Err(Error::Domain(format!(
            "UMi path loss needs d >= 1 m, got {d}"
        )));
    }
    Ok(gain_tx_dbi + gain_rx_dbi
        - T::lit(22.7)
        - T::lit(26.0) * fc_ghz.log10()
        - T::lit(36.7) * d.log10())
}

/// A2G path loss in dB (negative), `fc` in Hz.
pub fn a2g_pathloss_db<T: Real>(d: T, fc_hz: T, los: bool, params: &A2GLinkParams<T>) -> Result<T> {
    if !(d > T::zero()) {
        return Err(Error::Domain("A2G path loss needs d > 0".into()));
    }
    let fs = T::lit(20.0) * (T::lit(SPEED_OF_LIGHT) / fc_hz / (T::lit(4.0) * T::PI() * d)).log10();
    Ok(fs - if los { params.eta_los_db } else { params.eta_nlos_db })
}

/// Thermal noise power in watts from a density in dBm/Hz and a bandwidth in Hz.
pub fn noise_power_watts<T: Real>(density_dbm_hz: T, bandwidth_hz: T) -> T {
    crate::num::dbm_to_watts(density_dbm_hz + T::lit(10.0) * bandwidth_hz.log10())
}

/// Uniform draw in `[0, 1)`.
pub(crate) fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.gen::<f64>())
}

/// Exponential draw with the given mean.
pub(crate) fn exponential<T: Real, R: Rng + ?Sized>(mean: T, rng: &mut R) -> T {
    -mean * (T::one() - uniform::<T, R>(rng)).ln()
}

/// Gamma draw with integer shape (sum of exponentials).
pub(crate) fn erlang<T: Real, R: Rng + ?Sized>(shape: u32, scale: T, rng: &mut R) -> T {
    let mut prod = 1.0f64;
    for _ in 0..shape {
        prod *= 1.0 - rng.gen::<f64>();
    }
    -scale * T::lit(prod.ln())
}

/// One draw of `g_CF^2 * L_CF`, sampled through the exact mixture form.
pub fn sample_g2g_power<T: Real, R: Rng + ?Sized>(
    params: &ShadowedRicianParams<T>,
    pathloss_linear: T,
    rng: &mut R,
) -> T {
    MgDist::from_g2g(params, pathloss_linear).sample(rng)
}

/// One draw of an A2G power gain at distance `d`.
pub fn sample_a2g_power<T: Real, R: Rng + ?Sized>(
    params: &A2GLinkParams<T>,
    d: T,
    rng: &mut R,
) -> T {
    sample_a2g_branches(
        params.p_los,
        params.m,
        params.los_gain(d),
        params.nlos_gain(d),
        rng,
    )
}

/// LoS state drawn first, then Nakagami-m (LoS) or Rayleigh (NLoS) power.
pub(crate) fn sample_a2g_branches<T: Real, R: Rng + ?Sized>(
    p_los: T,
    m: u32,
    los_gain: T,
    nlos_gain: T,
    rng: &mut R,
) -> T {
    if uniform::<T, R>(rng) < p_los {
        erlang(m, los_gain / T::from_count(m as usize), rng)
    } else {
        exponential(nlos_gain, rng)
    }
}

/// One draw of the residual interference power; exactly zero when `xi = 0`.
pub fn sample_residual_power<T: Real, R: Rng + ?Sized>(params: &ResidualParams<T>, rng: &mut R) -> T {
    if params.xi == T::zero() {
        return T::zero();
    }
    exponential(params.mean(), rng)
}
