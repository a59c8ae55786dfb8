//! Resolved link budget: turns a parameter set and a topology into per-link
//! gain distributions, noise powers and a per-trial channel sampler.

use rand::Rng;

use crate::channel::{
    a2g_pathloss_db, los_probability, noise_power_watts, sample_a2g_branches, umi_pathloss_db,
    A2GLinkParams, ResidualParams, ShadowedRicianParams,
};
use crate::error::{invalid, Result};
use crate::geometry::{distance, elevation_angle_deg, Topology};
use crate::mgdist::MgDist;
use crate::num::{db_to_linear, dbm_to_watts, Real};
use crate::protocol::TrialRealization;

/// Physical parameters of the system, in the units they are usually quoted in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    pub topology: Topology<T>,
    pub carrier_freq_ghz: T,
    pub gain_tx_dbi: T,
    pub gain_rx_dbi: T,
    pub eta_los_db: T,
    pub eta_nlos_db: T,
    pub m_cf: u32,
    pub m_cu: u32,
    pub m_eu: u32,
    pub m_uf: u32,
    /// Half the average multipath power of the G2G link.
    pub b: T,
    /// Average LoS power of the G2G link.
    pub omega_cf: T,
    pub noise_density_dbm_hz: T,
    pub bandwidth_hz: T,
    pub rate_c: T,
    pub rate_e: T,
    pub xi_u: T,
    pub xi_f: T,
    pub p_max1_dbm: T,
    pub p_max2_dbm: T,
}

impl<T: Real> SystemParams<T> {
    /// Reference parameter set on the reference topology.
    pub fn reference() -> Self {
        let xi = db_to_linear(T::lit(-10.0));
        Self {
            topology: Topology::reference(),
            carrier_freq_ghz: T::lit(3.0),
            gain_tx_dbi: T::zero(),
            gain_rx_dbi: T::zero(),
            eta_los_db: T::lit(1.6),
            eta_nlos_db: T::lit(23.0),
            m_cf: 5,
            m_cu: 3,
            m_eu: 1,
            m_uf: 5,
            b: T::lit(0.5),
            omega_cf: T::one(),
            noise_density_dbm_hz: T::lit(-144.0),
            bandwidth_hz: T::lit(20e6),
            rate_c: T::one(),
            rate_e: T::lit(0.05),
            xi_u: xi,
            xi_f: xi,
            p_max1_dbm: T::lit(35.0),
            p_max2_dbm: T::lit(35.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.topology.validate()?;
        ShadowedRicianParams::new(self.m_cf, self.b, self.omega_cf)?;
        for (name, m) in [("m_cu", self.m_cu), ("m_eu", self.m_eu), ("m_uf", self.m_uf)] {
            if m < 1 {
                return Err(invalid(name, "fading severity must be an integer >= 1"));
            }
        }
        let positive = [
            ("carrier_freq_ghz", self.carrier_freq_ghz),
            ("bandwidth_hz", self.bandwidth_hz),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(invalid(name, "must be positive and finite"));
            }
        }
        let finite = [
            ("gain_tx_dbi", self.gain_tx_dbi),
            ("gain_rx_dbi", self.gain_rx_dbi),
            ("eta_los_db", self.eta_los_db),
            ("eta_nlos_db", self.eta_nlos_db),
            ("noise_density_dbm_hz", self.noise_density_dbm_hz),
            ("p_max1_dbm", self.p_max1_dbm),
            ("p_max2_dbm", self.p_max2_dbm),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        for (name, r) in [("rate_c", self.rate_c), ("rate_e", self.rate_e)] {
            if !(r >= T::zero()) || !r.is_finite() {
                return Err(invalid(name, "target rate must be non-negative"));
            }
        }
        for (name, xi) in [("xi_u", self.xi_u), ("xi_f", self.xi_f)] {
            if !(xi >= T::zero() && xi <= T::one()) {
                return Err(invalid(name, "residual level must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// One A2G link with its LoS state probability and branch gains resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedA2G<T> {
    pub params: A2GLinkParams<T>,
    pub distance: T,
    pub los_gain: T,
    pub nlos_gain: T,
    pub dist: MgDist<T>,
}

impl<T: Real> ResolvedA2G<T> {
    fn new(params: A2GLinkParams<T>, d: T) -> Self {
        Self {
            params,
            distance: d,
            los_gain: params.los_gain(d),
            nlos_gain: params.nlos_gain(d),
            dist: MgDist::from_a2g(&params, d),
        }
    }

    pub fn mean_gain(&self) -> T {
        self.params.mean_gain(self.distance)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        sample_a2g_branches(self.params.p_los, self.params.m, self.los_gain, self.nlos_gain, rng)
    }
}

/// Link-level view of the system at one UAV position.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel<T> {
    pub params: SystemParams<T>,
    pub g2g: ShadowedRicianParams<T>,
    /// Linear UMi path-loss gain of the C-F link.
    pub pathloss_cf: T,
    pub cf: MgDist<T>,
    pub cu: ResolvedA2G<T>,
    pub eu: ResolvedA2G<T>,
    pub uf: ResolvedA2G<T>,
    pub res_cu: ResidualParams<T>,
    pub res_cf: ResidualParams<T>,
    pub res_uf: ResidualParams<T>,
    pub noise_u: T,
    pub noise_f: T,
}

impl<T: Real> SystemModel<T> {
    pub fn new(params: &SystemParams<T>) -> Result<Self> {
        params.validate()?;
        let topo = &params.topology;
        let fc_hz = params.carrier_freq_ghz * T::lit(1e9);
        let g2g = ShadowedRicianParams::new(params.m_cf, params.b, params.omega_cf)?;
        let d_cf = distance(&topo.pos_c, &topo.pos_f);
        let pathloss_cf = db_to_linear(umi_pathloss_db(
            d_cf,
            params.carrier_freq_ghz,
            params.gain_tx_dbi,
            params.gain_rx_dbi,
        )?);

        let link = |m: u32, a: &crate::geometry::Position3D<T>| -> Result<ResolvedA2G<T>> {
            let d = distance(a, &topo.pos_u);
            let p_los = los_probability(elevation_angle_deg(a, &topo.pos_u)?)?;
            let lp = A2GLinkParams {
                m,
                eta_los_db: params.eta_los_db,
                eta_nlos_db: params.eta_nlos_db,
                carrier_freq: fc_hz,
                p_los,
            };
            lp.validate()?;
            // the dB form is the reference definition; the gains below must agree
            debug_assert!({
                let db = a2g_pathloss_db(d, fc_hz, true, &lp)?;
                ((db_to_linear(db) - lp.los_gain(d)) / lp.los_gain(d)).abs() < T::lit(1e-4)
            });
            Ok(ResolvedA2G::new(lp, d))
        };
        let cu = link(params.m_cu, &topo.pos_c)?;
        let eu = link(params.m_eu, &topo.pos_e)?;
        let uf = link(params.m_uf, &topo.pos_f)?;

        let res_cu = ResidualParams::new(params.xi_u, cu.mean_gain())?;
        let res_cf = ResidualParams::new(params.xi_f, pathloss_cf)?;
        let res_uf = ResidualParams::new(params.xi_f, uf.mean_gain())?;
        let noise = noise_power_watts(params.noise_density_dbm_hz, params.bandwidth_hz);

        Ok(Self {
            params: *params,
            cf: MgDist::from_g2g(&g2g, pathloss_cf),
            g2g,
            pathloss_cf,
            cu,
            eu,
            uf,
            res_cu,
            res_cf,
            res_uf,
            noise_u: noise,
            noise_f: noise,
        })
    }

    pub fn p_max1(&self) -> T {
        dbm_to_watts(self.params.p_max1_dbm)
    }

    pub fn p_max2(&self) -> T {
        dbm_to_watts(self.params.p_max2_dbm)
    }

    /// Residual distributions; `None` marks a residual that is identically zero.
    pub fn residual_dists(&self) -> [Option<MgDist<T>>; 3] {
        [
            MgDist::from_residual(&self.res_cu),
            MgDist::from_residual(&self.res_cf),
            MgDist::from_residual(&self.res_uf),
        ]
    }

    /// Draws every channel gain and residual of one two-phase frame.
    pub fn sample_trial<R: Rng + ?Sized>(&self, rng: &mut R) -> TrialRealization<T> {
        let phi_cu = self.cu.sample(rng);
        let phi_eu = self.eu.sample(rng);
        let phi_uf = self.uf.sample(rng);
        let phi_cf = self.cf.sample(rng);
        let res_cu = crate::channel::sample_residual_power(&self.res_cu, rng);
        let res_cf = crate::channel::sample_residual_power(&self.res_cf, rng);
        let res_uf = crate::channel::sample_residual_power(&self.res_uf, rng);
        TrialRealization {
            phi_cu,
            phi_eu,
            phi_uf,
            phi_cf,
            res_cu,
            res_cf,
            res_uf,
            noise_u: self.noise_u,
            noise_f: self.noise_f,
        }
    }
}
