//! JSON scenario files: every model parameter with its unit in the key name,
//! defaults pre-loaded, unknown keys rejected.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance, Position3D, Topology};
use crate::system::SystemParams;

/// Radius of the disk (around the FC) that random user placements are drawn from.
pub const NETWORK_RADIUS: f64 = 25.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySpec {
    pub pos_c: [f64; 3],
    pub pos_e: [f64; 3],
    pub pos_f: [f64; 3],
    pub pos_u: [f64; 3],
    /// Defaults to half the C-F distance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mobility_radius: Option<f64>,
}

impl Default for TopologySpec {
    fn default() -> Self {
        Self::from_topology(&Topology::reference(), false)
    }
}

fn arr(p: &Position3D<f64>) -> [f64; 3] {
    [p.x, p.y, p.z]
}

fn pos(a: [f64; 3]) -> Position3D<f64> {
    Position3D::new(a[0], a[1], a[2])
}

impl TopologySpec {
    pub fn from_topology(t: &Topology<f64>, keep_radius: bool) -> Self {
        Self {
            pos_c: arr(&t.pos_c),
            pos_e: arr(&t.pos_e),
            pos_f: arr(&t.pos_f),
            pos_u: arr(&t.pos_u),
            mobility_radius: keep_radius.then_some(t.mobility_radius),
        }
    }

    pub fn resolve(&self) -> Result<Topology<f64>> {
        let mut t = Topology::new(pos(self.pos_c), pos(self.pos_e), pos(self.pos_f), pos(self.pos_u))?;
        if let Some(r) = self.mobility_radius {
            t.mobility_radius = r;
            t.validate()?;
        }
        Ok(t)
    }

    /// Draws C and E uniformly over the network disk around F (C the nearer
    /// of the two) and puts the UAV above the E-F midpoint at the reference altitude.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reference = Topology::<f64>::reference();
        let f = reference.pos_f;
        let draw = |rng: &mut ChaCha8Rng| loop {
            let r = NETWORK_RADIUS * rng.gen::<f64>().sqrt();
            let phi = std::f64::consts::TAU * rng.gen::<f64>();
            let p = Position3D::new(f.x + r * phi.cos(), f.y + r * phi.sin(), 0.0);
            // the UMi model is defined from 1 m
            if distance(&p, &f) >= 1.0 {
                return p;
            }
        };
        let (mut c, mut e) = (draw(&mut rng), draw(&mut rng));
        if distance(&c, &f) > distance(&e, &f) {
            std::mem::swap(&mut c, &mut e);
        }
        let u = Position3D::new(0.5 * (e.x + f.x), 0.5 * (e.y + f.y), reference.pos_u.z);
        Self { pos_c: arr(&c), pos_e: arr(&e), pos_f: arr(&f), pos_u: arr(&u), mobility_radius: None }
    }
}

/// Power split: fixed, or chosen by the optimizer before evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Allocation {
    Fixed { theta1: f64, theta2: f64 },
    Optimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RwpSpec {
    pub v_min: f64,
    pub v_max: f64,
}

impl Default for RwpSpec {
    fn default() -> Self {
        Self { v_min: 0.1, v_max: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    pub topology: TopologySpec,
    pub carrier_freq_ghz: f64,
    pub gain_tx_dbi: f64,
    pub gain_rx_dbi: f64,
    pub eta_los_db: f64,
    pub eta_nlos_db: f64,
    pub m_cf: u32,
    pub m_cu: u32,
    pub m_eu: u32,
    pub m_uf: u32,
    pub b: f64,
    pub omega_cf: f64,
    pub noise_density_dbm_hz: f64,
    pub bandwidth_hz: f64,
    /// Target rates in bits/s/Hz.
    pub rate_c: f64,
    pub rate_e: f64,
    /// Residual interference levels, linear in `[0, 1]`.
    pub xi_u: f64,
    pub xi_f: f64,
    pub p_max1_dbm: f64,
    pub p_max2_dbm: f64,
    pub allocation: Allocation,
    pub rwp: RwpSpec,
}

impl Default for Scenario {
    fn default() -> Self {
        Self::from_params(&SystemParams::reference())
    }
}

impl Scenario {
    pub fn from_params(p: &SystemParams<f64>) -> Self {
        Self {
            topology: TopologySpec::from_topology(&p.topology, false),
            carrier_freq_ghz: p.carrier_freq_ghz,
            gain_tx_dbi: p.gain_tx_dbi,
            gain_rx_dbi: p.gain_rx_dbi,
            eta_los_db: p.eta_los_db,
            eta_nlos_db: p.eta_nlos_db,
            m_cf: p.m_cf,
            m_cu: p.m_cu,
            m_eu: p.m_eu,
            m_uf: p.m_uf,
            b: p.b,
            omega_cf: p.omega_cf,
            noise_density_dbm_hz: p.noise_density_dbm_hz,
            bandwidth_hz: p.bandwidth_hz,
            rate_c: p.rate_c,
            rate_e: p.rate_e,
            xi_u: p.xi_u,
            xi_f: p.xi_f,
            p_max1_dbm: p.p_max1_dbm,
            p_max2_dbm: p.p_max2_dbm,
            allocation: Allocation::Fixed { theta1: 0.5, theta2: 0.5 },
            rwp: RwpSpec::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn params(&self) -> Result<SystemParams<f64>> {
        let p = SystemParams {
            topology: self.topology.resolve()?,
            carrier_freq_ghz: self.carrier_freq_ghz,
            gain_tx_dbi: self.gain_tx_dbi,
            gain_rx_dbi: self.gain_rx_dbi,
            eta_los_db: self.eta_los_db,
            eta_nlos_db: self.eta_nlos_db,
            m_cf: self.m_cf,
            m_cu: self.m_cu,
            m_eu: self.m_eu,
            m_uf: self.m_uf,
            b: self.b,
            omega_cf: self.omega_cf,
            noise_density_dbm_hz: self.noise_density_dbm_hz,
            bandwidth_hz: self.bandwidth_hz,
            rate_c: self.rate_c,
            rate_e: self.rate_e,
            xi_u: self.xi_u,
            xi_f: self.xi_f,
            p_max1_dbm: self.p_max1_dbm,
            p_max2_dbm: self.p_max2_dbm,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        if let Allocation::Fixed { theta1, theta2 } = self.allocation {
            if !((0.0..=1.0).contains(&theta1) && (0.0..=1.0).contains(&theta2)) {
                return Err(Error::Config("theta1 and theta2 must lie in [0, 1]".into()));
            }
        }
        if !(self.rwp.v_min > 0.0 && self.rwp.v_min <= self.rwp.v_max && self.rwp.v_max.is_finite()) {
            return Err(Error::Config("rwp speeds need 0 < v_min <= v_max".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_parameters() {
        let s = Scenario::default();
        assert_eq!(s.params().unwrap(), SystemParams::reference());
        assert_eq!(s.m_eu, 1);
        assert!((s.xi_u - 0.1).abs() < 1e-15);
    }

    #[test]
    fn empty_document_is_all_defaults() {
        assert_eq!(Scenario::from_json("{}").unwrap(), Scenario::default());
    }

    #[test]
    fn round_trip_is_identity() {
        let s = Scenario {
            topology: TopologySpec { mobility_radius: Some(3.25), ..TopologySpec::random(9) },
            xi_f: 0.1 / 3.0,
            allocation: Allocation::Optimize,
            ..Scenario::default()
        };
        let again = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(again, s);
        assert_eq!(again.to_json(), s.to_json());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(Scenario::from_json(r#"{"rate_cc": 1.0}"#).is_err());
        assert!(Scenario::from_json(r#"{"rwp": {"v_min": 0.1, "v_max": 1.0, "pause": 0}}"#).is_err());
        assert!(Scenario::from_json(r#"{"topology": {"pos_c": [1,0,0], "pos_e": [5,0,0], "pos_f": [0,0,0], "pos_u": [2,0,5], "z": 1}}"#).is_err());
    }

    #[test]
    fn out_of_range_values_rejected() {
        assert!(Scenario::from_json(r#"{"xi_u": 1.5}"#).is_err());
        assert!(Scenario::from_json(r#"{"m_cu": 0}"#).is_err());
        assert!(Scenario::from_json(r#"{"allocation": {"fixed": {"theta1": 1.2, "theta2": 0.5}}}"#).is_err());
        assert!(Scenario::from_json(r#"{"rwp": {"v_min": 0.0, "v_max": 1.0}}"#).is_err());
        assert!(Scenario::from_json(r#"{"allocation": "optimize"}"#).is_ok());
    }

    #[test]
    fn random_topology_respects_network_disk() {
        for seed in 0..200 {
            let t = TopologySpec::random(seed).resolve().unwrap();
            let (dc, de) = (distance(&t.pos_c, &t.pos_f), distance(&t.pos_e, &t.pos_f));
            assert!((1.0..=NETWORK_RADIUS).contains(&dc) && dc <= de && de <= NETWORK_RADIUS);
        }
        assert_eq!(TopologySpec::random(4), TopologySpec::random(4));
        assert_ne!(TopologySpec::random(4), TopologySpec::random(5));
    }
}
