//! The four experiments behind the subcommands.

use std::io::Write;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::output::{self, Cell, CsvTable};
use super::scenario::{Allocation, Scenario};
use crate::analytics::{outage_set, outage_set_scaled, OutageSet};
use crate::error::{Error, Result};
use crate::geometry::{rwp_trace, Position3D, RwpState};
use crate::montecarlo::{estimate, reference_sigma, McConfig, OutageReport};
use crate::num::linear_to_db;
use crate::optimizer::{brute_force_search, ngd_optimize, throughput_surface, trajectory_mse, NgdConfig, OptResult};
use crate::protocol::{Mechanism, PowerAllocation};
use crate::system::SystemModel;

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Mismatch,
    NotConverged,
}

/// Settings shared by every command.
#[derive(Debug, Clone)]
pub struct Context {
    pub scenario: Scenario,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub workers: usize,
    pub mechanisms: Vec<Mechanism>,
    pub grid: usize,
}

impl Context {
    fn mc(&self, trials: u64, seed: u64) -> McConfig {
        McConfig::new(trials, seed).with_workers(self.workers)
    }

    fn meta(&self, command: &str, extra: Vec<(&'static str, String)>) -> Vec<(&'static str, String)> {
        let mut m = vec![
            ("command", command.to_string()),
            ("version", env!("CARGO_PKG_VERSION").to_string()),
            ("seed", self.seed.to_string()),
            ("scenario", serde_json::to_string(&self.scenario).expect("scenario serializes")),
        ];
        m.extend(extra);
        m
    }

    fn write_csv(&self, table: &CsvTable, meta: &[(&str, String)]) -> Result<()> {
        let mut out = output::open(self.out.as_deref())?;
        table.write(&mut out, meta)?;
        out.flush().map_err(|e| Error::Config(format!("write failed: {e}")))
    }
}

fn model_of(s: &Scenario) -> Result<SystemModel<f64>> {
    SystemModel::new(&s.params()?)
}

/// Power split for the scenario: as configured, or the NGD optimum.
fn allocation(model: &SystemModel<f64>, s: &Scenario) -> Result<(PowerAllocation<f64>, Option<OptResult<f64>>)> {
    let (t1, t2, opt) = match s.allocation {
        Allocation::Fixed { theta1, theta2 } => (theta1, theta2, None),
        Allocation::Optimize => {
            let r = ngd_optimize(model, &NgdConfig::default())?;
            (r.theta1, r.theta2, Some(r))
        }
    };
    Ok((PowerAllocation::new(t1, t2, model.p_max1(), model.p_max2())?, opt))
}

fn warn_low_power(trials: u64) {
    if trials < 10_000 {
        log::warn!("only {trials} trials: confidence intervals are wide and the check has little statistical power");
    }
}

pub fn validate(ctx: &Context, trials: u64, tau_scale: f64) -> Result<Status> {
    if !(tau_scale > 0.0) || !tau_scale.is_finite() {
        return Err(Error::Config("tau scale must be positive".into()));
    }
    warn_low_power(trials);
    let model = model_of(&ctx.scenario)?;
    let (powers, _) = allocation(&model, &ctx.scenario)?;
    let ana = outage_set_scaled(&model, &powers, tau_scale)?;
    let report = estimate(&model, &powers, &[Mechanism::Adm], &ctx.mc(trials, ctx.seed))?;
    let adm = report.get(Mechanism::Adm).expect("adm requested");

    let mut table = CsvTable::new(
        ["quantity", "analytic", "empirical", "half_width", "sigma", "deviation", "gate", "pass"]
            .map(String::from)
            .to_vec(),
    );
    let mut worst: Option<(String, f64)> = None;
    let mut failed = false;
    let mut rows: Vec<(String, f64, crate::montecarlo::Estimate, bool)> = vec![
        ("op_e".into(), ana.op_e, adm.op_e, true),
        ("op_c1".into(), ana.op_c1, adm.op_c1, true),
        ("op_c2".into(), ana.op_c2, adm.op_c2, true),
    ];
    for (k, (&a, &e)) in ana.varrho.iter().zip(&report.varrho).enumerate() {
        rows.push((format!("varrho{}", k + 1), a, e, false));
    }
    for (name, a, e, gate) in rows {
        let sigma = reference_sigma(a, trials);
        let diff = (e.p - a).abs();
        let dev = if sigma > 0.0 { diff / sigma } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
        let pass = dev <= report.z;
        if gate {
            failed |= !pass;
            if worst.as_ref().is_none_or(|(_, d)| dev > *d) {
                worst = Some((name.clone(), dev));
            }
        }
        table.push(vec![
            name.as_str().into(),
            a.into(),
            e.p.into(),
            e.half_width.into(),
            sigma.into(),
            dev.into(),
            gate.into(),
            pass.into(),
        ]);
    }
    let meta = ctx.meta(
        "validate",
        vec![
            ("trials", trials.to_string()),
            ("z", output::fmt_float(report.z)),
            ("theta", format!("{},{}", powers.theta1, powers.theta2)),
            ("tau_scale", tau_scale.to_string()),
        ],
    );
    ctx.write_csv(&table, &meta)?;
    let (name, dev) = worst.expect("three gated rows");
    if failed {
        eprintln!("validation mismatch: worst offender {name} at {dev:.2} sigma (limit {:.2})", report.z);
        Ok(Status::Mismatch)
    } else {
        eprintln!("validation passed: worst {name} at {dev:.2} sigma");
        Ok(Status::Ok)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    PMax,
    Angle,
    Xi,
    XiDb,
    Rate,
    Altitude,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::PMax => "p_max_dbm",
            Axis::Angle => "angle_deg",
            Axis::Xi => "xi",
            Axis::XiDb => "xi_db",
            Axis::Rate => "rate_c",
            Axis::Altitude => "altitude_m",
        }
    }

    /// Scenario with the swept quantity set to `v`.
    pub fn apply(self, base: &Scenario, v: f64) -> Result<Scenario> {
        let mut s = base.clone();
        match self {
            Axis::PMax => {
                s.p_max1_dbm = v;
                s.p_max2_dbm = v;
            }
            Axis::Angle => {
                // polar placement around the FC keeping the UAV's radius and altitude
                let [fx, fy, _] = s.topology.pos_f;
                let [ux, uy, uz] = s.topology.pos_u;
                let r = (ux - fx).hypot(uy - fy);
                let a = v.to_radians();
                s.topology.pos_u = [fx + r * a.cos(), fy + r * a.sin(), uz];
            }
            Axis::Xi => {
                s.xi_u = v;
                s.xi_f = v;
            }
            Axis::XiDb => {
                let x = 10f64.powf(v / 10.0);
                s.xi_u = x;
                s.xi_f = x;
            }
            Axis::Rate => {
                if !(base.rate_c > 0.0) {
                    return Err(Error::Config("rate sweep needs a positive base rate_c".into()));
                }
                s.rate_c = v;
                s.rate_e = v * base.rate_e / base.rate_c;
            }
            Axis::Altitude => s.topology.pos_u[2] = v,
        }
        s.validate()?;
        Ok(s)
    }
}

pub struct SweepSpec {
    pub axis: Axis,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub trials: u64,
    /// Transmit SNR `P_max / noise` in dB, overriding both power budgets.
    pub snr_db: Option<f64>,
}

pub fn sweep_values(from: f64, to: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 || !from.is_finite() || !to.is_finite() {
        return Err(Error::Config("sweep range is empty".into()));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    Ok((0..points).map(|i| from + (to - from) * i as f64 / (points - 1) as f64).collect())
}

struct SweepPoint {
    value: f64,
    powers: PowerAllocation<f64>,
    ana: OutageSet<f64>,
    rate_c: f64,
    rate_e: f64,
    mc: Option<OutageReport>,
}

pub fn sweep(ctx: &Context, spec: &SweepSpec) -> Result<Status> {
    let values = sweep_values(spec.from, spec.to, spec.points)?;
    let mut base = ctx.scenario.clone();
    if let Some(snr) = spec.snr_db {
        let noise_dbm = base.noise_density_dbm_hz + linear_to_db(base.bandwidth_hz);
        base.p_max1_dbm = noise_dbm + snr;
        base.p_max2_dbm = noise_dbm + snr;
    }
    if spec.trials > 0 {
        warn_low_power(spec.trials);
    }
    // rayon keeps the collected rows in sweep order
    let points: Vec<SweepPoint> = values
        .par_iter()
        .map(|&v| -> Result<SweepPoint> {
            let s = spec.axis.apply(&base, v)?;
            let model = model_of(&s)?;
            let (powers, _) = allocation(&model, &s)?;
            let ana = outage_set(&model, &powers)?;
            let mc = if spec.trials > 0 {
                Some(estimate(&model, &powers, &ctx.mechanisms, &ctx.mc(spec.trials, ctx.seed))?)
            } else {
                None
            };
            Ok(SweepPoint { value: v, powers, ana, rate_c: s.rate_c, rate_e: s.rate_e, mc })
        })
        .collect::<Result<_>>()?;

    let mut header: Vec<String> = [spec.axis.name(), "theta1", "theta2", "op_e", "op_c1", "op_c2", "throughput", "throughput_lower_bound"]
        .map(String::from)
        .to_vec();
    let fixed: Vec<Mechanism> = ctx.mechanisms.iter().copied().filter(|m| *m != Mechanism::Adm).collect();
    if spec.trials > 0 {
        for m in &ctx.mechanisms {
            for q in ["op_e", "op_e_hw", "op_c1", "op_c1_hw", "op_c2", "op_c2_hw", "throughput", "throughput_hw"] {
                header.push(format!("{m}_{q}"));
            }
        }
        if !fixed.is_empty() {
            header.extend(["nadm_min_op_e", "nadm_min_op_c2"].map(String::from));
        }
    }
    let mut table = CsvTable::new(header);
    for p in &points {
        let mut row: Vec<Cell> = vec![
            p.value.into(),
            p.powers.theta1.into(),
            p.powers.theta2.into(),
            p.ana.op_e.into(),
            p.ana.op_c1.into(),
            p.ana.op_c2.into(),
            p.ana.throughput(p.rate_c, p.rate_e).into(),
            (0.5 * p.rate_c * (1.0 - p.ana.op_c1)).into(),
        ];
        if let Some(mc) = &p.mc {
            for r in &mc.mechanisms {
                row.extend([
                    r.op_e.p,
                    r.op_e.half_width,
                    r.op_c1.p,
                    r.op_c1.half_width,
                    r.op_c2.p,
                    r.op_c2.half_width,
                    r.throughput,
                    r.throughput_half_width,
                ]
                .map(Cell::from));
            }
            if !fixed.is_empty() {
                let min_of = |f: fn(&crate::montecarlo::MechanismReport) -> f64| {
                    fixed.iter().map(|&m| f(mc.get(m).expect("requested"))).fold(f64::INFINITY, f64::min)
                };
                row.push(min_of(|r| r.op_e.p).into());
                row.push(min_of(|r| r.op_c2.p).into());
            }
        }
        table.push(row);
    }
    let mut extra = vec![
        ("axis", spec.axis.name().to_string()),
        ("trials", spec.trials.to_string()),
        ("mechanisms", ctx.mechanisms.iter().map(|m| m.name()).collect::<Vec<_>>().join(",")),
    ];
    if let Some(snr) = spec.snr_db {
        extra.push(("snr_db", snr.to_string()));
    }
    ctx.write_csv(&table, &ctx.meta("sweep", extra))?;
    Ok(Status::Ok)
}

pub struct MobilitySpec {
    pub steps: usize,
    pub trials: u64,
    pub bfs: bool,
}

/// One UAV location along the trajectory.
pub struct MobilityRow {
    pub position: Position3D<f64>,
    pub ngd: OptResult<f64>,
    pub bfs: Option<OptResult<f64>>,
    pub mc: Option<OutageReport>,
}

/// UAV positions visited by the random-waypoint process from the scenario's
/// initial UAV location, on a disk centred there.
pub fn trajectory(s: &Scenario, steps: usize, seed: u64) -> Result<Vec<Position3D<f64>>> {
    let topo = s.topology.resolve()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // keep the trajectory stream apart from the Monte Carlo block streams
    rng.set_stream(u64::MAX);
    let state = RwpState::new(topo.pos_u, topo.pos_u, topo.mobility_radius, s.rwp.v_min, s.rwp.v_max, &mut rng)?;
    Ok(rwp_trace(&state, steps, &mut rng))
}

pub fn mobility_rows(ctx: &Context, spec: &MobilitySpec) -> Result<Vec<MobilityRow>> {
    if spec.steps == 0 {
        return Err(Error::Config("mobility needs at least one step".into()));
    }
    let path = trajectory(&ctx.scenario, spec.steps, ctx.seed)?;
    path.par_iter()
        .enumerate()
        .map(|(i, &p)| -> Result<MobilityRow> {
            let mut s = ctx.scenario.clone();
            s.topology.pos_u = [p.x, p.y, p.z];
            let model = model_of(&s)?;
            let ngd = ngd_optimize(&model, &NgdConfig::default())?;
            let bfs = if spec.bfs { Some(brute_force_search(&model, ctx.grid)?) } else { None };
            let mc = if spec.trials > 0 {
                let powers = PowerAllocation::new(ngd.theta1, ngd.theta2, model.p_max1(), model.p_max2())?;
                let seed = ctx.seed.wrapping_add(1 + i as u64);
                Some(estimate(&model, &powers, &ctx.mechanisms, &ctx.mc(spec.trials, seed))?)
            } else {
                None
            };
            Ok(MobilityRow { position: p, ngd, bfs, mc })
        })
        .collect()
}

fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt()
}

pub fn mobility(ctx: &Context, spec: &MobilitySpec) -> Result<Status> {
    if spec.trials > 0 {
        warn_low_power(spec.trials);
    }
    let rows = mobility_rows(ctx, spec)?;
    let mut header: Vec<String> = ["step", "x", "y", "z", "theta1", "theta2", "adm_analytic_throughput", "ngd_iterations", "ngd_converged"]
        .map(String::from)
        .to_vec();
    if spec.bfs {
        header.extend(["bfs_theta1", "bfs_theta2", "bfs_throughput"].map(String::from));
    }
    if spec.trials > 0 {
        header.extend(ctx.mechanisms.iter().map(|m| format!("{m}_throughput")));
    }
    let mut table = CsvTable::new(header);
    for (i, r) in rows.iter().enumerate() {
        let mut row: Vec<Cell> = vec![
            i.into(),
            r.position.x.into(),
            r.position.y.into(),
            r.position.z.into(),
            r.ngd.theta1.into(),
            r.ngd.theta2.into(),
            r.ngd.r_star.into(),
            r.ngd.iterations.into(),
            r.ngd.converged.into(),
        ];
        if let Some(b) = &r.bfs {
            row.extend([b.theta1, b.theta2, b.r_star].map(Cell::from));
        }
        if let Some(mc) = &r.mc {
            row.extend(mc.mechanisms.iter().map(|m| Cell::from(m.throughput)));
        }
        table.push(row);
    }

    let converged = rows.iter().filter(|r| r.ngd.converged).count();
    let mut extra = vec![
        ("steps", spec.steps.to_string()),
        ("trials", spec.trials.to_string()),
        ("ngd_converged", format!("{converged}/{}", rows.len())),
    ];
    if spec.bfs {
        let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.bfs.as_ref().expect("bfs run").r_star, r.ngd.r_star)).collect();
        extra.push(("grid", ctx.grid.to_string()));
        extra.push(("mse_bfs_ngd", output::fmt_float(trajectory_mse(&pairs)?)));
    }
    if spec.trials > 0 {
        extra.push(("mechanisms", ctx.mechanisms.iter().map(|m| m.name()).collect::<Vec<_>>().join(",")));
        for (k, m) in ctx.mechanisms.iter().enumerate() {
            let xs: Vec<f64> = rows.iter().map(|r| r.mc.as_ref().expect("mc run").mechanisms[k].throughput).collect();
            eprintln!("{m}: throughput std {:.4}", std_dev(&xs));
        }
    }
    ctx.write_csv(&table, &ctx.meta("mobility", extra))?;
    if converged < rows.len() {
        log::warn!("NGD hit the iteration cap at {} of {} locations", rows.len() - converged, rows.len());
    }
    Ok(Status::Ok)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ngd,
    Bfs,
    Both,
}

pub struct OptimizeSpec {
    pub method: Method,
    pub ngd: NgdConfig<f64>,
    pub surface: Option<PathBuf>,
}

#[derive(Serialize)]
struct OptimizeReport<'a> {
    schema: u32,
    seed: u64,
    scenario: &'a Scenario,
    #[serde(skip_serializing_if = "Option::is_none")]
    ngd: Option<OptResult<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bfs: Option<OptResult<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<f64>,
}

pub fn optimize(ctx: &Context, spec: &OptimizeSpec) -> Result<Status> {
    let model = model_of(&ctx.scenario)?;
    let ngd = match spec.method {
        Method::Ngd | Method::Both => Some(ngd_optimize(&model, &spec.ngd)?),
        Method::Bfs => None,
    };
    let bfs = match spec.method {
        Method::Bfs | Method::Both => Some(brute_force_search(&model, ctx.grid)?),
        Method::Ngd => None,
    };
    let gap = match (&ngd, &bfs) {
        (Some(a), Some(b)) => Some((a.r_star - b.r_star).abs()),
        _ => None,
    };
    if let Some(path) = &spec.surface {
        let mut table = CsvTable::new(["theta1", "theta2", "throughput"].map(String::from).to_vec());
        for (a, b, r) in throughput_surface(&model, ctx.grid)? {
            table.push(vec![a.into(), b.into(), r.into()]);
        }
        let mut out = output::open(Some(path))?;
        table.write(&mut out, &ctx.meta("optimize-surface", vec![("grid", ctx.grid.to_string())]))?;
        out.flush().map_err(|e| Error::Config(format!("write failed: {e}")))?;
    }
    let converged = ngd.as_ref().is_none_or(|r| r.converged);
    let report = OptimizeReport { schema: output::SCHEMA, seed: ctx.seed, scenario: &ctx.scenario, ngd, bfs, gap };
    let mut out = output::open(ctx.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report).map_err(|e| Error::Config(format!("write failed: {e}")))?;
    writeln!(out).and_then(|_| out.flush()).map_err(|e| Error::Config(format!("write failed: {e}")))?;
    if converged {
        Ok(Status::Ok)
    } else {
        eprintln!("NGD did not converge within {} iterations", spec.ngd.max_iter);
        Ok(Status::NotConverged)
    }
}
