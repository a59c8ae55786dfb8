//! Power-allocation search: projected numerical gradient ascent (NGD) on the
//! closed-form throughput, and an exhaustive lattice search (BFS) baseline.
//!
//! Phase-1 outage terms depend on `theta1` only and phase-2 terms on `theta2`
//! only, so both searches evaluate the two phases separately and combine.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{model_thresholds, phase1_terms, phase2_terms, OutageSet, Phase1Terms, Phase2Terms};
use crate::error::{invalid, Error, Result};
use crate::num::Real;
use crate::protocol::PowerAllocation;
use crate::system::SystemModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgdConfig<T> {
    /// Nominal ascent step (halved on gradient reversals).
    pub step: T,
    /// Finite-difference step.
    pub eta: T,
    /// Stop once the projected gradient norm falls below this.
    pub tol: T,
    pub max_iter: usize,
    pub initial: (T, T),
}

impl<T: Real> Default for NgdConfig<T> {
    fn default() -> Self {
        Self {
            step: T::lit(0.05),
            eta: T::lit(1e-4),
            tol: T::lit(0.0025),
            max_iter: 10_000,
            initial: (T::lit(0.5), T::lit(0.5)),
        }
    }
}

impl<T: Real> NgdConfig<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("step", self.step), ("eta", self.eta), ("tol", self.tol)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(invalid(name, "must be positive"));
            }
        }
        let (a, b) = self.initial;
        if !(a >= T::zero() && a <= T::one() && b >= T::zero() && b <= T::one()) {
            return Err(invalid("initial", "starting point must lie in the unit square"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptResult<T> {
    pub theta1: T,
    pub theta2: T,
    pub r_star: T,
    pub iterations: usize,
    pub converged: bool,
    pub grad_norm: T,
    /// Number of throughput evaluations (lattice points for BFS).
    pub evaluations: usize,
    /// `(theta1, theta2, throughput)` at every iterate, starting point included.
    pub history: Vec<(T, T, T)>,
}

/// Throughput as a function of the two power splits.
pub struct Objective<'a, T> {
    model: &'a SystemModel<T>,
}

impl<'a, T: Real> Objective<'a, T> {
    pub fn new(model: &'a SystemModel<T>) -> Self {
        Self { model }
    }

    fn powers(&self, t1: T, t2: T) -> Result<PowerAllocation<T>> {
        PowerAllocation::new(t1, t2, self.model.p_max1(), self.model.p_max2())
    }

    pub fn phase1(&self, t1: T) -> Result<Phase1Terms<T>> {
        // theta2 is irrelevant to phase 1
        let th = model_thresholds(self.model, &self.powers(t1, T::lit(0.5))?)?;
        phase1_terms(self.model, &th)
    }

    pub fn phase2(&self, t2: T) -> Result<Phase2Terms<T>> {
        let th = model_thresholds(self.model, &self.powers(T::lit(0.5), t2)?)?;
        phase2_terms(self.model, &th)
    }

    pub fn combine(&self, p1: &Phase1Terms<T>, p2: &Phase2Terms<T>) -> T {
        OutageSet::assemble(p1, p2).throughput(self.model.params.rate_c, self.model.params.rate_e)
    }

    pub fn eval(&self, t1: T, t2: T) -> Result<T> {
        let r = self.combine(&self.phase1(t1)?, &self.phase2(t2)?);
        if !r.is_finite() {
            return Err(Error::NonFinite(t1.as_f64(), t2.as_f64()));
        }
        Ok(r)
    }
}

fn clamp_unit<T: Real>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}

/// Projected numerical gradient ascent from `config.initial`.
pub fn ngd_optimize<T: Real>(model: &SystemModel<T>, config: &NgdConfig<T>) -> Result<OptResult<T>> {
    config.validate()?;
    let obj = Objective::new(model);
    let eta = config.eta;
    let (mut t1, mut t2) = config.initial;
    let mut history = Vec::new();
    let mut evaluations = 0;
    let mut grad_norm = T::infinity();
    let mut step = config.step;
    let mut prev_grad = None;

    for iter in 0..=config.max_iter {
        let p1 = obj.phase1(t1)?;
        let p2 = obj.phase2(t2)?;
        let f0 = obj.combine(&p1, &p2);
        if !f0.is_finite() {
            return Err(Error::NonFinite(t1.as_f64(), t2.as_f64()));
        }
        history.push((t1, t2, f0));

        // forward differences, backward at the upper edge
        let h1 = if t1 + eta <= T::one() { eta } else { -eta };
        let h2 = if t2 + eta <= T::one() { eta } else { -eta };
        let f1 = obj.combine(&obj.phase1(t1 + h1)?, &p2);
        let f2 = obj.combine(&p1, &obj.phase2(t2 + h2)?);
        evaluations += 3;
        if !f1.is_finite() || !f2.is_finite() {
            return Err(Error::NonFinite(t1.as_f64(), t2.as_f64()));
        }
        let g1 = (f1 - f0) / h1;
        let g2 = (f2 - f0) / h2;

        // components pushing out of the square cannot be followed
        let blocked = |t: T, g: T| (t >= T::one() && g > T::zero()) || (t <= T::zero() && g < T::zero());
        let pg1 = if blocked(t1, g1) { T::zero() } else { g1 };
        let pg2 = if blocked(t2, g2) { T::zero() } else { g2 };
        grad_norm = (pg1 * pg1 + pg2 * pg2).sqrt();
        if grad_norm < config.tol {
            return Ok(OptResult { theta1: t1, theta2: t2, r_star: f0, iterations: iter, converged: true, grad_norm, evaluations, history });
        }
        if iter == config.max_iter {
            break;
        }
        // The throughput can have a near-kink at its maximum (where an SIC
        // threshold crosses the ordering boundary), and a fixed step then cycles
        // across it forever. Halve the step whenever the gradient reverses.
        if let Some((q1, q2)) = prev_grad {
            if g1 * q1 + g2 * q2 < T::zero() {
                step = step * T::lit(0.5);
            }
        }
        prev_grad = Some((g1, g2));
        t1 = clamp_unit(t1 + step * g1);
        t2 = clamp_unit(t2 + step * g2);
    }
    let (t1, t2, r) = *history.last().expect("at least one iterate");
    Ok(OptResult { theta1: t1, theta2: t2, r_star: r, iterations: config.max_iter, converged: false, grad_norm, evaluations, history })
}

/// Exhaustive search on the `grid_n x grid_n` lattice over `[0, 1]^2`
/// (endpoints included); ties go to the lexicographically smallest point.
pub fn brute_force_search<T: Real>(model: &SystemModel<T>, grid_n: usize) -> Result<OptResult<T>> {
    if grid_n < 2 {
        return Err(invalid("grid", "need at least two points per axis"));
    }
    let obj = Objective::new(model);
    let axis: Vec<T> = (0..grid_n).map(|i| T::from_count(i) / T::from_count(grid_n - 1)).collect();
    let p1: Vec<Phase1Terms<T>> = axis.par_iter().map(|&t| obj.phase1(t)).collect::<Result<_>>()?;
    let p2: Vec<Phase2Terms<T>> = axis.par_iter().map(|&t| obj.phase2(t)).collect::<Result<_>>()?;

    let mut best = (0, 0, T::neg_infinity());
    for (i, a) in p1.iter().enumerate() {
        for (j, b) in p2.iter().enumerate() {
            let r = obj.combine(a, b);
            if !r.is_finite() {
                return Err(Error::NonFinite(axis[i].as_f64(), axis[j].as_f64()));
            }
            if r > best.2 {
                best = (i, j, r);
            }
        }
    }
    let (i, j, r) = best;
    Ok(OptResult {
        theta1: axis[i],
        theta2: axis[j],
        r_star: r,
        iterations: 0,
        converged: true,
        grad_norm: T::zero(),
        evaluations: grid_n * grid_n,
        history: Vec::new(),
    })
}

/// Throughput over the full lattice, row-major in `theta1`.
pub fn throughput_surface<T: Real>(model: &SystemModel<T>, grid_n: usize) -> Result<Vec<(T, T, T)>> {
    if grid_n < 2 {
        return Err(invalid("grid", "need at least two points per axis"));
    }
    let obj = Objective::new(model);
    let axis: Vec<T> = (0..grid_n).map(|i| T::from_count(i) / T::from_count(grid_n - 1)).collect();
    let p1: Vec<Phase1Terms<T>> = axis.par_iter().map(|&t| obj.phase1(t)).collect::<Result<_>>()?;
    let p2: Vec<Phase2Terms<T>> = axis.par_iter().map(|&t| obj.phase2(t)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(grid_n * grid_n);
    for (i, a) in p1.iter().enumerate() {
        for (j, b) in p2.iter().enumerate() {
            out.push((axis[i], axis[j], obj.combine(a, b)));
        }
    }
    Ok(out)
}

/// Mean squared gap between paired optimal throughputs.
pub fn trajectory_mse<T: Real>(pairs: &[(T, T)]) -> Result<T> {
    if pairs.is_empty() {
        return Err(invalid("pairs", "need at least one location"));
    }
    let sum: T = pairs.iter().map(|&(a, b)| (a - b) * (a - b)).sum();
    Ok(sum / T::from_count(pairs.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Position3D;
    use crate::system::SystemParams;

    fn reference() -> SystemModel<f64> {
        SystemModel::new(&SystemParams::reference()).unwrap()
    }

    #[test]
    fn bfs_two_point_grid_is_best_corner() {
        let m = reference();
        let r = brute_force_search(&m, 2).unwrap();
        let obj = Objective::new(&m);
        let corners = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)];
        let best = corners.iter().map(|&(a, b)| obj.eval(a, b).unwrap()).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(r.r_star, best);
        assert_eq!(r.evaluations, 4);
    }

    #[test]
    fn bfs_is_lattice_argmax_and_refinement_monotone() {
        let m = reference();
        let coarse = brute_force_search(&m, 11).unwrap();
        let fine = brute_force_search(&m, 21).unwrap();
        assert!(fine.r_star >= coarse.r_star);
        let surface = throughput_surface(&m, 11).unwrap();
        assert!(surface.iter().all(|&(_, _, r)| r <= coarse.r_star));
        assert!(surface.iter().any(|&(a, b, r)| r == coarse.r_star && a == coarse.theta1 && b == coarse.theta2));
        assert!(brute_force_search(&m, 1).is_err());
    }

    #[test]
    fn ngd_stays_in_square_and_matches_bfs() {
        let m = reference();
        let r = ngd_optimize(&m, &NgdConfig::default()).unwrap();
        assert!(r.history.iter().all(|&(a, b, _)| (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b)));
        assert!(r.converged);
        let bfs = brute_force_search(&m, 101).unwrap();
        assert!((r.r_star - bfs.r_star).abs() <= 1e-2);
        assert_eq!(bfs.evaluations, 10_201);
    }

    #[test]
    fn ngd_from_optimum_stops_quickly() {
        let m = reference();
        let first = ngd_optimize(&m, &NgdConfig::default()).unwrap();
        let cfg = NgdConfig { initial: (first.theta1, first.theta2), ..NgdConfig::default() };
        let again = ngd_optimize(&m, &cfg).unwrap();
        assert!(again.converged && again.iterations <= 3);
    }

    #[test]
    fn ngd_settles_on_kinked_maximum() {
        // here the optimum sits where the E-first SIC threshold meets the
        // ordering boundary; a fixed step cycles across it indefinitely
        let mut p = SystemParams::<f64>::reference();
        p.topology = p.topology.with_uav(Position3D::new(-6.37208395, -6.21204129, 6.77));
        let m = SystemModel::new(&p).unwrap();
        let r = ngd_optimize(&m, &NgdConfig::default()).unwrap();
        assert!(r.converged && r.iterations < 2_000, "{} iterations", r.iterations);
        let bfs = brute_force_search(&m, 101).unwrap();
        assert!((r.r_star - bfs.r_star).abs() < 1e-3);
    }

    #[test]
    fn larger_step_converges_faster() {
        let m = reference();
        let fast = ngd_optimize(&m, &NgdConfig::default()).unwrap();
        let slow = ngd_optimize(&m, &NgdConfig { step: 0.01, ..NgdConfig::default() }).unwrap();
        assert!(fast.converged && slow.converged);
        assert!(fast.iterations < slow.iterations);
    }

    #[test]
    fn rejects_bad_config() {
        let m = reference();
        let cfg = NgdConfig { initial: (1.5, 0.5), ..NgdConfig::default() };
        assert!(ngd_optimize(&m, &cfg).is_err());
        let cfg = NgdConfig { step: 0.0, ..NgdConfig::default() };
        assert!(ngd_optimize(&m, &cfg).is_err());
    }

    #[test]
    fn mse_examples() {
        assert_eq!(trajectory_mse(&[(1.0, 1.0), (2.0, 2.0)]).unwrap(), 0.0);
        assert!((trajectory_mse(&[(1.0f64, 0.9)]).unwrap() - 0.01).abs() < 1e-15);
        assert!(trajectory_mse::<f64>(&[]).is_err());
    }
}
