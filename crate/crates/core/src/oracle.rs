//! Brute-force maximizer of the separation probability.
//!
//! Searches `(P+, P-, φ)` directly against the feasibility condition
//! `(1 - P+)(1 - P-) ≥ |α - Qβ|²` with `Q = √(P+ P-) e^{iφ}`, without using
//! the closed-form bound, so it can certify that the bound is both an upper
//! limit and attainable.
//!
//! Fixing `|Q| = √(P+ P-)` is the extremal slice: for aligned phases and
//! `β ≤ α`, a smaller `|Q|` only enlarges `|α - Qβ|`. A coarse sweep over
//! `|Q| ∈ [0, √(P+ P-)]` is run alongside as a guard on that argument.
//!
//! After the coarse grid, shrinking windows follow the incumbent, and each
//! window column is bisected up to the feasibility boundary.
//!
//! The search is deterministic. Grid cells are swept in parallel (see
//! [`Execution`]) and merged with a total order on candidates, so the result
//! does not depend on the execution mode.

use std::f64::consts::TAU;

use crate::error::{check_unit_interval, Error, Result};
use crate::exec::Execution;

/// Slack in the feasibility predicate absorbing rounding at the boundary.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

/// Points per probability axis of a local refinement window.
const REFINE_POINTS: usize = 65;
/// Points on the phase axis of a local refinement window.
const REFINE_PHASE_POINTS: usize = 17;
/// Half-width of the first refinement window, in coarse grid steps.
const REFINE_INITIAL_HALF_WIDTH: f64 = 4.0;
/// Window shrink factor between refinement rounds.
const REFINE_SHRINK: f64 = 4.0;
/// Recentering moves allowed per round. The feasible boundary is flat near
/// the optimum, so the incumbent may need to walk several windows.
const REFINE_MAX_MOVES: usize = 256;
/// Bisection steps from a column's top feasible grid point to the boundary.
const BISECTION_STEPS: u64 = 52;

const GUARD_GRID: usize = 32;
const GUARD_PHASES: usize = 16;
const GUARD_MODULI: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub grid_points: usize,
    pub refine_rounds: usize,
    pub phase_points: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            grid_points: 200,
            refine_rounds: 3,
            phase_points: 64,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 16 {
            return Err(Error::Domain(format!(
                "grid_points must be >= 16, got {}",
                self.grid_points
            )));
        }
        if self.phase_points < 8 {
            return Err(Error::Domain(format!(
                "phase_points must be >= 8, got {}",
                self.phase_points
            )));
        }
        Ok(())
    }

    pub fn grid_step(&self) -> f64 {
        1.0 / (self.grid_points - 1) as f64
    }

    pub fn phase_step(&self) -> f64 {
        TAU / self.phase_points as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleParams {
    pub p_plus: f64,
    pub p_minus: f64,
    /// Phase of `Q`, in `[0, 2π)`.
    pub rel_phase: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleResult {
    pub best_p_s: f64,
    pub best_params: OracleParams,
    /// Feasible points seen across the main grid and every refinement window.
    pub feasible_count: u64,
    pub evaluations: u64,
    /// Best value found by the reduced-`|Q|` guard sweep.
    pub guard_best_p_s: f64,
}

/// `(1 - p+)(1 - p-) ≥ |α - √(p+ p-) e^{iφ} β|² - slack`
pub fn feasible(p_plus: f64, p_minus: f64, rel_phase: f64, alpha_mag: f64, beta_mag: f64) -> bool {
    let q = (p_plus * p_minus).sqrt();
    let (sin, cos) = rel_phase.sin_cos();
    feasible_raw(p_plus, p_minus, q * beta_mag, cos, sin, alpha_mag)
}

#[inline]
fn feasible_raw(p_plus: f64, p_minus: f64, qb: f64, cos: f64, sin: f64, alpha: f64) -> bool {
    let re = alpha - qb * cos;
    let im = qb * sin;
    (1.0 - p_plus) * (1.0 - p_minus) >= re * re + im * im - FEASIBILITY_SLACK
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    p_s: f64,
    p_plus: f64,
    p_minus: f64,
    phase: f64,
}

impl Candidate {
    fn none() -> Self {
        Self {
            p_s: f64::NEG_INFINITY,
            p_plus: f64::INFINITY,
            p_minus: f64::INFINITY,
            phase: f64::INFINITY,
        }
    }

    fn new(p_plus: f64, p_minus: f64, phase: f64) -> Self {
        Self {
            p_s: 0.5 * (p_plus + p_minus),
            p_plus,
            p_minus,
            phase,
        }
    }

    /// Larger `p_s` wins; ties go to smaller `p+`, then `p-`, then phase.
    fn better(self, other: Self) -> Self {
        let key = |c: &Self| (-c.p_s, c.p_plus, c.p_minus, c.phase);
        let (a, b) = (key(&self), key(&other));
        let ord =
            a.0.total_cmp(&b.0)
                .then(a.1.total_cmp(&b.1))
                .then(a.2.total_cmp(&b.2))
                .then(a.3.total_cmp(&b.3));
        if ord.is_le() {
            self
        } else {
            other
        }
    }
}

#[derive(Clone, Copy)]
struct Sweep {
    best: Candidate,
    feasible: u64,
    evaluations: u64,
}

impl Sweep {
    fn empty() -> Self {
        Self {
            best: Candidate::none(),
            feasible: 0,
            evaluations: 0,
        }
    }

    fn merge(self, other: Self) -> Self {
        Self {
            best: self.best.better(other.best),
            feasible: self.feasible + other.feasible,
            evaluations: self.evaluations + other.evaluations,
        }
    }
}

/// Evaluates the Cartesian product of the three axes.
fn sweep(
    p_plus: &[f64],
    p_minus: &[f64],
    phases: &[(f64, f64, f64)],
    alpha: f64,
    beta: f64,
    exec: Execution,
) -> Sweep {
    exec.fold_range(
        0..p_plus.len(),
        Sweep::empty,
        |mut acc, i| {
            let pp = p_plus[i];
            for &pm in p_minus {
                let qb = (pp * pm).sqrt() * beta;
                let mut first = None;
                for &(phase, cos, sin) in phases {
                    if feasible_raw(pp, pm, qb, cos, sin, alpha) {
                        acc.feasible += 1;
                        first = Some(match first {
                            None => phase,
                            Some(f) if phase < f => phase,
                            Some(f) => f,
                        });
                    }
                }
                acc.evaluations += phases.len() as u64;
                if let Some(phase) = first {
                    acc.best = acc.best.better(Candidate::new(pp, pm, phase));
                }
            }
            acc
        },
        Sweep::merge,
    )
}

/// Like [`sweep`], then bisects each `(p+, φ)` column from its highest
/// feasible `p-` grid point toward the next one. For fixed `p+` and `φ` the
/// feasible `p-` values form an interval, so the boundary lies between them.
fn sweep_polished(
    p_plus: &[f64],
    p_minus: &[f64],
    phases: &[(f64, f64, f64)],
    alpha: f64,
    beta: f64,
    exec: Execution,
) -> Sweep {
    exec.fold_range(
        0..p_plus.len(),
        Sweep::empty,
        |mut acc, i| {
            let pp = p_plus[i];
            let ok = |pm: f64, cos: f64, sin: f64| {
                feasible_raw(pp, pm, (pp * pm).sqrt() * beta, cos, sin, alpha)
            };
            for &(phase, cos, sin) in phases {
                let mut top = None;
                for (k, &pm) in p_minus.iter().enumerate() {
                    if ok(pm, cos, sin) {
                        acc.feasible += 1;
                        top = Some(k);
                    }
                }
                acc.evaluations += p_minus.len() as u64;
                let Some(k) = top else { continue };
                let mut lo = p_minus[k];
                if let Some(&next) = p_minus.get(k + 1) {
                    let mut hi = next;
                    for _ in 0..BISECTION_STEPS {
                        let mid = 0.5 * (lo + hi);
                        if ok(mid, cos, sin) {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    acc.evaluations += BISECTION_STEPS;
                }
                acc.best = acc.best.better(Candidate::new(pp, lo, phase));
            }
            acc
        },
        Sweep::merge,
    )
}

fn phase_table(phases: impl Iterator<Item = f64>) -> Vec<(f64, f64, f64)> {
    phases
        .map(|p| {
            let p = p.rem_euclid(TAU);
            let (sin, cos) = p.sin_cos();
            (p, cos, sin)
        })
        .collect()
}

/// `points` evenly spaced values over `center ± half_width`.
fn window(center: f64, half_width: f64, points: usize) -> impl Iterator<Item = f64> {
    let mid = (points / 2) as f64;
    (0..points).map(move |t| center + (t as f64 - mid) / mid * half_width)
}

fn local_axis(center: f64, half_width: f64, points: usize) -> Vec<f64> {
    window(center, half_width, points)
        .filter(|p| (0.0..=1.0).contains(p))
        .collect()
}

fn check_overlaps(alpha_mag: f64, beta_mag: f64) -> Result<()> {
    check_unit_interval("alpha", alpha_mag)?;
    check_unit_interval("beta", beta_mag)?;
    if !(beta_mag <= alpha_mag && alpha_mag < 1.0) {
        return Err(Error::Domain(format!(
            "requires 0 <= beta <= alpha < 1, got alpha = {alpha_mag}, beta = {beta_mag}"
        )));
    }
    Ok(())
}

pub fn maximize(alpha_mag: f64, beta_mag: f64, config: &OracleConfig) -> Result<OracleResult> {
    maximize_with(alpha_mag, beta_mag, config, Execution::default())
}

pub fn maximize_with(
    alpha_mag: f64,
    beta_mag: f64,
    config: &OracleConfig,
    exec: Execution,
) -> Result<OracleResult> {
    check_overlaps(alpha_mag, beta_mag)?;
    config.validate()?;

    let g = config.grid_points;
    let axis: Vec<f64> = (0..g).map(|i| i as f64 / (g - 1) as f64).collect();
    let phases = phase_table((0..config.phase_points).map(|k| k as f64 * config.phase_step()));
    // (0, 0) is always feasible, so the incumbent is never empty.
    let mut total = sweep(&axis, &axis, &phases, alpha_mag, beta_mag, exec);

    let mut half = REFINE_INITIAL_HALF_WIDTH * config.grid_step();
    let mut phase_half = REFINE_INITIAL_HALF_WIDTH * config.phase_step();
    for _ in 0..config.refine_rounds {
        for _ in 0..REFINE_MAX_MOVES {
            let inc = total.best;
            let local = sweep_polished(
                &local_axis(inc.p_plus, half, REFINE_POINTS),
                &local_axis(inc.p_minus, half, REFINE_POINTS),
                &phase_table(window(inc.phase, phase_half, REFINE_PHASE_POINTS)),
                alpha_mag,
                beta_mag,
                exec,
            );
            total = total.merge(local);
            if total.best.p_s <= inc.p_s {
                break;
            }
        }
        half /= REFINE_SHRINK;
        phase_half /= REFINE_SHRINK;
    }

    let best = total.best;
    Ok(OracleResult {
        best_p_s: best.p_s,
        best_params: OracleParams {
            p_plus: best.p_plus,
            p_minus: best.p_minus,
            rel_phase: best.phase,
        },
        feasible_count: total.feasible,
        evaluations: total.evaluations,
        guard_best_p_s: guard_sweep(alpha_mag, beta_mag, exec),
    })
}

/// Coarse search that also lets `|Q|` drop below `√(P+ P-)`.
fn guard_sweep(alpha: f64, beta: f64, exec: Execution) -> f64 {
    let axis: Vec<f64> = (0..GUARD_GRID)
        .map(|i| i as f64 / (GUARD_GRID - 1) as f64)
        .collect();
    let phases = phase_table((0..GUARD_PHASES).map(|k| k as f64 * TAU / GUARD_PHASES as f64));
    exec.fold_range(
        0..GUARD_GRID,
        || f64::NEG_INFINITY,
        |mut best, i| {
            let pp = axis[i];
            for &pm in &axis {
                let qmax = (pp * pm).sqrt();
                let hit = (0..GUARD_MODULI).any(|s| {
                    let qb = qmax * s as f64 / (GUARD_MODULI - 1) as f64 * beta;
                    phases
                        .iter()
                        .any(|&(_, cos, sin)| feasible_raw(pp, pm, qb, cos, sin, alpha))
                });
                if hit {
                    best = best.max(0.5 * (pp + pm));
                }
            }
            best
        },
        f64::max,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::separation::separation_bound;

    #[test]
    fn feasible_examples() {
        assert!(feasible(0.5, 0.5, 0.0, 0.5, 0.0));
        assert!(!feasible(1.0, 1.0, 0.0, 0.5, 0.0));
        // (2/3)^2 = (0.8 - 0.4/3)^2 = 4/9
        let third = 1.0 / 3.0;
        assert!(feasible(third, third, 0.0, 0.8, 0.4));
        assert!(!feasible(third + 1e-6, third + 1e-6, 0.0, 0.8, 0.4));
        // Misaligned phase makes the same point infeasible.
        assert!(!feasible(third, third, 1.0, 0.8, 0.4));
    }

    #[test]
    fn config_validation() {
        assert!(OracleConfig::default().validate().is_ok());
        let bad = OracleConfig {
            grid_points: 8,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = OracleConfig {
            phase_points: 4,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(maximize(0.3, 0.5, &OracleConfig::default()).is_err());
        assert!(maximize(1.0, 0.5, &OracleConfig::default()).is_err());
    }

    #[test]
    fn maximize_examples() {
        let cfg = OracleConfig::default();
        let r = maximize(0.5, 0.0, &cfg).unwrap();
        assert!(r.best_p_s >= 0.499 && r.best_p_s <= 0.5 + 1e-9, "{r:?}");

        let r = maximize(0.6, 0.6, &cfg).unwrap();
        assert!(r.best_p_s >= 0.999 && r.best_p_s <= 1.0 + 1e-9, "{r:?}");

        let r = maximize(0.8, 0.4, &cfg).unwrap();
        let third = 1.0 / 3.0;
        assert!(
            r.best_p_s >= third - 1e-3 && r.best_p_s <= third + 1e-9,
            "{r:?}"
        );
        assert!(r.guard_best_p_s <= third + 1e-9);
        assert!((r.best_params.p_plus - r.best_params.p_minus).abs() <= 2.0 * cfg.grid_step());
        let phase = r.best_params.rel_phase;
        let dist = phase.min(TAU - phase);
        assert!(dist <= cfg.phase_step(), "phase {phase}");
    }

    #[test]
    fn evaluation_count_is_exhaustive() {
        let cfg = OracleConfig {
            grid_points: 16,
            refine_rounds: 0,
            phase_points: 8,
        };
        let r = maximize(0.5, 0.2, &cfg).unwrap();
        assert_eq!(r.evaluations, 16 * 16 * 8);
        let brute = (0..16)
            .flat_map(|i| (0..16).flat_map(move |j| (0..8).map(move |k| (i, j, k))))
            .filter(|&(i, j, k)| {
                feasible(
                    i as f64 / 15.0,
                    j as f64 / 15.0,
                    k as f64 * TAU / 8.0,
                    0.5,
                    0.2,
                )
            })
            .count();
        assert_eq!(r.feasible_count, brute as u64);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let cfg = OracleConfig {
            grid_points: 64,
            ..Default::default()
        };
        for (a, b) in [(0.5, 0.0), (0.8, 0.4), (0.3, 0.1)] {
            let s = maximize_with(a, b, &cfg, Execution::Sequential).unwrap();
            let p = maximize_with(a, b, &cfg, Execution::Parallel).unwrap();
            assert_eq!(s, p);
        }
    }

    #[test]
    fn refinement_tightens_the_gap() {
        let bound = separation_bound(0.7, 0.2).unwrap();
        let coarse = OracleConfig {
            refine_rounds: 0,
            ..Default::default()
        };
        let a = maximize(0.7, 0.2, &coarse).unwrap();
        let b = maximize(0.7, 0.2, &OracleConfig::default()).unwrap();
        assert!(b.best_p_s >= a.best_p_s);
        assert!(bound - b.best_p_s < bound - a.best_p_s || a.best_p_s == bound);
        assert!(b.best_p_s <= bound + 1e-9);
    }

    #[test]
    fn fine_grid_resolves_flat_ridge() {
        let cfg = OracleConfig {
            grid_points: 2000,
            ..Default::default()
        };
        let r = maximize(0.5, 0.0, &cfg).unwrap();
        let gap = r.best_p_s - 0.5;
        assert!((-1e-5..=1e-9).contains(&gap), "gap {gap}");
    }
}
