//! Exact probabilistic cloning as a separation problem.
//!
//! Producing `N` copies from `M` maps `|ψ±⟩^{⊗M}|χ⟩` onto `|ψ±⟩^{⊗N}`, so the
//! overlap goes from `α^M` to `α^N`. Tasks can be built in two ways:
//!
//! - [`TaskMode::Gram`] keeps only the overlaps and works for any `N`;
//! - [`TaskMode::Materialized`] builds the tensor products explicitly (capped
//!   at [`DIMENSION_CAP`]) and exists to validate the Gram representation.

use crate::error::{Error, Result};
use crate::numerics::DIMENSION_CAP;
use crate::separation::SeparationTask;
use crate::states::{PureState, StatePair};

/// `N`-from-`M` cloning of a state drawn from `base`.
#[derive(Clone, Debug)]
pub struct CloningTask {
    base: StatePair,
    m: usize,
    n: usize,
    blank: Option<PureState>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TaskMode {
    #[default]
    Gram,
    Materialized,
}

impl CloningTask {
    pub fn new(base: StatePair, m: usize, n: usize) -> Result<Self> {
        check_copies(m, n)?;
        Ok(Self {
            base,
            m,
            n,
            blank: None,
        })
    }

    /// Uses `blank` for the `n - m` empty subsystems instead of `|0⟩^{⊗(n-m)}`.
    pub fn with_blank(mut self, blank: PureState) -> Result<Self> {
        let expected = self
            .base
            .dim()
            .checked_pow((self.n - self.m) as u32)
            .ok_or(Error::DimensionCap {
                dim: usize::MAX,
                cap: DIMENSION_CAP,
            })?;
        if blank.dim() != expected {
            return Err(Error::DimensionMismatch {
                left: blank.dim(),
                right: expected,
            });
        }
        self.blank = Some(blank);
        Ok(self)
    }

    pub fn base(&self) -> &StatePair {
        &self.base
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bound(&self) -> Result<f64> {
        mn_cloning_bound(self.base.overlap_magnitude(), self.m, self.n)
    }

    fn blank_state(&self) -> Result<PureState> {
        match &self.blank {
            Some(b) => Ok(b.clone()),
            None => PureState::basis(self.base.dim(), 0)?.power(self.n - self.m),
        }
    }
}

fn check_copies(m: usize, n: usize) -> Result<()> {
    if m < 1 || n < m {
        return Err(Error::Domain(format!(
            "copy numbers must satisfy 1 <= m <= n, got m = {m}, n = {n}"
        )));
    }
    Ok(())
}

fn check_alpha(alpha_mag: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha_mag) {
        return Err(Error::Domain(format!(
            "alpha must lie in [0, 1), got {alpha_mag}"
        )));
    }
    Ok(())
}

/// One-to-two cloning limit `1 / (1 + |α|)`.
pub fn duan_guo_bound(alpha_mag: f64) -> Result<f64> {
    check_alpha(alpha_mag)?;
    Ok(1.0 / (1.0 + alpha_mag))
}

/// `(1 - |α|^m) / (1 - |α|^n)`
pub fn mn_cloning_bound(alpha_mag: f64, m: usize, n: usize) -> Result<f64> {
    check_alpha(alpha_mag)?;
    check_copies(m, n)?;
    if m == n {
        return Ok(1.0);
    }
    Ok((1.0 - alpha_mag.powi(m as i32)) / (1.0 - alpha_mag.powi(n as i32)))
}

/// Zero-error identification limit with `k` copies, `1 - |α|^k`.
pub fn discrimination_limit(alpha_mag: f64, k: usize) -> Result<f64> {
    check_alpha(alpha_mag)?;
    Ok(1.0 - alpha_mag.powi(k as i32))
}

pub fn as_separation_task(task: &CloningTask, mode: TaskMode) -> Result<SeparationTask> {
    match mode {
        TaskMode::Gram => {
            let a = task.base.overlap_magnitude();
            SeparationTask::from_overlaps(a.powi(task.m as i32), a.powi(task.n as i32))
        }
        TaskMode::Materialized => {
            let dim = (task.base.dim() as u128).pow(task.n as u32);
            if dim > DIMENSION_CAP as u128 {
                return Err(Error::Domain(format!(
                    "materialized cloning task needs dimension {dim} > {DIMENSION_CAP}; use Gram mode"
                )));
            }
            let blank = task.blank_state()?;
            let copies = |s: &PureState, k: usize| s.power(k);
            let initial = StatePair::new(
                copies(task.base.plus(), task.m)?.tensor(&blank)?,
                copies(task.base.minus(), task.m)?.tensor(&blank)?,
            )?;
            let target = StatePair::new(
                copies(task.base.plus(), task.n)?,
                copies(task.base.minus(), task.n)?,
            )?;
            SeparationTask::new(&initial, &target)
        }
    }
}

/// `P_1N - P_IDP`: how far one-to-`n` cloning stays above unambiguous
/// discrimination. Evaluated as `(1 - α) α^n / (1 - α^n)`.
pub fn idp_limit_gap(alpha_mag: f64, n: usize) -> Result<f64> {
    check_alpha(alpha_mag)?;
    check_copies(1, n)?;
    let an = alpha_mag.powi(n as i32);
    Ok((1.0 - alpha_mag) * an / (1.0 - an))
}

/// `P_M∞ - P_MN · P_N∞`, which vanishes for the optimal bounds.
pub fn compound_consistency_residual(alpha_mag: f64, m: usize, n: usize) -> Result<f64> {
    let direct = discrimination_limit(alpha_mag, m)?;
    let via_clones = mn_cloning_bound(alpha_mag, m, n)? * discrimination_limit(alpha_mag, n)?;
    Ok(direct - via_clones)
}
