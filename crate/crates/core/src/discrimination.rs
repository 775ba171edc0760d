//! Unambiguous and minimum-error discrimination of two equiprobable states,
//! and the family of strategies that separates first and then measures.

use crate::error::{check_unit_interval, Error, Result};
use crate::numerics::{
    c, hermitian_eigensystem, inner_product, pure_density, ComplexMatrix, ComplexVector,
};
use crate::separation::separation_bound;
use crate::states::{StatePair, PARALLEL_THRESHOLD};

/// Correct, wrong and inconclusive probabilities of a discrimination strategy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscriminationOutcomeRates {
    pub p_d: f64,
    pub p_e: f64,
    pub p_i: f64,
}

impl DiscriminationOutcomeRates {
    pub fn total(&self) -> f64 {
        self.p_d + self.p_e + self.p_i
    }
}

/// Zero-error identification limit `1 - |α|`.
pub fn idp_bound(alpha_mag: f64) -> Result<f64> {
    check_unit_interval("alpha", alpha_mag)?;
    Ok(1.0 - alpha_mag)
}

/// Minimum-error identification limit `½(1 + √(1 - |α|²))`.
pub fn helstrom_bound(alpha_mag: f64) -> Result<f64> {
    check_unit_interval("alpha", alpha_mag)?;
    Ok(0.5 * (1.0 + (1.0 - alpha_mag * alpha_mag).sqrt()))
}

/// Orthogonal projectors of the optimal minimum-error measurement, in the
/// span coordinates of the measured pair.
#[derive(Clone, Debug)]
pub struct HelstromMeasurement {
    pub proj_plus: ComplexMatrix,
    pub proj_minus: ComplexMatrix,
}

impl HelstromMeasurement {
    /// Probability of answering "plus" for a state with span coordinates `coords`.
    pub fn prob_plus(&self, coords: &ComplexVector) -> Result<f64> {
        let image = self.proj_plus.apply(coords)?;
        Ok(inner_product(coords, &image)?.re.clamp(0.0, 1.0))
    }

    /// Average probability of a correct answer on `pair`.
    pub fn success_probability(&self, pair: &StatePair) -> Result<f64> {
        let basis = pair.span_basis()?;
        let plus = basis.coords(pair.plus().vector())?;
        let minus = basis.coords(pair.minus().vector())?;
        let hit_plus = self.prob_plus(&plus)?;
        let hit_minus = 1.0 - self.prob_plus(&minus)?;
        Ok(0.5 * (hit_plus + hit_minus))
    }
}

/// Projects onto the positive and negative eigenspaces of
/// `½(|ψ+⟩⟨ψ+| - |ψ-⟩⟨ψ-|)` restricted to the pair's span.
pub fn build_helstrom_measurement(pair: &StatePair) -> Result<HelstromMeasurement> {
    let overlap = pair.overlap_magnitude();
    if overlap >= PARALLEL_THRESHOLD {
        return Err(Error::Parallel { overlap });
    }
    let basis = pair.span_basis()?;
    let plus = basis.coords(pair.plus().vector())?;
    let minus = basis.coords(pair.minus().vector())?;
    let diff = (&pure_density(&plus) - &pure_density(&minus)).scale(c(0.5, 0.0));
    // Eigenvalues are ±½√(1 - |α|²), nonzero for independent states.
    let pairs = hermitian_eigensystem(&diff)?;
    let proj_plus = pure_density(&pairs[0].vector);
    let proj_minus = pure_density(&pairs[1].vector);
    Ok(HelstromMeasurement {
        proj_plus,
        proj_minus,
    })
}

/// Separate to overlap `beta_mag` at the optimal rate, then measure the
/// outputs with the minimum-error measurement.
pub fn interpolated_rates(alpha_mag: f64, beta_mag: f64) -> Result<DiscriminationOutcomeRates> {
    check_unit_interval("alpha", alpha_mag)?;
    check_unit_interval("beta", beta_mag)?;
    if !(beta_mag <= alpha_mag && alpha_mag < 1.0) {
        return Err(Error::Domain(format!(
            "requires 0 <= beta <= alpha < 1, got alpha = {alpha_mag}, beta = {beta_mag}"
        )));
    }
    let p_s = separation_bound(alpha_mag, beta_mag)?;
    let p_h = helstrom_bound(beta_mag)?;
    Ok(DiscriminationOutcomeRates {
        p_d: p_s * p_h,
        p_e: p_s * (1.0 - p_h),
        p_i: 1.0 - p_s,
    })
}

/// Smallest error probability compatible with success probability `p_s`
/// when the zero-error limit is `p_idp`.
pub fn error_floor(p_s: f64, p_idp: f64) -> Result<f64> {
    if !(p_idp > 0.0 && p_idp <= 1.0) {
        return Err(Error::Domain(format!(
            "p_idp must lie in (0, 1], got {p_idp}"
        )));
    }
    if !(p_s <= 1.0 && p_s >= p_idp) {
        return Err(Error::Domain(format!(
            "p_s must lie in [p_idp, 1] = [{p_idp}, 1], got {p_s}"
        )));
    }
    let excess = p_s - p_idp;
    Ok(0.5 * (p_s - (p_s * p_s - excess * excess).max(0.0).sqrt()))
}
