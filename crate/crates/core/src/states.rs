//! Pure states, equiprobable state pairs and the geometry of their span.

use crate::error::{Error, Result};
use crate::numerics::{c, inner_product, tensor_product, ComplexVector, C64};

/// Accepted deviation of `‖ψ‖` from one.
pub const NORM_TOL: f64 = 1e-10;

/// Pairs with `|overlap|` at or above this are treated as linearly dependent.
pub const PARALLEL_THRESHOLD: f64 = 1.0 - 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    vec: ComplexVector,
}

impl PureState {
    /// Wraps a vector that is already unit norm.
    pub fn new(vec: ComplexVector) -> Result<Self> {
        let norm = vec.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { vec })
    }

    pub fn normalize(vec: ComplexVector) -> Result<Self> {
        Ok(Self {
            vec: vec.normalized()?,
        })
    }

    pub fn from_amplitudes(amps: &[C64]) -> Result<Self> {
        Self::new(ComplexVector::new(amps.to_vec())?)
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        Ok(Self {
            vec: ComplexVector::basis(dim, index)?,
        })
    }

    pub fn vector(&self) -> &ComplexVector {
        &self.vec
    }

    pub fn dim(&self) -> usize {
        self.vec.dim()
    }

    /// Same physical state times `e^{i phase}`.
    pub fn with_phase(&self, phase: f64) -> Self {
        Self {
            vec: self.vec.scale(C64::from_polar(1.0, phase)),
        }
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        Ok(Self {
            vec: tensor_product(&self.vec, &other.vec)?,
        })
    }

    /// `self^{⊗ copies}`; `copies == 0` yields the one-dimensional unit state.
    pub fn power(&self, copies: usize) -> Result<PureState> {
        let mut out = PureState {
            vec: ComplexVector::from_real(&[1.0])?,
        };
        for _ in 0..copies {
            out = out.tensor(self)?;
        }
        Ok(out)
    }

    pub fn overlap(&self, other: &PureState) -> Result<C64> {
        inner_product(&self.vec, &other.vec)
    }
}

/// Two pure states with equal prior probability.
#[derive(Clone, Debug, PartialEq)]
pub struct StatePair {
    plus: PureState,
    minus: PureState,
    overlap: C64,
}

pub fn make_pair(plus: PureState, minus: PureState) -> Result<StatePair> {
    StatePair::new(plus, minus)
}

impl StatePair {
    pub fn new(plus: PureState, minus: PureState) -> Result<Self> {
        // Re-validate in case the states were built by hand from raw vectors.
        let plus = PureState::new(plus.vec)?;
        let minus = PureState::new(minus.vec)?;
        let overlap = plus.overlap(&minus)?;
        Ok(Self {
            plus,
            minus,
            overlap,
        })
    }

    /// `|0⟩` and `cos θ|0⟩ + sin θ|1⟩` embedded in `dim` dimensions.
    pub fn from_angle(theta: f64, dim: usize) -> Result<Self> {
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
            return Err(Error::Domain(format!(
                "angle must lie in [0, pi/2], got {theta}"
            )));
        }
        if dim < 2 {
            return Err(Error::Domain(format!("dimension must be >= 2, got {dim}")));
        }
        let plus = PureState::basis(dim, 0)?;
        let mut amps = vec![C64::default(); dim];
        amps[0] = c(theta.cos(), 0.0);
        amps[1] = c(theta.sin(), 0.0);
        let minus = PureState::normalize(ComplexVector::new(amps)?)?;
        Self::new(plus, minus)
    }

    /// Canonical two-dimensional pair with real overlap `magnitude`.
    pub fn with_overlap(magnitude: f64) -> Result<Self> {
        crate::error::check_unit_interval("overlap", magnitude)?;
        let plus = PureState::basis(2, 0)?;
        let minus = PureState::new(ComplexVector::from_real(&[
            magnitude,
            (1.0 - magnitude * magnitude).max(0.0).sqrt(),
        ])?)?;
        let mut pair = Self::new(plus, minus)?;
        // Pin the cached value so powers of an overlap stay exact.
        pair.overlap = c(magnitude, 0.0);
        Ok(pair)
    }

    pub fn plus(&self) -> &PureState {
        &self.plus
    }

    pub fn minus(&self) -> &PureState {
        &self.minus
    }

    pub fn overlap(&self) -> C64 {
        self.overlap
    }

    pub fn overlap_magnitude(&self) -> f64 {
        self.overlap.norm()
    }

    pub fn dim(&self) -> usize {
        self.plus.dim()
    }

    /// Rephases the minus state so the overlap is real and non-negative.
    pub fn canonicalize(&self) -> StatePair {
        let mag = self.overlap.norm();
        if mag == 0.0 || (self.overlap.im == 0.0 && self.overlap.re > 0.0) {
            return self.clone();
        }
        let minus = self.minus.with_phase(-self.overlap.arg());
        StatePair {
            plus: self.plus.clone(),
            minus,
            overlap: c(mag, 0.0),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.overlap.im == 0.0 && self.overlap.re >= 0.0
    }

    fn check_independent(&self) -> Result<()> {
        let overlap = self.overlap_magnitude();
        if overlap >= PARALLEL_THRESHOLD {
            return Err(Error::Parallel { overlap });
        }
        Ok(())
    }

    /// Orthonormal basis of the span, Gram-Schmidt with the plus state first.
    pub fn span_basis(&self) -> Result<SpanBasis> {
        self.check_independent()?;
        let e0 = self.plus.vec.clone();
        let e1 = self
            .minus
            .vec
            .axpy(-self.overlap, &self.plus.vec)?
            .normalized()?;
        Ok(SpanBasis { e0, e1 })
    }

    /// States in the span orthogonal to the opposite member of the pair.
    pub fn reciprocal_states(&self) -> Result<ReciprocalPair> {
        self.check_independent()?;
        let perp_plus =
            PureState::normalize(self.plus.vec.axpy(-self.overlap.conj(), &self.minus.vec)?)?;
        let perp_minus = PureState::normalize(self.minus.vec.axpy(-self.overlap, &self.plus.vec)?)?;
        let denom_plus = perp_plus.overlap(&self.plus)?;
        let denom_minus = perp_minus.overlap(&self.minus)?;
        Ok(ReciprocalPair {
            perp_plus,
            perp_minus,
            denom_plus,
            denom_minus,
        })
    }
}

pub fn canonicalize(pair: &StatePair) -> StatePair {
    pair.canonicalize()
}

pub fn angle_pair(theta: f64, dim: usize) -> Result<StatePair> {
    StatePair::from_angle(theta, dim)
}

pub fn reciprocal_states(pair: &StatePair) -> Result<ReciprocalPair> {
    pair.reciprocal_states()
}

#[derive(Clone, Debug)]
pub struct ReciprocalPair {
    /// Orthogonal to the minus state.
    pub perp_plus: PureState,
    /// Orthogonal to the plus state.
    pub perp_minus: PureState,
    /// `⟨perp_plus|plus⟩`
    pub denom_plus: C64,
    /// `⟨perp_minus|minus⟩`
    pub denom_minus: C64,
}

/// Orthonormal basis `{e0, e1}` of a pair's two-dimensional span.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    pub e0: ComplexVector,
    pub e1: ComplexVector,
}

impl SpanBasis {
    pub fn ambient_dim(&self) -> usize {
        self.e0.dim()
    }

    /// Coordinates of `v` in this basis; components outside the span are dropped.
    pub fn coords(&self, v: &ComplexVector) -> Result<ComplexVector> {
        ComplexVector::new(vec![
            inner_product(&self.e0, v)?,
            inner_product(&self.e1, v)?,
        ])
    }

    pub fn embed(&self, coords: &ComplexVector) -> Result<ComplexVector> {
        if coords.dim() != 2 {
            return Err(Error::DimensionMismatch {
                left: coords.dim(),
                right: 2,
            });
        }
        let z = coords.entries();
        self.e0.scale(z[0]).axpy(z[1], &self.e1)
    }

    /// `‖v - P v‖` where `P` projects onto the span.
    pub fn projection_residual(&self, v: &ComplexVector) -> Result<f64> {
        let back = self.embed(&self.coords(v)?)?;
        Ok(v.axpy(c(-1.0, 0.0), &back)?.norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn state(xs: &[(f64, f64)]) -> PureState {
        PureState::normalize(
            ComplexVector::new(xs.iter().map(|&(r, i)| c(r, i)).collect()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn make_pair_examples() {
        let a = PureState::basis(2, 0).unwrap();
        let b = PureState::basis(2, 1).unwrap();
        assert_eq!(make_pair(a.clone(), b).unwrap().overlap(), c(0.0, 0.0));
        assert_eq!(
            make_pair(a.clone(), a.clone()).unwrap().overlap(),
            c(1.0, 0.0)
        );
        let t = FRAC_PI_3;
        let b = state(&[(t.cos(), 0.0), (t.sin(), 0.0)]);
        assert_abs_diff_eq!(make_pair(a, b).unwrap().overlap().re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn make_pair_rejects_bad_input() {
        let raw = ComplexVector::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(
            PureState::new(raw),
            Err(Error::NotNormalized { .. })
        ));
        let a = PureState::basis(2, 0).unwrap();
        let b = PureState::basis(3, 0).unwrap();
        assert!(matches!(
            make_pair(a, b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn canonicalize_examples() {
        let a = PureState::basis(2, 0).unwrap();
        let half = make_pair(a.clone(), state(&[(0.5, 0.0), (0.75f64.sqrt(), 0.0)])).unwrap();
        assert_eq!(canonicalize(&half), half);

        let neg = make_pair(a.clone(), state(&[(-0.5, 0.0), (0.75f64.sqrt(), 0.0)])).unwrap();
        let fixed = canonicalize(&neg);
        assert_abs_diff_eq!(fixed.overlap().re, 0.5, epsilon = 1e-15);
        assert_eq!(fixed.overlap().im, 0.0);

        let z = C64::from_polar(0.3, FRAC_PI_4);
        let rest = (1.0 - 0.09f64).sqrt();
        let tilted = make_pair(a, state(&[(z.re, z.im), (rest, 0.0)])).unwrap();
        let fixed = canonicalize(&tilted);
        // Re-evaluate from the stored vectors rather than trusting the cache.
        let fresh = fixed.plus().overlap(fixed.minus()).unwrap();
        assert_abs_diff_eq!(fresh.re, 0.3, epsilon = 1e-15);
        assert!(fresh.im.abs() < 1e-15);
        assert_abs_diff_eq!(fixed.overlap().re, 0.3, epsilon = 1e-15);
    }

    #[test]
    fn angle_pair_examples() {
        assert!(angle_pair(FRAC_PI_2, 2).unwrap().overlap().norm() < 1e-16);
        assert_eq!(angle_pair(0.0, 2).unwrap().overlap(), c(1.0, 0.0));
        assert_abs_diff_eq!(
            angle_pair(FRAC_PI_3, 5).unwrap().overlap().re,
            0.5,
            epsilon = 1e-15
        );
        assert!(angle_pair(-0.1, 2).is_err());
        assert!(angle_pair(2.0, 2).is_err());
        assert!(angle_pair(0.5, 1).is_err());
    }

    #[test]
    fn reciprocal_examples() {
        let orth = angle_pair(FRAC_PI_2, 2).unwrap();
        let r = reciprocal_states(&orth).unwrap();
        assert_abs_diff_eq!(
            r.perp_plus.overlap(orth.plus()).unwrap().norm(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            r.perp_minus.overlap(orth.minus()).unwrap().norm(),
            1.0,
            epsilon = 1e-15
        );

        let half = angle_pair(FRAC_PI_3, 3).unwrap();
        let r = reciprocal_states(&half).unwrap();
        assert_abs_diff_eq!(r.denom_plus.norm(), 0.75f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.denom_minus.norm(), 0.75f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.perp_plus.vector().norm(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(r.perp_minus.vector().norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn reciprocal_rejects_parallel() {
        let same = angle_pair(0.0, 2).unwrap();
        assert!(matches!(
            reciprocal_states(&same),
            Err(Error::Parallel { .. })
        ));
        assert!(same.span_basis().is_err());
    }

    #[test]
    fn power_builds_products() {
        let s = angle_pair(0.7, 2).unwrap();
        let p3 = s.minus().power(3).unwrap();
        assert_eq!(p3.dim(), 8);
        let q3 = s.plus().power(3).unwrap();
        assert_abs_diff_eq!(
            p3.overlap(&q3).unwrap().re,
            0.7f64.cos().powi(3),
            epsilon = 1e-15
        );
        assert_eq!(s.plus().power(0).unwrap().dim(), 1);
    }

    fn arb_pair() -> impl Strategy<Value = StatePair> {
        (
            proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 3),
            proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 3),
        )
            .prop_filter_map("degenerate", |(a, b)| {
                let a = PureState::normalize(
                    ComplexVector::new(a.iter().map(|&(r, i)| c(r, i)).collect()).ok()?,
                )
                .ok()?;
                let b = PureState::normalize(
                    ComplexVector::new(b.iter().map(|&(r, i)| c(r, i)).collect()).ok()?,
                )
                .ok()?;
                let p = make_pair(a, b).ok()?;
                (p.overlap_magnitude() < 0.999).then_some(p)
            })
    }

    proptest! {
        #[test]
        fn canonicalize_is_idempotent(p in arb_pair()) {
            let once = p.canonicalize();
            let twice = once.canonicalize();
            prop_assert_eq!(&once, &twice);
            prop_assert!((once.overlap_magnitude() - p.overlap_magnitude()).abs() <= 1e-12);
            let fresh = once.plus().overlap(once.minus()).unwrap();
            prop_assert!((fresh - once.overlap()).norm() <= 1e-12);
            prop_assert!(once.is_canonical());
        }

        #[test]
        fn reciprocal_states_are_orthogonal_and_in_span(p in arb_pair()) {
            let r = p.reciprocal_states().unwrap();
            prop_assert!(r.perp_plus.overlap(p.minus()).unwrap().norm() <= 1e-10);
            prop_assert!(r.perp_minus.overlap(p.plus()).unwrap().norm() <= 1e-10);
            let basis = p.span_basis().unwrap();
            prop_assert!(basis.projection_residual(r.perp_plus.vector()).unwrap() <= 1e-10);
            prop_assert!(basis.projection_residual(r.perp_minus.vector()).unwrap() <= 1e-10);
            let expect = (1.0 - p.overlap_magnitude().powi(2)).sqrt();
            prop_assert!((r.denom_plus.norm() - expect).abs() <= 1e-10);
        }

        #[test]
        fn angle_pair_overlap_is_cosine(theta in 0.0..=FRAC_PI_2) {
            let p = angle_pair(theta, 2).unwrap();
            prop_assert!((p.overlap().re - theta.cos()).abs() <= 1e-12);
        }
    }
}
