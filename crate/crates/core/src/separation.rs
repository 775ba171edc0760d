//! Optimal probabilistic separation of two equiprobable pure states.
//!
//! A separation maps `|ψ¹±⟩` onto `|ψ²±⟩` with `|β| ≤ |α|`, where `α` and
//! `β` are the initial and target overlaps. Success happens with probability
//! at most `(1 - |α|) / (1 - |β|)`; [`build_optimal_operation`] constructs a
//! single-process operation that reaches it.
//!
//! Operators are stored as 2x2 matrices in orthonormal bases of the input and
//! output spans (see [`crate::states::SpanBasis`]). The ambient-space
//! expansion helpers exist for cross-checks only.

use crate::error::{check_unit_interval, Error, Result};
use crate::numerics::{
    c, hermitian_eigensystem, inner_product, psd_sqrt, pure_density, trace_distance, ComplexMatrix,
    ComplexVector, C64,
};
use crate::states::{SpanBasis, StatePair, PARALLEL_THRESHOLD};

/// Tolerance on constructed operators (completeness, action on the states).
pub const CONSTRUCTION_TOL: f64 = 1e-10;

/// Tolerance on quantities derived from constructed operators.
pub const DERIVED_TOL: f64 = 1e-9;

/// Tolerance on density-matrix level checks.
pub const DENSITY_TOL: f64 = 1e-8;

/// Smallest branch failure probability for which a failure state is defined.
pub const MIN_FAILURE_PROBABILITY: f64 = 1e-12;

/// Largest success probability for separating overlaps `alpha_mag -> beta_mag`.
///
/// Clamped to 1 when the target is no closer to orthogonal than the input.
pub fn separation_bound(alpha_mag: f64, beta_mag: f64) -> Result<f64> {
    check_unit_interval("alpha", alpha_mag)?;
    check_unit_interval("beta", beta_mag)?;
    if alpha_mag == 1.0 && beta_mag == 1.0 {
        return Err(Error::Domain(
            "alpha = beta = 1: identical states cannot be separated".into(),
        ));
    }
    if beta_mag >= alpha_mag {
        return Ok(1.0);
    }
    Ok(((1.0 - alpha_mag) / (1.0 - beta_mag)).min(1.0))
}

/// Bounds for `1 -> 2`, `2 -> 3` and the direct `1 -> 3` separation.
pub fn compose_bounds(alpha_mag: f64, beta_mag: f64, gamma_mag: f64) -> Result<(f64, f64, f64)> {
    if !(1.0 >= alpha_mag && alpha_mag >= beta_mag && beta_mag >= gamma_mag && gamma_mag >= 0.0) {
        return Err(Error::Domain(format!(
            "overlaps must satisfy 1 >= alpha >= beta >= gamma >= 0, got ({alpha_mag}, {beta_mag}, {gamma_mag})"
        )));
    }
    if alpha_mag >= 1.0 {
        return Err(Error::Domain("alpha must be < 1".into()));
    }
    Ok((
        separation_bound(alpha_mag, beta_mag)?,
        separation_bound(beta_mag, gamma_mag)?,
        separation_bound(alpha_mag, gamma_mag)?,
    ))
}

/// An initial and a target pair, both canonicalized so `α, β ≥ 0`.
#[derive(Clone, Debug)]
pub struct SeparationTask {
    initial: StatePair,
    target: StatePair,
    alpha: C64,
    beta: C64,
    in_basis: SpanBasis,
    out_basis: SpanBasis,
    initial_coords: [ComplexVector; 2],
    target_coords: [ComplexVector; 2],
}

impl SeparationTask {
    pub fn new(initial: &StatePair, target: &StatePair) -> Result<Self> {
        let initial = initial.canonicalize();
        let target = target.canonicalize();
        for pair in [&initial, &target] {
            if pair.overlap_magnitude() >= PARALLEL_THRESHOLD {
                return Err(Error::Parallel {
                    overlap: pair.overlap_magnitude(),
                });
            }
        }
        let in_basis = initial.span_basis()?;
        let out_basis = target.span_basis()?;
        let initial_coords = [
            in_basis.coords(initial.plus().vector())?,
            in_basis.coords(initial.minus().vector())?,
        ];
        let target_coords = [
            out_basis.coords(target.plus().vector())?,
            out_basis.coords(target.minus().vector())?,
        ];
        Ok(Self {
            alpha: initial.overlap(),
            beta: target.overlap(),
            initial,
            target,
            in_basis,
            out_basis,
            initial_coords,
            target_coords,
        })
    }

    /// Task on two-dimensional representatives with the given real overlaps.
    pub fn from_overlaps(alpha_mag: f64, beta_mag: f64) -> Result<Self> {
        Self::new(
            &StatePair::with_overlap(alpha_mag)?,
            &StatePair::with_overlap(beta_mag)?,
        )
    }

    pub fn initial(&self) -> &StatePair {
        &self.initial
    }

    pub fn target(&self) -> &StatePair {
        &self.target
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    pub fn alpha_mag(&self) -> f64 {
        self.alpha.norm()
    }

    pub fn beta_mag(&self) -> f64 {
        self.beta.norm()
    }

    /// False when the target is less distinguishable than the input.
    pub fn is_proper(&self) -> bool {
        self.beta_mag() <= self.alpha_mag()
    }

    pub fn bound(&self) -> Result<f64> {
        separation_bound(self.alpha_mag(), self.beta_mag())
    }

    pub fn input_basis(&self) -> &SpanBasis {
        &self.in_basis
    }

    pub fn output_basis(&self) -> &SpanBasis {
        &self.out_basis
    }

    /// Span coordinates of `|ψ¹+⟩`, `|ψ¹-⟩`.
    pub fn initial_coords(&self) -> &[ComplexVector; 2] {
        &self.initial_coords
    }

    /// Span coordinates of `|ψ²+⟩`, `|ψ²-⟩`.
    pub fn target_coords(&self) -> &[ComplexVector; 2] {
        &self.target_coords
    }
}

/// Success and failure operators of a single-process separation.
#[derive(Clone, Debug)]
pub struct TwoOutcomeOperation {
    a_s: ComplexMatrix,
    a_f: ComplexMatrix,
    mu_plus: C64,
    mu_minus: C64,
    nu_plus: f64,
    nu_minus: f64,
}

impl TwoOutcomeOperation {
    /// Completes a success operator with `A_F = U (I - A_S†A_S)^{1/2}`.
    ///
    /// `a_s` must map each initial state onto a multiple of its target.
    pub fn from_success_operator(
        task: &SeparationTask,
        a_s: ComplexMatrix,
        unitary: Option<&ComplexMatrix>,
    ) -> Result<Self> {
        if a_s.rows() != 2 || a_s.cols() != 2 {
            return Err(Error::Shape {
                rows: a_s.rows(),
                cols: a_s.cols(),
                entries: a_s.entries().len(),
            });
        }
        let mut mu = [C64::default(); 2];
        for (k, (input, target)) in task
            .initial_coords
            .iter()
            .zip(&task.target_coords)
            .enumerate()
        {
            let image = a_s.apply(input)?;
            mu[k] = inner_product(target, &image)?;
            let residual = image.max_abs_diff(&target.scale(mu[k]))?;
            if residual > CONSTRUCTION_TOL {
                return Err(Error::NotSeparating { residual });
            }
        }
        let gram = a_s.adjoint().matmul(&a_s)?;
        let slack = &ComplexMatrix::identity(2) - &gram;
        let mut a_f = psd_sqrt(&slack)?;
        if let Some(u) = unitary {
            let unitarity = u
                .adjoint()
                .matmul(u)?
                .max_abs_diff(&ComplexMatrix::identity(2))?;
            if unitarity > CONSTRUCTION_TOL {
                return Err(Error::Domain(format!(
                    "failure unitary deviates from unitarity by {unitarity:e}"
                )));
            }
            a_f = u.matmul(&a_f)?;
        }
        let nu_plus = a_f.apply(&task.initial_coords[0])?.norm();
        let nu_minus = a_f.apply(&task.initial_coords[1])?.norm();
        Ok(Self {
            a_s,
            a_f,
            mu_plus: mu[0],
            mu_minus: mu[1],
            nu_plus,
            nu_minus,
        })
    }

    /// Same operation with `A_S` multiplied by `factor` and `A_F` recomputed.
    pub fn scaled(&self, task: &SeparationTask, factor: f64) -> Result<Self> {
        Self::from_success_operator(task, self.a_s.scale(c(factor, 0.0)), None)
    }

    pub fn success_operator(&self) -> &ComplexMatrix {
        &self.a_s
    }

    pub fn failure_operator(&self) -> &ComplexMatrix {
        &self.a_f
    }

    pub fn mu_plus(&self) -> C64 {
        self.mu_plus
    }

    pub fn mu_minus(&self) -> C64 {
        self.mu_minus
    }

    /// `‖A_F|ψ¹+⟩‖`; the failure amplitude is taken real and non-negative.
    pub fn nu_plus(&self) -> f64 {
        self.nu_plus
    }

    pub fn nu_minus(&self) -> f64 {
        self.nu_minus
    }

    /// `|μ+|², |μ-|²`
    pub fn success_probabilities(&self) -> (f64, f64) {
        (self.mu_plus.norm_sqr(), self.mu_minus.norm_sqr())
    }

    /// `max |A_S†A_S + A_F†A_F - I|`
    pub fn completeness_residual(&self) -> f64 {
        let sum = &self.a_s.adjoint().matmul(&self.a_s).expect("2x2")
            + &self.a_f.adjoint().matmul(&self.a_f).expect("2x2");
        sum.max_abs_diff(&ComplexMatrix::identity(2)).expect("2x2")
    }

    /// Largest `| |μ±|² + ν±² - 1 |` over both branches.
    pub fn branch_normalization_residual(&self) -> f64 {
        let p = (self.mu_plus.norm_sqr() + self.nu_plus * self.nu_plus - 1.0).abs();
        let m = (self.mu_minus.norm_sqr() + self.nu_minus * self.nu_minus - 1.0).abs();
        p.max(m)
    }

    /// `A_S` written out in the ambient space of the task.
    pub fn ambient_success_operator(&self, task: &SeparationTask) -> Result<ComplexMatrix> {
        expand(&self.a_s, task.input_basis(), task.output_basis())
    }

    pub fn ambient_failure_operator(&self, task: &SeparationTask) -> Result<ComplexMatrix> {
        expand(&self.a_f, task.input_basis(), task.input_basis())
    }

    /// Applies `A_S` to an ambient input vector without forming the dense operator.
    pub fn apply_success(&self, task: &SeparationTask, v: &ComplexVector) -> Result<ComplexVector> {
        let coords = task.input_basis().coords(v)?;
        task.output_basis().embed(&self.a_s.apply(&coords)?)
    }

    pub fn apply_failure(&self, task: &SeparationTask, v: &ComplexVector) -> Result<ComplexVector> {
        let coords = task.input_basis().coords(v)?;
        task.input_basis().embed(&self.a_f.apply(&coords)?)
    }
}

fn expand(m: &ComplexMatrix, input: &SpanBasis, output: &SpanBasis) -> Result<ComplexMatrix> {
    let ins = [&input.e0, &input.e1];
    let outs = [&output.e0, &output.e1];
    let mut dense = ComplexMatrix::zeros(output.ambient_dim(), input.ambient_dim());
    for (i, out) in outs.iter().enumerate() {
        for (j, inp) in ins.iter().enumerate() {
            let term = ComplexMatrix::outer(out, inp).scale(m.get(i, j));
            dense = &dense + &term;
        }
    }
    ComplexMatrix::new(dense.rows(), dense.cols(), dense.entries().to_vec())
}

/// The success operator `√P Σ_r |ψ²_r⟩⟨ψ¹⊥_r| / ⟨ψ¹⊥_r|ψ¹_r⟩` completed with
/// the identity as failure unitary.
pub fn build_optimal_operation(task: &SeparationTask) -> Result<TwoOutcomeOperation> {
    build_optimal_operation_with_unitary(task, None)
}

pub fn build_optimal_operation_with_unitary(
    task: &SeparationTask,
    unitary: Option<&ComplexMatrix>,
) -> Result<TwoOutcomeOperation> {
    let (alpha, beta) = (task.alpha_mag(), task.beta_mag());
    if alpha >= PARALLEL_THRESHOLD {
        return Err(Error::Parallel { overlap: alpha });
    }
    if beta > alpha {
        return Err(Error::OverlapIncrease { alpha, beta });
    }
    let p = separation_bound(alpha, beta)?;
    let reciprocal = task.initial().reciprocal_states()?;
    let basis = task.input_basis();
    let perp = [
        (
            basis.coords(reciprocal.perp_plus.vector())?,
            reciprocal.denom_plus,
        ),
        (
            basis.coords(reciprocal.perp_minus.vector())?,
            reciprocal.denom_minus,
        ),
    ];
    let mut a_s = ComplexMatrix::zeros(2, 2);
    for (target, (perp, denom)) in task.target_coords().iter().zip(&perp) {
        let term = ComplexMatrix::outer(target, perp).scale(c(p.sqrt(), 0.0) / denom);
        a_s = &a_s + &term;
    }
    TwoOutcomeOperation::from_success_operator(task, a_s, unitary)
}

#[derive(Clone, Debug)]
pub struct OperationDiagnostics {
    pub p_s_plus: f64,
    pub p_s_minus: f64,
    pub p_s: f64,
    /// `μ+* μ-`
    pub q: C64,
    /// Phase of `q`.
    pub theta: f64,
    /// Largest eigenvalue of `A_S†A_S`.
    pub max_eig: f64,
    /// Span coordinates of the unit-eigenvalue eigenvector, when one exists.
    pub witness: Option<ComplexVector>,
}

pub fn diagnose(op: &TwoOutcomeOperation, _task: &SeparationTask) -> OperationDiagnostics {
    let (p_s_plus, p_s_minus) = op.success_probabilities();
    let q = op.mu_plus.conj() * op.mu_minus;
    let gram = op.a_s.adjoint().matmul(&op.a_s).expect("2x2");
    let top = hermitian_eigensystem(&gram)
        .expect("A_S†A_S is Hermitian")
        .swap_remove(0);
    let witness = (top.value >= 1.0 - DENSITY_TOL).then_some(top.vector);
    OperationDiagnostics {
        p_s_plus,
        p_s_minus,
        p_s: (p_s_plus + p_s_minus) / 2.0,
        q,
        theta: q.arg(),
        max_eig: top.value,
        witness,
    }
}

/// `‖A_F w‖` for the saturating witness `w`, if there is one.
pub fn witness_annihilation(op: &TwoOutcomeOperation, diag: &OperationDiagnostics) -> Option<f64> {
    diag.witness
        .as_ref()
        .map(|w| op.a_f.apply(w).expect("2x2").norm())
}

/// `|α - Qβ|² - (1 - P+)(1 - P-)`; positive means infeasible.
pub fn feasibility_gap(p_plus: f64, p_minus: f64, q: C64, alpha: C64, beta: C64) -> f64 {
    (alpha - q * beta).norm_sqr() - (1.0 - p_plus) * (1.0 - p_minus)
}

/// `((1 - P+)(1 - P-), |α - Qβ|²)` for an operation on a task.
pub fn feasibility_sides(op: &TwoOutcomeOperation, task: &SeparationTask) -> (f64, f64) {
    let (pp, pm) = op.success_probabilities();
    let q = op.mu_plus.conj() * op.mu_minus;
    (
        (1.0 - pp) * (1.0 - pm),
        (task.alpha() - q * task.beta()).norm_sqr(),
    )
}

pub fn feasibility_residual(op: &TwoOutcomeOperation, task: &SeparationTask) -> f64 {
    let (lhs, rhs) = feasibility_sides(op, task);
    (rhs - lhs).max(0.0)
}

/// Conditional states after a failed attempt, one per preparation.
#[derive(Clone, Debug)]
pub struct FailureAnalysis {
    pub rho_f_plus: ComplexMatrix,
    pub rho_f_minus: ComplexMatrix,
    pub distance: f64,
}

pub fn failure_states(op: &TwoOutcomeOperation, task: &SeparationTask) -> Result<FailureAnalysis> {
    let mut rhos = Vec::with_capacity(2);
    for input in task.initial_coords() {
        let out = op.a_f.apply(input)?;
        let prob = out.norm_sqr();
        if prob < MIN_FAILURE_PROBABILITY {
            return Err(Error::NoFailureState);
        }
        rhos.push(pure_density(&out).scale(c(1.0 / prob, 0.0)));
    }
    let rho_f_minus = rhos.pop().expect("two branches");
    let rho_f_plus = rhos.pop().expect("two branches");
    let distance = trace_distance(&rho_f_plus, &rho_f_minus)?;
    Ok(FailureAnalysis {
        rho_f_plus,
        rho_f_minus,
        distance,
    })
}
