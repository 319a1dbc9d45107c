//! Deutsch-model CTC engine.
//!
//! For a coupling `U` and chronology-respecting input `ρ_i`, the
//! chronology-violating qubit evolves under `Λ(τ) = Tr_CR[U(ρ_i ⊗ τ)U†]`. With
//! thermal noise on the loop the consistency condition becomes `τ = D(Λ(τ))`.
//! The map is linear in `τ`, so in Bloch coordinates it is affine,
//! `r ↦ M r + c`, and its fixed points are solved exactly: a particular
//! solution plus the null space of `I - M`, intersected with the Bloch ball.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{compose, davies_superoperator, DaviesParams, QuantumChannel};
use crate::error::{invalid, Error, Result};
use crate::gates::{fig1_unitary, fig5_unitary, Unitary};
use crate::qmat::{
    bloch_components, bloch_matrix, hermitian_eigenvalues, partial_trace,
    partial_trace_3q_keep_last, paulis, state_from_bloch, tensor, trace_distance, trace_leading,
    trace_trailing, von_neumann_entropy, BlochVector, ComplexMatrix, DensityOperator, Keep,
    PureState,
};

/// Singular values of `I - M` below this count as null directions.
pub const RANK_TOL: f64 = 1e-9;
/// Default successive-iterate tolerance of [`fixed_point_iterate`].
pub const ITER_TOL: f64 = 1e-12;
/// Default iteration cap of [`fixed_point_iterate`].
pub const MAX_ITER: usize = 1_000_000;
/// Largest accepted trace distance between a returned `τ` and its image.
pub const RESIDUAL_TOL: f64 = 1e-10;

const BALL_SLACK: f64 = 1e-10;
const GOLDEN_TOL: f64 = 1e-10;

/// The circuits with a Deutsch CTC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Circuit {
    /// Controlled-Hadamard + SWAP distinguishing circuit on (CR, CV).
    DeutschFig1,
    /// Unproven-theorem circuit on (B, M, T), CR input `|00⟩`.
    UnprovenFig5,
    /// Identity coupling on (CR, CV); every `τ` is consistent. Diagnostic only.
    Identity,
}

impl Circuit {
    pub fn unitary(&self) -> Unitary {
        match self {
            Self::DeutschFig1 => fig1_unitary(),
            Self::UnprovenFig5 => fig5_unitary(),
            Self::Identity => Unitary::identity(2),
        }
    }

    pub fn cr_qubits(&self) -> usize {
        match self {
            Self::UnprovenFig5 => 2,
            _ => 1,
        }
    }

    /// The input the circuit is studied with, when it has a fixed one.
    pub fn fixed_input(&self) -> Option<DensityOperator> {
        match self {
            Self::UnprovenFig5 => Some(PureState::basis(0, 2).unwrap().density()),
            _ => None,
        }
    }
}

/// The two inputs of the distinguishing circuit with closed-form results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FigOneInput {
    Minus,
    Zero,
}

impl FigOneInput {
    pub fn state(&self) -> DensityOperator {
        match self {
            Self::Minus => PureState::minus().density(),
            Self::Zero => PureState::zero().density(),
        }
    }

    /// The noiseless output: `|1⟩⟨1|` for `|−⟩`, `|0⟩⟨0|` for `|0⟩`.
    pub fn ideal_output(&self) -> DensityOperator {
        match self {
            Self::Minus => PureState::one().density(),
            Self::Zero => PureState::zero().density(),
        }
    }
}

fn check_dims(u: &Unitary, rho_i: &ComplexMatrix, tau: &ComplexMatrix) -> Result<()> {
    let n_cr = rho_i.qubit_count().unwrap_or(usize::MAX);
    if tau.rows() != 2 || tau.cols() != 2 {
        return invalid("the chronology-violating system must be a single qubit");
    }
    if n_cr == usize::MAX || n_cr + 1 != u.nqubits() {
        return invalid(format!(
            "unitary on {} qubits does not fit a {}x{} CR input plus one CV qubit",
            u.nqubits(),
            rho_i.rows(),
            rho_i.cols()
        ));
    }
    Ok(())
}

fn joint(u: &Unitary, rho_i: &ComplexMatrix, tau: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims(u, rho_i, tau)?;
    tensor(rho_i, tau).conjugate_by(u.matrix())
}

/// `Λ` applied to an arbitrary 2x2 operator.
pub fn lambda_matrix(u: &Unitary, rho_i: &ComplexMatrix, tau: &ComplexMatrix) -> Result<ComplexMatrix> {
    let x = joint(u, rho_i, tau)?;
    match x.rows() {
        4 => partial_trace(&x, Keep::Cv),
        8 => partial_trace_3q_keep_last(&x),
        _ => trace_leading(&x, u.nqubits() - 1),
    }
}

/// `Λ(τ) = Tr_CR[U(ρ_i ⊗ τ)U†]`.
pub fn lambda_map(u: &Unitary, rho_i: &DensityOperator, tau: &DensityOperator) -> Result<DensityOperator> {
    DensityOperator::new(lambda_matrix(u, rho_i.matrix(), tau.matrix())?)
}

/// `Λ` as a superoperator in `τ` for fixed `ρ_i`.
pub fn lambda_channel(u: &Unitary, rho_i: &DensityOperator) -> Result<QuantumChannel> {
    check_dims(u, rho_i.matrix(), &ComplexMatrix::zeros(2, 2))?;
    QuantumChannel::from_linear_map(|x| lambda_matrix(u, rho_i.matrix(), x))
}

/// `D ∘ Λ` as a superoperator in `τ`. Noise acts after the circuit.
pub fn noisy_consistency_map(u: &Unitary, rho_i: &DensityOperator, d: &DaviesParams) -> Result<QuantumChannel> {
    Ok(compose(&davies_superoperator(d), &lambda_channel(u, rho_i)?))
}

/// The chronology-respecting output `Tr_CV[U(ρ_i ⊗ τ)U†]`.
pub fn deutsch_output(u: &Unitary, rho_i: &DensityOperator, tau: &DensityOperator) -> Result<DensityOperator> {
    let x = joint(u, rho_i.matrix(), tau.matrix())?;
    let out = if x.rows() == 4 {
        partial_trace(&x, Keep::Cr)?
    } else {
        trace_trailing(&x, 1)?
    };
    DensityOperator::new(out)
}

/// The feasible fixed points of a qubit channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CtcSolutionSet {
    particular: BlochVector,
    null_directions: Vec<[f64; 3]>,
    feasible_interval: Option<(f64, f64)>,
    dimension: usize,
}

impl CtcSolutionSet {
    /// A one-parameter family running in a straight line from `from` to `to`,
    /// parameterized by Bloch-space arc length.
    pub fn segment(from: &DensityOperator, to: &DensityOperator) -> Result<Self> {
        let a = crate::qmat::bloch_from_state(from)?;
        let b = crate::qmat::bloch_from_state(to)?;
        let diff = Vector3::from(b.0) - Vector3::from(a.0);
        let len = diff.norm();
        if len < 1e-15 {
            return Ok(Self {
                particular: a,
                null_directions: vec![],
                feasible_interval: None,
                dimension: 0,
            });
        }
        let dir = diff / len;
        Ok(Self {
            particular: a,
            null_directions: vec![[dir.x, dir.y, dir.z]],
            feasible_interval: Some((0.0, len)),
            dimension: 1,
        })
    }

    pub fn particular(&self) -> BlochVector {
        self.particular
    }

    pub fn null_directions(&self) -> &[[f64; 3]] {
        &self.null_directions
    }

    pub fn feasible_interval(&self) -> Option<(f64, f64)> {
        self.feasible_interval
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// The only solution, when the set is a single point.
    pub fn unique(&self) -> Option<DensityOperator> {
        (self.dimension == 0).then(|| DensityOperator::new(bloch_matrix(self.particular.0)).unwrap())
    }

    /// Member at parameter `s` of a one-dimensional family.
    pub fn member(&self, s: f64) -> Result<DensityOperator> {
        let (lo, hi) = match (self.dimension, self.feasible_interval) {
            (1, Some(iv)) => iv,
            _ => return invalid("member(s) is only defined for one-dimensional families"),
        };
        if s < lo - 1e-12 || s > hi + 1e-12 {
            return invalid(format!("parameter {s} outside feasible interval [{lo}, {hi}]"));
        }
        let n = self.null_directions[0];
        let r = [0, 1, 2].map(|k| self.particular.0[k] + s * n[k]);
        DensityOperator::new(bloch_matrix(r))
    }
}

/// Bloch-space affine form `r ↦ M r + c` of a qubit channel.
pub fn affine_form(map: &QuantumChannel) -> (Matrix3<f64>, Vector3<f64>) {
    let c = Vector3::from(bloch_components(&map.apply(&ComplexMatrix::identity(2).scale_real(0.5))));
    let mut m = Matrix3::zeros();
    for (j, sigma) in paulis().iter().enumerate() {
        let col = bloch_components(&map.apply(sigma));
        for i in 0..3 {
            m[(i, j)] = col[i] / 2.0;
        }
    }
    (m, c)
}

/// Exact fixed-point set of a trace-preserving qubit map.
pub fn solve_fixed_point(map: &QuantumChannel) -> Result<CtcSolutionSet> {
    solve_fixed_point_with(map, RANK_TOL)
}

/// [`solve_fixed_point`] with an explicit rank tolerance on `I - M`.
pub fn solve_fixed_point_with(map: &QuantumChannel, rank_tol: f64) -> Result<CtcSolutionSet> {
    let defect = map.trace_defect();
    if defect > 1e-10 {
        return invalid(format!("map is not trace preserving (defect {defect:e})"));
    }
    let (m, c) = affine_form(map);
    let a = Matrix3::identity() - m;
    let svd = a.svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");

    let mut particular = Vector3::zeros();
    let mut null_directions = Vec::new();
    for k in 0..3 {
        let sigma = svd.singular_values[k];
        let v = v_t.row(k).transpose();
        if sigma < rank_tol {
            null_directions.push([v.x, v.y, v.z]);
        } else {
            particular += v * (u.column(k).dot(&c) / sigma);
        }
    }
    let inconsistency = (a * particular - c).norm();
    if inconsistency > 1e-8 {
        return Err(Error::Infeasible(format!(
            "(I - M) r = c has no solution (residual {inconsistency:e})"
        )));
    }

    let dimension = null_directions.len();
    let r0_sq = particular.norm_squared();
    let feasible_interval = if dimension == 1 {
        // |r0 + s n|^2 <= 1 with |n| = 1
        let n = Vector3::from(null_directions[0]);
        let b = particular.dot(&n);
        let disc = b * b - (r0_sq - 1.0);
        if disc < -2.0 * BALL_SLACK {
            return Err(Error::Infeasible(format!(
                "solution line misses the Bloch ball (distance^2 {r0_sq})"
            )));
        }
        let h = disc.max(0.0).sqrt();
        Some((-b - h, -b + h))
    } else {
        if r0_sq.sqrt() > 1.0 + BALL_SLACK {
            return Err(Error::Infeasible(format!(
                "closest solution has Bloch length {}",
                r0_sq.sqrt()
            )));
        }
        None
    };

    Ok(CtcSolutionSet {
        particular: BlochVector([particular.x, particular.y, particular.z]),
        null_directions,
        feasible_interval,
        dimension,
    })
}

/// Iterates `τ ← map(τ)` until successive iterates are within `tol` in trace
/// distance.
pub fn fixed_point_iterate(
    map: &QuantumChannel,
    start: &DensityOperator,
    tol: f64,
    max_iter: usize,
) -> Result<DensityOperator> {
    if tol.is_nan() || tol <= 0.0 {
        return invalid(format!("tolerance {tol} must be positive"));
    }
    if start.nqubits() != 1 {
        return invalid("iteration needs a single-qubit start state");
    }
    let mut current = start.matrix().clone();
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let next = map.apply(&current);
        let diff = &next - &current;
        residual = 0.5 * hermitian_eigenvalues(&diff)?.iter().map(|v| v.abs()).sum::<f64>();
        current = next;
        if residual < tol {
            return DensityOperator::new(current);
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Picks the member of largest von Neumann entropy. Families of dimension two
/// or more are rejected.
pub fn select_max_entropy(s: &CtcSolutionSet) -> Result<DensityOperator> {
    match s.dimension {
        0 => Ok(s.unique().unwrap()),
        1 => {
            let (lo, hi) = s.feasible_interval.expect("1-d family has an interval");
            let f = |x: f64| s.member(x).map(|rho| von_neumann_entropy(&rho)).unwrap_or(f64::NEG_INFINITY);
            let best = golden_section_max(&f, lo, hi, GOLDEN_TOL);
            let pick = [lo, best, hi]
                .into_iter()
                .max_by(|a, b| f(*a).total_cmp(&f(*b)))
                .unwrap();
            s.member(polish(s, pick, lo, hi))
        }
        dimension => Err(Error::UnsupportedAmbiguity { dimension }),
    }
}

/// Entropy is flat at its peak, so value comparisons only resolve the
/// maximizer to about 1e-8. Entropy falls with the Bloch radius, and the
/// radius along the family is `|r0 + x n|`, so an interior pick is replaced by
/// the exact minimizer of that radius.
fn polish(s: &CtcSolutionSet, pick: f64, lo: f64, hi: f64) -> f64 {
    let n = s.null_directions[0];
    let r0 = s.particular.0;
    let nn: f64 = n.iter().map(|v| v * v).sum();
    let interior = pick - lo > 1e-7 && hi - pick > 1e-7;
    if !interior || nn == 0.0 {
        return pick;
    }
    let star = -(0..3).map(|k| r0[k] * n[k]).sum::<f64>() / nn;
    if (star - pick).abs() < 1e-6 {
        star.clamp(lo, hi)
    } else {
        pick
    }
}

fn golden_section_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// How `tau` was chosen from the solution set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Selection {
    Unique,
    MaxEntropySelected,
}

/// Solved Deutsch circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct DeutschResult {
    pub tau: DensityOperator,
    pub rho_f: DensityOperator,
    pub solution_set: CtcSolutionSet,
    pub selection: Selection,
}

/// Solves `τ = D(Λ(τ))`, applies the maximum-entropy rule if the solution is a
/// one-parameter family, and computes the chronology-respecting output.
pub fn solve_deutsch(u: &Unitary, rho_i: &DensityOperator, d: &DaviesParams) -> Result<DeutschResult> {
    solve_deutsch_with(u, rho_i, d, RANK_TOL)
}

pub fn solve_deutsch_with(
    u: &Unitary,
    rho_i: &DensityOperator,
    d: &DaviesParams,
    rank_tol: f64,
) -> Result<DeutschResult> {
    let map = noisy_consistency_map(u, rho_i, d)?;
    let solution_set = solve_fixed_point_with(&map, rank_tol)?;
    let selection = if solution_set.dimension == 0 {
        Selection::Unique
    } else {
        Selection::MaxEntropySelected
    };
    let tau = select_max_entropy(&solution_set)?;
    let image = DensityOperator::new(map.apply(tau.matrix()))?;
    let residual = trace_distance(&tau, &image)?;
    if residual > RESIDUAL_TOL {
        return Err(Error::Infeasible(format!(
            "selected state is not a fixed point (residual {residual:e})"
        )));
    }
    let rho_f = deutsch_output(u, rho_i, &tau)?;
    Ok(DeutschResult {
        tau,
        rho_f,
        solution_set,
        selection,
    })
}

struct ClosedForm {
    diag: f64,
    tau_off: Complex64,
    rho_off: Complex64,
}

fn closed_form(input: FigOneInput, d: &DaviesParams) -> ClosedForm {
    let (p, a, g, w, t) = (d.p(), d.a(), d.g(), d.omega(), d.t());
    let e = (-a * t).exp();
    let e_ag = Complex64::new(-(a + g) * t, -w * t).exp();
    let e_g = Complex64::new(-g * t, -w * t).exp();
    let s2 = std::f64::consts::SQRT_2;
    match input {
        FigOneInput::Minus => {
            let num = e_ag * p - e_g * p - e_ag + e_g;
            ClosedForm {
                diag: -2.0 * (p * e - e - p + 1.0) / (e - 2.0),
                tau_off: num / (e - 2.0),
                rho_off: -0.5 * num * s2 / (e - 2.0),
            }
        }
        FigOneInput::Zero => {
            let num = (e_ag - e_g) * p;
            ClosedForm {
                diag: -(2.0 * p * e - e - 2.0 * p + 2.0) / (e - 2.0),
                tau_off: num / (e - 2.0),
                rho_off: 0.5 * num * s2 / (e - 2.0),
            }
        }
    }
}

fn qubit_from(diag: f64, off: Complex64) -> Result<DensityOperator> {
    DensityOperator::new(ComplexMatrix::new(
        2,
        2,
        vec![Complex64::new(diag, 0.0), off, off.conj(), Complex64::new(1.0 - diag, 0.0)],
    )?)
}

/// Closed-form consistent CV state of the distinguishing circuit. Entry
/// `[0, 0]` is the `|0⟩⟨0|` coefficient.
pub fn closed_form_tau(input: FigOneInput, d: &DaviesParams) -> Result<DensityOperator> {
    let cf = closed_form(input, d);
    qubit_from(cf.diag, cf.tau_off)
}

/// Closed-form CR output of the distinguishing circuit.
pub fn closed_form_rho_f(input: FigOneInput, d: &DaviesParams) -> Result<DensityOperator> {
    let cf = closed_form(input, d);
    qubit_from(cf.diag, cf.rho_off)
}

/// Convenience: the state vector `(I + r·σ)/2` member for a τ_α-style
/// diagonal family, `α|0⟩⟨0| + (1-α)|1⟩⟨1|`.
pub fn diagonal_member(alpha: f64) -> Result<DensityOperator> {
    state_from_bloch(BlochVector([0.0, 0.0, 2.0 * alpha - 1.0]))
}
