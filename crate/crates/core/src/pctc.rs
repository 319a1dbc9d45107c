//! Post-selected teleportation CTC with a thermally decohered Bell resource.
//!
//! Registers are ordered (SYS, C, B). The Bell pair lives on (C, B), only C is
//! exposed to the Davies map, and the circuit post-selects (C, B) on `|Φ⟩`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{davies_superoperator, DaviesParams, QuantumChannel};
use crate::error::{invalid, Error, Result};
use crate::gates::{pctc_system_unitary, Unitary};
use crate::qmat::{tensor, trace_trailing, ComplexMatrix, DensityOperator, PureState};

/// Post-selection weights below this are treated as zero.
pub const MIN_WEIGHT: f64 = 1e-14;

/// Entries of the noisy Bell resource
/// `a0|00⟩⟨00| + b0|10⟩⟨10| + c*|00⟩⟨11| + c|11⟩⟨00| + a1|01⟩⟨01| + b1|11⟩⟨11|`,
/// stored as actual matrix entries (so they sum to one).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellCoefficients {
    pub a0: f64,
    pub a1: f64,
    pub b0: f64,
    pub b1: f64,
    /// The `|11⟩⟨00|` entry.
    pub c: Complex64,
}

impl BellCoefficients {
    /// Closed-form entries of `(D ⊗ I)|Φ⟩⟨Φ|`.
    pub fn from_params(d: &DaviesParams) -> Self {
        let r = d.relaxed();
        let p = d.p();
        Self {
            a0: (1.0 - r * p) / 2.0,
            a1: (1.0 - p) * r / 2.0,
            b0: p * r / 2.0,
            b1: (1.0 - (1.0 - p) * r) / 2.0,
            c: d.coherence() / 2.0,
        }
    }

    /// Reads the entries off a two-qubit (C, B) resource state.
    pub fn from_state(chi: &DensityOperator) -> Result<Self> {
        if chi.nqubits() != 2 {
            return invalid("Bell resource must be a two-qubit state");
        }
        let m = chi.matrix();
        Ok(Self {
            a0: m.get(0, 0).re,
            a1: m.get(1, 1).re,
            b0: m.get(2, 2).re,
            b1: m.get(3, 3).re,
            c: m.get(3, 0),
        })
    }

    /// The doubled values, as they appear when the resource's normalization
    /// is left out.
    pub fn doubled(&self) -> Self {
        Self {
            a0: 2.0 * self.a0,
            a1: 2.0 * self.a1,
            b0: 2.0 * self.b0,
            b1: 2.0 * self.b1,
            c: 2.0 * self.c,
        }
    }

    pub fn is_valid(&self) -> bool {
        let sum = self.a0 + self.a1 + self.b0 + self.b1;
        (sum - 1.0).abs() <= 1e-12 && self.c.norm() <= (self.a0 * self.b1).sqrt() + 1e-10
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::diagonal(&[self.a0, self.a1, self.b0, self.b1]);
        m.set(3, 0, self.c);
        m.set(0, 3, self.c.conj());
        m
    }
}

/// Normalized post-selected output and the probability of the post-selected
/// outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct PctcResult {
    pub rho_f: DensityOperator,
    pub postselection_weight: f64,
}

impl PctcResult {
    fn from_unnormalized(out: ComplexMatrix) -> Result<Self> {
        let weight = out.trace().re;
        if weight.is_nan() || weight < MIN_WEIGHT {
            return Err(Error::ZeroPostselection { weight });
        }
        Ok(Self {
            rho_f: DensityOperator::new(out.scale_real(1.0 / weight))?,
            postselection_weight: weight,
        })
    }
}

/// Applies a qubit channel to the first factor of a two-qubit operator.
pub fn apply_to_first(ch: &QuantumChannel, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.rows() != 4 || x.cols() != 4 {
        return invalid("expected a 4x4 two-qubit operator");
    }
    let mut out = ComplexMatrix::zeros(4, 4);
    for k in 0..2 {
        for l in 0..2 {
            let block = ComplexMatrix::from_fn(2, 2, |i, j| x.get(2 * i + k, 2 * j + l));
            let image = ch.apply(&block);
            for i in 0..2 {
                for j in 0..2 {
                    out.set(2 * i + k, 2 * j + l, image.get(i, j));
                }
            }
        }
    }
    Ok(out)
}

/// `(D ⊗ I)|Φ⟩⟨Φ|` on (C, B).
pub fn noisy_bell(d: &DaviesParams) -> Result<DensityOperator> {
    let bell = PureState::bell_phi().projector();
    DensityOperator::new(apply_to_first(&davies_superoperator(d), &bell)?)
}

fn bell_projector_on_cb() -> ComplexMatrix {
    tensor(&ComplexMatrix::identity(2), &PureState::bell_phi().projector())
}

/// Post-selected output for an arbitrary (C, B) resource.
pub fn pctc_output_with_resource(rho_i: &DensityOperator, chi: &DensityOperator) -> Result<PctcResult> {
    if rho_i.nqubits() != 1 || chi.nqubits() != 2 {
        return invalid("post-selected circuit takes a 1-qubit input and a 2-qubit resource");
    }
    let u = pctc_system_unitary();
    let joint = tensor(rho_i.matrix(), chi.matrix()).conjugate_by(u.matrix())?;
    let proj = bell_projector_on_cb();
    let selected = &(&proj * &joint) * &proj;
    PctcResult::from_unnormalized(trace_trailing(&selected, 2)?)
}

/// `Tr_CB{|Φ⟩⟨Φ|_CB U[ρ_i ⊗ χ_CB]U†}`, normalized.
pub fn pctc_output(rho_i: &DensityOperator, d: &DaviesParams) -> Result<PctcResult> {
    pctc_output_with_resource(rho_i, &noisy_bell(d)?)
}

fn sandwich(u: &Unitary, c: usize, b: usize) -> ComplexMatrix {
    // ⟨Φ|_CB U |cb⟩_CB as an operator on SYS
    let m = u.matrix();
    ComplexMatrix::from_fn(2, 2, |s_out, s_in| {
        let col = 4 * s_in + 2 * c + b;
        (0..2)
            .map(|x| m.get(4 * s_out + 2 * x + x, col))
            .sum::<Complex64>()
            * FRAC_1_SQRT_2
    })
}

/// `L_I … L_VI`: the Bell-bra sandwiches of the coupling against
/// `|00⟩, |10⟩, |00⟩, |11⟩, |01⟩, |11⟩` on (C, B).
pub fn l_operators() -> [ComplexMatrix; 6] {
    let u = pctc_system_unitary();
    [
        sandwich(&u, 0, 0),
        sandwich(&u, 1, 0),
        sandwich(&u, 0, 0),
        sandwich(&u, 1, 1),
        sandwich(&u, 0, 1),
        sandwich(&u, 1, 1),
    ]
}

/// The post-selected output assembled term by term from the L-operators and
/// the closed-form resource entries. Pure inputs only.
pub fn pctc_output_via_l(rho_i: &DensityOperator, d: &DaviesParams) -> Result<PctcResult> {
    if rho_i.nqubits() != 1 {
        return invalid("expected a single-qubit input");
    }
    let purity = rho_i.purity();
    if (purity - 1.0).abs() > 1e-10 {
        return invalid(format!("input must be pure (purity {purity})"));
    }
    let [l1, l2, l3, l4, l5, l6] = l_operators();
    let k = BellCoefficients::from_params(d);
    let rho = rho_i.matrix();
    let term = |coef: Complex64, left: &ComplexMatrix, right: &ComplexMatrix| {
        (&(left * rho) * &right.dagger()).scale(coef)
    };
    let re = |x: f64| Complex64::new(x, 0.0);
    let parts = [
        term(re(k.a0), &l1, &l1),
        term(re(k.b0), &l2, &l2),
        term(k.c.conj(), &l3, &l4),
        term(k.c, &l4, &l3),
        term(re(k.a1), &l5, &l5),
        term(re(k.b1), &l6, &l6),
    ];
    let out = parts.iter().fold(ComplexMatrix::zeros(2, 2), |acc, t| &acc + t);
    PctcResult::from_unnormalized(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::gibbs_state;
    use crate::qmat::trace_distance;

    fn params(p: f64, a: f64, g: f64, omega: f64, t: f64) -> DaviesParams {
        DaviesParams::new(p, a, g, omega, t).unwrap()
    }

    #[test]
    fn noiseless_resource_is_bell() {
        let chi = noisy_bell(&params(0.3, 1.0, 1.0, 1.0, 0.0)).unwrap();
        assert_eq!(chi.matrix(), &PureState::bell_phi().projector());
    }

    #[test]
    fn resource_matches_coefficient_table() {
        let d = params(0.3, 1.0, 1.0, 1.0, 0.7);
        let chi = noisy_bell(&d).unwrap();
        let numeric = BellCoefficients::from_state(&chi).unwrap();
        let table = BellCoefficients::from_params(&d);
        assert!(table.is_valid());
        assert!(chi.matrix().max_abs_diff(&table.to_matrix()) < 1e-15);
        assert!((numeric.c - table.c).norm() < 1e-15);

        // doubled values against the unnormalized table
        let e = (-0.7f64).exp();
        let dbl = table.doubled();
        assert!((dbl.b1 - (1.0 - 0.7 * (1.0 - e))).abs() < 1e-15);
        assert!((dbl.a1 - 0.7 * (1.0 - e)).abs() < 1e-15);
        assert!((dbl.b0 - 0.3 * (1.0 - e)).abs() < 1e-15);
        assert!((dbl.a0 - (1.0 - (1.0 - e) * 0.3)).abs() < 1e-15);
        assert!((dbl.c.norm() - (-0.7f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn long_time_resource_is_product() {
        let d = params(0.3, 1.0, 1.0, 1.0, 100.0);
        let chi = noisy_bell(&d).unwrap();
        let want = tensor(gibbs_state(0.3).unwrap().matrix(), DensityOperator::maximally_mixed(1).matrix());
        assert!(chi.matrix().max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn l_operator_closed_forms() {
        let [l1, l2, l3, l4, l5, l6] = l_operators();
        let h = FRAC_1_SQRT_2;
        let m = |v: [f64; 4]| ComplexMatrix::from_real(2, 2, &v).unwrap();
        assert!(l1.max_abs_diff(&m([h, 0.0, 0.0, 0.0])) < 1e-14);
        assert!(l2.max_abs_diff(&m([0.0, 0.0, 0.5, 0.5])) < 1e-14);
        assert!(l3.max_abs_diff(&l1) < 1e-14);
        assert!(l4.max_abs_diff(&m([0.0, 0.0, 0.5, -0.5])) < 1e-14);
        assert!(l5.max_abs_diff(&m([0.0, h, 0.0, 0.0])) < 1e-14);
        assert!(l6.max_abs_diff(&l4) < 1e-14);
    }

    #[test]
    fn noiseless_outputs() {
        let d = params(0.0, 0.0, 0.0, 1.0, 0.0);
        let r1 = pctc_output(&PureState::one().density(), &d).unwrap();
        assert!(r1.rho_f.matrix().max_abs_diff(PureState::one().density().matrix()) < 1e-14);
        assert!((r1.postselection_weight - 0.125).abs() < 1e-15);
        let rp = pctc_output(&PureState::plus().density(), &d).unwrap();
        assert!(rp.rho_f.matrix().max_abs_diff(PureState::zero().density().matrix()) < 1e-14);
    }

    #[test]
    fn pure_dephasing_keeps_plus_mapped_to_zero() {
        for (g, t) in [(0.3, 0.5), (2.0, 3.0), (5.0, 0.01)] {
            let d = params(0.4, 0.0, g, 1.0, t);
            let out = pctc_output(&PureState::plus().density(), &d).unwrap();
            assert!(out.rho_f.matrix().max_abs_diff(PureState::zero().density().matrix()) < 1e-12);
        }
    }

    #[test]
    fn generic_noise_gives_diagonal_output() {
        let d = params(0.3, 1.0, 1.0, 1.0, 0.8);
        let out = pctc_output(&PureState::one().density(), &d).unwrap();
        let k = BellCoefficients::from_params(&d);
        // |1⟩ picks up a1 |L_V 1|^2 on |0⟩ and (b0 + b1)/4 on |1⟩
        let (w0, w1) = (k.a1 / 2.0, (k.b0 + k.b1) / 4.0);
        let want = ComplexMatrix::diagonal(&[w0 / (w0 + w1), w1 / (w0 + w1)]);
        assert!(out.rho_f.matrix().max_abs_diff(&want) < 1e-14);
        assert!((out.postselection_weight - (w0 + w1)).abs() < 1e-15);
    }

    #[test]
    fn l_path_agrees_and_rejects_mixed() {
        let d = params(0.2, 0.6, 1.1, 0.7, 1.3);
        for psi in [PureState::one(), PureState::plus(), PureState::zero(), PureState::minus()] {
            let a = pctc_output(&psi.density(), &d).unwrap();
            let b = pctc_output_via_l(&psi.density(), &d).unwrap();
            assert!(a.rho_f.matrix().max_abs_diff(b.rho_f.matrix()) < 1e-12);
            assert!((a.postselection_weight - b.postselection_weight).abs() < 1e-12);
        }
        let mixed = DensityOperator::maximally_mixed(1);
        assert!(matches!(pctc_output_via_l(&mixed, &d), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn zero_weight_is_reported() {
        let product = PureState::basis(0, 2).unwrap().density();
        let err = pctc_output_with_resource(&PureState::one().density(), &product).unwrap_err();
        assert!(matches!(err, Error::ZeroPostselection { .. }));
    }

    #[test]
    fn orthogonal_at_zero_relaxation() {
        let d = params(0.5, 0.0, 3.0, 2.0, 1.7);
        let a = pctc_output(&PureState::one().density(), &d).unwrap();
        let b = pctc_output(&PureState::plus().density(), &d).unwrap();
        assert!((trace_distance(&a.rho_f, &b.rho_f).unwrap() - 1.0).abs() < 1e-12);
    }
}
