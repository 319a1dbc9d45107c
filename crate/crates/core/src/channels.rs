//! The Davies thermal channel and a uniform superoperator representation for
//! single-qubit channels.
//!
//! Superoperators act on column-stacked operators: `vec(X)[i + 2j] = X[i, j]`,
//! so `S[a + 2b, i + 2j]` is the `|a⟩⟨b|` coefficient of `Φ(|i⟩⟨j|)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{hermitian_eigenvalues, matrix_unit, ComplexMatrix, DensityOperator, TOL_POS};

/// Parameters `(p, A, G, ω, t)` of a Davies map.
///
/// `p` is the excited-state Gibbs weight, `A` the energy-relaxation rate, `G`
/// the dephasing rate, `ω` the qubit splitting and `t` the exposure time.
/// Construction enforces `p ∈ [0, 1/2]`, `t ≥ 0` and `G ≥ A/2 ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DaviesParams {
    p: f64,
    a: f64,
    g: f64,
    omega: f64,
    t: f64,
}

impl DaviesParams {
    pub fn new(p: f64, a: f64, g: f64, omega: f64, t: f64) -> Result<Self> {
        let all = [p, a, g, omega, t];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "parameters must be finite: p={p}, A={a}, G={g}, omega={omega}, t={t}"
            )));
        }
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::InvalidParams(format!("p={p} outside [0, 1/2]")));
        }
        if a < 0.0 {
            return Err(Error::InvalidParams(format!("A={a} is negative")));
        }
        if g < a / 2.0 {
            return Err(Error::InvalidParams(format!(
                "G={g}, A={a} violates G >= A/2"
            )));
        }
        if t < 0.0 {
            return Err(Error::InvalidParams(format!("t={t} is negative")));
        }
        Ok(Self { p, a, g, omega, t })
    }

    /// Skips every validity check. Only meant for probing the CP boundary
    /// with [`is_cptp`]; states produced by such maps may be unphysical.
    pub fn new_unchecked(p: f64, a: f64, g: f64, omega: f64, t: f64) -> Self {
        Self { p, a, g, omega, t }
    }

    /// The identity map (`t = 0`).
    pub fn noiseless() -> Self {
        Self::new_unchecked(0.0, 0.0, 0.0, 1.0, 0.0)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Same parameters at a different exposure time.
    pub fn with_t(&self, t: f64) -> Result<Self> {
        Self::new(self.p, self.a, self.g, self.omega, t)
    }

    /// Same parameters with `A` replaced.
    pub fn with_a(&self, a: f64) -> Result<Self> {
        Self::new(self.p, a, self.g, self.omega, self.t)
    }

    /// `1 - e^{-At}`, the relaxed population fraction.
    pub(crate) fn relaxed(&self) -> f64 {
        -(-self.a * self.t).exp_m1()
    }

    /// `e^{iωt - Gt}`, the factor multiplying `|1⟩⟨0|`.
    pub(crate) fn coherence(&self) -> Complex64 {
        Complex64::new(-self.g * self.t, self.omega * self.t).exp()
    }
}

/// A linear map on single-qubit operators, stored as its 4x4 superoperator.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    superop: ComplexMatrix,
}

/// Outcome of [`is_cptp`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CptpVerdict {
    Valid,
    /// Largest deviation of `Tr Φ(|i⟩⟨j|)` from `δ_ij`.
    TraceViolation(f64),
    /// Smallest Choi eigenvalue (or minus the Choi anti-Hermitian deviation
    /// when the map does not preserve Hermiticity).
    CpViolation(f64),
}

impl CptpVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Self::Valid)
    }
}

fn vec_index(row: usize, col: usize) -> usize {
    row + 2 * col
}

impl QuantumChannel {
    pub fn from_superoperator(superop: ComplexMatrix) -> Result<Self> {
        if superop.rows() != 4 || superop.cols() != 4 {
            return Err(Error::InvalidArgument(format!(
                "qubit superoperator must be 4x4, got {}x{}",
                superop.rows(),
                superop.cols()
            )));
        }
        Ok(Self { superop })
    }

    /// Tabulates a linear map from its action on the four matrix units.
    pub fn from_linear_map(
        mut f: impl FnMut(&ComplexMatrix) -> Result<ComplexMatrix>,
    ) -> Result<Self> {
        let mut superop = ComplexMatrix::zeros(4, 4);
        for j in 0..2 {
            for i in 0..2 {
                let image = f(&matrix_unit(i, j, 2)?)?;
                if image.rows() != 2 || image.cols() != 2 {
                    return Err(Error::InvalidArgument(
                        "linear map must return 2x2 operators".into(),
                    ));
                }
                for b in 0..2 {
                    for a in 0..2 {
                        superop.set(vec_index(a, b), vec_index(i, j), image.get(a, b));
                    }
                }
            }
        }
        Ok(Self { superop })
    }

    pub fn identity() -> Self {
        Self {
            superop: ComplexMatrix::identity(4),
        }
    }

    pub fn superoperator(&self) -> &ComplexMatrix {
        &self.superop
    }

    /// Applies the map to an arbitrary 2x2 operator.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert!(x.rows() == 2 && x.cols() == 2, "qubit channel applied to non-2x2 operator");
        let mut out = ComplexMatrix::zeros(2, 2);
        for b in 0..2 {
            for a in 0..2 {
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..2 {
                    for i in 0..2 {
                        s += self.superop.get(vec_index(a, b), vec_index(i, j)) * x.get(i, j);
                    }
                }
                out.set(a, b, s);
            }
        }
        out
    }

    /// Applies the map to a state, validating the image.
    pub fn apply_state(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.nqubits() != 1 {
            return Err(Error::InvalidArgument("qubit channel needs a 1-qubit state".into()));
        }
        DensityOperator::new(self.apply(rho.matrix()))
    }

    /// `Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`.
    pub fn choi(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(4, 4, |r, c| {
            let (i, a) = (r / 2, r % 2);
            let (j, b) = (c / 2, c % 2);
            self.superop.get(vec_index(a, b), vec_index(i, j))
        })
    }

    /// Largest deviation of `Tr Φ(|i⟩⟨j|)` from `δ_ij`.
    pub fn trace_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..2 {
            for i in 0..2 {
                let tr = self.superop.get(0, vec_index(i, j)) + self.superop.get(3, vec_index(i, j));
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((tr - Complex64::new(want, 0.0)).norm());
            }
        }
        worst
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn after(&self, inner: &Self) -> Self {
        Self {
            superop: &self.superop * &inner.superop,
        }
    }
}

/// `(ch1 ∘ ch2)(ρ) = ch1(ch2(ρ))`.
pub fn compose(ch1: &QuantumChannel, ch2: &QuantumChannel) -> QuantumChannel {
    ch1.after(ch2)
}

/// Davies map applied entrywise to any 2x2 operator.
pub fn davies_apply_matrix(params: &DaviesParams, x: &ComplexMatrix) -> ComplexMatrix {
    let r = params.relaxed();
    let p = params.p;
    let (x00, x01, x10, x11) = (x.get(0, 0), x.get(0, 1), x.get(1, 0), x.get(1, 1));
    let gamma = params.coherence();
    let mut out = ComplexMatrix::zeros(2, 2);
    out.set(0, 0, x00 * (1.0 - r * p) + x11 * ((1.0 - p) * r));
    out.set(1, 1, x00 * (p * r) + x11 * (1.0 - (1.0 - p) * r));
    out.set(1, 0, x10 * gamma);
    out.set(0, 1, x01 * gamma.conj());
    out
}

pub fn davies_apply(params: &DaviesParams, rho: &DensityOperator) -> Result<DensityOperator> {
    if rho.nqubits() != 1 {
        return Err(Error::InvalidArgument("Davies map acts on a single qubit".into()));
    }
    DensityOperator::new(davies_apply_matrix(params, rho.matrix()))
}

pub fn davies_superoperator(params: &DaviesParams) -> QuantumChannel {
    let r = params.relaxed();
    let p = params.p;
    let gamma = params.coherence();
    let re = |x: f64| Complex64::new(x, 0.0);
    let z = re(0.0);
    // columns: vec(|0⟩⟨0|), vec(|1⟩⟨0|), vec(|0⟩⟨1|), vec(|1⟩⟨1|)
    let superop = ComplexMatrix::new(
        4,
        4,
        vec![
            re(1.0 - r * p), z, z, re((1.0 - p) * r),
            z, gamma, z, z,
            z, z, gamma.conj(), z,
            re(p * r), z, z, re(1.0 - (1.0 - p) * r),
        ],
    )
    .expect("4x4 literal");
    QuantumChannel { superop }
}

/// Gibbs weight of `|1⟩` at temperature `T` (with `k_B = 1`), evaluated as
/// `1/(1 + e^{ω/T})`.
pub fn temperature_to_p(omega: f64, temperature: f64) -> Result<f64> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(Error::InvalidArgument(format!("omega={omega} must be positive")));
    }
    if temperature.is_nan() || temperature <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "temperature={temperature} must be positive"
        )));
    }
    if temperature.is_infinite() {
        return Ok(0.5);
    }
    Ok(1.0 / (1.0 + (omega / temperature).exp()))
}

/// `p|1⟩⟨1| + (1-p)|0⟩⟨0|`.
pub fn gibbs_state(p: f64) -> Result<DensityOperator> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::InvalidArgument(format!("p={p} outside [0, 1/2]")));
    }
    DensityOperator::new(ComplexMatrix::diagonal(&[1.0 - p, p]))
}

/// Trace-preservation check followed by the Choi positivity test.
pub fn is_cptp(ch: &QuantumChannel) -> CptpVerdict {
    let defect = ch.trace_defect();
    if defect > 1e-12 {
        return CptpVerdict::TraceViolation(defect);
    }
    match hermitian_eigenvalues(&ch.choi()) {
        Ok(eig) if eig[0] >= TOL_POS => CptpVerdict::Valid,
        Ok(eig) => CptpVerdict::CpViolation(eig[0]),
        Err(Error::NotHermitian { deviation }) => CptpVerdict::CpViolation(-deviation),
        Err(_) => unreachable!("eigensolver only fails on non-Hermitian input"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{state_from_bloch, trace_distance, BlochVector, PureState};

    fn params(p: f64, a: f64, g: f64, omega: f64, t: f64) -> DaviesParams {
        DaviesParams::new(p, a, g, omega, t).unwrap()
    }

    fn sample_state() -> DensityOperator {
        state_from_bloch(BlochVector([0.4, -0.3, 0.6])).unwrap()
    }

    #[test]
    fn constructor_enforces_bounds() {
        assert!(DaviesParams::new(0.25, 1.0, 0.4, 1.0, 1.0).is_err());
        assert!(DaviesParams::new(0.6, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(DaviesParams::new(-0.1, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(DaviesParams::new(0.25, -1.0, 1.0, 1.0, 1.0).is_err());
        assert!(DaviesParams::new(0.25, 1.0, 1.0, 1.0, -1.0).is_err());
        assert!(DaviesParams::new(0.25, 1.0, 0.5, 1.0, 1.0).is_ok());
        let err = DaviesParams::new(0.25, 1.0, 0.4, 1.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("violates G >= A/2"));
    }

    #[test]
    fn zero_time_is_identity() {
        let d = params(0.3, 1.0, 2.0, 1.7, 0.0);
        let rho = sample_state();
        assert!(davies_apply(&d, &rho).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
        assert_eq!(davies_superoperator(&d), QuantumChannel::identity());
    }

    #[test]
    fn long_time_reaches_gibbs() {
        let d = params(0.3, 1.0, 1.0, 1.0, 50.0);
        let out = davies_apply(&d, &sample_state()).unwrap();
        assert!(out.matrix().max_abs_diff(gibbs_state(0.3).unwrap().matrix()) < 1e-10);
    }

    #[test]
    fn pure_dephasing_keeps_populations() {
        let d = params(0.2, 0.0, 0.8, 1.3, 2.0);
        let rho = sample_state();
        let out = davies_apply(&d, &rho).unwrap();
        assert_eq!(out.matrix().get(0, 0), rho.matrix().get(0, 0));
        assert_eq!(out.matrix().get(1, 1), rho.matrix().get(1, 1));
        let factor = Complex64::new(-0.8 * 2.0, 1.3 * 2.0).exp();
        assert!((out.matrix().get(1, 0) - rho.matrix().get(1, 0) * factor).norm() < 1e-15);
        assert!((out.matrix().get(0, 1) - rho.matrix().get(0, 1) * factor.conj()).norm() < 1e-15);
    }

    #[test]
    fn superoperator_matches_direct_action() {
        let d = params(0.35, 0.7, 1.1, 0.9, 1.3);
        let ch = davies_superoperator(&d);
        let rho = sample_state();
        let a = ch.apply_state(&rho).unwrap();
        let b = davies_apply(&d, &rho).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-13);
        let mixed = DensityOperator::maximally_mixed(1);
        assert!((ch.apply(mixed.matrix()).trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn temperature_conversion() {
        assert_eq!(temperature_to_p(1.0, 1e-300).unwrap(), 0.0);
        assert!(temperature_to_p(1.0, 1e-3).unwrap() < 1e-300);
        assert_eq!(temperature_to_p(1.0, f64::INFINITY).unwrap(), 0.5);
        assert!((temperature_to_p(1.0, 1e12).unwrap() - 0.5).abs() < 1e-12);
        let want = 1.0 / (1.0 + std::f64::consts::E);
        assert!((temperature_to_p(1.0, 1.0).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.26894).abs() < 1e-5);
        assert!(temperature_to_p(0.0, 1.0).is_err());
        assert!(temperature_to_p(-1.0, 1.0).is_err());
        assert!(temperature_to_p(1.0, 0.0).is_err());
    }

    #[test]
    fn gibbs_examples() {
        assert_eq!(gibbs_state(0.0).unwrap(), PureState::zero().density());
        assert_eq!(gibbs_state(0.5).unwrap(), DensityOperator::maximally_mixed(1));
        let g = gibbs_state(0.25).unwrap();
        assert_eq!(g.matrix(), &ComplexMatrix::diagonal(&[0.75, 0.25]));
        assert!(gibbs_state(0.51).is_err());
    }

    #[test]
    fn cptp_boundary_and_violation() {
        for t in [0.1, 1.0, 10.0] {
            let ch = davies_superoperator(&params(0.25, 1.0, 0.5, 1.0, t));
            assert!(is_cptp(&ch).is_valid(), "t={t}");
        }
        assert!(is_cptp(&QuantumChannel::identity()).is_valid());
        let bad = davies_superoperator(&DaviesParams::new_unchecked(0.25, 1.0, 0.25, 1.0, 1.0));
        assert!(matches!(is_cptp(&bad), CptpVerdict::CpViolation(l) if l < -1e-10));

        let mut s = ComplexMatrix::identity(4);
        s.set(0, 0, Complex64::new(0.9, 0.0));
        let leaky = QuantumChannel::from_superoperator(s).unwrap();
        assert!(matches!(is_cptp(&leaky), CptpVerdict::TraceViolation(d) if (d - 0.1).abs() < 1e-12));
    }

    #[test]
    fn composition() {
        let d = params(0.3, 0.8, 0.9, 1.2, 0.7);
        let ch = davies_superoperator(&d);
        assert_eq!(compose(&QuantumChannel::identity(), &ch), ch);

        let t1 = davies_superoperator(&d.with_t(0.4).unwrap());
        let t2 = davies_superoperator(&d.with_t(1.1).unwrap());
        let sum = davies_superoperator(&d.with_t(1.5).unwrap());
        assert!(compose(&t1, &t2).superoperator().max_abs_diff(sum.superoperator()) < 1e-12);
    }

    #[test]
    fn composition_order_matters() {
        // a bit flip does not commute with amplitude relaxation
        let flip = QuantumChannel::from_linear_map(|x| {
            let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
            x.conjugate_by(&m)
        })
        .unwrap();
        let relax = davies_superoperator(&params(0.1, 1.0, 0.5, 1.0, 1.0));
        let ab = compose(&flip, &relax);
        let ba = compose(&relax, &flip);
        assert!(ab.superoperator().max_abs_diff(ba.superoperator()) > 1e-3);
        let rho = PureState::zero().density();
        let x = ab.apply_state(&rho).unwrap();
        let y = flip.apply_state(&relax.apply_state(&rho).unwrap()).unwrap();
        assert!(x.matrix().max_abs_diff(y.matrix()) < 1e-15);
    }

    #[test]
    fn gibbs_is_fixed() {
        let g = gibbs_state(0.3).unwrap();
        for t in [0.0, 0.5, 3.0, 40.0] {
            let out = davies_apply(&params(0.3, 1.0, 1.0, 1.0, t), &g).unwrap();
            assert!(out.matrix().max_abs_diff(g.matrix()) < 1e-12);
        }
    }

    #[test]
    fn contractive_on_a_pair() {
        let d = params(0.4, 2.0, 1.5, 1.0, 0.3);
        let a = sample_state();
        let b = PureState::minus().density();
        let before = trace_distance(&a, &b).unwrap();
        let after = trace_distance(&davies_apply(&d, &a).unwrap(), &davies_apply(&d, &b).unwrap()).unwrap();
        assert!(after <= before + 1e-12);
    }
}
