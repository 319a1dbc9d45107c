//! Fixed unitaries for the three circuits and the generic builders behind them.
//!
//! Qubit `k` of an `n`-qubit register is bit `n - 1 - k` of the basis index,
//! so qubit 0 is the leftmost tensor factor.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::qmat::{tensor, ComplexMatrix, PureState};

/// A square matrix with `U†U = I` to within 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    matrix: ComplexMatrix,
}

impl Unitary {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.qubit_count().is_none() {
            return invalid(format!(
                "unitary must be a square 2^n matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            ));
        }
        let defect = (&matrix.dagger() * &matrix).max_abs_diff(&ComplexMatrix::identity(matrix.rows()));
        if defect > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "matrix is not unitary (|U†U - I| = {defect:e})"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn identity(nqubits: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(1 << nqubits),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn nqubits(&self) -> usize {
        self.matrix.rows().trailing_zeros() as usize
    }

    pub fn dagger(&self) -> Self {
        Self {
            matrix: self.matrix.dagger(),
        }
    }

    /// `self · other` (apply `other` first).
    pub fn then_after(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.try_mul(&other.matrix)?,
        })
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            matrix: tensor(&self.matrix, &other.matrix),
        }
    }

    /// `U|ψ⟩`.
    pub fn apply(&self, psi: &PureState) -> Result<PureState> {
        let out = self.matrix.try_mul(&psi.ket())?;
        PureState::normalize((0..out.rows()).map(|i| out.get(i, 0)).collect())
    }

    fn permutation(nqubits: usize, map: impl Fn(usize) -> usize) -> Self {
        let d = 1usize << nqubits;
        let matrix = ComplexMatrix::from_fn(d, d, |r, c| {
            if map(c) == r {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self { matrix }
    }
}

fn bit(index: usize, qubit: usize, nqubits: usize) -> usize {
    (index >> (nqubits - 1 - qubit)) & 1
}

fn check_pair(a: usize, b: usize, nqubits: usize) -> Result<()> {
    if a == b {
        return invalid(format!("qubits must differ (both {a})"));
    }
    if a >= nqubits || b >= nqubits {
        return invalid(format!("qubit index out of range for {nqubits} qubits"));
    }
    Ok(())
}

pub fn hadamard() -> Unitary {
    let h = FRAC_1_SQRT_2;
    Unitary {
        matrix: ComplexMatrix::from_real(2, 2, &[h, h, h, -h]).unwrap(),
    }
}

/// Two-qubit SWAP.
pub fn swap() -> Unitary {
    swap_qubits(0, 1, 2).unwrap()
}

/// Exchanges qubits `a` and `b` of an `n`-qubit register.
pub fn swap_qubits(a: usize, b: usize, nqubits: usize) -> Result<Unitary> {
    check_pair(a, b, nqubits)?;
    let (sa, sb) = (nqubits - 1 - a, nqubits - 1 - b);
    Ok(Unitary::permutation(nqubits, |idx| {
        let (ba, bb) = ((idx >> sa) & 1, (idx >> sb) & 1);
        if ba == bb {
            idx
        } else {
            idx ^ (1 << sa) ^ (1 << sb)
        }
    }))
}

pub fn cnot(control: usize, target: usize, nqubits: usize) -> Result<Unitary> {
    check_pair(control, target, nqubits)?;
    Ok(Unitary::permutation(nqubits, |idx| {
        if bit(idx, control, nqubits) == 1 {
            idx ^ (1 << (nqubits - 1 - target))
        } else {
            idx
        }
    }))
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ Had`, control on the first qubit.
pub fn controlled_hadamard() -> Unitary {
    let p0 = ComplexMatrix::diagonal(&[1.0, 0.0]);
    let p1 = ComplexMatrix::diagonal(&[0.0, 1.0]);
    let matrix = &tensor(&p0, &ComplexMatrix::identity(2)) + &tensor(&p1, hadamard().matrix());
    Unitary { matrix }
}

/// The distinguishing circuit's coupling, `H_C · SWAP` on (CR, CV).
pub fn fig1_unitary() -> Unitary {
    controlled_hadamard().then_after(&swap()).unwrap()
}

/// The same coupling assembled from its projector sum
/// `|00⟩⟨00| + |01⟩⟨10| + |1+⟩⟨01| + |1−⟩⟨11|`.
pub fn fig1_unitary_projector_form() -> Unitary {
    let ket = |a: &PureState, b: &PureState| tensor(&a.ket(), &b.ket());
    let (zero, one) = (PureState::zero(), PureState::one());
    let (plus, minus) = (PureState::plus(), PureState::minus());
    let terms = [
        (ket(&zero, &zero), ket(&zero, &zero)),
        (ket(&zero, &one), ket(&one, &zero)),
        (ket(&one, &plus), ket(&zero, &one)),
        (ket(&one, &minus), ket(&one, &one)),
    ];
    let matrix = terms
        .iter()
        .fold(ComplexMatrix::zeros(4, 4), |acc, (out, inp)| &acc + &(out * &inp.dagger()));
    Unitary { matrix }
}

/// `CNOT` controlled by T, targeting B, on (B, M, T).
pub fn cnot_tb() -> Unitary {
    cnot(2, 0, 3).unwrap()
}

/// `CNOT` controlled by B, targeting M, on (B, M, T).
pub fn cnot_bm() -> Unitary {
    cnot(0, 1, 3).unwrap()
}

/// SWAP of M and T on (B, M, T).
pub fn swap_mt() -> Unitary {
    swap_qubits(1, 2, 3).unwrap()
}

/// The unproven-theorem circuit `SWAP_MT · CNOT_BM · CNOT_TB` on (B, M, T);
/// `CNOT_TB` acts first.
pub fn fig5_unitary() -> Unitary {
    swap_mt()
        .then_after(&cnot_bm())
        .and_then(|u| u.then_after(&cnot_tb()))
        .unwrap()
}

/// The post-selected circuit's coupling on (SYS, C, B): the distinguishing
/// unitary on (SYS, C), identity on B.
pub fn pctc_system_unitary() -> Unitary {
    fig1_unitary().tensor(&Unitary::identity(1))
}
