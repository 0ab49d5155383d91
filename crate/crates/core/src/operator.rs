//! Dense complex operators, pure states and density matrices on qubit registers.
//!
//! Qubit 1 is the leftmost tensor factor, i.e. the most significant bit of a
//! basis index. A 5-qubit ket `|00101>` is basis index `0b00101 = 5`. Public
//! functions that take qubit indices are 0-based (`0` is the leftmost qubit).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const STATE_NORM_TOL: f64 = 1e-12;
pub const DENSITY_HERMITIAN_TOL: f64 = 1e-10;
pub const DENSITY_TRACE_TOL: f64 = 1e-9;
pub const DENSITY_POSITIVITY_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn qubit_dim(n_qubits: usize) -> usize {
    1usize << n_qubits
}

/// Dense `2^n x 2^n` complex matrix labelled with its qubit count.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    n_qubits: usize,
    mat: DMatrix<Complex64>,
}

impl Operator {
    pub fn from_matrix(n_qubits: usize, mat: DMatrix<Complex64>) -> Result<Self> {
        let dim = qubit_dim(n_qubits);
        if n_qubits == 0 || mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::NotQubitOperator {
                n_qubits,
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        Ok(Self { n_qubits, mat })
    }

    pub fn identity(n_qubits: usize) -> Self {
        let dim = qubit_dim(n_qubits);
        Self {
            n_qubits,
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(n_qubits: usize) -> Self {
        let dim = qubit_dim(n_qubits);
        Self {
            n_qubits,
            mat: DMatrix::zeros(dim, dim),
        }
    }

    /// `|ket><bra|` for computational-basis bit strings such as `"00101"`.
    pub fn ket_bra(ket: &str, bra: &str) -> Result<Self> {
        let k = basis_index(ket)?;
        let b = basis_index(bra)?;
        if ket.len() != bra.len() {
            return Err(Error::DimensionMismatch {
                expected: ket.len(),
                found: bra.len(),
            });
        }
        let mut op = Self::zeros(ket.len());
        op.mat[(k, b)] = ONE;
        Ok(op)
    }

    /// Projector onto the span of the listed basis kets.
    pub fn basis_projector(n_qubits: usize, indices: &[usize]) -> Result<Self> {
        let mut op = Self::zeros(n_qubits);
        for &i in indices {
            if i >= op.dim() {
                return Err(Error::DimensionMismatch {
                    expected: op.dim(),
                    found: i,
                });
            }
            op.mat[(i, i)] = ONE;
        }
        Ok(op)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            mat: self.mat.adjoint(),
        }
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            mat: &self.mat * &other.mat,
        })
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            mat: &self.mat + &other.mat,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            n_qubits: self.n_qubits,
            mat: &self.mat - &other.mat,
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            n_qubits: self.n_qubits,
            mat: &self.mat * c,
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            mat: self.mat.kronecker(&other.mat),
        }
    }

    pub fn apply(&self, state: &StateVector) -> Result<DVector<Complex64>> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        Ok(&self.mat * state.amplitudes())
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.mat)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok(max_abs(&(&self.mat - &other.mat)))
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.mat)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = self.mat.adjoint() * &self.mat;
        max_abs(&(prod - DMatrix::identity(self.dim(), self.dim()))) <= tol
    }
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub(crate) fn hermiticity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

fn basis_index(bits: &str) -> Result<usize> {
    if bits.is_empty() {
        return Err(Error::InvalidState("empty basis label".into()));
    }
    bits.chars()
        .enumerate()
        .try_fold(0usize, |acc, (pos, c)| match c {
            '0' => Ok(acc << 1),
            '1' => Ok((acc << 1) | 1),
            _ => Err(Error::InvalidState(format!(
                "basis label {bits:?} has non-binary character {c:?} at position {pos}"
            ))),
        })
}

/// Normalized pure state on `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: DVector<Complex64>,
}

impl StateVector {
    pub fn new(n_qubits: usize, amps: DVector<Complex64>) -> Result<Self> {
        if n_qubits == 0 || amps.len() != qubit_dim(n_qubits) {
            return Err(Error::DimensionMismatch {
                expected: qubit_dim(n_qubits),
                found: amps.len(),
            });
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::InvalidState(format!(
                "state norm is {norm}, expected 1"
            )));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Computational basis state from a bit string, e.g. `"100"`.
    pub fn basis(bits: &str) -> Result<Self> {
        let idx = basis_index(bits)?;
        let mut amps = DVector::zeros(qubit_dim(bits.len()));
        amps[idx] = ONE;
        Ok(Self {
            n_qubits: bits.len(),
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            amps: self.amps.kronecker(&other.amps),
        }
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.amps.dotc(&other.amps))
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and numerical positivity.
    pub fn new(op: Operator) -> Result<Self> {
        let dm = Self { op };
        dm.validate()?;
        Ok(dm)
    }

    /// Wraps an operator without checking the density-matrix invariants.
    /// Used for intermediate integrator states, which are checked separately.
    pub fn new_unchecked(op: Operator) -> Self {
        Self { op }
    }

    pub fn from_pure(state: &StateVector) -> Self {
        let a = state.amplitudes();
        Self {
            op: Operator {
                n_qubits: state.n_qubits(),
                mat: a * a.adjoint(),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.op.hermiticity_deviation();
        if herm > DENSITY_HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = self.op.trace();
        if (tr - ONE).norm() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}")));
        }
        let min_ev = self.min_eigenvalue();
        if min_ev < -DENSITY_POSITIVITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_ev:.3e}"
            )));
        }
        Ok(())
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn into_operator(self) -> Operator {
        self.op
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.op.mat
    }

    pub fn n_qubits(&self) -> usize {
        self.op.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn trace(&self) -> Complex64 {
        self.op.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.op.mat)[0]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.op.mat)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            op: self.op.kron(&other.op),
        }
    }

    /// `<psi| rho |psi>`.
    pub fn expectation_in(&self, state: &StateVector) -> Result<Complex64> {
        let v = self.op.apply(state)?;
        Ok(state.amplitudes().dotc(&v))
    }
}

fn single_pauli(c: char) -> Option<DMatrix<Complex64>> {
    let m = match c {
        'I' => [ONE, ZERO, ZERO, ONE],
        'X' => [ZERO, ONE, ONE, ZERO],
        'Y' => [ZERO, -I, I, ZERO],
        'Z' => [ONE, ZERO, ZERO, -ONE],
        _ => return None,
    };
    Some(DMatrix::from_row_slice(2, 2, &m))
}

/// Tensor product of single-qubit Paulis, leftmost character on qubit 1.
pub fn pauli_string(spec: &str) -> Result<Operator> {
    if spec.is_empty() {
        return Err(Error::EmptyPauliString);
    }
    let mut mat = DMatrix::from_element(1, 1, ONE);
    for (position, ch) in spec.chars().enumerate() {
        let p = single_pauli(ch).ok_or(Error::InvalidPauli { position, ch })?;
        mat = mat.kronecker(&p);
    }
    Ok(Operator {
        n_qubits: spec.chars().count(),
        mat,
    })
}

/// The single-qubit lowering operator `|0><1|`.
pub fn lowering() -> Operator {
    let mut op = Operator::zeros(1);
    op.mat[(0, 1)] = ONE;
    op
}

pub fn kron_list(ops: &[Operator]) -> Result<Operator> {
    let (first, rest) = ops.split_first().ok_or(Error::EmptyOperatorList)?;
    Ok(rest.iter().fold(first.clone(), |acc, op| acc.kron(op)))
}

/// Places `op` on the listed contiguous qubit position inside an `n_qubits`
/// register, identity elsewhere.
pub fn embed(op: &Operator, first_qubit: usize, n_qubits: usize) -> Result<Operator> {
    let last = first_qubit + op.n_qubits();
    if last > n_qubits {
        return Err(Error::QubitIndexOutOfRange {
            index: last - 1,
            n_qubits,
        });
    }
    let mut parts = Vec::with_capacity(3);
    if first_qubit > 0 {
        parts.push(Operator::identity(first_qubit));
    }
    parts.push(op.clone());
    if last < n_qubits {
        parts.push(Operator::identity(n_qubits - last));
    }
    kron_list(&parts)
}

/// Reduced density matrix on the `keep` qubits (0-based), in their original
/// relative order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::EmptyKeepSet);
    }
    let n = rho.n_qubits();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&q| q >= n) {
        return Err(Error::QubitIndexOutOfRange {
            index: bad,
            n_qubits: n,
        });
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();

    // Bit position of qubit q inside a basis index (qubit 0 is the MSB).
    let shift = |q: usize| n - 1 - q;
    let scatter = |bits: usize, qubits: &[usize]| -> usize {
        qubits.iter().enumerate().fold(0, |acc, (k, &q)| {
            let bit = (bits >> (qubits.len() - 1 - k)) & 1;
            acc | (bit << shift(q))
        })
    };

    let kd = 1usize << kept.len();
    let td = 1usize << traced.len();
    let kept_offsets: Vec<usize> = (0..kd).map(|i| scatter(i, &kept)).collect();
    let traced_offsets: Vec<usize> = (0..td).map(|b| scatter(b, &traced)).collect();

    let m = rho.matrix();
    let reduced = DMatrix::from_fn(kd, kd, |i, j| {
        traced_offsets
            .iter()
            .map(|&b| m[(kept_offsets[i] | b, kept_offsets[j] | b)])
            .sum()
    });
    Ok(DensityMatrix::new_unchecked(Operator {
        n_qubits: kept.len(),
        mat: reduced,
    }))
}

pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.checked_mul(b)?.checked_sub(&b.checked_mul(a)?)
}

/// `exp(-i h t)` for Hermitian `h`, through its eigendecomposition.
pub fn expm_hermitian(h: &Operator, t: f64) -> Result<Operator> {
    let deviation = h.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let sym = (&h.mat + h.mat.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&e| (-I * e * t).exp()),
    );
    let mut scaled = v.clone();
    for (mut col, p) in scaled.column_iter_mut().zip(phases.iter()) {
        col *= *p;
    }
    Ok(Operator {
        n_qubits: h.n_qubits,
        mat: scaled * v.adjoint(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_op_close(a: &Operator, b: &Operator, tol: f64) {
        let d = a.max_abs_diff(b).unwrap();
        assert!(d <= tol, "operators differ by {d:.3e}");
    }

    #[test]
    fn x_flips_zero() {
        let x = pauli_string("X").unwrap();
        let out = x.apply(&StateVector::basis("0").unwrap()).unwrap();
        assert_eq!(out, StateVector::basis("1").unwrap().amplitudes().clone());
    }

    #[test]
    fn zzi_syndrome_sign() {
        let zzi = pauli_string("ZZI").unwrap();
        let s0 = StateVector::basis("000").unwrap();
        let s1 = StateVector::basis("100").unwrap();
        assert_eq!(zzi.apply(&s0).unwrap(), s0.amplitudes().clone());
        assert_eq!(zzi.apply(&s1).unwrap(), -s1.amplitudes().clone());
    }

    #[test]
    fn identity_string() {
        assert_eq!(pauli_string("II").unwrap(), Operator::identity(2));
    }

    #[test]
    fn invalid_pauli_names_position() {
        match pauli_string("XIQZ") {
            Err(Error::InvalidPauli { position, ch }) => {
                assert_eq!(position, 2);
                assert_eq!(ch, 'Q');
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(pauli_string(""), Err(Error::EmptyPauliString)));
    }

    #[test]
    fn kron_list_basics() {
        let i2 = Operator::identity(1);
        assert_eq!(kron_list(&[i2.clone(), i2]).unwrap(), Operator::identity(2));
        let xz = kron_list(&[pauli_string("X").unwrap(), pauli_string("Z").unwrap()]).unwrap();
        let out = xz.apply(&StateVector::basis("00").unwrap()).unwrap();
        assert_eq!(out, StateVector::basis("10").unwrap().amplitudes().clone());
        let a = pauli_string("XY").unwrap();
        let b = pauli_string("Z").unwrap();
        assert_eq!(kron_list(&[a, b]).unwrap().dim(), 8);
        assert!(matches!(kron_list(&[]), Err(Error::EmptyOperatorList)));
    }

    #[test]
    fn partial_trace_product_state() {
        let psi = StateVector::new(1, DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)])).unwrap();
        let rho_s = DensityMatrix::from_pure(&psi);
        let anc = DensityMatrix::from_pure(&StateVector::basis("00").unwrap());
        let full = rho_s.kron(&anc);
        let reduced = partial_trace(&full, &[0]).unwrap();
        assert_op_close(reduced.operator(), rho_s.operator(), 1e-15);
    }

    #[test]
    fn partial_trace_bell_is_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::new(
            2,
            DVector::from_vec(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]),
        )
        .unwrap();
        let reduced = partial_trace(&DensityMatrix::from_pure(&bell), &[0]).unwrap();
        assert_op_close(
            reduced.operator(),
            &Operator::identity(1).scale(c(0.5, 0.0)),
            1e-15,
        );
    }

    #[test]
    fn partial_trace_keeps_relative_order() {
        // |0> (x) |1> (x) |+>; keep qubits 2 and 0 -> state |0>|+> in that order.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::new(1, DVector::from_vec(vec![c(h, 0.0), c(h, 0.0)])).unwrap();
        let psi = StateVector::basis("01").unwrap().kron(&plus);
        let reduced = partial_trace(&DensityMatrix::from_pure(&psi), &[2, 0]).unwrap();
        let expected = DensityMatrix::from_pure(&StateVector::basis("0").unwrap().kron(&plus));
        assert_op_close(reduced.operator(), expected.operator(), 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = DensityMatrix::from_pure(&StateVector::basis("00").unwrap());
        assert!(matches!(
            partial_trace(&rho, &[2]),
            Err(Error::QubitIndexOutOfRange {
                index: 2,
                n_qubits: 2
            })
        ));
        assert!(matches!(partial_trace(&rho, &[]), Err(Error::EmptyKeepSet)));
    }

    #[test]
    fn commutator_identities() {
        let x = pauli_string("X").unwrap();
        let y = pauli_string("Y").unwrap();
        let z = pauli_string("Z").unwrap();
        assert_eq!(commutator(&x, &x).unwrap().max_abs(), 0.0);
        assert_op_close(&commutator(&x, &z).unwrap(), &y.scale(c(0.0, -2.0)), 1e-15);
        let a = pauli_string("XY").unwrap().scale(c(0.3, 1.2));
        assert_eq!(
            commutator(&a, &Operator::identity(2)).unwrap().max_abs(),
            0.0
        );
        assert!(matches!(
            commutator(&x, &Operator::identity(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn expm_zero_generator_is_identity() {
        let u = expm_hermitian(&Operator::zeros(2), 3.7).unwrap();
        assert_op_close(&u, &Operator::identity(2), 1e-15);
    }

    #[test]
    fn expm_pauli_rotation() {
        let x = pauli_string("X").unwrap();
        let u = expm_hermitian(&x, std::f64::consts::FRAC_PI_2).unwrap();
        assert_op_close(&u, &x.scale(c(0.0, -1.0)), 1e-14);
        assert!(u.is_unitary(1e-12));
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let a = Operator::ket_bra("0", "1").unwrap();
        assert!(matches!(
            expm_hermitian(&a, 1.0),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = Operator::identity(1);
        assert!(DensityMatrix::new(bad_trace).is_err());
        let non_psd = Operator::from_matrix(
            1,
            DMatrix::from_row_slice(2, 2, &[c(1.5, 0.0), ZERO, ZERO, c(-0.5, 0.0)]),
        )
        .unwrap();
        assert!(DensityMatrix::new(non_psd).is_err());
        assert!(DensityMatrix::new(Operator::identity(1).scale(c(0.5, 0.0))).is_ok());
    }

    #[test]
    fn state_vector_norm_is_checked() {
        let v = DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(StateVector::new(1, v).is_err());
    }

    #[test]
    fn from_matrix_rejects_wrong_shape() {
        assert!(Operator::from_matrix(2, DMatrix::zeros(3, 3)).is_err());
        assert!(Operator::from_matrix(1, DMatrix::zeros(2, 3)).is_err());
    }
}
