use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use cqec::lindblad::{dissipator, rhs, DissipatorTerm, MasterEquationSpec};
use cqec::operator::{expm_hermitian, partial_trace, pauli_string, DensityMatrix, Operator};

fn matrix(n_qubits: usize) -> impl Strategy<Value = Operator> {
    let d = 1usize << n_qubits;
    prop::collection::vec(-1.0f64..1.0, 2 * d * d).prop_map(move |v| {
        let m = DMatrix::from_fn(d, d, |i, j| {
            let k = 2 * (i * d + j);
            Complex64::new(v[k], v[k + 1])
        });
        Operator::from_matrix(n_qubits, m).unwrap()
    })
}

fn hermitian(n_qubits: usize) -> impl Strategy<Value = Operator> {
    matrix(n_qubits).prop_map(|a| {
        let h = a.checked_add(&a.adjoint()).unwrap();
        h.scale(Complex64::new(0.5, 0.0))
    })
}

fn density(n_qubits: usize) -> impl Strategy<Value = DensityMatrix> {
    matrix(n_qubits).prop_map(|a| {
        let m = a.matrix() * a.matrix().adjoint();
        let m = &m / m.trace();
        DensityMatrix::new(Operator::from_matrix(a.n_qubits(), m).unwrap()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pauli_strings_square_to_identity(s in "[IXYZ]{1,4}") {
        let p = pauli_string(&s).unwrap();
        let sq = p.checked_mul(&p).unwrap();
        prop_assert!(sq.max_abs_diff(&Operator::identity(s.len())).unwrap() < 1e-15);
        prop_assert!(p.is_hermitian(1e-15));
    }

    #[test]
    fn kron_is_associative(a in matrix(1), b in matrix(2), c in matrix(1)) {
        let left = a.kron(&b).kron(&c);
        let right = a.kron(&b.kron(&c));
        prop_assert!(left.max_abs_diff(&right).unwrap() < 1e-14);
    }

    #[test]
    fn unitary_group_law(h in hermitian(2), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let us = expm_hermitian(&h, s).unwrap();
        let ut = expm_hermitian(&h, t).unwrap();
        let ust = expm_hermitian(&h, s + t).unwrap();
        let prod = us.checked_mul(&ut).unwrap();
        prop_assert!(prod.max_abs_diff(&ust).unwrap() < 1e-10);
        prop_assert!(ust.is_unitary(1e-10));
    }

    #[test]
    fn partial_trace_yields_a_state(rho in density(3), keep in prop::sample::subsequence(vec![0usize, 1, 2], 1..=2)) {
        let reduced = partial_trace(&rho, &keep).unwrap();
        prop_assert!(reduced.validate().is_ok());
        prop_assert_eq!(reduced.n_qubits(), keep.len());
    }

    #[test]
    fn dissipator_is_traceless(a in matrix(2), rho in density(2)) {
        let d = dissipator(&a, &rho).unwrap();
        prop_assert!(d.trace().norm() < 1e-12);
    }

    #[test]
    fn generator_preserves_hermiticity_and_trace(
        h in hermitian(2),
        a in matrix(2),
        rate in 0.0f64..5.0,
        rho in density(2),
    ) {
        let spec = MasterEquationSpec::new(h, 1.7, vec![DissipatorTerm::new(rate, a).unwrap()]).unwrap();
        let out = rhs(&spec, &rho).unwrap();
        prop_assert!(out.is_hermitian(1e-12));
        prop_assert!(out.trace().norm() < 1e-12);
    }
}
