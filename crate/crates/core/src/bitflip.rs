//! The three-qubit bit-flip code corrected continuously by a coupling
//! Hamiltonian and ancilla cooling.
//!
//! Register layout for the 5-qubit model: qubits 1-3 carry the code, qubit 4
//! is ancilla 1 (records the `ZZI` syndrome) and qubit 5 is ancilla 2 (records
//! `IZZ`).

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lindblad::{DissipatorTerm, MasterEquationSpec};
use crate::operator::{
    commutator, embed, lowering, partial_trace, pauli_string, DensityMatrix, Operator, StateVector,
    HERMITIAN_TOL, STATE_NORM_TOL,
};

pub const CODE_QUBITS: usize = 3;
pub const ANCILLA_QUBITS: usize = 2;
pub const MODEL_QUBITS: usize = CODE_QUBITS + ANCILLA_QUBITS;

/// `(ket, bra)` pairs of the detection Hamiltonian, before adding `h.c.`
/// Each maps a single-error state with ancillas `00` onto the same state with
/// the matching syndrome written into the ancillas.
pub const DETECTION_TERMS: [(&str, &str); 6] = [
    ("00101", "00100"),
    ("11001", "11000"),
    ("10010", "10000"),
    ("01110", "01100"),
    ("01011", "01000"),
    ("10111", "10100"),
];

/// `(ket, bra)` pairs of the correction Hamiltonian, before adding `h.c.`
/// Each flips the erroneous code qubit back while the ancillas keep the
/// syndrome.
pub const CORRECTION_TERMS: [(&str, &str); 6] = [
    ("00001", "00101"),
    ("11101", "11001"),
    ("00010", "10010"),
    ("11110", "01110"),
    ("00011", "01011"),
    ("11111", "10111"),
];

/// Reference Pauli expansion of the detection Hamiltonian: code-qubit prefix
/// times a signed sum of ancilla strings.
pub const DETECTION_PAULI_REFERENCE: [(&str, [(i8, &str); 6]); 4] = [
    (
        "III",
        [
            (1, "IX"),
            (1, "XI"),
            (1, "XX"),
            (1, "XZ"),
            (-1, "YY"),
            (1, "ZX"),
        ],
    ),
    (
        "IZZ",
        [
            (-1, "IX"),
            (1, "XI"),
            (-1, "XX"),
            (1, "XZ"),
            (1, "YY"),
            (-1, "ZX"),
        ],
    ),
    (
        "ZIZ",
        [
            (-1, "IX"),
            (-1, "XI"),
            (1, "XX"),
            (-1, "XZ"),
            (-1, "YY"),
            (-1, "ZX"),
        ],
    ),
    (
        "ZZI",
        [
            (1, "IX"),
            (-1, "XI"),
            (-1, "XX"),
            (-1, "XZ"),
            (1, "YY"),
            (1, "ZX"),
        ],
    ),
];

/// Reference Pauli expansion of the correction Hamiltonian: ancilla suffix
/// times a signed sum of code-qubit strings.
pub const CORRECTION_PAULI_REFERENCE: [(&str, [(i8, &str); 6]); 4] = [
    (
        "II",
        [
            (1, "IIX"),
            (1, "IXI"),
            (1, "XII"),
            (1, "XZZ"),
            (1, "ZXZ"),
            (1, "ZZX"),
        ],
    ),
    (
        "IZ",
        [
            (-1, "IIX"),
            (-1, "IXI"),
            (1, "XII"),
            (1, "XZZ"),
            (-1, "ZXZ"),
            (-1, "ZZX"),
        ],
    ),
    (
        "ZI",
        [
            (1, "IIX"),
            (-1, "IXI"),
            (-1, "XII"),
            (-1, "XZZ"),
            (-1, "ZXZ"),
            (1, "ZZX"),
        ],
    ),
    (
        "ZZ",
        [
            (-1, "IIX"),
            (1, "IXI"),
            (-1, "XII"),
            (-1, "XZZ"),
            (1, "ZXZ"),
            (-1, "ZZX"),
        ],
    ),
];

/// Logical amplitudes `alpha |0>_L + beta |1>_L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogicalState {
    alpha: Complex64,
    beta: Complex64,
}

impl LogicalState {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::InvalidState(format!(
                "|alpha|^2 + |beta|^2 = {norm}, expected 1"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn real(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0))
    }

    pub fn zero() -> Self {
        Self {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    pub fn one() -> Self {
        Self {
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(1.0, 0.0),
        }
    }

    /// `(|0> + |1>) / sqrt 2`
    pub fn plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { alpha: h, beta: h }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }
}

/// Repetition encoding `alpha |000> + beta |111>`.
pub fn encode(psi: &LogicalState) -> StateVector {
    let mut amps = DVector::zeros(1 << CODE_QUBITS);
    amps[0] = psi.alpha;
    amps[7] = psi.beta;
    StateVector::new(CODE_QUBITS, amps).expect("LogicalState is normalized")
}

/// Encoded state with both ancillas in `|0>`, as a density matrix.
pub fn initial_state(psi: &LogicalState) -> DensityMatrix {
    let full = encode(psi).kron(&StateVector::basis("00").expect("valid label"));
    DensityMatrix::from_pure(&full)
}

/// Sign of a syndrome expectation value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// `(<ZZI>, <IZZ>)`.
pub type Syndrome = (Sign, Sign);

/// Codespace, syndrome operators and lookup table of the bit-flip code.
#[derive(Clone, Debug)]
pub struct CodeModel {
    pub codespace_projector: Operator,
    pub syndrome_ops: (Operator, Operator),
    pub correction_table: BTreeMap<Syndrome, Option<&'static str>>,
    pub error_ops: [Operator; 3],
}

impl CodeModel {
    pub fn new() -> Self {
        let correction_table = BTreeMap::from([
            ((Sign::Plus, Sign::Plus), None),
            ((Sign::Minus, Sign::Plus), Some("XII")),
            ((Sign::Plus, Sign::Minus), Some("IIX")),
            ((Sign::Minus, Sign::Minus), Some("IXI")),
        ]);
        Self {
            codespace_projector: codespace_projector(),
            syndrome_ops: (
                pauli_string("ZZI").expect("valid"),
                pauli_string("IZZ").expect("valid"),
            ),
            correction_table,
            error_ops: ["XII", "IXI", "IIX"].map(|s| pauli_string(s).expect("valid")),
        }
    }

    pub fn correction(&self, syndrome: Syndrome) -> Option<&'static str> {
        self.correction_table[&syndrome]
    }
}

impl Default for CodeModel {
    fn default() -> Self {
        Self::new()
    }
}

/// `|000><000| + |111><111|`.
pub fn codespace_projector() -> Operator {
    Operator::basis_projector(CODE_QUBITS, &[0, 7]).expect("indices in range")
}

fn eigen_sign(op: &Operator, state: &StateVector, name: &str) -> Result<Sign> {
    let image = op.apply(state)?;
    let amps = state.amplitudes();
    let dist = |s: f64| (&image - amps * Complex64::new(s, 0.0)).norm();
    if dist(1.0) < 1e-10 {
        Ok(Sign::Plus)
    } else if dist(-1.0) < 1e-10 {
        Ok(Sign::Minus)
    } else {
        Err(Error::AmbiguousSyndrome(name.to_string()))
    }
}

/// Syndrome of a 3-qubit state that must be an eigenstate of both `ZZI` and
/// `IZZ`.
pub fn syndrome_signs(state: &StateVector) -> Result<Syndrome> {
    if state.n_qubits() != CODE_QUBITS {
        return Err(Error::DimensionMismatch {
            expected: 1 << CODE_QUBITS,
            found: state.dim(),
        });
    }
    let model = CodeModel::new();
    Ok((
        eigen_sign(&model.syndrome_ops.0, state, "ZZI")?,
        eigen_sign(&model.syndrome_ops.1, state, "IZZ")?,
    ))
}

fn hermitian_from_terms(terms: &[(&str, &str)]) -> Operator {
    let sum = terms
        .iter()
        .map(|(k, b)| Operator::ket_bra(k, b).expect("valid labels"))
        .fold(Operator::zeros(MODEL_QUBITS), |acc, t| {
            acc.checked_add(&t).expect("same dimension")
        });
    sum.checked_add(&sum.adjoint()).expect("same dimension")
}

pub fn build_detection_hamiltonian() -> Operator {
    hermitian_from_terms(&DETECTION_TERMS)
}

pub fn build_correction_hamiltonian() -> Operator {
    hermitian_from_terms(&CORRECTION_TERMS)
}

/// `H_D + H_C + i [H_D, H_C]`.
pub fn build_coupling_hamiltonian() -> Operator {
    let hd = build_detection_hamiltonian();
    let hc = build_correction_hamiltonian();
    let bch = commutator(&hd, &hc)
        .expect("same dimension")
        .scale(Complex64::new(0.0, 1.0));
    hd.checked_add(&hc)
        .and_then(|s| s.checked_add(&bch))
        .expect("same dimension")
}

fn check_rate(name: &str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativeRate {
            name: name.to_string(),
            value,
        })
    }
}

/// Bit flips at rate `gamma` on the code qubits, the coupling Hamiltonian at
/// strength `kappa`, and cooling of both ancillas at rate `lambda`. With
/// `errors_on_ancillas` the ancillas also flip at rate `gamma`.
pub fn build_model(
    gamma: f64,
    kappa: f64,
    lambda: f64,
    errors_on_ancillas: bool,
) -> Result<MasterEquationSpec> {
    check_rate("gamma", gamma)?;
    check_rate("kappa", kappa)?;
    check_rate("lambda", lambda)?;

    let x = pauli_string("X")?;
    let sm = lowering();
    let mut terms = Vec::with_capacity(7);
    for q in 0..CODE_QUBITS {
        terms.push(DissipatorTerm::new(gamma, embed(&x, q, MODEL_QUBITS)?)?);
    }
    for q in CODE_QUBITS..MODEL_QUBITS {
        terms.push(DissipatorTerm::new(lambda, embed(&sm, q, MODEL_QUBITS)?)?);
    }
    if errors_on_ancillas {
        for q in CODE_QUBITS..MODEL_QUBITS {
            terms.push(DissipatorTerm::new(gamma, embed(&x, q, MODEL_QUBITS)?)?);
        }
    }
    MasterEquationSpec::new(build_coupling_hamiltonian(), kappa, terms)
}

/// Overlap of the reduced code-qubit state with the encoded target.
pub fn fidelity(rho_full: &DensityMatrix, psi: &LogicalState) -> Result<f64> {
    if rho_full.n_qubits() != MODEL_QUBITS {
        return Err(Error::DimensionMismatch {
            expected: 1 << MODEL_QUBITS,
            found: rho_full.dim(),
        });
    }
    let reduced = partial_trace(rho_full, &[0, 1, 2])?;
    Ok(reduced.expectation_in(&encode(psi))?.re)
}

/// Real Pauli coefficients `c_P = tr(P h) / 2^n`, zeros dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliDecomposition {
    pub n_qubits: usize,
    pub terms: BTreeMap<String, f64>,
}

impl PauliDecomposition {
    pub fn reconstruct(&self) -> Result<Operator> {
        self.terms
            .iter()
            .try_fold(Operator::zeros(self.n_qubits), |acc, (s, &c)| {
                acc.checked_add(&pauli_string(s)?.scale(Complex64::new(c, 0.0)))
            })
    }

    /// Common coefficient magnitude, if every nonzero term shares one.
    pub fn uniform_magnitude(&self, tol: f64) -> Option<f64> {
        let mut mags = self.terms.values().map(|c| c.abs());
        let first = mags.next()?;
        mags.all(|m| (m - first).abs() <= tol).then_some(first)
    }
}

fn all_pauli_strings(n: usize) -> Vec<String> {
    (0..1usize << (2 * n))
        .map(|code| {
            (0..n)
                .map(|q| ['I', 'X', 'Y', 'Z'][(code >> (2 * (n - 1 - q))) & 3])
                .collect()
        })
        .collect()
}

pub fn pauli_decomposition(h: &Operator) -> Result<PauliDecomposition> {
    let deviation = h.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = h.n_qubits();
    let norm = (1usize << n) as f64;
    let hm = h.matrix();
    let mut terms = BTreeMap::new();
    for s in all_pauli_strings(n) {
        let p = pauli_string(&s)?;
        let pm = p.matrix();
        // tr(P h) with P having one nonzero per row.
        let mut tr = Complex64::new(0.0, 0.0);
        for i in 0..pm.nrows() {
            for j in 0..pm.ncols() {
                let v = pm[(i, j)];
                if v.norm_sqr() > 0.0 {
                    tr += v * hm[(j, i)];
                }
            }
        }
        let c = tr.re / norm;
        if c.abs() > 1e-12 {
            terms.insert(s, c);
        }
    }
    Ok(PauliDecomposition { n_qubits: n, terms })
}

/// Expand a grouped reference table into `string -> sign`.
pub fn expand_reference(
    groups: &[(&str, [(i8, &str); 6])],
    group_is_prefix: bool,
) -> BTreeMap<String, i8> {
    let mut out = BTreeMap::new();
    for (outer, inner) in groups {
        for (sign, s) in inner {
            let key = if group_is_prefix {
                format!("{outer}{s}")
            } else {
                format!("{s}{outer}")
            };
            out.insert(key, *sign);
        }
    }
    out
}

pub fn detection_reference() -> BTreeMap<String, i8> {
    expand_reference(&DETECTION_PAULI_REFERENCE, true)
}

pub fn correction_reference() -> BTreeMap<String, i8> {
    expand_reference(&CORRECTION_PAULI_REFERENCE, false)
}

/// Outcome of comparing a computed decomposition with a signed string set.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceComparison {
    pub same_strings: bool,
    /// Every coefficient equals `m * sign` for one common `m`.
    pub signs_consistent: bool,
    /// Common magnitude of the computed coefficients.
    pub magnitude: Option<f64>,
    pub missing: Vec<String>,
    pub unexpected: Vec<String>,
}

impl ReferenceComparison {
    pub fn matches(&self) -> bool {
        self.same_strings && self.signs_consistent && self.magnitude.is_some()
    }
}

pub fn compare_with_reference(
    decomposition: &PauliDecomposition,
    reference: &BTreeMap<String, i8>,
) -> ReferenceComparison {
    let missing: Vec<String> = reference
        .keys()
        .filter(|k| !decomposition.terms.contains_key(*k))
        .cloned()
        .collect();
    let unexpected: Vec<String> = decomposition
        .terms
        .keys()
        .filter(|k| !reference.contains_key(*k))
        .cloned()
        .collect();
    let magnitude = decomposition.uniform_magnitude(1e-12);
    let signs_consistent = match decomposition.terms.iter().next() {
        Some((k, &c0)) if reference.contains_key(k) => {
            let m = c0 * f64::from(reference[k]);
            decomposition.terms.iter().all(|(k, &c)| {
                reference
                    .get(k)
                    .is_some_and(|&s| (c - m * f64::from(s)).abs() < 1e-12)
            })
        }
        _ => false,
    };
    ReferenceComparison {
        same_strings: missing.is_empty() && unexpected.is_empty(),
        signs_consistent,
        magnitude,
        missing,
        unexpected,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state5(bits: &str) -> StateVector {
        StateVector::basis(bits).unwrap()
    }

    fn applied(op: &Operator, bits: &str) -> DVector<Complex64> {
        op.apply(&state5(bits)).unwrap()
    }

    fn codeword_with_ancillas(psi: &LogicalState) -> StateVector {
        encode(psi).kron(&StateVector::basis("00").unwrap())
    }

    fn some_states() -> Vec<LogicalState> {
        vec![
            LogicalState::zero(),
            LogicalState::one(),
            LogicalState::plus(),
            LogicalState::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap(),
        ]
    }

    #[test]
    fn detection_term_action() {
        let hd = build_detection_hamiltonian();
        assert_eq!(applied(&hd, "00100"), state5("00101").amplitudes().clone());
        assert!(hd.is_hermitian(0.0));
    }

    #[test]
    fn correction_term_action() {
        let hc = build_correction_hamiltonian();
        assert_eq!(applied(&hc, "00101"), state5("00001").amplitudes().clone());
        assert!(hc.is_hermitian(0.0));
    }

    #[test]
    fn hamiltonians_vanish_on_codespace() {
        let hams = [
            build_detection_hamiltonian(),
            build_correction_hamiltonian(),
            build_coupling_hamiltonian(),
        ];
        for psi in some_states() {
            let v = codeword_with_ancillas(&psi);
            for h in &hams {
                assert_eq!(h.apply(&v).unwrap().norm(), 0.0);
            }
        }
    }

    #[test]
    fn coupling_hamiltonian_is_hermitian_with_nonzero_bch_term() {
        let h = build_coupling_hamiltonian();
        assert!(h.is_hermitian(1e-14));
        let bch = commutator(
            &build_detection_hamiltonian(),
            &build_correction_hamiltonian(),
        )
        .unwrap()
        .scale(Complex64::new(0.0, 1.0));
        assert!(bch.max_abs() > 0.0);
        // i[H_D, H_C] = i(|00001><00100| - |00100><00001| + ...), entries of modulus 1.
        assert_eq!(bch.max_abs(), 1.0);
    }

    #[test]
    fn detection_writes_syndrome_into_ancillas() {
        // For every single flip E and codeword c: H_D (E c (x) |00>) has exactly
        // one ancilla pattern, which equals the Table-I syndrome.
        let hd = build_detection_hamiltonian();
        let model = CodeModel::new();
        for err in ["XII", "IXI", "IIX"] {
            for code in ["000", "111"] {
                let flipped = model.error_ops[["XII", "IXI", "IIX"]
                    .iter()
                    .position(|e| *e == err)
                    .unwrap()]
                .apply(&StateVector::basis(code).unwrap())
                .unwrap();
                let idx = flipped.iter().position(|z| z.norm() > 0.5).unwrap();
                let bits = format!("{idx:03b}");
                let syn = syndrome_signs(&StateVector::basis(&bits).unwrap()).unwrap();
                assert_eq!(model.correction(syn), Some(err));
                let anc = format!(
                    "{}{}",
                    u8::from(syn.0 == Sign::Minus),
                    u8::from(syn.1 == Sign::Minus)
                );
                let out = applied(&hd, &format!("{bits}00"));
                assert_eq!(out, state5(&format!("{bits}{anc}")).amplitudes().clone());
            }
        }
    }

    #[test]
    fn pauli_decomposition_of_single_string() {
        let d = pauli_decomposition(&pauli_string("ZIIII").unwrap()).unwrap();
        assert_eq!(d.terms.len(), 1);
        assert_eq!(d.terms["ZIIII"], 1.0);
    }

    #[test]
    fn pauli_decomposition_reconstructs_detection_hamiltonian() {
        let hd = build_detection_hamiltonian();
        let d = pauli_decomposition(&hd).unwrap();
        assert!(d.reconstruct().unwrap().max_abs_diff(&hd).unwrap() < 1e-12);
    }

    #[test]
    fn pauli_decomposition_rejects_non_hermitian() {
        let a = Operator::ket_bra("00000", "00001").unwrap();
        assert!(matches!(
            pauli_decomposition(&a),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn decompositions_match_reference_sign_pattern() {
        let hd = pauli_decomposition(&build_detection_hamiltonian()).unwrap();
        let cmp = compare_with_reference(&hd, &detection_reference());
        assert!(cmp.matches(), "{cmp:?}");
        assert_eq!(hd.terms.len(), 24);
        assert!(hd.terms.contains_key("IIIIX"));
        assert!(hd.terms.contains_key("IZZXZ"));

        let hc = pauli_decomposition(&build_correction_hamiltonian()).unwrap();
        let cmp = compare_with_reference(&hc, &correction_reference());
        assert!(cmp.matches(), "{cmp:?}");
    }

    #[test]
    fn build_model_default_terms() {
        let spec = build_model(0.05, 100.0, 250.0, false).unwrap();
        let rates: Vec<f64> = spec.dissipators().iter().map(|d| d.rate()).collect();
        assert_eq!(rates, vec![0.05, 0.05, 0.05, 250.0, 250.0]);
        assert_eq!(spec.ham_strength(), 100.0);
        let x1 = pauli_string("XIIII").unwrap();
        assert_eq!(spec.dissipators()[0].jump(), &x1);
        let sm5 = embed(&lowering(), 4, 5).unwrap();
        assert_eq!(spec.dissipators()[4].jump(), &sm5);

        let with_anc = build_model(0.05, 100.0, 250.0, true).unwrap();
        assert_eq!(with_anc.dissipators().len(), 7);
        assert_eq!(
            with_anc.dissipators()[6].jump(),
            &pauli_string("IIIIX").unwrap()
        );
    }

    #[test]
    fn build_model_rejects_negative_rates() {
        assert!(matches!(
            build_model(-1.0, 1.0, 1.0, false),
            Err(Error::NegativeRate { .. })
        ));
        assert!(build_model(0.0, -1.0, 1.0, false).is_err());
        assert!(build_model(0.0, 1.0, f64::NAN, false).is_err());
    }

    #[test]
    fn encode_codewords() {
        assert_eq!(
            encode(&LogicalState::zero()),
            StateVector::basis("000").unwrap()
        );
        assert_eq!(
            encode(&LogicalState::one()),
            StateVector::basis("111").unwrap()
        );
        assert!((encode(&LogicalState::plus()).norm() - 1.0).abs() < 1e-15);
        assert!(LogicalState::real(1.0, 1.0).is_err());
    }

    #[test]
    fn fidelity_examples() {
        for psi in some_states() {
            let f = fidelity(&initial_state(&psi), &psi).unwrap();
            assert!((f - 1.0).abs() < 1e-14);
        }
        let flipped = DensityMatrix::from_pure(&state5("10000"));
        assert_eq!(fidelity(&flipped, &LogicalState::zero()).unwrap(), 0.0);

        let dephased = Operator::ket_bra("00000", "00000")
            .unwrap()
            .checked_add(&Operator::ket_bra("11100", "11100").unwrap())
            .unwrap()
            .scale(Complex64::new(0.5, 0.0));
        let f = fidelity(
            &DensityMatrix::new(dephased).unwrap(),
            &LogicalState::plus(),
        )
        .unwrap();
        assert!((f - 0.5).abs() < 1e-15);

        let wrong = DensityMatrix::from_pure(&StateVector::basis("000").unwrap());
        assert!(fidelity(&wrong, &LogicalState::zero()).is_err());
    }

    #[test]
    fn syndrome_table() {
        let model = CodeModel::new();
        let cases = [
            ("000", (Sign::Plus, Sign::Plus), None),
            ("100", (Sign::Minus, Sign::Plus), Some("XII")),
            ("001", (Sign::Plus, Sign::Minus), Some("IIX")),
            ("010", (Sign::Minus, Sign::Minus), Some("IXI")),
        ];
        for (bits, syn, corr) in cases {
            let s = syndrome_signs(&StateVector::basis(bits).unwrap()).unwrap();
            assert_eq!(s, syn, "{bits}");
            assert_eq!(model.correction(s), corr);
        }
    }

    #[test]
    fn syndrome_of_superposition_across_sectors_is_an_error() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = DVector::zeros(8);
        amps[0] = Complex64::new(h, 0.0);
        amps[4] = Complex64::new(h, 0.0);
        let s = StateVector::new(3, amps).unwrap();
        assert!(matches!(
            syndrome_signs(&s),
            Err(Error::AmbiguousSyndrome(_))
        ));
    }

    #[test]
    fn code_model_invariants() {
        let model = CodeModel::new();
        let pi = &model.codespace_projector;
        assert_eq!(pi.checked_mul(pi).unwrap(), *pi);
        assert_eq!(pi.trace().re, 2.0);
        let (zzi, izz) = &model.syndrome_ops;
        assert_eq!(commutator(zzi, izz).unwrap().max_abs(), 0.0);
        for code in ["000", "111"] {
            let c = StateVector::basis(code).unwrap();
            assert_eq!(zzi.apply(&c).unwrap(), c.amplitudes().clone());
            assert_eq!(izz.apply(&c).unwrap(), c.amplitudes().clone());
        }
        // Each error followed by its table correction restores every codeword.
        for err in &model.error_ops {
            for psi in some_states() {
                let c = encode(&psi);
                let hit = StateVector::new(3, err.apply(&c).unwrap()).unwrap();
                let fix =
                    pauli_string(model.correction(syndrome_signs(&hit).unwrap()).unwrap()).unwrap();
                let restored = fix.apply(&hit).unwrap();
                assert!((restored - c.amplitudes()).norm() < 1e-15);
            }
            let sandwich = pi.checked_mul(err).unwrap().checked_mul(pi).unwrap();
            assert_eq!(sandwich.max_abs(), 0.0);
        }
    }
}
