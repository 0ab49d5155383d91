//! Structural invariant battery run by the `verify` command.

use std::fmt;

use num_complex::Complex64;

use crate::bitflip::{
    build_correction_hamiltonian, build_coupling_hamiltonian, build_detection_hamiltonian,
    build_model, compare_with_reference, correction_reference, detection_reference, initial_state,
    pauli_decomposition, syndrome_signs, CodeModel, LogicalState,
};
use crate::error::Result;
use crate::lindblad::{liouvillian_matrix, rhs};
use crate::operator::{Operator, StateVector};
use crate::zeno::{
    build_syndrome_unitary, effective_hamiltonian_norm, verify_kl_condition, verify_pup_property,
    CycleOperators,
};

/// Tolerance for quantities that vanish analytically.
const ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed,
            detail: detail.into(),
        }
    }

    fn below(name: &'static str, value: f64, tol: f64) -> Self {
        Self::new(
            name,
            value < tol,
            format!("max deviation {value:.3e} (tol {tol:.0e})"),
        )
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status}  {:<32} {}", self.name, self.detail)
    }
}

fn pauli_check(
    name: &'static str,
    h: &Operator,
    reference: fn() -> std::collections::BTreeMap<String, i8>,
) -> Result<CheckOutcome> {
    let decomposition = pauli_decomposition(h)?;
    let cmp = compare_with_reference(&decomposition, &reference());
    let magnitude = cmp
        .magnitude
        .map_or_else(|| "non-uniform".to_string(), |m| format!("{m}"));
    let detail = format!(
        "{} strings, uniform magnitude {magnitude}, missing {:?}, unexpected {:?}",
        decomposition.terms.len(),
        cmp.missing,
        cmp.unexpected
    );
    Ok(CheckOutcome::new(name, cmp.matches(), detail))
}

fn syndrome_table_check(model: &CodeModel) -> Result<CheckOutcome> {
    let errors = [None, Some("XII"), Some("IXI"), Some("IIX")];
    let mut bad = Vec::new();
    for codeword in ["000", "111"] {
        let base = StateVector::basis(codeword)?;
        for err in errors {
            let state = match err {
                None => base.clone(),
                Some(p) => {
                    let amps = crate::operator::pauli_string(p)?.apply(&base)?;
                    StateVector::new(3, amps)?
                }
            };
            if model.correction(syndrome_signs(&state)?) != err {
                bad.push(format!("{codeword}/{}", err.unwrap_or("III")));
            }
        }
    }
    let detail = if bad.is_empty() {
        "all 8 single-error cases map to their own correction".to_string()
    } else {
        format!("mismatches: {bad:?}")
    };
    Ok(CheckOutcome::new("syndrome-table", bad.is_empty(), detail))
}

/// Run every structural check and return the outcomes in a fixed order.
pub fn run_checks() -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let model = CodeModel::new();

    let ops = CycleOperators::new(3, 0.1)?;
    let pup = verify_pup_property(&ops);
    out.push(CheckOutcome::below(
        "pup-property",
        pup.max_deviation,
        crate::zeno::PUP_TOL,
    ));

    let cnot_only = CycleOperators::with_unitary(build_syndrome_unitary(), 3, 0.1)?;
    let pup = verify_pup_property(&cnot_only);
    out.push(CheckOutcome::below(
        "pup-syndrome-stage-only",
        pup.max_deviation,
        crate::zeno::PUP_TOL,
    ));

    out.push(CheckOutcome::new(
        "cycle-unitary-is-unitary",
        ops.u_as.is_unitary(ZERO_TOL),
        "U_AS^dagger U_AS = I",
    ));

    let kl = verify_kl_condition(&model.error_ops)?;
    out.push(CheckOutcome::new(
        "knill-laflamme",
        kl.iter().all(|&b| b),
        format!("Pi E Pi = 0 for XII, IXI, IIX: {kl:?}"),
    ));

    out.push(syndrome_table_check(&model)?);

    out.push(CheckOutcome::below(
        "zeno-effective-hamiltonian",
        effective_hamiltonian_norm(&ops)?,
        ZERO_TOL,
    ));

    let h = build_coupling_hamiltonian();
    let protected = model
        .codespace_projector
        .kron(&Operator::ket_bra("00", "00")?);
    out.push(CheckOutcome::below(
        "coupling-annihilates-codespace",
        h.checked_mul(&protected)?.max_abs(),
        ZERO_TOL,
    ));

    let spec = build_model(0.0, 100.0, 250.0, false)?;
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let states = [
        LogicalState::zero(),
        LogicalState::one(),
        LogicalState::plus(),
        LogicalState::new(h, Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2))?,
    ];
    let mut worst = 0.0f64;
    for psi in &states {
        worst = worst.max(rhs(&spec, initial_state(psi))?.max_abs());
    }
    out.push(CheckOutcome::below("codespace-stationarity", worst, 1e-9));

    out.push(pauli_check(
        "detection-pauli-strings",
        &build_detection_hamiltonian(),
        detection_reference,
    )?);
    out.push(pauli_check(
        "correction-pauli-strings",
        &build_correction_hamiltonian(),
        correction_reference,
    )?);

    let spec = build_model(0.05, 100.0, 250.0, false)?;
    let l = liouvillian_matrix(&spec)?;
    let d = spec.dim();
    let mut leak = 0.0f64;
    for col in 0..l.ncols() {
        let s: Complex64 = (0..d).map(|i| l[(i * d + i, col)]).sum();
        leak = leak.max(s.norm());
    }
    out.push(CheckOutcome::below(
        "liouvillian-trace-preserving",
        leak,
        1e-9,
    ));

    Ok(out)
}
