//! Discrete detect / correct / reset cycles of the bit-flip code with an
//! explicit environment, and the algebraic facts behind their Zeno-like
//! confinement of the encoded state.
//!
//! Register layout: 3 code qubits, 2 ancillas, then `n_env` environment qubits.
//! One cycle is `P_A U_AS exp(-i H_SE tau)` with `tau = t / N`; the ancilla
//! projection is kept unnormalized between cycles.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::bitflip::{codespace_projector, encode, LogicalState, CODE_QUBITS, MODEL_QUBITS};
use crate::error::{Error, Result};
use crate::operator::{embed, expm_hermitian, kron_list, pauli_string, Operator, StateVector};

pub const MAX_REGISTER_QUBITS: usize = 10;
pub const PUP_TOL: f64 = 1e-10;
pub const KL_TOL: f64 = 1e-12;
pub const SURVIVAL_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ZenoConfig {
    pub n_env: usize,
    /// Strength of each `A_k (x) B_k` term.
    pub coupling: f64,
    pub total_time: f64,
    pub cycles: usize,
    pub psi0: LogicalState,
    /// Computational-basis index of the initial environment state.
    pub env_state: usize,
    /// Apply the detect/correct unitary each cycle (identity otherwise).
    pub correct: bool,
    /// Project the ancillas onto `|00>` each cycle.
    pub project: bool,
}

impl Default for ZenoConfig {
    fn default() -> Self {
        Self {
            n_env: 3,
            coupling: 0.1,
            total_time: 1.0,
            cycles: 8,
            psi0: LogicalState::zero(),
            env_state: 0,
            correct: true,
            project: true,
        }
    }
}

impl ZenoConfig {
    pub fn tau(&self) -> f64 {
        self.total_time / self.cycles as f64
    }

    pub fn register_qubits(&self) -> usize {
        MODEL_QUBITS + self.n_env
    }

    pub fn validate(&self) -> Result<()> {
        if self.cycles == 0 {
            return Err(Error::InvalidParameter(
                "cycle count must be positive".into(),
            ));
        }
        if !(self.total_time > 0.0 && self.total_time.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "total time must be positive, got {}",
                self.total_time
            )));
        }
        if !self.coupling.is_finite() {
            return Err(Error::InvalidParameter("coupling must be finite".into()));
        }
        if self.n_env == 0 {
            return Err(Error::InvalidParameter(
                "at least one environment qubit is required".into(),
            ));
        }
        if self.register_qubits() > MAX_REGISTER_QUBITS {
            return Err(Error::DimensionGuard {
                dim: 1 << self.register_qubits(),
                limit: 1 << MAX_REGISTER_QUBITS,
            });
        }
        if self.env_state >= 1 << self.n_env {
            return Err(Error::InvalidParameter(format!(
                "environment basis index {} out of range for {} qubits",
                self.env_state, self.n_env
            )));
        }
        Ok(())
    }
}

/// Maps a 5-qubit basis index through CNOT syndrome extraction (ancilla 1 ^=
/// q1 ^ q2, ancilla 2 ^= q2 ^ q3) and, when `correct` is set, the
/// ancilla-conditioned flips of the lookup table.
fn cycle_permutation(index: usize, correct: bool) -> usize {
    let code = index >> 2;
    let anc = index & 0b11;
    let (q1, q2, q3) = ((code >> 2) & 1, (code >> 1) & 1, code & 1);
    let anc = anc ^ (((q1 ^ q2) << 1) | (q2 ^ q3));
    let code = if correct {
        match anc {
            0b10 => code ^ 0b100,
            0b11 => code ^ 0b010,
            0b01 => code ^ 0b001,
            _ => code,
        }
    } else {
        code
    };
    (code << 2) | anc
}

fn permutation_operator(n_qubits: usize, map: impl Fn(usize) -> usize) -> Operator {
    let dim = 1 << n_qubits;
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        m[(map(col), col)] = Complex64::new(1.0, 0.0);
    }
    Operator::from_matrix(n_qubits, m).expect("square power-of-two matrix")
}

/// Detect-and-correct unitary on code qubits plus ancillas, built as the
/// permutation given by the syndrome truth table.
pub fn build_cycle_unitary() -> Operator {
    permutation_operator(MODEL_QUBITS, |i| cycle_permutation(i, true))
}

/// Syndrome extraction only (the CNOT stage), without corrections.
pub fn build_syndrome_unitary() -> Operator {
    permutation_operator(MODEL_QUBITS, |i| cycle_permutation(i, false))
}

/// `I (x) |00><00|` on code qubits plus ancillas.
pub fn ancilla_projector() -> Operator {
    Operator::identity(CODE_QUBITS).kron(&Operator::ket_bra("00", "00").expect("valid"))
}

/// `sum_k eps A_k (x) I_A (x) B_k` with `A_k` the single flips of the code and
/// `B_k = X` on environment qubit `k mod n_env`.
pub fn system_environment_hamiltonian(n_env: usize, coupling: f64) -> Result<Operator> {
    let n = MODEL_QUBITS + n_env;
    let x = pauli_string("X")?;
    let mut h = Operator::zeros(n);
    for k in 0..CODE_QUBITS {
        let a = embed(&x, k, n)?;
        let b = embed(&x, MODEL_QUBITS + k % n_env, n)?;
        h = h.checked_add(&a.checked_mul(&b)?.scale(Complex64::new(coupling, 0.0)))?;
    }
    Ok(h)
}

#[derive(Clone, Debug)]
pub struct CycleOperators {
    /// Detect/correct unitary on code qubits and ancillas (5 qubits).
    pub u_as: Operator,
    /// Ancilla projector `I_S (x) |00><00|` (5 qubits).
    pub p_a: Operator,
    /// Codespace projector on the code qubits (3 qubits).
    pub pi_s: Operator,
    /// System-environment coupling on the full register.
    pub h_se: Operator,
    pub n_env: usize,
}

impl CycleOperators {
    pub fn new(n_env: usize, coupling: f64) -> Result<Self> {
        Self::with_unitary(build_cycle_unitary(), n_env, coupling)
    }

    pub fn with_unitary(u_as: Operator, n_env: usize, coupling: f64) -> Result<Self> {
        if u_as.n_qubits() != MODEL_QUBITS {
            return Err(Error::DimensionMismatch {
                expected: 1 << MODEL_QUBITS,
                found: u_as.dim(),
            });
        }
        Ok(Self {
            u_as,
            p_a: ancilla_projector(),
            pi_s: codespace_projector(),
            h_se: system_environment_hamiltonian(n_env, coupling)?,
            n_env,
        })
    }

    /// `P_A Pi_S` on code qubits plus ancillas.
    pub fn protected_projector(&self) -> Operator {
        self.pi_s
            .kron(&Operator::identity(2))
            .checked_mul(&self.p_a)
            .expect("same dimension")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PupCheck {
    pub holds: bool,
    pub max_deviation: f64,
}

/// `P_A U_AS P_A == P_A Pi_S` within [`PUP_TOL`].
pub fn verify_pup_property(ops: &CycleOperators) -> PupCheck {
    let lhs = ops
        .p_a
        .checked_mul(&ops.u_as)
        .and_then(|m| m.checked_mul(&ops.p_a))
        .expect("5-qubit operators");
    let rhs = ops.protected_projector();
    let max_deviation = lhs.max_abs_diff(&rhs).expect("same dimension");
    PupCheck {
        holds: max_deviation < PUP_TOL,
        max_deviation,
    }
}

/// `Pi_S E Pi_S` for a 3-qubit operator `E`.
pub fn codespace_sandwich(e: &Operator) -> Result<Operator> {
    let pi = codespace_projector();
    pi.checked_mul(e)?.checked_mul(&pi)
}

/// `Pi_S E Pi_S == 0` for each 3-qubit error `E`.
pub fn verify_kl_condition(errors: &[Operator]) -> Result<Vec<bool>> {
    errors
        .iter()
        .map(|e| Ok(codespace_sandwich(e)?.max_abs() < KL_TOL))
        .collect()
}

/// Largest entry of `(P_A Pi_S) H_SE (P_A Pi_S)` on the full register.
pub fn effective_hamiltonian_norm(ops: &CycleOperators) -> Result<f64> {
    let p = ops
        .protected_projector()
        .kron(&Operator::identity(ops.n_env));
    Ok(p.checked_mul(&ops.h_se)?.checked_mul(&p)?.max_abs())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZenoRunReport {
    pub cycles: usize,
    pub tau: f64,
    /// Squared norm left after all projections.
    pub survival_probability: f64,
    /// `|| phi / |phi| - phi_0 ||` for the final state.
    pub deviation: f64,
    /// Norm after each cycle.
    pub per_cycle_norms: Vec<f64>,
}

/// Initial register state `encode(psi0) (x) |00> (x) |e>`.
pub fn initial_register(cfg: &ZenoConfig) -> Result<StateVector> {
    let mut env = DVector::zeros(1 << cfg.n_env);
    env[cfg.env_state] = Complex64::new(1.0, 0.0);
    let env = StateVector::new(cfg.n_env, env)?;
    Ok(encode(&cfg.psi0)
        .kron(&StateVector::basis("00")?)
        .kron(&env))
}

pub fn run_zeno_cycles(cfg: &ZenoConfig) -> Result<ZenoRunReport> {
    cfg.validate()?;
    let ops = CycleOperators::new(cfg.n_env, cfg.coupling)?;
    run_with_operators(cfg, &ops)
}

/// Same as [`run_zeno_cycles`] with caller-supplied cycle operators.
pub fn run_with_operators(cfg: &ZenoConfig, ops: &CycleOperators) -> Result<ZenoRunReport> {
    cfg.validate()?;
    if ops.n_env != cfg.n_env {
        return Err(Error::DimensionMismatch {
            expected: cfg.n_env,
            found: ops.n_env,
        });
    }
    let tau = cfg.tau();
    let env_id = Operator::identity(cfg.n_env);
    let error_step = expm_hermitian(&ops.h_se, tau)?;
    let correct = if cfg.correct {
        ops.u_as.kron(&env_id)
    } else {
        Operator::identity(cfg.register_qubits())
    };
    let project = if cfg.project {
        kron_list(&[ops.p_a.clone(), env_id])?
    } else {
        Operator::identity(cfg.register_qubits())
    };
    let cycle = project.checked_mul(&correct)?.checked_mul(&error_step)?;

    let phi0 = initial_register(cfg)?;
    let mut phi = phi0.amplitudes().clone();
    let mut per_cycle_norms = Vec::with_capacity(cfg.cycles);
    for n in 1..=cfg.cycles {
        phi = cycle.matrix() * &phi;
        let norm = phi.norm();
        if norm * norm < SURVIVAL_FLOOR {
            return Err(Error::SurvivalUnderflow {
                cycle: n,
                survival: norm * norm,
            });
        }
        per_cycle_norms.push(norm);
    }
    let norm = phi.norm();
    let deviation = (&phi / Complex64::new(norm, 0.0) - phi0.amplitudes()).norm();
    Ok(ZenoRunReport {
        cycles: cfg.cycles,
        tau,
        survival_probability: norm * norm,
        deviation,
        per_cycle_norms,
    })
}
