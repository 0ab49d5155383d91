//! Markovian master equations `drho/dt = -i k [H, rho] + sum_i r_i D[A_i] rho`.
//!
//! Three independent routes to the same generator live here:
//!
//! * [`rhs`] evaluates the equation directly with dense products and is the
//!   reference form.
//! * [`integrate`] compiles the spec into a sparse effective-Hamiltonian form
//!   and steps it with classical fixed-step RK4.
//! * [`liouvillian_matrix`] builds the column-stacked superoperator from
//!   Kronecker products; [`exact_evolution`] applies `exp(L t)` to `vec(rho)`
//!   with a scaled Taylor series that converges to machine precision.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{hermitian_eigenvalues, hermiticity_deviation, DensityMatrix, Operator};

/// Largest `d^2` accepted by [`liouvillian_matrix`].
pub const LIOUVILLIAN_DIM_LIMIT: usize = 4096;
/// Trace drift or negativity beyond this aborts an integration.
pub const DIVERGENCE_TOL: f64 = 1e-6;
pub const DEFAULT_OUTPUT_POINTS: usize = 1000;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug)]
pub struct DissipatorTerm {
    rate: f64,
    jump: Operator,
}

impl DissipatorTerm {
    pub fn new(rate: f64, jump: Operator) -> Result<Self> {
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(Error::NegativeRate {
                name: "dissipator".into(),
                value: rate,
            });
        }
        Ok(Self { rate, jump })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn jump(&self) -> &Operator {
        &self.jump
    }
}

/// One Hamiltonian with strength `ham_strength` plus weighted dissipators.
#[derive(Clone, Debug)]
pub struct MasterEquationSpec {
    hamiltonian: Operator,
    ham_strength: f64,
    dissipators: Vec<DissipatorTerm>,
}

impl MasterEquationSpec {
    pub fn new(
        hamiltonian: Operator,
        ham_strength: f64,
        dissipators: Vec<DissipatorTerm>,
    ) -> Result<Self> {
        if !ham_strength.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Hamiltonian strength must be finite, got {ham_strength}"
            )));
        }
        for term in &dissipators {
            if term.jump.dim() != hamiltonian.dim() {
                return Err(Error::DimensionMismatch {
                    expected: hamiltonian.dim(),
                    found: term.jump.dim(),
                });
            }
        }
        Ok(Self {
            hamiltonian,
            ham_strength,
            dissipators,
        })
    }

    /// Purely dissipative dynamics on `n_qubits`.
    pub fn dissipative(n_qubits: usize, dissipators: Vec<DissipatorTerm>) -> Result<Self> {
        Self::new(Operator::zeros(n_qubits), 0.0, dissipators)
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn ham_strength(&self) -> f64 {
        self.ham_strength
    }

    pub fn dissipators(&self) -> &[DissipatorTerm] {
        &self.dissipators
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// Largest of the Hamiltonian strength and the dissipator rates.
    pub fn max_rate(&self) -> f64 {
        self.dissipators
            .iter()
            .map(|d| d.rate)
            .fold(self.ham_strength.abs(), f64::max)
    }

    /// `min(0.1 / max(rates, 1), 1e-3)`.
    pub fn default_step(&self) -> f64 {
        (0.1 / self.max_rate().max(1.0)).min(1e-3)
    }

    fn check_dim(&self, rho: &Operator) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        Ok(())
    }
}

impl AsRef<Operator> for DensityMatrix {
    fn as_ref(&self) -> &Operator {
        self.operator()
    }
}

impl AsRef<Operator> for Operator {
    fn as_ref(&self) -> &Operator {
        self
    }
}

/// `A rho A^dagger - 1/2 A^dagger A rho - 1/2 rho A^dagger A`.
pub fn dissipator(a: &Operator, rho: impl AsRef<Operator>) -> Result<Operator> {
    let rho = rho.as_ref();
    if a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: rho.dim(),
        });
    }
    let am = a.matrix();
    let r = rho.matrix();
    let ad = am.adjoint();
    let ada = &ad * am;
    let half = Complex64::new(0.5, 0.0);
    let out = am * r * &ad - (&ada * r) * half - (r * &ada) * half;
    Operator::from_matrix(a.n_qubits(), out)
}

/// Right-hand side of the master equation, evaluated densely.
pub fn rhs(spec: &MasterEquationSpec, rho: impl AsRef<Operator>) -> Result<Operator> {
    let rho = rho.as_ref();
    spec.check_dim(rho)?;
    let h = spec.hamiltonian.matrix();
    let r = rho.matrix();
    let mut out = (h * r - r * h) * (-I * spec.ham_strength);
    for term in &spec.dissipators {
        if term.rate == 0.0 {
            continue;
        }
        out += dissipator(&term.jump, rho)?.into_matrix() * Complex64::new(term.rate, 0.0);
    }
    Operator::from_matrix(spec.n_qubits(), out)
}

/// Column-stacked superoperator `L` with `vec(rhs(rho)) = L vec(rho)`.
pub fn liouvillian_matrix(spec: &MasterEquationSpec) -> Result<DMatrix<Complex64>> {
    let d = spec.dim();
    if d * d > LIOUVILLIAN_DIM_LIMIT {
        return Err(Error::DimensionGuard {
            dim: d,
            limit: LIOUVILLIAN_DIM_LIMIT,
        });
    }
    let id = DMatrix::<Complex64>::identity(d, d);
    let h = spec.hamiltonian.matrix();
    let mut l = (id.kronecker(h) - h.transpose().kronecker(&id)) * (-I * spec.ham_strength);
    let half = Complex64::new(0.5, 0.0);
    for term in &spec.dissipators {
        let a = term.jump.matrix();
        let ada = a.adjoint() * a;
        let block = a.conjugate().kronecker(a)
            - id.kronecker(&ada) * half
            - ada.transpose().kronecker(&id) * half;
        l += block * Complex64::new(term.rate, 0.0);
    }
    Ok(l)
}

/// Coordinate-list sparse matrix; only used to speed up matrix-vector and
/// operator-matrix products inside the engine.
#[derive(Clone, Debug)]
struct Sparse {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl Sparse {
    fn from_dense(m: &DMatrix<Complex64>) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v != ZERO {
                    entries.push((i, j, v));
                }
            }
        }
        Self {
            dim: m.nrows(),
            entries,
        }
    }

    fn norm1(&self) -> f64 {
        let mut cols = vec![0.0; self.dim];
        for &(_, j, v) in &self.entries {
            cols[j] += v.norm();
        }
        cols.into_iter().fold(0.0, f64::max)
    }

    /// `out = self * v`
    fn mul_vec(&self, v: &[Complex64], out: &mut [Complex64]) {
        out.fill(ZERO);
        for &(i, j, a) in &self.entries {
            out[i] += a * v[j];
        }
    }
}

/// Master equation compiled to a sparse superoperator acting on `vec(rho)`.
///
/// Built from `-i K rho + i rho K^dagger + sum r A rho A^dagger` with
/// `K = k H - i/2 sum r A^dagger A`. Only rows on or above the diagonal are
/// stored; the rest follow from `L(rho)^dagger = L(rho)`, so the input must
/// be Hermitian.
struct CompiledGenerator {
    dim: usize,
    /// `(i, j)` of each stored row, `i <= j`.
    targets: Vec<(usize, usize)>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl CompiledGenerator {
    fn new(spec: &MasterEquationSpec) -> Self {
        let d = spec.dim();
        let mut k = spec.hamiltonian.matrix() * Complex64::new(spec.ham_strength, 0.0);
        let mut jumps = Vec::new();
        for term in &spec.dissipators {
            if term.rate == 0.0 {
                continue;
            }
            let a = term.jump.matrix();
            k -= (a.adjoint() * a) * (I * (0.5 * term.rate));
            jumps.push((term.rate, Sparse::from_dense(a)));
        }
        let k = Sparse::from_dense(&k);

        // rows[i + j d] collects (column, coefficient) pairs for i <= j.
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); d * d];
        for &(i, c, v) in &k.entries {
            // (-i K rho)[i, j] picks up rho[c, j].
            for j in i..d {
                rows[i + j * d].push((c + j * d, -I * v));
            }
            // (i rho K^dagger)[j', i] picks up rho[j', c] conj(K[i, c]).
            for jp in 0..=i {
                rows[jp + i * d].push((jp + c * d, I * v.conj()));
            }
        }
        for (rate, a) in &jumps {
            for &(i, kk, ai) in &a.entries {
                for &(j, l, aj) in &a.entries {
                    if i <= j {
                        rows[i + j * d].push((kk + l * d, ai * aj.conj() * *rate));
                    }
                }
            }
        }

        let mut targets = Vec::new();
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for j in 0..d {
            for i in 0..=j {
                let row = &mut rows[i + j * d];
                row.sort_by_key(|e| e.0);
                let mut merged: Vec<(usize, Complex64)> = Vec::with_capacity(row.len());
                for &(c, v) in row.iter() {
                    match merged.last_mut() {
                        Some(last) if last.0 == c => last.1 += v,
                        _ => merged.push((c, v)),
                    }
                }
                for (c, v) in merged {
                    if v != ZERO {
                        cols.push(c);
                        vals.push(v);
                    }
                }
                targets.push((i, j));
                row_ptr.push(cols.len());
            }
        }
        Self {
            dim: d,
            targets,
            row_ptr,
            cols,
            vals,
        }
    }

    /// `out = L(rho)` for Hermitian `rho` in column-major layout.
    fn apply(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        for (r, &(i, j)) in self.targets.iter().enumerate() {
            let span = self.row_ptr[r]..self.row_ptr[r + 1];
            let mut acc = ZERO;
            for (&c, &v) in self.cols[span.clone()].iter().zip(&self.vals[span]) {
                acc += v * rho[c];
            }
            if i == j {
                out[i + j * d] = Complex64::new(acc.re, 0.0);
            } else {
                out[i + j * d] = acc;
                out[j + i * d] = acc.conj();
            }
        }
    }
}

/// Worst-case conservation diagnostics over every recorded state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservationStats {
    pub max_trace_drift: f64,
    pub max_hermiticity_deviation: f64,
    pub min_eigenvalue: f64,
}

impl Default for ConservationStats {
    fn default() -> Self {
        Self {
            max_trace_drift: 0.0,
            max_hermiticity_deviation: 0.0,
            min_eigenvalue: f64::INFINITY,
        }
    }
}

impl ConservationStats {
    fn observe(&mut self, m: &DMatrix<Complex64>) -> (f64, f64) {
        let drift = (m.trace() - Complex64::new(1.0, 0.0)).norm();
        let min_ev = hermitian_eigenvalues(m)[0];
        self.max_trace_drift = self.max_trace_drift.max(drift);
        self.max_hermiticity_deviation =
            self.max_hermiticity_deviation.max(hermiticity_deviation(m));
        self.min_eigenvalue = self.min_eigenvalue.min(min_ev);
        (drift, min_ev)
    }

    /// Combine diagnostics from several runs.
    pub fn merge(&self, other: &Self) -> Self {
        Self {
            max_trace_drift: self.max_trace_drift.max(other.max_trace_drift),
            max_hermiticity_deviation: self
                .max_hermiticity_deviation
                .max(other.max_hermiticity_deviation),
            min_eigenvalue: self.min_eigenvalue.min(other.min_eigenvalue),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IntegrationOptions {
    /// Internal step. Defaults to [`MasterEquationSpec::default_step`].
    pub step_hint: Option<f64>,
    /// Number of uniform output intervals; `output_points + 1` samples are
    /// recorded including `t = 0`.
    pub output_points: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            step_hint: None,
            output_points: DEFAULT_OUTPUT_POINTS,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TrajectoryRecord<R> {
    pub times: Vec<f64>,
    pub samples: Vec<R>,
    pub final_state: DensityMatrix,
    pub conservation: ConservationStats,
    /// Internal RK4 step actually used.
    pub step: f64,
}

/// Fixed-step RK4 evolution of `rho0` to `t_final`, calling `recorder` on
/// each of the uniform output samples.
pub fn integrate<R, F>(
    spec: &MasterEquationSpec,
    rho0: &DensityMatrix,
    t_final: f64,
    mut recorder: F,
    options: IntegrationOptions,
) -> Result<TrajectoryRecord<R>>
where
    F: FnMut(f64, &DensityMatrix) -> R,
{
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "integration horizon must be positive, got {t_final}"
        )));
    }
    if options.output_points == 0 {
        return Err(Error::InvalidParameter("output_points must be >= 1".into()));
    }
    spec.check_dim(rho0.operator())?;
    rho0.validate()?;

    let hint = options.step_hint.unwrap_or_else(|| spec.default_step());
    if !(hint > 0.0 && hint.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "step must be positive, got {hint}"
        )));
    }
    let interval = t_final / options.output_points as f64;
    let substeps = (interval / hint).ceil().max(1.0) as usize;
    let dt = interval / substeps as f64;

    let generator = CompiledGenerator::new(spec);
    let d = generator.dim;
    let n_qubits = spec.n_qubits();
    let len = d * d;

    let mut rho: Vec<Complex64> = rho0.matrix().as_slice().to_vec();
    let mut k1 = vec![ZERO; len];
    let mut k2 = vec![ZERO; len];
    let mut k3 = vec![ZERO; len];
    let mut k4 = vec![ZERO; len];
    let mut tmp = vec![ZERO; len];

    let mut times = Vec::with_capacity(options.output_points + 1);
    let mut samples = Vec::with_capacity(options.output_points + 1);
    let mut stats = ConservationStats::default();

    let snapshot = |t: f64, rho: &[Complex64], stats: &mut ConservationStats| {
        let m = DMatrix::from_column_slice(d, d, rho);
        let (drift, min_ev) = stats.observe(&m);
        if drift > DIVERGENCE_TOL || min_ev < -DIVERGENCE_TOL || !drift.is_finite() {
            return Err(Error::IntegrationDiverged {
                time: t,
                trace_drift: drift,
                min_eigenvalue: min_ev,
            });
        }
        let op = Operator::from_matrix(n_qubits, m).expect("dimension fixed by spec");
        Ok(DensityMatrix::new_unchecked(op))
    };

    let first = snapshot(0.0, &rho, &mut stats)?;
    times.push(0.0);
    samples.push(recorder(0.0, &first));
    let mut last = first;

    let half = Complex64::new(0.5 * dt, 0.0);
    let full = Complex64::new(dt, 0.0);
    let sixth = Complex64::new(dt / 6.0, 0.0);
    let two = Complex64::new(2.0, 0.0);

    for out_idx in 1..=options.output_points {
        for _ in 0..substeps {
            generator.apply(&rho, &mut k1);
            for ((t, r), k) in tmp.iter_mut().zip(&rho).zip(&k1) {
                *t = r + half * k;
            }
            generator.apply(&tmp, &mut k2);
            for ((t, r), k) in tmp.iter_mut().zip(&rho).zip(&k2) {
                *t = r + half * k;
            }
            generator.apply(&tmp, &mut k3);
            for ((t, r), k) in tmp.iter_mut().zip(&rho).zip(&k3) {
                *t = r + full * k;
            }
            generator.apply(&tmp, &mut k4);
            for i in 0..len {
                rho[i] += sixth * (k1[i] + two * (k2[i] + k3[i]) + k4[i]);
            }
        }
        let t = t_final * out_idx as f64 / options.output_points as f64;
        let state = snapshot(t, &rho, &mut stats)?;
        times.push(t);
        samples.push(recorder(t, &state));
        last = state;
    }

    Ok(TrajectoryRecord {
        times,
        samples,
        final_state: last,
        conservation: stats,
        step: dt,
    })
}

/// `exp(L t) v` by a scaled Taylor series, accurate to rounding.
pub fn expm_action(l: &DMatrix<Complex64>, t: f64, v: &DVector<Complex64>) -> DVector<Complex64> {
    let sparse = Sparse::from_dense(l);
    let norm = sparse.norm1() * t.abs();
    let steps = norm.ceil().max(1.0) as usize;
    let h = Complex64::new(t / steps as f64, 0.0);

    let n = v.len();
    let mut acc: Vec<Complex64> = v.iter().copied().collect();
    let mut term = vec![ZERO; n];
    let mut next = vec![ZERO; n];
    let inf_norm = |x: &[Complex64]| x.iter().fold(0.0f64, |m, z| m.max(z.norm()));

    for _ in 0..steps {
        term.copy_from_slice(&acc);
        let mut small_run = 0;
        for k in 1..=80 {
            sparse.mul_vec(&term, &mut next);
            let c = h / k as f64;
            for (t, nx) in term.iter_mut().zip(&next) {
                *t = c * nx;
            }
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
            if inf_norm(&term) <= 1e-18 * inf_norm(&acc).max(1e-300) {
                small_run += 1;
                if small_run == 2 {
                    break;
                }
            } else {
                small_run = 0;
            }
        }
    }
    DVector::from_vec(acc)
}

/// `rho(t)` from the exact superoperator exponential.
pub fn exact_evolution(
    spec: &MasterEquationSpec,
    rho0: &DensityMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    spec.check_dim(rho0.operator())?;
    let l = liouvillian_matrix(spec)?;
    let d = spec.dim();
    let v = DVector::from_column_slice(rho0.matrix().as_slice());
    let out = expm_action(&l, t, &v);
    let m = DMatrix::from_column_slice(d, d, out.as_slice());
    Ok(DensityMatrix::new_unchecked(Operator::from_matrix(
        spec.n_qubits(),
        m,
    )?))
}
