//! Dense state-vector simulation of the stepwise adiabatic sweep.
//!
//! Step `m` of `M` applies `exp(-i H_m tau)` with
//! `H_m = (1 - m/M) H0 + (m/M) Hp` and `tau = T / M`, starting from the
//! ground state of the mixer. Each exponential comes from a full Hermitian
//! eigendecomposition, which also yields the instantaneous spectrum.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{interpolated_hamiltonian, qubit_cap, DiagonalOperator, HermitianMatrix, MixerSpec};

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 0;

/// Parameters of a discretized linear sweep `s(t) = t / T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub g: f64,
    /// Total evolution time, in units where the reduced Planck constant is 1.
    pub total_time: f64,
    pub steps: usize,
    /// Step indices (0 = initial state) at which populations are recorded.
    pub checkpoints: Vec<usize>,
}

impl Schedule {
    /// Sweep with the default checkpoints `{0, M/4, M/2, 3M/4, M}`.
    pub fn new(g: f64, total_time: f64, steps: usize) -> Result<Self> {
        let mut checkpoints = vec![0, steps / 4, steps / 2, 3 * steps / 4, steps];
        checkpoints.dedup();
        Schedule { g, total_time, steps, checkpoints }.validated()
    }

    pub fn with_checkpoints(mut self, mut checkpoints: Vec<usize>) -> Result<Self> {
        checkpoints.sort_unstable();
        checkpoints.dedup();
        self.checkpoints = checkpoints;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        if !(self.total_time > 0.0 && self.total_time.is_finite()) {
            return Err(Error::InvalidParameter(format!("total time must be positive, got {}", self.total_time)));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("step count must be at least 1".into()));
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::InvalidParameter(format!("mixer strength must be positive, got {}", self.g)));
        }
        if let Some(&c) = self.checkpoints.iter().find(|&&c| c > self.steps) {
            return Err(Error::InvalidParameter(format!("checkpoint {c} beyond step count {}", self.steps)));
        }
        Ok(self)
    }

    pub fn tau(&self) -> f64 {
        self.total_time / self.steps as f64
    }

    /// Interpolation parameter of step `m`.
    pub fn s(&self, m: usize) -> f64 {
        m as f64 / self.steps as f64
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::new(0.6, 20.0, 20).expect("valid defaults")
    }
}

/// Amplitudes of an `n`-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(pub DVector<Complex64>);

impl StateVector {
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut v = DVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.0
    }
}

/// Ground state of `g * sum sigma_x`: amplitude `(-1)^popcount(b) / 2^(n/2)`.
pub fn initial_state(n: usize) -> Result<StateVector> {
    let cap = qubit_cap();
    if n == 0 || n > cap {
        return Err(Error::DimensionTooLarge { qubits: n, cap });
    }
    let dim = 1usize << n;
    let amp = (dim as f64).sqrt().recip();
    Ok(StateVector(DVector::from_fn(dim, |b, _| {
        let sign = if b.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(sign * amp, 0.0)
    })))
}

/// `|amplitude|^2` per basis index.
pub fn populations(state: &StateVector) -> Vec<f64> {
    state.0.iter().map(|a| a.norm_sqr()).collect()
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

/// Full eigendecomposition; real symmetric input takes the real solver.
pub fn eigh(h: &HermitianMatrix) -> Result<Eigen> {
    let m = h.matrix();
    let fail = || {
        Error::NumericalFailure(format!("eigendecomposition of a {}x{} matrix did not converge", m.nrows(), m.ncols()))
    };
    let (values, vectors): (Vec<f64>, DMatrix<Complex64>) = if m.iter().all(|z| z.im == 0.0) {
        let re = m.map(|z| z.re);
        let e = SymmetricEigen::try_new(re, EIGEN_EPS, EIGEN_MAX_ITER).ok_or_else(fail)?;
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors.map(|x| Complex64::new(x, 0.0)))
    } else {
        let e = SymmetricEigen::try_new(m.clone(), EIGEN_EPS, EIGEN_MAX_ITER).ok_or_else(fail)?;
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(fail());
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let sorted_vectors = DMatrix::from_fn(vectors.nrows(), vectors.ncols(), |i, j| vectors[(i, order[j])]);
    Ok(Eigen { values: sorted_values, vectors: sorted_vectors })
}

fn propagator_from(eigen: &Eigen, tau: f64) -> DMatrix<Complex64> {
    let phases =
        DVector::from_iterator(eigen.values.len(), eigen.values.iter().map(|&e| Complex64::from_polar(1.0, -e * tau)));
    let v = &eigen.vectors;
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * v.adjoint()
}

/// `exp(-i H tau) |psi>` from a decomposition, without forming the propagator.
fn evolve_with(eigen: &Eigen, tau: f64, psi: &DVector<Complex64>) -> DVector<Complex64> {
    let v = &eigen.vectors;
    let mut coeffs = v.ad_mul(psi);
    for (c, &e) in coeffs.iter_mut().zip(&eigen.values) {
        *c *= Complex64::from_polar(1.0, -e * tau);
    }
    v * coeffs
}

/// `exp(-i H tau)`.
pub fn step_propagator(h: &HermitianMatrix, tau: f64) -> Result<DMatrix<Complex64>> {
    Ok(propagator_from(&eigh(h)?, tau))
}

/// `exp(-i H tau) |state>`.
pub fn propagate_step(state: &StateVector, h: &HermitianMatrix, tau: f64) -> Result<StateVector> {
    if state.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: state.dim() });
    }
    Ok(StateVector(evolve_with(&eigh(h)?, tau, &state.0)))
}

/// `max |U^dagger U - I|` over all entries.
pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let prod = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub step: usize,
    pub s: f64,
    pub populations: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionTrace {
    pub schedule: Schedule,
    pub snapshots: Vec<Snapshot>,
    pub final_state: StateVector,
    /// Smallest `E1 - E0` among the step Hamiltonians with `s < 1`.
    pub min_gap: Option<f64>,
}

impl EvolutionTrace {
    pub fn final_populations(&self) -> Vec<f64> {
        populations(&self.final_state)
    }
}

/// Run the full sweep from the mixer ground state.
pub fn run_schedule(mixer: &MixerSpec, hp: &DiagonalOperator, schedule: &Schedule) -> Result<EvolutionTrace> {
    if mixer.n != hp.qubits() {
        return Err(Error::DimensionMismatch { expected: 1 << mixer.n, got: hp.dim() });
    }
    let mut state = initial_state(mixer.n)?;
    let tau = schedule.tau();
    let mut snapshots = Vec::with_capacity(schedule.checkpoints.len());
    let mut min_gap: Option<f64> = None;
    if schedule.checkpoints.contains(&0) {
        snapshots.push(Snapshot { step: 0, s: 0.0, populations: populations(&state) });
    }
    for m in 1..=schedule.steps {
        let s = schedule.s(m);
        let h = interpolated_hamiltonian(s, mixer, hp)?;
        let eigen = eigh(&h)?;
        if m < schedule.steps && eigen.values.len() >= 2 {
            let gap = eigen.values[1] - eigen.values[0];
            min_gap = Some(min_gap.map_or(gap, |g| g.min(gap)));
        }
        state = StateVector(evolve_with(&eigen, tau, &state.0));
        if schedule.checkpoints.contains(&m) {
            snapshots.push(Snapshot { step: m, s, populations: populations(&state) });
        }
    }
    Ok(EvolutionTrace { schedule: schedule.clone(), snapshots, final_state: state, min_gap })
}

/// The `k` smallest eigenvalues, ascending.
pub fn lowest_eigenvalues(h: &HermitianMatrix, k: usize) -> Result<Vec<f64>> {
    if k > h.dim() {
        return Err(Error::InvalidParameter(format!(
            "asked for {k} eigenvalues of a {}-dimensional operator",
            h.dim()
        )));
    }
    let mut values = eigh(h)?.values;
    values.truncate(k);
    Ok(values)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSample {
    pub s: f64,
    pub levels: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapTrace {
    pub samples: Vec<GapSample>,
    /// Smallest `E1 - E0` over the samples with `s < 1`.
    pub min_gap: Option<f64>,
}

/// Lowest `k` levels of `H(s)` at `points` evenly spaced `s` in `[0, 1]`.
pub fn gap_profile(mixer: &MixerSpec, hp: &DiagonalOperator, points: usize, k: usize) -> Result<GapTrace> {
    if points < 2 {
        return Err(Error::InvalidParameter("need at least two sample points".into()));
    }
    let mut samples = Vec::with_capacity(points);
    let mut min_gap: Option<f64> = None;
    for i in 0..points {
        let s = i as f64 / (points - 1) as f64;
        let h = interpolated_hamiltonian(s, mixer, hp)?;
        let all = eigh(&h)?.values;
        if k > all.len() {
            return Err(Error::InvalidParameter(format!(
                "asked for {k} levels of a {}-dimensional operator",
                all.len()
            )));
        }
        if i + 1 < points && all.len() >= 2 {
            let gap = all[1] - all[0];
            min_gap = Some(min_gap.map_or(gap, |g| g.min(gap)));
        }
        samples.push(GapSample { s, levels: all[..k].to_vec() });
    }
    Ok(GapTrace { samples, min_gap })
}
