//! Dense complex linear algebra on qubit registers.
//!
//! Qubit 0 is the leftmost (most significant) tensor factor: in a register
//! of `n` qubits, qubit `q` owns bit `n - 1 - q` of a basis-state index.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Max entrywise |A - A^H| accepted for a density matrix.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Max |tr(rho) - 1| accepted for a density matrix.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues below `-PSD_TOL` are a genuine positivity violation; those in
/// `[-PSD_TOL, 0)` are treated as round-off.
pub const PSD_TOL: f64 = 1e-10;
/// Max |‖psi‖ - 1| accepted for a pure state.
pub const NORM_TOL: f64 = 1e-12;
/// Hermiticity tolerance for eigensolver input.
pub const EIG_HERMITIAN_TOL: f64 = 1e-10;
/// Gram-matrix tolerance for an orthonormal basis.
pub const ORTHONORMAL_TOL: f64 = 1e-10;
/// Smallest projection probability that can be renormalized.
pub const MIN_PROJECTION_PROBABILITY: f64 = 1e-14;

/// Dimension limits for dense storage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest matrix dimension that may be built.
    pub matrix_dim: usize,
    /// Largest matrix dimension handed to the eigensolver.
    pub eig_dim: usize,
    /// Largest state-vector length that may be materialized.
    pub vector_dim: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            matrix_dim: 1 << 12,
            eig_dim: 1 << 10,
            vector_dim: 1 << 24,
        }
    }
}

impl Caps {
    pub(crate) fn check_matrix(&self, dim: usize) -> Result<()> {
        check_cap(dim, self.matrix_dim)
    }

    pub(crate) fn check_eig(&self, dim: usize) -> Result<()> {
        check_cap(dim, self.eig_dim)
    }

    pub(crate) fn check_vector(&self, dim: usize) -> Result<()> {
        check_cap(dim, self.vector_dim)
    }
}

fn check_cap(dim: usize, cap: usize) -> Result<()> {
    if dim > cap {
        Err(Error::CapExceeded { dim, cap })
    } else {
        Ok(())
    }
}

/// Logarithm base used for entropies and entanglement values.
///
/// Base 2 makes `log 2` equal to one ebit.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct LogBase(f64);

impl LogBase {
    pub const TWO: LogBase = LogBase(2.0);
    pub const E: LogBase = LogBase(std::f64::consts::E);

    pub fn new(base: f64) -> Result<Self> {
        if base.is_finite() && base > 0.0 && base != 1.0 {
            Ok(LogBase(base))
        } else {
            Err(Error::Config(format!(
                "log base must be positive and not 1, got {base}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn log(self, x: f64) -> f64 {
        if self.0 == 2.0 {
            x.log2()
        } else {
            x.ln() / self.0.ln()
        }
    }

    /// `log 2` expressed in this base.
    pub fn ebit(self) -> f64 {
        self.log(2.0)
    }
}

impl Default for LogBase {
    fn default() -> Self {
        LogBase::TWO
    }
}

/// Number of qubits for a register of dimension `dim`.
pub fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim.is_power_of_two() {
        Ok(dim.trailing_zeros() as usize)
    } else {
        Err(Error::NotARegister(dim))
    }
}

/// Bit of a basis index owned by qubit `q` in an `n`-qubit register.
#[inline]
pub fn qubit_mask(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

/// Scatter the bits of a local index over the register positions `qubits`
/// (the first listed qubit receives the most significant local bit).
fn scatter(local: usize, qubits: &[usize], n: usize) -> usize {
    let m = qubits.len();
    qubits.iter().enumerate().fold(0, |acc, (k, &q)| {
        if (local >> (m - 1 - k)) & 1 == 1 {
            acc | qubit_mask(n, q)
        } else {
            acc
        }
    })
}

/// Full-register offsets for every local index of the subsystem `qubits`.
pub(crate) fn subsystem_offsets(qubits: &[usize], n: usize) -> Vec<usize> {
    (0..1usize << qubits.len())
        .map(|i| scatter(i, qubits, n))
        .collect()
}

fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max entrywise |A - A^H|.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates every density-matrix invariant. Positivity is only checked
    /// when the dimension is within the default eigensolver cap.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        let rho = DensityMatrix { matrix };
        rho.check_invariants()?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        DensityMatrix { matrix }
    }

    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        let dim = 1usize
            .checked_shl(qubits as u32)
            .ok_or(Error::CapExceeded {
                dim: usize::MAX,
                cap: Caps::default().matrix_dim,
            })?;
        Caps::default().check_matrix(dim)?;
        let w = Complex64::new(1.0 / dim as f64, 0.0);
        Ok(DensityMatrix {
            matrix: ComplexMatrix::from_diagonal_element(dim, dim, w),
        })
    }

    pub fn from_pure(psi: &PureState) -> Result<Self> {
        Caps::default().check_matrix(psi.dim())?;
        let v = psi.amplitudes();
        Ok(DensityMatrix {
            matrix: v * v.adjoint(),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn qubit_count(&self) -> Result<usize> {
        qubits_for_dim(self.dim())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Re-checks Hermiticity, unit trace and positivity.
    pub fn check_invariants(&self) -> Result<()> {
        let deviation = hermitian_deviation(&self.matrix);
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = self.matrix.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::NotUnitTrace { trace: trace.re });
        }
        if self.dim() <= Caps::default().eig_dim {
            let min = hermitian_eigenvalues(&self.matrix)?
                .last()
                .copied()
                .unwrap_or(0.0);
            if min < -PSD_TOL {
                return Err(Error::NotPositive {
                    min_eigenvalue: min,
                });
            }
        }
        Ok(())
    }

    /// Entrywise max |self - other|.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        max_abs(&(&self.matrix - &other.matrix))
    }
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: ComplexVector,
}

impl PureState {
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(PureState { amplitudes })
    }

    /// Scales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(PureState {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub(crate) fn from_vector_unchecked(amplitudes: ComplexVector) -> Self {
        PureState { amplitudes }
    }

    /// Computational basis state `|index⟩` of a `qubits`-qubit register.
    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << qubits;
        Caps::default().check_vector(dim)?;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: index,
            });
        }
        let mut v = ComplexVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Ok(PureState { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn qubit_count(&self) -> Result<usize> {
        qubits_for_dim(self.dim())
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let dim = self.dim() * other.dim();
        Caps::default().check_vector(dim)?;
        Ok(PureState {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        })
    }
}

/// Split of a register into two non-empty complementary qubit sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    qubits: usize,
    part_a: Vec<usize>,
    part_b: Vec<usize>,
}

impl Bipartition {
    pub fn new(qubits: usize, part_a: &[usize]) -> Result<Self> {
        let part_a = validate_subset(qubits, part_a)?;
        let part_b: Vec<usize> = (0..qubits).filter(|q| !part_a.contains(q)).collect();
        if part_b.is_empty() {
            return Err(Error::InvalidBipartition("part B is empty".to_string()));
        }
        Ok(Bipartition {
            qubits,
            part_a,
            part_b,
        })
    }

    /// `(n-1 | 1)` split that isolates qubit `q` in part B.
    pub fn isolate(qubits: usize, q: usize) -> Result<Self> {
        let rest: Vec<usize> = (0..qubits).filter(|&i| i != q).collect();
        if q >= qubits {
            return Err(Error::QubitOutOfRange { index: q, qubits });
        }
        Bipartition::new(qubits, &rest)
    }

    /// Contiguous `(n/2 | n - n/2)` split.
    pub fn balanced(qubits: usize) -> Result<Self> {
        let half: Vec<usize> = (0..qubits / 2).collect();
        Bipartition::new(qubits, &half)
    }

    /// Every bipartition up to swapping the parts (qubit 0 always in part A).
    pub fn all(qubits: usize) -> Vec<Bipartition> {
        if qubits < 2 || qubits >= usize::BITS as usize {
            return Vec::new();
        }
        let full = (1usize << qubits) - 1;
        (0..1usize << (qubits - 1))
            .map(|rest| rest | (1 << (qubits - 1)))
            .filter(|&mask| mask != full)
            .map(|mask| {
                let a: Vec<usize> = (0..qubits)
                    .filter(|&q| mask & qubit_mask(qubits, q) != 0)
                    .collect();
                Bipartition::new(qubits, &a).expect("proper non-empty subset")
            })
            .collect()
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn part_a(&self) -> &[usize] {
        &self.part_a
    }

    pub fn part_b(&self) -> &[usize] {
        &self.part_b
    }

    pub fn swapped(&self) -> Bipartition {
        Bipartition {
            qubits: self.qubits,
            part_a: self.part_b.clone(),
            part_b: self.part_a.clone(),
        }
    }
}

fn validate_subset(qubits: usize, subset: &[usize]) -> Result<Vec<usize>> {
    if subset.is_empty() {
        return Err(Error::InvalidBipartition("empty qubit set".to_string()));
    }
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::InvalidBipartition(format!(
                "qubit {} listed twice",
                w[0]
            )));
        }
    }
    if let Some(&q) = sorted.last() {
        if q >= qubits {
            return Err(Error::QubitOutOfRange { index: q, qubits });
        }
    }
    Ok(sorted)
}

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    /// `V Λ V^H`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(l);
        }
        scaled * v.adjoint()
    }

    /// Max entrywise |A V - V Λ|.
    pub fn residual(&self, a: &ComplexMatrix) -> f64 {
        let av = a * &self.eigenvectors;
        let mut vl = self.eigenvectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            vl.column_mut(j).scale_mut(l);
        }
        max_abs(&(av - vl))
    }

    /// Max entrywise |V^H V - I|.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.eigenvectors.ncols();
        let gram = self.eigenvectors.adjoint() * &self.eigenvectors;
        max_abs(&(gram - ComplexMatrix::identity(n, n)))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

fn eig_input(m: &ComplexMatrix, caps: &Caps) -> Result<ComplexMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            actual: m.ncols(),
        });
    }
    caps.check_eig(m.nrows())?;
    let deviation = hermitian_deviation(m);
    if deviation > EIG_HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(hermitize(m))
}

/// Eigendecomposition of a Hermitian matrix (Householder tridiagonalization
/// followed by implicit symmetric QR).
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    hermitian_eig_capped(m, &Caps::default())
}

pub fn hermitian_eig_capped(m: &ComplexMatrix, caps: &Caps) -> Result<SpectralDecomposition> {
    let h = eig_input(m, caps)?;
    let n = h.nrows();
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigenvalues_capped(m, &Caps::default())
}

pub fn hermitian_eigenvalues_capped(m: &ComplexMatrix, caps: &Caps) -> Result<Vec<f64>> {
    let h = eig_input(m, caps)?;
    let mut values: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_capped(a, b, &Caps::default())
}

pub fn kron_capped(a: &ComplexMatrix, b: &ComplexMatrix, caps: &Caps) -> Result<ComplexMatrix> {
    let rows = a.nrows().checked_mul(b.nrows());
    let cols = a.ncols().checked_mul(b.ncols());
    match (rows, cols) {
        (Some(r), Some(c)) => {
            caps.check_matrix(r.max(c))?;
        }
        _ => {
            return Err(Error::CapExceeded {
                dim: usize::MAX,
                cap: caps.matrix_dim,
            })
        }
    }
    Ok(a.kronecker(b))
}

/// Reduced state on the qubits in `keep`, tracing out the rest.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.qubit_count()?;
    let keep = validate_subset(n, keep)?;
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let keep_off = subsystem_offsets(&keep, n);
    let trace_off = subsystem_offsets(&traced, n);
    let dk = keep_off.len();
    let m = rho.matrix();
    let reduced = ComplexMatrix::from_fn(dk, dk, |i, j| {
        trace_off
            .iter()
            .map(|&t| m[(keep_off[i] | t, keep_off[j] | t)])
            .sum()
    });
    Ok(DensityMatrix::from_matrix_unchecked(reduced))
}

/// Partial transpose of a register matrix over the qubits in `part`.
pub fn partial_transpose_matrix(m: &ComplexMatrix, part: &[usize]) -> Result<ComplexMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            actual: m.ncols(),
        });
    }
    let n = qubits_for_dim(m.nrows())?;
    let part = validate_subset(n, part)?;
    if part.len() == n {
        return Err(Error::InvalidBipartition(
            "partial transpose needs a proper subset".to_string(),
        ));
    }
    let mask = part.iter().fold(0, |acc, &q| acc | qubit_mask(n, q));
    Ok(ComplexMatrix::from_fn(m.nrows(), m.ncols(), |r, c| {
        let r2 = (r & !mask) | (c & mask);
        let c2 = (c & !mask) | (r & mask);
        m[(r2, c2)]
    }))
}

pub fn partial_transpose(rho: &DensityMatrix, part: &[usize]) -> Result<ComplexMatrix> {
    partial_transpose_matrix(rho.matrix(), part)
}

/// `⟨psi|rho|psi⟩`.
pub fn fidelity_with_pure(rho: &DensityMatrix, psi: &PureState) -> Result<f64> {
    if rho.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: psi.dim(),
        });
    }
    let v = psi.amplitudes();
    Ok(v.dotc(&(rho.matrix() * v)).re)
}

/// `-Σ λ log λ` over a spectrum, with `0 log 0 = 0` and round-off negatives clamped.
pub fn entropy_from_spectrum(eigenvalues: &[f64], base: LogBase) -> f64 {
    let s: f64 = eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * base.log(l))
        .sum();
    s.max(0.0)
}

pub fn von_neumann_entropy(rho: &DensityMatrix, base: LogBase) -> Result<f64> {
    let values = hermitian_eigenvalues(rho.matrix())?;
    Ok(entropy_from_spectrum(&values, base))
}

fn compress(rho: &DensityMatrix, basis: &[PureState]) -> Result<(ComplexMatrix, f64)> {
    if basis.is_empty() {
        return Err(Error::InvalidBipartition(
            "empty projection basis".to_string(),
        ));
    }
    for b in basis {
        if b.dim() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                actual: b.dim(),
            });
        }
    }
    let columns: Vec<ComplexVector> = basis.iter().map(|b| b.amplitudes().clone()).collect();
    let b = ComplexMatrix::from_columns(&columns);
    let k = basis.len();
    let gram = b.adjoint() * &b;
    let deviation = max_abs(&(gram - ComplexMatrix::identity(k, k)));
    if deviation > ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal { deviation });
    }
    let compressed = b.adjoint() * rho.matrix() * &b;
    let probability = compressed.trace().re;
    Ok((compressed, probability))
}

/// `tr(P rho P)` for the projector onto `span(basis)`.
pub fn projection_probability(rho: &DensityMatrix, basis: &[PureState]) -> Result<f64> {
    compress(rho, basis).map(|(_, p)| p)
}

/// `P rho P / tr(P rho P)` written in the coordinates of `basis`.
pub fn project_renormalize(rho: &DensityMatrix, basis: &[PureState]) -> Result<DensityMatrix> {
    let (compressed, probability) = compress(rho, basis)?;
    if probability <= MIN_PROJECTION_PROBABILITY {
        return Err(Error::ZeroProbability { probability });
    }
    let m = hermitize(&compressed.unscale(probability));
    Ok(DensityMatrix::from_matrix_unchecked(m))
}
