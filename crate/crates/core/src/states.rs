//! GHZ, pseudo-pure and Werner state families, plus Schmidt decomposition.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::SVD;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::linalg::{
    project_renormalize, subsystem_offsets, Bipartition, Caps, ComplexMatrix, ComplexVector,
    DensityMatrix, PureState,
};

/// Smallest GHZ register.
pub const MIN_QUBITS: usize = 2;
/// Largest GHZ register representable in lazy (two-amplitude) form.
pub const MAX_LAZY_QUBITS: usize = 30;
/// Schmidt coefficients at or below this are dropped as numerical zeros.
pub const SCHMIDT_CUTOFF: f64 = 1e-12;

/// Relative phase on the all-down component of a GHZ state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// `i^(n+1)`, the phase produced by the trapped-ion entangling gate.
    #[default]
    PaperIN1,
    /// `+1`.
    Plus,
}

impl PhaseConvention {
    pub fn phase(self, n: usize) -> Complex64 {
        match self {
            PhaseConvention::Plus => Complex64::new(1.0, 0.0),
            PhaseConvention::PaperIN1 => match (n + 1) % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            },
        }
    }
}

fn check_qubits(n: usize, max: usize) -> Result<()> {
    if (MIN_QUBITS..=max).contains(&n) {
        Ok(())
    } else {
        Err(Error::QubitCount {
            n,
            min: MIN_QUBITS,
            max,
        })
    }
}

/// `(|0…0⟩ + phase |1…1⟩)/√2`, stored as its two nonzero amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzState {
    n: usize,
    convention: PhaseConvention,
}

impl GhzState {
    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn convention(&self) -> PhaseConvention {
        self.convention
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Amplitudes on `|0…0⟩` and `|1…1⟩`.
    pub fn amplitudes(&self) -> (Complex64, Complex64) {
        let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
        (a, self.convention.phase(self.n) * FRAC_1_SQRT_2)
    }

    pub fn to_pure_state(&self) -> Result<PureState> {
        Caps::default().check_vector(self.dim())?;
        let (up, down) = self.amplitudes();
        let mut v = ComplexVector::zeros(self.dim());
        v[0] = up;
        v[self.dim() - 1] = down;
        Ok(PureState::from_vector_unchecked(v))
    }
}

pub fn ghz_state(n: usize, convention: PhaseConvention) -> Result<GhzState> {
    check_qubits(n, MAX_LAZY_QUBITS)?;
    Ok(GhzState { n, convention })
}

/// Qubit count, purity parameter and GHZ phase of a pseudo-pure state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudoPureParams {
    n: usize,
    epsilon: f64,
    convention: PhaseConvention,
}

impl PseudoPureParams {
    pub fn new(n: usize, epsilon: f64, convention: PhaseConvention) -> Result<Self> {
        check_qubits(n, usize::BITS as usize - 2)?;
        check_range("epsilon", epsilon, 0.0, 1.0)?;
        Ok(PseudoPureParams {
            n,
            epsilon,
            convention,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn convention(&self) -> PhaseConvention {
        self.convention
    }

    pub fn ghz(&self) -> GhzState {
        GhzState {
            n: self.n,
            convention: self.convention,
        }
    }
}

/// `(1 - ε) I/2^n + ε |GHZ_n⟩⟨GHZ_n|`.
pub fn pseudo_pure(params: &PseudoPureParams) -> Result<DensityMatrix> {
    let dim = 1usize << params.n;
    Caps::default().check_matrix(dim)?;
    let eps = params.epsilon;
    let phase = params.convention.phase(params.n);
    let mut m = ComplexMatrix::from_diagonal_element(
        dim,
        dim,
        Complex64::new((1.0 - eps) / dim as f64, 0.0),
    );
    let last = dim - 1;
    m[(0, 0)] += eps / 2.0;
    m[(last, last)] += eps / 2.0;
    m[(0, last)] += phase.conj() * (eps / 2.0);
    m[(last, 0)] += phase * (eps / 2.0);
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Default incoherent part of the four-ion mixture: `I/16`.
pub fn default_incoherent() -> DensityMatrix {
    DensityMatrix::maximally_mixed(4).expect("16 is within the matrix cap")
}

/// `p |GHZ_4⟩⟨GHZ_4| + (1 - p) rho_incoh` with the ion-trap phase `i`.
pub fn experimental_mixture(p_pure: f64, rho_incoh: &DensityMatrix) -> Result<DensityMatrix> {
    check_range("p_pure", p_pure, 0.0, 1.0)?;
    if rho_incoh.dim() != 16 {
        return Err(Error::DimensionMismatch {
            expected: 16,
            actual: rho_incoh.dim(),
        });
    }
    let ghz = ghz_state(4, PhaseConvention::PaperIN1)?.to_pure_state()?;
    let pure = DensityMatrix::from_pure(&ghz)?;
    let m = pure.matrix().scale(p_pure) + rho_incoh.matrix().scale(1.0 - p_pure);
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// `(|01⟩ - |10⟩)/√2`.
pub fn singlet() -> PureState {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    PureState::from_vector_unchecked(ComplexVector::from_vec(vec![z, s, -s, z]))
}

/// Lower edge of the Werner family's positive range.
pub const WERNER_MIN_X: f64 = -1.0 / 3.0;

/// `(1 - x) I_4/4 + x |Ψ(-)⟩⟨Ψ(-)|`.
pub fn werner(x: f64) -> Result<DensityMatrix> {
    check_range("x", x, WERNER_MIN_X, 1.0)?;
    let s = singlet();
    let v = s.amplitudes();
    let m = ComplexMatrix::from_diagonal_element(4, 4, Complex64::new((1.0 - x) / 4.0, 0.0))
        + (v * v.adjoint()).scale(x);
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Singlet weight of the renormalized 4-dimensional projection of an
/// `n`-qubit pseudo-pure state: `ε 2^n / (4 + ε (2^n - 4))`.
pub fn x_of(n: usize, epsilon: f64) -> f64 {
    debug_assert!(n >= MIN_QUBITS);
    // Divided through by 2^n so that large n stays finite.
    let r = 2f64.powi(2 - n as i32);
    epsilon / (r + epsilon * (1.0 - r))
}

/// Canonical Schmidt form `Σ c_i |L_i⟩ ⊗ |R_i⟩` across a bipartition.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<PureState>,
    pub right_basis: Vec<PureState>,
    pub bipartition: Bipartition,
}

impl SchmidtForm {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// Rebuilds the state in the original register ordering.
    pub fn reconstruct(&self) -> PureState {
        let n = self.bipartition.qubits();
        let off_a = subsystem_offsets(self.bipartition.part_a(), n);
        let off_b = subsystem_offsets(self.bipartition.part_b(), n);
        let mut v = ComplexVector::zeros(1 << n);
        for ((c, l), r) in self
            .coefficients
            .iter()
            .zip(&self.left_basis)
            .zip(&self.right_basis)
        {
            for (i, &oa) in off_a.iter().enumerate() {
                let li = l.amplitudes()[i] * *c;
                for (j, &ob) in off_b.iter().enumerate() {
                    v[oa | ob] += li * r.amplitudes()[j];
                }
            }
        }
        PureState::from_vector_unchecked(v)
    }
}

pub fn schmidt_decompose(psi: &PureState, bipartition: &Bipartition) -> Result<SchmidtForm> {
    let n = psi.qubit_count()?;
    if n != bipartition.qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << bipartition.qubits(),
            actual: psi.dim(),
        });
    }
    let off_a = subsystem_offsets(bipartition.part_a(), n);
    let off_b = subsystem_offsets(bipartition.part_b(), n);
    Caps::default().check_matrix(off_a.len().max(off_b.len()))?;
    let amps = psi.amplitudes();
    let m = ComplexMatrix::from_fn(off_a.len(), off_b.len(), |i, j| amps[off_a[i] | off_b[j]]);
    let svd = SVD::new(m, true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^H");

    let mut order: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > SCHMIDT_CUTOFF)
        .collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    if order.is_empty() {
        return Err(Error::ZeroVector);
    }
    let coefficients = order.iter().map(|&i| svd.singular_values[i]).collect();
    let left_basis = order
        .iter()
        .map(|&i| PureState::from_vector_unchecked(u.column(i).into_owned()))
        .collect();
    let right_basis = order
        .iter()
        .map(|&i| PureState::from_vector_unchecked(v_t.row(i).transpose()))
        .collect();
    Ok(SchmidtForm {
        coefficients,
        left_basis,
        right_basis,
        bipartition: bipartition.clone(),
    })
}

/// A phased computational basis vector `phase |index⟩` on the first `n - 1` qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasedBasisVector {
    pub index: usize,
    pub phase: Complex64,
}

/// The four product vectors `|ũ↑⟩, |ũ↓⟩, |d̃↑⟩, |d̃↓⟩` in which the GHZ state has
/// singlet coordinates `(0, 1/√2, -1/√2, 0)`.
///
/// `|ũ⟩ = phase |1…1⟩` and `|d̃⟩ = -|0…0⟩` live on qubits `0..n-1`; the last
/// qubit keeps its computational basis (`↑ = |0⟩`, `↓ = |1⟩`).
#[derive(Debug, Clone)]
pub struct SingletFormBasis {
    pub vectors: [PureState; 4],
    pub up_tilde: PhasedBasisVector,
    pub down_tilde: PhasedBasisVector,
}

pub fn singlet_form_basis(n: usize, convention: PhaseConvention) -> Result<SingletFormBasis> {
    check_qubits(n, MAX_LAZY_QUBITS)?;
    let dim = 1usize << n;
    Caps::default().check_vector(dim)?;
    let up_tilde = PhasedBasisVector {
        index: (1 << (n - 1)) - 1,
        phase: convention.phase(n),
    };
    let down_tilde = PhasedBasisVector {
        index: 0,
        phase: Complex64::new(-1.0, 0.0),
    };
    let vector = |tilde: PhasedBasisVector, last: usize| {
        let mut v = ComplexVector::zeros(dim);
        v[(tilde.index << 1) | last] = tilde.phase;
        PureState::from_vector_unchecked(v)
    };
    Ok(SingletFormBasis {
        vectors: [
            vector(up_tilde, 0),
            vector(up_tilde, 1),
            vector(down_tilde, 0),
            vector(down_tilde, 1),
        ],
        up_tilde,
        down_tilde,
    })
}

/// Renormalized projection of a pseudo-pure state onto its singlet-form subspace.
pub fn project_to_singlet_form(params: &PseudoPureParams) -> Result<DensityMatrix> {
    let rho = pseudo_pure(params)?;
    let basis = singlet_form_basis(params.n, params.convention)?;
    project_renormalize(&rho, &basis.vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{fidelity_with_pure, partial_trace, projection_probability};
    use approx::assert_abs_diff_eq;

    const PAPER: PhaseConvention = PhaseConvention::PaperIN1;

    #[test]
    fn four_qubit_ghz_has_phase_i() {
        let (up, down) = ghz_state(4, PAPER).unwrap().amplitudes();
        assert_eq!(up, Complex64::new(FRAC_1_SQRT_2, 0.0));
        assert_eq!(down, Complex64::new(0.0, FRAC_1_SQRT_2));
    }

    #[test]
    fn three_qubit_ghz_has_phase_one() {
        let psi = ghz_state(3, PAPER).unwrap().to_pure_state().unwrap();
        assert_eq!(psi.amplitudes()[7], Complex64::new(FRAC_1_SQRT_2, 0.0));
    }

    #[test]
    fn ghz_is_normalized_and_range_checked() {
        for n in 2..=12 {
            let psi = ghz_state(n, PAPER).unwrap().to_pure_state().unwrap();
            assert_abs_diff_eq!(psi.amplitudes().norm(), 1.0, epsilon = 1e-15);
        }
        assert!(ghz_state(1, PAPER).is_err());
        assert!(ghz_state(31, PAPER).is_err());
        assert!(ghz_state(30, PAPER).is_ok());
    }

    #[test]
    fn pseudo_pure_limits() {
        for n in 2..=5 {
            let mixed = pseudo_pure(&PseudoPureParams::new(n, 0.0, PAPER).unwrap()).unwrap();
            assert!(mixed.max_abs_diff(&DensityMatrix::maximally_mixed(n).unwrap()) < 1e-15);
            let params = PseudoPureParams::new(n, 1.0, PAPER).unwrap();
            let pure = pseudo_pure(&params).unwrap();
            let proj = DensityMatrix::from_pure(&params.ghz().to_pure_state().unwrap()).unwrap();
            assert!(pure.max_abs_diff(&proj) < 1e-15);
        }
    }

    #[test]
    fn four_ion_pseudo_pure_weights() {
        let rho = pseudo_pure(&PseudoPureParams::new(4, 0.54, PAPER).unwrap()).unwrap();
        let m = rho.matrix();
        assert_abs_diff_eq!(m[(0, 0)].re, 0.27 + 0.46 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(5, 5)].re, 0.46 / 16.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(15, 0)].im, 0.27, epsilon = 1e-15);
        rho.check_invariants().unwrap();
    }

    #[test]
    fn pseudo_pure_rejects_bad_params() {
        assert!(PseudoPureParams::new(4, 1.1, PAPER).is_err());
        assert!(PseudoPureParams::new(4, -0.1, PAPER).is_err());
        assert!(PseudoPureParams::new(1, 0.5, PAPER).is_err());
        let big = PseudoPureParams::new(13, 0.5, PAPER).unwrap();
        assert!(matches!(pseudo_pure(&big), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn experimental_mixture_examples() {
        let incoh = default_incoherent();
        experimental_mixture(0.43, &incoh)
            .unwrap()
            .check_invariants()
            .unwrap();
        let ghz = ghz_state(4, PAPER).unwrap().to_pure_state().unwrap();
        let pure = experimental_mixture(1.0, &incoh).unwrap();
        assert!(pure.max_abs_diff(&DensityMatrix::from_pure(&ghz).unwrap()) < 1e-15);
        let rho = experimental_mixture(0.54, &incoh).unwrap();
        assert_abs_diff_eq!(
            fidelity_with_pure(&rho, &ghz).unwrap(),
            0.56875,
            epsilon = 1e-12
        );
        let wrong = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(matches!(
            experimental_mixture(0.5, &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn werner_limits_and_range() {
        assert!(
            werner(0.0)
                .unwrap()
                .max_abs_diff(&DensityMatrix::maximally_mixed(2).unwrap())
                < 1e-15
        );
        assert!(
            werner(1.0)
                .unwrap()
                .max_abs_diff(&DensityMatrix::from_pure(&singlet()).unwrap())
                < 1e-15
        );
        werner(WERNER_MIN_X).unwrap().check_invariants().unwrap();
        assert!(werner(-0.34).is_err());
        assert!(werner(1.01).is_err());
    }

    #[test]
    fn x_of_values() {
        assert_abs_diff_eq!(x_of(4, 0.54), 8.64 / 10.48, epsilon = 1e-15);
        assert_abs_diff_eq!(x_of(4, 0.54), 0.824_427_480_916_030_5, epsilon = 1e-15);
        for n in 2..=40 {
            assert_eq!(x_of(n, 0.0), 0.0);
            assert_abs_diff_eq!(x_of(n, 1.0), 1.0, epsilon = 1e-15);
        }
        for k in 0..=10 {
            let e = k as f64 / 10.0;
            assert_abs_diff_eq!(x_of(2, e), e, epsilon = 1e-15);
        }
    }

    #[test]
    fn x_of_is_monotone() {
        for n in 2..=10 {
            let mut prev = -1.0;
            for k in 0..=100 {
                let x = x_of(n, k as f64 / 100.0);
                assert!(x > prev);
                prev = x;
            }
        }
    }

    #[test]
    fn ghz_schmidt_coefficients() {
        for n in 2..=6 {
            let psi = ghz_state(n, PAPER).unwrap().to_pure_state().unwrap();
            for b in Bipartition::all(n) {
                let form = schmidt_decompose(&psi, &b).unwrap();
                assert_eq!(form.rank(), 2);
                for c in &form.coefficients {
                    assert_abs_diff_eq!(*c, FRAC_1_SQRT_2, epsilon = 1e-12);
                }
                let back = form.reconstruct();
                assert!((back.amplitudes() - psi.amplitudes()).camax() < 1e-10);
            }
        }
    }

    #[test]
    fn product_state_has_rank_one() {
        let plus = PureState::normalized(ComplexVector::from_element(2, Complex64::new(1.0, 0.0)))
            .unwrap();
        let zero = PureState::basis(1, 0).unwrap();
        let psi = plus.tensor(&zero).unwrap().tensor(&plus).unwrap();
        let form = schmidt_decompose(&psi, &Bipartition::new(3, &[0, 2]).unwrap()).unwrap();
        assert_eq!(form.coefficients.len(), 1);
        assert_abs_diff_eq!(form.coefficients[0], 1.0, epsilon = 1e-12);
        assert!((form.reconstruct().amplitudes() - psi.amplitudes()).camax() < 1e-10);
    }

    #[test]
    fn singlet_form_coordinates() {
        let s = FRAC_1_SQRT_2;
        for conv in [PAPER, PhaseConvention::Plus] {
            for n in 2..=8 {
                let psi = ghz_state(n, conv).unwrap().to_pure_state().unwrap();
                let basis = singlet_form_basis(n, conv).unwrap();
                let coords: Vec<Complex64> = basis
                    .vectors
                    .iter()
                    .map(|b| b.inner(&psi).unwrap())
                    .collect();
                let expected = [0.0, s, -s, 0.0];
                for (c, e) in coords.iter().zip(expected) {
                    assert_abs_diff_eq!(c.re, e, epsilon = 1e-15);
                    assert_abs_diff_eq!(c.im, 0.0, epsilon = 1e-15);
                }
                for (i, a) in basis.vectors.iter().enumerate() {
                    for (j, b) in basis.vectors.iter().enumerate() {
                        let g = a.inner(b).unwrap();
                        assert_abs_diff_eq!(g.re, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-15);
                        assert_abs_diff_eq!(g.im, 0.0, epsilon = 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn four_ion_projection_probability_and_werner_form() {
        let params = PseudoPureParams::new(4, 0.54, PAPER).unwrap();
        let rho = pseudo_pure(&params).unwrap();
        let basis = singlet_form_basis(4, PAPER).unwrap();
        assert_abs_diff_eq!(
            projection_probability(&rho, &basis.vectors).unwrap(),
            0.655,
            epsilon = 1e-14
        );
        let projected = project_to_singlet_form(&params).unwrap();
        assert!(projected.max_abs_diff(&werner(x_of(4, 0.54)).unwrap()) < 1e-12);
    }

    #[test]
    fn reduced_ghz_is_maximally_mixed() {
        let rho = pseudo_pure(&PseudoPureParams::new(2, 0.5, PAPER).unwrap()).unwrap();
        let reduced = partial_trace(&rho, &[1]).unwrap();
        assert!(reduced.max_abs_diff(&DensityMatrix::maximally_mixed(1).unwrap()) < 1e-15);
    }
}
