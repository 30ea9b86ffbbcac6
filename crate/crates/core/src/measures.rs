//! Lewenstein-Sanpera decomposition of the projected Werner state and the
//! scenario-dependent entanglement values of a pseudo-pure GHZ state.
//!
//! Every measure scales a pure-state value by the Werner weight `x`; the
//! scenarios differ only in that pure-state value:
//!
//! | scenario            | pure GHZ value  |
//! |---------------------|-----------------|
//! | bipartite average   | `½ log 2`       |
//! | teleportation       | `log 2`         |
//! | operator norm       | `(n - 1) log 2` |

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::linalg::{
    entropy_from_spectrum, fidelity_with_pure, hermitian_eigenvalues, subsystem_offsets,
    Bipartition, Caps, ComplexMatrix, DensityMatrix, LogBase, PureState,
};
use crate::separability::{is_fully_nonseparable, ppt_check, purity_threshold, Verdict};
use crate::states::{
    ghz_state, project_to_singlet_form, pseudo_pure, singlet, werner, x_of, PhaseConvention,
    PseudoPureParams, MIN_QUBITS,
};

/// Werner weight below which the state is separable (λ = 1).
pub const SEPARABLE_EDGE: f64 = 1.0 / 3.0;

/// `ρ = λ ρ_s + (1 - λ) |Ψ(-)⟩⟨Ψ(-)|` for a Werner state of weight `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LsDecomposition {
    pub lambda: f64,
    pub x: f64,
    /// Entropy of the entangled pure component, in log-base units.
    pub entangled_part_entropy: f64,
}

impl LsDecomposition {
    /// `(1 - λ) E(|Ψ_e⟩)`.
    pub fn entanglement(&self) -> f64 {
        (1.0 - self.lambda) * self.entangled_part_entropy
    }

    /// Separable part `ρ_s`. For `x ≥ 1/3` this is always the boundary
    /// Werner state of weight 1/3; below it, `ρ_s` is the state itself.
    pub fn separable_part(&self) -> Result<DensityMatrix> {
        werner(self.x.min(SEPARABLE_EDGE))
    }
}

fn check_x(x: f64) -> Result<()> {
    check_range("x", x, 0.0, 1.0)
}

fn check_params(n: usize, epsilon: f64) -> Result<()> {
    if n < MIN_QUBITS {
        return Err(Error::QubitCount {
            n,
            min: MIN_QUBITS,
            max: usize::MAX,
        });
    }
    check_range("epsilon", epsilon, 0.0, 1.0)
}

/// Separable weight: 1 for `x ≤ 1/3`, `(3/2)(1 - x)` above.
pub fn ls_lambda(x: f64) -> Result<f64> {
    check_x(x)?;
    Ok(if x <= SEPARABLE_EDGE {
        1.0
    } else {
        1.5 * (1.0 - x)
    })
}

pub fn ls_decomposition(x: f64, e_pure: f64) -> Result<LsDecomposition> {
    Ok(LsDecomposition {
        lambda: ls_lambda(x)?,
        x,
        entangled_part_entropy: e_pure,
    })
}

pub fn ls_entanglement(x: f64, e_pure: f64) -> Result<f64> {
    ls_decomposition(x, e_pure).map(|d| d.entanglement())
}

/// Lower bound `x_of(n, ε) · e_pure`.
pub fn eq10_entanglement(n: usize, epsilon: f64, e_pure: f64) -> Result<f64> {
    check_params(n, epsilon)?;
    Ok(x_of(n, epsilon) * e_pure)
}

/// How the pure GHZ entanglement is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Average over the `n/2` bipartite splits, each worth `log 2`.
    BipartiteAverage,
    /// One teleported qubit, or equivalently the global measure: `log 2`.
    Teleportation,
    /// Operator-norm entanglement of the GHZ state: `(n - 1) log 2`.
    OperatorNorm,
}

impl Scenario {
    /// Pure-state entanglement in units of `log 2`.
    pub fn pure_ebits(self, n: usize) -> Result<f64> {
        match self {
            Scenario::BipartiteAverage if n % 2 == 1 => Err(Error::OddQubitCount(n)),
            Scenario::BipartiteAverage => Ok(0.5),
            Scenario::Teleportation => Ok(1.0),
            Scenario::OperatorNorm => Ok((n - 1) as f64),
        }
    }

    pub fn measure(self, n: usize, epsilon: f64, base: LogBase) -> Result<f64> {
        check_params(n, epsilon)?;
        let e_pure = self.pure_ebits(n)? * base.ebit();
        eq10_entanglement(n, epsilon, e_pure)
    }
}

/// `x · ½ log 2`. Only defined for even `n`.
pub fn bipartite_average_measure(n: usize, epsilon: f64, base: LogBase) -> Result<f64> {
    Scenario::BipartiteAverage.measure(n, epsilon, base)
}

/// `x · log 2`.
pub fn teleportation_measure(n: usize, epsilon: f64, base: LogBase) -> Result<f64> {
    Scenario::Teleportation.measure(n, epsilon, base)
}

/// `x · (n - 1) log 2`.
pub fn operator_norm_measure(n: usize, epsilon: f64, base: LogBase) -> Result<f64> {
    Scenario::OperatorNorm.measure(n, epsilon, base)
}

/// Entropy of the reduced state of `psi` on either side of `bipartition`.
pub fn pure_entanglement_entropy(
    psi: &PureState,
    bipartition: &Bipartition,
    base: LogBase,
) -> Result<f64> {
    let n = psi.qubit_count()?;
    if n != bipartition.qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << bipartition.qubits(),
            actual: psi.dim(),
        });
    }
    // Diagonalize the smaller reduced state; both share the nonzero spectrum.
    let (keep, other) = if bipartition.part_a().len() <= bipartition.part_b().len() {
        (bipartition.part_a(), bipartition.part_b())
    } else {
        (bipartition.part_b(), bipartition.part_a())
    };
    let off_k = subsystem_offsets(keep, n);
    let off_o = subsystem_offsets(other, n);
    Caps::default().check_eig(off_k.len())?;
    let amps = psi.amplitudes();
    let m = ComplexMatrix::from_fn(off_k.len(), off_o.len(), |i, j| amps[off_k[i] | off_o[j]]);
    let reduced = &m * m.adjoint();
    let values = hermitian_eigenvalues(&reduced)?;
    Ok(entropy_from_spectrum(&values, base))
}

/// Every quantity reported for one `(n, ε)` point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub n: usize,
    pub epsilon: f64,
    pub x: f64,
    pub lambda: f64,
    pub fidelity: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    /// `(1 - λ) log 2`: the Lewenstein-Sanpera value of the projected state.
    pub e_ls: f64,
    /// `x log 2`: the lower bound quoted as the headline value.
    pub e_eq10: f64,
    /// `None` for odd `n`.
    pub e_bipartite_avg: Option<f64>,
    pub e_teleport: f64,
    pub e_opnorm: f64,
    pub log_base: f64,
}

/// Closed-form report; valid for any `n ≥ 2`.
pub fn measure_report(n: usize, epsilon: f64, base: LogBase) -> Result<MeasureReport> {
    measure_report_with(n, epsilon, base, &x_of)
}

/// As [`measure_report`], with the Werner-weight formula supplied by the caller.
pub fn measure_report_with(
    n: usize,
    epsilon: f64,
    base: LogBase,
    x_formula: &dyn Fn(usize, f64) -> f64,
) -> Result<MeasureReport> {
    check_params(n, epsilon)?;
    let x = x_formula(n, epsilon);
    let lambda = ls_lambda(x.clamp(0.0, 1.0))?;
    let ebit = base.ebit();
    let dim = 2f64.powi(n as i32);
    let e_bipartite_avg = match Scenario::BipartiteAverage.pure_ebits(n) {
        Ok(e) => Some(x * e * ebit),
        Err(Error::OddQubitCount(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(MeasureReport {
        n,
        epsilon,
        x,
        lambda,
        fidelity: epsilon + (1.0 - epsilon) / dim,
        threshold: purity_threshold(n),
        verdict: is_fully_nonseparable(n, epsilon)?.verdict,
        e_ls: (1.0 - lambda) * ebit,
        e_eq10: x * ebit,
        e_bipartite_avg,
        e_teleport: x * Scenario::Teleportation.pure_ebits(n)? * ebit,
        e_opnorm: x * Scenario::OperatorNorm.pure_ebits(n)? * ebit,
        log_base: base.value(),
    })
}

/// Largest register the dense cross-check will build.
pub const MAX_VERIFY_QUBITS: usize = 10;
/// Agreement required between the closed forms and the dense matrices.
pub const VERIFY_TOL: f64 = 1e-10;

/// One closed-form value recomputed from dense matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub quantity: &'static str,
    pub closed_form: f64,
    pub matrix: f64,
}

impl CrossCheck {
    pub fn deviation(&self) -> f64 {
        (self.closed_form - self.matrix).abs()
    }

    pub fn passes(&self) -> bool {
        self.deviation() <= VERIFY_TOL
    }
}

/// Rebuilds `report` from dense matrices: fidelity with the GHZ state, the
/// Werner weight of the projected state, the PPT spectrum edge, and the
/// teleportation value from the reduced-state entropy.
pub fn matrix_cross_check(
    report: &MeasureReport,
    convention: PhaseConvention,
) -> Result<Vec<CrossCheck>> {
    let n = report.n;
    if n > MAX_VERIFY_QUBITS {
        return Err(Error::CapExceeded {
            dim: 1 << n,
            cap: 1 << MAX_VERIFY_QUBITS,
        });
    }
    let base = LogBase::new(report.log_base)?;
    let params = PseudoPureParams::new(n, report.epsilon, convention)?;
    let rho = pseudo_pure(&params)?;
    let ghz = ghz_state(n, convention)?.to_pure_state()?;

    let fidelity = fidelity_with_pure(&rho, &ghz)?;
    let projected = project_to_singlet_form(&params)?;
    let singlet_overlap = fidelity_with_pure(&projected, &singlet())?;
    let x_matrix = (4.0 * singlet_overlap - 1.0) / 3.0;
    let werner_gap = projected.max_abs_diff(&werner(x_matrix.clamp(-1.0 / 3.0, 1.0))?);
    let last = Bipartition::isolate(n, n - 1)?;
    let min_pt = ppt_check(&rho, &last)?.witness;
    let e_pure = pure_entanglement_entropy(&ghz, &last, base)?;

    Ok(vec![
        CrossCheck {
            quantity: "fidelity",
            closed_form: report.fidelity,
            matrix: fidelity,
        },
        CrossCheck {
            quantity: "x",
            closed_form: report.x,
            matrix: x_matrix,
        },
        CrossCheck {
            quantity: "werner_form_residual",
            closed_form: 0.0,
            matrix: werner_gap,
        },
        CrossCheck {
            quantity: "min_pt_eigenvalue",
            closed_form: (1.0 - report.epsilon) / (1u64 << n) as f64 - report.epsilon / 2.0,
            matrix: min_pt,
        },
        CrossCheck {
            quantity: "e_teleport",
            closed_form: report.e_teleport,
            matrix: x_matrix * e_pure,
        },
    ])
}
