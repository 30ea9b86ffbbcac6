//! Nonseparability certificates: fidelity with a maximally entangled state,
//! the pseudo-pure purity bound, and positivity of the partial transpose.
//!
//! All three criteria certify entanglement only. A state that does not cross
//! the threshold is reported as `Undecided`, except where the criterion is
//! known to be necessary and sufficient (Werner-form two-qubit states for the
//! fidelity test, 2x2 systems for PPT).

use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::linalg::{
    fidelity_with_pure, hermitian_eigenvalues_capped, partial_trace, partial_transpose,
    Bipartition, Caps, DensityMatrix, PureState,
};
use crate::states::{pseudo_pure, PhaseConvention, PseudoPureParams, MIN_QUBITS};

/// Fidelity above which a maximally-entangled overlap certifies entanglement.
pub const FIDELITY_THRESHOLD: f64 = 0.5;
/// Fidelities within this of the threshold are round-off, not entanglement.
pub const FIDELITY_NOISE: f64 = 1e-12;
/// Partial-transpose eigenvalues below this are genuine negativity.
pub const PPT_NEGATIVITY_CUTOFF: f64 = -1e-10;
const WERNER_FORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Fidelity,
    PurityThreshold,
    Ppt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Separable,
    Nonseparable,
    Undecided,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Separable => "separable",
            Verdict::Nonseparable => "nonseparable",
            Verdict::Undecided => "undecided",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separable" => Ok(Verdict::Separable),
            "nonseparable" => Ok(Verdict::Nonseparable),
            "undecided" => Ok(Verdict::Undecided),
            other => Err(Error::Config(format!("unknown verdict '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityVerdict {
    pub criterion: Criterion,
    pub verdict: Verdict,
    /// F for the fidelity test, ε for the purity bound, the minimum
    /// partial-transpose eigenvalue for PPT.
    pub witness: f64,
    pub threshold: f64,
    pub note: Option<String>,
}

impl SeparabilityVerdict {
    /// Whether the witness lies strictly on the entangled side of the threshold.
    pub fn crosses_threshold(&self) -> bool {
        match self.criterion {
            Criterion::Fidelity => self.witness > self.threshold + FIDELITY_NOISE,
            Criterion::PurityThreshold => self.witness > self.threshold,
            Criterion::Ppt => self.witness < self.threshold,
        }
    }

    pub fn is_nonseparable(&self) -> bool {
        self.verdict == Verdict::Nonseparable
    }
}

/// True when `rho = (1 - x) I/4 + x |target⟩⟨target|` for a maximally
/// entangled two-qubit `target`.
fn is_werner_form(rho: &DensityMatrix, target: &PureState, fidelity: f64) -> Result<bool> {
    if rho.dim() != 4 {
        return Ok(false);
    }
    let target_rho = DensityMatrix::from_pure(target)?;
    let reduced = partial_trace(&target_rho, &[0])?;
    if reduced.max_abs_diff(&DensityMatrix::maximally_mixed(1)?) > WERNER_FORM_TOL {
        return Ok(false);
    }
    let x = (4.0 * fidelity - 1.0) / 3.0;
    let v = target.amplitudes();
    let model = crate::linalg::ComplexMatrix::from_diagonal_element(
        4,
        4,
        num_complex::Complex64::new((1.0 - x) / 4.0, 0.0),
    ) + (v * v.adjoint()).scale(x);
    Ok((rho.matrix() - model).camax() <= WERNER_FORM_TOL)
}

/// Overlap test against a maximally entangled target: `F > 1/2` certifies
/// entanglement (up to `FIDELITY_NOISE`).
pub fn fidelity_criterion(rho: &DensityMatrix, target: &PureState) -> Result<SeparabilityVerdict> {
    let fidelity = fidelity_with_pure(rho, target)?;
    let (verdict, note) = if fidelity > FIDELITY_THRESHOLD + FIDELITY_NOISE {
        (Verdict::Nonseparable, None)
    } else if is_werner_form(rho, target, fidelity)? {
        (Verdict::Separable, None)
    } else {
        (
            Verdict::Undecided,
            Some("F <= 1/2 only implies separability for Werner-form states".to_string()),
        )
    };
    Ok(SeparabilityVerdict {
        criterion: Criterion::Fidelity,
        verdict,
        witness: fidelity,
        threshold: FIDELITY_THRESHOLD,
        note,
    })
}

/// Purity above which an `n`-qubit pseudo-pure GHZ state is nonseparable
/// across every bipartition: `1/(1 + 2^(n-1))`.
pub fn purity_threshold(n: usize) -> f64 {
    debug_assert!(n >= MIN_QUBITS);
    1.0 / (1.0 + 2f64.powi(n as i32 - 1))
}

pub fn is_fully_nonseparable(n: usize, epsilon: f64) -> Result<SeparabilityVerdict> {
    if n < MIN_QUBITS {
        return Err(Error::QubitCount {
            n,
            min: MIN_QUBITS,
            max: usize::MAX,
        });
    }
    check_range("epsilon", epsilon, 0.0, 1.0)?;
    let threshold = purity_threshold(n);
    let (verdict, note) = if epsilon > threshold {
        (Verdict::Nonseparable, None)
    } else {
        (
            Verdict::Undecided,
            Some("purity bound not exceeded".to_string()),
        )
    };
    Ok(SeparabilityVerdict {
        criterion: Criterion::PurityThreshold,
        verdict,
        witness: epsilon,
        threshold,
        note,
    })
}

/// Peres-Horodecki test: a negative partial-transpose eigenvalue certifies
/// entanglement across `bipartition`.
pub fn ppt_check(rho: &DensityMatrix, bipartition: &Bipartition) -> Result<SeparabilityVerdict> {
    ppt_check_capped(rho, bipartition, &Caps::default())
}

pub fn ppt_check_capped(
    rho: &DensityMatrix,
    bipartition: &Bipartition,
    caps: &Caps,
) -> Result<SeparabilityVerdict> {
    let n = rho.qubit_count()?;
    if n != bipartition.qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << bipartition.qubits(),
            actual: rho.dim(),
        });
    }
    caps.check_eig(rho.dim())?;
    let pt = partial_transpose(rho, bipartition.part_a())?;
    let min = hermitian_eigenvalues_capped(&pt, caps)?
        .last()
        .copied()
        .unwrap_or(0.0);
    let two_by_two = n == 2;
    let (verdict, note) = if min < PPT_NEGATIVITY_CUTOFF {
        (Verdict::Nonseparable, None)
    } else if two_by_two {
        (Verdict::Separable, None)
    } else {
        (
            Verdict::Undecided,
            Some("PPT is only necessary for separability beyond 2x2 and 2x3".to_string()),
        )
    };
    Ok(SeparabilityVerdict {
        criterion: Criterion::Ppt,
        verdict,
        witness: min,
        threshold: PPT_NEGATIVITY_CUTOFF,
        note,
    })
}

/// Runs the PPT test for every bipartition (up to swapping the parts).
pub fn ppt_check_all(rho: &DensityMatrix) -> Result<Vec<(Bipartition, SeparabilityVerdict)>> {
    let n = rho.qubit_count()?;
    Bipartition::all(n)
        .into_iter()
        .map(|b| ppt_check(rho, &b).map(|v| (b, v)))
        .collect()
}

/// Finds adjacent points `lo < hi` of the grid `{0, step, 2 step, …, 1}` such
/// that the PPT test on the dense `n`-qubit pseudo-pure state shows no
/// negativity across `bipartition` at `ε = lo` and shows it at `ε = hi`.
///
/// Negativity is monotone in ε for this family, so the pair is found by
/// bisection over grid indices. Returns `None` when no grid point is negative.
pub fn ppt_flip_bracket(
    n: usize,
    step: f64,
    bipartition: &Bipartition,
    convention: PhaseConvention,
) -> Result<Option<(f64, f64)>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::Config(format!(
            "grid step must be in (0, 1], got {step}"
        )));
    }
    let points = (1.0 / step).round() as usize;
    let eps_at = |k: usize| (k as f64 * step).min(1.0);
    let negative = |k: usize| -> Result<bool> {
        let rho = pseudo_pure(&PseudoPureParams::new(n, eps_at(k), convention)?)?;
        Ok(ppt_check(&rho, bipartition)?.is_nonseparable())
    };
    if !negative(points)? {
        return Ok(None);
    }
    if negative(0)? {
        return Ok(Some((eps_at(0), eps_at(0))));
    }
    let (mut lo, mut hi) = (0usize, points);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if negative(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some((eps_at(lo), eps_at(hi))))
}
