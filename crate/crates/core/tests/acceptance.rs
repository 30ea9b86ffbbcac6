//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if any
//! criterion misses its tolerance or its time budget.

use std::process::Command;
use std::time::{Duration, Instant};

use ghz_entangle::linalg::{fidelity_with_pure, project_renormalize, Bipartition, LogBase};
use ghz_entangle::measures::{
    bipartite_average_measure, eq10_entanglement, ls_entanglement, matrix_cross_check,
    measure_report, operator_norm_measure, pure_entanglement_entropy, teleportation_measure,
    SEPARABLE_EDGE,
};
use ghz_entangle::separability::{
    is_fully_nonseparable, ppt_check, ppt_flip_bracket, purity_threshold, Verdict,
    PPT_NEGATIVITY_CUTOFF,
};
use ghz_entangle::states::{
    ghz_state, pseudo_pure, singlet_form_basis, werner, x_of, PhaseConvention, PseudoPureParams,
};

const PAPER: PhaseConvention = PhaseConvention::PaperIN1;

struct Outcome {
    id: u32,
    name: &'static str,
    passed: bool,
    elapsed: Duration,
    budget: Duration,
    detail: String,
}

impl Outcome {
    fn ok(&self) -> bool {
        self.passed && self.elapsed < self.budget
    }
}

fn round_to(v: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    (v * s).round() / s
}

fn run(
    id: u32,
    name: &'static str,
    budget: Duration,
    f: impl FnOnce() -> Result<String, String>,
) -> Outcome {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Outcome {
        id,
        name,
        passed,
        elapsed,
        budget,
        detail,
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ms(v: u64) -> Duration {
    Duration::from_millis(v)
}

fn criterion_1() -> Outcome {
    let mut t = 0.0;
    let mut out = run(1, "separability threshold", ms(1), || {
        t = purity_threshold(4);
        Ok(String::new())
    });
    let check = ensure(
        round_to(t, 5) == 0.11111 && (t - 1.0 / 9.0).abs() < 1e-15,
        || format!("threshold {t}"),
    );
    out.passed = check.is_ok();
    out.detail = format!("threshold(4) = {t:.6}");
    out
}

fn criterion_2() -> Outcome {
    run(2, "experimental verdict", ms(1000), || {
        let v = is_fully_nonseparable(4, 0.54).map_err(|e| e.to_string())?;
        ensure(v.verdict == Verdict::Nonseparable, || {
            format!("closed form says {}", v.verdict)
        })?;
        let rho = pseudo_pure(&PseudoPureParams::new(4, 0.54, PAPER).unwrap()).unwrap();
        let mut worst = f64::NEG_INFINITY;
        let mut count = 0;
        // Every proper subset, so both orderings of each cut are covered.
        for mask in 1u32..15 {
            let part: Vec<usize> = (0..4).filter(|q| mask & (1 << q) != 0).collect();
            let b = Bipartition::new(4, &part).map_err(|e| e.to_string())?;
            let p = ppt_check(&rho, &b).map_err(|e| e.to_string())?;
            ensure(p.witness < PPT_NEGATIVITY_CUTOFF, || {
                format!("part {part:?}: min eigenvalue {}", p.witness)
            })?;
            worst = worst.max(p.witness);
            count += 1;
        }
        Ok(format!(
            "{count} cuts, largest min PT eigenvalue {worst:.6}"
        ))
    })
}

fn closed_form_criterion(
    id: u32,
    name: &'static str,
    f: fn(usize, f64, LogBase) -> ghz_entangle::Result<f64>,
    published: f64,
    decimals: Option<i32>,
    tol: f64,
) -> Outcome {
    let mut value = f64::NAN;
    let mut out = run(id, name, ms(1), || {
        value = f(4, 0.54, LogBase::TWO).map_err(|e| e.to_string())?;
        Ok(String::new())
    });
    if !out.passed {
        return out;
    }
    let compared = decimals.map_or(value, |d| round_to(value, d));
    let diff = (compared - published).abs();
    out.passed = diff <= tol;
    out.detail =
        format!("{value:.6} log 2 vs published {published} (|diff| {diff:.1e}, tol {tol:.0e})");
    out
}

fn criterion_6() -> Outcome {
    run(
        6,
        "projection reproduces the Werner form",
        ms(30_000),
        || {
            let mut worst = 0.0f64;
            for n in 2..=8 {
                let basis = singlet_form_basis(n, PAPER).map_err(|e| e.to_string())?;
                for k in 0..=10 {
                    let eps = k as f64 / 10.0;
                    let rho = pseudo_pure(&PseudoPureParams::new(n, eps, PAPER).unwrap()).unwrap();
                    let projected =
                        project_renormalize(&rho, &basis.vectors).map_err(|e| e.to_string())?;
                    let dev = projected.max_abs_diff(&werner(x_of(n, eps)).unwrap());
                    ensure(dev <= 1e-12, || {
                        format!("n={n} eps={eps}: deviation {dev:e}")
                    })?;
                    worst = worst.max(dev);
                }
            }
            Ok(format!("77 points, max entry deviation {worst:.1e}"))
        },
    )
}

fn criterion_7() -> Outcome {
    let step = 1e-3;
    run(
        7,
        "PPT flip brackets the purity threshold",
        ms(120_000),
        || {
            let mut cuts = 0;
            for n in 2..=8 {
                let t = purity_threshold(n);
                for b in Bipartition::all(n) {
                    let (lo, hi) = ppt_flip_bracket(n, step, &b, PAPER)
                        .map_err(|e| e.to_string())?
                        .ok_or_else(|| format!("n={n} {:?}: no flip on the grid", b.part_a()))?;
                    ensure(lo <= t && t < hi && hi - lo <= step * (1.0 + 1e-9), || {
                        format!("n={n} {:?}: bracket [{lo}, {hi}] misses {t}", b.part_a())
                    })?;
                    cuts += 1;
                }
            }
            Ok(format!("{cuts} cuts over n = 2..8, step {step}"))
        },
    )
}

fn criterion_8() -> Outcome {
    let mut f = f64::NAN;
    let mut out = run(8, "GHZ fidelity", ms(10), || {
        let rho = pseudo_pure(&PseudoPureParams::new(4, 0.54, PAPER).unwrap()).unwrap();
        let ghz = ghz_state(4, PAPER).unwrap().to_pure_state().unwrap();
        f = fidelity_with_pure(&rho, &ghz).map_err(|e| e.to_string())?;
        Ok(String::new())
    });
    out.passed = out.passed && (f - 0.56875).abs() <= 1e-12 && (f - 0.57).abs() <= 0.02;
    out.detail = format!("F = {f:.12}");
    out
}

fn criterion_9() -> Outcome {
    run(9, "pure GHZ entanglement entropy", ms(30_000), || {
        let mut cuts = 0;
        for n in 2..=8 {
            let psi = ghz_state(n, PAPER).unwrap().to_pure_state().unwrap();
            for b in Bipartition::all(n) {
                let smaller = b.part_a().len().min(b.part_b().len());
                if smaller != 1 && smaller != n / 2 {
                    continue;
                }
                for cut in [b.clone(), b.swapped()] {
                    let s = pure_entanglement_entropy(&psi, &cut, LogBase::TWO)
                        .map_err(|e| e.to_string())?;
                    ensure((s - 1.0).abs() <= 1e-10, || {
                        format!("n={n} {:?}: entropy {s}", cut.part_a())
                    })?;
                    cuts += 1;
                }
            }
        }
        Ok(format!("{cuts} cuts, all 1 ebit"))
    })
}

fn criterion_10() -> Outcome {
    run(10, "property suite", ms(60_000), || {
        let err = |e: ghz_entangle::Error| e.to_string();

        let edge = ls_entanglement(SEPARABLE_EDGE, 1.0).map_err(err)?;
        ensure(edge.abs() < 1e-12, || format!("LS value at 1/3 is {edge}"))?;
        let above = ls_entanglement(SEPARABLE_EDGE + 1e-13, 1.0).map_err(err)?;
        ensure(above.abs() < 1e-12, || {
            format!("LS value just above 1/3 is {above}")
        })?;

        let base = LogBase::TWO;
        for n in 2..=16 {
            let mut prev: Option<Vec<f64>> = None;
            for k in 0..=100 {
                let eps = k as f64 / 100.0;
                let mut now = vec![
                    teleportation_measure(n, eps, base).map_err(err)?,
                    operator_norm_measure(n, eps, base).map_err(err)?,
                    eq10_entanglement(n, eps, 1.0).map_err(err)?,
                ];
                if n % 2 == 0 {
                    now.push(bipartite_average_measure(n, eps, base).map_err(err)?);
                }
                let ls = ls_entanglement(x_of(n, eps), 1.0).map_err(err)?;
                if let Some(p) = &prev {
                    for (i, (a, b)) in p.iter().zip(&now).enumerate() {
                        ensure(b > a, || {
                            format!("measure {i} not increasing at n={n} eps={eps}")
                        })?;
                    }
                    let prev_ls = p[p.len() - 1];
                    ensure(ls >= prev_ls, || {
                        format!("LS value decreasing at n={n} eps={eps}")
                    })?;
                }
                now.push(ls);
                prev = Some(now);
            }
        }

        for n in 2..=8 {
            for k in 0..=10 {
                let eps = k as f64 / 10.0;
                let r = measure_report(n, eps, base).map_err(err)?;
                let a = matrix_cross_check(&r, PAPER).map_err(err)?;
                let b = matrix_cross_check(&r, PhaseConvention::Plus).map_err(err)?;
                for (ca, cb) in a.iter().zip(&b) {
                    ensure(ca.passes() && cb.passes(), || {
                        format!(
                            "n={n} eps={eps} {}: {} vs {}",
                            ca.quantity, ca.matrix, cb.matrix
                        )
                    })?;
                    ensure((ca.matrix - cb.matrix).abs() <= 1e-12, || {
                        format!("n={n} eps={eps} {} depends on the phase", ca.quantity)
                    })?;
                }
            }
        }

        for k in 0..=10_000 {
            let x = (SEPARABLE_EDGE + (1.0 - SEPARABLE_EDGE) * k as f64 / 10_000.0).min(1.0);
            let ls = ls_entanglement(x, 1.0).map_err(err)?;
            ensure(
                ls <= x && (ls - (3.0 * x - 1.0) / 2.0).abs() <= 1e-12,
                || format!("ordering fails at x = {x}"),
            )?;
        }
        Ok("continuity, monotonicity, phase invariance, ordering".to_string())
    })
}

fn criterion_11() -> Outcome {
    run(11, "--reproduce-paper", ms(60_000), || {
        let out = Command::new(env!("CARGO_BIN_EXE_ghz-entangle"))
            .arg("--reproduce-paper")
            .output()
            .map_err(|e| e.to_string())?;
        let stdout = String::from_utf8_lossy(&out.stdout);
        let rows: Vec<&str> = stdout
            .lines()
            .filter(|l| l.ends_with("PASS") || l.ends_with("FAIL"))
            .collect();
        ensure(out.status.code() == Some(0), || {
            format!("exit {:?}", out.status.code())
        })?;
        ensure(
            rows.len() == 5 && rows.iter().all(|r| r.ends_with("PASS")),
            || format!("rows: {rows:?}"),
        )?;
        Ok("exit 0, 5/5 rows PASS".to_string())
    })
}

#[test]
fn acceptance_criteria() {
    let outcomes = vec![
        criterion_1(),
        criterion_2(),
        closed_form_criterion(
            3,
            "bipartite-average value",
            bipartite_average_measure,
            0.412,
            Some(3),
            5e-4,
        ),
        closed_form_criterion(
            4,
            "teleportation value",
            teleportation_measure,
            0.824,
            Some(3),
            5e-4,
        ),
        closed_form_criterion(
            5,
            "operator-norm value",
            operator_norm_measure,
            2.472,
            None,
            2e-3,
        ),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
        criterion_11(),
    ];
    for o in &outcomes {
        let status = if o.ok() { "PASS" } else { "FAIL" };
        let slow = if o.elapsed >= o.budget {
            " (over time budget)"
        } else {
            ""
        };
        println!(
            "criterion {:>2} {status}: {} [{:.3?} < {:?}]{slow} {}",
            o.id, o.name, o.elapsed, o.budget, o.detail
        );
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.ok()).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
