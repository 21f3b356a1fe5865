//! Self-check suite: runs the structural invariants of a built complex and
//! reports one named verdict per check. The fast level covers the poset
//! axioms; the full level adds the per-cell realization and witness
//! round-trip sweeps.

use rayon::prelude::*;

use crate::complex::{factorial, CellComplex};
use crate::partition::meet;
use crate::realization::verify_cell_realization;
use crate::witness::{label_of, witness_of, CLOSURE_REL_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyLevel {
    Fast,
    Full,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed)
    }

    fn push(&mut self, name: &'static str, result: Result<(), String>) {
        match result {
            Ok(()) => self.checks.push(CheckResult {
                name,
                passed: true,
                detail: "ok".into(),
            }),
            Err(detail) => self.checks.push(CheckResult {
                name,
                passed: false,
                detail,
            }),
        }
    }
}

/// Run the invariant suite on a built complex.
pub fn run_suite(complex: &CellComplex, level: VerifyLevel) -> VerifyReport {
    let mut report = VerifyReport::default();

    report.push(
        "boundary-square-zero",
        complex.check_boundary_square().map_err(|e| e.to_string()),
    );
    report.push(
        "diamond-property",
        complex.check_diamond_property().map_err(|e| e.to_string()),
    );
    report.push("facet-count", {
        let expected = factorial(complex.n() - 1);
        let found = complex.facets().len();
        if found == expected {
            Ok(())
        } else {
            Err(format!("expected {expected} facets, found {found}"))
        }
    });
    report.push("euler-betti-consistency", {
        match complex.betti_mod2() {
            Ok(betti) => {
                let from_betti: i64 = betti
                    .iter()
                    .enumerate()
                    .map(|(d, &b)| if d % 2 == 0 { b as i64 } else { -(b as i64) })
                    .sum();
                if from_betti == complex.euler_characteristic() {
                    Ok(())
                } else {
                    Err(format!(
                        "chi from f-vector {} != chi from betti {}",
                        complex.euler_characteristic(),
                        from_betti
                    ))
                }
            }
            Err(e) => Err(e.to_string()),
        }
    });
    report.push("vertex-figures", {
        let mut failure = None;
        for v in complex.cells_of_dim(0) {
            if let Err(e) = complex.vertex_figure_signature(v.id) {
                failure = Some(e.to_string());
                break;
            }
        }
        failure.map_or(Ok(()), Err)
    });

    if level == VerifyLevel::Fast {
        return report;
    }

    report.push("face-figures", {
        let mut failure = None;
        for cell in complex.cells() {
            match complex.face_figure_check(cell.id) {
                Ok(true) => {}
                Ok(false) => {
                    failure = Some(format!("interval above {} is not a product", cell.label));
                    break;
                }
                Err(e) => {
                    failure = Some(e.to_string());
                    break;
                }
            }
        }
        failure.map_or(Ok(()), Err)
    });

    report.push("cell-realization", {
        let verdicts: Vec<Option<String>> = complex
            .cells()
            .par_iter()
            .map(|cell| match verify_cell_realization(complex, cell.id) {
                Ok(true) => None,
                Ok(false) => Some(format!("cell {} fails the zonotope match", cell.label)),
                Err(e) => Some(e.to_string()),
            })
            .collect();
        verdicts.into_iter().flatten().next().map_or(Ok(()), Err)
    });

    report.push("witness-round-trip", {
        let linkage = complex.linkage();
        let verdicts: Vec<Option<String>> = complex
            .cells()
            .par_iter()
            .map(|cell| {
                let witness = match witness_of(&cell.label, linkage) {
                    Ok(w) => w,
                    Err(e) => return Some(e.to_string()),
                };
                if witness.max_length_error(&linkage.lengths_f64()) > CLOSURE_REL_TOL {
                    return Some(format!("witness of {} misses its lengths", cell.label));
                }
                match label_of(&witness, linkage) {
                    Ok(label) if label == cell.label => None,
                    Ok(label) => Some(format!("witness of {} reads back as {}", cell.label, label)),
                    Err(e) => Some(e.to_string()),
                }
            })
            .collect();
        verdicts.into_iter().flatten().next().map_or(Ok(()), Err)
    });

    // Quadratic in the cell count; gated to n <= 6.
    if complex.n() <= 6 {
        report.push("meet-vertex-intersection", {
            let vertex_sets = complex.closure_vertex_sets();
            let mut failure = None;
            'outer: for a in complex.cells() {
                for b in complex.cells() {
                    let inter: std::collections::BTreeSet<usize> = vertex_sets[a.id]
                        .intersection(&vertex_sets[b.id])
                        .copied()
                        .collect();
                    match meet(&a.label, &b.label, complex.linkage()) {
                        Ok(Some(m)) => match complex.lookup(&m) {
                            Some(cell) if vertex_sets[cell] == inter => {}
                            _ => {
                                failure = Some(format!(
                                    "meet({}, {}) = {} mismatch",
                                    a.label, b.label, m
                                ));
                                break 'outer;
                            }
                        },
                        Ok(None) => {
                            if !inter.is_empty() {
                                failure = Some(format!(
                                    "meet({}, {}) empty but closures intersect",
                                    a.label, b.label
                                ));
                                break 'outer;
                            }
                        }
                        Err(e) => {
                            failure = Some(e.to_string());
                            break 'outer;
                        }
                    }
                }
            }
            failure.map_or(Ok(()), Err)
        });
    }

    report
}
