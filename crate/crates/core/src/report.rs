//! Machine-readable reporting: engine and complex results rendered as a
//! stream of line-delimited records with stable keys.
//!
//! Each [`Record`] serializes to one JSON object per line whose first key,
//! `record`, names its type; the remaining keys are fixed per type, with
//! `null` for absent optional values.  Seeds, solver determinism, and the
//! fixed key order make record streams byte-reproducible run to run.
//! [`Record::text`] renders the same data as a short human-readable line.

use serde::Serialize;

use crate::cells::{GaugePath, OneCell};
use crate::complexes::{
    HypothesesReport, PageVanishing, QuotientCohomology, SpectralEntry,
};
use crate::engine::{HomotopyComparison, TraceStep, TwistedPageCheck};
use crate::morphism::InfinityMorphism;
use crate::scalar::format_scalar;
use crate::space::{Element, FilteredGradedSpace, PolyElement};
use crate::structure::SLInftyStructure;

/// `(basis id, coefficient)` pairs of an element, in basis order.
pub fn element_terms(e: &Element) -> Vec<(String, String)> {
    e.coeffs
        .iter()
        .map(|(i, c)| (e.space.basis[*i].id.clone(), format_scalar(c)))
        .collect()
}

/// `(basis id, t-power, coefficient)` triples of a polynomial element.
pub fn poly_terms(e: &PolyElement) -> Vec<(String, usize, String)> {
    use num_traits::Zero;
    let mut out = Vec::new();
    for (i, p) in &e.coeffs {
        for (k, c) in p.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.push((e.space.basis[*i].id.clone(), k, format_scalar(c)));
            }
        }
    }
    out
}

/// Human-readable term list, `0` for the zero element.
pub fn terms_text(e: &Element) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    element_terms(e)
        .into_iter()
        .map(|(id, c)| format!("{c} {id}"))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// One line of structured output.  Variant and field names are the stable
/// external contract; see `docs/formats.md`.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    /// One violated identity found by a relation verifier.
    Violation {
        space: String,
        kind: String,
        arity: usize,
        inputs: Vec<String>,
        detail: String,
    },
    /// Verifier summary for one structure or morphism.
    Validate {
        name: String,
        violations: usize,
        ok: bool,
    },
    /// One hypothesis condition with its verdict.
    Condition {
        id: String,
        required: bool,
        pass: bool,
        dim: Option<usize>,
        witness: Option<String>,
        description: String,
    },
    /// Agreement data between the main hypothesis set and its variants.
    Alternates {
        main: bool,
        windowed: bool,
        mixed: bool,
        disagree: bool,
    },
    /// Hypothesis battery summary.
    Hypotheses {
        variant: String,
        r: i64,
        satisfied: bool,
    },
    /// A named element with its terms.
    Element {
        name: String,
        space: String,
        degree: Option<i64>,
        weight: i64,
        terms: Vec<(String, String)>,
    },
    /// Maurer-Cartan check verdict.
    Mc { is_mc: bool, curvature_weight: i64 },
    /// Quotient cohomology dimension.
    Cohomology {
        space: String,
        lower: i64,
        upper: i64,
        degree: i64,
        dim: usize,
    },
    /// One spectral page entry.
    Spectral {
        space: String,
        page: i64,
        column: i64,
        degree: i64,
        dim: usize,
    },
    /// Page-vanishing verdict for a complex.
    Page {
        label: String,
        page: i64,
        vanishes: bool,
        total_dim: usize,
        witness_column: Option<i64>,
        witness_degree: Option<i64>,
    },
    /// A named one-cell with polynomial terms and endpoints.
    Cell {
        name: String,
        space: String,
        rectified: bool,
        body: Vec<(String, usize, String)>,
        dt: Vec<(String, usize, String)>,
        start: Vec<(String, String)>,
        end: Vec<(String, String)>,
    },
    /// Gauge path summary.
    Path {
        space: String,
        cells: usize,
        start: Vec<(String, String)>,
        end: Vec<(String, String)>,
    },
    /// One engine stage.
    Step {
        p: i64,
        label: String,
        audits: usize,
        ok: bool,
    },
    /// One named check inside a stage.
    Audit {
        p: i64,
        label: String,
        name: String,
        ok: bool,
        detail: String,
    },
    /// One named witness element inside a stage.
    Witness {
        p: i64,
        label: String,
        name: String,
        terms: Vec<(String, String)>,
    },
    /// Twisted cohomology dimension comparison.
    Homotopy {
        n: i64,
        degree: i64,
        dim_source: usize,
        dim_target: usize,
        equal: bool,
        gauged: bool,
    },
    /// One fuzz case outcome.
    FuzzCase {
        index: usize,
        seed: u64,
        name: String,
        dim: usize,
        n: i64,
        abelian: bool,
        kind: String,
        ok: bool,
        detail: String,
    },
    /// Fuzz run summary.
    FuzzSummary {
        cases: usize,
        failures: usize,
        ok: bool,
    },
    /// Final verdict of a command.
    Outcome {
        op: String,
        ok: bool,
        detail: String,
    },
}

impl Record {
    /// One JSON object, no trailing newline.
    pub fn json(&self) -> String {
        serde_json::to_string(self).expect("record serialization cannot fail")
    }

    /// Short human-readable rendering of the same data.
    pub fn text(&self) -> String {
        fn flag(ok: bool) -> &'static str {
            if ok {
                "pass"
            } else {
                "FAIL"
            }
        }
        fn pairs(terms: &[(String, String)]) -> String {
            if terms.is_empty() {
                return "0".to_string();
            }
            terms
                .iter()
                .map(|(id, c)| format!("{c} {id}"))
                .collect::<Vec<_>>()
                .join(" + ")
        }
        match self {
            Record::Violation { space, kind, arity, inputs, detail } => format!(
                "violation {space} {kind} arity {arity} on ({}): {detail}",
                inputs.join(", ")
            ),
            Record::Validate { name, violations, ok } => {
                format!("{}: {name}, {violations} violations", flag(*ok))
            }
            Record::Condition { id, required, pass, dim, description, .. } => {
                let req = if *required { "required" } else { "informative" };
                let dim = dim.map(|d| format!(", dim {d}")).unwrap_or_default();
                format!("{}: {id} ({req}{dim}) {description}", flag(*pass))
            }
            Record::Alternates { main, windowed, mixed, disagree } => format!(
                "alternate sets: main={main} windowed={windowed} mixed={mixed} disagree={disagree}"
            ),
            Record::Hypotheses { variant, r, satisfied } => {
                format!("{}: hypotheses ({variant}, r={r})", flag(*satisfied))
            }
            Record::Element { name, degree, weight, terms, .. } => {
                let deg = degree.map(|d| d.to_string()).unwrap_or_else(|| "mixed".into());
                format!("{name} = {} (degree {deg}, weight {weight})", pairs(terms))
            }
            Record::Mc { is_mc, curvature_weight } => format!(
                "{}: Maurer-Cartan (curvature weight {curvature_weight})",
                flag(*is_mc)
            ),
            Record::Cohomology { space, lower, upper, degree, dim } => {
                format!("H^{degree}(F_{lower} {space} / F_{upper}) has dimension {dim}")
            }
            Record::Spectral { space, page, column, degree, dim } => format!(
                "page {page} column {column} degree {degree} of {space}: dimension {dim}"
            ),
            Record::Page { label, page, vanishes, total_dim, witness_column, witness_degree } => {
                let tail = match (witness_column, witness_degree) {
                    (Some(c), Some(d)) => format!(", witness at column {c} degree {d}"),
                    _ => String::new(),
                };
                format!(
                    "{}: {label} page {page} (total dimension {total_dim}{tail})",
                    flag(*vanishes)
                )
            }
            Record::Cell { name, rectified, start, end, .. } => format!(
                "cell {name}{}: {} ~> {}",
                if *rectified { " (rectified)" } else { "" },
                pairs(start),
                pairs(end)
            ),
            Record::Path { cells, start, end, .. } => {
                format!("path of {cells} cells: {} ~> {}", pairs(start), pairs(end))
            }
            Record::Step { p, label, audits, ok } => {
                format!("{}: p={p} {label} ({audits} audits)", flag(*ok))
            }
            Record::Audit { p, label, name, ok, detail } => {
                format!("{}: p={p} {label}.{name}: {detail}", flag(*ok))
            }
            Record::Witness { p, label, name, terms } => {
                format!("p={p} {label} {name} = {}", pairs(terms))
            }
            Record::Homotopy { n, degree, dim_source, dim_target, equal, gauged } => format!(
                "{}: level {n} (degree {degree}) dimensions {dim_source} vs {dim_target}{}",
                flag(*equal),
                if *gauged { " (base point gauged)" } else { "" }
            ),
            Record::FuzzCase { index, seed, name, kind, ok, detail, .. } => {
                format!("{}: case {index} seed {seed} {name} [{kind}] {detail}", flag(*ok))
            }
            Record::FuzzSummary { cases, failures, ok } => {
                format!("{}: {cases} cases, {failures} failures", flag(*ok))
            }
            Record::Outcome { op, ok, detail } => format!("{}: {op} {detail}", flag(*ok)),
        }
    }
}

/// Records for a named element.
pub fn element_record(name: &str, e: &Element) -> Record {
    Record::Element {
        name: name.to_string(),
        space: e.space.name.clone(),
        degree: e.degree().unwrap_or(None),
        weight: e.weight(),
        terms: element_terms(e),
    }
}

/// Record for a named one-cell.
pub fn cell_record(name: &str, cell: &OneCell) -> Record {
    Record::Cell {
        name: name.to_string(),
        space: cell.body.space.name.clone(),
        rectified: cell.dt_part.is_constant(),
        body: poly_terms(&cell.body),
        dt: poly_terms(&cell.dt_part),
        start: element_terms(&cell.start()),
        end: element_terms(&cell.end()),
    }
}

/// Path summary followed by one cell record per cell.
pub fn path_records(path: &GaugePath, space: &FilteredGradedSpace) -> Vec<Record> {
    let empty: Vec<(String, String)> = Vec::new();
    let mut out = vec![Record::Path {
        space: space.name.clone(),
        cells: path.cells.len(),
        start: path.start().map(|e| element_terms(&e)).unwrap_or_else(|| empty.clone()),
        end: path.end().map(|e| element_terms(&e)).unwrap_or(empty),
    }];
    for (i, cell) in path.cells.iter().enumerate() {
        out.push(cell_record(&format!("cell_{i}"), cell));
    }
    out
}

/// Relation and filtration verdicts for a structure.
pub fn validate_structure_records(l: &SLInftyStructure) -> Vec<Record> {
    let mut out = Vec::new();
    let mut count = 0usize;
    for v in l.verify_linfty_relations(None) {
        count += 1;
        out.push(Record::Violation {
            space: l.space.name.clone(),
            kind: "relation".to_string(),
            arity: v.arity,
            inputs: v.inputs.clone(),
            detail: format!("defect {}", terms_text(&v.defect)),
        });
    }
    for v in l.verify_filtration_compatibility() {
        count += 1;
        out.push(Record::Violation {
            space: l.space.name.clone(),
            kind: "filtration".to_string(),
            arity: v.inputs.len(),
            inputs: v.inputs.clone(),
            detail: format!(
                "output {} has weight {}, inputs sum to {}",
                v.output, v.output_weight, v.input_weight_sum
            ),
        });
    }
    out.push(Record::Validate {
        name: format!("structure {}", l.space.name),
        violations: count,
        ok: count == 0,
    });
    out
}

/// Relation and filtration verdicts for a morphism.
pub fn validate_morphism_records(u: &InfinityMorphism) -> Vec<Record> {
    let mut out = Vec::new();
    let mut count = 0usize;
    for v in u.verify_morphism_relations(None) {
        count += 1;
        out.push(Record::Violation {
            space: u.source.space.name.clone(),
            kind: "morphism_relation".to_string(),
            arity: v.arity,
            inputs: v.inputs.clone(),
            detail: format!("defect {}", terms_text(&v.defect)),
        });
    }
    for v in u.verify_filtration_compatibility() {
        count += 1;
        out.push(Record::Violation {
            space: u.source.space.name.clone(),
            kind: "morphism_filtration".to_string(),
            arity: v.inputs.len(),
            inputs: v.inputs.clone(),
            detail: format!(
                "output {} has weight {}, required at least {}",
                v.output, v.output_weight, v.required_weight
            ),
        });
    }
    out.push(Record::Validate {
        name: format!(
            "morphism {} -> {}",
            u.source.space.name, u.target.space.name
        ),
        violations: count,
        ok: count == 0,
    });
    out
}

/// One condition record per hypothesis, the alternates when present, and
/// the battery summary.
pub fn hypothesis_records(report: &HypothesesReport) -> Vec<Record> {
    let mut out = Vec::new();
    for c in &report.conditions {
        out.push(Record::Condition {
            id: c.id.clone(),
            required: c.required,
            pass: c.pass,
            dim: c.dim_found,
            witness: c.witness.clone(),
            description: c.description.clone(),
        });
    }
    if let Some(alt) = &report.alternates {
        out.push(Record::Alternates {
            main: alt.main,
            windowed: alt.windowed,
            mixed: alt.mixed,
            disagree: alt.disagree,
        });
    }
    out.push(Record::Hypotheses {
        variant: report.variant.as_str().to_string(),
        r: report.r,
        satisfied: report.satisfied,
    });
    out
}

pub fn cohomology_records(q: &QuotientCohomology, space: &FilteredGradedSpace) -> Vec<Record> {
    let mut out = vec![Record::Cohomology {
        space: space.name.clone(),
        lower: q.lower,
        upper: q.upper,
        degree: q.degree,
        dim: q.dim,
    }];
    for (i, rep) in q.representatives.iter().enumerate() {
        out.push(element_record(&format!("representative_{i}"), rep));
    }
    out
}

pub fn spectral_records(e: &SpectralEntry, space: &FilteredGradedSpace) -> Vec<Record> {
    let mut out = vec![Record::Spectral {
        space: space.name.clone(),
        page: e.page,
        column: e.column,
        degree: e.degree,
        dim: e.dim,
    }];
    for (i, rep) in e.representatives.iter().enumerate() {
        out.push(element_record(&format!("representative_{i}"), rep));
    }
    out
}

/// Page-vanishing verdict, with the witness class when one exists.
pub fn page_records(label: &str, p: &PageVanishing) -> Vec<Record> {
    let mut out = vec![Record::Page {
        label: label.to_string(),
        page: p.page,
        vanishes: p.vanishes,
        total_dim: p.total_dim,
        witness_column: p.witness.as_ref().map(|w| w.column),
        witness_degree: p.witness.as_ref().map(|w| w.degree),
    }];
    if let Some(w) = &p.witness {
        out.push(element_record("witness_class", &w.class));
    }
    out
}

/// Flatten engine stages into step, audit, and witness records.
pub fn trace_records(steps: &[TraceStep]) -> Vec<Record> {
    let mut out = Vec::new();
    for step in steps {
        out.push(Record::Step {
            p: step.p,
            label: step.label.clone(),
            audits: step.audits.len(),
            ok: step.audits.iter().all(|a| a.ok),
        });
        for a in &step.audits {
            out.push(Record::Audit {
                p: step.p,
                label: step.label.clone(),
                name: a.name.clone(),
                ok: a.ok,
                detail: a.detail.clone(),
            });
        }
        for (name, e) in &step.witnesses {
            out.push(Record::Witness {
                p: step.p,
                label: step.label.clone(),
                name: name.clone(),
                terms: element_terms(e),
            });
        }
    }
    out
}

pub fn homotopy_record(cmp: &HomotopyComparison) -> Record {
    Record::Homotopy {
        n: cmp.n,
        degree: cmp.degree,
        dim_source: cmp.dim_source,
        dim_target: cmp.dim_target,
        equal: cmp.equal,
        gauged: cmp.gauged,
    }
}

/// The untwisted and twisted cone verdicts side by side.
pub fn twisted_check_records(check: &TwistedPageCheck) -> Vec<Record> {
    let mut out = page_records("untwisted_cone", &check.untwisted);
    out.extend(page_records("twisted_cone", &check.twisted));
    out.push(Record::Outcome {
        op: "twisted_quasi_iso".to_string(),
        ok: check.pass,
        detail: if check.agree {
            "twisted and untwisted verdicts agree".to_string()
        } else {
            "twisted and untwisted verdicts disagree".to_string()
        },
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::{AlternateSets, HypothesisCondition, HypothesisVariant};
    use crate::engine::AuditRecord;
    use crate::scalar::{from_i64, ratio};
    use crate::space::BasisVector;
    use crate::structure::BracketOutput;
    use std::collections::BTreeMap;
    use std::sync::Arc;

    fn tiny() -> Arc<SLInftyStructure> {
        let s = crate::space::FilteredGradedSpace::new(
            "T",
            vec![
                BasisVector { id: "e".into(), degree: 0, weight: 1 },
                BasisVector { id: "f".into(), degree: 1, weight: 2 },
            ],
            2,
            1,
        )
        .unwrap();
        Arc::new(
            SLInftyStructure::new(
                &s,
                true,
                vec![(vec![0], BTreeMap::from([(1usize, from_i64(1))]))],
            )
            .unwrap(),
        )
    }

    #[test]
    fn records_serialize_with_the_tag_first() {
        let l = tiny();
        let e = Element::from_coeffs(
            &l.space,
            BTreeMap::from([(0usize, ratio(-1, 2))]),
        );
        let json = element_record("input", &e).json();
        assert_eq!(
            json,
            "{\"record\":\"element\",\"name\":\"input\",\"space\":\"T\",\
             \"degree\":0,\"weight\":1,\"terms\":[[\"e\",\"-1/2\"]]}"
        );
        assert_eq!(
            element_record("input", &e).text(),
            "input = -1/2 e (degree 0, weight 1)"
        );
    }

    #[test]
    fn validation_of_a_clean_structure_is_one_summary_line() {
        let l = tiny();
        let records = validate_structure_records(&l);
        assert_eq!(records.len(), 1);
        let Record::Validate { violations, ok, .. } = &records[0] else {
            panic!("expected a summary record")
        };
        assert_eq!(*violations, 0);
        assert!(ok);
    }

    #[test]
    fn a_broken_structure_produces_violation_records() {
        // d^2 != 0: e -> f at weight 1 loses filtration depth too.
        let s = crate::space::FilteredGradedSpace::new(
            "B",
            vec![
                BasisVector { id: "a".into(), degree: 0, weight: 1 },
                BasisVector { id: "b".into(), degree: 1, weight: 1 },
                BasisVector { id: "c".into(), degree: 2, weight: 1 },
            ],
            1,
            1,
        )
        .unwrap();
        let entries: Vec<(Vec<usize>, BracketOutput)> = vec![
            (vec![0], BTreeMap::from([(1usize, from_i64(1))])),
            (vec![1], BTreeMap::from([(2usize, from_i64(1))])),
        ];
        let l = SLInftyStructure::new_unchecked(&s, true, entries);
        let records = validate_structure_records(&l);
        assert!(records
            .iter()
            .any(|r| matches!(r, Record::Violation { kind, .. } if kind == "relation")));
        let Record::Validate { ok, .. } = records.last().unwrap() else {
            panic!("summary last")
        };
        assert!(!ok);
    }

    #[test]
    fn hypothesis_reports_flatten_to_condition_lines() {
        let report = HypothesesReport {
            variant: HypothesisVariant::Standard,
            r: 2,
            conditions: vec![HypothesisCondition {
                id: "GMH0.L.F1-F2".to_string(),
                description: "test condition".to_string(),
                required: true,
                pass: false,
                dim_found: Some(1),
                witness: Some("e".to_string()),
            }],
            alternates: Some(AlternateSets {
                main: false,
                windowed: true,
                mixed: true,
                disagree: true,
            }),
            satisfied: false,
        };
        let records = hypothesis_records(&report);
        assert_eq!(records.len(), 3);
        assert!(records[0].json().starts_with("{\"record\":\"condition\",\"id\":\"GMH0.L.F1-F2\""));
        assert!(records[0].text().starts_with("FAIL: GMH0.L.F1-F2 (required, dim 1)"));
        assert!(records[1].json().contains("\"disagree\":true"));
        assert!(records[2].json().ends_with("\"satisfied\":false}"));
    }

    #[test]
    fn trace_steps_flatten_in_order() {
        let l = tiny();
        let e = Element::basis_element(&l.space, 0);
        let steps = vec![TraceStep {
            p: 2,
            label: "surjectivity.base".to_string(),
            witnesses: vec![("x".to_string(), e)],
            audits: vec![AuditRecord {
                name: "a".to_string(),
                ok: true,
                detail: "weight 2 against level 2".to_string(),
            }],
        }];
        let records = trace_records(&steps);
        assert_eq!(records.len(), 3);
        assert!(matches!(&records[0], Record::Step { ok: true, .. }));
        assert!(matches!(&records[1], Record::Audit { .. }));
        assert!(matches!(&records[2], Record::Witness { .. }));
    }
}
