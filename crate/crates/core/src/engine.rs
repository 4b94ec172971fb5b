//! Descent machinery over the morphism: gauge ladders, exactification,
//! and the two filtration inductions behind the equivalence-class maps.
//!
//! Everything here walks the finite filtration window by window.
//! [`gauge_to_filtration`] pushes a flat element into a prescribed level
//! along a path of flat cells, [`exactify`] trims a closed-modulo-deep
//! element to an exact representative by the same ladder, and the three
//! `pi0_*` entry points run the inductions proper: [`pi0_preimage`] lifts
//! a flat target element backwards through the morphism one level at a
//! time, [`pi0_trivialize`] contracts a flat source element whose image
//! bounds, and [`pi0_separate`] reduces a pair with homotopic images to
//! the contraction case by twisting at one of them.
//!
//! Every stage records its named witnesses and the membership checks it
//! performed into a [`TraceStep`].  A failed membership is an audit error
//! (a bug, not bad data), a failed linear solve is a hypothesis violation
//! carrying the window it needed, and either one is returned with the
//! partial trace attached where it can carry one.  Results are
//! re-verified from scratch at the end of each run: flatness of the
//! returned element, flatness and endpoint chaining of every cell in the
//! returned path, and the path endpoints themselves.

use crate::cells::{
    adjust_dt_by_exact, concatenate_via_morphism, rectify, solve_ivp, GaugePath, OneCell,
};
use crate::complexes::{
    verify_gm_hypotheses, ConeComplex, FilteredComplex, HypothesesReport, HypothesisVariant,
    PageVanishing,
};
use crate::error::{Error, Result};
use crate::morphism::InfinityMorphism;
use crate::scalar;
use crate::space::{check_same_space, Element, PolyElement};
use crate::structure::SLInftyStructure;

fn neg(e: &Element) -> Element {
    e.scale(&scalar::from_i64(-1))
}

/// How the gauge descent picks its generator at each window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeMode {
    /// Solve inside the window quotient itself.  The endpoint lands below
    /// the window top because bracket corrections double the level.
    Windowed,
    /// Solve anchored at the bottom level, then trim the generator by an
    /// exact term so that it sits at the current level.  Uses only
    /// quotients whose lower edge is level 1.
    Anchored,
}

impl GaugeMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            GaugeMode::Windowed => "windowed",
            GaugeMode::Anchored => "anchored",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "windowed" => Ok(GaugeMode::Windowed),
            "anchored" => Ok(GaugeMode::Anchored),
            other => Err(Error::input(format!(
                "unknown gauge mode {other:?}; expected \"windowed\" or \"anchored\""
            ))),
        }
    }
}

/// Push a flat element into filtration level `r` along a path of flat
/// cells, one window at a time.  Returns the endpoint together with the
/// path connecting `a` to it; the path is empty when `a` is already deep
/// enough.  The number of cells never exceeds the number of doubling
/// windows below `r`.
pub fn gauge_to_filtration(
    l: &SLInftyStructure,
    a: &Element,
    r: i64,
    mode: GaugeMode,
) -> Result<(Element, GaugePath)> {
    check_same_space(&a.space, &l.space, "gauge input")?;
    if r < 1 {
        return Err(Error::input(format!(
            "gauge target level must be >= 1, got {r}"
        )));
    }
    if !l.is_mc(a)? {
        return Err(Error::input("gauge input must be flat"));
    }
    if !a.in_filtration(1) {
        return Err(Error::input(
            "gauge input must lie in filtration level 1",
        ));
    }
    let complex = FilteredComplex::from_structure(l);
    let mut cur = a.clone();
    let mut cells = Vec::new();
    let mut level = 1i64;
    while level < r {
        let hi = (2 * level).min(r);
        if cur.in_filtration(hi) {
            level = hi;
            continue;
        }
        let generator = match mode {
            GaugeMode::Windowed => {
                let q = complex.solve_in_quotient(&cur, level, hi)?.ok_or_else(|| {
                    Error::hypothesis(
                        "gauge.ladder",
                        level,
                        0,
                        format!("H^0(F_{level}/F_{hi}) = 0 on {}", l.space.name),
                    )
                })?;
                neg(&q)
            }
            GaugeMode::Anchored => {
                let q = complex.solve_in_quotient(&cur, 1, hi)?.ok_or_else(|| {
                    Error::hypothesis(
                        "gauge.anchor",
                        level,
                        0,
                        format!("H^0(F_1/F_{hi}) = 0 on {}", l.space.name),
                    )
                })?;
                let trimmed = if level > 1 {
                    let rho = complex.solve_in_quotient(&q, 1, level)?.ok_or_else(|| {
                        Error::hypothesis(
                            "gauge.trim",
                            level,
                            -1,
                            format!("H^{{-1}}(F_1/F_{level}) = 0 on {}", l.space.name),
                        )
                    })?;
                    q.sub(&l.differential(&rho))
                } else {
                    q
                };
                neg(&trimmed)
            }
        };
        let cell = solve_ivp(l, &cur, &PolyElement::from_element(&generator))?;
        let next = cell.end();
        if !next.in_filtration(hi) {
            return Err(Error::audit(
                "gauge.window",
                format!(
                    "endpoint weight {} did not reach level {hi}",
                    next.weight()
                ),
            ));
        }
        cells.push(cell);
        cur = next;
        level = hi;
    }
    Ok((cur, GaugePath { cells }))
}

/// Find a degree `-1` primitive `y` such that `x - d y` lies in
/// filtration level `target`, working up the doubling ladder.  Requires
/// `x` of degree 0 with `d x` already in the target level.
pub fn exactify(l: &SLInftyStructure, x: &Element, target: i64) -> Result<Element> {
    check_same_space(&x.space, &l.space, "exactification input")?;
    if x.degree()?.unwrap_or(0) != 0 {
        return Err(Error::input("exactification input must have degree 0"));
    }
    if !l.differential(x).in_filtration(target) {
        return Err(Error::input(format!(
            "exactification input must be closed modulo level {target}"
        )));
    }
    if !x.in_filtration(1) {
        return Err(Error::input(
            "exactification input must lie in filtration level 1",
        ));
    }
    let complex = FilteredComplex::from_structure(l);
    let mut cur = x.clone();
    let mut y = Element::zero(&l.space);
    let mut level = 1i64;
    while level < target {
        let hi = (2 * level).min(target);
        if cur.in_filtration(hi) {
            level = hi;
            continue;
        }
        let step = complex.solve_in_quotient(&cur, level, hi)?.ok_or_else(|| {
            Error::hypothesis(
                "exactify",
                level,
                0,
                format!("H^0(F_{level}/F_{hi}) = 0 on {}", l.space.name),
            )
        })?;
        cur = cur.sub(&l.differential(&step));
        y = y.add(&step);
        level = hi;
    }
    if !x.sub(&l.differential(&y)).in_filtration(target) {
        return Err(Error::audit(
            "exactify",
            format!(
                "remainder weight {} below target level {target}",
                x.sub(&l.differential(&y)).weight()
            ),
        ));
    }
    Ok(y)
}

/// Which induction the engine runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineVariant {
    /// Two-sided descent: preimages are driven into level `r` on both
    /// sides and the steps split into a deep and a shallow regime.
    Standard,
    /// Lane for an abelian source whose filtration starts at level 0; the
    /// inductions run from level 1 (preimages) or level 0 (contractions,
    /// with a correction for the higher morphism components) and every
    /// step uses the deep construction.
    Abelian,
}

impl EngineVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            EngineVariant::Standard => "standard",
            EngineVariant::Abelian => "abelian",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(EngineVariant::Standard),
            "abelian" => Ok(EngineVariant::Abelian),
            other => Err(Error::input(format!(
                "unknown engine variant {other:?}; expected \"standard\" or \"abelian\""
            ))),
        }
    }

    pub fn hypothesis_variant(&self) -> HypothesisVariant {
        match self {
            EngineVariant::Standard => HypothesisVariant::Standard,
            EngineVariant::Abelian => HypothesisVariant::Abelian,
        }
    }
}

/// A morphism together with a verified hypothesis report at page gap `r`.
///
/// [`GMContext::new`] runs the full hypothesis battery and refuses to
/// build when a required condition fails, so every engine run starts from
/// checked assumptions.  [`GMContext::new_unchecked`] records the same
/// report without gating, for negative experiments.
#[derive(Debug, Clone)]
pub struct GMContext {
    pub u: InfinityMorphism,
    pub r: i64,
    pub variant: EngineVariant,
    pub report: HypothesesReport,
}

impl GMContext {
    pub fn new(u: &InfinityMorphism, r: i64, variant: EngineVariant) -> Result<Self> {
        let report = verify_gm_hypotheses(u, r, variant.hypothesis_variant())?;
        if !report.satisfied {
            let failed: Vec<&str> = report
                .conditions
                .iter()
                .filter(|c| c.required && !c.pass)
                .map(|c| c.id.as_str())
                .collect();
            return Err(Error::hypothesis(
                "context",
                r,
                0,
                format!("required conditions failed: {}", failed.join(", ")),
            ));
        }
        Ok(GMContext {
            u: u.clone(),
            r,
            variant,
            report,
        })
    }

    pub fn new_unchecked(u: &InfinityMorphism, r: i64, variant: EngineVariant) -> Result<Self> {
        let report = verify_gm_hypotheses(u, r, variant.hypothesis_variant())?;
        Ok(GMContext {
            u: u.clone(),
            r,
            variant,
            report,
        })
    }

    fn source(&self) -> &SLInftyStructure {
        &self.u.source
    }

    fn target(&self) -> &SLInftyStructure {
        &self.u.target
    }

    /// Last induction stage: the deeper of the two declared filtration
    /// lengths, so that the loop always reaches the level where both
    /// sides vanish.
    fn horizon(&self) -> i64 {
        self.u
            .source
            .space
            .filtration_length
            .max(self.u.target.space.filtration_length)
    }
}

/// One named check performed during a run, with its outcome.
#[derive(Debug, Clone)]
pub struct AuditRecord {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

/// One stage of an engine run: the induction index, a behavior label
/// (e.g. `"surjectivity.deep"`), the witnesses produced, and the checks
/// they passed.  Field names are stable; downstream records rely on them.
#[derive(Debug, Clone)]
pub struct TraceStep {
    pub p: i64,
    pub label: String,
    pub witnesses: Vec<(String, Element)>,
    pub audits: Vec<AuditRecord>,
}

/// Render per-step logs as short text lines for diagnostics.
pub fn step_lines(steps: &[TraceStep]) -> Vec<String> {
    steps
        .iter()
        .map(|s| {
            let failed: Vec<&str> = s
                .audits
                .iter()
                .filter(|a| !a.ok)
                .map(|a| a.name.as_str())
                .collect();
            let status = if failed.is_empty() {
                "all passed".to_string()
            } else {
                format!("failed: {}", failed.join(", "))
            };
            format!(
                "p={} {}: {} audits, {status}",
                s.p,
                s.label,
                s.audits.len()
            )
        })
        .collect()
}

/// Writer for one [`TraceStep`].  The step is pushed into the log up
/// front, so a failure mid-step leaves the partial record visible.
struct StepLog<'a> {
    steps: &'a mut Vec<TraceStep>,
    idx: usize,
}

impl<'a> StepLog<'a> {
    fn new(steps: &'a mut Vec<TraceStep>, p: i64, label: &str) -> Self {
        steps.push(TraceStep {
            p,
            label: label.to_string(),
            witnesses: Vec::new(),
            audits: Vec::new(),
        });
        let idx = steps.len() - 1;
        StepLog { steps, idx }
    }

    fn witness(&mut self, name: &str, e: &Element) {
        self.steps[self.idx]
            .witnesses
            .push((name.to_string(), e.clone()));
    }

    fn record(&mut self, name: &str, ok: bool, detail: String) -> Result<()> {
        self.steps[self.idx].audits.push(AuditRecord {
            name: name.to_string(),
            ok,
            detail: detail.clone(),
        });
        if ok {
            Ok(())
        } else {
            Err(Error::audit(
                format!("{}.{name}", self.steps[self.idx].label),
                detail,
            ))
        }
    }

    /// Membership audit: `e` must lie in filtration level `p` of its own
    /// space (levels clamp to the declared range).
    fn member(&mut self, name: &str, e: &Element, p: i64) -> Result<()> {
        let ok = e.in_filtration(p);
        self.record(name, ok, format!("weight {} against level {p}", e.weight()))
    }

    fn vanishes(&mut self, name: &str, e: &Element) -> Result<()> {
        let ok = e.is_zero();
        let detail = if ok {
            "exactly zero".to_string()
        } else {
            format!("nonzero of weight {}", e.weight())
        };
        self.record(name, ok, detail)
    }
}

/// Everything a preimage run produced: the gauge path on the target, the
/// source and target element sequences, the connecting cells, and the
/// per-step logs.  Sequences are indexed from `start_index`.
#[derive(Debug, Clone)]
pub struct SurjectivityTrace {
    pub gauge_path: GaugePath,
    pub a: Vec<Element>,
    pub b: Vec<Element>,
    pub cells: Vec<OneCell>,
    pub steps: Vec<TraceStep>,
    pub start_index: i64,
}

/// Everything a contraction run produced: the gauge path on the source,
/// the element sequence descending to zero, the step cells, the witness
/// cells carried along, and the per-step logs.
#[derive(Debug, Clone)]
pub struct InjectivityTrace {
    pub gauge_path: GaugePath,
    pub a: Vec<Element>,
    pub xi: Vec<OneCell>,
    pub gamma: Vec<OneCell>,
    pub steps: Vec<TraceStep>,
    pub start_index: i64,
}

/// Which construction to use at the boundary stage `p = 2r - 1`, where
/// the deep and the shallow recipes are both valid.  The default takes
/// the deep one; the alternative forces the shallow one there, for
/// cross-checking that both produce audited steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepPolicy {
    Default,
    ShallowAtBoundary,
}

/// A cell that moves nothing: constant body and zero generator.  Such
/// cells are dropped from returned paths.
fn is_stationary(cell: &OneCell) -> bool {
    cell.body.is_constant() && cell.dt_part.is_zero()
}

fn assemble_path(
    l: &SLInftyStructure,
    gauge: &GaugePath,
    tail: &[OneCell],
    expected_start: &Element,
    expected_end: &Element,
    site: &str,
) -> Result<GaugePath> {
    let mut cells: Vec<OneCell> = Vec::new();
    cells.extend(gauge.cells.iter().cloned());
    cells.extend(tail.iter().cloned());
    cells.retain(|c| !is_stationary(c));
    let path = GaugePath { cells };
    path.verify(l)?;
    match (path.start(), path.end()) {
        (Some(start), Some(end)) => {
            if start != *expected_start {
                return Err(Error::audit(site, "path does not start at the input"));
            }
            if end != *expected_end {
                return Err(Error::audit(site, "path does not end at the result"));
            }
        }
        _ => {
            if expected_start != expected_end {
                return Err(Error::audit(
                    site,
                    "empty path connecting distinct endpoints",
                ));
            }
        }
    }
    Ok(path)
}

/// Flat preimage of a flat target element, with the connecting path.
///
/// Returns `(a, trace, path)` where `a` is flat in the source, the path
/// runs in the target from `b` to the image of `a`, and the trace holds
/// every witness and audit of the run.  Uses the default step policy.
pub fn pi0_preimage(
    ctx: &GMContext,
    b: &Element,
) -> Result<(Element, SurjectivityTrace, GaugePath)> {
    pi0_preimage_with(ctx, b, StepPolicy::Default)
}

/// [`pi0_preimage`] with an explicit boundary-stage policy.
pub fn pi0_preimage_with(
    ctx: &GMContext,
    b: &Element,
    policy: StepPolicy,
) -> Result<(Element, SurjectivityTrace, GaugePath)> {
    let mut trace = SurjectivityTrace {
        gauge_path: GaugePath { cells: Vec::new() },
        a: Vec::new(),
        b: Vec::new(),
        cells: Vec::new(),
        steps: Vec::new(),
        start_index: ctx.r + 1,
    };
    surjectivity_run(ctx, b, policy, &mut trace)
        .map_err(|e| e.with_partial_trace(step_lines(&trace.steps)))?;

    // Re-verify the results from scratch, independent of the trace.
    let a = trace
        .a
        .last()
        .cloned()
        .expect("the base stage always records an element");
    if !ctx.source().is_mc(&a)? {
        return Err(Error::audit("preimage.final", "returned element is not flat"));
    }
    let image = ctx.u.u_star(&a)?;
    let path = assemble_path(ctx.target(), &trace.gauge_path, &trace.cells, b, &image, "preimage.final")?;
    Ok((a, trace, path))
}

fn surjectivity_run(
    ctx: &GMContext,
    b: &Element,
    policy: StepPolicy,
    trace: &mut SurjectivityTrace,
) -> Result<()> {
    let l = ctx.source();
    let lt = ctx.target();
    let r = ctx.r;
    check_same_space(&b.space, &lt.space, "preimage target")?;
    if !lt.is_mc(b)? {
        return Err(Error::input("preimage target must be flat"));
    }
    if !b.in_filtration(1) {
        return Err(Error::input("preimage target must lie in filtration level 1"));
    }

    // Gauge the target into level r.  The two lanes use the descent mode
    // matching their hypothesis package.
    let mode = match ctx.variant {
        EngineVariant::Standard => GaugeMode::Anchored,
        EngineVariant::Abelian => GaugeMode::Windowed,
    };
    let (b_r, gauge_path) = gauge_to_filtration(lt, b, r, mode)?;
    trace.gauge_path = gauge_path;

    let cone = ConeComplex::from_morphism(&ctx.u)?;
    let target_complex = FilteredComplex::from_structure(lt);

    // Base stage: lift the gauged target through the cone at level r.
    {
        let mut log = StepLog::new(&mut trace.steps, r, "surjectivity.base");
        log.member("b_r", &b_r, r)?;
        let zero_source = Element::zero(&l.space);
        let (x, y) = cone.solve_lifting(&zero_source, &b_r, r, r)?;
        log.witness("x", &x);
        log.witness("y", &y);
        let (a_next, gamma1) = match ctx.variant {
            EngineVariant::Standard => {
                // Replace the lift by a cohomologous deep representative
                // and repair the connecting generator accordingly.
                let x_primitive = exactify(l, &x, r)?;
                log.witness("x_primitive", &x_primitive);
                let a_next = x.sub(&l.differential(&x_primitive));
                let y_hat = y.sub(&ctx.u.psi(&x_primitive));
                log.member("generator_closure", &lt.differential(&y_hat), r)?;
                let y_fix = target_complex
                    .solve_in_quotient(&y_hat, 1, r)?
                    .ok_or_else(|| {
                        Error::hypothesis(
                            "surjectivity.base",
                            r,
                            -1,
                            format!("H^{{-1}}(F_1/F_{r}) = 0 on {}", lt.space.name),
                        )
                    })?;
                (a_next, y_hat.sub(&lt.differential(&y_fix)))
            }
            EngineVariant::Abelian => {
                log.member("generator_closure", &lt.differential(&y), r)?;
                (x.clone(), y)
            }
        };
        let base_level = match ctx.variant {
            EngineVariant::Standard => r,
            EngineVariant::Abelian => 1,
        };
        log.member("a", &a_next, base_level)?;
        log.member("curvature", &l.curvature(&a_next)?, r + 1)?;
        log.witness("generator", &gamma1);
        let cell = solve_ivp(lt, &b_r, &PolyElement::from_element(&gamma1))?;
        let b_next = cell.end();
        log.member("b", &b_next, r)?;
        log.member(
            "image_defect",
            &ctx.u.u_star(&a_next)?.sub(&b_next),
            r + 1,
        )?;
        trace.a.push(a_next);
        trace.b.push(b_next);
        trace.cells.push(cell);
    }

    // Induction: one step per level from r + 1 up to the horizon.
    for p in (r + 1)..=ctx.horizon() {
        let a_cur = trace.a.last().unwrap().clone();
        let b_cur = trace.b.last().unwrap().clone();
        let deep = match ctx.variant {
            EngineVariant::Abelian => true,
            EngineVariant::Standard => {
                p > 2 * r - 1
                    || (p == 2 * r - 1 && policy == StepPolicy::Default)
            }
        };
        let label = if deep {
            "surjectivity.deep"
        } else {
            "surjectivity.shallow"
        };
        let mut log = StepLog::new(&mut trace.steps, p, label);
        let b_defect = ctx.u.u_star(&a_cur)?.sub(&b_cur);
        log.member("image_defect", &b_defect, p)?;
        let curv = l.curvature(&a_cur)?;
        log.member("curvature", &curv, p)?;
        log.member("curvature_closure", &l.differential(&curv), p + r)?;
        log.member(
            "cone_closure",
            &ctx.u.psi(&curv).sub(&lt.differential(&b_defect)),
            p + r,
        )?;
        let (x, y) = cone.solve_lifting(&curv, &b_defect, p, r)?;
        log.witness("x", &x);
        log.witness("y", &y);
        let (a_next, gamma1) = if deep {
            (a_cur.sub(&x), neg(&y))
        } else {
            let x_primitive = exactify(l, &x, r)?;
            log.witness("x_primitive", &x_primitive);
            let a_next = a_cur.sub(&x.sub(&l.differential(&x_primitive)));
            let y_hat = y.sub(&ctx.u.psi(&x_primitive));
            log.member("generator_closure", &lt.differential(&y_hat), r)?;
            let y_fix = target_complex
                .solve_in_quotient(&y_hat, 1, r)?
                .ok_or_else(|| {
                    Error::hypothesis(
                        label,
                        p,
                        -1,
                        format!("H^{{-1}}(F_1/F_{r}) = 0 on {}", lt.space.name),
                    )
                })?;
            (a_next, neg(&y_hat.sub(&lt.differential(&y_fix))))
        };
        let depth = match ctx.variant {
            EngineVariant::Standard => r,
            EngineVariant::Abelian => 1,
        };
        log.member("a", &a_next, depth)?;
        log.member("a_increment", &a_next.sub(&a_cur), p + 1 - r)?;
        log.member("curvature_next", &l.curvature(&a_next)?, p + 1)?;
        log.member("generator", &gamma1, p + 1 - r)?;
        log.witness("generator", &gamma1);
        let cell = solve_ivp(lt, &b_cur, &PolyElement::from_element(&gamma1))?;
        let b_next = cell.end();
        log.member("b", &b_next, r)?;
        log.member(
            "image_defect_next",
            &ctx.u.u_star(&a_next)?.sub(&b_next),
            p + 1,
        )?;
        let increment_level = match ctx.variant {
            EngineVariant::Standard if p + 1 > 2 * r - 1 => p + 1 - r,
            EngineVariant::Standard => 1,
            EngineVariant::Abelian => p,
        };
        log.member("b_increment", &b_next.sub(&b_cur), increment_level)?;
        trace.a.push(a_next);
        trace.b.push(b_next);
        trace.cells.push(cell);
    }

    // Terminal stage: past the horizon both defects must vanish exactly.
    let mut log = StepLog::new(&mut trace.steps, ctx.horizon() + 1, "surjectivity.terminal");
    let a_last = trace.a.last().unwrap().clone();
    let b_last = trace.b.last().unwrap().clone();
    log.vanishes("curvature", &l.curvature(&a_last)?)?;
    log.vanishes("image_defect", &ctx.u.u_star(&a_last)?.sub(&b_last))?;
    Ok(())
}

/// Contract a flat source element whose image bounds: given flat `a` and
/// a flat witness cell connecting zero to the image of `a` in the
/// target, produce a path in the source from `a` to zero.
pub fn pi0_trivialize(
    ctx: &GMContext,
    a: &Element,
    gamma: &OneCell,
) -> Result<(InjectivityTrace, GaugePath)> {
    let start_index = match ctx.variant {
        EngineVariant::Standard => ctx.r,
        EngineVariant::Abelian => 1,
    };
    let mut trace = InjectivityTrace {
        gauge_path: GaugePath { cells: Vec::new() },
        a: Vec::new(),
        xi: Vec::new(),
        gamma: Vec::new(),
        steps: Vec::new(),
        start_index,
    };
    injectivity_run(ctx, a, gamma, &mut trace)
        .map_err(|e| e.with_partial_trace(step_lines(&trace.steps)))?;

    let a_last = trace.a.last().unwrap();
    if !a_last.is_zero() {
        return Err(Error::audit(
            "trivialize.final",
            "descent did not terminate at zero",
        ));
    }
    let zero = Element::zero(&ctx.source().space);
    let path = assemble_path(ctx.source(), &trace.gauge_path, &trace.xi, a, &zero, "trivialize.final")?;
    Ok((trace, path))
}

fn injectivity_run(
    ctx: &GMContext,
    a: &Element,
    gamma: &OneCell,
    trace: &mut InjectivityTrace,
) -> Result<()> {
    let l = ctx.source();
    let lt = ctx.target();
    let r = ctx.r;
    check_same_space(&a.space, &l.space, "contraction input")?;
    check_same_space(&gamma.body.space, &lt.space, "contraction witness")?;
    if !l.is_mc(a)? {
        return Err(Error::input("contraction input must be flat"));
    }
    if !gamma.is_flat(lt)? {
        return Err(Error::input("contraction witness must be flat"));
    }
    let image = ctx.u.u_star(a)?;
    let zero_target = Element::zero(&lt.space);

    // Orient the witness to run from zero to the image, then straighten
    // its generator.
    let oriented = if gamma.start() == zero_target && gamma.end() == image {
        gamma.clone()
    } else if gamma.end() == zero_target && gamma.start() == image {
        gamma.reverse()?
    } else {
        return Err(Error::input(
            "contraction witness must connect zero to the image of the input",
        ));
    };
    let mut g = if oriented.dt_part.is_constant() {
        oriented
    } else {
        rectify(lt, &oriented)?
    };

    let cone = ConeComplex::from_morphism(&ctx.u)?;
    let mut a_cur;

    match ctx.variant {
        EngineVariant::Standard => {
            // Gauge the input into level r, carrying the witness along:
            // each gauge cell is pushed through the morphism and
            // composed with the witness so far.
            let (a_r, gauge_path) = gauge_to_filtration(l, a, r, GaugeMode::Windowed)?;
            for cell in &gauge_path.cells {
                let kappa = concatenate_via_morphism(&ctx.u, cell, &g.reverse()?)?;
                g = rectify(lt, &kappa)?;
            }
            trace.gauge_path = gauge_path;
            a_cur = a_r;

            // Bootstrap: drive the witness generator into level r.  Each
            // round trades the generator by an exact term; the witness
            // body is as deep as the generator, so the bracket
            // corrections gain a level every time.
            let target_complex = FilteredComplex::from_structure(lt);
            let mut log = StepLog::new(&mut trace.steps, r, "injectivity.bootstrap");
            let mut round = 0usize;
            loop {
                let g1 = g.dt_part.eval(&scalar::zero());
                if g1.in_filtration(r) {
                    log.member("generator", &g1, r)?;
                    break;
                }
                round += 1;
                if round as i64 > r + 2 {
                    return Err(Error::audit(
                        "injectivity.bootstrap",
                        "generator depth stopped improving",
                    ));
                }
                let weight_before = g1.weight();
                log.member(
                    &format!("closure_{round}"),
                    &lt.differential(&g1),
                    r,
                )?;
                let y_hat = target_complex.solve_in_quotient(&g1, 1, r)?.ok_or_else(|| {
                    Error::hypothesis(
                        "injectivity.bootstrap",
                        weight_before,
                        -1,
                        format!("H^{{-1}}(F_1/F_{r}) = 0 on {}", lt.space.name),
                    )
                })?;
                log.witness(&format!("primitive_{round}"), &y_hat);
                let adjusted =
                    adjust_dt_by_exact(lt, &g, &PolyElement::from_element(&neg(&y_hat)))?;
                g = rectify(lt, &adjusted)?;
                let weight_after = g.dt_part.eval(&scalar::zero()).weight();
                log.record(
                    &format!("progress_{round}"),
                    weight_after >= r.min(weight_before + 1),
                    format!("generator weight {weight_before} -> {weight_after}"),
                )?;
            }
        }
        EngineVariant::Abelian => {
            // Correction stage: the higher morphism components contribute
            // a finite sum whose class is removed from the witness
            // generator before the level-0 lift.
            let mut u_corr = Element::zero(&lt.space);
            {
                let mut log = StepLog::new(&mut trace.steps, 0, "injectivity.correction");
                let g1 = g.dt_part.eval(&scalar::zero());
                log.member("image_closure", &image.sub(&lt.differential(&g1)), r)?;
                if r > 1 {
                    let bound = ctx.u.finite_sum_bound.ok_or_else(|| {
                        Error::input(
                            "abelian descent over a weight-0 source needs a declared \
                             finite component bound",
                        )
                    })?;
                    let mut level = 1i64;
                    while 2 * level < r {
                        level *= 2;
                    }
                    let target_complex = FilteredComplex::from_structure(lt);
                    for m in 2..=bound {
                        let inputs: Vec<&Element> = std::iter::repeat(a).take(m).collect();
                        let tail = ctx.u.apply_component(&inputs);
                        if tail.is_zero() {
                            continue;
                        }
                        log.member(&format!("tail_{m}"), &tail, r - 1)?;
                        log.member(&format!("tail_closure_{m}"), &lt.differential(&tail), r)?;
                        let u_m = target_complex
                            .solve_in_quotient(&tail, level, r)?
                            .ok_or_else(|| {
                                Error::hypothesis(
                                    "injectivity.correction",
                                    level,
                                    0,
                                    format!(
                                        "H^0(F_{level}/F_{r}) = 0 on {}",
                                        lt.space.name
                                    ),
                                )
                            })?;
                        u_corr = u_corr.add(&u_m.scale(&scalar::inv_factorial(m)));
                    }
                }
                log.witness("correction", &u_corr);
                let corrected = g.dt_part.eval(&scalar::zero()).sub(&u_corr);
                log.member(
                    "corrected_closure",
                    &ctx.u.psi(a).sub(&lt.differential(&corrected)),
                    r,
                )?;
            }

            // Level-0 lift: produce the first descent cell from the
            // corrected witness.
            let mut log = StepLog::new(&mut trace.steps, 0, "injectivity.base");
            let corrected = g.dt_part.eval(&scalar::zero()).sub(&u_corr);
            let (x, _) = cone.solve_lifting(a, &corrected, 0, r)?;
            log.witness("x", &x);
            let xi = solve_ivp(l, a, &PolyElement::from_element(&neg(&x)))?;
            let a_next = xi.end();
            log.member("a", &a_next, 1)?;
            let kappa = concatenate_via_morphism(&ctx.u, &xi, &g.reverse()?)?;
            g = rectify(lt, &kappa)?;
            log.record(
                "witness_start",
                g.start() == zero_target,
                "carried witness starts at zero".to_string(),
            )?;
            log.record(
                "witness_end",
                g.end() == ctx.u.u_star(&a_next)?,
                "carried witness ends at the image".to_string(),
            )?;
            trace.xi.push(xi);
            a_cur = a_next;
        }
    }

    trace.a.push(a_cur.clone());
    trace.gamma.push(g.clone());

    // Induction: each step lifts the pair (element, witness generator)
    // through the cone, flows the element one level deeper, and carries
    // the witness across the step cell.
    for p in trace.start_index..=ctx.horizon() {
        let mut log = StepLog::new(&mut trace.steps, p, "injectivity.step");
        let g1 = g.dt_part.eval(&scalar::zero());
        log.member("a", &a_cur, p)?;
        log.member("generator", &g1, p)?;
        log.member("source_closure", &l.differential(&a_cur), p + r)?;
        log.member(
            "cone_closure",
            &ctx.u.psi(&a_cur).sub(&lt.differential(&g1)),
            p + r,
        )?;
        let (x, y) = cone.solve_lifting(&a_cur, &g1, p, r)?;
        log.witness("x", &x);
        log.witness("y", &y);
        let xi = solve_ivp(l, &a_cur, &PolyElement::from_element(&neg(&x)))?;
        let a_next = xi.end();
        log.member("a_next", &a_next, p + 1)?;
        log.member("step_generator", &xi.dt_part.eval(&scalar::zero()), p + 1 - r)?;
        let kappa = concatenate_via_morphism(&ctx.u, &xi, &g.reverse()?)?;
        let adjusted = adjust_dt_by_exact(lt, &kappa, &PolyElement::from_element(&y))?;
        log.record(
            "adjusted_generator",
            adjusted.dt_part.in_filtration(p + 1),
            format!(
                "weight {} against level {}",
                adjusted.dt_part.weight(),
                p + 1
            ),
        )?;
        let g_next = rectify(lt, &adjusted)?;
        log.member("generator_next", &g_next.dt_part.eval(&scalar::zero()), p + 1)?;
        log.record(
            "witness_start",
            g_next.start() == Element::zero(&lt.space),
            "carried witness starts at zero".to_string(),
        )?;
        log.record(
            "witness_end",
            g_next.end() == ctx.u.u_star(&a_next)?,
            "carried witness ends at the image".to_string(),
        )?;
        trace.xi.push(xi);
        trace.gamma.push(g_next.clone());
        trace.a.push(a_next.clone());
        a_cur = a_next;
        g = g_next;
    }

    let mut log = StepLog::new(&mut trace.steps, ctx.horizon() + 1, "injectivity.terminal");
    log.vanishes("a", trace.a.last().unwrap())?;
    Ok(())
}

/// Separate or connect a pair: given flat `a`, `a2` and a flat witness
/// cell between their images, produce a path in the source from `a` to
/// `a2`.  The pair is reduced to a contraction by twisting everything at
/// `a2`; hypothesis failures of the twisted setup are reported, not
/// masked.
pub fn pi0_separate(
    ctx: &GMContext,
    a: &Element,
    a2: &Element,
    gamma: &OneCell,
) -> Result<GaugePath> {
    let l = ctx.source();
    let lt = ctx.target();
    check_same_space(&a.space, &l.space, "separation input")?;
    check_same_space(&a2.space, &l.space, "separation input")?;
    check_same_space(&gamma.body.space, &lt.space, "separation witness")?;
    if !l.is_mc(a)? || !l.is_mc(a2)? {
        return Err(Error::input("separation inputs must be flat"));
    }
    if !gamma.is_flat(lt)? {
        return Err(Error::input("separation witness must be flat"));
    }
    let image = ctx.u.u_star(a)?;
    let image2 = ctx.u.u_star(a2)?;
    let oriented = if gamma.start() == image && gamma.end() == image2 {
        gamma.clone()
    } else if gamma.start() == image2 && gamma.end() == image {
        gamma.reverse()?
    } else {
        return Err(Error::input(
            "separation witness must connect the two images",
        ));
    };

    // Twist everything at a2.  The witness shifts pointwise by the image
    // of a2: a flat cell between the images becomes a flat cell from the
    // twisted image of a - a2 to zero.
    let u_twisted = ctx.u.twist(a2)?;
    let ctx_twisted = GMContext::new(&u_twisted, ctx.r, ctx.variant)?;
    let a_twisted = a.sub(a2);
    let witness_twisted = OneCell {
        body: oriented.body.sub(&PolyElement::from_element(&image2)),
        dt_part: oriented.dt_part.clone(),
    };
    let (_, path_twisted) = pi0_trivialize(&ctx_twisted, &a_twisted, &witness_twisted)?;

    // Untwist: shift every cell body back by a2.
    let cells: Vec<OneCell> = path_twisted
        .cells
        .iter()
        .map(|c| OneCell {
            body: c.body.add(&PolyElement::from_element(a2)),
            dt_part: c.dt_part.clone(),
        })
        .collect();
    let path = GaugePath { cells };
    path.verify(l)?;
    match (path.start(), path.end()) {
        (Some(start), Some(end)) => {
            if start != *a || end != *a2 {
                return Err(Error::audit(
                    "separate.final",
                    "untwisted path does not connect the pair",
                ));
            }
        }
        _ => {
            if a != a2 {
                return Err(Error::audit(
                    "separate.final",
                    "empty path connecting distinct elements",
                ));
            }
        }
    }
    Ok(path)
}

/// Cohomology dimensions on the two sides after twisting at a flat base
/// point, in the degree matching connecting level `n` (degree `1 - n`).
#[derive(Debug, Clone)]
pub struct HomotopyComparison {
    pub n: i64,
    pub degree: i64,
    pub dim_source: usize,
    pub dim_target: usize,
    /// Whether the two dimensions agree.  Reported, not assumed: equality
    /// is what the transfer predicts, and a mismatch is evidence against
    /// the hypotheses or the implementation, never silently repaired.
    pub equal: bool,
    /// True when the base point was first gauged into level r.
    pub gauged: bool,
}

/// Compare the twisted cohomology dimensions across the morphism at a
/// flat base point.  A base point above level r is first gauged down in
/// the standard lane; the abelian lane twists in place, since twisting
/// an abelian source never changes its differential.
pub fn homotopy_group_dimension(
    ctx: &GMContext,
    tau: &Element,
    n: i64,
) -> Result<HomotopyComparison> {
    if n < 1 {
        return Err(Error::input(format!(
            "connecting level must be >= 1, got {n}"
        )));
    }
    let l = ctx.source();
    check_same_space(&tau.space, &l.space, "twist base point")?;
    if !l.is_mc(tau)? {
        return Err(Error::input("twist base point must be flat"));
    }
    let (tau_used, gauged) = if tau.in_filtration(ctx.r) {
        (tau.clone(), false)
    } else {
        match ctx.variant {
            EngineVariant::Standard => {
                let (t, _) = gauge_to_filtration(l, tau, ctx.r, GaugeMode::Windowed)?;
                (t, true)
            }
            EngineVariant::Abelian => (tau.clone(), false),
        }
    };
    let degree = 1 - n;
    let twisted_source = l.twist(&tau_used)?;
    let twisted_target = ctx.target().twist(&ctx.u.u_star(&tau_used)?)?;
    let source_complex = FilteredComplex::from_structure(&twisted_source);
    let target_complex = FilteredComplex::from_structure(&twisted_target);
    let dim_source = source_complex
        .quotient_cohomology(l.space.w_min, l.space.zero_weight(), degree)
        .dim;
    let dim_target = target_complex
        .quotient_cohomology(
            ctx.target().space.w_min,
            ctx.target().space.zero_weight(),
            degree,
        )
        .dim;
    Ok(HomotopyComparison {
        n,
        degree,
        dim_source,
        dim_target,
        equal: dim_source == dim_target,
        gauged,
    })
}

/// Page-vanishing checks of the mapping cone before and after twisting
/// at a flat base point in level r.
#[derive(Debug, Clone)]
pub struct TwistedPageCheck {
    pub untwisted: PageVanishing,
    pub twisted: PageVanishing,
    /// Whether the two verdicts agree.  Twisted hypotheses can fail even
    /// when the untwisted ones hold; a disagreement is reported as data.
    pub agree: bool,
    /// The twisted verdict itself.
    pub pass: bool,
}

/// Check that the morphism stays a deep quasi-isomorphism after twisting
/// at `tau`, by comparing the cone page-vanishing before and after.
pub fn check_twisted_quasi_iso(ctx: &GMContext, tau: &Element) -> Result<TwistedPageCheck> {
    let l = ctx.source();
    check_same_space(&tau.space, &l.space, "twist base point")?;
    if !l.is_mc(tau)? {
        return Err(Error::input("twist base point must be flat"));
    }
    if !tau.in_filtration(ctx.r) {
        return Err(Error::input(format!(
            "twist base point must lie in filtration level {}; gauge it down first",
            ctx.r
        )));
    }
    let untwisted = ConeComplex::from_morphism(&ctx.u)?
        .complex
        .check_page_vanishing(ctx.r)?;
    let u_twisted = ctx.u.twist(tau)?;
    let twisted = ConeComplex::from_morphism(&u_twisted)?
        .complex
        .check_page_vanishing(ctx.r)?;
    let agree = untwisted.vanishes == twisted.vanishes;
    let pass = twisted.vanishes;
    Ok(TwistedPageCheck {
        untwisted,
        twisted,
        agree,
        pass,
    })
}
