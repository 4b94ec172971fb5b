//! Linear homological layer: filtered cochain complexes, cohomology of
//! filtration quotients, the column spectral sequence, the mapping cone of
//! the linear part of a morphism, and the filtered lifting solver that the
//! deformation engine leans on at every induction step.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{representatives_mod, Matrix};
use crate::morphism::InfinityMorphism;
use crate::scalar::{self, Scalar};
use crate::space::{check_same_space, same_space, BasisVector, Element, FilteredGradedSpace};
use crate::structure::SLInftyStructure;

/// A degree +1 linear differential on a filtered graded space, stored as one
/// column per basis vector.
#[derive(Debug, Clone)]
pub struct FilteredComplex {
    pub space: Arc<FilteredGradedSpace>,
    columns: Vec<Element>,
}

impl FilteredComplex {
    pub fn from_columns(
        space: &Arc<FilteredGradedSpace>,
        columns: Vec<Element>,
    ) -> Result<Self> {
        if columns.len() != space.dim() {
            return Err(Error::input(format!(
                "differential has {} columns for a {}-dimensional space",
                columns.len(),
                space.dim()
            )));
        }
        for col in &columns {
            check_same_space(&col.space, space, "differential column")?;
        }
        Ok(FilteredComplex {
            space: Arc::clone(space),
            columns,
        })
    }

    /// The underlying complex of a structure: just the arity-1 bracket.
    pub fn from_structure(l: &SLInftyStructure) -> Self {
        let columns = (0..l.space.dim())
            .map(|i| l.differential(&Element::basis_element(&l.space, i)))
            .collect();
        FilteredComplex {
            space: Arc::clone(&l.space),
            columns,
        }
    }

    pub fn column(&self, i: usize) -> &Element {
        &self.columns[i]
    }

    pub fn d(&self, v: &Element) -> Element {
        assert!(
            same_space(&v.space, &self.space),
            "differential applied to an element of a different space"
        );
        let mut out = Element::zero(&self.space);
        for (i, c) in &v.coeffs {
            out = out.add(&self.columns[*i].scale(c));
        }
        out
    }

    /// Structural soundness: `d` must square to zero, raise degree by one,
    /// and not decrease weight.  Returns a list of problems, empty when
    /// sound.
    pub fn verify(&self) -> Vec<String> {
        let mut problems = Vec::new();
        for (i, col) in self.columns.iter().enumerate() {
            let v = &self.space.basis[i];
            if !col.has_degree(v.degree + 1) {
                problems.push(format!(
                    "d({}) is not homogeneous of degree {}",
                    v.id,
                    v.degree + 1
                ));
            }
            if col.weight() < v.weight {
                problems.push(format!(
                    "d({}) has weight {} below {}",
                    v.id,
                    col.weight(),
                    v.weight
                ));
            }
            let dd = self.d(col);
            if !dd.is_zero() {
                problems.push(format!("d(d({})) = {} is nonzero", v.id, dd));
            }
        }
        problems
    }

    /// Matrix of `d` from the span of `domain` to the span of `codomain`,
    /// both given as basis index lists; components outside `codomain` are
    /// dropped, which is exactly the quotient-complex projection.
    fn window_matrix(&self, domain: &[usize], codomain: &[usize]) -> Matrix {
        let pos = positions(codomain);
        let cols: Vec<Vec<Scalar>> = domain
            .iter()
            .map(|&i| restrict(&self.columns[i], &pos, codomain.len()))
            .collect();
        Matrix::from_columns(codomain.len(), &cols)
    }

    /// Cohomology of the quotient complex `F_a / F_b` in one degree, with a
    /// deterministic set of representatives (basis-order greedy).
    pub fn quotient_cohomology(&self, a: i64, b: i64, degree: i64) -> QuotientCohomology {
        let lo = self.space.clamp_level(a);
        let hi = self.space.clamp_level(b);
        let dom = self.space.basis_in_window(degree, lo, hi);
        let out = QuotientCohomology {
            lower: a,
            upper: b,
            degree,
            dim: 0,
            representatives: Vec::new(),
        };
        if lo >= hi || dom.is_empty() {
            return out;
        }
        let next = self.space.basis_in_window(degree + 1, lo, hi);
        let prev = self.space.basis_in_window(degree - 1, lo, hi);
        let kernel = self.window_matrix(&dom, &next).kernel_basis();
        let dom_pos = positions(&dom);
        let image: Vec<Vec<Scalar>> = prev
            .iter()
            .map(|&j| restrict(&self.columns[j], &dom_pos, dom.len()))
            .collect();
        let picked = representatives_mod(dom.len(), &kernel, &image);
        let representatives: Vec<Element> = picked
            .iter()
            .map(|&k| element_from_window(&self.space, &dom, &kernel[k]))
            .collect();
        QuotientCohomology {
            dim: representatives.len(),
            representatives,
            ..out
        }
    }

    /// Solve `d x = u` in the quotient complex `F_a / F_b`.  Returns a
    /// preimage supported on weights `[a, b)` or `None` when the class of
    /// `u` is not exact there; the caller turns `None` into its own
    /// hypothesis-violation report.
    pub fn solve_in_quotient(&self, u: &Element, a: i64, b: i64) -> Result<Option<Element>> {
        check_same_space(&u.space, &self.space, "quotient solve")?;
        let g = match u.degree()? {
            None => return Ok(Some(Element::zero(&self.space))),
            Some(g) => g,
        };
        if !u.in_filtration(a) {
            return Err(Error::input(format!(
                "quotient solve needs the right-hand side in level {a}, got weight {}",
                u.weight()
            )));
        }
        let lo = self.space.clamp_level(a);
        let hi = self.space.clamp_level(b);
        let dom = self.space.basis_in_window(g - 1, lo, hi);
        let cod = self.space.basis_in_window(g, lo, hi);
        let cod_pos = positions(&cod);
        let rhs = restrict(u, &cod_pos, cod.len());
        match self.window_matrix(&dom, &cod).solve(&rhs) {
            None => Ok(None),
            Some(x) => Ok(Some(element_from_window(&self.space, &dom, &x))),
        }
    }

    /// One entry of the column spectral sequence: page `n`, column `p`,
    /// one cohomological degree.  Classes are represented by
    /// `Z = {v in F_p : dv in F_{p+n}}` modulo `F_{p+1} + d F_{p-n+1}`.
    pub fn spectral_entry(&self, page: i64, column: i64, degree: i64) -> Result<SpectralEntry> {
        if page < 1 {
            return Err(Error::input(format!("page index must be >= 1, got {page}")));
        }
        let space = &self.space;
        let top = space.zero_weight();
        let p_lo = space.clamp_level(column);
        let z_dom = space.basis_in_window(degree, p_lo, top);

        // Kernel condition: dv has no component of weight below p + n.
        let z_cod = space.basis_in_window(degree + 1, space.w_min, space.clamp_level(column + page));
        let z_vecs = self.window_matrix(&z_dom, &z_cod).kernel_basis();

        // Boundary span inside F_p: the same kernel computed one column
        // deeper, plus differentials of F_{p-n+1} elements that land in F_p.
        let z_dom_pos = positions(&z_dom);
        let sub_dom = space.basis_in_window(degree, space.clamp_level(column + 1), top);
        let sub_vecs = self.window_matrix(&sub_dom, &z_cod).kernel_basis();
        let mut baseline: Vec<Vec<Scalar>> = sub_vecs
            .iter()
            .map(|v| {
                let e = element_from_window(space, &sub_dom, v);
                restrict(&e, &z_dom_pos, z_dom.len())
            })
            .collect();
        let w_dom = space.basis_in_window(degree - 1, space.clamp_level(column - page + 1), top);
        let w_cod = space.basis_in_window(degree, space.w_min, p_lo);
        for w in self.window_matrix(&w_dom, &w_cod).kernel_basis() {
            let dw = self.d(&element_from_window(space, &w_dom, &w));
            baseline.push(restrict(&dw, &z_dom_pos, z_dom.len()));
        }

        let picked = representatives_mod(z_dom.len(), &z_vecs, &baseline);
        let representatives: Vec<Element> = picked
            .iter()
            .map(|&k| element_from_window(space, &z_dom, &z_vecs[k]))
            .collect();
        Ok(SpectralEntry {
            page,
            column,
            degree,
            dim: representatives.len(),
            representatives,
        })
    }

    /// Scan every column and degree of one page.  The witness, when present,
    /// is the first nonvanishing entry in column-then-degree order.
    pub fn check_page_vanishing(&self, page: i64) -> Result<PageVanishing> {
        let mut total_dim = 0;
        let mut witness = None;
        for p in self.space.w_min..=self.space.filtration_length {
            for degree in self.space.degrees_present() {
                let entry = self.spectral_entry(page, p, degree)?;
                total_dim += entry.dim;
                if entry.dim > 0 && witness.is_none() {
                    witness = Some(PageWitness {
                        column: p,
                        degree,
                        class: entry.representatives[0].clone(),
                    });
                }
            }
        }
        Ok(PageVanishing {
            page,
            vanishes: witness.is_none(),
            total_dim,
            witness,
        })
    }
}

#[derive(Debug, Clone)]
pub struct QuotientCohomology {
    pub lower: i64,
    pub upper: i64,
    pub degree: i64,
    pub dim: usize,
    pub representatives: Vec<Element>,
}

#[derive(Debug, Clone)]
pub struct SpectralEntry {
    pub page: i64,
    pub column: i64,
    pub degree: i64,
    pub dim: usize,
    pub representatives: Vec<Element>,
}

#[derive(Debug, Clone)]
pub struct PageWitness {
    pub column: i64,
    pub degree: i64,
    pub class: Element,
}

#[derive(Debug, Clone)]
pub struct PageVanishing {
    pub page: i64,
    pub vanishes: bool,
    pub total_dim: usize,
    pub witness: Option<PageWitness>,
}

fn positions(indices: &[usize]) -> BTreeMap<usize, usize> {
    indices.iter().enumerate().map(|(row, &i)| (i, row)).collect()
}

fn restrict(v: &Element, pos: &BTreeMap<usize, usize>, len: usize) -> Vec<Scalar> {
    let mut out = vec![scalar::zero(); len];
    for (i, c) in &v.coeffs {
        if let Some(&row) = pos.get(i) {
            out[row] = c.clone();
        }
    }
    out
}

fn element_from_window(
    space: &Arc<FilteredGradedSpace>,
    indices: &[usize],
    coords: &[Scalar],
) -> Element {
    let coeffs = indices
        .iter()
        .zip(coords)
        .filter(|(_, c)| !c.is_zero())
        .map(|(&i, c)| (i, c.clone()))
        .collect();
    Element::from_coeffs(space, coeffs)
}

/// Mapping cone of a filtered chain map `psi: L -> Lt`, with the target
/// placed in cone degree one higher: `d(a, b) = (d a, psi a - d b)`.
///
/// Basis ids keep their origin readable: source ids gain a `.s` suffix and
/// target ids a `.t` suffix.
#[derive(Debug, Clone)]
pub struct ConeComplex {
    pub complex: FilteredComplex,
    pub source_space: Arc<FilteredGradedSpace>,
    pub target_space: Arc<FilteredGradedSpace>,
}

impl ConeComplex {
    pub fn from_chain_map(
        source: &FilteredComplex,
        target: &FilteredComplex,
        psi: &[Element],
    ) -> Result<Self> {
        if psi.len() != source.space.dim() {
            return Err(Error::input(format!(
                "chain map has {} columns for a {}-dimensional source",
                psi.len(),
                source.space.dim()
            )));
        }
        for (i, col) in psi.iter().enumerate() {
            check_same_space(&col.space, &target.space, "chain map column")?;
            let v = &source.space.basis[i];
            if col.weight() < v.weight {
                return Err(Error::input(format!(
                    "chain map drops weight on {}: {} below {}",
                    v.id,
                    col.weight(),
                    v.weight
                )));
            }
            let commute = target.d(col).sub(&apply_columns(psi, &source.d(
                &Element::basis_element(&source.space, i),
            )));
            if !commute.is_zero() {
                return Err(Error::input(format!(
                    "linear part fails to commute with the differentials on {}",
                    v.id
                )));
            }
        }

        let mut basis = Vec::with_capacity(source.space.dim() + target.space.dim());
        for v in &source.space.basis {
            basis.push(BasisVector {
                id: format!("{}.s", v.id),
                degree: v.degree,
                weight: v.weight,
            });
        }
        for v in &target.space.basis {
            basis.push(BasisVector {
                id: format!("{}.t", v.id),
                degree: v.degree + 1,
                weight: v.weight,
            });
        }
        let cone_space = FilteredGradedSpace::new(
            format!("cone({} -> {})", source.space.name, target.space.name),
            basis,
            source
                .space
                .filtration_length
                .max(target.space.filtration_length),
            source.space.w_min.min(target.space.w_min),
        )?;

        let src_dim = source.space.dim();
        let mut columns = Vec::with_capacity(cone_space.dim());
        for i in 0..src_dim {
            let da = source.d(&Element::basis_element(&source.space, i));
            let mut coeffs: BTreeMap<usize, Scalar> = da.coeffs.clone();
            for (j, c) in &psi[i].coeffs {
                coeffs.insert(src_dim + j, c.clone());
            }
            columns.push(Element::from_coeffs(&cone_space, coeffs));
        }
        for j in 0..target.space.dim() {
            let db = target.d(&Element::basis_element(&target.space, j));
            let coeffs = db
                .coeffs
                .iter()
                .map(|(k, c)| (src_dim + k, -c.clone()))
                .collect();
            columns.push(Element::from_coeffs(&cone_space, coeffs));
        }

        Ok(ConeComplex {
            complex: FilteredComplex::from_columns(&cone_space, columns)?,
            source_space: Arc::clone(&source.space),
            target_space: Arc::clone(&target.space),
        })
    }

    /// Cone over the linear part of a morphism.
    pub fn from_morphism(u: &InfinityMorphism) -> Result<Self> {
        let source = FilteredComplex::from_structure(&u.source);
        let target = FilteredComplex::from_structure(&u.target);
        let psi: Vec<Element> = (0..u.source.space.dim())
            .map(|i| u.psi(&Element::basis_element(&u.source.space, i)))
            .collect();
        Self::from_chain_map(&source, &target, &psi)
    }

    pub fn source_dim(&self) -> usize {
        self.source_space.dim()
    }

    /// Cone element with source part `a` and target part `b`.
    pub fn inject(&self, a: &Element, b: &Element) -> Element {
        assert!(same_space(&a.space, &self.source_space), "cone source part");
        assert!(same_space(&b.space, &self.target_space), "cone target part");
        let src_dim = self.source_dim();
        let mut coeffs: BTreeMap<usize, Scalar> = a.coeffs.clone();
        for (j, c) in &b.coeffs {
            coeffs.insert(src_dim + j, c.clone());
        }
        Element::from_coeffs(&self.complex.space, coeffs)
    }

    pub fn split(&self, v: &Element) -> (Element, Element) {
        assert!(same_space(&v.space, &self.complex.space), "cone split");
        let src_dim = self.source_dim();
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        for (i, c) in &v.coeffs {
            if *i < src_dim {
                a.insert(*i, c.clone());
            } else {
                b.insert(*i - src_dim, c.clone());
            }
        }
        (
            Element::from_coeffs(&self.source_space, a),
            Element::from_coeffs(&self.target_space, b),
        )
    }

    /// Trim a cone class below level `p + 1` by a primitive from `r` levels
    /// up: given `(a, b)` in level `p` whose cone differential lies in level
    /// `p + r`, find `x` in the source and `y` in the target, both of weight
    /// at least `p - r + 1`, with
    ///
    ///   `a - d x`  and  `b - psi x + d y`  both in level `p + 1`.
    ///
    /// Solvability is exactly the vanishing of the relevant page-`r` cone
    /// entry; an unsolvable system comes back as a hypothesis violation
    /// carrying the site, and every returned solution is re-audited.
    pub fn solve_lifting(
        &self,
        a: &Element,
        b: &Element,
        p: i64,
        r: i64,
    ) -> Result<(Element, Element)> {
        if r < 1 {
            return Err(Error::input(format!("lifting gap must be >= 1, got {r}")));
        }
        check_same_space(&a.space, &self.source_space, "lifting source part")?;
        check_same_space(&b.space, &self.target_space, "lifting target part")?;
        let u = self.inject(a, b);
        let g = match u.degree()? {
            None => {
                return Ok((
                    Element::zero(&self.source_space),
                    Element::zero(&self.target_space),
                ))
            }
            Some(g) => g,
        };
        if !a.in_filtration(p) || !b.in_filtration(p) {
            return Err(Error::input(format!(
                "lifting input must lie in level {p}; weights are {} and {}",
                a.weight(),
                b.weight()
            )));
        }
        let du = self.complex.d(&u);
        if !du.in_filtration(p + r) {
            return Err(Error::input(format!(
                "lifting input must have its cone differential in level {}, got weight {}",
                p + r,
                du.weight()
            )));
        }

        let space = &self.complex.space;
        let lo = space.clamp_level(p - r + 1);
        let unknowns = space.basis_in_window(g - 1, lo, space.zero_weight());
        let rows = space.basis_in_window(g, space.w_min, space.clamp_level(p + 1));
        let rhs = restrict(&u, &positions(&rows), rows.len());
        let solution = self
            .complex
            .window_matrix(&unknowns, &rows)
            .solve(&rhs)
            .ok_or_else(|| {
                Error::hypothesis(
                    "lifting",
                    p,
                    g,
                    format!(
                        "no weight-{lo} primitive trims the cone class below level {}; \
                         a vanishing page-{r} cone entry in degree {g} at column {p} \
                         would provide one",
                        p + 1
                    ),
                )
            })?;
        let w = element_from_window(space, &unknowns, &solution);

        if !w.in_filtration(p - r + 1) {
            return Err(Error::audit(
                "lifting",
                format!("primitive weight {} above the allowed window", w.weight()),
            ));
        }
        let rem = u.sub(&self.complex.d(&w));
        if !rem.in_filtration(p + 1) {
            return Err(Error::audit(
                "lifting",
                format!("residual class has weight {}, expected > {p}", rem.weight()),
            ));
        }
        Ok(self.split(&w))
    }
}

fn apply_columns(columns: &[Element], v: &Element) -> Element {
    let mut out = Element::zero(&columns[0].space);
    for (i, c) in &v.coeffs {
        out = out.add(&columns[*i].scale(c));
    }
    out
}

/// Which hypothesis package to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisVariant {
    /// Full package for the bijection on flat classes: vanishing ladders on
    /// both sides plus cone page vanishing.
    Standard,
    /// Reduced package used when only the comparison of higher homotopy
    /// groups is wanted: source ladder plus cone page vanishing.
    Comparison,
    /// Package for an abelian source with a shifted morphism and a declared
    /// finite component bound; the ladder moves to the target side.
    Abelian,
}

impl HypothesisVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            HypothesisVariant::Standard => "standard",
            HypothesisVariant::Comparison => "comparison",
            HypothesisVariant::Abelian => "abelian",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(HypothesisVariant::Standard),
            "comparison" => Ok(HypothesisVariant::Comparison),
            "abelian" => Ok(HypothesisVariant::Abelian),
            other => Err(Error::input(format!(
                "unknown hypothesis variant {other:?}; expected standard, comparison or abelian"
            ))),
        }
    }
}

/// One checked condition: a stable id, what was checked, and what was found.
#[derive(Debug, Clone)]
pub struct HypothesisCondition {
    pub id: String,
    pub description: String,
    /// Informational conditions (the alternate target-side packages) do not
    /// count toward the overall verdict.
    pub required: bool,
    pub pass: bool,
    pub dim_found: Option<usize>,
    pub witness: Option<String>,
}

/// Verdicts for the three interchangeable target-side packages; `main` is
/// the one that gates the engine, the other two are evaluated for
/// comparison since it is not settled whether they always agree.
#[derive(Debug, Clone)]
pub struct AlternateSets {
    pub main: bool,
    pub windowed: bool,
    pub mixed: bool,
    pub disagree: bool,
}

#[derive(Debug, Clone)]
pub struct HypothesesReport {
    pub variant: HypothesisVariant,
    pub r: i64,
    pub conditions: Vec<HypothesisCondition>,
    pub alternates: Option<AlternateSets>,
    pub satisfied: bool,
}

impl HypothesesReport {
    fn push(
        &mut self,
        id: impl Into<String>,
        description: impl Into<String>,
        required: bool,
        pass: bool,
        dim_found: Option<usize>,
        witness: Option<String>,
    ) {
        self.conditions.push(HypothesisCondition {
            id: id.into(),
            description: description.into(),
            required,
            pass,
            dim_found,
            witness,
        });
    }

    pub fn condition(&self, id: &str) -> Option<&HypothesisCondition> {
        self.conditions.iter().find(|c| c.id == id)
    }
}

/// Mode-A ladder windows: `[2^u, min(2^{u+1}, r))` for `2^u < r`.
fn ladder_windows(r: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    let mut a = 1;
    while a < r {
        out.push((a, (2 * a).min(r)));
        a *= 2;
    }
    out
}

/// Upper ends for the anchored ladder on the target: powers of two below
/// `r`, then `r` itself.
fn anchored_levels(r: i64) -> Vec<i64> {
    let mut out: Vec<i64> = Vec::new();
    let mut q = 2;
    while q < r {
        out.push(q);
        q *= 2;
    }
    out.push(r);
    out
}

fn quotient_condition(
    report: &mut HypothesesReport,
    complex: &FilteredComplex,
    side: &str,
    id_prefix: &str,
    degree: i64,
    a: i64,
    b: i64,
    required: bool,
) -> bool {
    let qc = complex.quotient_cohomology(a, b, degree);
    let pass = qc.dim == 0;
    let witness = qc.representatives.first().map(|e| format!("{e}"));
    report.push(
        format!("{id_prefix}H{degree}.{side}.F{a}-F{b}"),
        format!("H^{degree}(F_{a} {side} / F_{b} {side}) vanishes"),
        required,
        pass,
        Some(qc.dim),
        witness,
    );
    pass
}

/// Check the solvability hypotheses for one morphism at gap `r`.
///
/// Structural soundness of both structures and of the morphism is checked
/// first; the cohomological conditions are the variant's vanishing ladders
/// plus vanishing of page `r` of the cone spectral sequence.  Every
/// condition lands in the report with a stable id, the dimension found, and
/// a witness class when it failed; `satisfied` aggregates the required ones.
pub fn verify_gm_hypotheses(
    u: &InfinityMorphism,
    r: i64,
    variant: HypothesisVariant,
) -> Result<HypothesesReport> {
    if r < 1 {
        return Err(Error::input(format!("hypothesis gap must be >= 1, got {r}")));
    }
    let l = &u.source;
    let lt = &u.target;
    let mut report = HypothesesReport {
        variant,
        r,
        conditions: Vec::new(),
        alternates: None,
        satisfied: false,
    };

    let l_rel = l.verify_linfty_relations(None);
    report.push(
        "struct.L.relations",
        "source brackets satisfy the homotopy Jacobi relations",
        true,
        l_rel.is_empty(),
        None,
        l_rel.first().map(|v| {
            format!("arity {} at ({}): {}", v.arity, v.inputs.join(", "), v.defect)
        }),
    );
    let l_filt = l.verify_filtration_compatibility();
    report.push(
        "struct.L.filtration",
        "source brackets do not decrease weight",
        true,
        l_filt.is_empty(),
        None,
        l_filt.first().map(|v| {
            format!("({}) -> {}: weight {} below {}",
                v.inputs.join(", "), v.output, v.output_weight, v.input_weight_sum)
        }),
    );
    let lt_rel = lt.verify_linfty_relations(None);
    report.push(
        "struct.Lt.relations",
        "target brackets satisfy the homotopy Jacobi relations",
        true,
        lt_rel.is_empty(),
        None,
        lt_rel.first().map(|v| {
            format!("arity {} at ({}): {}", v.arity, v.inputs.join(", "), v.defect)
        }),
    );
    let lt_filt = lt.verify_filtration_compatibility();
    report.push(
        "struct.Lt.filtration",
        "target brackets do not decrease weight",
        true,
        lt_filt.is_empty(),
        None,
        lt_filt.first().map(|v| {
            format!("({}) -> {}: weight {} below {}",
                v.inputs.join(", "), v.output, v.output_weight, v.input_weight_sum)
        }),
    );
    let u_rel = u.verify_morphism_relations(None);
    report.push(
        "struct.U.relations",
        "morphism components intertwine the brackets",
        true,
        u_rel.is_empty(),
        None,
        u_rel.first().map(|v| {
            format!("arity {} at ({}): {}", v.arity, v.inputs.join(", "), v.defect)
        }),
    );
    let u_filt = u.verify_filtration_compatibility();
    report.push(
        "struct.U.filtration",
        "morphism components raise weight by at least the declared shift",
        true,
        u_filt.is_empty(),
        None,
        u_filt.first().map(|v| {
            format!("({}) -> {}: weight {} below {}",
                v.inputs.join(", "), v.output, v.output_weight, v.required_weight)
        }),
    );

    let expected_shift = match variant {
        HypothesisVariant::Abelian => r - 1,
        _ => 0,
    };
    report.push(
        "struct.U.shift",
        format!("morphism shift is {expected_shift}"),
        true,
        u.shift == expected_shift,
        None,
        (u.shift != expected_shift).then(|| format!("shift is {}", u.shift)),
    );
    report.push(
        "struct.Lt.wmin",
        "target filtration starts at level 1",
        true,
        lt.space.w_min == 1,
        None,
        (lt.space.w_min != 1).then(|| format!("starts at {}", lt.space.w_min)),
    );
    match variant {
        HypothesisVariant::Abelian => {
            report.push(
                "struct.L.abelian",
                "source structure is abelian",
                true,
                l.abelian,
                None,
                (!l.abelian).then(|| "source has higher brackets".to_string()),
            );
            report.push(
                "struct.U.finite-sum",
                "morphism declares a finite component bound",
                true,
                u.finite_sum_bound.is_some(),
                None,
                None,
            );
        }
        _ => {
            report.push(
                "struct.L.wmin",
                "source filtration starts at level 1",
                true,
                l.space.w_min == 1,
                None,
                (l.space.w_min != 1).then(|| format!("starts at {}", l.space.w_min)),
            );
        }
    }

    // Vanishing ladders.  The doubling windows keep the number of linear
    // solves logarithmic in r.
    let lc = FilteredComplex::from_structure(l);
    let ltc = FilteredComplex::from_structure(lt);
    match variant {
        HypothesisVariant::Standard | HypothesisVariant::Comparison => {
            for (a, b) in ladder_windows(r) {
                quotient_condition(&mut report, &lc, "L", "", 0, a, b, true);
            }
        }
        HypothesisVariant::Abelian => {
            for (a, b) in ladder_windows(r) {
                quotient_condition(&mut report, &ltc, "Lt", "", 0, a, b, true);
            }
        }
    }
    if variant == HypothesisVariant::Standard {
        let mut main = true;
        for q in anchored_levels(r) {
            main &= quotient_condition(&mut report, &ltc, "Lt", "", 0, 1, q, true);
            main &= quotient_condition(&mut report, &ltc, "Lt", "", -1, 1, q, true);
        }
        // The two alternate target-side packages, evaluated for comparison
        // only: per-window vanishing in both degrees, and per-window
        // vanishing in degree 0 with a single anchored degree -1 condition.
        let mut windowed = true;
        let mut windowed_h0 = true;
        for (a, b) in ladder_windows(r) {
            let h0 = quotient_condition(&mut report, &ltc, "Lt", "alt.", 0, a, b, false);
            windowed_h0 &= h0;
            windowed &= h0;
            windowed &= quotient_condition(&mut report, &ltc, "Lt", "alt.", -1, a, b, false);
        }
        let anchored_hm1 = ltc.quotient_cohomology(1, r, -1).dim == 0;
        let mixed = windowed_h0 && anchored_hm1;
        report.alternates = Some(AlternateSets {
            main,
            windowed,
            mixed,
            disagree: main != windowed || main != mixed,
        });
    }

    // Page-r vanishing of the cone spectral sequence.
    match ConeComplex::from_morphism(u) {
        Err(e) => {
            report.push(
                format!("page{r}.cone"),
                format!("page {r} of the cone spectral sequence vanishes"),
                true,
                false,
                None,
                Some(format!("cone not built: {e}")),
            );
        }
        Ok(cone) => {
            let pv = cone.complex.check_page_vanishing(r)?;
            report.push(
                format!("page{r}.cone"),
                format!("page {r} of the cone spectral sequence vanishes"),
                true,
                pv.vanishes,
                Some(pv.total_dim),
                pv.witness.map(|w| {
                    format!("column {}, degree {}: {}", w.column, w.degree, w.class)
                }),
            );
        }
    }

    report.satisfied = report.conditions.iter().all(|c| !c.required || c.pass);
    Ok(report)
}
