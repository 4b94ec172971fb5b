//! Flat polynomial families over the interval and the triangle: the cells
//! of the filtered deformation groupoid.  A one-cell is a path of flat
//! elements together with the gauge generator that transports it; a
//! two-cell fills a horn of one-cells.  Every routine that claims to
//! return a flat cell re-checks flatness in exact arithmetic and fails
//! loudly rather than returning a wrong answer.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forms::{
    check_profile, curvature_form1, curvature_form2, d_form2, h_triangle,
    higher_bracket_sum_form2, restrict_to_edge, twisted_differential_poly, Edge, Form1, Form2,
    Poly2Element,
};
use crate::morphism::InfinityMorphism;
use crate::poly::{Poly, Poly2};
use crate::scalar::{self, Scalar};
use crate::space::{same_space, Element, FilteredGradedSpace, PolyElement};
use crate::structure::SLInftyStructure;

/// Path of flat elements `body(t)` transported by the generator
/// `dt_part(t)`: the defining equation is `d/dt body = d^{body}(dt_part)`,
/// so the literal dt coefficient of the underlying interval form is
/// `-dt_part`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneCell {
    pub body: PolyElement,
    pub dt_part: PolyElement,
}

impl OneCell {
    pub fn constant(m: &Element) -> OneCell {
        OneCell {
            body: PolyElement::from_element(m),
            dt_part: PolyElement::zero(&m.space),
        }
    }

    pub fn space(&self) -> &Arc<FilteredGradedSpace> {
        &self.body.space
    }

    pub fn from_form(f: &Form1) -> OneCell {
        OneCell {
            body: f.body.clone(),
            dt_part: f.dt.scale(&-scalar::one()),
        }
    }

    pub fn to_form(&self) -> Form1 {
        Form1::from_parts(self.body.clone(), self.dt_part.scale(&-scalar::one()))
    }

    pub fn start(&self) -> Element {
        self.body.eval(&scalar::zero())
    }

    pub fn end(&self) -> Element {
        self.body.eval(&scalar::one())
    }

    /// Run the path backwards: `t -> 1 - t` on the body, with the
    /// generator negated and reparametrized the same way.
    pub fn reverse(&self) -> Result<OneCell> {
        let one = scalar::one();
        let minus = -scalar::one();
        Ok(OneCell {
            body: self.body.compose_affine(&one, &minus)?,
            dt_part: self
                .dt_part
                .compose_affine(&one, &minus)?
                .scale(&-scalar::one()),
        })
    }

    pub fn weight(&self) -> i64 {
        self.body.weight().min(self.dt_part.weight())
    }

    /// Exact flatness: the body is pointwise flat and the generator
    /// transports it.
    pub fn is_flat(&self, l: &SLInftyStructure) -> Result<bool> {
        Ok(curvature_form1(l, &self.to_form())?.is_zero())
    }
}

/// Solve the transport equation `d/dt body = d^{body}(dt_part)` with
/// `body(0) = m0`, returning the cell and the number of corrections the
/// iteration needed.  The filtration truncates the iteration; running past
/// the filtration depth is an audit failure.
pub fn solve_ivp_counted(
    l: &SLInftyStructure,
    m0: &Element,
    dt_part: &PolyElement,
) -> Result<(OneCell, usize)> {
    assert!(same_space(&m0.space, &l.space), "initial value from a different space");
    assert!(same_space(&dt_part.space, &l.space), "generator from a different space");
    check_profile(dt_part, -1, "transport generator")?;
    if !m0.has_degree(0) {
        return Err(Error::input(format!(
            "initial value must be homogeneous of degree 0, got {m0}"
        )));
    }
    if !l.is_mc(m0)? {
        return Err(Error::input(format!(
            "initial value must be flat, curvature is {}",
            l.curvature(m0)?
        )));
    }
    if !l.abelian && !dt_part.is_zero() && dt_part.weight() < 1 {
        return Err(Error::input(
            "transport along a weight-0 generator does not truncate",
        ));
    }

    let base = PolyElement::from_element(m0);
    let mut body = base.clone();
    let mut corrections = 0usize;
    let guard = (l.space.filtration_length + 2).max(2) as usize;
    for _ in 0..=guard {
        let next = base.add(&twisted_differential_poly(l, &body, dt_part)?.integrate()?);
        if next == body {
            let cell = OneCell {
                body,
                dt_part: dt_part.clone(),
            };
            if !cell.is_flat(l)? {
                return Err(Error::audit("transport solve", "solution is not flat"));
            }
            return Ok((cell, corrections));
        }
        body = next;
        corrections += 1;
    }
    Err(Error::audit(
        "transport solve",
        "iteration failed to stabilize within the filtration depth",
    ))
}

pub fn solve_ivp(l: &SLInftyStructure, m0: &Element, dt_part: &PolyElement) -> Result<OneCell> {
    Ok(solve_ivp_counted(l, m0, dt_part)?.0)
}

/// Shift the generator by the exact term `d^{body}(y)`.  The body and the
/// endpoints are untouched, and flatness survives because the twisted
/// differential squares to zero along a flat body.
pub fn adjust_dt_by_exact(
    l: &SLInftyStructure,
    cell: &OneCell,
    y: &PolyElement,
) -> Result<OneCell> {
    assert!(same_space(&y.space, &l.space), "adjustment from a different space");
    check_profile(y, -2, "generator adjustment")?;
    if !cell.is_flat(l)? {
        return Err(Error::input("cell to adjust must be flat"));
    }
    let out = OneCell {
        body: cell.body.clone(),
        dt_part: cell
            .dt_part
            .add(&twisted_differential_poly(l, &cell.body, y)?),
    };
    if !out.is_flat(l)? {
        return Err(Error::audit(
            "generator adjustment",
            "adjusted cell is not flat",
        ));
    }
    Ok(out)
}

/// Morphism sum applied pointwise to a degree-0 polynomial family.
pub fn u_star_poly(u: &InfinityMorphism, alpha: &PolyElement) -> Result<PolyElement> {
    check_profile(alpha, 0, "morphism sum input")?;
    if !alpha.is_zero() && alpha.weight() < 1 && u.finite_sum_bound.is_none() {
        return Err(Error::input(
            "morphism sum over a weight-0 family does not truncate; \
             declare a finite component bound",
        ));
    }
    let mut total = PolyElement::zero(&u.target.space);
    for m in 1..=u.max_component_arity() {
        let inputs: Vec<&PolyElement> = std::iter::repeat(alpha).take(m).collect();
        let term = u.apply_component_poly(&inputs)?;
        total = total.add(&term.scale(&scalar::inv_factorial(m)));
    }
    Ok(total)
}

/// Push a flat cell through a morphism: the body maps through the full
/// morphism sum pointwise and the generator through its tangent sum
/// `sum_m 1/(m-1)! U_m(body^{m-1}, dt_part)`.
pub fn push_cell(u: &InfinityMorphism, cell: &OneCell) -> Result<OneCell> {
    if !cell.is_flat(&u.source)? {
        return Err(Error::input("cell to push through a morphism must be flat"));
    }
    let body = u_star_poly(u, &cell.body)?;
    let mut dt_part = u.psi_poly(&cell.dt_part)?;
    for m in 2..=u.max_component_arity() {
        let mut inputs: Vec<&PolyElement> =
            std::iter::repeat(&cell.body).take(m - 1).collect();
        inputs.push(&cell.dt_part);
        dt_part = dt_part.add(
            &u.apply_component_poly(&inputs)?
                .scale(&scalar::inv_factorial(m - 1)),
        );
    }
    let out = OneCell { body, dt_part };
    if !out.is_flat(&u.target)? {
        return Err(Error::audit(
            "cell transport",
            "pushed cell is not flat in the target",
        ));
    }
    Ok(out)
}

/// Flat polynomial family over the triangle, stored by its literal
/// coefficients.  Fillers produced here never carry a top-form component;
/// flatness audits nonetheless check the full form including that slot.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoCell {
    pub body: Poly2Element,
    pub dt1: Poly2Element,
    pub dt2: Poly2Element,
}

impl TwoCell {
    pub fn space(&self) -> &Arc<FilteredGradedSpace> {
        &self.body.space
    }

    pub fn as_form(&self) -> Form2 {
        Form2 {
            body: self.body.clone(),
            dt1: self.dt1.clone(),
            dt2: self.dt2.clone(),
            dt12: Poly2Element::zero(self.space()),
        }
    }

    /// Restrict to a directed edge of the triangle.
    pub fn edge(&self, edge: Edge) -> Result<OneCell> {
        Ok(OneCell::from_form(&restrict_to_edge(&self.as_form(), edge)?))
    }

    pub fn vertex(&self, v: u8) -> Element {
        let (t1, t2) = match v {
            0 => (scalar::zero(), scalar::zero()),
            1 => (scalar::one(), scalar::zero()),
            2 => (scalar::zero(), scalar::one()),
            _ => panic!("triangle vertices are 0, 1, 2"),
        };
        self.body.eval(&t1, &t2)
    }

    pub fn is_flat(&self, l: &SLInftyStructure) -> Result<bool> {
        Ok(curvature_form2(l, &self.as_form())?.is_zero())
    }
}

/// Substitute `t := c0 + c1*t1 + c2*t2` into every coefficient of a
/// univariate family.
fn spread_over_triangle(
    v: &PolyElement,
    c0: &Scalar,
    c1: &Scalar,
    c2: &Scalar,
) -> Result<Poly2Element> {
    let mut coeffs = BTreeMap::new();
    for (i, p) in &v.coeffs {
        let q = p.subst_affine2(c0, c1, c2)?;
        if !q.is_zero() {
            coeffs.insert(*i, q);
        }
    }
    Ok(Poly2Element::from_coeffs(&v.space, coeffs))
}

/// Fixed point of `eta = eta0 - h(tail(eta))`, where
/// `eta0 = vertex + D(gauge)` and the tail is the nonlinear part of the
/// curvature.  The contraction's side conditions keep the corrections off
/// the two edges at vertex 1, so the fixed point fills the horn spanned by
/// the gauge.
fn fill_from_gauge(
    l: &SLInftyStructure,
    vertex: &Element,
    gauge: &Poly2Element,
) -> Result<Form2> {
    let base = {
        let zero = Poly2Element::zero(&l.space);
        let carrier = Form2 {
            body: gauge.clone(),
            dt1: zero.clone(),
            dt2: zero.clone(),
            dt12: zero,
        };
        let dg = d_form2(l, &carrier)?;
        Form2 {
            body: Poly2Element::from_element(vertex).add(&dg.body),
            ..dg
        }
    };
    let mut eta = base.clone();
    let guard = (l.space.filtration_length + 3).max(3) as usize;
    for _ in 0..=guard {
        let tail = higher_bracket_sum_form2(l, &eta)?;
        let next = base.sub(&h_triangle(&tail)?);
        if next == eta {
            return Ok(eta);
        }
        eta = next;
    }
    Err(Error::audit(
        "horn filler",
        "fixed point failed to stabilize within the filtration depth",
    ))
}

fn horn_gauge(beta: &OneCell, chi: &OneCell) -> Result<Poly2Element> {
    let one = scalar::one();
    let zero = scalar::zero();
    // beta's accumulated generator runs along t0 = 1 - t1 - t2, chi's
    // along t2.
    let along_beta = spread_over_triangle(
        &beta.dt_part.integrate()?,
        &one,
        &-one.clone(),
        &-one.clone(),
    )?;
    let along_chi = spread_over_triangle(&chi.dt_part.integrate()?, &zero, &zero, &one)?;
    Ok(along_beta.add(&along_chi))
}

/// Fill the horn spanned by two flat cells sharing their start point:
/// `beta` sits on the edge from vertex 1 to vertex 0, `chi` on the edge
/// from vertex 1 to vertex 2.  No audits; `horn_fill` is the checked
/// entry point.
pub fn horn_fill_raw(
    l: &SLInftyStructure,
    beta: &OneCell,
    chi: &OneCell,
) -> Result<TwoCell> {
    assert!(same_space(beta.space(), &l.space), "first cell from a different space");
    assert!(same_space(chi.space(), &l.space), "second cell from a different space");
    let vertex = beta.start();
    if vertex != chi.start() {
        return Err(Error::input(format!(
            "cells to fill a horn must share their start point, got {} and {}",
            vertex,
            chi.start()
        )));
    }
    let eta = fill_from_gauge(l, &vertex, &horn_gauge(beta, chi)?)?;
    if !eta.dt12.is_zero() {
        return Err(Error::audit(
            "horn filler",
            "filler acquired a top-form component",
        ));
    }
    Ok(TwoCell {
        body: eta.body,
        dt1: eta.dt1,
        dt2: eta.dt2,
    })
}

/// Fill the horn and audit everything the filler promises: exact flatness
/// of the whole form and coefficient-exact restriction to both input
/// edges.
pub fn horn_fill(l: &SLInftyStructure, beta: &OneCell, chi: &OneCell) -> Result<TwoCell> {
    if !beta.is_flat(l)? || !chi.is_flat(l)? {
        return Err(Error::input("cells to fill a horn must be flat"));
    }
    let filled = horn_fill_raw(l, beta, chi)?;
    if !filled.is_flat(l)? {
        return Err(Error::audit("horn filler", "filler is not flat"));
    }
    if &filled.edge(Edge::OneToZero)? != beta {
        return Err(Error::audit(
            "horn filler",
            "filler does not restrict to the first input edge",
        ));
    }
    if &filled.edge(Edge::OneToTwo)? != chi {
        return Err(Error::audit(
            "horn filler",
            "filler does not restrict to the second input edge",
        ));
    }
    Ok(filled)
}

/// Transport a source cell through a morphism and close the triangle
/// against a given target cell with the same start point.  The result runs
/// from the target cell's far endpoint to the image of the source cell's
/// far endpoint, and agrees with `reverse(beta) + pushed generator` one
/// filtration level past the inputs.
pub fn concatenate_via_morphism(
    u: &InfinityMorphism,
    xi: &OneCell,
    beta: &OneCell,
) -> Result<OneCell> {
    let chi = push_cell(u, xi)?;
    if beta.start() != chi.start() {
        return Err(Error::input(format!(
            "target cell must start at the image of the source cell's start, \
             got {} and {}",
            beta.start(),
            chi.start()
        )));
    }
    let filled = horn_fill(&u.target, beta, &chi)?;
    let kappa = filled.edge(Edge::ZeroToTwo)?;

    let expected = beta.reverse()?.dt_part.add(&chi.dt_part);
    let p = beta.dt_part.weight().min(chi.dt_part.weight());
    let diff = kappa.dt_part.sub(&expected);
    let space = &u.target.space;
    if diff.weight() < space.clamp_level(p + 1) {
        return Err(Error::audit(
            "cell concatenation",
            format!(
                "generator deviates from its leading term at weight {}, \
                 expected at least {}",
                diff.weight(),
                space.clamp_level(p + 1)
            ),
        ));
    }
    Ok(kappa)
}

/// Solve `(1-2t) h + t(1-t) h' = e` componentwise for mean-zero `e`.  On
/// coefficients the operator is triangular with nonzero diagonal, so the
/// solve walks up from the constant term; the top coefficient closes
/// automatically exactly because `e` has mean zero.
fn mean_zero_transport_solve(e: &PolyElement) -> PolyElement {
    let mut coeffs = BTreeMap::new();
    for (i, p) in &e.coeffs {
        let top = match p.degree() {
            None => continue,
            Some(d) => d,
        };
        debug_assert!(top >= 1, "a nonzero mean-zero polynomial has degree at least 1");
        let mut h = vec![scalar::zero(); top];
        let mut prev = scalar::zero();
        for (m, slot) in h.iter_mut().enumerate() {
            let em = p.coeffs.get(m).cloned().unwrap_or_else(scalar::zero);
            *slot = em / scalar::from_i64(m as i64 + 1) + &prev;
            prev = slot.clone();
        }
        debug_assert_eq!(
            p.coeffs[top],
            -scalar::from_i64(top as i64 + 1) * &prev,
            "top coefficient must close the triangular system"
        );
        coeffs.insert(*i, Poly::from_coeffs(h));
    }
    PolyElement::from_coeffs(&e.space, coeffs)
}

/// Replace a flat cell by one with the same endpoints whose generator is
/// constant in t.
///
/// The constant starts as the mean of the given generator.  Each round
/// fills the triangle whose edges at vertex 1 are the given cell and the
/// constant-generator candidate, reads off the generator left on the third
/// edge, and cancels it by shifting the constant and by an interior gauge
/// term supported away from the two input edges; the leftover deepens in
/// the filtration every round, so the loop closes within the filtration
/// depth.
pub fn rectify(l: &SLInftyStructure, gamma: &OneCell) -> Result<OneCell> {
    if !gamma.is_flat(l)? {
        return Err(Error::input("cell to straighten must be flat"));
    }
    if gamma.dt_part.is_constant() {
        return Ok(gamma.clone());
    }
    let a = gamma.start();
    let mut c = gamma.dt_part.integral_01();

    if l.abelian {
        let cell = solve_ivp(l, &a, &PolyElement::from_element(&c))?;
        if cell.end() != gamma.end() {
            return Err(Error::audit(
                "straightening",
                "straightened cell misses the far endpoint",
            ));
        }
        return Ok(cell);
    }

    let one = scalar::one();
    let zero = scalar::zero();
    let along_gamma = spread_over_triangle(
        &gamma.dt_part.integrate()?,
        &one,
        &-one.clone(),
        &-one.clone(),
    )?;
    let t2 = Poly2::monomial(0, 1, one.clone());
    // (1 - t1 - t2) t2 vanishes on both edges at vertex 1, so interior
    // corrections shaped this way never disturb the inputs.
    let interior_window = Poly2::monomial(0, 1, one.clone())
        .sub(&Poly2::monomial(1, 1, one.clone()))
        .sub(&Poly2::monomial(0, 2, one.clone()));
    let mut interior = Poly2Element::zero(&l.space);

    let guard = (l.space.filtration_length + 2).max(2) as usize;
    for _ in 0..=guard {
        let gauge = along_gamma
            .add(&Poly2Element::from_element(&c).mul_poly(&t2)?)
            .add(&interior.mul_poly(&interior_window)?);
        let eta = fill_from_gauge(l, &a, &gauge)?;
        // Literal generator left on the edge from vertex 0 to vertex 2.
        let leftover = eta.dt2.restrict_affine(&zero, &zero, &zero, &one)?;
        if leftover.is_zero() {
            if !eta.dt12.is_zero() || !curvature_form2(l, &eta)?.is_zero() {
                return Err(Error::audit("straightening", "filler is not flat"));
            }
            let mu = OneCell::from_form(&restrict_to_edge(&eta, Edge::OneToTwo)?);
            if mu.dt_part != PolyElement::from_element(&c) {
                return Err(Error::audit(
                    "straightening",
                    "straightened generator is not the expected constant",
                ));
            }
            if mu.start() != a || mu.end() != gamma.end() {
                return Err(Error::audit(
                    "straightening",
                    "straightened cell misses an endpoint",
                ));
            }
            if c.weight() < gamma.dt_part.weight() {
                return Err(Error::audit(
                    "straightening",
                    "straightened generator is shallower than the input",
                ));
            }
            return Ok(mu);
        }
        let dc = leftover.integral_01();
        let mean_zero = leftover.sub(&PolyElement::from_element(&dc));
        c = c.add(&dc);
        interior = interior.add(&spread_over_triangle(
            &mean_zero_transport_solve(&mean_zero),
            &zero,
            &zero,
            &scalar::one(),
        )?);
    }
    Err(Error::audit(
        "straightening",
        "leftover generator failed to vanish within the filtration depth",
    ))
}

/// A composable chain of one-cells.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugePath {
    pub cells: Vec<OneCell>,
}

impl GaugePath {
    pub fn start(&self) -> Option<Element> {
        self.cells.first().map(OneCell::start)
    }

    pub fn end(&self) -> Option<Element> {
        self.cells.last().map(OneCell::end)
    }

    /// Every cell flat and consecutive endpoints matching.
    pub fn verify(&self, l: &SLInftyStructure) -> Result<()> {
        for (k, cell) in self.cells.iter().enumerate() {
            if !cell.is_flat(l)? {
                return Err(Error::input(format!("cell {k} of the path is not flat")));
            }
        }
        for (k, pair) in self.cells.windows(2).enumerate() {
            if pair[0].end() != pair[1].start() {
                return Err(Error::input(format!(
                    "cells {k} and {} of the path do not share an endpoint",
                    k + 1
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::from_i64;
    use crate::space::BasisVector;

    /// m(-1,1), e(0,1) with d m = e, abelian; extended with a closed
    /// degree -1 vector and a degree -2 vector mapping onto it.
    fn abelian_pair() -> (Arc<FilteredGradedSpace>, SLInftyStructure) {
        let s = FilteredGradedSpace::new(
            "L",
            vec![
                BasisVector { id: "m".into(), degree: -1, weight: 1 },
                BasisVector { id: "e".into(), degree: 0, weight: 1 },
                BasisVector { id: "m2".into(), degree: -1, weight: 1 },
                BasisVector { id: "u".into(), degree: -2, weight: 1 },
            ],
            1,
            1,
        )
        .unwrap();
        let l = SLInftyStructure::new(
            &s,
            true,
            vec![
                (vec![0], BTreeMap::from([(1usize, from_i64(1))])),
                (vec![3], BTreeMap::from([(2usize, from_i64(1))])),
            ],
        )
        .unwrap();
        (s, l)
    }

    /// y(-1,1), x(0,1), w(0,2), z(1,3) with d y = x, d w = z,
    /// {x, x} = -z, {x, y} = w.  Flat elements are a x + (a^2/2) w.
    fn quadratic() -> (Arc<FilteredGradedSpace>, SLInftyStructure) {
        let s = FilteredGradedSpace::new(
            "Q",
            vec![
                BasisVector { id: "y".into(), degree: -1, weight: 1 },
                BasisVector { id: "x".into(), degree: 0, weight: 1 },
                BasisVector { id: "w".into(), degree: 0, weight: 2 },
                BasisVector { id: "z".into(), degree: 1, weight: 3 },
            ],
            3,
            1,
        )
        .unwrap();
        let l = SLInftyStructure::new(
            &s,
            false,
            vec![
                (vec![0], BTreeMap::from([(1usize, from_i64(1))])),
                (vec![2], BTreeMap::from([(3usize, from_i64(1))])),
                (vec![1, 1], BTreeMap::from([(3usize, from_i64(-1))])),
                (vec![0, 1], BTreeMap::from([(2usize, from_i64(1))])),
            ],
        )
        .unwrap();
        (s, l)
    }

    fn constant_gen(s: &Arc<FilteredGradedSpace>, i: usize, c: i64) -> PolyElement {
        PolyElement::from_element(&Element::basis_element(s, i).scale(&from_i64(c)))
    }

    #[test]
    fn transport_solves_the_quadratic_flow() {
        let (s, l) = quadratic();
        let (cell, corrections) =
            solve_ivp_counted(&l, &Element::zero(&s), &constant_gen(&s, 0, 1)).unwrap();
        // d/dt body = x + t w integrates to t x + t^2/2 w.
        let expected = PolyElement::from_coeffs(
            &s,
            BTreeMap::from([
                (1usize, Poly::from_coeffs(vec![from_i64(0), from_i64(1)])),
                (
                    2usize,
                    Poly::from_coeffs(vec![
                        scalar::zero(),
                        scalar::zero(),
                        scalar::ratio(1, 2),
                    ]),
                ),
            ]),
        );
        assert_eq!(cell.body, expected);
        assert!(corrections as i64 <= s.filtration_length);
        assert!(cell.is_flat(&l).unwrap());

        // A start point that is not flat is refused.
        let err = solve_ivp(&l, &Element::basis_element(&s, 1), &constant_gen(&s, 0, 1));
        assert!(matches!(err, Err(Error::Input(_))));
    }

    #[test]
    fn reversal_swaps_endpoints_and_preserves_flatness() {
        let (s, l) = quadratic();
        let cell = solve_ivp(&l, &Element::zero(&s), &constant_gen(&s, 0, 1)).unwrap();
        let back = cell.reverse().unwrap();
        assert_eq!(back.start(), cell.end());
        assert_eq!(back.end(), cell.start());
        assert!(back.is_flat(&l).unwrap());
        assert_eq!(back.reverse().unwrap(), cell);
    }

    #[test]
    fn generator_adjustment_keeps_the_body() {
        let (s, l) = abelian_pair();
        let cell = solve_ivp(&l, &Element::zero(&s), &constant_gen(&s, 0, 1)).unwrap();
        let y = PolyElement::from_coeffs(
            &s,
            BTreeMap::from([(3usize, Poly::from_coeffs(vec![from_i64(0), from_i64(1)]))]),
        );
        let adjusted = adjust_dt_by_exact(&l, &cell, &y).unwrap();
        assert_eq!(adjusted.body, cell.body);
        assert_ne!(adjusted.dt_part, cell.dt_part);
        assert!(adjusted.is_flat(&l).unwrap());
    }

    /// n(-1,1), a(0,1) with d n = a, mapping onto the abelian pair by
    /// n -> m, a -> e.
    fn strict_map() -> InfinityMorphism {
        let src_space = FilteredGradedSpace::new(
            "S",
            vec![
                BasisVector { id: "n".into(), degree: -1, weight: 1 },
                BasisVector { id: "a".into(), degree: 0, weight: 1 },
            ],
            1,
            1,
        )
        .unwrap();
        let src = Arc::new(
            SLInftyStructure::new(
                &src_space,
                true,
                vec![(vec![0], BTreeMap::from([(1usize, from_i64(1))]))],
            )
            .unwrap(),
        );
        let tgt = Arc::new(abelian_pair().1);
        InfinityMorphism::new(
            &src,
            &tgt,
            0,
            None,
            vec![
                (vec![0], BTreeMap::from([(0usize, from_i64(1))])),
                (vec![1], BTreeMap::from([(1usize, from_i64(1))])),
            ],
        )
        .unwrap()
    }

    #[test]
    fn cells_push_through_a_strict_map() {
        let u = strict_map();
        let cell = solve_ivp(
            &u.source,
            &Element::zero(&u.source.space),
            &constant_gen(&u.source.space, 0, -1),
        )
        .unwrap();
        let pushed = push_cell(&u, &cell).unwrap();
        assert_eq!(pushed.start(), Element::zero(&u.target.space));
        assert_eq!(
            pushed.end(),
            Element::basis_element(&u.target.space, 1).scale(&from_i64(-1))
        );
        assert_eq!(pushed.dt_part, constant_gen(&u.target.space, 0, -1));
    }

    #[test]
    fn horn_filler_is_exact_on_an_abelian_pair() {
        let (s, l) = abelian_pair();
        let beta = solve_ivp(&l, &Element::zero(&s), &constant_gen(&s, 0, 1)).unwrap();
        let chi = solve_ivp(&l, &Element::zero(&s), &constant_gen(&s, 0, -1)).unwrap();
        let filled = horn_fill(&l, &beta, &chi).unwrap();
        let kappa = filled.edge(Edge::ZeroToTwo).unwrap();
        assert_eq!(kappa.start(), beta.end());
        assert_eq!(kappa.end(), chi.end());
        // Linear filler: the generator is exactly the reversed first edge
        // plus the second.
        assert_eq!(
            kappa.dt_part,
            beta.reverse().unwrap().dt_part.add(&chi.dt_part)
        );
        assert!(kappa.is_flat(&l).unwrap());
    }

    #[test]
    fn horn_filler_closes_the_quadratic_triangle() {
        let (s, l) = quadratic();
        let beta = solve_ivp(&l, &Element::zero(&s), &constant_gen(&s, 0, 1)).unwrap();
        let chi = solve_ivp(&l, &Element::zero(&s), &constant_gen(&s, 0, -1)).unwrap();
        // The audited filler checks flatness and both edge restrictions.
        let filled = horn_fill(&l, &beta, &chi).unwrap();
        let kappa = filled.edge(Edge::ZeroToTwo).unwrap();
        assert_eq!(kappa.start(), beta.end());
        assert_eq!(kappa.end(), chi.end());
        assert!(kappa.is_flat(&l).unwrap());
        // Leading order of the third generator: reversed first plus
        // second, corrections one level deeper.
        let lead = kappa
            .dt_part
            .sub(&beta.reverse().unwrap().dt_part.add(&chi.dt_part));
        assert!(lead.weight() >= 2);

        let mismatch = OneCell::constant(&Element::basis_element(&s, 1));
        assert!(matches!(
            horn_fill(&l, &beta, &mismatch),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn concatenation_through_a_strict_map() {
        let u = strict_map();
        let xi = solve_ivp(
            &u.source,
            &Element::zero(&u.source.space),
            &constant_gen(&u.source.space, 0, -1),
        )
        .unwrap();
        let beta = solve_ivp(
            &u.target,
            &Element::zero(&u.target.space),
            &constant_gen(&u.target.space, 0, 1),
        )
        .unwrap();
        let kappa = concatenate_via_morphism(&u, &xi, &beta).unwrap();
        assert_eq!(kappa.start(), beta.end());
        assert_eq!(kappa.end(), Element::basis_element(&u.target.space, 1).scale(&from_i64(-1)));
        assert_eq!(kappa.dt_part, constant_gen(&u.target.space, 0, -2));
    }

    #[test]
    fn straightening_an_abelian_generator() {
        let (s, l) = abelian_pair();
        // Mean-zero generator: the cell is a closed loop at 0 and
        // straightens to the constant cell.
        let wobble = PolyElement::from_coeffs(
            &s,
            BTreeMap::from([(0usize, Poly::from_coeffs(vec![from_i64(1), from_i64(-2)]))]),
        );
        let loop_cell = solve_ivp(&l, &Element::zero(&s), &wobble).unwrap();
        assert_eq!(loop_cell.end(), Element::zero(&s));
        let straight = rectify(&l, &loop_cell).unwrap();
        assert_eq!(straight, OneCell::constant(&Element::zero(&s)));
    }

    #[test]
    fn straightening_matches_the_direct_transport() {
        let (s, l) = quadratic();
        let ramp = PolyElement::from_coeffs(
            &s,
            BTreeMap::from([(0usize, Poly::from_coeffs(vec![from_i64(0), from_i64(2)]))]),
        );
        let bent = solve_ivp(&l, &Element::zero(&s), &ramp).unwrap();
        let straight = rectify(&l, &bent).unwrap();
        let direct = solve_ivp(&l, &Element::zero(&s), &constant_gen(&s, 0, 1)).unwrap();
        assert_eq!(straight, direct);
        assert_eq!(straight.end(), bent.end());
    }

    #[test]
    fn paths_verify_composability() {
        let (s, l) = abelian_pair();
        let first = solve_ivp(&l, &Element::zero(&s), &constant_gen(&s, 0, 1)).unwrap();
        let second = solve_ivp(&l, &first.end(), &constant_gen(&s, 0, 1)).unwrap();
        let path = GaugePath { cells: vec![first.clone(), second] };
        assert!(path.verify(&l).is_ok());
        assert_eq!(path.start().unwrap(), Element::zero(&s));

        let broken = GaugePath { cells: vec![first.clone(), first] };
        assert!(matches!(broken.verify(&l), Err(Error::Input(_))));
    }
}
