//! Polynomial differential forms on the interval and on the triangle, with
//! coefficients in a filtered graded space.  Flat interval forms are the
//! paths between flat elements; triangle forms carry the horn filler.  The
//! vertex contractions implemented here are the homotopies whose side
//! conditions make the filler's fixed-point iteration terminate.
//!
//! Sign conventions, used consistently everywhere: the differential is
//! `D(v ? w) = d v ? w + (-1)^{|v|} v ? d w`, a bracket of forms pulls the
//! coefficient forms out to the right picking up `(-1)^{|w_i| |v_j|}` for
//! every coefficient moved past a later element, and a contraction `h` of
//! the coefficient complex extends with the same Koszul sign,
//! `H(v ? w) = (-1)^{|v|} v ? h(w)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::Poly2;
use crate::scalar::{self, Scalar};
use crate::space::{same_space, Element, FilteredGradedSpace, PolyElement};
use crate::structure::{koszul_sign_sort, SLInftyStructure};

/// Element with bivariate polynomial coefficients: a polynomial family over
/// the triangle chart `(t1, t2)`, third barycentric coordinate eliminated.
#[derive(Debug, Clone)]
pub struct Poly2Element {
    pub space: Arc<FilteredGradedSpace>,
    pub coeffs: BTreeMap<usize, Poly2>,
}

impl PartialEq for Poly2Element {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.coeffs == other.coeffs
    }
}

impl Poly2Element {
    pub fn zero(space: &Arc<FilteredGradedSpace>) -> Self {
        Poly2Element {
            space: Arc::clone(space),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_coeffs(space: &Arc<FilteredGradedSpace>, coeffs: BTreeMap<usize, Poly2>) -> Self {
        let mut e = Poly2Element {
            space: Arc::clone(space),
            coeffs,
        };
        e.coeffs.retain(|_, p| !p.is_zero());
        e
    }

    pub fn from_element(e: &Element) -> Self {
        Poly2Element {
            space: Arc::clone(&e.space),
            coeffs: e
                .coeffs
                .iter()
                .map(|(i, c)| (*i, Poly2::constant(c.clone())))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Poly2Element) -> Poly2Element {
        debug_assert!(same_space(&self.space, &other.space));
        let mut coeffs = self.coeffs.clone();
        for (i, p) in &other.coeffs {
            let entry = coeffs.entry(*i).or_insert_with(Poly2::zero);
            *entry = entry.add(p);
            if entry.is_zero() {
                coeffs.remove(i);
            }
        }
        Poly2Element {
            space: Arc::clone(&self.space),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Poly2Element) -> Poly2Element {
        self.add(&other.scale(&-scalar::one()))
    }

    pub fn scale(&self, s: &Scalar) -> Poly2Element {
        if s.is_zero() {
            return Poly2Element::zero(&self.space);
        }
        Poly2Element {
            space: Arc::clone(&self.space),
            coeffs: self.coeffs.iter().map(|(i, p)| (*i, p.scale(s))).collect(),
        }
    }

    pub fn mul_poly(&self, q: &Poly2) -> Result<Poly2Element> {
        let mut coeffs = BTreeMap::new();
        for (i, p) in &self.coeffs {
            let prod = p.mul(q)?;
            if !prod.is_zero() {
                coeffs.insert(*i, prod);
            }
        }
        Ok(Poly2Element {
            space: Arc::clone(&self.space),
            coeffs,
        })
    }

    pub fn eval(&self, t1: &Scalar, t2: &Scalar) -> Element {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(i, p)| (*i, p.eval(t1, t2)))
            .collect();
        Element::from_coeffs(&self.space, coeffs)
    }

    pub fn d_t1(&self) -> Poly2Element {
        Poly2Element::from_coeffs(
            &self.space,
            self.coeffs.iter().map(|(i, p)| (*i, p.d_t1())).collect(),
        )
    }

    pub fn d_t2(&self) -> Poly2Element {
        Poly2Element::from_coeffs(
            &self.space,
            self.coeffs.iter().map(|(i, p)| (*i, p.d_t2())).collect(),
        )
    }

    /// Substitute `t1 := a0 + a1 t`, `t2 := b0 + b1 t` in every coefficient.
    pub fn restrict_affine(
        &self,
        a0: &Scalar,
        a1: &Scalar,
        b0: &Scalar,
        b1: &Scalar,
    ) -> Result<PolyElement> {
        let mut coeffs = BTreeMap::new();
        for (i, p) in &self.coeffs {
            let q = p.restrict_affine(a0, a1, b0, b1)?;
            if !q.is_zero() {
                coeffs.insert(*i, q);
            }
        }
        Ok(PolyElement::from_coeffs(&self.space, coeffs))
    }

    pub fn contract_to_vertex1(&self, extra: u32) -> Result<Poly2Element> {
        let mut coeffs = BTreeMap::new();
        for (i, p) in &self.coeffs {
            let q = p.contract_to_vertex1(extra)?;
            if !q.is_zero() {
                coeffs.insert(*i, q);
            }
        }
        Ok(Poly2Element {
            space: Arc::clone(&self.space),
            coeffs,
        })
    }

    pub fn weight(&self) -> i64 {
        self.coeffs
            .keys()
            .map(|i| self.space.basis[*i].weight)
            .min()
            .unwrap_or_else(|| self.space.zero_weight())
    }

    pub fn in_filtration(&self, p: i64) -> bool {
        self.weight() >= self.space.clamp_level(p)
    }
}

/// Multilinear bracket with bivariate polynomial coefficients; the
/// polynomial factors are even, so Koszul signs only see the basis vectors.
pub fn bracket_poly2(
    l: &SLInftyStructure,
    inputs: &[&Poly2Element],
) -> Result<Poly2Element> {
    assert!(!inputs.is_empty(), "bracket arity must be at least 1");
    for v in inputs {
        assert!(
            same_space(&v.space, &l.space),
            "bracket input from a different space"
        );
    }
    if inputs.len() > l.max_arity() {
        return Ok(Poly2Element::zero(&l.space));
    }
    let mut acc: BTreeMap<usize, Poly2> = BTreeMap::new();
    let supports: Vec<Vec<(usize, &Poly2)>> = inputs
        .iter()
        .map(|v| v.coeffs.iter().map(|(i, c)| (*i, c)).collect())
        .collect();
    if supports.iter().any(Vec::is_empty) {
        return Ok(Poly2Element::zero(&l.space));
    }
    let mut choice = vec![0usize; inputs.len()];
    loop {
        let tuple: Vec<usize> = choice
            .iter()
            .enumerate()
            .map(|(slot, &c)| supports[slot][c].0)
            .collect();
        if let Some((canonical, sign)) = koszul_sign_sort(&l.space, &tuple) {
            if let Some(output) = l.constant(&canonical) {
                let mut factor = Poly2::constant(scalar::from_i64(sign));
                for (slot, &c) in choice.iter().enumerate() {
                    factor = factor.mul(supports[slot][c].1)?;
                }
                if !factor.is_zero() {
                    for (j, c) in output {
                        let entry = acc.entry(*j).or_insert_with(Poly2::zero);
                        *entry = entry.add(&factor.scale(c));
                    }
                }
            }
        }
        let mut slot = inputs.len();
        loop {
            if slot == 0 {
                return Ok(Poly2Element::from_coeffs(&l.space, acc));
            }
            slot -= 1;
            choice[slot] += 1;
            if choice[slot] < supports[slot].len() {
                break;
            }
            choice[slot] = 0;
        }
    }
}

fn differential_poly2(l: &SLInftyStructure, v: &Poly2Element) -> Result<Poly2Element> {
    if v.is_zero() {
        return Ok(Poly2Element::zero(&l.space));
    }
    bracket_poly2(l, &[v])
}

/// Pointwise curvature of a polynomial family.
pub fn curvature_poly(l: &SLInftyStructure, beta: &PolyElement) -> Result<PolyElement> {
    let mut out = PolyElement::zero(&l.space);
    for k in 1..=l.max_arity() {
        let inputs: Vec<&PolyElement> = std::iter::repeat(beta).take(k).collect();
        out = out.add(&l.bracket_eval_poly(&inputs)?.scale(&scalar::inv_factorial(k)));
    }
    Ok(out)
}

/// Differential twisted pointwise by a polynomial family:
/// `sum_{k>=0} 1/k! {beta^k, v}`.
pub fn twisted_differential_poly(
    l: &SLInftyStructure,
    beta: &PolyElement,
    v: &PolyElement,
) -> Result<PolyElement> {
    let mut out = l.differential_poly(v);
    for k in 1..l.max_arity() {
        let mut inputs: Vec<&PolyElement> = std::iter::repeat(beta).take(k).collect();
        inputs.push(v);
        out = out.add(&l.bracket_eval_poly(&inputs)?.scale(&scalar::inv_factorial(k)));
    }
    Ok(out)
}

/// Bivariate version of the twisted differential.
pub fn twisted_differential_poly2(
    l: &SLInftyStructure,
    beta: &Poly2Element,
    v: &Poly2Element,
) -> Result<Poly2Element> {
    let mut out = differential_poly2(l, v)?;
    for k in 1..l.max_arity() {
        let mut inputs: Vec<&Poly2Element> = std::iter::repeat(beta).take(k).collect();
        inputs.push(v);
        out = out.add(&bracket_poly2(l, &inputs)?.scale(&scalar::inv_factorial(k)));
    }
    Ok(out)
}

/// Polynomial form on the interval: `body + (dt coefficient) dt`, both
/// stored literally.
#[derive(Debug, Clone, PartialEq)]
pub struct Form1 {
    pub body: PolyElement,
    pub dt: PolyElement,
}

impl Form1 {
    pub fn zero(space: &Arc<FilteredGradedSpace>) -> Self {
        Form1 {
            body: PolyElement::zero(space),
            dt: PolyElement::zero(space),
        }
    }

    pub fn from_parts(body: PolyElement, dt: PolyElement) -> Self {
        debug_assert!(same_space(&body.space, &dt.space));
        Form1 { body, dt }
    }

    pub fn space(&self) -> &Arc<FilteredGradedSpace> {
        &self.body.space
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero() && self.dt.is_zero()
    }

    pub fn add(&self, other: &Form1) -> Form1 {
        Form1 {
            body: self.body.add(&other.body),
            dt: self.dt.add(&other.dt),
        }
    }

    pub fn sub(&self, other: &Form1) -> Form1 {
        Form1 {
            body: self.body.sub(&other.body),
            dt: self.dt.sub(&other.dt),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Form1 {
        Form1 {
            body: self.body.scale(s),
            dt: self.dt.scale(s),
        }
    }

    pub fn weight(&self) -> i64 {
        self.body.weight().min(self.dt.weight())
    }

    pub fn in_filtration(&self, p: i64) -> bool {
        self.weight() >= self.space().clamp_level(p)
    }
}

/// Scale each component by the parity of its basis vector.
fn signed_by_degree(v: &PolyElement) -> PolyElement {
    let coeffs = v
        .coeffs
        .iter()
        .map(|(i, p)| {
            if v.space.basis[*i].degree % 2 == 0 {
                (*i, p.clone())
            } else {
                (*i, p.scale(&-scalar::one()))
            }
        })
        .collect();
    PolyElement::from_coeffs(&v.space, coeffs)
}

fn signed_by_degree2(v: &Poly2Element) -> Poly2Element {
    let coeffs = v
        .coeffs
        .iter()
        .map(|(i, p)| {
            if v.space.basis[*i].degree % 2 == 0 {
                (*i, p.clone())
            } else {
                (*i, p.scale(&-scalar::one()))
            }
        })
        .collect();
    Poly2Element::from_coeffs(&v.space, coeffs)
}

/// Differential of the interval-form complex: the structure differential on
/// the coefficients plus the de Rham differential with its Koszul sign.
pub fn d_form1(l: &SLInftyStructure, f: &Form1) -> Form1 {
    Form1 {
        body: l.differential_poly(&f.body),
        dt: l
            .differential_poly(&f.dt)
            .add(&signed_by_degree(&f.body).derivative()),
    }
}

pub(crate) fn check_profile(v: &PolyElement, want: i64, what: &str) -> Result<()> {
    for i in v.coeffs.keys() {
        let d = v.space.basis[*i].degree;
        if d != want {
            return Err(Error::input(format!(
                "{what} must be homogeneous of degree {want}, found degree {d}"
            )));
        }
    }
    Ok(())
}

fn check_profile2(v: &Poly2Element, want: i64, what: &str) -> Result<()> {
    for i in v.coeffs.keys() {
        let d = v.space.basis[*i].degree;
        if d != want {
            return Err(Error::input(format!(
                "{what} must be homogeneous of degree {want}, found degree {d}"
            )));
        }
    }
    Ok(())
}

/// Curvature of a total-degree-0 interval form.  Zero exactly when the body
/// is pointwise flat and the dt coefficient transports it:
/// `d/dt body + d^{body}(dt coefficient) = 0`.
pub fn curvature_form1(l: &SLInftyStructure, f: &Form1) -> Result<Form1> {
    check_profile(&f.body, 0, "interval form body")?;
    check_profile(&f.dt, -1, "interval form dt coefficient")?;
    Ok(Form1 {
        body: curvature_poly(l, &f.body)?,
        dt: f
            .body
            .derivative()
            .add(&twisted_differential_poly(l, &f.body, &f.dt)?),
    })
}

/// Contraction of the interval onto `t = 0`: integrates the dt coefficient
/// from 0.  Together with `eps_interval` it satisfies
/// `d h + h d = id - eps`.
pub fn h_interval(f: &Form1) -> Result<Form1> {
    Ok(Form1 {
        body: signed_by_degree(&f.dt).integrate()?,
        dt: PolyElement::zero(f.space()),
    })
}

/// Evaluation projector at `t = 0`, extended by zero on one-forms.
pub fn eps_interval(f: &Form1) -> Form1 {
    Form1 {
        body: PolyElement::from_element(&f.body.eval(&scalar::zero())),
        dt: PolyElement::zero(f.space()),
    }
}

/// Polynomial form on the triangle chart `(t1, t2)`:
/// `body + y1 dt1 + y2 dt2 + w dt1^dt2`, all coefficients literal.
#[derive(Debug, Clone, PartialEq)]
pub struct Form2 {
    pub body: Poly2Element,
    pub dt1: Poly2Element,
    pub dt2: Poly2Element,
    pub dt12: Poly2Element,
}

impl Form2 {
    pub fn zero(space: &Arc<FilteredGradedSpace>) -> Self {
        Form2 {
            body: Poly2Element::zero(space),
            dt1: Poly2Element::zero(space),
            dt2: Poly2Element::zero(space),
            dt12: Poly2Element::zero(space),
        }
    }

    pub fn space(&self) -> &Arc<FilteredGradedSpace> {
        &self.body.space
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero() && self.dt1.is_zero() && self.dt2.is_zero() && self.dt12.is_zero()
    }

    pub fn add(&self, other: &Form2) -> Form2 {
        Form2 {
            body: self.body.add(&other.body),
            dt1: self.dt1.add(&other.dt1),
            dt2: self.dt2.add(&other.dt2),
            dt12: self.dt12.add(&other.dt12),
        }
    }

    pub fn sub(&self, other: &Form2) -> Form2 {
        Form2 {
            body: self.body.sub(&other.body),
            dt1: self.dt1.sub(&other.dt1),
            dt2: self.dt2.sub(&other.dt2),
            dt12: self.dt12.sub(&other.dt12),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Form2 {
        Form2 {
            body: self.body.scale(s),
            dt1: self.dt1.scale(s),
            dt2: self.dt2.scale(s),
            dt12: self.dt12.scale(s),
        }
    }

    pub fn weight(&self) -> i64 {
        self.body
            .weight()
            .min(self.dt1.weight())
            .min(self.dt2.weight())
            .min(self.dt12.weight())
    }

    pub fn in_filtration(&self, p: i64) -> bool {
        self.weight() >= self.space().clamp_level(p)
    }
}

/// Differential of the triangle-form complex.  On the exterior factor,
/// `d(g dt1) = -d_2 g dt1^dt2` and `d(g dt2) = d_1 g dt1^dt2`.
pub fn d_form2(l: &SLInftyStructure, f: &Form2) -> Result<Form2> {
    let sb = signed_by_degree2(&f.body);
    let s1 = signed_by_degree2(&f.dt1);
    let s2 = signed_by_degree2(&f.dt2);
    Ok(Form2 {
        body: differential_poly2(l, &f.body)?,
        dt1: differential_poly2(l, &f.dt1)?.add(&sb.d_t1()),
        dt2: differential_poly2(l, &f.dt2)?.add(&sb.d_t2()),
        dt12: differential_poly2(l, &f.dt12)?
            .sub(&s1.d_t2())
            .add(&s2.d_t1()),
    })
}

/// Sum of all brackets of arity at least 2 of a flat-profiled triangle form
/// (body of degree 0, edge coefficients of degree -1, top coefficient of
/// degree -2), with `1/m!` weights: the nonlinear tail of the curvature.
///
/// The only sign beyond pointwise brackets is the `-1` on the
/// `{body^{m-2}, y1, y2}` terms, from moving `dt1` past the odd coefficient
/// of `dt2`.
pub fn higher_bracket_sum_form2(l: &SLInftyStructure, f: &Form2) -> Result<Form2> {
    check_profile2(&f.body, 0, "triangle form body")?;
    check_profile2(&f.dt1, -1, "triangle form dt1 coefficient")?;
    check_profile2(&f.dt2, -1, "triangle form dt2 coefficient")?;
    check_profile2(&f.dt12, -2, "triangle form dt1^dt2 coefficient")?;

    let b = &f.body;
    let mut out = Form2::zero(f.space());
    for m in 2..=l.max_arity() {
        let bodies: Vec<&Poly2Element> = std::iter::repeat(b).take(m).collect();
        out.body = out
            .body
            .add(&bracket_poly2(l, &bodies)?.scale(&scalar::inv_factorial(m)));

        let with = |extra: &[&Poly2Element]| -> Result<Poly2Element> {
            let mut inputs: Vec<&Poly2Element> =
                std::iter::repeat(b).take(m - extra.len()).collect();
            inputs.extend_from_slice(extra);
            bracket_poly2(l, &inputs)
        };
        let w1 = scalar::inv_factorial(m - 1);
        out.dt1 = out.dt1.add(&with(&[&f.dt1])?.scale(&w1));
        out.dt2 = out.dt2.add(&with(&[&f.dt2])?.scale(&w1));
        out.dt12 = out.dt12.add(&with(&[&f.dt12])?.scale(&w1));
        out.dt12 = out
            .dt12
            .sub(&with(&[&f.dt1, &f.dt2])?.scale(&scalar::inv_factorial(m - 2)));
    }
    Ok(out)
}

/// Full curvature of a flat-profiled triangle form: linear differential
/// plus the bracket tail.  Zero exactly for a flat family over the
/// triangle.
pub fn curvature_form2(l: &SLInftyStructure, f: &Form2) -> Result<Form2> {
    Ok(d_form2(l, f)?.add(&higher_bracket_sum_form2(l, f)?))
}

/// Contraction of the triangle onto vertex 1 at `(t1, t2) = (1, 0)`:
///
///   `h(g dt1) = (t1 - 1) I[g]`,  `h(g dt2) = t2 I[g]`,
///   `h(w dt1^dt2) = J[w] ((t1 - 1) dt2 - t2 dt1)`,
///
/// where `I` and `J` are the straight-line contraction integrals.  Together
/// with `eps_triangle` it satisfies `d h + h d = id - eps`.
pub fn h_triangle(f: &Form2) -> Result<Form2> {
    let space = f.space();
    let t1m1 = Poly2::monomial(1, 0, scalar::one()).add(&Poly2::constant(-scalar::one()));
    let t2 = Poly2::monomial(0, 1, scalar::one());

    let i1 = signed_by_degree2(&f.dt1).contract_to_vertex1(0)?;
    let i2 = signed_by_degree2(&f.dt2).contract_to_vertex1(0)?;
    let j = signed_by_degree2(&f.dt12).contract_to_vertex1(1)?;

    Ok(Form2 {
        body: i1.mul_poly(&t1m1)?.add(&i2.mul_poly(&t2)?),
        dt1: j.mul_poly(&t2)?.scale(&-scalar::one()),
        dt2: j.mul_poly(&t1m1)?,
        dt12: Poly2Element::zero(space),
    })
}

/// Evaluation projector at vertex 1, extended by zero on higher forms.
pub fn eps_triangle(f: &Form2) -> Form2 {
    let space = f.space();
    Form2 {
        body: Poly2Element::from_element(&f.body.eval(&scalar::one(), &scalar::zero())),
        dt1: Poly2Element::zero(space),
        dt2: Poly2Element::zero(space),
        dt12: Poly2Element::zero(space),
    }
}

/// Directed edges of the triangle; vertex 0 sits at the chart origin,
/// vertex 1 at `(1, 0)`, vertex 2 at `(0, 1)`.  The parameter runs from the
/// first-named vertex at `t = 0` to the second at `t = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    OneToZero,
    OneToTwo,
    ZeroToTwo,
}

/// Pull a triangle form back along one edge; the top part dies, the edge
/// parts pick up the Jacobian factors of the substitution.
pub fn restrict_to_edge(f: &Form2, edge: Edge) -> Result<Form1> {
    let one = scalar::one();
    let zero = scalar::zero();
    // (a0, a1, b0, b1): t1 = a0 + a1 t, t2 = b0 + b1 t.
    let (a0, a1, b0, b1) = match edge {
        Edge::OneToZero => (one.clone(), -one.clone(), zero.clone(), zero),
        Edge::OneToTwo => (one.clone(), -one.clone(), zero.clone(), one),
        Edge::ZeroToTwo => (zero.clone(), zero.clone(), zero, one),
    };
    let body = f.body.restrict_affine(&a0, &a1, &b0, &b1)?;
    let dt = f
        .dt1
        .restrict_affine(&a0, &a1, &b0, &b1)?
        .scale(&a1)
        .add(&f.dt2.restrict_affine(&a0, &a1, &b0, &b1)?.scale(&b1));
    Ok(Form1 { body, dt })
}
