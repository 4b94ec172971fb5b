//! Graded filtered vector spaces and their sparse elements.
//!
//! A space is a finite list of named basis vectors, each carrying a
//! cohomological degree and a filtration weight.  The filtration is the
//! descending chain `F_{w_min} = L, F_{w_min+1}, ..., F_N, F_{N+1} = 0` in
//! which `F_p` is spanned by the basis vectors of weight at least `p`.
//! Elements are sparse rational combinations of basis vectors; polynomial
//! elements additionally carry a univariate polynomial per basis vector and
//! describe paths.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{self, Scalar};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisVector {
    pub id: String,
    pub degree: i64,
    pub weight: i64,
}

#[derive(Debug)]
pub struct FilteredGradedSpace {
    pub name: String,
    pub basis: Vec<BasisVector>,
    /// Filtration length `N`: `F_{N+1} = 0`.
    pub filtration_length: i64,
    /// First filtration level (0 or 1); `F_{w_min}` is the whole space.
    pub w_min: i64,
    index: HashMap<String, usize>,
}

impl PartialEq for FilteredGradedSpace {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis
            && self.filtration_length == other.filtration_length
            && self.w_min == other.w_min
    }
}

impl FilteredGradedSpace {
    pub fn new(
        name: impl Into<String>,
        basis: Vec<BasisVector>,
        filtration_length: i64,
        w_min: i64,
    ) -> Result<Arc<Self>> {
        if !(w_min == 0 || w_min == 1) {
            return Err(Error::input(format!("w_min must be 0 or 1, got {w_min}")));
        }
        if filtration_length < w_min {
            return Err(Error::input(format!(
                "filtration length {filtration_length} below first level {w_min}"
            )));
        }
        let mut index = HashMap::new();
        for (i, v) in basis.iter().enumerate() {
            if v.id.is_empty() || v.id.chars().any(char::is_whitespace) {
                return Err(Error::input(format!("invalid basis id {:?}", v.id)));
            }
            if index.insert(v.id.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate basis id {:?}", v.id)));
            }
            if v.weight < w_min || v.weight > filtration_length {
                return Err(Error::input(format!(
                    "basis vector {:?} has weight {} outside [{w_min}, {filtration_length}]",
                    v.id, v.weight
                )));
            }
        }
        Ok(Arc::new(FilteredGradedSpace {
            name: name.into(),
            basis,
            filtration_length,
            w_min,
            index,
        }))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Weight assigned to the zero element: one past the last level.
    pub fn zero_weight(&self) -> i64 {
        self.filtration_length + 1
    }

    /// Clamp a filtration index into the meaningful range
    /// `[w_min, N + 1]`; indices below `w_min` mean "everything" and indices
    /// beyond `N + 1` mean "zero only".
    pub fn clamp_level(&self, p: i64) -> i64 {
        p.clamp(self.w_min, self.zero_weight())
    }

    /// Basis indices with the given degree and weight in `[lo, hi)`.
    pub fn basis_in_window(&self, degree: i64, lo: i64, hi: i64) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| {
                let v = &self.basis[i];
                v.degree == degree && v.weight >= lo && v.weight < hi
            })
            .collect()
    }

    pub fn degrees_present(&self) -> Vec<i64> {
        let mut degs: Vec<i64> = self.basis.iter().map(|v| v.degree).collect();
        degs.sort_unstable();
        degs.dedup();
        degs
    }
}

/// Two space handles refer to the same space if they are literally the same
/// allocation or structurally equal (same basis, length, and first level).
pub fn same_space(a: &Arc<FilteredGradedSpace>, b: &Arc<FilteredGradedSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub fn check_same_space(
    a: &Arc<FilteredGradedSpace>,
    b: &Arc<FilteredGradedSpace>,
    context: &str,
) -> Result<()> {
    if same_space(a, b) {
        Ok(())
    } else {
        Err(Error::input(format!(
            "{context}: elements belong to different spaces ({} vs {})",
            a.name, b.name
        )))
    }
}

/// Sparse element of a filtered graded space.
#[derive(Debug, Clone)]
pub struct Element {
    pub space: Arc<FilteredGradedSpace>,
    pub coeffs: BTreeMap<usize, Scalar>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.coeffs == other.coeffs
    }
}

impl Element {
    pub fn zero(space: &Arc<FilteredGradedSpace>) -> Self {
        Element {
            space: Arc::clone(space),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn basis_element(space: &Arc<FilteredGradedSpace>, idx: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(idx, scalar::one());
        Element {
            space: Arc::clone(space),
            coeffs,
        }
    }

    pub fn from_coeffs(
        space: &Arc<FilteredGradedSpace>,
        coeffs: BTreeMap<usize, Scalar>,
    ) -> Self {
        let mut e = Element {
            space: Arc::clone(space),
            coeffs,
        };
        e.coeffs.retain(|_, c| !c.is_zero());
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Element) -> Element {
        debug_assert!(same_space(&self.space, &other.space));
        let mut coeffs = self.coeffs.clone();
        for (i, c) in &other.coeffs {
            let entry = coeffs.entry(*i).or_insert_with(scalar::zero);
            *entry += c;
            if entry.is_zero() {
                coeffs.remove(i);
            }
        }
        Element {
            space: Arc::clone(&self.space),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.scale(&-scalar::one()))
    }

    pub fn scale(&self, s: &Scalar) -> Element {
        if s.is_zero() {
            return Element::zero(&self.space);
        }
        Element {
            space: Arc::clone(&self.space),
            coeffs: self.coeffs.iter().map(|(i, c)| (*i, c * s)).collect(),
        }
    }

    /// Cohomological degree if homogeneous; `None` for the zero element
    /// (which is homogeneous of every degree).
    pub fn degree(&self) -> Result<Option<i64>> {
        let mut deg = None;
        for i in self.coeffs.keys() {
            let d = self.space.basis[*i].degree;
            match deg {
                None => deg = Some(d),
                Some(existing) if existing != d => {
                    return Err(Error::input(format!(
                        "element mixes degrees {existing} and {d}"
                    )))
                }
                _ => {}
            }
        }
        Ok(deg)
    }

    pub fn has_degree(&self, d: i64) -> bool {
        self.coeffs.keys().all(|i| self.space.basis[*i].degree == d)
    }

    /// Filtration weight: the minimum weight over the support, or `N + 1`
    /// for the zero element.
    pub fn weight(&self) -> i64 {
        self.coeffs
            .keys()
            .map(|i| self.space.basis[*i].weight)
            .min()
            .unwrap_or_else(|| self.space.zero_weight())
    }

    /// Membership in `F_p`.
    pub fn in_filtration(&self, p: i64) -> bool {
        self.weight() >= self.space.clamp_level(p)
    }

    /// Component of weight at least `p` (projection onto `F_p` along the
    /// shallower basis vectors).
    pub fn truncate_below(&self, p: i64) -> Element {
        Element {
            space: Arc::clone(&self.space),
            coeffs: self
                .coeffs
                .iter()
                .filter(|(i, _)| self.space.basis[**i].weight >= p)
                .map(|(i, c)| (*i, c.clone()))
                .collect(),
        }
    }

    /// Representative of the class modulo `F_p`: the components of weight
    /// strictly below `p`.
    pub fn reduce_mod(&self, p: i64) -> Element {
        Element {
            space: Arc::clone(&self.space),
            coeffs: self
                .coeffs
                .iter()
                .filter(|(i, _)| self.space.basis[**i].weight < p)
                .map(|(i, c)| (*i, c.clone()))
                .collect(),
        }
    }

    /// Dense coordinate vector over the full basis.
    pub fn to_dense(&self) -> Vec<Scalar> {
        let mut v = vec![scalar::zero(); self.space.dim()];
        for (i, c) in &self.coeffs {
            v[*i] = c.clone();
        }
        v
    }

    pub fn from_dense(space: &Arc<FilteredGradedSpace>, v: &[Scalar]) -> Element {
        let coeffs = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.clone()))
            .collect();
        Element {
            space: Arc::clone(space),
            coeffs,
        }
    }
}

impl std::fmt::Display for Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(i, c)| {
                format!(
                    "{}:{}",
                    self.space.basis[*i].id,
                    scalar::format_scalar(c)
                )
            })
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Element with univariate polynomial coefficients: a polynomial path in the
/// space.
#[derive(Debug, Clone)]
pub struct PolyElement {
    pub space: Arc<FilteredGradedSpace>,
    pub coeffs: BTreeMap<usize, Poly>,
}

impl PartialEq for PolyElement {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.coeffs == other.coeffs
    }
}

impl PolyElement {
    pub fn zero(space: &Arc<FilteredGradedSpace>) -> Self {
        PolyElement {
            space: Arc::clone(space),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_element(e: &Element) -> Self {
        PolyElement {
            space: Arc::clone(&e.space),
            coeffs: e
                .coeffs
                .iter()
                .map(|(i, c)| (*i, Poly::constant(c.clone())))
                .collect(),
        }
    }

    pub fn from_coeffs(space: &Arc<FilteredGradedSpace>, coeffs: BTreeMap<usize, Poly>) -> Self {
        let mut e = PolyElement {
            space: Arc::clone(space),
            coeffs,
        };
        e.coeffs.retain(|_, p| !p.is_zero());
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &PolyElement) -> PolyElement {
        debug_assert!(same_space(&self.space, &other.space));
        let mut coeffs = self.coeffs.clone();
        for (i, p) in &other.coeffs {
            let entry = coeffs.entry(*i).or_insert_with(Poly::zero);
            *entry = entry.add(p);
            if entry.is_zero() {
                coeffs.remove(i);
            }
        }
        PolyElement {
            space: Arc::clone(&self.space),
            coeffs,
        }
    }

    pub fn sub(&self, other: &PolyElement) -> PolyElement {
        self.add(&other.scale(&-scalar::one()))
    }

    pub fn scale(&self, s: &Scalar) -> PolyElement {
        if s.is_zero() {
            return PolyElement::zero(&self.space);
        }
        PolyElement {
            space: Arc::clone(&self.space),
            coeffs: self.coeffs.iter().map(|(i, p)| (*i, p.scale(s))).collect(),
        }
    }

    pub fn scale_poly(&self, q: &Poly) -> Result<PolyElement> {
        let mut coeffs = BTreeMap::new();
        for (i, p) in &self.coeffs {
            let prod = p.mul(q)?;
            if !prod.is_zero() {
                coeffs.insert(*i, prod);
            }
        }
        Ok(PolyElement {
            space: Arc::clone(&self.space),
            coeffs,
        })
    }

    pub fn eval(&self, t: &Scalar) -> Element {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(i, p)| (*i, p.eval(t)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Element {
            space: Arc::clone(&self.space),
            coeffs,
        }
    }

    pub fn derivative(&self) -> PolyElement {
        PolyElement::from_coeffs(
            &self.space,
            self.coeffs
                .iter()
                .map(|(i, p)| (*i, p.derivative()))
                .collect(),
        )
    }

    /// Antiderivative vanishing at `t = 0`.
    pub fn integrate(&self) -> Result<PolyElement> {
        let mut coeffs = BTreeMap::new();
        for (i, p) in &self.coeffs {
            coeffs.insert(*i, p.integrate()?);
        }
        Ok(PolyElement::from_coeffs(&self.space, coeffs))
    }

    pub fn integral_01(&self) -> Element {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(i, p)| (*i, p.integral_01()))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Element {
            space: Arc::clone(&self.space),
            coeffs,
        }
    }

    /// Substitute `t := a + b*t`.
    pub fn compose_affine(&self, a: &Scalar, b: &Scalar) -> Result<PolyElement> {
        let mut coeffs = BTreeMap::new();
        for (i, p) in &self.coeffs {
            coeffs.insert(*i, p.compose_affine(a, b)?);
        }
        Ok(PolyElement::from_coeffs(&self.space, coeffs))
    }

    /// All polynomial coefficients constant in `t`.
    pub fn is_constant(&self) -> bool {
        self.coeffs.values().all(Poly::is_constant)
    }

    pub fn degree(&self) -> Result<Option<i64>> {
        let mut deg = None;
        for i in self.coeffs.keys() {
            let d = self.space.basis[*i].degree;
            match deg {
                None => deg = Some(d),
                Some(existing) if existing != d => {
                    return Err(Error::input(format!(
                        "polynomial element mixes degrees {existing} and {d}"
                    )))
                }
                _ => {}
            }
        }
        Ok(deg)
    }

    /// Minimum basis weight over the whole support, uniform in `t`.
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

    /// Largest `t`-degree over the support (0 for the zero element).
    pub fn t_degree(&self) -> usize {
        self.coeffs
            .values()
            .filter_map(Poly::degree)
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{from_i64, ratio};

    fn space() -> Arc<FilteredGradedSpace> {
        FilteredGradedSpace::new(
            "L",
            vec![
                BasisVector { id: "e".into(), degree: 0, weight: 1 },
                BasisVector { id: "f".into(), degree: 1, weight: 2 },
            ],
            2,
            1,
        )
        .unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(FilteredGradedSpace::new(
            "L",
            vec![
                BasisVector { id: "a".into(), degree: 0, weight: 1 },
                BasisVector { id: "a".into(), degree: 1, weight: 1 },
            ],
            2,
            1
        )
        .is_err());
        assert!(FilteredGradedSpace::new(
            "L",
            vec![BasisVector { id: "a".into(), degree: 0, weight: 3 }],
            2,
            1
        )
        .is_err());
        assert!(FilteredGradedSpace::new("L", vec![], 1, 2).is_err());
    }

    #[test]
    fn weights_and_filtration() {
        let s = space();
        let e = Element::basis_element(&s, 0);
        let f = Element::basis_element(&s, 1);
        let sum = e.add(&f.scale(&ratio(1, 2)));
        assert_eq!(sum.weight(), 1);
        assert_eq!(Element::zero(&s).weight(), 3);
        assert!(sum.in_filtration(1));
        assert!(!sum.in_filtration(2));
        assert!(sum.in_filtration(0)); // below w_min means everything
        assert!(f.in_filtration(2));
        assert_eq!(sum.truncate_below(2), f.scale(&ratio(1, 2)));
        assert_eq!(sum.reduce_mod(2), e);
        assert_eq!(sum.degree().unwrap_err().exit_code(), 3);
        assert_eq!(e.degree().unwrap(), Some(0));
    }

    #[test]
    fn poly_elements_integrate_and_evaluate() {
        let s = space();
        let e = Element::basis_element(&s, 0);
        let path = PolyElement::from_coeffs(
            &s,
            BTreeMap::from([(0usize, Poly::from_coeffs(vec![from_i64(0), from_i64(2)]))]),
        );
        assert_eq!(path.eval(&ratio(1, 2)), e.clone());
        assert_eq!(path.integral_01(), e);
        let rev = path.compose_affine(&from_i64(1), &from_i64(-1)).unwrap();
        assert_eq!(rev.eval(&from_i64(1)), Element::zero(&s));
        assert_eq!(rev.eval(&from_i64(0)), e.scale(&from_i64(2)));
    }
}
