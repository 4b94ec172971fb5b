//! Shifted L-infinity structures: graded-symmetric multilinear brackets of
//! uniform cohomological degree +1, one per arity, on a filtered graded space.
//!
//! Structure constants are stored on canonically sorted basis tuples; a
//! Koszul sign (one factor of -1 per transposition of two odd-degree inputs)
//! relates an arbitrary input order to the stored one.  Tuples with a
//! repeated odd-degree entry are identically zero by symmetry and are never
//! stored.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{self, Scalar};
use crate::space::{Element, FilteredGradedSpace, PolyElement};

/// Output of one bracket on one basis tuple: basis index -> coefficient.
pub type BracketOutput = BTreeMap<usize, Scalar>;

/// Sort a basis tuple into non-decreasing index order, tracking the Koszul
/// sign (-1 per inversion of two odd-degree entries).  Returns `None` when
/// the tuple repeats an odd-degree index, which forces the bracket to zero.
pub fn koszul_sign_sort(
    space: &FilteredGradedSpace,
    tuple: &[usize],
) -> Option<(Vec<usize>, i64)> {
    let mut sorted: Vec<usize> = tuple.to_vec();
    let mut sign = 1i64;
    // Insertion sort; tuples are tiny.
    for i in 1..sorted.len() {
        let mut j = i;
        while j > 0 && sorted[j - 1] > sorted[j] {
            if space.basis[sorted[j - 1]].degree % 2 != 0
                && space.basis[sorted[j]].degree % 2 != 0
            {
                sign = -sign;
            }
            sorted.swap(j - 1, j);
            j -= 1;
        }
    }
    for w in sorted.windows(2) {
        if w[0] == w[1] && space.basis[w[0]].degree % 2 != 0 {
            return None;
        }
    }
    Some((sorted, sign))
}

/// All non-decreasing index tuples of the given arity with no repeated
/// odd-degree entry.
pub fn canonical_tuples(space: &FilteredGradedSpace, arity: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(arity);
    fn rec(
        space: &FilteredGradedSpace,
        arity: usize,
        start: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == arity {
            out.push(current.clone());
            return;
        }
        for i in start..space.dim() {
            if let Some(&last) = current.last() {
                if last == i && space.basis[i].degree % 2 != 0 {
                    continue;
                }
            }
            current.push(i);
            rec(space, arity, i, current, out);
            current.pop();
        }
    }
    rec(space, arity, 0, &mut current, &mut out);
    out
}

#[derive(Debug, Clone)]
pub struct RelationViolation {
    pub arity: usize,
    pub inputs: Vec<String>,
    pub defect: Element,
}

#[derive(Debug, Clone)]
pub struct FiltrationViolation {
    pub inputs: Vec<String>,
    pub output: String,
    pub input_weight_sum: i64,
    pub output_weight: i64,
}

#[derive(Debug, Clone)]
pub struct SLInftyStructure {
    pub space: Arc<FilteredGradedSpace>,
    pub abelian: bool,
    constants: BTreeMap<Vec<usize>, BracketOutput>,
    max_arity: usize,
}

impl SLInftyStructure {
    /// Build and validate: canonicalizes tuples, rejects repeated odd-degree
    /// inputs, enforces uniform output degree (sum of input degrees plus
    /// one), and enforces the abelian flag (no brackets of arity >= 2).
    pub fn new(
        space: &Arc<FilteredGradedSpace>,
        abelian: bool,
        entries: Vec<(Vec<usize>, BracketOutput)>,
    ) -> Result<Self> {
        Self::assemble(space, abelian, entries, true)
    }

    /// Build without degree or abelian-flag validation; used to construct
    /// deliberately broken structures for diagnostics.  Repeated odd-degree
    /// tuples are dropped since they cannot be represented.
    pub fn new_unchecked(
        space: &Arc<FilteredGradedSpace>,
        abelian: bool,
        entries: Vec<(Vec<usize>, BracketOutput)>,
    ) -> Self {
        Self::assemble(space, abelian, entries, false).expect("lenient assembly cannot fail")
    }

    fn assemble(
        space: &Arc<FilteredGradedSpace>,
        abelian: bool,
        entries: Vec<(Vec<usize>, BracketOutput)>,
        strict: bool,
    ) -> Result<Self> {
        let mut constants: BTreeMap<Vec<usize>, BracketOutput> = BTreeMap::new();
        let mut problems: Vec<String> = Vec::new();
        for (tuple, output) in entries {
            if tuple.is_empty() {
                problems.push("bracket of arity 0".to_string());
                continue;
            }
            if let Some(&i) = tuple.iter().find(|&&i| i >= space.dim()) {
                return Err(Error::input(format!(
                    "bracket input index {i} out of range for {}",
                    space.name
                )));
            }
            if let Some(&j) = output.keys().find(|&&j| j >= space.dim()) {
                return Err(Error::input(format!(
                    "bracket output index {j} out of range for {}",
                    space.name
                )));
            }
            let Some((canonical, sign)) = koszul_sign_sort(space, &tuple) else {
                if strict {
                    let ids: Vec<&str> =
                        tuple.iter().map(|&i| space.basis[i].id.as_str()).collect();
                    problems.push(format!(
                        "bracket on ({}) repeats an odd-degree input and is forced to zero",
                        ids.join(", ")
                    ));
                }
                continue;
            };
            let slot = constants.entry(canonical).or_default();
            for (j, c) in output {
                let entry = slot.entry(j).or_insert_with(scalar::zero);
                *entry += c * scalar::from_i64(sign);
            }
        }
        for output in constants.values_mut() {
            output.retain(|_, c| !c.is_zero());
        }
        constants.retain(|_, output| !output.is_empty());

        if strict {
            for (tuple, output) in &constants {
                let in_deg: i64 = tuple.iter().map(|&i| space.basis[i].degree).sum();
                for &j in output.keys() {
                    if space.basis[j].degree != in_deg + 1 {
                        let ids: Vec<&str> =
                            tuple.iter().map(|&i| space.basis[i].id.as_str()).collect();
                        problems.push(format!(
                            "bracket on ({}) sends degree {} to {:?} of degree {}, expected {}",
                            ids.join(", "),
                            in_deg,
                            space.basis[j].id,
                            space.basis[j].degree,
                            in_deg + 1
                        ));
                    }
                }
                if abelian && tuple.len() >= 2 {
                    let ids: Vec<&str> =
                        tuple.iter().map(|&i| space.basis[i].id.as_str()).collect();
                    problems.push(format!(
                        "abelian structure declares a bracket of arity {} on ({})",
                        tuple.len(),
                        ids.join(", ")
                    ));
                }
            }
            if !problems.is_empty() {
                return Err(Error::input(problems.join("; ")));
            }
        }

        let max_arity = constants.keys().map(Vec::len).max().unwrap_or(0);
        Ok(SLInftyStructure {
            space: Arc::clone(space),
            abelian,
            constants,
            max_arity,
        })
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn constants(&self) -> impl Iterator<Item = (&Vec<usize>, &BracketOutput)> {
        self.constants.iter()
    }

    /// Stored constant on an already-canonical tuple.
    pub fn constant(&self, tuple: &[usize]) -> Option<&BracketOutput> {
        self.constants.get(tuple)
    }

    /// Bracket of basis vectors in arbitrary order.
    pub fn bracket_basis(&self, tuple: &[usize]) -> Element {
        let Some((canonical, sign)) = koszul_sign_sort(&self.space, tuple) else {
            return Element::zero(&self.space);
        };
        match self.constants.get(&canonical) {
            None => Element::zero(&self.space),
            Some(output) => Element::from_coeffs(
                &self.space,
                output
                    .iter()
                    .map(|(j, c)| (*j, c * scalar::from_i64(sign)))
                    .collect(),
            ),
        }
    }

    /// Multilinear bracket of sparse elements.
    pub fn bracket_eval(&self, inputs: &[&Element]) -> Element {
        assert!(!inputs.is_empty(), "bracket arity must be at least 1");
        for v in inputs {
            assert!(
                crate::space::same_space(&v.space, &self.space),
                "bracket input from a different space"
            );
        }
        if inputs.len() > self.max_arity {
            return Element::zero(&self.space);
        }
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        let supports: Vec<Vec<(usize, &Scalar)>> = inputs
            .iter()
            .map(|v| v.coeffs.iter().map(|(i, c)| (*i, c)).collect())
            .collect();
        if supports.iter().any(Vec::is_empty) {
            return Element::zero(&self.space);
        }
        let mut choice = vec![0usize; inputs.len()];
        loop {
            let tuple: Vec<usize> = choice
                .iter()
                .enumerate()
                .map(|(slot, &c)| supports[slot][c].0)
                .collect();
            if let Some((canonical, sign)) = koszul_sign_sort(&self.space, &tuple) {
                if let Some(output) = self.constants.get(&canonical) {
                    let mut factor = scalar::from_i64(sign);
                    for (slot, &c) in choice.iter().enumerate() {
                        factor *= supports[slot][c].1;
                    }
                    if !factor.is_zero() {
                        for (j, c) in output {
                            let entry = acc.entry(*j).or_insert_with(scalar::zero);
                            *entry += c * &factor;
                        }
                    }
                }
            }
            // Odometer over the support choices.
            let mut slot = inputs.len();
            loop {
                if slot == 0 {
                    return Element::from_coeffs(&self.space, acc);
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

    /// Multilinear bracket of polynomial paths.  Polynomial coefficients are
    /// even, so the Koszul signs only see the underlying basis vectors.
    pub fn bracket_eval_poly(&self, inputs: &[&PolyElement]) -> Result<PolyElement> {
        assert!(!inputs.is_empty(), "bracket arity must be at least 1");
        for v in inputs {
            assert!(
                crate::space::same_space(&v.space, &self.space),
                "bracket input from a different space"
            );
        }
        if inputs.len() > self.max_arity {
            return Ok(PolyElement::zero(&self.space));
        }
        let mut acc: BTreeMap<usize, Poly> = BTreeMap::new();
        let supports: Vec<Vec<(usize, &Poly)>> = inputs
            .iter()
            .map(|v| v.coeffs.iter().map(|(i, c)| (*i, c)).collect())
            .collect();
        if supports.iter().any(Vec::is_empty) {
            return Ok(PolyElement::zero(&self.space));
        }
        let mut choice = vec![0usize; inputs.len()];
        loop {
            let tuple: Vec<usize> = choice
                .iter()
                .enumerate()
                .map(|(slot, &c)| supports[slot][c].0)
                .collect();
            if let Some((canonical, sign)) = koszul_sign_sort(&self.space, &tuple) {
                if let Some(output) = self.constants.get(&canonical) {
                    let mut factor = Poly::constant(scalar::from_i64(sign));
                    for (slot, &c) in choice.iter().enumerate() {
                        factor = factor.mul(supports[slot][c].1)?;
                    }
                    if !factor.is_zero() {
                        for (j, c) in output {
                            let entry = acc.entry(*j).or_insert_with(Poly::zero);
                            *entry = entry.add(&factor.scale(c));
                        }
                    }
                }
            }
            let mut slot = inputs.len();
            loop {
                if slot == 0 {
                    return Ok(PolyElement::from_coeffs(&self.space, acc));
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

    pub fn differential(&self, v: &Element) -> Element {
        if v.is_zero() {
            return Element::zero(&self.space);
        }
        self.bracket_eval(&[v])
    }

    pub fn differential_poly(&self, v: &PolyElement) -> PolyElement {
        if v.is_zero() {
            return PolyElement::zero(&self.space);
        }
        self.bracket_eval_poly(&[v])
            .expect("differential of a path stays within the degree cap")
    }

    /// Curvature sum over all stored arities with 1/k! weights.
    pub fn curvature(&self, alpha: &Element) -> Result<Element> {
        if !alpha.has_degree(0) {
            return Err(Error::input(format!(
                "curvature input must be homogeneous of degree 0, got {alpha}"
            )));
        }
        let mut total = Element::zero(&self.space);
        for k in 1..=self.max_arity {
            let inputs: Vec<&Element> = std::iter::repeat(alpha).take(k).collect();
            let term = self.bracket_eval(&inputs);
            total = total.add(&term.scale(&scalar::inv_factorial(k)));
        }
        Ok(total)
    }

    pub fn is_mc(&self, alpha: &Element) -> Result<bool> {
        Ok(self.curvature(alpha)?.is_zero())
    }

    /// Structure twisted by a degree-0 element: the arity-n bracket picks up
    /// all original brackets padded with copies of `tau`, weighted 1/k!.
    pub fn twist(&self, tau: &Element) -> Result<SLInftyStructure> {
        if !tau.has_degree(0) {
            return Err(Error::input("twisting element must have degree 0"));
        }
        if !self.abelian && tau.weight() < 1 {
            return Err(Error::input(
                "twisting element must lie in the first filtration level",
            ));
        }
        if !self.is_mc(tau)? {
            return Err(Error::input(format!(
                "twisting element must satisfy the flatness equation, \
                 curvature is {}",
                self.curvature(tau)?
            )));
        }
        let mut entries: Vec<(Vec<usize>, BracketOutput)> = Vec::new();
        for n in 1..=self.max_arity {
            for tuple in canonical_tuples(&self.space, n) {
                let mut out = Element::zero(&self.space);
                let basis: Vec<Element> = tuple
                    .iter()
                    .map(|&i| Element::basis_element(&self.space, i))
                    .collect();
                for k in 0..=(self.max_arity - n) {
                    let mut inputs: Vec<&Element> = std::iter::repeat(tau).take(k).collect();
                    inputs.extend(basis.iter());
                    let term = self.bracket_eval(&inputs);
                    out = out.add(&term.scale(&scalar::inv_factorial(k)));
                }
                if !out.is_zero() {
                    entries.push((tuple, out.coeffs));
                }
            }
        }
        let abelian = entries.iter().all(|(tuple, _)| tuple.len() < 2);
        SLInftyStructure::new(&self.space, abelian, entries)
    }

    /// Brackets must not decrease total filtration weight.
    pub fn verify_filtration_compatibility(&self) -> Vec<FiltrationViolation> {
        let mut violations = Vec::new();
        for (tuple, output) in &self.constants {
            let in_weight: i64 = tuple.iter().map(|&i| self.space.basis[i].weight).sum();
            for &j in output.keys() {
                if self.space.basis[j].weight < in_weight {
                    violations.push(FiltrationViolation {
                        inputs: tuple
                            .iter()
                            .map(|&i| self.space.basis[i].id.clone())
                            .collect(),
                        output: self.space.basis[j].id.clone(),
                        input_weight_sum: in_weight,
                        output_weight: self.space.basis[j].weight,
                    });
                }
            }
        }
        violations
    }

    /// Generalized Jacobi identities: for each arity n, the sum over
    /// (k, n-k) shuffles of nested brackets with Koszul signs vanishes.
    /// Checking basis tuples suffices by multilinearity; arities beyond
    /// `2 * max_arity - 1` hold trivially because one of the two nested
    /// brackets always exceeds the stored arity.
    pub fn verify_linfty_relations(&self, up_to_arity: Option<usize>) -> Vec<RelationViolation> {
        let limit = up_to_arity.unwrap_or_else(|| (2 * self.max_arity).saturating_sub(1).max(1));
        let mut violations = Vec::new();
        for n in 1..=limit {
            for tuple in canonical_tuples(&self.space, n) {
                let defect = self.jacobi_defect(&tuple);
                if !defect.is_zero() {
                    violations.push(RelationViolation {
                        arity: n,
                        inputs: tuple
                            .iter()
                            .map(|&i| self.space.basis[i].id.clone())
                            .collect(),
                        defect,
                    });
                }
            }
        }
        violations
    }

    fn jacobi_defect(&self, tuple: &[usize]) -> Element {
        let n = tuple.len();
        let mut defect = Element::zero(&self.space);
        for k in 1..=n {
            if k > self.max_arity || (n - k + 1) > self.max_arity {
                continue;
            }
            for subset in k_subsets(n, k) {
                let mut in_subset = vec![false; n];
                for &p in &subset {
                    in_subset[p] = true;
                }
                // Koszul sign of the shuffle moving the subset to the front:
                // one -1 per odd-odd pair (a, b) with a outside, b inside,
                // a before b in the original order.
                let mut sign = 1i64;
                for a in 0..n {
                    if in_subset[a] {
                        continue;
                    }
                    for b in (a + 1)..n {
                        if in_subset[b]
                            && self.space.basis[tuple[a]].degree % 2 != 0
                            && self.space.basis[tuple[b]].degree % 2 != 0
                        {
                            sign = -sign;
                        }
                    }
                }
                let inner_tuple: Vec<usize> = subset.iter().map(|&p| tuple[p]).collect();
                let inner = self.bracket_basis(&inner_tuple);
                if inner.is_zero() {
                    continue;
                }
                let rest: Vec<Element> = (0..n)
                    .filter(|&p| !in_subset[p])
                    .map(|p| Element::basis_element(&self.space, tuple[p]))
                    .collect();
                let mut inputs: Vec<&Element> = vec![&inner];
                inputs.extend(rest.iter());
                let term = self.bracket_eval(&inputs);
                defect = defect.add(&term.scale(&scalar::from_i64(sign)));
            }
        }
        defect
    }
}

/// All k-element subsets of 0..n in ascending order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        let remaining = k - current.len();
        for i in start..=(n - remaining) {
            current.push(i);
            rec(n, k, i + 1, current, out);
            current.pop();
        }
    }
    if k <= n {
        rec(n, k, 0, &mut current, &mut out);
    }
    out
}
