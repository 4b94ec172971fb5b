//! Morphisms between shifted L-infinity algebras up to coherent homotopy:
//! a family of degree-0 graded-symmetric components, one per arity, subject
//! to compatibility relations that tie nested source brackets to target
//! brackets of component values.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{self, Scalar};
use crate::space::{Element, PolyElement};
use crate::structure::{
    canonical_tuples, k_subsets, koszul_sign_sort, BracketOutput, SLInftyStructure,
};

#[derive(Debug, Clone)]
pub struct MorphismRelationViolation {
    pub arity: usize,
    pub inputs: Vec<String>,
    pub defect: Element,
}

#[derive(Debug, Clone)]
pub struct MorphismFiltrationViolation {
    pub inputs: Vec<String>,
    pub output: String,
    pub required_weight: i64,
    pub output_weight: i64,
}

#[derive(Debug, Clone)]
pub struct InfinityMorphism {
    pub source: Arc<SLInftyStructure>,
    pub target: Arc<SLInftyStructure>,
    /// Weight gained by every component: images of weight-w inputs land in
    /// filtration level w + shift.
    pub shift: i64,
    /// Optional bound M with all components of arity above M zero; enables
    /// the finite correction sums used over weight-0 sources.
    pub finite_sum_bound: Option<usize>,
    components: BTreeMap<Vec<usize>, BracketOutput>,
    max_component_arity: usize,
}

impl InfinityMorphism {
    pub fn new(
        source: &Arc<SLInftyStructure>,
        target: &Arc<SLInftyStructure>,
        shift: i64,
        finite_sum_bound: Option<usize>,
        entries: Vec<(Vec<usize>, BracketOutput)>,
    ) -> Result<Self> {
        Self::assemble(source, target, shift, finite_sum_bound, entries, true)
    }

    pub fn new_unchecked(
        source: &Arc<SLInftyStructure>,
        target: &Arc<SLInftyStructure>,
        shift: i64,
        finite_sum_bound: Option<usize>,
        entries: Vec<(Vec<usize>, BracketOutput)>,
    ) -> Self {
        Self::assemble(source, target, shift, finite_sum_bound, entries, false)
            .expect("lenient assembly cannot fail")
    }

    fn assemble(
        source: &Arc<SLInftyStructure>,
        target: &Arc<SLInftyStructure>,
        shift: i64,
        finite_sum_bound: Option<usize>,
        entries: Vec<(Vec<usize>, BracketOutput)>,
        strict: bool,
    ) -> Result<Self> {
        if shift < 0 {
            return Err(Error::input(format!("morphism shift must be >= 0, got {shift}")));
        }
        let mut components: BTreeMap<Vec<usize>, BracketOutput> = BTreeMap::new();
        let mut problems: Vec<String> = Vec::new();
        for (tuple, output) in entries {
            if tuple.is_empty() {
                problems.push("morphism component of arity 0".to_string());
                continue;
            }
            if let Some(&i) = tuple.iter().find(|&&i| i >= source.space.dim()) {
                return Err(Error::input(format!(
                    "component input index {i} out of range for {}",
                    source.space.name
                )));
            }
            if let Some(&j) = output.keys().find(|&&j| j >= target.space.dim()) {
                return Err(Error::input(format!(
                    "component output index {j} out of range for {}",
                    target.space.name
                )));
            }
            let Some((canonical, sign)) = koszul_sign_sort(&source.space, &tuple) else {
                if strict {
                    let ids: Vec<&str> = tuple
                        .iter()
                        .map(|&i| source.space.basis[i].id.as_str())
                        .collect();
                    problems.push(format!(
                        "component on ({}) repeats an odd-degree input and is forced to zero",
                        ids.join(", ")
                    ));
                }
                continue;
            };
            let slot = components.entry(canonical).or_default();
            for (j, c) in output {
                let entry = slot.entry(j).or_insert_with(scalar::zero);
                *entry += c * scalar::from_i64(sign);
            }
        }
        for output in components.values_mut() {
            output.retain(|_, c| !c.is_zero());
        }
        components.retain(|_, output| !output.is_empty());

        if strict {
            for (tuple, output) in &components {
                let in_deg: i64 = tuple.iter().map(|&i| source.space.basis[i].degree).sum();
                for &j in output.keys() {
                    if target.space.basis[j].degree != in_deg {
                        let ids: Vec<&str> = tuple
                            .iter()
                            .map(|&i| source.space.basis[i].id.as_str())
                            .collect();
                        problems.push(format!(
                            "component on ({}) sends degree {} to {:?} of degree {}, expected {}",
                            ids.join(", "),
                            in_deg,
                            target.space.basis[j].id,
                            target.space.basis[j].degree,
                            in_deg
                        ));
                    }
                }
            }
            if let Some(bound) = finite_sum_bound {
                for tuple in components.keys() {
                    if tuple.len() > bound {
                        problems.push(format!(
                            "component of arity {} exceeds the declared finite-sum bound {}",
                            tuple.len(),
                            bound
                        ));
                    }
                }
            }
            if !problems.is_empty() {
                return Err(Error::input(problems.join("; ")));
            }
        }

        let max_component_arity = components.keys().map(Vec::len).max().unwrap_or(0);
        Ok(InfinityMorphism {
            source: Arc::clone(source),
            target: Arc::clone(target),
            shift,
            finite_sum_bound,
            components,
            max_component_arity,
        })
    }

    /// The identity morphism of a structure: arity-1 components sending
    /// every basis vector to itself, shift 0.
    pub fn identity(l: &Arc<SLInftyStructure>) -> Self {
        let entries: Vec<(Vec<usize>, BracketOutput)> = (0..l.space.dim())
            .map(|i| (vec![i], BTreeMap::from([(i, scalar::one())])))
            .collect();
        Self::new(l, l, 0, None, entries).expect("the identity is a valid morphism")
    }

    pub fn max_component_arity(&self) -> usize {
        self.max_component_arity
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &BracketOutput)> {
        self.components.iter()
    }

    pub fn component(&self, tuple: &[usize]) -> Option<&BracketOutput> {
        self.components.get(tuple)
    }

    /// Component value on basis vectors in arbitrary order.
    pub fn component_basis(&self, tuple: &[usize]) -> Element {
        let Some((canonical, sign)) = koszul_sign_sort(&self.source.space, tuple) else {
            return Element::zero(&self.target.space);
        };
        match self.components.get(&canonical) {
            None => Element::zero(&self.target.space),
            Some(output) => Element::from_coeffs(
                &self.target.space,
                output
                    .iter()
                    .map(|(j, c)| (*j, c * scalar::from_i64(sign)))
                    .collect(),
            ),
        }
    }

    /// Multilinear component application to sparse source elements.
    pub fn apply_component(&self, inputs: &[&Element]) -> Element {
        assert!(!inputs.is_empty(), "component arity must be at least 1");
        for v in inputs {
            assert!(
                crate::space::same_space(&v.space, &self.source.space),
                "component input from a different space"
            );
        }
        if inputs.len() > self.max_component_arity {
            return Element::zero(&self.target.space);
        }
        let supports: Vec<Vec<(usize, &Scalar)>> = inputs
            .iter()
            .map(|v| v.coeffs.iter().map(|(i, c)| (*i, c)).collect())
            .collect();
        if supports.iter().any(Vec::is_empty) {
            return Element::zero(&self.target.space);
        }
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        let mut choice = vec![0usize; inputs.len()];
        loop {
            let tuple: Vec<usize> = choice
                .iter()
                .enumerate()
                .map(|(slot, &c)| supports[slot][c].0)
                .collect();
            if let Some((canonical, sign)) = koszul_sign_sort(&self.source.space, &tuple) {
                if let Some(output) = self.components.get(&canonical) {
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
            let mut slot = inputs.len();
            loop {
                if slot == 0 {
                    return Element::from_coeffs(&self.target.space, acc);
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

    pub fn apply_component_poly(&self, inputs: &[&PolyElement]) -> Result<PolyElement> {
        assert!(!inputs.is_empty(), "component arity must be at least 1");
        for v in inputs {
            assert!(
                crate::space::same_space(&v.space, &self.source.space),
                "component input from a different space"
            );
        }
        if inputs.len() > self.max_component_arity {
            return Ok(PolyElement::zero(&self.target.space));
        }
        let supports: Vec<Vec<(usize, &Poly)>> = inputs
            .iter()
            .map(|v| v.coeffs.iter().map(|(i, c)| (*i, c)).collect())
            .collect();
        if supports.iter().any(Vec::is_empty) {
            return Ok(PolyElement::zero(&self.target.space));
        }
        let mut acc: BTreeMap<usize, Poly> = BTreeMap::new();
        let mut choice = vec![0usize; inputs.len()];
        loop {
            let tuple: Vec<usize> = choice
                .iter()
                .enumerate()
                .map(|(slot, &c)| supports[slot][c].0)
                .collect();
            if let Some((canonical, sign)) = koszul_sign_sort(&self.source.space, &tuple) {
                if let Some(output) = self.components.get(&canonical) {
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
                    return Ok(PolyElement::from_coeffs(&self.target.space, acc));
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

    /// Linear part: the underlying chain map.
    pub fn psi(&self, v: &Element) -> Element {
        if v.is_zero() {
            return Element::zero(&self.target.space);
        }
        self.apply_component(&[v])
    }

    pub fn psi_poly(&self, v: &PolyElement) -> Result<PolyElement> {
        if v.is_zero() {
            return Ok(PolyElement::zero(&self.target.space));
        }
        self.apply_component_poly(&[v])
    }

    /// Full morphism on degree-0 elements: sum of all components with 1/m!
    /// weights.  Sends flat elements to flat elements when the relations
    /// hold.
    pub fn u_star(&self, alpha: &Element) -> Result<Element> {
        if !alpha.has_degree(0) {
            return Err(Error::input(format!(
                "morphism sum input must be homogeneous of degree 0, got {alpha}"
            )));
        }
        if !alpha.is_zero() && alpha.weight() < 1 && self.finite_sum_bound.is_none() {
            return Err(Error::input(
                "morphism sum over a weight-0 element does not truncate; \
                 declare a finite component bound",
            ));
        }
        let mut total = Element::zero(&self.target.space);
        for m in 1..=self.max_component_arity {
            let inputs: Vec<&Element> = std::iter::repeat(alpha).take(m).collect();
            let term = self.apply_component(&inputs);
            total = total.add(&term.scale(&scalar::inv_factorial(m)));
        }
        Ok(total)
    }

    /// Components must raise weight by at least the declared shift.
    pub fn verify_filtration_compatibility(&self) -> Vec<MorphismFiltrationViolation> {
        let mut violations = Vec::new();
        for (tuple, output) in &self.components {
            let required: i64 = tuple
                .iter()
                .map(|&i| self.source.space.basis[i].weight)
                .sum::<i64>()
                + self.shift;
            for &j in output.keys() {
                if self.target.space.basis[j].weight < required {
                    violations.push(MorphismFiltrationViolation {
                        inputs: tuple
                            .iter()
                            .map(|&i| self.source.space.basis[i].id.clone())
                            .collect(),
                        output: self.target.space.basis[j].id.clone(),
                        required_weight: required,
                        output_weight: self.target.space.basis[j].weight,
                    });
                }
            }
        }
        violations
    }

    /// Compatibility relations.  For each arity n, the shuffle sum of
    /// components applied to nested source brackets must equal the sum over
    /// set partitions of target brackets of component values, with Koszul
    /// signs throughout.  Checking basis tuples suffices by multilinearity.
    pub fn verify_morphism_relations(
        &self,
        up_to_arity: Option<usize>,
    ) -> Vec<MorphismRelationViolation> {
        let sa = self.source.max_arity();
        let ta = self.target.max_arity();
        let mc = self.max_component_arity;
        let limit = up_to_arity.unwrap_or_else(|| {
            ((sa + mc).saturating_sub(1)).max(ta.saturating_mul(mc)).max(1)
        });
        // When every piece of the structure respects the filtration, tuples
        // whose total weight lands beyond the last level contribute zero to
        // both sides and can be skipped.
        let filtration_ok = self.source.verify_filtration_compatibility().is_empty()
            && self.target.verify_filtration_compatibility().is_empty()
            && self.verify_filtration_compatibility().is_empty();
        let target_cap = self.target.space.filtration_length;
        let mut violations = Vec::new();
        for n in 1..=limit {
            for tuple in canonical_tuples(&self.source.space, n) {
                if filtration_ok {
                    let w: i64 = tuple
                        .iter()
                        .map(|&i| self.source.space.basis[i].weight)
                        .sum();
                    if w + self.shift > target_cap {
                        continue;
                    }
                }
                let defect = self.relation_defect(&tuple);
                if !defect.is_zero() {
                    violations.push(MorphismRelationViolation {
                        arity: n,
                        inputs: tuple
                            .iter()
                            .map(|&i| self.source.space.basis[i].id.clone())
                            .collect(),
                        defect,
                    });
                }
            }
        }
        violations
    }

    /// Left side minus right side of the compatibility relation on one basis
    /// tuple.
    pub fn relation_defect(&self, tuple: &[usize]) -> Element {
        let n = tuple.len();
        let space = &self.source.space;
        let mut defect = Element::zero(&self.target.space);

        // Shuffle side: component of (inner bracket, remaining inputs).
        for k in 1..=n {
            if k > self.source.max_arity() || (n - k + 1) > self.max_component_arity {
                continue;
            }
            for subset in k_subsets(n, k) {
                let mut in_subset = vec![false; n];
                for &p in &subset {
                    in_subset[p] = true;
                }
                let mut sign = 1i64;
                for a in 0..n {
                    if in_subset[a] {
                        continue;
                    }
                    for b in (a + 1)..n {
                        if in_subset[b]
                            && space.basis[tuple[a]].degree % 2 != 0
                            && space.basis[tuple[b]].degree % 2 != 0
                        {
                            sign = -sign;
                        }
                    }
                }
                let inner_tuple: Vec<usize> = subset.iter().map(|&p| tuple[p]).collect();
                let inner = self.source.bracket_basis(&inner_tuple);
                if inner.is_zero() {
                    continue;
                }
                let rest: Vec<Element> = (0..n)
                    .filter(|&p| !in_subset[p])
                    .map(|p| Element::basis_element(space, tuple[p]))
                    .collect();
                let mut inputs: Vec<&Element> = vec![&inner];
                inputs.extend(rest.iter());
                let term = self.apply_component(&inputs);
                defect = defect.add(&term.scale(&scalar::from_i64(sign)));
            }
        }

        // Partition side: target bracket of component values, one block per
        // argument, blocks ordered by least element.
        for partition in set_partitions(n) {
            let j = partition.len();
            if j > self.target.max_arity() && j > 1 {
                continue;
            }
            if partition
                .iter()
                .any(|block| block.len() > self.max_component_arity)
            {
                continue;
            }
            // Koszul sign of regrouping the inputs into block order.
            let listing: Vec<usize> = partition.iter().flatten().copied().collect();
            let mut sign = 1i64;
            for a in 0..n {
                for b in (a + 1)..n {
                    let pos_a = listing.iter().position(|&p| p == a).unwrap();
                    let pos_b = listing.iter().position(|&p| p == b).unwrap();
                    if pos_a > pos_b
                        && space.basis[tuple[a]].degree % 2 != 0
                        && space.basis[tuple[b]].degree % 2 != 0
                    {
                        sign = -sign;
                    }
                }
            }
            let values: Vec<Element> = partition
                .iter()
                .map(|block| {
                    let block_tuple: Vec<usize> = block.iter().map(|&p| tuple[p]).collect();
                    self.component_basis(&block_tuple)
                })
                .collect();
            if values.iter().any(Element::is_zero) {
                continue;
            }
            let term = if j == 1 {
                self.target.differential(&values[0])
            } else {
                let inputs: Vec<&Element> = values.iter().collect();
                self.target.bracket_eval(&inputs)
            };
            defect = defect.sub(&term.scale(&scalar::from_i64(sign)));
        }

        defect
    }

    /// Morphism between the structures twisted by a flat source element and
    /// its image: components absorb copies of the twisting element.
    pub fn twist(&self, tau: &Element) -> Result<InfinityMorphism> {
        if !self.source.is_mc(tau)? {
            return Err(Error::input(
                "twisting element of a morphism must satisfy the flatness equation",
            ));
        }
        let tau_image = self.u_star(tau)?;
        let twisted_source = Arc::new(self.source.twist(tau)?);
        let twisted_target = Arc::new(self.target.twist(&tau_image)?);
        let mut entries: Vec<(Vec<usize>, BracketOutput)> = Vec::new();
        for n in 1..=self.max_component_arity {
            for tuple in canonical_tuples(&self.source.space, n) {
                let basis: Vec<Element> = tuple
                    .iter()
                    .map(|&i| Element::basis_element(&self.source.space, i))
                    .collect();
                let mut out = Element::zero(&self.target.space);
                for k in 0..=(self.max_component_arity - n) {
                    let mut inputs: Vec<&Element> = std::iter::repeat(tau).take(k).collect();
                    inputs.extend(basis.iter());
                    let term = self.apply_component(&inputs);
                    out = out.add(&term.scale(&scalar::inv_factorial(k)));
                }
                if !out.is_zero() {
                    entries.push((tuple, out.coeffs));
                }
            }
        }
        InfinityMorphism::new(
            &twisted_source,
            &twisted_target,
            self.shift,
            self.finite_sum_bound,
            entries,
        )
    }
}

/// Set partitions of 0..n; within each partition the blocks are ordered by
/// their least element and each block is ascending.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut current: Vec<Vec<usize>> = Vec::new();
    fn rec(n: usize, next: usize, current: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if next == n {
            out.push(current.clone());
            return;
        }
        for b in 0..current.len() {
            current[b].push(next);
            rec(n, next + 1, current, out);
            current[b].pop();
        }
        current.push(vec![next]);
        rec(n, next + 1, current, out);
        current.pop();
    }
    rec(n, 0, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{from_i64, ratio};
    use crate::space::{BasisVector, FilteredGradedSpace};

    /// One-generator abelian source with trivial differential.
    fn point_source() -> Arc<SLInftyStructure> {
        let s = FilteredGradedSpace::new(
            "L",
            vec![BasisVector { id: "a0".into(), degree: 0, weight: 1 }],
            1,
            1,
        )
        .unwrap();
        Arc::new(SLInftyStructure::new(&s, true, vec![]).unwrap())
    }

    /// Target with x(0,1), w(0,2), z(1,3), d w = z and {x, x} = -z.
    fn curved_target(bracket_sign: i64) -> Arc<SLInftyStructure> {
        let s = FilteredGradedSpace::new(
            "Lt",
            vec![
                BasisVector { id: "x".into(), degree: 0, weight: 1 },
                BasisVector { id: "w".into(), degree: 0, weight: 2 },
                BasisVector { id: "z".into(), degree: 1, weight: 3 },
            ],
            3,
            1,
        )
        .unwrap();
        Arc::new(
            SLInftyStructure::new(
                &s,
                false,
                vec![
                    (vec![1], BTreeMap::from([(2usize, from_i64(1))])),
                    (vec![0, 0], BTreeMap::from([(2usize, from_i64(bracket_sign))])),
                ],
            )
            .unwrap(),
        )
    }

    fn quadratic_morphism(bracket_sign: i64) -> InfinityMorphism {
        let source = point_source();
        let target = curved_target(bracket_sign);
        InfinityMorphism::new(
            &source,
            &target,
            0,
            None,
            vec![
                (vec![0], BTreeMap::from([(0usize, from_i64(1))])),
                (vec![0, 0], BTreeMap::from([(1usize, from_i64(1))])),
            ],
        )
        .unwrap()
    }

    #[test]
    fn relations_fix_the_bracket_sign() {
        // With d w = z, the arity-2 relation forces {x, x} = -z: the
        // partition side reads d w + {x, x}.
        let good = quadratic_morphism(-1);
        assert!(good.verify_morphism_relations(None).is_empty());
        let bad = quadratic_morphism(1);
        let violations = bad.verify_morphism_relations(None);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].arity, 2);
    }

    #[test]
    fn morphism_sum_sends_flat_to_flat() {
        let u = quadratic_morphism(-1);
        let a0 = Element::basis_element(&u.source.space, 0);
        let image = u.u_star(&a0).unwrap();
        // x + w/2.
        let x = Element::basis_element(&u.target.space, 0);
        let w = Element::basis_element(&u.target.space, 1);
        assert_eq!(image, x.add(&w.scale(&ratio(1, 2))));
        assert!(u.source.is_mc(&a0).unwrap());
        assert!(u.target.is_mc(&image).unwrap());
    }

    #[test]
    fn twisted_morphism_linear_part() {
        let u = quadratic_morphism(-1);
        let a0 = Element::basis_element(&u.source.space, 0);
        let ut = u.twist(&a0).unwrap();
        // Linear part of the twist absorbs one copy of the twisting
        // element into the quadratic component: a0 goes to x + w.
        let x = Element::basis_element(&u.target.space, 0);
        let w = Element::basis_element(&u.target.space, 1);
        assert_eq!(ut.psi(&a0), x.add(&w));
        assert!(ut.verify_morphism_relations(None).is_empty());
    }

    #[test]
    fn strict_constructor_rejects_degree_mismatch() {
        let source = point_source();
        let target = curved_target(-1);
        // z has degree 1, so it cannot be the image of a degree-0 input.
        assert!(InfinityMorphism::new(
            &source,
            &target,
            0,
            None,
            vec![(vec![0], BTreeMap::from([(2usize, from_i64(1))]))],
        )
        .is_err());
    }

    #[test]
    fn filtration_shift_is_reported() {
        let source = point_source();
        let target = curved_target(-1);
        let u = InfinityMorphism::new(
            &source,
            &target,
            1,
            None,
            vec![(vec![0], BTreeMap::from([(0usize, from_i64(1))]))],
        )
        .unwrap();
        // Shift 1 requires the image of a weight-1 input to have weight 2.
        let violations = u.verify_filtration_compatibility();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].required_weight, 2);
    }

    #[test]
    fn partition_listing_covers_all_blocks() {
        assert_eq!(set_partitions(3).len(), 5);
        assert_eq!(set_partitions(4).len(), 15);
        for p in set_partitions(4) {
            let mut seen: Vec<usize> = p.iter().flatten().copied().collect();
            seen.sort_unstable();
            assert_eq!(seen, vec![0, 1, 2, 3]);
            // Blocks come ordered by least element.
            let mins: Vec<usize> = p.iter().map(|b| b[0]).collect();
            let mut sorted = mins.clone();
            sorted.sort_unstable();
            assert_eq!(mins, sorted);
        }
    }
}
