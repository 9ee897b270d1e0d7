//! Chow groups of smooth complete toric varieties in the orbit-closure basis.
//!
//! A class is an integer combination of orbit closures `[V(σ)]`. The cone
//! basis is not free: two classes are compared modulo the explicit lattice
//! of toric rational-equivalence relations, one grade at a time, through a
//! Hermite normal form membership test.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::fan::{Cone, Fan, OrbitFiber, ToricMorphism};
use crate::lattice::{hermite_normal_form, kernel_basis, solve_integer, HermiteForm, LatticeVector};
use crate::{Error, Result};

pub(crate) fn same_fan(a: &Arc<Fan>, b: &Arc<Fan>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn require_same_fan(a: &Arc<Fan>, b: &Arc<Fan>) -> Result<()> {
    if same_fan(a, b) {
        Ok(())
    } else {
        Err(Error::FanMismatch(a.name().to_string(), b.name().to_string()))
    }
}

/// Integer combination of orbit-closure classes `[V(σ)]`.
///
/// `PartialEq` compares coefficients literally; use [`classes_equal`] for
/// rational equivalence.
#[derive(Clone, Debug)]
pub struct CycleClass {
    fan: Arc<Fan>,
    coeffs: BTreeMap<Cone, BigInt>,
}

impl PartialEq for CycleClass {
    fn eq(&self, other: &Self) -> bool {
        same_fan(&self.fan, &other.fan) && self.coeffs == other.coeffs
    }
}

impl Eq for CycleClass {}

impl CycleClass {
    pub fn zero(fan: Arc<Fan>) -> Self {
        CycleClass { fan, coeffs: BTreeMap::new() }
    }

    /// `[X]`: coefficient one on the zero cone.
    pub fn fundamental_class(fan: Arc<Fan>) -> Self {
        let mut c = Self::zero(fan);
        c.add_term(Cone::zero(), BigInt::one());
        c
    }

    /// `[V(cone)]`.
    pub fn orbit_closure(fan: Arc<Fan>, cone: &Cone) -> Result<Self> {
        fan.require_cone(cone)?;
        let mut c = Self::zero(fan);
        c.add_term(cone.clone(), BigInt::one());
        Ok(c)
    }

    pub fn from_terms(fan: Arc<Fan>, terms: impl IntoIterator<Item = (Cone, BigInt)>) -> Result<Self> {
        let mut c = Self::zero(fan);
        for (cone, coeff) in terms {
            c.fan.require_cone(&cone)?;
            c.add_term(cone, coeff);
        }
        Ok(c)
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn coefficient(&self, cone: &Cone) -> BigInt {
        self.coeffs.get(cone).cloned().unwrap_or_default()
    }

    /// Nonzero terms in graded order (dimension of `V(σ)` descending).
    pub fn terms(&self) -> impl Iterator<Item = (&Cone, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub(crate) fn add_term(&mut self, cone: Cone, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        match self.coeffs.entry(cone) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn scaled(&self, factor: &BigInt) -> CycleClass {
        let mut out = Self::zero(self.fan.clone());
        for (cone, c) in &self.coeffs {
            out.add_term(cone.clone(), c * factor);
        }
        out
    }

    /// Part supported on cones of dimension `k` (classes of codimension `k`).
    pub fn graded_part(&self, k: usize) -> CycleClass {
        CycleClass {
            fan: self.fan.clone(),
            coeffs: self.coeffs.iter().filter(|(c, _)| c.dim() == k).map(|(c, v)| (c.clone(), v.clone())).collect(),
        }
    }

    /// Moves the class to a structurally equal fan.
    pub fn rebased(&self, fan: Arc<Fan>) -> Result<CycleClass> {
        require_same_fan(&self.fan, &fan)?;
        Ok(CycleClass { fan, coeffs: self.coeffs.clone() })
    }
}

impl Add<&CycleClass> for &CycleClass {
    type Output = CycleClass;
    fn add(self, rhs: &CycleClass) -> CycleClass {
        assert!(same_fan(&self.fan, &rhs.fan), "adding classes on different fans");
        let mut out = self.clone();
        for (cone, c) in &rhs.coeffs {
            out.add_term(cone.clone(), c.clone());
        }
        out
    }
}

impl Neg for &CycleClass {
    type Output = CycleClass;
    fn neg(self) -> CycleClass {
        self.scaled(&-BigInt::one())
    }
}

impl Sub<&CycleClass> for &CycleClass {
    type Output = CycleClass;
    fn sub(self, rhs: &CycleClass) -> CycleClass {
        self + &(-rhs)
    }
}

impl fmt::Display for CycleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (cone, c)) in self.coeffs.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            match (i, sign) {
                (0, "+") => {}
                (0, _) => f.write_str("-")?,
                _ => write!(f, " {sign} ")?,
            }
            let magnitude = c.abs();
            if !magnitude.is_one() {
                write!(f, "{magnitude}")?;
            }
            write!(f, "[V({cone})]")?;
        }
        Ok(())
    }
}

/// Degree of the zero-dimensional part.
pub fn degree(alpha: &CycleClass) -> Result<BigInt> {
    let fan = &alpha.fan;
    if !fan.is_complete() {
        return Err(Error::NotComplete(fan.name().to_string()));
    }
    Ok(alpha.terms().filter(|(c, _)| c.dim() == fan.dim()).map(|(_, v)| v).sum())
}

/// A lattice point `m` with `<m, u_ray> = 1` and `<m, u> = 0` for the other
/// rays of `cone`; exists because the cone is smooth.
pub fn restriction_character(fan: &Fan, cone: &Cone, ray: usize) -> Result<LatticeVector> {
    let constraints = fan.ray_matrix(cone).transpose();
    let rhs = LatticeVector::new(
        cone.rays().iter().map(|&r| if r == ray { BigInt::one() } else { BigInt::zero() }).collect(),
    );
    solve_integer(&constraints, &rhs).ok_or_else(|| Error::NotSmooth(fan.name().to_string()))
}

/// `D_ray · alpha`.
pub fn multiply_divisor(ray: usize, alpha: &CycleClass) -> Result<CycleClass> {
    let fan = alpha.fan.clone();
    multiply_divisor_with(ray, alpha, |cone| restriction_character(&fan, cone, ray))
}

/// `D_ray · alpha`, with the caller choosing the character used to move
/// `D_ray` off each cone that contains it. Any valid choice gives the same
/// class up to rational equivalence.
pub fn multiply_divisor_with(
    ray: usize,
    alpha: &CycleClass,
    mut character: impl FnMut(&Cone) -> Result<LatticeVector>,
) -> Result<CycleClass> {
    let fan = alpha.fan.clone();
    fan.require_smooth_complete()?;
    if ray >= fan.num_rays() {
        return Err(Error::RayOutOfRange { fan: fan.name().to_string(), ray });
    }
    let mut out = CycleClass::zero(fan.clone());
    for (cone, coeff) in alpha.terms() {
        if !cone.contains_ray(ray) {
            let joined = cone.with_ray(ray);
            if fan.contains_cone(&joined) {
                out.add_term(joined, coeff.clone());
            }
            continue;
        }
        let m = character(cone)?;
        let valid = m.dim() == fan.dim()
            && cone.rays().iter().all(|&r| {
                let p = m.dot(fan.ray(r));
                if r == ray { p.is_one() } else { p.is_zero() }
            });
        if !valid {
            return Err(Error::BadCharacter(cone.clone()));
        }
        // D_ray ~ -sum_{r not in cone} <m, u_r> D_r on V(cone)
        for r in (0..fan.num_rays()).filter(|r| !cone.contains_ray(*r)) {
            let pairing = m.dot(fan.ray(r));
            let joined = cone.with_ray(r);
            if !pairing.is_zero() && fan.contains_cone(&joined) {
                out.add_term(joined, -(coeff * &pairing));
            }
        }
    }
    Ok(out)
}

/// `prod (1 + D_r) · alpha` over the listed rays, expanded left to right.
pub fn multiply_divisor_polynomial(factors: &[usize], alpha: &CycleClass) -> Result<CycleClass> {
    let mut acc = alpha.clone();
    for &ray in factors {
        let product = multiply_divisor(ray, &acc)?;
        acc = &acc + &product;
    }
    Ok(acc)
}

/// Total Chern class of the tangent bundle, `prod_all (1 + D_r) ∩ [X]`.
pub fn tangent_chern_class(fan: Arc<Fan>) -> Result<CycleClass> {
    let rays: Vec<usize> = (0..fan.num_rays()).collect();
    multiply_divisor_polynomial(&rays, &CycleClass::fundamental_class(fan))
}

/// Generators of the rational-equivalence relations in codimension `grade`.
#[derive(Clone, Debug)]
pub struct RelationBasis {
    pub fan: Arc<Fan>,
    pub grade: usize,
    pub generators: Vec<CycleClass>,
}

/// For each cone `τ` of dimension `grade - 1` and each basis vector `m` of
/// `τ^⊥ ∩ M`, the relation `sum_{σ = τ + ρ} <m, u_ρ> [V(σ)]`.
pub fn relation_basis(fan: &Arc<Fan>, grade: usize) -> Result<RelationBasis> {
    fan.require_smooth_complete()?;
    let mut generators = Vec::new();
    if grade >= 1 && grade <= fan.dim() {
        for tau in fan.cones_of_dim(grade - 1) {
            let characters = kernel_basis(&fan.ray_matrix(tau).transpose());
            for j in 0..characters.cols() {
                let m = characters.column(j);
                let mut rel = CycleClass::zero(fan.clone());
                for r in (0..fan.num_rays()).filter(|r| !tau.contains_ray(*r)) {
                    let sigma = tau.with_ray(r);
                    if fan.contains_cone(&sigma) {
                        rel.add_term(sigma, m.dot(fan.ray(r)));
                    }
                }
                if !rel.is_zero() {
                    generators.push(rel);
                }
            }
        }
    }
    Ok(RelationBasis { fan: fan.clone(), grade, generators })
}

/// Hermite form of the relation lattice in one grade, in the coordinates of
/// that grade's cones.
#[derive(Clone, Debug)]
pub struct RelationLattice {
    positions: HashMap<Cone, usize>,
    hnf: HermiteForm,
}

impl RelationLattice {
    fn build(fan: &Arc<Fan>, grade: usize) -> Result<Self> {
        let cones: Vec<Cone> = fan.cones_of_dim(grade).cloned().collect();
        let positions: HashMap<Cone, usize> = cones.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let basis = relation_basis(fan, grade)?;
        let rows: Vec<Vec<BigInt>> = basis
            .generators
            .iter()
            .map(|g| {
                let mut row = vec![BigInt::zero(); cones.len()];
                for (c, v) in g.terms() {
                    row[positions[c]] = v.clone();
                }
                row
            })
            .collect();
        Ok(RelationLattice { hnf: hermite_normal_form(&rows, cones.len()), positions })
    }

    fn contains(&self, part: &CycleClass) -> bool {
        let mut v = vec![BigInt::zero(); self.positions.len()];
        for (c, x) in part.terms() {
            v[self.positions[c]] = x.clone();
        }
        self.hnf.contains(&v)
    }

    pub fn hermite_form(&self) -> &HermiteForm {
        &self.hnf
    }
}

/// The (memoized) relation lattice of `fan` in codimension `grade`.
pub fn relation_lattice(fan: &Arc<Fan>, grade: usize) -> Result<Arc<RelationLattice>> {
    fan.require_smooth_complete()?;
    assert!(grade <= fan.dim(), "grade out of range");
    if let Some(l) = fan.relation_cache[grade].get() {
        return Ok(l.clone());
    }
    let built = Arc::new(RelationLattice::build(fan, grade)?);
    Ok(fan.relation_cache[grade].get_or_init(|| built).clone())
}

/// Rational equivalence of two classes on the same smooth complete fan.
pub fn classes_equal(a: &CycleClass, b: &CycleClass) -> Result<bool> {
    require_same_fan(&a.fan, &b.fan)?;
    let fan = &a.fan;
    fan.require_smooth_complete()?;
    let diff = a - b;
    for grade in 0..=fan.dim() {
        let part = diff.graded_part(grade);
        if part.is_zero() {
            continue;
        }
        if !relation_lattice(fan, grade)?.contains(&part) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Proper push-forward of cycle classes along a toric morphism.
pub fn pushforward_cycle(m: &ToricMorphism, alpha: &CycleClass) -> Result<CycleClass> {
    require_same_fan(m.source(), &alpha.fan)?;
    if !m.source().is_complete() {
        return Err(Error::NotComplete(m.source().name().to_string()));
    }
    m.require_compatible()?;
    let mut out = CycleClass::zero(m.target().clone());
    for (cone, coeff) in alpha.terms() {
        let orbit = m.orbit_map(cone)?;
        match orbit.fiber {
            OrbitFiber::Finite(d) => out.add_term(orbit.target, coeff * d),
            OrbitFiber::PositiveDimensional => {}
            OrbitFiber::NonDominant => return Err(Error::NonInvariantImage(cone.clone())),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::star_subdivision;

    fn cone(rays: &[usize]) -> Cone {
        Cone::new(rays.iter().copied())
    }

    fn p2() -> Arc<Fan> {
        Arc::new(Fan::projective_space(2))
    }

    fn class(fan: &Arc<Fan>, terms: &[(&[usize], i64)]) -> CycleClass {
        CycleClass::from_terms(fan.clone(), terms.iter().map(|(c, v)| (cone(c), BigInt::from(*v)))).unwrap()
    }

    #[test]
    fn display_is_signed_and_graded() {
        let fan = p2();
        assert_eq!(class(&fan, &[]).to_string(), "0");
        let c = class(&fan, &[(&[0, 1], 1), (&[], -1), (&[2], 3), (&[1], -2)]);
        assert_eq!(c.to_string(), "-[V()] - 2[V(1)] + 3[V(2)] + [V(0,1)]");
    }

    #[test]
    fn fundamental_class_is_zero_cone() {
        let fan = p2();
        let f = CycleClass::fundamental_class(fan.clone());
        assert_eq!(f, class(&fan, &[(&[], 1)]));
        assert_eq!(degree(&f).unwrap(), BigInt::zero());
    }

    #[test]
    fn line_self_intersection_on_p2() {
        let fan = p2();
        let line = class(&fan, &[(&[0], 1)]);
        assert_eq!(multiply_divisor(0, &line).unwrap(), class(&fan, &[(&[0, 2], 1)]));
        let other = class(&fan, &[(&[1], 1)]);
        assert_eq!(multiply_divisor(0, &other).unwrap(), class(&fan, &[(&[0, 1], 1)]));
    }

    #[test]
    fn ruling_self_intersection_on_p1xp1() {
        let p1 = Fan::projective_space(1);
        let fan = Arc::new(p1.product(&p1));
        let ruling = class(&fan, &[(&[0], 1)]);
        let sq = multiply_divisor(0, &ruling).unwrap();
        assert!(sq.is_zero());
    }

    #[test]
    fn total_chern_class_of_p2() {
        let fan = p2();
        let c = tangent_chern_class(fan.clone()).unwrap();
        let expected = class(&fan, &[(&[], 1), (&[0], 1), (&[1], 1), (&[2], 1), (&[0, 1], 1), (&[1, 2], 1), (&[0, 2], 1)]);
        assert!(classes_equal(&c, &expected).unwrap());
        assert_eq!(degree(&c).unwrap(), BigInt::from(3));
        assert_eq!(c.graded_part(2).terms().map(|(_, v)| v.clone()).sum::<BigInt>(), BigInt::from(3));
    }

    #[test]
    fn total_chern_class_of_p1() {
        let fan = Arc::new(Fan::projective_space(1));
        let c = tangent_chern_class(fan.clone()).unwrap();
        assert_eq!(c, class(&fan, &[(&[], 1), (&[0], 1), (&[1], 1)]));
        assert_eq!(degree(&c).unwrap(), BigInt::from(2));
    }

    #[test]
    fn empty_polynomial_is_identity() {
        let fan = p2();
        let a = class(&fan, &[(&[1], 4)]);
        assert_eq!(multiply_divisor_polynomial(&[], &a).unwrap(), a);
    }

    #[test]
    fn relation_basis_examples() {
        let fan = p2();
        assert!(relation_basis(&fan, 0).unwrap().generators.is_empty());
        let rels = relation_basis(&fan, 1).unwrap();
        assert!(rels.generators.contains(&class(&fan, &[(&[0], 1), (&[2], -1)])));
        let points = relation_basis(&fan, 2).unwrap();
        assert!(!points.generators.is_empty());
    }

    #[test]
    fn equality_examples() {
        let fan = p2();
        let l0 = class(&fan, &[(&[0], 1)]);
        let l1 = class(&fan, &[(&[1], 1)]);
        assert!(classes_equal(&l0, &l1).unwrap());
        assert!(!classes_equal(&l0, &l1.scaled(&BigInt::from(2))).unwrap());
        assert!(classes_equal(&l0, &l0).unwrap());
        let p = class(&fan, &[(&[0, 1], 1)]);
        let q = class(&fan, &[(&[1, 2], 1)]);
        assert!(classes_equal(&p, &q).unwrap());
    }

    #[test]
    fn blowdown_pushforwards() {
        let fan = p2();
        let b = star_subdivision(&fan, &cone(&[0, 1])).unwrap();
        let e = CycleClass::orbit_closure(b.fan.clone(), &cone(&[b.new_ray])).unwrap();
        assert!(pushforward_cycle(&b.morphism, &e).unwrap().is_zero());
        let pt = CycleClass::orbit_closure(b.fan.clone(), &cone(&[0, b.new_ray])).unwrap();
        assert_eq!(pushforward_cycle(&b.morphism, &pt).unwrap(), class(&fan, &[(&[0, 1], 1)]));
        let whole = CycleClass::fundamental_class(b.fan.clone());
        assert_eq!(pushforward_cycle(&b.morphism, &whole).unwrap(), CycleClass::fundamental_class(fan));
    }

    #[test]
    fn identity_pushforward() {
        let fan = p2();
        let a = class(&fan, &[(&[], 2), (&[1], -1), (&[0, 2], 5)]);
        let id = ToricMorphism::identity(fan);
        assert_eq!(pushforward_cycle(&id, &a).unwrap(), a);
    }

    #[test]
    fn degree_needs_completeness() {
        let fan = Arc::new(Fan::from_i64("q", 2, &[&[1, 0], &[0, 1]], &[&[0, 1]]).unwrap());
        assert!(matches!(degree(&CycleClass::fundamental_class(fan)), Err(Error::NotComplete(_))));
        let p1 = Arc::new(Fan::projective_space(1));
        assert_eq!(degree(&class(&p1, &[(&[0], 5)])).unwrap(), BigInt::from(5));
    }

    #[test]
    fn invalid_character_is_rejected() {
        let fan = p2();
        let line = class(&fan, &[(&[0], 1)]);
        let r = multiply_divisor_with(0, &line, |_| Ok(LatticeVector::from_i64s(&[0, 1])));
        assert!(matches!(r, Err(Error::BadCharacter(_))));
    }

    #[test]
    fn non_invariant_image_is_rejected() {
        // P1 -> P2 along the diagonal direction (1,1)
        let p1 = Arc::new(Fan::projective_space(1));
        let fan = p2();
        let m = ToricMorphism::new(
            p1.clone(),
            fan,
            crate::lattice::LatticeMatrix::from_rows(&[vec![1], vec![1]], 1),
        )
        .unwrap();
        assert!(m.is_compatible());
        let r = pushforward_cycle(&m, &CycleClass::fundamental_class(p1));
        assert!(matches!(r, Err(Error::NonInvariantImage(_))));
    }
}
