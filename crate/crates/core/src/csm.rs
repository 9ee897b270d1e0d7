//! Chern-Schwartz-MacPherson classes from logarithmic local data.
//!
//! For a good closure `Ū ⊃ U` with boundary `D = Σ_{ρ∈S} D_ρ`, the local
//! datum is `c(Ω¹_Ū(log D)^∨) ∩ [Ū] = c(TŪ)/Π_{ρ∈S}(1 + D_ρ) ∩ [Ū]`. On a
//! smooth complete toric variety `c(TX) = Π_ρ (1 + D_ρ)`, so this is the
//! product over the rays outside `S`.
//!
//! The class of a constructible function is obtained by patching: each orbit
//! `O(σ)` is the open piece of the good closure `V(σ)` with its full toric
//! boundary, whose local datum is `[V(σ)]`. The `verify_*` functions check
//! the identities this construction has to satisfy and return the classes
//! on both sides.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::chow::{
    classes_equal, degree, multiply_divisor_polynomial, pushforward_cycle, require_same_fan, tangent_chern_class,
    CycleClass,
};
use crate::constructible::{euler_characteristic, pushforward_function, ConstructibleFunction};
use crate::fan::{star_quotient_fan, star_subdivision, Cone, Fan, StarQuotient, ToricMorphism};
use crate::{Error, Result};

/// A smooth complete fan with a set of boundary rays `S`; the open piece is
/// `U = X ∖ ∪_{ρ∈S} D_ρ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodClosure {
    fan: Arc<Fan>,
    boundary: BTreeSet<usize>,
}

impl GoodClosure {
    pub fn new(fan: Arc<Fan>, boundary: impl IntoIterator<Item = usize>) -> Result<Self> {
        fan.require_smooth_complete()?;
        let boundary: BTreeSet<usize> = boundary.into_iter().collect();
        if let Some(&ray) = boundary.iter().find(|&&r| r >= fan.num_rays()) {
            return Err(Error::RayOutOfRange { fan: fan.name().to_string(), ray });
        }
        Ok(GoodClosure { fan, boundary })
    }

    /// The whole variety as its own closure (`S = ∅`).
    pub fn closed(fan: Arc<Fan>) -> Result<Self> {
        Self::new(fan, [])
    }

    /// The dense torus (`S` = all rays).
    pub fn torus(fan: Arc<Fan>) -> Result<Self> {
        let n = fan.num_rays();
        Self::new(fan, 0..n)
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn boundary(&self) -> &BTreeSet<usize> {
        &self.boundary
    }

    /// Whether the orbit of `cone` lies in `U`.
    pub fn orbit_in_open(&self, cone: &Cone) -> bool {
        cone.rays().iter().all(|r| !self.boundary.contains(r))
    }

    /// `1_U`.
    pub fn indicator(&self) -> ConstructibleFunction {
        ConstructibleFunction::from_fn(self.fan.clone(), |c| {
            if self.orbit_in_open(c) { BigInt::one() } else { BigInt::zero() }
        })
    }

    /// Centers of dimension at least two, split by whether `V(center)`
    /// lies in the boundary (`Z = ∅`) or meets `U` (`Z ≠ ∅`).
    pub fn blowup_centers(&self) -> (Vec<Cone>, Vec<Cone>) {
        self.fan.cones().iter().filter(|c| c.dim() >= 2).cloned().partition(|c| !self.orbit_in_open(c))
    }
}

/// `c(Ω¹(log D)^∨) ∩ [Ū] = Π_{ρ∉S} (1 + D_ρ) ∩ [Ū]`.
pub fn local_data(gc: &GoodClosure) -> Result<CycleClass> {
    let factors: Vec<usize> = (0..gc.fan.num_rays()).filter(|r| !gc.boundary.contains(r)).collect();
    multiply_divisor_polynomial(&factors, &CycleClass::fundamental_class(gc.fan.clone()))
}

/// `w_*` for the closed embedding `V(center) ↪ parent`.
pub fn embed_into(parent: &Arc<Fan>, quotient: &StarQuotient, alpha: &CycleClass) -> Result<CycleClass> {
    require_same_fan(&quotient.fan, alpha.fan())?;
    parent.require_cone(&quotient.center)?;
    let mut out = CycleClass::zero(parent.clone());
    for (cone, c) in alpha.terms() {
        out.add_term(quotient.parent_cone(cone), c.clone());
    }
    Ok(out)
}

/// Class of `φ` by the orbit decomposition: `Σ_σ φ(O(σ)) [V(σ)]`.
pub fn csm_class(phi: &ConstructibleFunction) -> Result<CycleClass> {
    phi.fan().require_smooth()?;
    CycleClass::from_terms(phi.fan().clone(), phi.support().map(|(c, v)| (c.clone(), v.clone())))
}

/// A torus-invariant locally closed piece `V(closure) ∖ ∪_{ρ∈S} D_ρ`,
/// presented by the good closure `V(closure)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub closure: Cone,
    pub boundary: BTreeSet<usize>,
}

impl Stratum {
    pub fn orbit(cone: Cone) -> Self {
        Stratum { closure: cone, boundary: BTreeSet::new() }
    }

    /// Orbits `O(τ)` making up the stratum.
    pub fn contains_orbit(&self, cone: &Cone) -> bool {
        cone.contains(&self.closure)
            && cone.rays().iter().all(|r| self.closure.contains_ray(*r) || !self.boundary.contains(r))
    }
}

/// `w_* c_Z^W` for the stratum `Z` with good closure `W = V(closure)`;
/// zero when `Z` is empty.
pub fn stratum_class(fan: &Arc<Fan>, stratum: &Stratum) -> Result<CycleClass> {
    if stratum.closure.rays().iter().any(|r| stratum.boundary.contains(r)) {
        return Ok(CycleClass::zero(fan.clone()));
    }
    let quotient = star_quotient_fan(fan, &stratum.closure)?;
    let boundary = stratum.boundary.iter().filter_map(|&r| quotient.quotient_ray(r));
    let closure = GoodClosure::new(quotient.fan.clone(), boundary)?;
    embed_into(fan, &quotient, &local_data(&closure)?)
}

/// Class of `φ` by patching local data: every orbit `O(σ)` contributes
/// `φ(O(σ))` times the pushed-forward local datum of `O(σ) ⊂ V(σ)`.
pub fn csm_class_patched(phi: &ConstructibleFunction) -> Result<CycleClass> {
    let fan = phi.fan();
    fan.require_smooth_complete()?;
    let mut out = CycleClass::zero(fan.clone());
    for (cone, v) in phi.support() {
        let quotient = star_quotient_fan(fan, cone)?;
        let all_rays = 0..quotient.fan.num_rays();
        let orbit = GoodClosure::new(quotient.fan.clone(), all_rays)?;
        let piece = embed_into(fan, &quotient, &local_data(&orbit)?)?;
        out = &out + &piece.scaled(v);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct GluingReport {
    pub local: CycleClass,
    pub orbit_sum: CycleClass,
    pub holds: bool,
}

/// The local datum of `U ⊂ Ū` against the sum over the orbits of `U`.
pub fn verify_gluing(gc: &GoodClosure) -> Result<GluingReport> {
    let local = local_data(gc)?;
    let orbit_sum = csm_class(&gc.indicator())?;
    let holds = classes_equal(&local, &orbit_sum)?;
    Ok(GluingReport { local, orbit_sum, holds })
}

/// `ρ_* c_E^F` against `χ · c_Z^W` for the exceptional divisor over the center.
#[derive(Clone, Debug)]
pub struct ExceptionalReport {
    /// Euler characteristic of the fiber `P^{d-1}`.
    pub chi: BigInt,
    pub lhs: CycleClass,
    pub rhs: CycleClass,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct BlowupReport {
    pub center: Cone,
    /// `V(center)` lies in the boundary, so `Z = W ∩ U` is empty.
    pub z_empty: bool,
    pub lhs: CycleClass,
    pub pi_term: CycleClass,
    pub w_term: CycleClass,
    pub rhs: CycleClass,
    pub exceptional: Option<ExceptionalReport>,
    pub holds: bool,
}

/// `c_U^Ū = π_* c_{V∖E}^V̄ + w_* c_Z^W` for the blow-up along `V(center)`.
pub fn verify_blowup_formula(gc: &GoodClosure, center: &Cone) -> Result<BlowupReport> {
    let fan = &gc.fan;
    let blowup = star_subdivision(fan, center)?;
    let lhs = local_data(gc)?;

    let mut upstairs = gc.boundary.clone();
    upstairs.insert(blowup.new_ray);
    let upstairs = GoodClosure::new(blowup.fan.clone(), upstairs)?;
    let upstairs_local = local_data(&upstairs)?;
    let pi_term = pushforward_cycle(&blowup.morphism, &upstairs_local)?;

    let z_empty = !gc.orbit_in_open(center);
    let (w_term, exceptional) = if z_empty {
        (CycleClass::zero(fan.clone()), None)
    } else {
        let w = star_quotient_fan(fan, center)?;
        let w_boundary = gc.boundary.iter().filter_map(|&r| w.quotient_ray(r));
        let w_closure = GoodClosure::new(w.fan.clone(), w_boundary)?;
        let w_local = local_data(&w_closure)?;
        let term = embed_into(fan, &w, &w_local)?;
        let check = exceptional_fibration(&blowup.fan, blowup.new_ray, &upstairs, &w, &w_local, center)?;
        (term, Some(check))
    };
    let rhs = &pi_term + &w_term;
    let holds = classes_equal(&lhs, &rhs)? && exceptional.as_ref().is_none_or(|e| e.holds);
    Ok(BlowupReport { center: center.clone(), z_empty, lhs, pi_term, w_term, rhs, exceptional, holds })
}

/// The exceptional divisor `F = V(new ray)` fibers over `W = V(center)` with
/// fiber `P^{d-1}`; its local datum (boundary induced from `V̄`) must push
/// to `χ(P^{d-1}) · c_Z^W`.
fn exceptional_fibration(
    blown_up: &Arc<Fan>,
    new_ray: usize,
    upstairs: &GoodClosure,
    w: &StarQuotient,
    w_local: &CycleClass,
    center: &Cone,
) -> Result<ExceptionalReport> {
    let f = star_quotient_fan(blown_up, &Cone::new([new_ray]))?;
    let f_boundary = upstairs.boundary.iter().filter(|&&r| r != new_ray).filter_map(|&r| f.quotient_ray(r));
    let f_closure = GoodClosure::new(f.fan.clone(), f_boundary)?;
    let map = w.lattice.projection.mul(&f.lattice.lift);
    let rho = ToricMorphism::new(f.fan.clone(), w.fan.clone(), map)?;
    let lhs = pushforward_cycle(&rho, &local_data(&f_closure)?)?;
    let chi = degree(&tangent_chern_class(Arc::new(Fan::projective_space(center.dim() - 1)))?)?;
    let rhs = w_local.scaled(&chi);
    let holds = classes_equal(&lhs, &rhs)?;
    Ok(ExceptionalReport { chi, lhs, rhs, holds })
}

#[derive(Clone, Debug)]
pub struct NaturalityReport {
    /// `f_* csm(φ)`.
    pub lhs: CycleClass,
    /// `csm(f_* φ)`.
    pub rhs: CycleClass,
    pub holds: bool,
}

pub fn verify_naturality(m: &ToricMorphism, phi: &ConstructibleFunction) -> Result<NaturalityReport> {
    let lhs = pushforward_cycle(m, &csm_class(phi)?)?;
    let rhs = csm_class(&pushforward_function(m, phi)?)?;
    let holds = if m.target().is_complete() {
        classes_equal(&lhs, &rhs)?
    } else {
        lhs == rhs
    };
    Ok(NaturalityReport { lhs, rhs, holds })
}

#[derive(Clone, Debug)]
pub struct CovarianceReport {
    /// `(g ∘ f)_* φ`.
    pub composite: ConstructibleFunction,
    /// `g_* f_* φ`.
    pub two_step: ConstructibleFunction,
    pub holds: bool,
}

pub fn verify_covariance(f: &ToricMorphism, g: &ToricMorphism, phi: &ConstructibleFunction) -> Result<CovarianceReport> {
    let gf = f.then(g)?;
    let composite = pushforward_function(&gf, phi)?;
    let intermediate = pushforward_function(f, phi)?;
    let intermediate = ConstructibleFunction::from_values(
        g.source().clone(),
        intermediate.support().map(|(c, v)| (c.clone(), v.clone())),
    )?;
    let two_step = pushforward_function(g, &intermediate)?;
    let holds = composite.support().eq(two_step.support());
    Ok(CovarianceReport { composite, two_step, holds })
}

#[derive(Clone, Debug)]
pub struct InclusionExclusionReport {
    pub lhs: CycleClass,
    pub rhs: CycleClass,
    pub degree_lhs: BigInt,
    pub degree_rhs: BigInt,
    pub holds: bool,
}

/// `csm(1_{Z₁∪Z₂}) = csm(1_{Z₁}) + csm(1_{Z₂}) − csm(1_{Z₁∩Z₂})` for
/// `Z_i = V(σ_i)`; the intersection is `V(σ₁ ∪ σ₂)` when that is a cone and
/// empty otherwise.
pub fn verify_inclusion_exclusion(fan: &Arc<Fan>, first: &Cone, second: &Cone) -> Result<InclusionExclusionReport> {
    let z1 = ConstructibleFunction::indicator_of_orbit_closure(fan.clone(), first)?;
    let z2 = ConstructibleFunction::indicator_of_orbit_closure(fan.clone(), second)?;
    let joined = first.union(second);
    let meet = if fan.contains_cone(&joined) {
        ConstructibleFunction::indicator_of_orbit_closure(fan.clone(), &joined)?
    } else {
        ConstructibleFunction::zero(fan.clone())
    };
    let lhs = csm_class(&z1.max(&z2)?)?;
    let rhs = &(&csm_class(&z1)? + &csm_class(&z2)?) - &csm_class(&meet)?;
    let degree_lhs = degree(&lhs)?;
    let degree_rhs = degree(&rhs)?;
    let holds = classes_equal(&lhs, &rhs)? && degree_lhs == degree_rhs;
    Ok(InclusionExclusionReport { lhs, rhs, degree_lhs, degree_rhs, holds })
}

#[derive(Clone, Debug)]
pub struct FibrationReport {
    /// `χ(F)`, the degree of the top Chern class of the fiber.
    pub chi: BigInt,
    /// `π_* csm(1_{X×F})`.
    pub lhs: CycleClass,
    /// `χ(F) · csm(1_X)`.
    pub rhs: CycleClass,
    pub holds: bool,
}

/// Push-forward of `csm(1)` along the projection `base × fiber → base`.
pub fn verify_fibration(base: &Arc<Fan>, fiber: &Fan) -> Result<FibrationReport> {
    let total = Arc::new(base.product(fiber));
    let projection = ToricMorphism::first_projection(total.clone(), base.clone())?;
    check_fibration(&projection, &Arc::new(fiber.clone()))
}

fn check_fibration(projection: &ToricMorphism, fiber: &Arc<Fan>) -> Result<FibrationReport> {
    let chi = degree(&tangent_chern_class(fiber.clone())?)?;
    let one_total = ConstructibleFunction::constant(projection.source().clone(), BigInt::one());
    let one_base = ConstructibleFunction::constant(projection.target().clone(), BigInt::one());
    let lhs = pushforward_cycle(projection, &csm_class(&one_total)?)?;
    let rhs = csm_class(&one_base)?.scaled(&chi);
    let holds = classes_equal(&lhs, &rhs)?;
    Ok(FibrationReport { chi, lhs, rhs, holds })
}

#[derive(Clone, Debug)]
pub struct TowerReport {
    /// One report per projection `X_k → X_{k-1}`.
    pub steps: Vec<FibrationReport>,
    /// The composite `X_top → base`, whose fiber is the product of all fibers.
    pub composite: FibrationReport,
    /// `χ` of the composite equals the product of the step factors.
    pub multiplicative: bool,
    pub holds: bool,
}

/// A tower `base × F₁ × … × F_k → … → base × F₁ → base`.
pub fn verify_fibration_tower(base: &Arc<Fan>, fibers: &[Fan]) -> Result<TowerReport> {
    let mut levels = vec![base.clone()];
    for fiber in fibers {
        let top = levels.last().expect("nonempty").clone();
        levels.push(Arc::new(top.product(fiber)));
    }
    let mut steps = Vec::new();
    let mut composite_map = ToricMorphism::identity(levels[levels.len() - 1].clone());
    for k in (1..levels.len()).rev() {
        let proj = ToricMorphism::first_projection(levels[k].clone(), levels[k - 1].clone())?;
        steps.push(check_fibration(&proj, &Arc::new(fibers[k - 1].clone()))?);
        composite_map = composite_map.then(&proj)?;
    }
    steps.reverse();
    let total_fiber = fibers.iter().fold(Fan::point(), |acc, f| acc.product(f));
    let composite = check_fibration(&composite_map, &Arc::new(total_fiber))?;
    let product: BigInt = steps.iter().map(|s| &s.chi).product();
    let multiplicative = product == composite.chi;
    let holds = multiplicative && composite.holds && steps.iter().all(|s| s.holds);
    Ok(TowerReport { steps, composite, multiplicative, holds })
}

#[derive(Clone, Debug)]
pub struct OrbitClosureReport {
    /// `csm(1_{V(σ)})`.
    pub lhs: CycleClass,
    /// `w_* (c(T V(σ)) ∩ [V(σ)])`.
    pub rhs: CycleClass,
    pub holds: bool,
}

/// The class of the indicator of a (smooth, complete) orbit closure is the
/// pushed-forward total Chern class of its tangent bundle.
pub fn verify_orbit_closure_class(fan: &Arc<Fan>, sigma: &Cone) -> Result<OrbitClosureReport> {
    let lhs = csm_class(&ConstructibleFunction::indicator_of_orbit_closure(fan.clone(), sigma)?)?;
    let quotient = star_quotient_fan(fan, sigma)?;
    let rhs = embed_into(fan, &quotient, &tangent_chern_class(quotient.fan.clone())?)?;
    let holds = classes_equal(&lhs, &rhs)?;
    Ok(OrbitClosureReport { lhs, rhs, holds })
}

/// Normalization: `deg csm(1_X) = χ(X)`, with `χ(X)` counted as the
/// number of fixed points.
pub fn verify_normalization(fan: &Arc<Fan>) -> Result<(BigInt, BigInt, bool)> {
    let one = ConstructibleFunction::constant(fan.clone(), BigInt::one());
    let deg = degree(&csm_class(&one)?)?;
    let fixed_points = BigInt::from(fan.cones_of_dim(fan.dim()).count());
    let chi = euler_characteristic(&one)?;
    let holds = deg == fixed_points && chi == fixed_points;
    Ok((deg, fixed_points, holds))
}

#[derive(Clone, Debug)]
pub struct ClosureNode {
    pub name: String,
    pub closure: GoodClosure,
}

#[derive(Clone, Debug)]
pub struct BlowupEdge {
    pub source: usize,
    pub target: usize,
    pub center: Cone,
    pub morphism: ToricMorphism,
}

/// A finite diagram of good closures of one open set, linked by blow-ups
/// along centers inside the boundary.
#[derive(Clone, Debug, Default)]
pub struct ProChowDiagram {
    pub nodes: Vec<ClosureNode>,
    pub edges: Vec<BlowupEdge>,
}

impl ProChowDiagram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, name: impl Into<String>, closure: GoodClosure) -> usize {
        self.nodes.push(ClosureNode { name: name.into(), closure });
        self.nodes.len() - 1
    }

    /// Blows up node `target` along `V(center)` and links the new node to it.
    /// The center must lie in the boundary, so that the new closure presents
    /// the same open set.
    pub fn add_blowup(&mut self, target: usize, center: &Cone) -> Result<usize> {
        let node = self.nodes.get(target).ok_or_else(|| Error::InvalidDiagram(format!("no node {target}")))?;
        if node.closure.orbit_in_open(center) {
            return Err(Error::CenterMeetsOpenSet(center.clone()));
        }
        let blowup = star_subdivision(&node.closure.fan, center)?;
        let mut boundary = node.closure.boundary.clone();
        boundary.insert(blowup.new_ray);
        let closure = GoodClosure::new(blowup.fan.clone(), boundary)?;
        let name = format!("{}/Bl[{}]", node.name, center.key());
        let source = self.add_node(name, closure);
        self.edges.push(BlowupEdge { source, target, center: center.clone(), morphism: blowup.morphism });
        Ok(source)
    }

    /// Links two existing nodes, checking that `source` is the blow-up of
    /// `target` along `center` with the induced boundary.
    pub fn add_edge(&mut self, source: usize, target: usize, center: &Cone) -> Result<()> {
        let (Some(src), Some(tgt)) = (self.nodes.get(source), self.nodes.get(target)) else {
            return Err(Error::InvalidDiagram(format!("no edge {source} -> {target}")));
        };
        if tgt.closure.orbit_in_open(center) {
            return Err(Error::CenterMeetsOpenSet(center.clone()));
        }
        let blowup = star_subdivision(&tgt.closure.fan, center)?;
        if *blowup.fan != *src.closure.fan {
            return Err(Error::InvalidDiagram(format!(
                "`{}` is not the blow-up of `{}` along {{{center}}}",
                src.name, tgt.name
            )));
        }
        let mut boundary = tgt.closure.boundary.clone();
        boundary.insert(blowup.new_ray);
        if boundary != src.closure.boundary {
            return Err(Error::InvalidDiagram(format!("boundary of `{}` is not induced from `{}`", src.name, tgt.name)));
        }
        let morphism = ToricMorphism::new(src.closure.fan.clone(), tgt.closure.fan.clone(), blowup.morphism.map().clone())?;
        self.edges.push(BlowupEdge { source, target, center: center.clone(), morphism });
        Ok(())
    }
}

/// A class on every node of a closure diagram.
#[derive(Clone, Debug)]
pub struct ProChowElement {
    pub diagram: ProChowDiagram,
    pub classes: Vec<CycleClass>,
}

/// Assigns `c_U^Ū` to every node.
pub fn prochow_assign_local_data(diagram: ProChowDiagram) -> Result<ProChowElement> {
    let classes = diagram.nodes.iter().map(|n| local_data(&n.closure)).collect::<Result<_>>()?;
    Ok(ProChowElement { diagram, classes })
}

#[derive(Clone, Debug)]
pub struct EdgeCheck {
    pub source: usize,
    pub target: usize,
    pub pushed: CycleClass,
    pub target_class: CycleClass,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct ProChowReport {
    pub edges: Vec<EdgeCheck>,
    pub holds: bool,
}

/// Along every blow-up edge, the class on the source pushes to the class on
/// the target.
pub fn verify_prochow_compatibility(element: &ProChowElement) -> Result<ProChowReport> {
    if element.classes.len() != element.diagram.nodes.len() {
        return Err(Error::InvalidDiagram("one class per node required".into()));
    }
    let mut edges = Vec::new();
    for e in &element.diagram.edges {
        let source_class = element.classes[e.source].rebased(e.morphism.source().clone())?;
        let pushed = pushforward_cycle(&e.morphism, &source_class)?;
        let target_class = element.classes[e.target].rebased(e.morphism.target().clone())?;
        let holds = classes_equal(&pushed, &target_class)?;
        edges.push(EdgeCheck { source: e.source, target: e.target, pushed, target_class, holds });
    }
    let holds = edges.iter().all(|e| e.holds);
    Ok(ProChowReport { edges, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone(rays: &[usize]) -> Cone {
        Cone::new(rays.iter().copied())
    }

    fn class(fan: &Arc<Fan>, terms: &[(&[usize], i64)]) -> CycleClass {
        CycleClass::from_terms(fan.clone(), terms.iter().map(|(c, v)| (cone(c), BigInt::from(*v)))).unwrap()
    }

    fn p2() -> Arc<Fan> {
        Arc::new(Fan::projective_space(2))
    }

    #[test]
    fn local_data_of_torus_is_fundamental_class() {
        let fan = p2();
        let gc = GoodClosure::torus(fan.clone()).unwrap();
        assert_eq!(local_data(&gc).unwrap(), CycleClass::fundamental_class(fan));
    }

    #[test]
    fn local_data_of_p2_is_total_chern_class() {
        let fan = p2();
        let c = local_data(&GoodClosure::closed(fan.clone()).unwrap()).unwrap();
        let expected = class(&fan, &[(&[], 1), (&[0], 1), (&[1], 1), (&[2], 1), (&[0, 1], 3)]);
        assert!(classes_equal(&c, &expected).unwrap());
    }

    #[test]
    fn local_data_of_affine_plane() {
        let fan = p2();
        let c = local_data(&GoodClosure::new(fan.clone(), [2]).unwrap()).unwrap();
        assert_eq!(c, class(&fan, &[(&[], 1), (&[0], 1), (&[1], 1), (&[0, 1], 1)]));
        assert_eq!(degree(&c).unwrap(), BigInt::one());
    }

    #[test]
    fn csm_examples() {
        let fan = p2();
        let one = ConstructibleFunction::constant(fan.clone(), BigInt::one());
        let c = csm_class(&one).unwrap();
        assert_eq!(c.terms().count(), 7);
        assert_eq!(degree(&c).unwrap(), BigInt::from(3));

        let line = ConstructibleFunction::indicator_of_orbit_closure(fan.clone(), &cone(&[0])).unwrap();
        let c = csm_class(&line).unwrap();
        assert_eq!(c, class(&fan, &[(&[0], 1), (&[0, 1], 1), (&[0, 2], 1)]));
        assert_eq!(degree(&c).unwrap(), BigInt::from(2));

        assert!(csm_class(&ConstructibleFunction::zero(fan)).unwrap().is_zero());
    }

    #[test]
    fn patched_class_matches_orbit_sum() {
        let fan = Arc::new(Fan::hirzebruch(1));
        let phi = ConstructibleFunction::from_fn(fan.clone(), |c| BigInt::from(c.rays().iter().sum::<usize>() as i64 - 2));
        let patched = csm_class_patched(&phi).unwrap();
        assert!(classes_equal(&patched, &csm_class(&phi).unwrap()).unwrap());
    }

    #[test]
    fn gluing_examples() {
        let fan = p2();
        for s in [vec![2], vec![], vec![0, 1, 2]] {
            let report = verify_gluing(&GoodClosure::new(fan.clone(), s).unwrap()).unwrap();
            assert!(report.holds);
        }
    }

    #[test]
    fn stratum_pieces_add_up() {
        // V(0) ⊂ P2 minus D_1 is an affine line; add back its missing point
        let fan = p2();
        let line = Stratum { closure: cone(&[0]), boundary: BTreeSet::from([1]) };
        let point = Stratum::orbit(cone(&[0, 1]));
        let total = &stratum_class(&fan, &line).unwrap() + &stratum_class(&fan, &point).unwrap();
        let whole = csm_class(&ConstructibleFunction::indicator_of_orbit_closure(fan.clone(), &cone(&[0])).unwrap()).unwrap();
        assert!(classes_equal(&total, &whole).unwrap());
        assert!(line.contains_orbit(&cone(&[0, 2])) && !line.contains_orbit(&cone(&[0, 1])));
        let empty = Stratum { closure: cone(&[1]), boundary: BTreeSet::from([1]) };
        assert!(stratum_class(&fan, &empty).unwrap().is_zero());
    }

    #[test]
    fn blowup_formula_on_p2() {
        let fan = p2();
        let gc = GoodClosure::new(fan.clone(), [2]).unwrap();
        let inside = verify_blowup_formula(&gc, &cone(&[0, 1])).unwrap();
        assert!(inside.holds);
        assert!(!inside.z_empty);
        assert_eq!(inside.w_term, class(&fan, &[(&[0, 1], 1)]));
        let on_boundary = verify_blowup_formula(&gc, &cone(&[1, 2])).unwrap();
        assert!(on_boundary.holds);
        assert!(on_boundary.z_empty);
        assert!(on_boundary.w_term.is_zero());
    }

    #[test]
    fn blowup_formula_on_p3_along_a_line() {
        let fan = Arc::new(Fan::projective_space(3));
        let gc = GoodClosure::new(fan, [3]).unwrap();
        let report = verify_blowup_formula(&gc, &cone(&[0, 1])).unwrap();
        assert!(report.holds);
        let exc = report.exceptional.unwrap();
        assert_eq!(exc.chi, BigInt::from(2));
        assert!(exc.holds);
    }

    #[test]
    fn naturality_examples() {
        let fan = p2();
        let b = star_subdivision(&fan, &cone(&[0, 1])).unwrap();
        let one = ConstructibleFunction::constant(b.fan.clone(), BigInt::one());
        let r = verify_naturality(&b.morphism, &one).unwrap();
        assert!(r.holds);
        assert_eq!(degree(&r.lhs).unwrap(), BigInt::from(4));
        assert_eq!(degree(&r.rhs).unwrap(), BigInt::from(4));

        let p1 = Arc::new(Fan::projective_space(1));
        let pp = Arc::new(p1.product(&p1));
        let proj = ToricMorphism::first_projection(pp.clone(), p1.clone()).unwrap();
        let r = verify_naturality(&proj, &ConstructibleFunction::constant(pp, BigInt::one())).unwrap();
        assert!(r.holds);
        let twice = csm_class(&ConstructibleFunction::constant(p1, BigInt::one())).unwrap().scaled(&BigInt::from(2));
        assert!(classes_equal(&r.lhs, &twice).unwrap());
    }

    #[test]
    fn covariance_examples() {
        let fan = p2();
        let b = star_subdivision(&fan, &cone(&[0, 1])).unwrap();
        let to_pt = ToricMorphism::to_point(fan);
        let one = ConstructibleFunction::constant(b.fan.clone(), BigInt::one());
        let r = verify_covariance(&b.morphism, &to_pt, &one).unwrap();
        assert!(r.holds);
        assert_eq!(r.composite.value(&Cone::zero()), BigInt::from(4));

        let p1 = Arc::new(Fan::projective_space(1));
        let pp = Arc::new(p1.product(&p1));
        let proj = ToricMorphism::first_projection(pp.clone(), p1.clone()).unwrap();
        // a fiber of the projection: V(ray 0) = {0} x P1
        let fiber = ConstructibleFunction::indicator_of_orbit_closure(pp, &cone(&[0])).unwrap();
        let r = verify_covariance(&proj, &ToricMorphism::to_point(p1), &fiber).unwrap();
        assert!(r.holds);
        assert_eq!(r.composite.value(&Cone::zero()), BigInt::from(2));
    }

    #[test]
    fn fibration_examples() {
        let p1 = Fan::projective_space(1);
        let p2 = Arc::new(Fan::projective_space(2));
        let r = verify_fibration(&p2, &p1).unwrap();
        assert!(r.holds);
        assert_eq!(r.chi, BigInt::from(2));

        let tower = verify_fibration_tower(&Arc::new(p1.clone()), &[p1.clone(), p1.clone()]).unwrap();
        assert!(tower.holds);
        let factors: Vec<BigInt> = tower.steps.iter().map(|s| s.chi.clone()).collect();
        assert_eq!(factors, vec![BigInt::from(2), BigInt::from(2)]);
        assert_eq!(tower.composite.chi, BigInt::from(4));

        let r = verify_fibration(&p2, &Fan::point()).unwrap();
        assert!(r.holds);
        assert_eq!(r.chi, BigInt::one());
    }

    #[test]
    fn inclusion_exclusion_examples() {
        let fan = p2();
        let r = verify_inclusion_exclusion(&fan, &cone(&[0]), &cone(&[1])).unwrap();
        assert!(r.holds);
        assert_eq!(r.degree_lhs, BigInt::from(3));
        assert!(verify_inclusion_exclusion(&fan, &cone(&[2]), &cone(&[2])).unwrap().holds);
        let r = verify_inclusion_exclusion(&fan, &cone(&[0, 1]), &cone(&[1, 2])).unwrap();
        assert!(r.holds);
        assert_eq!(r.degree_lhs, BigInt::from(2));
    }

    #[test]
    fn orbit_closure_class_is_tangent_class() {
        let fan = Arc::new(Fan::projective_space(3));
        for sigma in fan.cones().to_vec() {
            assert!(verify_orbit_closure_class(&fan, &sigma).unwrap().holds, "{sigma}");
        }
    }

    #[test]
    fn prochow_torus_diagram() {
        let fan = p2();
        let mut diagram = ProChowDiagram::new();
        let root = diagram.add_node("P2", GoodClosure::torus(fan.clone()).unwrap());
        let up = diagram.add_blowup(root, &cone(&[0, 1])).unwrap();
        let element = prochow_assign_local_data(diagram).unwrap();
        assert_eq!(element.classes[root], CycleClass::fundamental_class(fan));
        assert_eq!(element.classes[up], CycleClass::fundamental_class(element.diagram.nodes[up].closure.fan().clone()));
        assert!(verify_prochow_compatibility(&element).unwrap().holds);
    }

    #[test]
    fn prochow_affine_plane_diagram_and_corruption() {
        let fan = p2();
        let mut diagram = ProChowDiagram::new();
        let root = diagram.add_node("A2", GoodClosure::new(fan.clone(), [2]).unwrap());
        assert!(matches!(diagram.add_blowup(root, &cone(&[0, 1])), Err(Error::CenterMeetsOpenSet(_))));
        let up = diagram.add_blowup(root, &cone(&[1, 2])).unwrap();
        let mut element = prochow_assign_local_data(diagram).unwrap();
        assert!(verify_prochow_compatibility(&element).unwrap().holds);

        let fan_up = element.classes[up].fan().clone();
        let extra = CycleClass::orbit_closure(fan_up.clone(), &fan_up.max_cones()[0]).unwrap();
        element.classes[up] = &element.classes[up] + &extra;
        assert!(!verify_prochow_compatibility(&element).unwrap().holds);
    }

    #[test]
    fn prochow_single_node() {
        let mut diagram = ProChowDiagram::new();
        diagram.add_node("P2", GoodClosure::closed(p2()).unwrap());
        let element = prochow_assign_local_data(diagram).unwrap();
        assert_eq!(element.classes.len(), 1);
        assert!(verify_prochow_compatibility(&element).unwrap().holds);
    }

    #[test]
    fn explicit_edges_are_checked() {
        let fan = p2();
        let mut diagram = ProChowDiagram::new();
        let root = diagram.add_node("U", GoodClosure::new(fan.clone(), [0]).unwrap());
        let b = star_subdivision(&fan, &cone(&[0, 1])).unwrap();
        let good = diagram.add_node("Bl", GoodClosure::new(b.fan.clone(), [0, b.new_ray]).unwrap());
        let bad = diagram.add_node("Bl'", GoodClosure::new(b.fan.clone(), [0]).unwrap());
        diagram.add_edge(good, root, &cone(&[0, 1])).unwrap();
        assert!(matches!(diagram.add_edge(bad, root, &cone(&[0, 1])), Err(Error::InvalidDiagram(_))));
        assert!(matches!(diagram.add_edge(good, root, &cone(&[0, 2])), Err(Error::InvalidDiagram(_))));
    }
}
