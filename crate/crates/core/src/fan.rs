//! Simplicial rational polyhedral fans, star subdivisions, star quotients and
//! toric morphisms.
//!
//! A cone is stored as the sorted set of indices of its rays. Only smooth
//! fans are accepted by the intersection-theoretic code; [`validate`] reports
//! everything that keeps a fan from being smooth and complete.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::chow::RelationLattice;
use crate::lattice::{
    cokernel_index, kernel_basis, smith_normal_form, solve_integer, LatticeIndex, LatticeMatrix,
    LatticeVector, QuotientLattice,
};
use crate::{Error, Result};

/// A cone, as the sorted set of its ray indices.
///
/// Cones order by dimension first and then lexicographically, so maps keyed
/// by cones iterate in graded order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Cone(Vec<usize>);

impl Cone {
    pub fn new(rays: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = rays.into_iter().collect();
        Cone(set.into_iter().collect())
    }

    pub fn zero() -> Self {
        Cone(Vec::new())
    }

    pub fn rays(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn contains_ray(&self, ray: usize) -> bool {
        self.0.binary_search(&ray).is_ok()
    }

    /// Whether `face` is a face of `self` (as ray sets).
    pub fn contains(&self, face: &Cone) -> bool {
        face.0.iter().all(|r| self.contains_ray(*r))
    }

    pub fn union(&self, other: &Cone) -> Cone {
        Cone::new(self.0.iter().chain(&other.0).copied())
    }

    pub fn intersection(&self, other: &Cone) -> Cone {
        Cone(self.0.iter().copied().filter(|r| other.contains_ray(*r)).collect())
    }

    pub fn with_ray(&self, ray: usize) -> Cone {
        Cone::new(self.0.iter().copied().chain(std::iter::once(ray)))
    }

    pub fn without_ray(&self, ray: usize) -> Cone {
        Cone(self.0.iter().copied().filter(|&r| r != ray).collect())
    }

    /// Comma-joined ray indices, `""` for the zero cone.
    pub fn key(&self) -> String {
        self.0.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
    }

    pub fn parse_key(key: &str) -> Option<Cone> {
        let key = key.trim();
        if key.is_empty() {
            return Some(Cone::zero());
        }
        let rays: Vec<usize> = key.split(',').map(|s| s.trim().parse().ok()).collect::<Option<_>>()?;
        let cone = Cone::new(rays.iter().copied());
        (cone.dim() == rays.len()).then_some(cone)
    }

    /// All faces, including the zero cone and the cone itself.
    pub fn faces(&self) -> impl Iterator<Item = Cone> + '_ {
        let k = self.0.len();
        (0u64..1 << k).map(move |mask| {
            Cone((0..k).filter(|i| mask & (1 << i) != 0).map(|i| self.0[i]).collect())
        })
    }
}

impl PartialOrd for Cone {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cone {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Something that keeps a fan from being a valid smooth fan, or from being
/// complete.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FanIssue {
    ZeroRay { ray: usize },
    NonPrimitiveRay { ray: usize, content: BigInt },
    DuplicateRay { ray: usize, other: usize },
    MissingZeroCone,
    MissingFace { cone: Cone, face: Cone },
    NotSimplicial { cone: Cone },
    NotSmooth { cone: Cone, index: BigInt },
    /// Two maximal cones sharing a facet lie on the same side of it.
    Overlap { facet: Cone, cones: (Cone, Cone) },
    NotPure { cone: Cone },
    FacetNeighbors { facet: Cone, count: usize },
    Disconnected,
    CoveringDegree { degree: usize },
}

impl fmt::Display for FanIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FanIssue::ZeroRay { ray } => write!(f, "ray {ray} is zero"),
            FanIssue::NonPrimitiveRay { ray, content } => {
                write!(f, "ray {ray} is not primitive (gcd {content})")
            }
            FanIssue::DuplicateRay { ray, other } => write!(f, "ray {ray} duplicates ray {other}"),
            FanIssue::MissingZeroCone => write!(f, "zero cone missing"),
            FanIssue::MissingFace { cone, face } => {
                write!(f, "cone {{{cone}}} is present but its face {{{face}}} is not")
            }
            FanIssue::NotSimplicial { cone } => {
                write!(f, "cone {{{cone}}} has linearly dependent rays")
            }
            FanIssue::NotSmooth { cone, index } => {
                write!(f, "cone {{{cone}}} is not smooth (index {index})")
            }
            FanIssue::Overlap { facet, cones } => write!(
                f,
                "cones {{{}}} and {{{}}} overlap across facet {{{facet}}}",
                cones.0, cones.1
            ),
            FanIssue::NotPure { cone } => write!(f, "maximal cone {{{cone}}} is not full-dimensional"),
            FanIssue::FacetNeighbors { facet, count } => {
                write!(f, "facet {{{facet}}} lies in {count} maximal cones instead of 2")
            }
            FanIssue::Disconnected => write!(f, "maximal cones are not connected through facets"),
            FanIssue::CoveringDegree { degree } => {
                write!(f, "a generic point lies in {degree} maximal cones instead of 1")
            }
        }
    }
}

/// Result of [`validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// Violations of the fan and smoothness invariants.
    pub issues: Vec<FanIssue>,
    /// Reasons the fan is not complete; only evaluated for valid fans.
    pub incomplete: Vec<FanIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn is_smooth(&self) -> bool {
        self.is_valid()
    }

    pub fn is_complete(&self) -> bool {
        self.is_valid() && self.incomplete.is_empty()
    }
}

/// A simplicial fan in `Z^dim`.
#[derive(Clone)]
pub struct Fan {
    name: String,
    dim: usize,
    rays: Vec<LatticeVector>,
    cones: Vec<Cone>,
    index: HashMap<Cone, usize>,
    report: ValidationReport,
    pub(crate) relation_cache: Vec<OnceLock<Arc<RelationLattice>>>,
}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fan")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("rays", &self.rays)
            .field("cones", &self.cones)
            .finish()
    }
}

impl PartialEq for Fan {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rays == other.rays && self.cones == other.cones
    }
}

impl Eq for Fan {}

impl Fan {
    /// Builds the fan generated by `max_cones` (all faces are added).
    pub fn from_max_cones(
        name: impl Into<String>,
        dim: usize,
        rays: Vec<LatticeVector>,
        max_cones: &[Cone],
    ) -> Result<Fan> {
        let mut cones = BTreeSet::new();
        for c in max_cones {
            if c.dim() > 20 {
                return Err(Error::MalformedFan {
                    fan: name.into(),
                    reason: format!("cone {{{c}}} has too many rays"),
                });
            }
            cones.extend(c.faces());
        }
        cones.insert(Cone::zero());
        Self::from_cones(name, dim, rays, cones.into_iter().collect())
    }

    /// Convenience constructor from small integer data.
    pub fn from_i64(name: &str, dim: usize, rays: &[&[i64]], max_cones: &[&[usize]]) -> Result<Fan> {
        let rays = rays.iter().map(|r| LatticeVector::from_i64s(r)).collect();
        let cones: Vec<Cone> = max_cones.iter().map(|c| Cone::new(c.iter().copied())).collect();
        Self::from_max_cones(name, dim, rays, &cones)
    }

    /// Builds a fan from an explicit cone list, without adding faces.
    ///
    /// Only structural errors (wrong ray dimensions, bad indices) are
    /// rejected; everything else ends up in [`Fan::report`].
    pub fn from_cones(
        name: impl Into<String>,
        dim: usize,
        rays: Vec<LatticeVector>,
        cones: Vec<Cone>,
    ) -> Result<Fan> {
        let name = name.into();
        if let Some((i, _)) = rays.iter().enumerate().find(|(_, r)| r.dim() != dim) {
            return Err(Error::MalformedFan {
                fan: name,
                reason: format!("ray {i} does not have dimension {dim}"),
            });
        }
        let mut cones: Vec<Cone> = cones.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        cones.sort();
        if let Some(&ray) = cones.iter().flat_map(|c| c.rays()).find(|&&r| r >= rays.len()) {
            return Err(Error::RayOutOfRange { fan: name, ray });
        }
        let index = cones.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let mut fan = Fan {
            name,
            dim,
            rays,
            cones,
            index,
            report: ValidationReport::default(),
            relation_cache: Vec::new(),
        };
        fan.report = compute_report(&fan);
        fan.relation_cache = (0..=dim).map(|_| OnceLock::new()).collect();
        Ok(fan)
    }

    /// The fan of a point.
    pub fn point() -> Fan {
        Fan::from_max_cones("pt", 0, Vec::new(), &[Cone::zero()]).expect("point fan")
    }

    /// Fan of projective space `P^n` (rays `e_1..e_n`, `-(e_1+..+e_n)`).
    pub fn projective_space(n: usize) -> Fan {
        let mut rays: Vec<LatticeVector> = (0..n)
            .map(|i| LatticeVector::from_i64s(&(0..n).map(|j| i64::from(i == j)).collect::<Vec<_>>()))
            .collect();
        rays.push(LatticeVector::from_i64s(&vec![-1; n]));
        let max: Vec<Cone> = (0..=n).map(|skip| Cone::new((0..=n).filter(|&r| r != skip))).collect();
        Fan::from_max_cones(format!("P{n}"), n, rays, &max).expect("projective space fan")
    }

    /// Hirzebruch surface `F_a`: rays `(1,0),(0,1),(-1,a),(0,-1)`.
    pub fn hirzebruch(a: i64) -> Fan {
        Fan::from_i64(
            &format!("F{a}"),
            2,
            &[&[1, 0], &[0, 1], &[-1, a], &[0, -1]],
            &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]],
        )
        .expect("Hirzebruch fan")
    }

    /// Product fan; rays of `self` come first, then those of `other`.
    pub fn product(&self, other: &Fan) -> Fan {
        let dim = self.dim + other.dim;
        let mut rays = Vec::with_capacity(self.rays.len() + other.rays.len());
        for r in &self.rays {
            let mut e = r.entries().to_vec();
            e.resize(dim, BigInt::zero());
            rays.push(LatticeVector::new(e));
        }
        for r in &other.rays {
            let mut e = vec![BigInt::zero(); self.dim];
            e.extend(r.entries().iter().cloned());
            rays.push(LatticeVector::new(e));
        }
        let off = self.rays.len();
        let mut cones = Vec::new();
        for a in &self.cones {
            for b in &other.cones {
                cones.push(Cone::new(a.rays().iter().copied().chain(b.rays().iter().map(|r| r + off))));
            }
        }
        Fan::from_cones(format!("{}x{}", self.name, other.name), dim, rays, cones)
            .expect("product of valid fans")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Fan {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[LatticeVector] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &LatticeVector {
        &self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    /// All cones in graded order.
    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    pub fn cones_of_dim(&self, k: usize) -> impl Iterator<Item = &Cone> {
        self.cones.iter().filter(move |c| c.dim() == k)
    }

    pub fn contains_cone(&self, cone: &Cone) -> bool {
        self.index.contains_key(cone)
    }

    pub fn cone_index(&self, cone: &Cone) -> Option<usize> {
        self.index.get(cone).copied()
    }

    pub fn require_cone(&self, cone: &Cone) -> Result<()> {
        if self.contains_cone(cone) {
            Ok(())
        } else {
            Err(Error::NotACone { fan: self.name.clone(), cone: cone.clone() })
        }
    }

    /// Cones that are not proper faces of another cone.
    pub fn max_cones(&self) -> Vec<Cone> {
        self.cones
            .iter()
            .filter(|c| {
                (0..self.rays.len())
                    .filter(|r| !c.contains_ray(*r))
                    .all(|r| !self.contains_cone(&c.with_ray(r)))
            })
            .cloned()
            .collect()
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn is_smooth(&self) -> bool {
        self.report.is_smooth()
    }

    pub fn is_complete(&self) -> bool {
        self.report.is_complete()
    }

    pub fn require_smooth(&self) -> Result<()> {
        if self.is_smooth() {
            Ok(())
        } else {
            Err(Error::NotSmooth(self.name.clone()))
        }
    }

    pub fn require_smooth_complete(&self) -> Result<()> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(Error::NotSmoothComplete(self.name.clone()))
        }
    }

    /// `dim x k` matrix whose columns are the ray generators of `cone`.
    pub fn ray_matrix(&self, cone: &Cone) -> LatticeMatrix {
        let cols: Vec<&LatticeVector> = cone.rays().iter().map(|&r| &self.rays[r]).collect();
        LatticeMatrix::from_columns(self.dim, &cols)
    }

    /// Coordinates of `v` in the ray basis of `cone`, if `v` lies in the
    /// lattice spanned by those rays.
    pub fn cone_coordinates(&self, cone: &Cone, v: &LatticeVector) -> Option<LatticeVector> {
        solve_integer(&self.ray_matrix(cone), v)
    }

    /// The quotient lattice `N / N_cone`.
    pub fn quotient_lattice(&self, cone: &Cone) -> QuotientLattice {
        QuotientLattice::of_span(&self.ray_matrix(cone))
    }

    /// Dimension of the orbit `O(cone)`.
    pub fn orbit_dimension(&self, cone: &Cone) -> Result<usize> {
        self.require_cone(cone)?;
        Ok(self.dim - cone.dim())
    }

    /// The unique cone whose relative interior contains `v`.
    pub fn smallest_containing_cone(&self, v: &LatticeVector) -> Result<Cone> {
        assert_eq!(v.dim(), self.dim, "point has wrong dimension");
        if v.is_zero() {
            return Ok(Cone::zero());
        }
        for cone in self.cones.iter().filter(|c| c.dim() > 0) {
            if let Some(x) = self.cone_coordinates(cone, v) {
                if x.entries().iter().all(Signed::is_positive) {
                    return Ok(cone.clone());
                }
            }
        }
        Err(Error::OutsideSupport { fan: self.name.clone(), point: v.to_string() })
    }

    /// Whether `v` lies in the (closed) cone.
    pub fn cone_contains_point(&self, cone: &Cone, v: &LatticeVector) -> bool {
        self.cone_coordinates(cone, v)
            .is_some_and(|x| x.entries().iter().all(|c| !c.is_negative()))
    }

    /// Partition of the cones by whether their orbit lies in the open set
    /// `U = X minus the divisors of the rays in boundary`.
    pub fn boundary_divisor_cones(&self, boundary: &BTreeSet<usize>) -> BoundaryPartition {
        let (inside_open, inside_boundary) = self
            .cones
            .iter()
            .cloned()
            .partition(|c| c.rays().iter().all(|r| !boundary.contains(r)));
        BoundaryPartition { inside_open, inside_boundary }
    }
}

/// Output of [`Fan::boundary_divisor_cones`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryPartition {
    pub inside_open: Vec<Cone>,
    pub inside_boundary: Vec<Cone>,
}

/// Validation report for `fan`.
pub fn validate(fan: &Fan) -> ValidationReport {
    fan.report.clone()
}

fn compute_report(fan: &Fan) -> ValidationReport {
    let mut issues = Vec::new();
    for (i, r) in fan.rays.iter().enumerate() {
        let content = r.content();
        if content.is_zero() {
            issues.push(FanIssue::ZeroRay { ray: i });
        } else if !content.is_one() {
            issues.push(FanIssue::NonPrimitiveRay { ray: i, content });
        }
        if let Some(j) = fan.rays[..i].iter().position(|s| s == r) {
            issues.push(FanIssue::DuplicateRay { ray: i, other: j });
        }
    }
    if !fan.contains_cone(&Cone::zero()) {
        issues.push(FanIssue::MissingZeroCone);
    }
    for cone in &fan.cones {
        for r in cone.rays() {
            let face = cone.without_ray(*r);
            if !fan.contains_cone(&face) {
                issues.push(FanIssue::MissingFace { cone: cone.clone(), face });
            }
        }
    }
    for cone in fan.cones.iter().filter(|c| c.dim() > 0) {
        let snf = smith_normal_form(&fan.ray_matrix(cone));
        if snf.rank() < cone.dim() {
            issues.push(FanIssue::NotSimplicial { cone: cone.clone() });
        } else {
            let index: BigInt = snf.diag.iter().product();
            if !index.is_one() {
                issues.push(FanIssue::NotSmooth { cone: cone.clone(), index });
            }
        }
    }
    if !issues.is_empty() {
        return ValidationReport { issues, incomplete: Vec::new() };
    }

    let n = fan.dim;
    let max = fan.max_cones();
    let full: Vec<&Cone> = max.iter().filter(|c| c.dim() == n).collect();

    // full-dimensional neighbours must sit on opposite sides of their common facet
    let mut neighbours: HashMap<Cone, Vec<usize>> = HashMap::new();
    for (i, c) in full.iter().enumerate() {
        for r in c.rays() {
            neighbours.entry(c.without_ray(*r)).or_default().push(i);
        }
    }
    for (facet, owners) in &neighbours {
        if owners.len() != 2 {
            continue;
        }
        let normal = kernel_basis(&fan.ray_matrix(facet).transpose()).column(0);
        let side = |c: &Cone| {
            let extra = c.rays().iter().find(|r| !facet.contains_ray(**r)).expect("facet is proper");
            normal.dot(&fan.rays[*extra])
        };
        let (a, b) = (full[owners[0]], full[owners[1]]);
        if side(a).sign() == side(b).sign() {
            issues.push(FanIssue::Overlap { facet: facet.clone(), cones: (a.clone(), b.clone()) });
        }
    }
    if !issues.is_empty() {
        return ValidationReport { issues, incomplete: Vec::new() };
    }

    let mut incomplete = Vec::new();
    for c in max.iter().filter(|c| c.dim() != n) {
        incomplete.push(FanIssue::NotPure { cone: c.clone() });
    }
    if !incomplete.is_empty() {
        return ValidationReport { issues, incomplete };
    }
    for facet in fan.cones_of_dim(n.saturating_sub(1)).filter(|_| n > 0) {
        let count = neighbours.get(facet).map_or(0, Vec::len);
        if count != 2 {
            incomplete.push(FanIssue::FacetNeighbors { facet: facet.clone(), count });
        }
    }
    if !full.is_empty() {
        let mut seen = vec![false; full.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for r in full[i].rays() {
                for &j in &neighbours[&full[i].without_ray(*r)] {
                    if !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            incomplete.push(FanIssue::Disconnected);
        }
    }
    if incomplete.is_empty() {
        let degree = covering_degree(fan, &full);
        if degree != 1 {
            incomplete.push(FanIssue::CoveringDegree { degree });
        }
    }
    ValidationReport { issues, incomplete }
}

/// Number of full-dimensional cones containing a generic point in their
/// interior. The point `(1, t, t^2, ...)` is generic once no coordinate in
/// any cone basis vanishes, which fails for finitely many `t` only.
fn covering_degree(fan: &Fan, full: &[&Cone]) -> usize {
    let n = fan.dim;
    'search: for t in 2i64.. {
        let point = LatticeVector::new((0..n).map(|i| BigInt::from(t).pow(i as u32)).collect());
        let mut count = 0;
        for cone in full {
            let x = fan.cone_coordinates(cone, &point).expect("smooth full-dimensional cone");
            if x.entries().iter().any(Zero::is_zero) {
                continue 'search;
            }
            if x.entries().iter().all(Signed::is_positive) {
                count += 1;
            }
        }
        return count;
    }
    unreachable!()
}

/// Morphism of fans given by a lattice map `source.dim -> target.dim`.
#[derive(Clone, Debug)]
pub struct ToricMorphism {
    source: Arc<Fan>,
    target: Arc<Fan>,
    map: LatticeMatrix,
}

/// How the orbit of a source cone maps to the orbit of its image cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitFiber {
    /// Surjective with finite fibers of the given cardinality.
    Finite(BigInt),
    /// Fibers are tori of positive dimension.
    PositiveDimensional,
    /// Finite fibers over a proper subtorus of the target orbit.
    NonDominant,
}

/// The map `O(source cone) -> O(target cone)` induced on orbits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitMap {
    pub target: Cone,
    pub source_dim: usize,
    pub target_dim: usize,
    pub fiber: OrbitFiber,
}

impl ToricMorphism {
    pub fn new(source: Arc<Fan>, target: Arc<Fan>, map: LatticeMatrix) -> Result<Self> {
        if map.rows() != target.dim() || map.cols() != source.dim() {
            return Err(Error::ShapeMismatch {
                rows: map.rows(),
                cols: map.cols(),
                expected_rows: target.dim(),
                expected_cols: source.dim(),
            });
        }
        Ok(ToricMorphism { source, target, map })
    }

    pub fn identity(fan: Arc<Fan>) -> Self {
        let n = fan.dim();
        ToricMorphism { source: fan.clone(), target: fan, map: LatticeMatrix::identity(n) }
    }

    /// The structure map to a point.
    pub fn to_point(fan: Arc<Fan>) -> Self {
        let n = fan.dim();
        ToricMorphism { source: fan, target: Arc::new(Fan::point()), map: LatticeMatrix::zeros(0, n) }
    }

    /// Projection of a product fan `a x b` onto its first factor.
    pub fn first_projection(product: Arc<Fan>, a: Arc<Fan>) -> Result<Self> {
        let mut m = LatticeMatrix::zeros(a.dim(), product.dim());
        for i in 0..a.dim() {
            m[(i, i)] = BigInt::one();
        }
        Self::new(product, a, m)
    }

    pub fn source(&self) -> &Arc<Fan> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Fan> {
        &self.target
    }

    pub fn map(&self) -> &LatticeMatrix {
        &self.map
    }

    pub fn label(&self) -> String {
        format!("{}->{}", self.source.name(), self.target.name())
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &ToricMorphism) -> Result<ToricMorphism> {
        if *self.target != *then.source {
            return Err(Error::NotComposable(
                self.target.name().to_string(),
                then.source.name().to_string(),
            ));
        }
        Ok(ToricMorphism {
            source: self.source.clone(),
            target: then.target.clone(),
            map: then.map.mul(&self.map),
        })
    }

    /// Sum of the images of the ray generators of `cone`: a relative-interior
    /// point of the image cone.
    pub fn image_point(&self, cone: &Cone) -> LatticeVector {
        cone.rays()
            .iter()
            .map(|&r| self.map.apply(self.source.ray(r)))
            .fold(LatticeVector::zero(self.target.dim()), |acc, v| acc.add(&v))
    }

    /// Smallest target cone containing the image of `cone`.
    pub fn image_cone(&self, cone: &Cone) -> Result<Cone> {
        self.target.smallest_containing_cone(&self.image_point(cone))
    }

    /// Whether every source cone maps into some target cone.
    pub fn is_compatible(&self) -> bool {
        self.source.cones().iter().all(|cone| match self.image_cone(cone) {
            Ok(tau) => cone
                .rays()
                .iter()
                .all(|&r| self.target.cone_contains_point(&tau, &self.map.apply(self.source.ray(r)))),
            Err(_) => false,
        })
    }

    pub fn require_compatible(&self) -> Result<()> {
        if self.is_compatible() {
            Ok(())
        } else {
            Err(Error::IncompatibleMorphism(self.label()))
        }
    }

    /// The induced map of orbits for a source cone.
    pub fn orbit_map(&self, cone: &Cone) -> Result<OrbitMap> {
        self.source.require_cone(cone)?;
        let target = self.image_cone(cone)?;
        let source_q = self.source.quotient_lattice(cone);
        let target_q = self.target.quotient_lattice(&target);
        let induced = target_q.projection.mul(&self.map).mul(&source_q.lift);
        let source_dim = source_q.dim();
        let target_dim = target_q.dim();
        let rank = smith_normal_form(&induced).rank();
        let fiber = if rank < source_dim {
            OrbitFiber::PositiveDimensional
        } else if source_dim < target_dim {
            OrbitFiber::NonDominant
        } else {
            match cokernel_index(&induced) {
                LatticeIndex::Finite(d) => OrbitFiber::Finite(d),
                LatticeIndex::Infinite => unreachable!("square full-rank map has finite cokernel"),
            }
        };
        Ok(OrbitMap { target, source_dim, target_dim, fiber })
    }
}

/// Output of [`star_subdivision`].
#[derive(Clone, Debug)]
pub struct Blowup {
    pub fan: Arc<Fan>,
    /// The blow-down map (identity on lattices).
    pub morphism: ToricMorphism,
    pub center: Cone,
    pub new_ray: usize,
}

/// Star subdivision of `fan` at `center`: the toric blow-up along `V(center)`.
pub fn star_subdivision(fan: &Arc<Fan>, center: &Cone) -> Result<Blowup> {
    fan.require_cone(center)?;
    if center.dim() < 2 {
        return Err(Error::CenterTooSmall(center.clone()));
    }
    fan.require_smooth()?;
    let new_ray = fan.num_rays();
    let generator = center
        .rays()
        .iter()
        .fold(LatticeVector::zero(fan.dim()), |acc, &r| acc.add(fan.ray(r)));
    let mut rays = fan.rays().to_vec();
    rays.push(generator);
    let mut max = Vec::new();
    for cone in fan.max_cones() {
        if cone.contains(center) {
            for &r in center.rays() {
                max.push(cone.without_ray(r).with_ray(new_ray));
            }
        } else {
            max.push(cone);
        }
    }
    let name = format!("Bl[{}]{}", center.key(), fan.name());
    let sub = Arc::new(Fan::from_max_cones(name, fan.dim(), rays, &max)?);
    let morphism = ToricMorphism::new(sub.clone(), fan.clone(), LatticeMatrix::identity(fan.dim()))?;
    Ok(Blowup { fan: sub, morphism, center: center.clone(), new_ray })
}

/// The fan of the orbit closure `V(center)` in `N / N_center`, together
/// with the cone correspondence.
#[derive(Clone, Debug)]
pub struct StarQuotient {
    pub fan: Arc<Fan>,
    pub center: Cone,
    pub lattice: QuotientLattice,
    /// Quotient ray index -> parent ray index.
    pub ray_map: Vec<usize>,
}

impl StarQuotient {
    /// Parent cone corresponding to a cone of the quotient fan.
    pub fn parent_cone(&self, cone: &Cone) -> Cone {
        Cone::new(self.center.rays().iter().copied().chain(cone.rays().iter().map(|&r| self.ray_map[r])))
    }

    /// Quotient cone corresponding to a parent cone containing the center.
    pub fn quotient_cone(&self, parent: &Cone) -> Option<Cone> {
        if !parent.contains(&self.center) {
            return None;
        }
        let rays: Option<Vec<usize>> = parent
            .rays()
            .iter()
            .filter(|r| !self.center.contains_ray(**r))
            .map(|r| self.quotient_ray(*r))
            .collect();
        let cone = Cone::new(rays?);
        self.fan.contains_cone(&cone).then_some(cone)
    }

    pub fn quotient_ray(&self, parent_ray: usize) -> Option<usize> {
        self.ray_map.iter().position(|&r| r == parent_ray)
    }
}

/// Star quotient of a smooth fan at one of its cones.
pub fn star_quotient_fan(fan: &Fan, center: &Cone) -> Result<StarQuotient> {
    fan.require_cone(center)?;
    fan.require_smooth()?;
    let lattice = fan.quotient_lattice(center);
    let ray_map: Vec<usize> = (0..fan.num_rays())
        .filter(|&r| !center.contains_ray(r) && fan.contains_cone(&center.with_ray(r)))
        .collect();
    let rays = ray_map.iter().map(|&r| lattice.projection.apply(fan.ray(r))).collect();
    let cones = fan
        .cones()
        .iter()
        .filter(|c| c.contains(center))
        .map(|c| {
            Cone::new(
                c.rays()
                    .iter()
                    .filter(|r| !center.contains_ray(**r))
                    .map(|r| ray_map.iter().position(|m| m == r).expect("ray of star")),
            )
        })
        .collect();
    let name = format!("V[{}]{}", center.key(), fan.name());
    let quotient = Fan::from_cones(name, lattice.dim(), rays, cones)?;
    Ok(StarQuotient { fan: Arc::new(quotient), center: center.clone(), lattice, ray_map })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Arc<Fan> {
        Arc::new(Fan::projective_space(2))
    }

    fn cone(rays: &[usize]) -> Cone {
        Cone::new(rays.iter().copied())
    }

    #[test]
    fn p2_is_valid_smooth_complete() {
        let fan = p2();
        let report = validate(&fan);
        assert!(report.is_valid(), "{report:?}");
        assert!(report.is_smooth());
        assert!(report.is_complete());
        assert_eq!(fan.cones().len(), 7);
        assert_eq!(fan.max_cones().len(), 3);
    }

    #[test]
    fn index_two_cone_is_not_smooth() {
        let fan = Fan::from_i64("bad", 2, &[&[1, 0], &[1, 2]], &[&[0, 1]]).unwrap();
        let report = validate(&fan);
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, FanIssue::NotSmooth { index, .. } if *index == BigInt::from(2))));
        assert!(!report.is_complete());
    }

    #[test]
    fn single_quadrant_is_valid_but_incomplete() {
        let fan = Fan::from_i64("quadrant", 2, &[&[1, 0], &[0, 1]], &[&[0, 1]]).unwrap();
        let report = validate(&fan);
        assert!(report.is_valid());
        assert!(!report.is_complete());
        assert!(report.incomplete.iter().any(|i| matches!(i, FanIssue::FacetNeighbors { count: 1, .. })));
    }

    #[test]
    fn reports_non_primitive_and_missing_faces() {
        let rays = vec![LatticeVector::from_i64s(&[2, 0]), LatticeVector::from_i64s(&[0, 1])];
        let fan = Fan::from_cones("raw", 2, rays, vec![Cone::zero(), cone(&[0, 1])]).unwrap();
        let issues = &validate(&fan).issues;
        assert!(issues.iter().any(|i| matches!(i, FanIssue::NonPrimitiveRay { ray: 0, .. })));
        assert!(issues.iter().any(|i| matches!(i, FanIssue::MissingFace { .. })));
    }

    #[test]
    fn double_cover_is_not_complete() {
        // six rays winding twice around the origin
        let fan = Fan::from_i64(
            "wound",
            2,
            &[&[1, 0], &[0, 1], &[-1, -1], &[1, 0], &[0, 1], &[-1, -1]],
            &[&[0, 1], &[1, 2], &[2, 3], &[3, 4], &[4, 5], &[0, 5]],
        )
        .unwrap();
        let report = validate(&fan);
        assert!(!report.is_complete());
    }

    #[test]
    fn overlapping_cones_are_reported() {
        let fan = Fan::from_i64("overlap", 2, &[&[1, 0], &[0, 1], &[1, 1]], &[&[0, 1], &[0, 2]]).unwrap();
        // both cones are smooth, but they lie on the same side of their common ray 0
        assert!(validate(&fan).issues.iter().any(|i| matches!(i, FanIssue::Overlap { .. })));
    }

    #[test]
    fn point_fan_is_complete() {
        let pt = Fan::point();
        assert!(pt.is_complete());
        assert_eq!(pt.cones(), &[Cone::zero()]);
    }

    #[test]
    fn smallest_containing_cone_examples() {
        let fan = p2();
        assert_eq!(fan.smallest_containing_cone(&LatticeVector::from_i64s(&[1, 1])).unwrap(), cone(&[0, 1]));
        assert_eq!(fan.smallest_containing_cone(&LatticeVector::from_i64s(&[1, 0])).unwrap(), cone(&[0]));
        assert_eq!(fan.smallest_containing_cone(&LatticeVector::from_i64s(&[0, 0])).unwrap(), Cone::zero());
        let quadrant = Fan::from_i64("q", 2, &[&[1, 0], &[0, 1]], &[&[0, 1]]).unwrap();
        assert!(matches!(
            quadrant.smallest_containing_cone(&LatticeVector::from_i64s(&[-1, 0])),
            Err(Error::OutsideSupport { .. })
        ));
    }

    #[test]
    fn blowup_of_p2_at_a_point() {
        let b = star_subdivision(&p2(), &cone(&[0, 1])).unwrap();
        assert_eq!(b.fan.ray(b.new_ray), &LatticeVector::from_i64s(&[1, 1]));
        assert_eq!(b.fan.max_cones().len(), 4);
        assert!(b.fan.is_complete());
        assert!(b.morphism.is_compatible());
    }

    #[test]
    fn blowup_of_p3_at_a_point() {
        let p3 = Arc::new(Fan::projective_space(3));
        let b = star_subdivision(&p3, &cone(&[0, 1, 2])).unwrap();
        assert_eq!(b.fan.ray(b.new_ray), &LatticeVector::from_i64s(&[1, 1, 1]));
        assert_eq!(b.fan.max_cones().len(), 6);
        assert!(b.fan.is_complete());
    }

    #[test]
    fn blowup_rejects_bad_centers() {
        assert!(matches!(star_subdivision(&p2(), &cone(&[0])), Err(Error::CenterTooSmall(_))));
        let pp = Arc::new(Fan::projective_space(1).product(&Fan::projective_space(1)));
        // rays 0 and 1 of P1xP1 are opposite, so {0,1} is not a cone
        assert!(matches!(star_subdivision(&pp, &cone(&[0, 1])), Err(Error::NotACone { .. })));
    }

    #[test]
    fn compatibility_examples() {
        let fan = p2();
        let b = star_subdivision(&fan, &cone(&[0, 1])).unwrap();
        assert!(b.morphism.is_compatible());

        let p1 = Arc::new(Fan::projective_space(1));
        let pp = Arc::new(p1.product(&p1));
        let proj = ToricMorphism::first_projection(pp, p1.clone()).unwrap();
        assert!(proj.is_compatible());

        let bad = ToricMorphism::new(fan, p1, LatticeMatrix::from_rows(&[vec![1, 0]], 2)).unwrap();
        assert!(!bad.is_compatible());
    }

    #[test]
    fn orbit_dimensions() {
        let fan = p2();
        assert_eq!(fan.orbit_dimension(&Cone::zero()).unwrap(), 2);
        assert_eq!(fan.orbit_dimension(&cone(&[1])).unwrap(), 1);
        assert_eq!(fan.orbit_dimension(&cone(&[0, 2])).unwrap(), 0);
    }

    #[test]
    fn boundary_partition() {
        let fan = p2();
        let part = fan.boundary_divisor_cones(&BTreeSet::from([2]));
        assert_eq!(part.inside_open, vec![Cone::zero(), cone(&[0]), cone(&[1]), cone(&[0, 1])]);
        assert_eq!(fan.boundary_divisor_cones(&BTreeSet::new()).inside_open.len(), 7);
        let all = fan.boundary_divisor_cones(&BTreeSet::from([0, 1, 2]));
        assert_eq!(all.inside_open, vec![Cone::zero()]);
    }

    #[test]
    fn star_quotient_of_p2_at_a_ray() {
        let fan = p2();
        let q = star_quotient_fan(&fan, &cone(&[0])).unwrap();
        assert_eq!(q.fan.dim(), 1);
        assert_eq!(q.fan.num_rays(), 2);
        assert!(q.fan.is_complete());
        assert_eq!(q.parent_cone(&Cone::zero()), cone(&[0]));
        for c in q.fan.cones() {
            assert_eq!(q.quotient_cone(&q.parent_cone(c)).as_ref(), Some(c));
        }
        let images: BTreeSet<Cone> = q.fan.cones().iter().map(|c| q.parent_cone(c)).collect();
        assert_eq!(images, BTreeSet::from([cone(&[0]), cone(&[0, 1]), cone(&[0, 2])]));
    }

    #[test]
    fn star_quotient_at_zero_cone_is_the_fan() {
        let fan = p2();
        let q = star_quotient_fan(&fan, &Cone::zero()).unwrap();
        assert_eq!(q.fan.cones(), fan.cones());
        assert!(q.fan.is_complete());
    }

    #[test]
    fn star_quotient_of_p3_at_two_cone_is_p1() {
        let p3 = Fan::projective_space(3);
        let q = star_quotient_fan(&p3, &cone(&[0, 1])).unwrap();
        assert_eq!(q.fan.dim(), 1);
        assert_eq!(q.fan.cones().len(), 3);
        assert!(q.fan.is_complete());
    }

    #[test]
    fn cone_keys_round_trip() {
        assert_eq!(Cone::parse_key(""), Some(Cone::zero()));
        assert_eq!(Cone::parse_key("2,0"), Some(cone(&[0, 2])));
        assert_eq!(Cone::parse_key("1,1"), None);
        assert_eq!(Cone::parse_key("a"), None);
        assert_eq!(cone(&[3, 1]).key(), "1,3");
    }

    #[test]
    fn composition_of_projections() {
        let p1 = Arc::new(Fan::projective_space(1));
        let pp = Arc::new(p1.product(&p1));
        let f = ToricMorphism::first_projection(pp, p1.clone()).unwrap();
        let g = ToricMorphism::to_point(p1);
        let gf = f.then(&g).unwrap();
        assert_eq!(gf.map().rows(), 0);
        assert_eq!(gf.map().cols(), 2);
        assert!(gf.is_compatible());
    }
}
