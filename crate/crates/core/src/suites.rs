//! Verification suites over a corpus of fans and morphisms.
//!
//! Each suite produces one [`CheckRecord`] per instance, in a deterministic
//! order. Randomized instances draw from a ChaCha stream seeded per suite,
//! so a suite's output depends only on the corpus, the seed and the trial
//! count.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chow::{
    classes_equal, degree, multiply_divisor, multiply_divisor_with, pushforward_cycle, restriction_character,
    CycleClass,
};
use crate::constructible::{euler_characteristic, ConstructibleFunction};
use crate::corpus::Corpus;
use crate::csm::{
    csm_class, prochow_assign_local_data, verify_blowup_formula, verify_covariance, verify_fibration,
    verify_fibration_tower, verify_gluing, verify_inclusion_exclusion, verify_naturality, verify_normalization,
    verify_orbit_closure_class, verify_prochow_compatibility, GoodClosure, ProChowDiagram,
};
use crate::fan::{Cone, Fan, ToricMorphism};
use crate::lattice::{kernel_basis, LatticeVector};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Normalization,
    Gluing,
    Blowup,
    Naturality,
    Covariance,
    Fibration,
    Prochow,
    InclusionExclusion,
    Chow,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Normalization,
        Suite::Gluing,
        Suite::Blowup,
        Suite::Naturality,
        Suite::Covariance,
        Suite::Fibration,
        Suite::Prochow,
        Suite::InclusionExclusion,
        Suite::Chow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Normalization => "normalization",
            Suite::Gluing => "gluing",
            Suite::Blowup => "blowup",
            Suite::Naturality => "naturality",
            Suite::Covariance => "covariance",
            Suite::Fibration => "fibration",
            Suite::Prochow => "prochow",
            Suite::InclusionExclusion => "inclusion-exclusion",
            Suite::Chow => "chow",
        }
    }

    fn salt(self) -> u64 {
        Suite::ALL.iter().position(|s| *s == self).expect("listed") as u64 + 1
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a suite name; `"all"` expands to every suite.
pub fn parse_suites(name: &str) -> Option<Vec<Suite>> {
    if name == "all" {
        return Some(Suite::ALL.to_vec());
    }
    Suite::from_str(name).ok().map(|s| vec![s])
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .iter()
            .copied()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// What a check compared.
#[derive(Clone, Debug)]
pub enum Evidence {
    Class(CycleClass),
    Function(ConstructibleFunction),
    Scalar(BigInt),
    None,
}

#[derive(Clone, Debug)]
pub struct CheckRecord {
    pub check: String,
    pub instance: String,
    pub pass: bool,
    pub lhs: Evidence,
    pub rhs: Evidence,
    pub degree_lhs: Option<BigInt>,
    pub degree_rhs: Option<BigInt>,
}

impl CheckRecord {
    fn classes(check: &str, instance: String, pass: bool, lhs: CycleClass, rhs: CycleClass) -> Self {
        let degree_lhs = degree(&lhs).ok();
        let degree_rhs = degree(&rhs).ok();
        CheckRecord {
            check: check.to_string(),
            instance,
            pass,
            lhs: Evidence::Class(lhs),
            rhs: Evidence::Class(rhs),
            degree_lhs,
            degree_rhs,
        }
    }

    fn functions(check: &str, instance: String, pass: bool, lhs: ConstructibleFunction, rhs: ConstructibleFunction) -> Self {
        let degree_lhs = euler_characteristic(&lhs).ok();
        let degree_rhs = euler_characteristic(&rhs).ok();
        CheckRecord {
            check: check.to_string(),
            instance,
            pass,
            lhs: Evidence::Function(lhs),
            rhs: Evidence::Function(rhs),
            degree_lhs,
            degree_rhs,
        }
    }

    fn scalars(check: &str, instance: String, lhs: BigInt, rhs: BigInt) -> Self {
        CheckRecord {
            check: check.to_string(),
            instance,
            pass: lhs == rhs,
            lhs: Evidence::Scalar(lhs.clone()),
            rhs: Evidence::Scalar(rhs.clone()),
            degree_lhs: Some(lhs),
            degree_rhs: Some(rhs),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    pub trials: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 0, trials: 100 }
    }
}

/// A computation that could not be carried out, with the instance it was
/// running on.
#[derive(Debug, thiserror::Error)]
#[error("{instance}: {error}")]
pub struct SuiteError {
    pub instance: String,
    pub error: Error,
}

type SuiteResult<T> = std::result::Result<T, SuiteError>;

trait Context<T> {
    fn at(self, instance: &str) -> SuiteResult<T>;
}

impl<T> Context<T> for crate::Result<T> {
    fn at(self, instance: &str) -> SuiteResult<T> {
        self.map_err(|error| SuiteError { instance: instance.to_string(), error })
    }
}

pub fn run_suite(suite: Suite, corpus: &Corpus, options: SuiteOptions) -> SuiteResult<Vec<CheckRecord>> {
    corpus.check().at("corpus")?;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ suite.salt());
    match suite {
        Suite::Normalization => normalization(corpus),
        Suite::Gluing => gluing(corpus),
        Suite::Blowup => blowup(corpus),
        Suite::Naturality => naturality(corpus, options, &mut rng),
        Suite::Covariance => covariance(corpus, options, &mut rng),
        Suite::Fibration => fibration(corpus),
        Suite::Prochow => prochow(corpus, &mut rng),
        Suite::InclusionExclusion => inclusion_exclusion(corpus),
        Suite::Chow => chow_arithmetic(corpus, options, &mut rng),
    }
}

fn subsets(n: usize) -> impl Iterator<Item = BTreeSet<usize>> {
    (0u64..1 << n).map(move |mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
}

fn set_key(s: &BTreeSet<usize>) -> String {
    s.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn random_function(fan: &Arc<Fan>, rng: &mut ChaCha8Rng) -> ConstructibleFunction {
    ConstructibleFunction::from_fn(fan.clone(), |_| BigInt::from(rng.gen_range(-3i64..=3)))
}

fn random_class(fan: &Arc<Fan>, rng: &mut ChaCha8Rng) -> CycleClass {
    let mut terms = Vec::new();
    for cone in fan.cones() {
        if rng.gen_bool(0.4) {
            terms.push((cone.clone(), BigInt::from(rng.gen_range(-5i64..=5))));
        }
    }
    CycleClass::from_terms(fan.clone(), terms).expect("cones of the fan")
}

fn normalization(corpus: &Corpus) -> SuiteResult<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for fan in &corpus.fans {
        let (deg, fixed, _) = verify_normalization(fan).at(fan.name())?;
        out.push(CheckRecord::scalars("normalization", fan.name().to_string(), deg, fixed));
        let one = ConstructibleFunction::constant(fan.clone(), BigInt::one());
        let chi = euler_characteristic(&one).at(fan.name())?;
        let deg = degree(&csm_class(&one).at(fan.name())?).at(fan.name())?;
        out.push(CheckRecord::scalars("euler-characteristic", fan.name().to_string(), deg, chi));
        for sigma in fan.cones() {
            let instance = format!("{}:{{{sigma}}}", fan.name());
            let r = verify_orbit_closure_class(fan, sigma).at(&instance)?;
            out.push(CheckRecord::classes("orbit-closure", instance, r.holds, r.lhs, r.rhs));
        }
    }
    Ok(out)
}

fn gluing(corpus: &Corpus) -> SuiteResult<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for fan in &corpus.fans {
        for s in subsets(fan.num_rays()) {
            let instance = format!("{}:S={{{}}}", fan.name(), set_key(&s));
            let gc = GoodClosure::new(fan.clone(), s).at(&instance)?;
            let r = verify_gluing(&gc).at(&instance)?;
            out.push(CheckRecord::classes("gluing", instance, r.holds, r.local, r.orbit_sum));
        }
    }
    Ok(out)
}

/// Minimum number of instances of each blow-up branch a run must hit.
pub const MIN_BRANCH_INSTANCES: usize = 5;

fn blowup(corpus: &Corpus) -> SuiteResult<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let (mut empty, mut nonempty) = (0usize, 0usize);
    for fan in &corpus.fans {
        for s in subsets(fan.num_rays()) {
            let gc = GoodClosure::new(fan.clone(), s.clone()).at(fan.name())?;
            for center in fan.cones().iter().filter(|c| c.dim() >= 2) {
                let instance = format!("{}:S={{{}}}:center={{{center}}}", fan.name(), set_key(&s));
                let r = verify_blowup_formula(&gc, center).at(&instance)?;
                if r.z_empty {
                    empty += 1;
                } else {
                    nonempty += 1;
                }
                let check = if r.z_empty { "blowup-z-empty" } else { "blowup-z-nonempty" };
                if let Some(e) = r.exceptional {
                    out.push(CheckRecord::classes(
                        "exceptional-fibration",
                        format!("{instance}:chi={}", e.chi),
                        e.holds,
                        e.lhs,
                        e.rhs,
                    ));
                }
                out.push(CheckRecord::classes(check, instance, r.holds, r.lhs, r.rhs));
            }
        }
    }
    let mut coverage = CheckRecord::scalars(
        "blowup-branch-coverage",
        format!("z-empty={empty},z-nonempty={nonempty}"),
        BigInt::from(empty),
        BigInt::from(nonempty),
    );
    coverage.pass = empty >= MIN_BRANCH_INSTANCES && nonempty >= MIN_BRANCH_INSTANCES;
    out.push(coverage);
    Ok(out)
}

/// Corpus morphisms, identities and structure maps to a point.
fn naturality_morphisms(corpus: &Corpus) -> Vec<(String, ToricMorphism)> {
    let mut ms: Vec<(String, ToricMorphism)> =
        corpus.morphisms.iter().map(|m| (m.name.clone(), m.morphism.clone())).collect();
    for fan in &corpus.fans {
        ms.push((format!("{}->pt", fan.name()), ToricMorphism::to_point(fan.clone())));
        ms.push((format!("id[{}]", fan.name()), ToricMorphism::identity(fan.clone())));
    }
    ms
}

fn naturality(corpus: &Corpus, options: SuiteOptions, rng: &mut ChaCha8Rng) -> SuiteResult<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (name, m) in naturality_morphisms(corpus) {
        let source = m.source().clone();
        let mut inputs = vec![("one".to_string(), ConstructibleFunction::constant(source.clone(), BigInt::one()))];
        for t in 0..options.trials {
            inputs.push((format!("random{t}"), random_function(&source, rng)));
        }
        for (label, phi) in inputs {
            let instance = format!("{name}:{label}");
            let r = verify_naturality(&m, &phi).at(&instance)?;
            out.push(CheckRecord::classes("naturality", instance, r.holds, r.lhs, r.rhs));
        }
    }
    Ok(out)
}

/// Pairs `(f, g)` with `g ∘ f` defined: every corpus morphism followed by
/// the identity, the structure map, or any corpus morphism out of its
/// target; and every identity followed by a structure map.
pub fn composable_pairs(corpus: &Corpus) -> Vec<(String, ToricMorphism, ToricMorphism)> {
    let mut pairs = Vec::new();
    for f in &corpus.morphisms {
        let target = f.morphism.target().clone();
        let mut followers = vec![
            (format!("id[{}]", target.name()), ToricMorphism::identity(target.clone())),
            (format!("{}->pt", target.name()), ToricMorphism::to_point(target.clone())),
        ];
        for g in &corpus.morphisms {
            if **g.morphism.source() == *target {
                followers.push((g.name.clone(), g.morphism.clone()));
            }
        }
        for (gname, g) in followers {
            pairs.push((format!("{gname}.{}", f.name), f.morphism.clone(), g));
        }
    }
    for fan in &corpus.fans {
        pairs.push((
            format!("{}->pt.id[{}]", fan.name(), fan.name()),
            ToricMorphism::identity(fan.clone()),
            ToricMorphism::to_point(fan.clone()),
        ));
    }
    pairs
}

fn covariance(corpus: &Corpus, options: SuiteOptions, rng: &mut ChaCha8Rng) -> SuiteResult<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (name, f, g) in composable_pairs(corpus) {
        let source = f.source().clone();
        let mut inputs = vec![("one".to_string(), ConstructibleFunction::constant(source.clone(), BigInt::one()))];
        for t in 0..options.trials {
            inputs.push((format!("random{t}"), random_function(&source, rng)));
        }
        for (label, phi) in inputs {
            let instance = format!("{name}:{label}");
            let r = verify_covariance(&f, &g, &phi).at(&instance)?;
            out.push(CheckRecord::functions("covariance", instance, r.holds, r.composite, r.two_step));
        }
    }
    Ok(out)
}

fn fibration(corpus: &Corpus) -> SuiteResult<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let fibers = [Fan::point(), Fan::projective_space(1), Fan::projective_space(2)];
    for base in corpus.fans.iter().filter(|f| f.dim() <= 2) {
        for fiber in &fibers {
            let instance = format!("{}x{}->{}", base.name(), fiber.name(), base.name());
            let r = verify_fibration(base, fiber).at(&instance)?;
            out.push(CheckRecord::classes("fibration", format!("{instance}:chi={}", r.chi), r.holds, r.lhs, r.rhs));
        }
    }
    let p1 = Fan::projective_space(1);
    let tower = verify_fibration_tower(&Arc::new(p1.clone()), &[p1.clone(), p1]).at("P1-tower")?;
    let factors: Vec<String> = tower.steps.iter().map(|s| s.chi.to_string()).collect();
    let product: BigInt = tower.steps.iter().map(|s| &s.chi).product();
    let mut record = CheckRecord::scalars(
        "fibration-multiplicativity",
        format!("P1xP1xP1->P1xP1->P1:factors={}", factors.join("*")),
        tower.composite.chi.clone(),
        product,
    );
    record.pass = tower.holds;
    out.push(record);
    out.push(CheckRecord::classes(
        "fibration",
        format!("P1xP1xP1->P1:chi={}", tower.composite.chi),
        tower.composite.holds,
        tower.composite.lhs,
        tower.composite.rhs,
    ));
    Ok(out)
}

fn prochow(corpus: &Corpus, rng: &mut ChaCha8Rng) -> SuiteResult<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let mut elements = Vec::new();
    for fan in &corpus.fans {
        for s in subsets(fan.num_rays()) {
            let gc = GoodClosure::new(fan.clone(), s.clone()).at(fan.name())?;
            let (in_boundary, _) = gc.blowup_centers();
            for center in in_boundary {
                let instance = format!("{}:S={{{}}}:center={{{center}}}", fan.name(), set_key(&s));
                let mut diagram = ProChowDiagram::new();
                let root = diagram.add_node(fan.name(), gc.clone());
                diagram.add_blowup(root, &center).at(&instance)?;
                let element = prochow_assign_local_data(diagram).at(&instance)?;
                let r = verify_prochow_compatibility(&element).at(&instance)?;
                let edge = r.edges.into_iter().next().expect("one edge");
                out.push(CheckRecord::classes("prochow", instance.clone(), r.holds, edge.pushed, edge.target_class));
                elements.push((instance, element));
            }
        }
    }
    if let Some((instance, element)) = elements.choose(rng) {
        let mut corrupted = element.clone();
        let source = corrupted.diagram.edges[0].source;
        let fan = corrupted.classes[source].fan().clone();
        let point = fan.max_cones().choose(rng).expect("complete fan").clone();
        let bump = CycleClass::orbit_closure(fan, &point).at(instance)?;
        corrupted.classes[source] = &corrupted.classes[source] + &bump;
        let r = verify_prochow_compatibility(&corrupted).at(instance)?;
        let edge = r.edges.into_iter().next().expect("one edge");
        // passes when the corruption is detected
        out.push(CheckRecord::classes(
            "prochow-corruption",
            format!("{instance}:+[V({point})]"),
            !r.holds,
            edge.pushed,
            edge.target_class,
        ));
    }
    Ok(out)
}

fn inclusion_exclusion(corpus: &Corpus) -> SuiteResult<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for fan in &corpus.fans {
        let cones = fan.cones();
        for (i, a) in cones.iter().enumerate() {
            for b in &cones[i..] {
                let instance = format!("{}:{{{a}}}|{{{b}}}", fan.name());
                let r = verify_inclusion_exclusion(fan, a, b).at(&instance)?;
                out.push(CheckRecord::classes("inclusion-exclusion", instance, r.holds, r.lhs, r.rhs));
            }
        }
    }
    Ok(out)
}

/// Another valid character for `(cone, ray)`: the canonical one shifted by
/// a random element of the annihilator of the cone.
fn perturbed_character(fan: &Fan, cone: &Cone, ray: usize, rng: &mut ChaCha8Rng) -> crate::Result<LatticeVector> {
    let base = restriction_character(fan, cone, ray)?;
    let kernel = kernel_basis(&fan.ray_matrix(cone).transpose());
    let mut m = base;
    for j in 0..kernel.cols() {
        let k = BigInt::from(rng.gen_range(-4i64..=4));
        m = m.add(&kernel.column(j).scaled(&k));
    }
    Ok(m)
}

fn chow_arithmetic(corpus: &Corpus, options: SuiteOptions, rng: &mut ChaCha8Rng) -> SuiteResult<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let fans = &corpus.fans;

    // choice independence: every (ray in cone) pair once, then random ones
    let mut pairs = Vec::new();
    for fan in fans {
        for cone in fan.cones() {
            for &ray in cone.rays() {
                pairs.push((fan.clone(), cone.clone(), ray));
            }
        }
    }
    let exhaustive = pairs.len();
    for t in 0..exhaustive + options.trials {
        let (fan, cone, ray) = if t < exhaustive { pairs[t].clone() } else { pairs.choose(rng).expect("pairs").clone() };
        let instance = format!("{}:D{ray}.[V({cone})]#{t}", fan.name());
        let alpha = CycleClass::orbit_closure(fan.clone(), &cone).at(&instance)?;
        let canonical = multiply_divisor(ray, &alpha).at(&instance)?;
        let shifted = multiply_divisor_with(ray, &alpha, |c| perturbed_character(&fan, c, ray, rng)).at(&instance)?;
        let pass = classes_equal(&canonical, &shifted).at(&instance)?;
        out.push(CheckRecord::classes("divisor-choice-independence", instance, pass, canonical, shifted));
    }

    // commutativity of divisor products modulo relations
    for t in 0..options.trials {
        let fan = fans.choose(rng).expect("nonempty corpus").clone();
        let a = rng.gen_range(0..fan.num_rays().max(1));
        let b = rng.gen_range(0..fan.num_rays().max(1));
        if fan.num_rays() == 0 {
            continue;
        }
        let alpha = random_class(&fan, rng);
        let instance = format!("{}:D{a}D{b}#{t}", fan.name());
        let ab = multiply_divisor(a, &multiply_divisor(b, &alpha).at(&instance)?).at(&instance)?;
        let ba = multiply_divisor(b, &multiply_divisor(a, &alpha).at(&instance)?).at(&instance)?;
        let pass = classes_equal(&ab, &ba).at(&instance)?;
        out.push(CheckRecord::classes("divisor-commutativity", instance, pass, ab, ba));
    }

    // all fixed points are rationally equivalent
    let mut point_pairs = Vec::new();
    for fan in fans {
        let max = fan.cones_of_dim(fan.dim()).cloned().collect::<Vec<_>>();
        for (i, p) in max.iter().enumerate() {
            for q in &max[i + 1..] {
                point_pairs.push((fan.clone(), p.clone(), q.clone(), BigInt::one()));
            }
        }
    }
    let exhaustive = point_pairs.len();
    for _ in 0..options.trials {
        if let Some((fan, p, q, _)) = point_pairs.choose(rng).cloned() {
            point_pairs.push((fan, p, q, BigInt::from(rng.gen_range(-9i64..=9))));
        }
    }
    for (t, (fan, p, q, c)) in point_pairs.into_iter().enumerate() {
        let kind = if t < exhaustive { "" } else { "random" };
        let instance = format!("{}:{c}[V({p})]~{c}[V({q})]{kind}#{t}", fan.name());
        let lhs = CycleClass::orbit_closure(fan.clone(), &p).at(&instance)?.scaled(&c);
        let rhs = CycleClass::orbit_closure(fan.clone(), &q).at(&instance)?.scaled(&c);
        let pass = classes_equal(&lhs, &rhs).at(&instance)?;
        out.push(CheckRecord::classes("point-class-equivalence", instance, pass, lhs, rhs));
    }

    // degree preservation and functoriality of push-forward
    let morphisms = naturality_morphisms(corpus);
    for t in 0..options.trials {
        let (name, m) = morphisms.choose(rng).expect("morphisms").clone();
        let source = m.source().clone();
        let points: Vec<Cone> = source.cones_of_dim(source.dim()).cloned().collect();
        let terms: Vec<(Cone, BigInt)> =
            points.iter().map(|p| (p.clone(), BigInt::from(rng.gen_range(-5i64..=5)))).collect();
        let instance = format!("{name}#{t}");
        let alpha = CycleClass::from_terms(source, terms).at(&instance)?;
        let pushed = pushforward_cycle(&m, &alpha).at(&instance)?;
        let lhs = degree(&pushed).at(&instance)?;
        let rhs = degree(&alpha).at(&instance)?;
        out.push(CheckRecord::scalars("pushforward-degree", instance, lhs, rhs));
    }
    let pairs = composable_pairs(corpus);
    for t in 0..options.trials {
        let (name, f, g) = pairs.choose(rng).expect("pairs").clone();
        let instance = format!("{name}#{t}");
        let alpha = random_class(f.source(), rng);
        let gf = f.then(&g).at(&instance)?;
        let direct = pushforward_cycle(&gf, &alpha).at(&instance)?;
        let fa = pushforward_cycle(&f, &alpha).at(&instance)?.rebased(g.source().clone()).at(&instance)?;
        let stepwise = pushforward_cycle(&g, &fa).at(&instance)?;
        let pass = classes_equal(&direct, &stepwise).at(&instance)?;
        out.push(CheckRecord::classes("pushforward-functoriality", instance, pass, direct, stepwise));
    }
    Ok(out)
}
