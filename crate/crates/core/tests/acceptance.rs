//! End-to-end acceptance run over the bundled corpus.
//!
//! Prints one PASS/FAIL line per criterion and fails if any criterion fails.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::One;
use toric_csm::chow::degree;
use toric_csm::constructible::ConstructibleFunction;
use toric_csm::corpus::Corpus;
use toric_csm::csm::csm_class;
use toric_csm::suites::{run_suite, CheckRecord, Suite, SuiteOptions, MIN_BRANCH_INSTANCES};

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn records(suite: Suite, corpus: &Corpus) -> Vec<CheckRecord> {
    run_suite(suite, corpus, SuiteOptions { seed: 0, trials: 100 }).unwrap_or_else(|e| panic!("{suite}: {e}"))
}

fn failures(records: &[CheckRecord]) -> Vec<String> {
    records.iter().filter(|r| !r.pass).map(|r| format!("{}[{}]", r.check, r.instance)).collect()
}

fn count(records: &[CheckRecord], check: &str) -> usize {
    records.iter().filter(|r| r.check == check).count()
}

fn timed(name: &'static str, budget_secs: u64, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = f();
    Outcome { name, pass, detail, elapsed: start.elapsed(), budget: Duration::from_secs(budget_secs) }
}

fn summary(records: &[CheckRecord], extra: bool, note: String) -> (bool, String) {
    let failed = failures(records);
    let pass = failed.is_empty() && extra;
    let detail = if failed.is_empty() {
        format!("{} checks; {note}", records.len())
    } else {
        format!("{} of {} failed, first: {}; {note}", failed.len(), records.len(), failed[0])
    };
    (pass, detail)
}

#[test]
fn acceptance() {
    let corpus = Corpus::builtin();
    let mut outcomes = Vec::new();

    outcomes.push(timed("1 normalization", 1, || {
        // fixed points of each variety, counted by hand
        let expected = [("P1", 2), ("P2", 3), ("P1xP1", 4), ("BlP2", 4), ("F1", 4), ("P3", 4)];
        let mut bad = Vec::new();
        for (name, points) in expected {
            let fan = corpus.fan(name).expect("bundled fan");
            let one = ConstructibleFunction::constant(fan.clone(), BigInt::one());
            let deg = degree(&csm_class(&one).unwrap()).unwrap();
            if deg != BigInt::from(points) {
                bad.push(format!("{name}: {deg} != {points}"));
            }
        }
        let recs = records(Suite::Normalization, &corpus);
        let (pass, detail) = summary(&recs, bad.is_empty(), format!("oracle mismatches: {bad:?}"));
        (pass, detail)
    }));

    outcomes.push(timed("2 gluing", 5, || {
        let recs = records(Suite::Gluing, &corpus);
        let expected: usize = corpus.fans.iter().map(|f| 1usize << f.num_rays()).sum();
        let n = count(&recs, "gluing");
        summary(&recs, n == expected, format!("{n}/{expected} boundary subsets"))
    }));

    outcomes.push(timed("3 blow-up formula", 10, || {
        let recs = records(Suite::Blowup, &corpus);
        let empty = count(&recs, "blowup-z-empty");
        let nonempty = count(&recs, "blowup-z-nonempty");
        let p3_codim2 = recs.iter().any(|r| {
            r.check == "exceptional-fibration"
                && r.pass
                && r.instance.starts_with("P3:")
                && r.instance.ends_with(":chi=2")
                && r.instance.split("center={").nth(1).is_some_and(|c| c.matches(',').count() == 1)
        });
        summary(
            &recs,
            empty >= MIN_BRANCH_INSTANCES && nonempty >= MIN_BRANCH_INSTANCES && p3_codim2,
            format!("Z empty: {empty}, Z nonempty: {nonempty}, P3 codim-2 chi=2: {p3_codim2}"),
        )
    }));

    outcomes.push(timed("4 covariance", 5, || {
        let recs = records(Suite::Covariance, &corpus);
        let randoms = recs.iter().filter(|r| r.instance.ends_with(":random99")).count();
        summary(&recs, randoms > 0, format!("{randoms} composable pairs x 100 random functions"))
    }));

    outcomes.push(timed("5 naturality", 10, || {
        let recs = records(Suite::Naturality, &corpus);
        let required = ["blowdown", "P1xP1-first", "P1xP1-second", "F1-ruling"];
        let mut missing: Vec<String> = required
            .iter()
            .filter(|m| !recs.iter().any(|r| r.instance == format!("{m}:random99")))
            .map(|m| m.to_string())
            .collect();
        for fan in &corpus.fans {
            let name = format!("{}->pt:random99", fan.name());
            if !recs.iter().any(|r| r.instance == name) {
                missing.push(name);
            }
        }
        summary(&recs, missing.is_empty(), format!("missing morphisms: {missing:?}"))
    }));

    outcomes.push(timed("6 fibration", 5, || {
        let recs = records(Suite::Fibration, &corpus);
        // χ(F) of the fiber is its number of fixed points
        let mut missing = Vec::new();
        for base in ["P1", "P2"] {
            for (fiber, chi) in [("P1", 2), ("P2", 3)] {
                let instance = format!("{base}x{fiber}->{base}:chi={chi}");
                if !recs.iter().any(|r| r.check == "fibration" && r.instance == instance) {
                    missing.push(instance);
                }
            }
        }
        let tower = recs.iter().any(|r| {
            r.check == "fibration-multiplicativity" && r.instance.ends_with("factors=2*2") && r.degree_lhs == Some(BigInt::from(4))
        });
        summary(&recs, missing.is_empty() && tower, format!("missing: {missing:?}, tower 2*2=4: {tower}"))
    }));

    outcomes.push(timed("7 proChow compatibility", 5, || {
        let recs = records(Suite::Prochow, &corpus);
        let corruption = count(&recs, "prochow-corruption");
        let diagrams = count(&recs, "prochow");
        summary(&recs, corruption == 1 && diagrams > 0, format!("{diagrams} diagrams, corruption detected: {}", corruption == 1))
    }));

    outcomes.push(timed("8 Chow arithmetic", 5, || {
        let recs = records(Suite::Chow, &corpus);
        let kinds = ["divisor-choice-independence", "divisor-commutativity", "pushforward-degree", "point-class-equivalence"];
        let counts: Vec<(&str, usize)> = kinds.iter().map(|k| (*k, count(&recs, k))).collect();
        summary(&recs, counts.iter().all(|(_, n)| *n >= 100), format!("{counts:?}"))
    }));

    let total: Duration = outcomes.iter().map(|o| o.elapsed).sum();
    let mut all = true;
    for o in &outcomes {
        let in_budget = o.elapsed <= o.budget;
        let ok = o.pass && in_budget;
        all &= ok;
        println!(
            "{} criterion {} ({:.2}s, budget {}s{}): {}",
            if ok { "PASS" } else { "FAIL" },
            o.name,
            o.elapsed.as_secs_f64(),
            o.budget.as_secs(),
            if in_budget { "" } else { ", over budget" },
            o.detail
        );
    }
    println!("total {:.2}s (budget 60s)", total.as_secs_f64());
    assert!(all && total.as_secs() < 60, "acceptance criteria failed");
}
