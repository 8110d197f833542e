//! The ten acceptance criteria, each checked against an independent
//! reference where one exists.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::{Deserialize, Serialize};

use setmap_core::constructions::{
    descent_chain, enumeration_mapping, interval_mapping, prefix_mapping, strictly_decreasing,
    verify_delta_preconditions, DeltaCondition,
};
use setmap_core::forcing::{
    amalgamate_theorem1, amalgamate_theorem2, check_condition4, check_ranked_condition, diagonalize_cor3,
    secured_sets, Diagonalization,
};
use setmap_core::predicates::{is_free, reduced_is_free};
use setmap_core::ramsey::{
    arrow_check, arrow_check_sweep, position_lemma_scan, t_ladder, Coloring, PositionScan, EXHAUSTIVE_CAP,
};
use setmap_core::search::{enumerate_free_sets, max_free_set, oracle_max_free_set, SearchConfig};
use setmap_core::set::binomial;
use setmap_core::{ElementSet, Flags, SetMapping};

use crate::corpus::{case_rng, quad_delta_pair, random_interval_bounded, random_mapping, random_scheme, ranked_delta_pair};

/// Corpus seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5e7_3a9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AcceptanceConfig {
    pub seed: u64,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        AcceptanceConfig { seed: DEFAULT_SEED }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
    pub millis: u64,
}

impl Outcome {
    /// One line: id, name, verdict, detail.
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {:<32} {} ({} cases, {} ms) {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.cases,
            self.millis,
            self.detail
        )
    }
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    check: fn(&AcceptanceConfig) -> Check,
}

/// Verdict of one criterion before timing is attached.
struct Check {
    passed: bool,
    cases: usize,
    detail: String,
}

impl Check {
    fn new(cases: usize, failures: Vec<String>, summary: String) -> Self {
        let passed = failures.is_empty();
        let detail = if passed {
            summary
        } else {
            let shown: Vec<_> = failures.iter().take(5).cloned().collect();
            format!("{summary}; {} failure(s): {}", failures.len(), shown.join("; "))
        };
        Check { passed, cases, detail }
    }
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion {
        id: 1,
        name: "t-ladder exactness",
        check: ladder_exactness,
    },
    Criterion {
        id: 2,
        name: "base-case sharpness",
        check: base_case_sharpness,
    },
    Criterion {
        id: 3,
        name: "position lemma and minimality",
        check: position_lemma,
    },
    Criterion {
        id: 4,
        name: "quadruple amalgamation",
        check: quad_amalgamation,
    },
    Criterion {
        id: 5,
        name: "ranked amalgamation",
        check: ranked_amalgamation,
    },
    Criterion {
        id: 6,
        name: "descent property",
        check: descent_property,
    },
    Criterion {
        id: 7,
        name: "diagonalization",
        check: diagonalization,
    },
    Criterion {
        id: 8,
        name: "oracle equivalence",
        check: oracle_equivalence,
    },
    Criterion {
        id: 9,
        name: "freeness reduction",
        check: freeness_reduction,
    },
    Criterion {
        id: 10,
        name: "ramsey anchors",
        check: ramsey_anchors,
    },
];

pub fn criterion(id: u8) -> Option<&'static Criterion> {
    CRITERIA.iter().find(|c| c.id == id)
}

pub fn run_criterion(c: &Criterion, cfg: &AcceptanceConfig) -> Outcome {
    let start = Instant::now();
    let check = (c.check)(cfg);
    Outcome {
        id: c.id,
        name: c.name.to_string(),
        passed: check.passed,
        cases: check.cases,
        detail: check.detail,
        millis: start.elapsed().as_millis() as u64,
    }
}

/// Runs the selected criteria in order (all when `ids` is empty).
pub fn run_all(ids: &[u8], cfg: &AcceptanceConfig) -> Vec<Outcome> {
    CRITERIA
        .iter()
        .filter(|c| ids.is_empty() || ids.contains(&c.id))
        .map(|c| run_criterion(c, cfg))
        .collect()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn ladder_exactness(_: &AcceptanceConfig) -> Check {
    let mut failures = Vec::new();
    match arrow_check(7, 5, 7, 5) {
        Ok(v) if v.holds => {}
        other => failures.push(format!("7 -> (5,7)^5 not confirmed: {other:?}")),
    }
    match arrow_check(6, 5, 7, 5) {
        Ok(v) if !v.holds => {
            let cx = v.counterexample.expect("failing verdicts carry a counterexample");
            if !cx.is_counterexample(5, 7) {
                failures.push("counterexample at 6 does not re-verify".into());
            }
            if cx != Coloring::constant(6, 5, true).expect("valid shape") {
                failures.push("least counterexample at 6 is not the all-1 coloring".into());
            }
        }
        other => failures.push(format!("6 -> (5,7)^5 not refuted: {other:?}")),
    }
    let (sweep, elapsed) = timed(|| arrow_check_sweep(7, 5, 7, 5, EXHAUSTIVE_CAP));
    match sweep {
        Ok(v) if v.holds && v.nodes == 1 << 21 => {}
        other => failures.push(format!("full sweep did not confirm over 2^21 colorings: {other:?}")),
    }
    if elapsed > Duration::from_secs(60) {
        failures.push(format!("sweep took {elapsed:?}"));
    }
    let ladder = t_ladder(1);
    if ladder.iter().map(|e| (e.value, e.exact)).collect::<Vec<_>>() != [(5, true), (7, true)] {
        failures.push(format!("ladder prefix {ladder:?}"));
    }
    Check::new(
        4,
        failures,
        format!(
            "t_1 = 7 exact; 6 fails (no 7-subset of 6 points, least counterexample all-1); 2^21 sweep in {} ms",
            elapsed.as_millis()
        ),
    )
}

fn base_case_sharpness(_: &AcceptanceConfig) -> Check {
    let mut failures = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut oracle_checked = 0;
    for n in 5..=20 {
        let f = interval_mapping(n).expect("n >= 4");
        let (report, elapsed) = timed(|| max_free_set(&f, &SearchConfig::default()));
        slowest = slowest.max(elapsed);
        let report = match report {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("n={n}: {e}"));
                continue;
            }
        };
        if report.optimum != 4 {
            failures.push(format!("n={n}: optimum {}", report.optimum));
        }
        if elapsed > Duration::from_secs(10) {
            failures.push(format!("n={n}: {elapsed:?}"));
        }
        if n <= 14 {
            oracle_checked += 1;
            match oracle_max_free_set(&f) {
                Ok(o) if o.same_result(&report) => {}
                other => failures.push(format!("n={n}: oracle disagrees: {other:?}")),
            }
        }
    }
    Check::new(
        16,
        failures,
        format!("optimum 4 for n = 5..20, slowest {} ms, {oracle_checked} oracle-confirmed", slowest.as_millis()),
    )
}

fn position_lemma(_: &AcceptanceConfig) -> Check {
    let ((seven, six), elapsed) = timed(|| (position_lemma_scan(7), position_lemma_scan(6)));
    let mut failures = Vec::new();
    if seven != PositionScan::Holds {
        failures.push(format!("size 7: {seven:?}"));
    }
    if six != PositionScan::Fails(2, 3) {
        failures.push(format!("size 6: {six:?}"));
    }
    if elapsed > Duration::from_secs(1) {
        failures.push(format!("took {elapsed:?}"));
    }
    Check::new(2, failures, "7 holds, 6 fails at marks (2,3)".into())
}

const AMALGAMATION_CASES: u64 = 1000;
const CAMPAIGN_LIMIT: Duration = Duration::from_secs(300);

fn quad_amalgamation(cfg: &AcceptanceConfig) -> Check {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut repaired = 0;
    let mut blocked = 0usize;
    for case in 0..AMALGAMATION_CASES {
        let inst = quad_delta_pair(&mut case_rng(cfg.seed ^ 4, case), 18);
        if inst.repairs > 0 {
            repaired += 1;
        }
        let big_f = inst.left.ambient().clone();
        if !verify_delta_preconditions(&inst.pair(), &big_f) {
            failures.push(format!("case {case}: generator broke the preconditions"));
            continue;
        }
        let r = match amalgamate_theorem1(&inst.left, &inst.right) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("case {case}: {e}"));
                continue;
            }
        };
        match check_condition4(&big_f, r.support(), r.g()) {
            Ok(v) if v.is_valid() => {}
            other => failures.push(format!("case {case}: amalgam {other:?}")),
        }
        for side in [&inst.left, &inst.right] {
            let s = side.support();
            if r.g().restrict(s) != side.g().restrict(s) || !r.extends(side) {
                failures.push(format!("case {case}: restriction to {s} differs"));
            }
        }
        let pair = inst.pair();
        blocked += r
            .support()
            .subsets_of_size(4)
            .filter(|&t| pair.is_mixed(t) && !r.g().image(t).is_empty())
            .count();
    }
    if start.elapsed() > CAMPAIGN_LIMIT {
        failures.push(format!("campaign took {:?}", start.elapsed()));
    }
    Check::new(
        AMALGAMATION_CASES as usize,
        failures,
        format!("all amalgams valid and extend both inputs; {repaired} inputs needed repair; {blocked} mixed images"),
    )
}

fn ranked_amalgamation(cfg: &AcceptanceConfig) -> Check {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut new_sets = 0usize;
    for case in 0..AMALGAMATION_CASES {
        let inst = ranked_delta_pair(&mut case_rng(cfg.seed ^ 5, case), 12);
        let big_f = inst.left.ambient().clone();
        if !verify_delta_preconditions(&inst.pair(), &big_f) {
            failures.push(format!("case {case}: generator broke the preconditions"));
            continue;
        }
        let r = match amalgamate_theorem2(&inst.left, &inst.right) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("case {case}: {e}"));
                continue;
            }
        };
        match check_ranked_condition(&big_f, r.support(), r.g(), r.ranks()) {
            Ok(v) if v.is_valid() => {}
            other => failures.push(format!("case {case}: amalgam {other:?}")),
        }
        for side in [&inst.left, &inst.right] {
            if !r.extends(side) {
                failures.push(format!("case {case}: does not extend {}", side.support()));
            }
        }
        let (left, right) = (inst.split.left, inst.split.right);
        for u in secured_sets(&big_f, r.g(), r.support()) {
            if inst.left.ranks().contains(u) || inst.right.ranks().contains(u) {
                continue;
            }
            new_sets += 1;
            let m = u.min().expect("secured sets are nonempty");
            let own = if left.contains(m) {
                left
            } else if right.contains(m) {
                right
            } else {
                failures.push(format!("case {case}: new secured set {u} starts in the root"));
                continue;
            };
            if u.intersection(own) != ElementSet::singleton(m) {
                failures.push(format!("case {case}: new secured set {u} meets its branch beyond its minimum"));
            }
        }
    }
    if start.elapsed() > CAMPAIGN_LIMIT {
        failures.push(format!("campaign took {:?}", start.elapsed()));
    }
    Check::new(
        AMALGAMATION_CASES as usize,
        failures,
        format!("all amalgams valid with extended ranks; {new_sets} new secured sets, each meeting its branch only at its minimum"),
    )
}

fn descent_property(cfg: &AcceptanceConfig) -> Check {
    let mut failures = Vec::new();
    let mut free_sets = 0usize;
    let search = SearchConfig::default();
    for case in 0..100 {
        let scheme = random_scheme(&mut case_rng(cfg.seed ^ 6, case), 12);
        let f = enumeration_mapping(&scheme).expect("valid scheme");
        for m in 2..=12 {
            let sets = match enumerate_free_sets(&f, m, &search) {
                Ok(s) => s,
                Err(e) => {
                    failures.push(format!("case {case}: {e}"));
                    break;
                }
            };
            if sets.is_empty() {
                break;
            }
            for h in sets {
                free_sets += 1;
                let chain = descent_chain(&scheme, h);
                if !strictly_decreasing(&chain) {
                    failures.push(format!("case {case}: {h} gives {chain:?}"));
                }
            }
        }
    }
    Check::new(100, failures, format!("{free_sets} free sets, all with strictly decreasing descent"))
}

/// `F({x,y})` is everything except `x` and `y`.
pub fn complete_pair_mapping(n: usize) -> setmap_core::Result<SetMapping> {
    SetMapping::from_fn(n, 2, None, Flags::NONE, |t| ElementSet::below(n).difference(t))
}

fn diagonalization(_: &AcceptanceConfig) -> Check {
    let mut failures = Vec::new();
    let search = SearchConfig::default();
    let f = complete_pair_mapping(4).expect("n = 4");
    let (sat, elapsed) = timed(|| diagonalize_cor3(&f, 3, &search));
    match sat {
        Ok(Diagonalization::Sat { g, .. }) => {
            if !g.is_contained_in(&f) || g.tuples().any(|t| g.image(t).len() > 1) {
                failures.push("SAT output is not a singleton mapping inside F".into());
            }
            match enumerate_free_sets(&g, 3, &search) {
                Ok(sets) if sets.is_empty() => {}
                other => failures.push(format!("free triples remain: {other:?}")),
            }
        }
        other => failures.push(format!("complete F: {other:?}")),
    }
    if elapsed > Duration::from_secs(1) {
        failures.push(format!("SAT case took {elapsed:?}"));
    }
    let prefix = prefix_mapping(4).expect("n = 4");
    let (unsat, elapsed) = timed(|| diagonalize_cor3(&prefix, 3, &search));
    if !matches!(unsat, Ok(Diagonalization::Unsat { .. })) {
        failures.push(format!("prefix F: {unsat:?}"));
    }
    if elapsed > Duration::from_secs(1) {
        failures.push(format!("UNSAT case took {elapsed:?}"));
    }
    Check::new(2, failures, "SAT on the complete F with no free triple; UNSAT on prefix_mapping(4)".into())
}

fn oracle_equivalence(cfg: &AcceptanceConfig) -> Check {
    let mut failures = Vec::new();
    let search = SearchConfig::default();
    for case in 0..200u64 {
        let mut rng = case_rng(cfg.seed ^ 8, case);
        let k = [1, 2, 4][case as usize % 3];
        let n = rng.gen_range(k.max(4)..=14);
        let density = rng.gen_range(0.02..0.4);
        let f = random_mapping(&mut rng, n, k, None, Flags::NONE, density);
        match (max_free_set(&f, &search), oracle_max_free_set(&f)) {
            (Ok(a), Ok(b)) if a.same_result(&b) => {}
            (a, b) => failures.push(format!("case {case} (n={n}, k={k}): {a:?} vs {b:?}")),
        }
    }
    Check::new(200, failures, "optimum and witness agree on every mapping".into())
}

/// Freeness read off the 5-chains: color a chain 1 when its middle lies in
/// `f` of the other four, otherwise 0; `H` is free iff every chain gets 0.
fn middle_element_free(f: &SetMapping, h: ElementSet) -> bool {
    h.subsets_of_size(5).all(|chain| {
        let c = chain.to_vec();
        let outer = ElementSet::of(&[c[0], c[1], c[3], c[4]]);
        !f.image(outer).contains(c[2])
    })
}

fn freeness_reduction(cfg: &AcceptanceConfig) -> Check {
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for case in 0..50 {
        let mut rng = case_rng(cfg.seed ^ 9, case);
        let density = rng.gen_range(0.05..1.0);
        let f = random_interval_bounded(&mut rng, 10, density);
        for bits in 0u64..1 << 10 {
            let h = ElementSet::from_bits(bits);
            if h.len() > 7 {
                continue;
            }
            checked += 1;
            let direct = is_free(&f, h).expect("inside the ground set");
            let reduced = reduced_is_free(&f, h).expect("interval-bounded");
            let colored = middle_element_free(&f, h);
            if direct != reduced || direct != colored {
                let mut msg = String::new();
                let _ = write!(msg, "case {case}: {h} direct {direct} reduced {reduced} coloring {colored}");
                failures.push(msg);
            }
        }
    }
    Check::new(50, failures, format!("{checked} subsets agree"))
}

fn ramsey_anchors(_: &AcceptanceConfig) -> Check {
    let mut failures = Vec::new();
    let ((six, five), elapsed) = timed(|| (arrow_check(6, 3, 3, 2), arrow_check(5, 3, 3, 2)));
    match six {
        Ok(v) if v.holds => {}
        other => failures.push(format!("6 -> (3,3)^2: {other:?}")),
    }
    match five {
        Ok(v) if !v.holds => match v.counterexample {
            Some(cx) if cx.is_counterexample(3, 3) && independent_triangle_free(&cx) => {}
            other => failures.push(format!("counterexample does not re-verify: {other:?}")),
        },
        other => failures.push(format!("5 -> (3,3)^2: {other:?}")),
    }
    if elapsed > Duration::from_secs(5) {
        failures.push(format!("took {elapsed:?}"));
    }
    Check::new(2, failures, "R(3,3) = 6 anchor with re-verified pentagon".into())
}

/// Direct triangle scan over the edge colors.
fn independent_triangle_free(c: &Coloring) -> bool {
    let a = c.vertices();
    let colors = c.colors();
    let edge = |x: usize, y: usize| {
        // lexicographic index of {x<y}
        let before: u64 = (0..x).map(|v| binomial(a - 1 - v, 1)).sum();
        colors[(before as usize) + (y - x - 1)]
    };
    for x in 0..a {
        for y in x + 1..a {
            for z in y + 1..a {
                let (p, q, r) = (edge(x, y), edge(x, z), edge(y, z));
                if p == q && q == r {
                    return false;
                }
            }
        }
    }
    true
}
