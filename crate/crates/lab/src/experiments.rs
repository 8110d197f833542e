//! Experiment dispatch and report output.

use std::env;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use setmap_core::constructions::{
    delta_precondition_failure, descent_chain, DeltaCondition, enumeration_mapping, interval_mapping, prefix_mapping,
    strictly_decreasing, EnumerationScheme,
};
use setmap_core::forcing::{
    amalgamate_theorem1, amalgamate_theorem2, check_condition4, check_ranked_condition, diagonalize_cor3,
    generic_build, AnyCondition, Diagonalization, Flavor, Goal,
};
use setmap_core::ramsey::{
    arrow_check_with, position_lemma_scan, refute_arrow, t_ladder_with, ArrowConfig, LadderConfig, PositionScan,
    RefuteConfig,
};
use setmap_core::search::{enumerate_free_sets, max_free_set, SearchConfig};
use setmap_core::{ElementSet, Error, Flags, SetMapping};

use crate::acceptance::{self, complete_pair_mapping, AcceptanceConfig};
use crate::corpus::{self, case_rng, GENERATOR};
use crate::report::{CaseResult, Experiment, ExperimentSpec, Report, Status};
use crate::{parse_mapping, LabError, OUT_DIR_ENV};

/// What an experiment hands back before timing and echo are attached.
struct Outcome {
    cases: Vec<CaseResult>,
    status: Status,
    generator: Option<String>,
    artifact: Option<serde_json::Value>,
}

impl Outcome {
    fn new(cases: Vec<CaseResult>, status: Status) -> Self {
        Outcome {
            cases,
            status,
            generator: None,
            artifact: None,
        }
    }

    fn seeded(mut self) -> Self {
        self.generator = Some(GENERATOR.to_string());
        self
    }

    fn with_artifact(mut self, json: &str) -> Self {
        self.artifact = Some(serde_json::from_str(json).expect("core documents are JSON"));
        self
    }
}

fn case(id: impl ToString, params: impl ToString, result: impl ToString, value: impl ToString, witness: impl ToString, millis: u64) -> CaseResult {
    CaseResult {
        case_id: id.to_string(),
        params: params.to_string(),
        result: result.to_string(),
        value: value.to_string(),
        witness: witness.to_string(),
        millis,
    }
}

fn ms(d: Duration) -> u64 {
    d.as_millis() as u64
}

/// Runs one experiment. Search budgets that run out yield a report with
/// [`Status::ResourceLimit`] rather than an error.
pub fn run(spec: &ExperimentSpec) -> Result<Report, LabError> {
    let start = Instant::now();
    let outcome = match dispatch(spec) {
        Ok(o) => o,
        Err(LabError::Core(e @ Error::ResourceLimit { .. })) => Outcome::new(
            vec![case("0", "", "resource_limit", "", e.to_string(), ms(start.elapsed()))],
            Status::ResourceLimit,
        ),
        Err(e) => return Err(e),
    };
    Ok(Report {
        experiment: spec.experiment,
        spec: spec.clone(),
        generator: outcome.generator,
        cases: outcome.cases,
        status: outcome.status,
        millis: ms(start.elapsed()),
        artifact: outcome.artifact,
    })
}

fn dispatch(spec: &ExperimentSpec) -> Result<Outcome, LabError> {
    match spec.experiment {
        Experiment::Freeset => freeset(spec),
        Experiment::Construct => construct(spec),
        Experiment::Amalgamate => amalgamate(spec),
        Experiment::Force => force(spec),
        Experiment::Diagonalize => diagonalize(spec),
        Experiment::Ramsey => ramsey(spec),
        Experiment::Ladder => ladder(spec),
        Experiment::PositionLemma => position_lemma(spec),
        Experiment::Acceptance => run_acceptance(spec),
    }
}

/// Where the report goes: `--out`, else `$SETMAP_LAB_OUT_DIR/<experiment>.<ext>`,
/// else standard output (`None`).
pub fn output_path(spec: &ExperimentSpec) -> Option<PathBuf> {
    if let Some(p) = &spec.output {
        return Some(p.clone());
    }
    env::var_os(OUT_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(|d| PathBuf::from(d).join(format!("{}.{}", spec.experiment, spec.format.extension())))
}

pub fn write_report(report: &Report, spec: &ExperimentSpec) -> Result<Option<PathBuf>, LabError> {
    let text = report.render(spec.format)?;
    match output_path(spec) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|source| LabError::Io {
                    path: dir.to_path_buf(),
                    source,
                })?;
            }
            fs::write(&path, text).map_err(|source| LabError::Io {
                path: path.clone(),
                source,
            })?;
            Ok(Some(path))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|source| LabError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })?;
            Ok(None)
        }
    }
}

fn require<T: Copy>(value: Option<T>, flag: &str, experiment: Experiment) -> Result<T, LabError> {
    value.ok_or_else(|| LabError::Usage(format!("{experiment} needs --{flag}")))
}

fn search_config(spec: &ExperimentSpec) -> Result<SearchConfig, LabError> {
    let mut cfg = SearchConfig::default();
    if let Some(n) = spec.cap_nodes {
        cfg.max_nodes = n;
    }
    if let Some(s) = spec.cap_seconds {
        cfg.max_time = Duration::try_from_secs_f64(s).map_err(|e| LabError::Usage(format!("--cap-seconds: {e}")))?;
    }
    Ok(cfg)
}

/// The mapping named by `--in` or `--family`, and whether it was drawn at random.
fn load_mapping(spec: &ExperimentSpec, default_family: &str) -> Result<(SetMapping, bool), LabError> {
    if let Some(path) = &spec.input {
        return Ok((parse_mapping(path)?, false));
    }
    let family = spec.family.as_deref().unwrap_or(default_family);
    let n = require(spec.n, "n", spec.experiment)?;
    let mapping = match family {
        "interval" => interval_mapping(n)?,
        "prefix" => prefix_mapping(n)?,
        "complete" => complete_pair_mapping(n)?,
        "enumeration" => enumeration_mapping(&scheme(spec, n)?)?,
        "random" => {
            let seed = require(spec.seed, "seed", spec.experiment)?;
            let k = spec.k.unwrap_or(2);
            if k == 0 || k > n {
                return Err(LabError::Usage(format!("--k must lie in 1..={n}")));
            }
            let flags = match k {
                4 => Flags::INTERVAL,
                2 => Flags::INITIAL_SEGMENT,
                _ => Flags::NONE,
            };
            return Ok((corpus::random_mapping(&mut case_rng(seed, 0), n, k, spec.mu, flags, 0.3), true));
        }
        other => {
            return Err(LabError::Usage(format!(
                "unknown family {other:?}; expected interval, prefix, enumeration, complete or random"
            )))
        }
    };
    Ok((mapping, family == "enumeration" && spec.seed.is_some()))
}

/// Identity enumerations, or random ones when a seed is given.
fn scheme(spec: &ExperimentSpec, n: usize) -> Result<EnumerationScheme, LabError> {
    Ok(match spec.seed {
        Some(seed) => corpus::random_scheme(&mut case_rng(seed, 0), n),
        None => EnumerationScheme::identity(n)?,
    })
}

fn mapping_params(f: &SetMapping) -> String {
    format!("n={} k={} mu={:?}", f.n(), f.arity(), f.budget())
}

fn freeset(spec: &ExperimentSpec) -> Result<Outcome, LabError> {
    let (f, seeded) = load_mapping(spec, "interval")?;
    let cfg = search_config(spec)?;
    let start = Instant::now();
    let outcome = match spec.m {
        Some(m) => {
            let sets = enumerate_free_sets(&f, m, &cfg)?;
            let first = sets.first().map(|s| s.to_string()).unwrap_or_default();
            let row = case("0", format!("{} m={m}", mapping_params(&f)), "free_sets", sets.len(), first, ms(start.elapsed()));
            Outcome::new(vec![row], Status::Pass)
        }
        None => {
            let report = max_free_set(&f, &cfg)?;
            let row = case(
                "0",
                mapping_params(&f),
                "optimum",
                report.optimum,
                report.witness,
                ms(start.elapsed()),
            );
            Outcome::new(vec![row], Status::Pass)
                .with_artifact(&serde_json::to_string(&report.to_doc()).expect("search report serializes"))
        }
    };
    Ok(if seeded { outcome.seeded() } else { outcome })
}

fn construct(spec: &ExperimentSpec) -> Result<Outcome, LabError> {
    let family = spec.family.as_deref().unwrap_or("interval");
    let start = Instant::now();
    if family == "enumeration" {
        let n = require(spec.n, "n", spec.experiment)?;
        let scheme = scheme(spec, n)?;
        let f = enumeration_mapping(&scheme)?;
        let cfg = search_config(spec)?;
        let mut cases = Vec::new();
        let mut status = Status::Pass;
        let top = spec.m.unwrap_or(n);
        for m in 2..=top.min(n) {
            let sets = enumerate_free_sets(&f, m, &cfg)?;
            let bad: Vec<_> = sets
                .iter()
                .filter(|&&h| !strictly_decreasing(&descent_chain(&scheme, h)))
                .collect();
            if !bad.is_empty() {
                status = Status::Fail;
            }
            let witness = bad.first().map(|h| h.to_string()).unwrap_or_default();
            cases.push(case(m, format!("n={n} m={m}"), "descent_violations", bad.len(), witness, ms(start.elapsed())));
            if sets.is_empty() {
                break;
            }
        }
        let outcome = Outcome::new(cases, status).with_artifact(&scheme.to_json());
        return Ok(if spec.seed.is_some() { outcome.seeded() } else { outcome });
    }
    let (f, seeded) = load_mapping(spec, "interval")?;
    let tuples = f.nonempty().count();
    let row = case(family, mapping_params(&f), "nonempty_images", tuples, "", ms(start.elapsed()));
    let outcome = Outcome::new(vec![row], Status::Pass).with_artifact(&f.to_json());
    Ok(if seeded { outcome.seeded() } else { outcome })
}

fn amalgamate(spec: &ExperimentSpec) -> Result<Outcome, LabError> {
    let seed = require(spec.seed, "seed", spec.experiment)?;
    let flavor = spec.flavor.as_deref().unwrap_or("quad");
    let cases = spec.cases.unwrap_or(10);
    let mut rows = Vec::new();
    let mut status = Status::Pass;
    let mut artifact = None;
    for i in 0..cases as u64 {
        let start = Instant::now();
        let mut rng = case_rng(seed, i);
        let (params, verdict, doc) = match flavor {
            "quad" => {
                let inst = corpus::quad_delta_pair(&mut rng, spec.n.unwrap_or(18).clamp(9, 64));
                let f = inst.left.ambient().clone();
                let params = format!("n={} root={} branch={}", f.n(), inst.split.root, inst.split.left.len());
                let pair = inst.pair();
                match delta_precondition_failure(&pair, &f) {
                    Some(why) => (params, Err(why), None),
                    None => {
                        let r = amalgamate_theorem1(&inst.left, &inst.right)?;
                        let valid = check_condition4(&f, r.support(), r.g())?.is_valid()
                            && r.extends(&inst.left)
                            && r.extends(&inst.right);
                        let doc = AnyCondition::Quad(r).to_json();
                        (params, if valid { Ok(()) } else { Err("amalgam invalid".to_string()) }, Some(doc))
                    }
                }
            }
            "ranked" => {
                let inst = corpus::ranked_delta_pair(&mut rng, spec.n.unwrap_or(12).clamp(6, 64));
                let f = inst.left.ambient().clone();
                let params = format!("n={} root={} branch={}", f.n(), inst.split.root, inst.split.left.len());
                let pair = inst.pair();
                match delta_precondition_failure(&pair, &f) {
                    Some(why) => (params, Err(why), None),
                    None => {
                        let r = amalgamate_theorem2(&inst.left, &inst.right)?;
                        let valid = check_ranked_condition(&f, r.support(), r.g(), r.ranks())?.is_valid()
                            && r.extends(&inst.left)
                            && r.extends(&inst.right);
                        let doc = AnyCondition::Ranked(r).to_json();
                        (params, if valid { Ok(()) } else { Err("amalgam invalid".to_string()) }, Some(doc))
                    }
                }
            }
            other => return Err(LabError::Usage(format!("amalgamate supports --flavor quad or ranked, got {other:?}"))),
        };
        let (result, witness) = match verdict {
            Ok(()) => ("valid", String::new()),
            Err(why) => {
                status = Status::Fail;
                ("invalid", why)
            }
        };
        rows.push(case(i, params, result, flavor, witness, ms(start.elapsed())));
        if cases == 1 {
            artifact = doc;
        }
    }
    let mut outcome = Outcome::new(rows, status).seeded();
    if let Some(doc) = artifact {
        outcome = outcome.with_artifact(&doc);
    }
    Ok(outcome)
}

fn parse_flavor(spec: &ExperimentSpec) -> Result<Flavor, LabError> {
    match spec.flavor.as_deref().unwrap_or("quad") {
        "quad" => Ok(Flavor::Quad),
        "ranked" => Ok(Flavor::Ranked),
        "pair" => Ok(Flavor::Pair),
        other => Err(LabError::Usage(format!("unknown flavor {other:?}; expected quad, ranked or pair"))),
    }
}

/// Builds a generic mapping meeting every `D_α`; for the pair flavor the
/// killing goals of the diagonalization are added when one exists.
fn force(spec: &ExperimentSpec) -> Result<Outcome, LabError> {
    let flavor = parse_flavor(spec)?;
    let default_family = match flavor {
        Flavor::Quad => "interval",
        Flavor::Ranked => "prefix",
        Flavor::Pair => "complete",
    };
    let (f, seeded) = load_mapping(spec, default_family)?;
    let universe = ElementSet::below(f.n());
    let mut goals: Vec<Goal> = universe.iter().map(Goal::Include).collect();
    if flavor == Flavor::Pair {
        if let Some(m) = spec.m {
            if let Diagonalization::Sat { g, .. } = diagonalize_cor3(&f, m, &search_config(spec)?)? {
                goals.extend(setmap_core::forcing::kill_goals(&g));
            }
        }
    }
    let start = Instant::now();
    let f = Arc::new(f);
    let build = generic_build(flavor, &f, universe, &goals)?;
    let mut rows = Vec::new();
    for (i, (support, g)) in build.stages.iter().enumerate() {
        rows.push(case(i, format!("support={support}"), "stage", g.nonempty().count(), "", 0));
    }
    let empty: Vec<String> = build.empty_pairs.iter().map(|p| p.to_string()).collect();
    rows.push(case(
        "final",
        format!("{} goals={}", mapping_params(&f), goals.len()),
        "support",
        build.support,
        empty.join(" "),
        ms(start.elapsed()),
    ));
    let status = if build.support == universe { Status::Pass } else { Status::Fail };
    let outcome = Outcome::new(rows, status).with_artifact(&build.mapping.to_json());
    Ok(if seeded { outcome.seeded() } else { outcome })
}

fn diagonalize(spec: &ExperimentSpec) -> Result<Outcome, LabError> {
    let (f, seeded) = load_mapping(spec, "complete")?;
    let m = spec.m.unwrap_or(3);
    let cfg = search_config(spec)?;
    let start = Instant::now();
    let outcome = match diagonalize_cor3(&f, m, &cfg)? {
        Diagonalization::Sat { g, empty_pairs, nodes } => {
            let remaining = enumerate_free_sets(&g, m, &cfg)?;
            let status = if remaining.is_empty() && g.is_contained_in(&f) {
                Status::Pass
            } else {
                Status::Fail
            };
            let empty: Vec<String> = empty_pairs.iter().map(|p| p.to_string()).collect();
            let row = case("0", format!("{} m={m} nodes={nodes}", mapping_params(&f)), "sat", remaining.len(), empty.join(" "), ms(start.elapsed()));
            Outcome::new(vec![row], status).with_artifact(&g.to_json())
        }
        Diagonalization::Unsat { nodes } => {
            let row = case("0", format!("{} m={m} nodes={nodes}", mapping_params(&f)), "unsat", "", "", ms(start.elapsed()));
            Outcome::new(vec![row], Status::Pass)
        }
    };
    Ok(if seeded { outcome.seeded() } else { outcome })
}

/// Exhaustive when `C(a, r)` is within `--cap-nodes` (default 24, at most 31);
/// otherwise a seeded counterexample search, which can only refute.
fn ramsey(spec: &ExperimentSpec) -> Result<Outcome, LabError> {
    let e = spec.experiment;
    let (a, b, c) = (require(spec.a, "a", e)?, require(spec.b, "b", e)?, require(spec.c, "c", e)?);
    let r = spec.r.unwrap_or(2);
    let params = format!("a={a} b={b} c={c} r={r}");
    let cfg = ArrowConfig {
        cap: spec.cap_nodes.unwrap_or(ArrowConfig::default().cap),
        ..ArrowConfig::default()
    };
    let start = Instant::now();
    match arrow_check_with(a, b, c, r, &cfg) {
        Ok(v) => {
            let (result, status, witness, artifact) = match v.counterexample {
                None => {
                    let cert = if v.holds { "" } else { "missing counterexample" };
                    ("holds", if v.holds { Status::Pass } else { Status::Fail }, cert.to_string(), None)
                }
                Some(cx) => {
                    let ok = cx.is_counterexample(b, c);
                    ("fails", if ok { Status::Pass } else { Status::Fail }, String::new(), Some(cx.to_json()))
                }
            };
            let row = case("0", params, result, v.nodes, witness, ms(start.elapsed()));
            let outcome = Outcome::new(vec![row], status);
            Ok(match artifact {
                Some(doc) => outcome.with_artifact(&doc),
                None => outcome,
            })
        }
        Err(Error::ArrowCap { .. }) => {
            let seed = spec
                .seed
                .ok_or_else(|| LabError::Usage(format!("{params} exceeds the exhaustive cap; pass --seed for a counterexample search")))?;
            let refute = RefuteConfig {
                seed,
                ..RefuteConfig::default()
            };
            match refute_arrow(a, b, c, r, &refute)? {
                Some(cx) => {
                    let status = if cx.is_counterexample(b, c) { Status::Pass } else { Status::Fail };
                    let row = case("0", params, "fails", "", "local search", ms(start.elapsed()));
                    Ok(Outcome::new(vec![row], status).seeded().with_artifact(&cx.to_json()))
                }
                None => {
                    let row = case("0", params, "unknown", "", "no counterexample found", ms(start.elapsed()));
                    Ok(Outcome::new(vec![row], Status::ResourceLimit).seeded())
                }
            }
        }
        Err(e) => Err(e.into()),
    }
}

fn ladder(spec: &ExperimentSpec) -> Result<Outcome, LabError> {
    let n_max = spec.n.unwrap_or(1);
    let mut cfg = LadderConfig::default();
    if let Some(seed) = spec.seed {
        cfg.refute.seed = seed;
    }
    let entries = t_ladder_with(n_max, &cfg);
    let rows = entries
        .iter()
        .map(|e| {
            let kind = if e.exact { "exact" } else { "lower_bound" };
            case(e.index, format!("t_{}", e.index), kind, e.value, "", 0)
        })
        .collect();
    let mut outcome = Outcome::new(rows, Status::Pass);
    outcome.artifact = Some(serde_json::to_value(&entries).expect("ladder serializes"));
    Ok(outcome)
}

fn position_lemma(spec: &ExperimentSpec) -> Result<Outcome, LabError> {
    let top = spec.n.unwrap_or(7);
    let mut rows = Vec::new();
    for size in 5..=top.max(5) {
        let start = Instant::now();
        let (result, witness) = match position_lemma_scan(size) {
            PositionScan::Holds => ("holds", String::new()),
            PositionScan::Fails(i, j) => ("fails", format!("{{{i},{j}}}")),
        };
        rows.push(case(size, format!("size={size}"), result, size, witness, ms(start.elapsed())));
    }
    Ok(Outcome::new(rows, Status::Pass))
}

fn run_acceptance(spec: &ExperimentSpec) -> Result<Outcome, LabError> {
    for id in &spec.criteria {
        if acceptance::criterion(*id).is_none() {
            return Err(LabError::Usage(format!("no acceptance criterion {id}")));
        }
    }
    let cfg = AcceptanceConfig {
        seed: spec.seed.unwrap_or(acceptance::DEFAULT_SEED),
    };
    let outcomes = acceptance::run_all(&spec.criteria, &cfg);
    let status = if outcomes.iter().all(|o| o.passed) { Status::Pass } else { Status::Fail };
    let rows = outcomes
        .iter()
        .map(|o| {
            case(
                o.id,
                format!("{} cases={}", o.name, o.cases),
                if o.passed { "pass" } else { "fail" },
                o.cases,
                &o.detail,
                o.millis,
            )
        })
        .collect();
    Ok(Outcome::new(rows, status).seeded())
}
