use std::fs;
use std::process::{Command, Output};

use setmap_core::constructions::interval_mapping;
use setmap_core::Error;
use setmap_lab::{parse_mapping, run, Experiment, ExperimentSpec, Format, LabError, Report, Status};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_setmap-lab"))
        .args(args)
        .env_remove(setmap_lab::OUT_DIR_ENV)
        .output()
        .expect("binary runs")
}

fn report_of(out: &Output) -> Report {
    serde_json::from_slice(&out.stdout).expect("json report on stdout")
}

#[test]
fn freeset_on_the_interval_mapping_finds_four() {
    let out = lab(&["freeset", "--family", "interval", "--n", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let report = report_of(&out);
    assert_eq!(report.status, Status::Pass);
    assert_eq!(report.cases[0].value, "4");
}

#[test]
fn ladder_prefix_is_exact() {
    let out = lab(&["ladder", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let report = report_of(&out);
    let rungs: Vec<_> = report.cases.iter().map(|c| (c.value.as_str(), c.result.as_str())).collect();
    assert_eq!(rungs, [("5", "exact"), ("7", "exact")]);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(lab(&["no-such-experiment"]).status.code(), Some(2));
    assert_eq!(lab(&["freeset", "--format", "yaml"]).status.code(), Some(2));
    // random corpora need a seed
    assert_eq!(lab(&["freeset", "--family", "random", "--n", "8"]).status.code(), Some(2));
    assert_eq!(lab(&["amalgamate", "--cases", "1"]).status.code(), Some(2));
    assert!("no-such-experiment".parse::<Experiment>().is_err());
}

#[test]
fn exhausted_budget_is_reported_not_raised() {
    let out = lab(&["freeset", "--family", "interval", "--n", "20", "--cap-nodes", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report_of(&out).status, Status::ResourceLimit);
}

#[test]
fn seeded_runs_reproduce() {
    for experiment in [Experiment::Amalgamate, Experiment::Freeset] {
        let mut spec = ExperimentSpec::new(experiment);
        spec.seed = Some(17);
        spec.cases = Some(5);
        spec.n = Some(12);
        spec.family = Some("random".into());
        let a = run(&spec).unwrap().without_timings();
        let b = run(&spec).unwrap().without_timings();
        assert_eq!(a, b);
        assert!(a.generator.is_some());
    }
}

#[test]
fn mapping_files_round_trip_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("interval6.json");
    let f = interval_mapping(6).unwrap();
    fs::write(&path, f.to_json()).unwrap();
    let parsed = parse_mapping(&path).unwrap();
    assert_eq!(parsed, f);
    assert_eq!(parsed.to_json(), f.to_json());

    let out = lab(&["freeset", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report_of(&out).cases[0].value, "4");
}

#[test]
fn invalid_mapping_files_name_the_tuple() {
    let dir = tempfile::tempdir().unwrap();
    let meets = dir.path().join("meets.json");
    fs::write(&meets, r#"{"flags": {"initial_segment": false, "interval_bounded": false}, "images": {"0,1": [1]}, "k": 2, "mu": null, "n": 4}"#).unwrap();
    match parse_mapping(&meets) {
        Err(LabError::Input {
            source: Error::NotDisjoint { tuple, .. },
            ..
        }) => assert_eq!(tuple.to_vec(), [0, 1]),
        other => panic!("{other:?}"),
    }
    let flagged = dir.path().join("flagged.json");
    fs::write(
        &flagged,
        r#"{"flags": {"initial_segment": false, "interval_bounded": true}, "images": {"0,1,2,3": [5]}, "k": 4, "n": 6}"#,
    )
    .unwrap();
    match parse_mapping(&flagged) {
        Err(LabError::Input {
            source: Error::FlagViolation { tuple, .. },
            ..
        }) => assert_eq!(tuple.to_vec(), [0, 1, 2, 3]),
        other => panic!("{other:?}"),
    }
    let out = lab(&["freeset", "--in", flagged.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("{0,1,2,3}"));
}

#[test]
fn out_dir_variable_places_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_setmap-lab"))
        .args(["position-lemma", "--n", "7", "--format", "csv"])
        .env(setmap_lab::OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(dir.path().join("position-lemma.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("experiment,case_id,params,result,value,witness,millis"));
    assert!(text.contains("position-lemma,6,size=6,fails,6,\"{2,3}\""));
    assert!(text.contains("position-lemma,7,size=7,holds"));
}

#[test]
fn explicit_out_path_wins() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("nested").join("r.txt");
    let out = lab(&["ramsey", "--a", "6", "--b", "3", "--c", "3", "--format", "text", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(target).unwrap();
    assert!(text.starts_with("ramsey: Pass"));
    assert!(text.contains("holds"));
}

#[test]
fn every_experiment_runs() {
    let cases: [(&[&str], &str); 8] = [
        (&["construct", "--family", "enumeration", "--n", "8", "--seed", "3"], "descent_violations"),
        (&["construct", "--family", "prefix", "--n", "6"], "nonempty_images"),
        (&["amalgamate", "--flavor", "ranked", "--seed", "2", "--cases", "3"], "valid"),
        (&["force", "--flavor", "quad", "--n", "8"], "support"),
        (&["force", "--flavor", "pair", "--n", "5", "--m", "3"], "support"),
        (&["diagonalize", "--n", "4", "--m", "3"], "sat"),
        (&["diagonalize", "--family", "prefix", "--n", "4", "--m", "3"], "unsat"),
        (&["ramsey", "--a", "5", "--b", "3", "--c", "3"], "fails"),
    ];
    for (args, result) in cases {
        let out = lab(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let report = report_of(&out);
        assert!(report.cases.iter().any(|c| c.result == result), "{args:?}");
    }
}

#[test]
fn acceptance_subset_through_the_cli() {
    let out = lab(&["acceptance", "--criteria", "3,7,10", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains(" pass ")).count(), 3);
    assert_eq!(lab(&["acceptance", "--criteria", "11"]).status.code(), Some(2));
}

#[test]
fn csv_rendering_uses_the_fixed_columns() {
    let mut spec = ExperimentSpec::new(Experiment::Ladder);
    spec.format = Format::Csv;
    let report = run(&spec).unwrap();
    let text = report.render(Format::Csv).unwrap();
    assert!(text.starts_with("experiment,case_id,params,result,value,witness,millis\n"));
    assert_eq!(text.lines().count(), 3);
}
