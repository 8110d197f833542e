use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Freeset,
    Construct,
    Amalgamate,
    Force,
    Diagonalize,
    Ramsey,
    Ladder,
    PositionLemma,
    Acceptance,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Freeset,
        Experiment::Construct,
        Experiment::Amalgamate,
        Experiment::Force,
        Experiment::Diagonalize,
        Experiment::Ramsey,
        Experiment::Ladder,
        Experiment::PositionLemma,
        Experiment::Acceptance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Freeset => "freeset",
            Experiment::Construct => "construct",
            Experiment::Amalgamate => "amalgamate",
            Experiment::Force => "force",
            Experiment::Diagonalize => "diagonalize",
            Experiment::Ramsey => "ramsey",
            Experiment::Ladder => "ladder",
            Experiment::PositionLemma => "position-lemma",
            Experiment::Acceptance => "acceptance",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, LabError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| LabError::Usage(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub experiment: Experiment,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub mu: Option<usize>,
    pub m: Option<usize>,
    pub seed: Option<u64>,
    pub cap_nodes: Option<u64>,
    pub cap_seconds: Option<f64>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Format,
    /// Mapping family: interval, prefix, enumeration, complete or random.
    pub family: Option<String>,
    /// Condition flavor: quad, ranked or pair.
    pub flavor: Option<String>,
    pub a: Option<usize>,
    pub b: Option<usize>,
    pub c: Option<usize>,
    pub r: Option<usize>,
    pub cases: Option<usize>,
    /// Acceptance criteria to run; empty means all.
    pub criteria: Vec<u8>,
}

impl ExperimentSpec {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentSpec {
            experiment,
            n: None,
            k: None,
            mu: None,
            m: None,
            seed: None,
            cap_nodes: None,
            cap_seconds: None,
            input: None,
            output: None,
            format: Format::Json,
            family: None,
            flavor: None,
            a: None,
            b: None,
            c: None,
            r: None,
            cases: None,
            criteria: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A node or time budget ran out before the answer was known.
    ResourceLimit,
}

/// One row of a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case_id: String,
    pub params: String,
    pub result: String,
    pub value: String,
    pub witness: String,
    pub millis: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: Experiment,
    pub spec: ExperimentSpec,
    pub generator: Option<String>,
    pub cases: Vec<CaseResult>,
    pub status: Status,
    pub millis: u64,
    /// A document produced by the run (mapping, condition, coloring).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub artifact: Option<serde_json::Value>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// The report with every timing zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> Report {
        let mut r = self.clone();
        r.millis = 0;
        for c in &mut r.cases {
            c.millis = 0;
        }
        r
    }

    pub fn render(&self, format: Format) -> Result<String, LabError> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(self).expect("report serializes") + "\n"),
            Format::Csv => self.to_csv(),
            Format::Text => Ok(self.to_text()),
        }
    }

    fn to_csv(&self) -> Result<String, LabError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["experiment", "case_id", "params", "result", "value", "witness", "millis"])
            .map_err(LabError::csv)?;
        for c in &self.cases {
            w.write_record([
                self.experiment.name(),
                &c.case_id,
                &c.params,
                &c.result,
                &c.value,
                &c.witness,
                &c.millis.to_string(),
            ])
            .map_err(LabError::csv)?;
        }
        let bytes = w.into_inner().map_err(|e| LabError::Io {
            path: PathBuf::from("<csv>"),
            source: e.into_error(),
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    fn to_text(&self) -> String {
        let mut out = format!("{}: {:?} in {} ms\n", self.experiment, self.status, self.millis);
        let width = self.cases.iter().map(|c| c.case_id.len()).max().unwrap_or(0);
        for c in &self.cases {
            out.push_str(&format!(
                "  {:width$}  {:<12} {:<10} {} {}\n",
                c.case_id, c.result, c.value, c.witness, c.params
            ));
        }
        out
    }
}
