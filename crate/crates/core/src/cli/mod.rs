//! Command-line front end: loads a system document, dispatches to the
//! library and assembles a JSON report.
//!
//! Each section of a report is computed independently. A failing section is
//! recorded under `errors` with its machine-readable code and the process
//! exits with the code of the first failure.

pub mod document;

use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::analysis::{circle_profile, is_coinner, is_inner, uniqueness_certificate, DEFAULT_GRID_STEPS};
use crate::error::{Error, Result};
use crate::riccati::{equality_gap, membership, StorageOperator, Tolerances};
use crate::solver::{duality_check, maximal_solution, minimal_solution, re_set, ExtremalSolution, SolverConfig};
use crate::sysmodel::{dissipation_check, is_minimal, is_passive, schur_class_margin, simulate, SystemRealization};

pub use document::{parse_inputs, parse_system, write_document, InputDocument, SystemDocument};
use document::{from_matrix, from_vector, to_vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Analyze,
    Check,
    SolveRe,
    Extremes,
    Simulate,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Check => "check",
            Command::SolveRe => "solve-re",
            Command::Extremes => "extremes",
            Command::Simulate => "simulate",
            Command::Report => "report",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub grid_steps: usize,
    /// Polar grid used for the interior Schur-class check.
    pub schur_steps: usize,
    pub schur_radius: f64,
    pub candidate: Option<String>,
    pub inputs: Option<String>,
    #[serde(skip)]
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            solver: SolverConfig::default(),
            grid_steps: DEFAULT_GRID_STEPS,
            schur_steps: 64,
            schur_radius: 0.99,
            candidate: None,
            inputs: None,
            timings: true,
        }
    }
}

impl RunConfig {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.solver.tolerances = Tolerances::scaled(tol);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.solver.seed = seed;
        self
    }

    fn tols(&self) -> &Tolerances {
        &self.solver.tolerances
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub value: Value,
    /// 0 when every section succeeded, otherwise the code of the first
    /// failure.
    pub exit_code: i32,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.value).expect("report values are serializable") + "\n"
    }
}

pub fn error_value(e: &Error) -> Value {
    json!({ "code": e.code(), "category": e.category(), "message": e.to_string() })
}

/// Report for a failure before any section ran.
pub fn error_report(e: &Error) -> Report {
    Report { value: json!({ "error": error_value(e) }), exit_code: e.code() }
}

struct Builder<'a> {
    config: &'a RunConfig,
    results: Map<String, Value>,
    errors: Vec<Value>,
    timings: Map<String, Value>,
    exit_code: i32,
}

impl<'a> Builder<'a> {
    fn section(&mut self, name: &str, f: impl FnOnce() -> Result<Value>) {
        let start = Instant::now();
        let outcome = f();
        self.timings.insert(name.to_string(), json!(start.elapsed().as_secs_f64()));
        match outcome {
            Ok(v) => {
                self.results.insert(name.to_string(), v);
            }
            Err(e) => {
                if self.exit_code == 0 {
                    self.exit_code = e.code();
                }
                let mut v = error_value(&e);
                v["section"] = json!(name);
                self.errors.push(v);
            }
        }
    }
}

fn storage_value(h: &StorageOperator) -> Value {
    json!(from_matrix(h.matrix()))
}

fn extremal_value(s: &ExtremalSolution) -> Value {
    json!({
        "H": storage_value(&s.storage),
        "iterations": s.iterations,
        "residual": s.residual,
        "certificate": s.certificate,
    })
}

fn candidate(doc: &SystemDocument, name: &str, tols: &Tolerances) -> Result<StorageOperator> {
    let (_, h) = doc
        .candidate_operators()?
        .into_iter()
        .find(|(n, _)| n == name)
        .ok_or_else(|| Error::InvalidArgument(format!("no candidate named {name:?}")))?;
    StorageOperator::with_tolerance(h, tols.pd_tol)
}

fn check_value(sigma: &SystemRealization, h: &StorageOperator, tols: &Tolerances) -> Result<Value> {
    let verdict = membership(sigma, h, tols)?;
    let gap = if verdict.in_ri { Some(equality_gap(sigma, h, tols)?) } else { None };
    let mut v = serde_json::to_value(&verdict).expect("serializable");
    v["equalityGap"] = json!(gap);
    Ok(v)
}

fn analyze(b: &mut Builder, sigma: &SystemRealization) {
    let cfg = b.config;
    let tols = *cfg.tols();
    b.section("minimality", || Ok(json!(is_minimal(sigma, tols.minimal_tol))));
    b.section("passivity", || Ok(json!(is_passive(sigma, tols.tol))));
    b.section("schurMargin", || {
        let sup = schur_class_margin(sigma, cfg.schur_steps, cfg.schur_radius)?;
        Ok(json!({ "sup": sup, "schurClassOnGrid": sup <= 1.0 + tols.tol }))
    });
    let profile = circle_profile(sigma, cfg.grid_steps);
    b.section("circleProfile", || {
        let p = profile.clone()?;
        Ok(json!({
            "gridSteps": cfg.grid_steps,
            "maxDefectRight": p.max_defect_right,
            "maxDefectLeft": p.max_defect_left,
            "minDefectRight": p.min_defect_right(),
            "inner": is_inner(&p, tols.tol),
            "coInner": is_coinner(&p, tols.tol),
        }))
    });
    b.section("uniqueness", || {
        let cert = uniqueness_certificate(sigma, &profile?, tols.tol, &cfg.solver)?;
        let mut v = serde_json::to_value(&cert).expect("serializable");
        v["solution"] = json!(cert.solution.as_ref().map(storage_value));
        Ok(v)
    });
}

fn solve(b: &mut Builder, sigma: &SystemRealization) {
    let cfg = b.config;
    b.section("solveRe", || {
        let set = re_set(sigma, &cfg.solver)?;
        Ok(json!({
            "members": set.members.iter().map(storage_value).collect::<Vec<_>>(),
            "provenance": set.provenance,
            "comparisons": set.comparisons,
            "minimalIndex": set.minimal_index,
            "maximalIndex": set.maximal_index,
            "warnings": set.warnings,
        }))
    });
}

fn extremes(b: &mut Builder, sigma: &SystemRealization) {
    let cfg = b.config;
    b.section("minimalSolution", || Ok(extremal_value(&minimal_solution(sigma, &cfg.solver)?)));
    b.section("maximalSolution", || Ok(extremal_value(&maximal_solution(sigma, &cfg.solver)?)));
    b.section("duality", || {
        let d = duality_check(sigma, &cfg.solver)?;
        let mats = |v: &[crate::linalg::CMatrix]| v.iter().map(from_matrix).collect::<Vec<_>>();
        Ok(json!({
            "samplesChecked": d.samples.len(),
            "allPassed": d.all_passed,
            "reSigma": mats(&d.re_sigma),
            "reAdjoint": mats(&d.re_adjoint),
            "reInverseImage": mats(&d.re_inverse_image),
            "reSetsCoincide": d.re_sets_coincide,
        }))
    });
}

fn check(b: &mut Builder, sigma: &SystemRealization, doc: &SystemDocument, names: &[String]) {
    let tols = *b.config.tols();
    for name in names {
        b.section(&format!("check:{name}"), || check_value(sigma, &candidate(doc, name, &tols)?, &tols));
    }
}

fn simulation(b: &mut Builder, sigma: &SystemRealization, doc: &SystemDocument, inputs: Option<&InputDocument>) {
    let tols = *b.config.tols();
    b.section("simulation", || {
        let inputs = inputs.ok_or_else(|| Error::InvalidArgument("simulate requires an input file".into()))?;
        let us: Vec<_> = inputs.inputs.iter().map(|u| to_vector(u)).collect();
        let traj = simulate(sigma, &to_vector(&inputs.x0), &us)?;
        let mut dissipation = Map::new();
        for (name, h) in doc.candidate_operators()? {
            let v = match dissipation_check(&traj, &h, tols.tol) {
                Ok(r) => json!(r),
                Err(e) => json!({ "error": error_value(&e) }),
            };
            dissipation.insert(name, v);
        }
        Ok(json!({
            "states": traj.states.iter().map(from_vector).collect::<Vec<_>>(),
            "outputs": traj.outputs.iter().map(from_vector).collect::<Vec<_>>(),
            "dissipation": dissipation,
        }))
    });
}

/// Runs `command` on `doc`.
pub fn run(command: Command, doc: &SystemDocument, inputs: Option<&InputDocument>, config: &RunConfig) -> Report {
    let sigma = match doc.realization() {
        Ok(s) => s,
        Err(e) => return error_report(&e),
    };
    let mut b = Builder { config, results: Map::new(), errors: Vec::new(), timings: Map::new(), exit_code: 0 };
    let all_candidates: Vec<String> =
        doc.candidates.iter().flatten().map(|c| c.name.clone()).collect();
    match command {
        Command::Analyze => analyze(&mut b, &sigma),
        Command::Check => match &config.candidate {
            Some(name) => check(&mut b, &sigma, doc, std::slice::from_ref(name)),
            None => b.section("check", || Err(Error::InvalidArgument("check requires --candidate".into()))),
        },
        Command::SolveRe => solve(&mut b, &sigma),
        Command::Extremes => extremes(&mut b, &sigma),
        Command::Simulate => simulation(&mut b, &sigma, doc, inputs),
        Command::Report => {
            analyze(&mut b, &sigma);
            check(&mut b, &sigma, doc, &all_candidates);
            solve(&mut b, &sigma);
            extremes(&mut b, &sigma);
            if inputs.is_some() {
                simulation(&mut b, &sigma, doc, inputs);
            }
        }
    }
    let mut value = json!({
        "command": command.name(),
        "system": { "name": doc.name, "n": sigma.n(), "m": sigma.m(), "p": sigma.p() },
        "config": config,
        "results": b.results,
        "errors": b.errors,
    });
    if config.timings {
        value["timings"] = Value::Object(b.timings);
    }
    Report { value, exit_code: b.exit_code }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{coinner_row, scalar_interval, two_state};

    fn fast() -> RunConfig {
        RunConfig { grid_steps: 256, schur_steps: 16, timings: false, ..RunConfig::default() }
    }

    #[test]
    fn extremes_of_scalar_interval() {
        let doc = SystemDocument::from_system("scalar", &scalar_interval());
        let r = run(Command::Extremes, &doc, None, &fast());
        assert_eq!(r.exit_code, 0, "{}", r.to_json());
        let lo = r.value["results"]["minimalSolution"]["H"][0][0][0].as_f64().unwrap();
        let hi = r.value["results"]["maximalSolution"]["H"][0][0][0].as_f64().unwrap();
        assert!((lo - 3.0 / 64.0).abs() < 1e-9 && (hi - 0.75).abs() < 1e-9);
        assert_eq!(r.value["results"]["duality"]["reSetsCoincide"], json!(false));
    }

    #[test]
    fn identity_candidate_solves_equality() {
        let mut doc = SystemDocument::from_system("two-state", &two_state(0.6, 0.8));
        doc.candidates = Some(vec![document::Candidate {
            name: "I".into(),
            h: from_matrix(&crate::linalg::identity(2)),
        }]);
        let cfg = RunConfig { candidate: Some("I".into()), ..fast() };
        let r = run(Command::Check, &doc, None, &cfg);
        assert_eq!(r.exit_code, 0);
        assert_eq!(r.value["results"]["check:I"]["inRE"], json!(true));
    }

    #[test]
    fn missing_candidate_sets_exit_code() {
        let doc = SystemDocument::from_system("s", &scalar_interval());
        let cfg = RunConfig { candidate: Some("nope".into()), ..fast() };
        let r = run(Command::Check, &doc, None, &cfg);
        assert_eq!(r.exit_code, Error::InvalidArgument(String::new()).code());
        assert_eq!(r.value["errors"][0]["category"], json!("InvalidArgument"));
    }

    #[test]
    fn analyze_coinner_row() {
        let doc = SystemDocument::from_system("row", &coinner_row());
        let r = run(Command::Analyze, &doc, None, &fast());
        assert_eq!(r.exit_code, 0, "{}", r.to_json());
        assert_eq!(r.value["results"]["circleProfile"]["coInner"], json!(true));
        assert_eq!(r.value["results"]["uniqueness"]["verdict"], json!("UniqueSingleton"));
    }

    #[test]
    fn reports_are_reproducible() {
        let doc = SystemDocument::from_system("two-state", &two_state(0.6, 0.8));
        let a = run(Command::SolveRe, &doc, None, &fast()).to_json();
        let b = run(Command::SolveRe, &doc, None, &fast()).to_json();
        assert_eq!(a, b);
        assert!(!a.contains("timings"));
    }
}
