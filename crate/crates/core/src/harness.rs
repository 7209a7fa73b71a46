//! Twenty-problem benchmark family and the round-trip runner.
//!
//! [`generate_suite`] enumerates frames from the config's value pools in a
//! fixed order, so a config always yields the same suite. [`run_suite`]
//! pushes each (problem, dialect) cell through compile, emit, parse back,
//! model comparison, and a solve on both sides.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codegen::{emit, Dialect};
use crate::model::{to_canonical_json_value, SectionProperties, SupportKind, COORD_TOL};
use crate::pipeline::compile;
use crate::problem::{FrameProblemSpec, Target, COLUMN_SECTION, GIRDER_SECTION};
use crate::solver::{solutions_equivalent, solve, DEFAULT_SOLUTION_REL_TOL};
use crate::units::UnitSystem;
use crate::verify::{models_equivalent, parse_script};

pub const SUITE_SIZE: usize = 20;
pub const MIN_IRREGULAR: usize = 5;
pub const MIN_DISTINCT: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub bays: Vec<usize>,
    pub stories: Vec<usize>,
    pub bay_widths: Vec<f64>,
    pub story_heights: Vec<f64>,
    /// Irregular problems in the suite, the 3-2-4 frame included.
    pub irregular: usize,
    pub units: UnitSystem,
    pub support: SupportKind,
    pub youngs_modulus: f64,
    pub column_area: f64,
    pub column_inertia: f64,
    pub girder_area: f64,
    pub girder_inertia: f64,
    pub lateral_load_per_floor: f64,
    pub gravity_udl: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            bays: vec![1, 2, 3, 4],
            stories: vec![1, 2, 3, 4, 5, 6],
            bay_widths: vec![5.0, 6.0, 7.5],
            story_heights: vec![3.0, 3.5, 4.0],
            irregular: 8,
            units: UnitSystem::KN_M,
            support: SupportKind::Fixed,
            youngs_modulus: 2.0e8,
            column_area: 0.04,
            column_inertia: 2.0e-4,
            girder_area: 0.03,
            girder_inertia: 1.5e-4,
            lateral_load_per_floor: 10.0,
            gravity_udl: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("CONFIG_ERROR: {0}")]
    Config(String),
}

impl HarnessError {
    pub fn code(&self) -> &'static str {
        "CONFIG_ERROR"
    }
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.message().to_string()))
    }

    fn check(&self) -> Result<(), HarnessError> {
        let err = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.bays.is_empty() || self.stories.is_empty() {
            return err("bay and story pools must be non-empty");
        }
        if self.bay_widths.is_empty() || self.story_heights.is_empty() {
            return err("width and height pools must be non-empty");
        }
        if self.bays.contains(&0) || self.stories.contains(&0) {
            return err("bay and story counts must be positive");
        }
        if !(MIN_IRREGULAR..SUITE_SIZE).contains(&self.irregular) {
            return err(&format!(
                "irregular must be between {MIN_IRREGULAR} and {}",
                SUITE_SIZE - 1
            ));
        }
        if !self.bays.contains(&3) || ![2, 3, 4].iter().all(|s| self.stories.contains(s)) {
            return err("pools must admit the 3-2-4 frame (3 bays; 2, 3 and 4 stories)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchProblem {
    pub name: String,
    pub spec: FrameProblemSpec,
}

fn distinct(v: &[usize]) -> Vec<usize> {
    let set: BTreeSet<usize> = v.iter().copied().collect();
    set.into_iter().collect()
}

/// The 20-problem suite for `config`.
pub fn generate_suite(config: &SuiteConfig) -> Result<Vec<BenchProblem>, HarnessError> {
    config.check()?;
    let bays = distinct(&config.bays);
    let stories = distinct(&config.stories);
    let multi_bay: Vec<usize> = bays.iter().copied().filter(|&b| b >= 2).collect();
    if stories.len() < 2 {
        return Err(HarnessError::Config(
            "irregular frames need two story counts".into(),
        ));
    }

    let spec = |k: usize, stories_per_bay: Vec<usize>| {
        let n_bays = stories_per_bay.len();
        let max = *stories_per_bay.iter().max().expect("non-empty");
        let widths = &config.bay_widths;
        let heights = &config.story_heights;
        FrameProblemSpec {
            units: config.units,
            n_bays,
            bay_widths: (0..n_bays)
                .map(|b| widths[(k + b) % widths.len()])
                .collect(),
            story_heights: (0..max).map(|s| heights[(k + s) % heights.len()]).collect(),
            stories_per_bay,
            support_kind: config.support,
            column_section: SectionProperties::new(
                COLUMN_SECTION,
                config.youngs_modulus,
                config.column_area,
                config.column_inertia,
            ),
            girder_section: SectionProperties::new(
                GIRDER_SECTION,
                config.youngs_modulus,
                config.girder_area,
                config.girder_inertia,
            ),
            lateral_load_per_floor: config.lateral_load_per_floor,
            gravity_udl: config.gravity_udl,
            extra_point_loads: Vec::new(),
            target: Target::All,
        }
    };

    let mut specs = vec![spec(0, vec![3, 2, 4])];
    for j in 1..config.irregular {
        let n = multi_bay[j % multi_bay.len()];
        let mut per_bay: Vec<usize> = (0..n)
            .map(|b| stories[(2 * j + 3 * b + 1) % stories.len()])
            .collect();
        if per_bay.windows(2).all(|w| w[0] == w[1]) {
            let k = stories
                .iter()
                .position(|&s| s == per_bay[n - 1])
                .expect("from pool");
            per_bay[n - 1] = stories[(k + 1) % stories.len()];
        }
        specs.push(spec(j, per_bay));
    }
    for k in 0..SUITE_SIZE - config.irregular {
        let n = bays[k % bays.len()];
        let s = stories[(k + k / bays.len()) % stories.len()];
        specs.push(spec(k, vec![s; n]));
    }

    let irregular = specs.iter().filter(|s| !s.is_regular()).count();
    let bay_counts = distinct(&specs.iter().map(|s| s.n_bays).collect::<Vec<_>>());
    let story_counts = distinct(&specs.iter().map(|s| s.max_stories()).collect::<Vec<_>>());
    if irregular < MIN_IRREGULAR {
        return Err(HarnessError::Config(format!(
            "suite has {irregular} irregular frames, need {MIN_IRREGULAR}"
        )));
    }
    if bay_counts.len() < MIN_DISTINCT || story_counts.len() < MIN_DISTINCT {
        return Err(HarnessError::Config(format!(
            "suite needs {MIN_DISTINCT} distinct bay and story counts, has {} and {}",
            bay_counts.len(),
            story_counts.len()
        )));
    }

    specs
        .into_iter()
        .enumerate()
        .map(|(i, spec)| {
            spec.validate()
                .map_err(|e| HarnessError::Config(format!("problem {}: {e}", i + 1)))?;
            Ok(BenchProblem {
                name: format!("P{:02}", i + 1),
                spec,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemSummary {
    pub name: String,
    pub n_bays: usize,
    pub stories_per_bay: Vec<usize>,
    pub bay_widths: Vec<f64>,
    pub story_heights: Vec<f64>,
    pub nodes: usize,
    pub elements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchCell {
    pub problem: String,
    pub dialect: Dialect,
    pub emitted: bool,
    pub parsed_back: bool,
    pub model_equivalent: bool,
    pub solution_equivalent: bool,
    pub max_rel_diff: Option<f64>,
    pub failure: Option<String>,
    /// Wall time; left out of the JSON report so repeats compare equal.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl BenchCell {
    pub fn passed(&self) -> bool {
        self.emitted && self.parsed_back && self.model_equivalent && self.solution_equivalent
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub problems: Vec<ProblemSummary>,
    pub cells: Vec<BenchCell>,
    /// Fraction of problems whose cell passed, per dialect.
    pub accuracy: BTreeMap<Dialect, f64>,
    pub all_passed: bool,
}

fn run_cell(
    problem: &BenchProblem,
    compiled: &Result<(crate::model::FrameModel, crate::solver::SolutionState), String>,
    dialect: Dialect,
    tol: f64,
) -> BenchCell {
    let start = Instant::now();
    let mut cell = BenchCell {
        problem: problem.name.clone(),
        dialect,
        emitted: false,
        parsed_back: false,
        model_equivalent: false,
        solution_equivalent: false,
        max_rel_diff: None,
        failure: None,
        elapsed: Duration::ZERO,
    };
    let outcome = (|| -> Result<(), String> {
        let (model, solution) = compiled.as_ref().map_err(Clone::clone)?;
        let script = emit(model, dialect, tol).map_err(|e| e.to_string())?;
        cell.emitted = true;
        let back = parse_script(dialect, &script.text).map_err(|e| e.to_string())?;
        cell.parsed_back = true;
        let report = models_equivalent(model, &back, tol);
        if !report.equivalent {
            return Err(format!("{} model mismatch(es)", report.mismatches.len()));
        }
        cell.model_equivalent = true;
        let back_solution = solve(&back).map_err(|e| e.to_string())?;
        let cmp = solutions_equivalent(
            model,
            solution,
            &back,
            &back_solution,
            tol,
            DEFAULT_SOLUTION_REL_TOL,
        )
        .map_err(|e| e.to_string())?;
        cell.max_rel_diff = Some(cmp.max_rel_diff);
        if !cmp.equivalent {
            return Err(format!("{} solution mismatch(es)", cmp.mismatches.len()));
        }
        cell.solution_equivalent = true;
        Ok(())
    })();
    cell.failure = outcome.err();
    cell.elapsed = start.elapsed();
    cell
}

/// Runs every (problem, dialect) cell. Cells run concurrently; the report
/// lists them problem-major in suite and `dialects` order.
pub fn run_suite(problems: &[BenchProblem], dialects: &[Dialect], tol: f64) -> BenchReport {
    let per_problem: Vec<(ProblemSummary, Vec<BenchCell>)> = problems
        .par_iter()
        .map(|p| {
            let compiled = compile(&p.spec, tol)
                .map_err(|e| e.to_string())
                .and_then(|c| {
                    let s = solve(&c.model).map_err(|e| e.to_string())?;
                    Ok((c.model, s))
                });
            let summary = ProblemSummary {
                name: p.name.clone(),
                n_bays: p.spec.n_bays,
                stories_per_bay: p.spec.stories_per_bay.clone(),
                bay_widths: p.spec.bay_widths.clone(),
                story_heights: p.spec.story_heights.clone(),
                nodes: compiled.as_ref().map_or(0, |(m, _)| m.nodes.len()),
                elements: compiled.as_ref().map_or(0, |(m, _)| m.elements.len()),
            };
            let cells = dialects
                .par_iter()
                .map(|&d| run_cell(p, &compiled, d, tol))
                .collect();
            (summary, cells)
        })
        .collect();

    let (summaries, cells): (Vec<_>, Vec<Vec<_>>) = per_problem.into_iter().unzip();
    let cells: Vec<BenchCell> = cells.into_iter().flatten().collect();
    let accuracy = dialects
        .iter()
        .map(|&d| {
            let mine: Vec<&BenchCell> = cells.iter().filter(|c| c.dialect == d).collect();
            let ok = mine.iter().filter(|c| c.passed()).count();
            let acc = if mine.is_empty() {
                0.0
            } else {
                ok as f64 / mine.len() as f64
            };
            (d, acc)
        })
        .collect();
    let all_passed = cells.iter().all(BenchCell::passed);
    BenchReport {
        problems: summaries,
        cells,
        accuracy,
        all_passed,
    }
}

/// Default tolerance entry point.
pub fn run_default(dialects: &[Dialect]) -> Result<BenchReport, HarnessError> {
    let suite = generate_suite(&SuiteConfig::default())?;
    Ok(run_suite(&suite, dialects, COORD_TOL))
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        to_canonical_json_value(self)
    }

    pub fn total_elapsed(&self) -> Duration {
        self.cells.iter().map(|c| c.elapsed).sum()
    }

    /// Fixed-width table, one row per cell, then per-dialect accuracy.
    /// With `timings`, a wall-time column is added.
    pub fn to_table(&self, timings: bool) -> String {
        let mark = |b: bool| if b { "yes" } else { "NO" };
        let mut s = String::new();
        let _ = write!(
            s,
            "{:<8}{:<14}{:<8}{:<8}{:<8}{:<8}{:<6}",
            "problem", "dialect", "emit", "parse", "model", "solve", "pass"
        );
        if timings {
            let _ = write!(s, "{:>10}", "ms");
        }
        s.push('\n');
        for c in &self.cells {
            let _ = write!(
                s,
                "{:<8}{:<14}{:<8}{:<8}{:<8}{:<8}{:<6}",
                c.problem,
                c.dialect.name(),
                mark(c.emitted),
                mark(c.parsed_back),
                mark(c.model_equivalent),
                mark(c.solution_equivalent),
                mark(c.passed())
            );
            if timings {
                let _ = write!(s, "{:>10.3}", c.elapsed.as_secs_f64() * 1e3);
            }
            s.truncate(s.trim_end().len());
            s.push('\n');
        }
        s.push('\n');
        for (d, acc) in &self.accuracy {
            let _ = writeln!(s, "accuracy {:<14}{:>7.2}%", d.name(), acc * 100.0);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_shape() {
        let suite = generate_suite(&SuiteConfig::default()).unwrap();
        assert_eq!(suite.len(), SUITE_SIZE);
        assert_eq!(suite[0].spec.stories_per_bay, vec![3, 2, 4]);
        let irregular = suite.iter().filter(|p| !p.spec.is_regular()).count();
        assert_eq!(irregular, 8);
        let bays: BTreeSet<_> = suite.iter().map(|p| p.spec.n_bays).collect();
        let stories: BTreeSet<_> = suite.iter().map(|p| p.spec.max_stories()).collect();
        assert_eq!(bays.len(), 4);
        assert!(stories.len() >= 5);
        let names: Vec<_> = suite.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names[0], "P01");
        assert_eq!(names[19], "P20");
    }

    #[test]
    fn suite_is_deterministic() {
        let c = SuiteConfig::default();
        assert_eq!(generate_suite(&c).unwrap(), generate_suite(&c).unwrap());
    }

    #[test]
    fn empty_bay_pool_is_a_config_error() {
        let c = SuiteConfig {
            bays: vec![],
            ..SuiteConfig::default()
        };
        assert_eq!(generate_suite(&c).unwrap_err().code(), "CONFIG_ERROR");
    }

    #[test]
    fn pools_without_diversity_are_rejected() {
        let c = SuiteConfig {
            bays: vec![3],
            ..SuiteConfig::default()
        };
        assert!(generate_suite(&c).is_err());
        let c = SuiteConfig {
            irregular: 2,
            ..SuiteConfig::default()
        };
        assert!(generate_suite(&c).is_err());
    }

    #[test]
    fn toml_overrides_defaults_and_rejects_unknown_keys() {
        let c = SuiteConfig::from_toml("gravity_udl = 7.5\nbay_widths = [4.0, 8.0]\n").unwrap();
        assert_eq!(c.gravity_udl, 7.5);
        assert_eq!(c.bay_widths, vec![4.0, 8.0]);
        assert_eq!(c.bays, SuiteConfig::default().bays);
        assert_eq!(
            SuiteConfig::from_toml("bayz = [1]").unwrap_err().code(),
            "CONFIG_ERROR"
        );
    }

    #[test]
    fn single_dialect_report_has_twenty_cells() {
        let report = run_default(&[Dialect::OpenseesTcl]).unwrap();
        assert_eq!(report.cells.len(), SUITE_SIZE);
        assert!(report.all_passed, "{}", report.to_table(false));
        assert_eq!(report.accuracy[&Dialect::OpenseesTcl], 1.0);
    }

    #[test]
    fn table_lists_every_cell() {
        let suite = generate_suite(&SuiteConfig::default()).unwrap();
        let report = run_suite(&suite[..2], &Dialect::ALL, COORD_TOL);
        let table = report.to_table(false);
        assert_eq!(table.lines().filter(|l| l.starts_with('P')).count(), 6);
        assert!(table.contains("accuracy etabs_e2k"));
    }
}
