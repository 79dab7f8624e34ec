use std::path::Path;

use serde::Serialize;

use super::config::{ClassRequest, RunConfig};
use super::oracle::{run_oracle, OracleResult};
use super::output::{file_stem, num, Writer};
use crate::error::{Error, Result};
use crate::lattice::Grid;
use crate::par;
use crate::search::{self, Evaluation, SearchSpace};
use crate::verify::{run_instance, Experiment, Instance, RunSettings, Status};
use crate::weights::{
    a1_constant, ainf_proxy, ap_constant, check_theorem23, MuckenhouptReport, RefinementSweep,
    SampleOptions, StabilityThresholds, Verdict, Weight, WeightFamily, DEFAULT_AINF_LADDER,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Guard { .. } => EXIT_GUARD,
        Error::Budget { .. } => EXIT_BUDGET,
        _ => EXIT_CONFIG,
    }
}

/// A class constant tracked across the refinement ladder.
#[derive(Serialize)]
struct TrackedConstant {
    sweep: RefinementSweep,
    finest: MuckenhouptReport,
}

fn track(
    reports: Vec<MuckenhouptReport>,
    grids: &[Grid],
    th: StabilityThresholds,
) -> Option<TrackedConstant> {
    let values = reports.iter().map(|r| r.constant).collect();
    let cells = grids.iter().map(Grid::cells_per_axis).collect();
    Some(TrackedConstant {
        sweep: RefinementSweep::new(cells, values, th),
        finest: reports.into_iter().last()?,
    })
}

#[derive(Serialize)]
struct WeightEntry<'a> {
    name: &'a str,
    family: &'a WeightFamily,
    constants: Vec<TrackedConstant>,
}

#[derive(Serialize)]
struct CharacterizationEntry<'a> {
    name: &'a str,
    exponents: &'a [f64],
    avecp: TrackedConstant,
    nu: TrackedConstant,
    components: Vec<TrackedConstant>,
}

#[derive(Serialize)]
struct ConstantsReport<'a> {
    weights: Vec<WeightEntry<'a>>,
    characterizations: Vec<CharacterizationEntry<'a>>,
}

fn sample_all(family: &WeightFamily, grids: &[Grid], opts: SampleOptions) -> Result<Vec<Weight>> {
    grids.iter().map(|g| family.sample_with(g, opts)).collect()
}

fn print_sweep(label: &str, s: &RefinementSweep) {
    let values: Vec<String> = s.values.iter().map(|v| format!("{v:.6}")).collect();
    println!("{label}: [{}] {:?}", values.join(", "), s.verdict);
}

pub fn cmd_constants(config: &RunConfig, out: &Path) -> Result<i32> {
    let grids = config.grids()?;
    let family = config.family();
    let th = config.stability;
    let opts = config.settings(false).sample;
    let mut weights = Vec::new();
    for req in &config.weights {
        let ws = sample_all(&req.family, &grids, opts)?;
        let mut constants = Vec::new();
        for class in &req.classes {
            let reports = ws
                .iter()
                .map(|w| match class {
                    ClassRequest::A1 => a1_constant(w, family),
                    ClassRequest::Ap { p } => ap_constant(w, *p, family),
                    ClassRequest::AinfProxy { ladder } => {
                        ainf_proxy(w, family, ladder.as_deref().unwrap_or(&DEFAULT_AINF_LADDER))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let t = track(reports, &grids, th).ok_or_else(|| Error::Config("no grids".into()))?;
            print_sweep(&format!("{} {:?}", req.name, t.finest.class), &t.sweep);
            constants.push(t);
        }
        weights.push(WeightEntry {
            name: &req.name,
            family: &req.family,
            constants,
        });
    }
    let mut characterizations = Vec::new();
    for req in &config.characterizations {
        let per_grid = grids
            .iter()
            .map(|g| {
                let ws = req
                    .weights
                    .iter()
                    .map(|f| f.sample_with(g, opts))
                    .collect::<Result<Vec<_>>>()?;
                check_theorem23(&ws, &req.exponents, family)
            })
            .collect::<Result<Vec<_>>>()?;
        let pick = |f: &dyn Fn(&crate::weights::CharacterizationReport) -> MuckenhouptReport| {
            track(per_grid.iter().map(f).collect(), &grids, th)
                .ok_or_else(|| Error::Config("no grids".into()))
        };
        let avecp = pick(&|r| r.avecp.clone())?;
        let nu = pick(&|r| r.nu.clone())?;
        let components = (0..req.weights.len())
            .map(|i| pick(&|r| r.components[i].clone()))
            .collect::<Result<Vec<_>>>()?;
        print_sweep(&format!("{} A_P", req.name), &avecp.sweep);
        characterizations.push(CharacterizationEntry {
            name: &req.name,
            exponents: &req.exponents,
            avecp,
            nu,
            components,
        });
    }
    let all_finite = weights
        .iter()
        .flat_map(|w| w.constants.iter())
        .chain(characterizations.iter().map(|c| &c.avecp))
        .all(|t| t.sweep.values.iter().all(|v| v.is_finite()));
    let mut writer = Writer::new(out, config)?;
    writer.json(
        "muckenhoupt_report.json",
        ConstantsReport {
            weights,
            characterizations,
        },
    )?;
    Ok(if all_finite { EXIT_OK } else { EXIT_VIOLATION })
}

#[derive(Serialize)]
struct ExperimentSummary<'a> {
    id: &'a str,
    theorem: String,
    hypothesis_stable: bool,
    constants: &'a RefinementSweep,
    statuses: Vec<Status>,
    violations: usize,
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    experiments: Vec<ExperimentSummary<'a>>,
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Ok => "OK",
        Status::HypothesisUnstable => "HypothesisUnstable",
        Status::Degenerate => "Degenerate",
        Status::Violation => "Violation",
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Stable => "stable",
        Verdict::Divergent => "divergent",
        Verdict::Inconclusive => "inconclusive",
    }
}

pub fn run_experiments(config: &RunConfig, settings: &RunSettings) -> Result<Vec<Experiment>> {
    let grids = config.grids()?;
    let mut instances: Vec<Instance> = Vec::new();
    for (k, inst) in config.instances.iter().enumerate() {
        let mut inst = inst.clone();
        if inst.id.is_none() {
            inst.id = Some(format!("{}_{k}", inst.theorem));
        }
        instances.extend(inst.expand());
    }
    par::map_slice(&instances, |inst| run_instance(inst, &grids, settings))
        .into_iter()
        .collect()
}

pub fn cmd_verify(config: &RunConfig, out: &Path, override_guards: bool) -> Result<i32> {
    if config.instances.is_empty() {
        return Err(Error::Config("no instances to verify".into()));
    }
    let experiments = run_experiments(config, &config.settings(override_guards))?;
    let mut writer = Writer::new(out, config)?;
    let mut rows = Vec::new();
    let mut violations = 0;
    for e in &experiments {
        for r in &e.reports {
            let name = format!(
                "report_{}_{}_N{}.json",
                r.theorem_id,
                file_stem(&e.id),
                r.params.cells
            );
            writer.json(&name, r)?;
            rows.push(vec![
                r.theorem_id.to_string(),
                e.id.clone(),
                r.params.cells.to_string(),
                num(r.empirical_constant),
                status_name(r.status).to_string(),
                e.hypothesis_stable.to_string(),
                verdict_name(e.constants.verdict).to_string(),
            ]);
        }
        violations += e.violations();
        print_sweep(&format!("{} {}", e.id, e.theorem), &e.constants);
    }
    let header: Vec<String> = [
        "theorem_id",
        "instance",
        "N",
        "empirical_constant",
        "status",
        "hypothesis_stable",
        "constant_verdict",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    writer.csv("summary.csv", &header, &rows)?;
    writer.json(
        "verify_summary.json",
        VerifySummary {
            experiments: experiments
                .iter()
                .map(|e| ExperimentSummary {
                    id: &e.id,
                    theorem: e.theorem.to_string(),
                    hypothesis_stable: e.hypothesis_stable,
                    constants: &e.constants,
                    statuses: e.reports.iter().map(|r| r.status).collect(),
                    violations: e.violations(),
                })
                .collect(),
        },
    )?;
    if violations > 0 {
        eprintln!("{violations} report(s) with pointwise or containment violations");
        Ok(EXIT_VIOLATION)
    } else {
        Ok(EXIT_OK)
    }
}

fn evaluation_header(
    space: &SearchSpace,
    lead: &[&str],
    verdicts: &[(String, Verdict)],
) -> Vec<String> {
    lead.iter()
        .map(|s| s.to_string())
        .chain(space.axes.iter().map(|a| a.key.to_string()))
        .chain(
            [
                "empirical_constant",
                "objective",
                "status",
                "hypothesis_stable",
                "constant_verdict",
            ]
            .iter()
            .map(|s| s.to_string()),
        )
        .chain(verdicts.iter().map(|(name, _)| format!("verdict[{name}]")))
        .collect()
}

fn evaluation_row(e: &Evaluation) -> Vec<String> {
    e.params
        .iter()
        .map(|p| num(Some(*p)))
        .chain([
            num(e.empirical_constant),
            num(e.objective()),
            status_name(e.status).to_string(),
            e.hypothesis_stable.to_string(),
            verdict_name(e.constant_verdict).to_string(),
        ])
        .chain(e.verdicts.iter().map(|(_, v)| verdict_name(*v).to_string()))
        .collect()
}

/// `threshold,value` ladder of the best instance on the finest grid.
fn write_plot(
    writer: &mut Writer,
    name: &str,
    space: &SearchSpace,
    params: &[f64],
    grids: &[Grid],
    settings: &RunSettings,
) -> Result<()> {
    let inst = space.instantiate(params)?;
    let finest = grids
        .last()
        .ok_or_else(|| Error::Config("no grids".into()))?;
    let report = inst.evaluate(finest, settings)?;
    let rows: Vec<Vec<String>> = report
        .sweep
        .iter()
        .map(|[t, v]| vec![num(Some(*t)), num(Some(*v))])
        .collect();
    writer.csv(name, &["threshold".into(), "value".into()], &rows)
}

pub fn cmd_sweep(config: &RunConfig, out: &Path, override_guards: bool) -> Result<i32> {
    let sweep_cfg = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("the sweep command needs a \"sweep\" section".into()))?;
    let grids = config.grids()?;
    let settings = config.settings(override_guards);
    let rows = search::sweep(&sweep_cfg.space, &grids, &settings, sweep_cfg.budget)?;
    let mut writer = Writer::new(out, config)?;
    let verdicts = rows.first().map(|r| r.verdicts.clone()).unwrap_or_default();
    let header = evaluation_header(&sweep_cfg.space, &["row"], &verdicts);
    let table: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(k, r)| {
            std::iter::once(k.to_string())
                .chain(evaluation_row(r))
                .collect()
        })
        .collect();
    writer.csv("sweep.csv", &header, &table)?;
    if let Some(best) = search::best_row(&rows) {
        write_plot(
            &mut writer,
            "plot_sweep_best.csv",
            &sweep_cfg.space,
            &best.params,
            &grids,
            &settings,
        )?;
        println!(
            "best sweep objective {:.6}",
            best.objective().unwrap_or(f64::NAN)
        );
    }
    println!("{} sweep rows", rows.len());
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct NamedParam {
    param: String,
    value: f64,
}

#[derive(Serialize)]
struct BestState {
    params: Vec<NamedParam>,
    objective: Option<f64>,
    steps: usize,
    accepted: usize,
    instance: Instance,
}

pub fn cmd_search(config: &RunConfig, out: &Path, override_guards: bool) -> Result<i32> {
    let search_cfg = config
        .search
        .as_ref()
        .ok_or_else(|| Error::Config("the search command needs a \"search\" section".into()))?;
    let grids = config.grids()?;
    let settings = config.settings(override_guards);
    let space = &search_cfg.space;
    let initial = match (&search_cfg.initial, search_cfg.start_from_sweep) {
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "\"initial\" and \"start_from_sweep\" are exclusive".into(),
            ))
        }
        (Some(p), None) => p.clone(),
        (None, Some(budget)) => {
            let rows = search::sweep(space, &grids, &settings, budget)?;
            let best = search::best_row(&rows)
                .ok_or_else(|| Error::param("no sweep row has a hypothesis-stable objective"))?;
            best.params.clone()
        }
        (None, None) => {
            let mid: Vec<f64> = space.axes.iter().map(|a| 0.5 * (a.lo + a.hi)).collect();
            search::project(&mid, space, config.grid.dim)?
        }
    };
    let state = search::hill_climb(
        space,
        &initial,
        search_cfg.climb,
        config.seed,
        &grids,
        &settings,
    )?;
    let mut writer = Writer::new(out, config)?;
    let verdicts = state
        .history
        .first()
        .map(|h| h.evaluation.verdicts.clone())
        .unwrap_or_default();
    let header = evaluation_header(space, &["step", "accepted"], &verdicts);
    let rows: Vec<Vec<String>> = state
        .history
        .iter()
        .map(|h| {
            [h.step.to_string(), h.accepted.to_string()]
                .into_iter()
                .chain(evaluation_row(&h.evaluation))
                .collect()
        })
        .collect();
    writer.csv("search_history.csv", &header, &rows)?;
    writer.json(
        "best.json",
        BestState {
            params: space
                .axes
                .iter()
                .zip(&state.params)
                .map(|(a, &value)| NamedParam {
                    param: a.key.to_string(),
                    value,
                })
                .collect(),
            objective: state.objective,
            steps: state.history.len() - 1,
            accepted: state.history.iter().skip(1).filter(|h| h.accepted).count(),
            instance: space.instantiate(&state.params)?,
        },
    )?;
    if state.objective.is_some() {
        write_plot(
            &mut writer,
            "plot_search_best.csv",
            space,
            &state.params,
            &grids,
            &settings,
        )?;
    }
    println!(
        "best objective {} after {} steps",
        num(state.objective),
        state.history.len() - 1
    );
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct OracleReport {
    results: Vec<OracleResult>,
    passed: bool,
}

pub fn cmd_oracle_check(config: &RunConfig, out: &Path) -> Result<i32> {
    let cfg = config.oracle.clone().unwrap_or_default();
    let results = run_oracle(&cfg, config.seed)?;
    for r in &results {
        println!(
            "{} {:<16} {:<16} max discrepancy {:.3e} (tolerance {:.0e})",
            if r.passed { "PASS" } else { "FAIL" },
            r.check,
            r.case,
            r.max_discrepancy,
            r.tolerance
        );
    }
    let passed = results.iter().all(|r| r.passed);
    let mut writer = Writer::new(out, config)?;
    writer.json("oracle_check.json", OracleReport { results, passed })?;
    Ok(if passed { EXIT_OK } else { EXIT_VIOLATION })
}
