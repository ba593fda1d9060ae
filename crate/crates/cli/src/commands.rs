use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use gasflex::analysis::report::{self, ModeReport, Summary};
use gasflex::analysis::{
    approximation_error_delta, check_exactness, compare_runs, default_flow_tolerance,
    linepack_profile, verify_directions, ApproxErrorReport,
};
use gasflex::formulation::{derive_big_m, FlowModel, FormulationConfig, Symbol};
use gasflex::horizon::{solve_split, RunError};
use gasflex::network::{load_system, validate_system, IntegratedSystem};
use gasflex::solver::{Backend, ScheduleSolution, SolveOptions, SolveStatus};
use gasflex::sweep;

/// `println!` that ignores a closed stdout.
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

/// A failed command and the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

pub const EXIT_INVALID: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_SOLVER: u8 = 4;

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::new(EXIT_IO, format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        let code = match &e {
            _ if e.is_infeasible() => EXIT_INFEASIBLE,
            RunError::Formulation(_) | RunError::InvalidSplit(_) => EXIT_INVALID,
            RunError::Solve(gasflex::solver::SolveError::Io(_)) => EXIT_IO,
            _ => EXIT_SOLVER,
        };
        Self::new(code, e.to_string())
    }
}

/// Everything a solve or compare run needs besides the system.
pub struct RunSettings<'a> {
    pub formulation: FormulationConfig,
    pub options: SolveOptions,
    pub split: Vec<usize>,
    pub backend: &'a dyn Backend,
    pub output: PathBuf,
}

/// Reads, parses and validates a system file.
pub fn load(path: &Path) -> Result<IntegratedSystem, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let sys = load_system(&text)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))?;
    let violations = validate_system(&sys);
    if !violations.is_empty() {
        let mut msg = format!("{}: {} violation(s)", path.display(), violations.len());
        for v in &violations {
            msg.push_str(&format!("\n  {v}"));
        }
        return Err(Failure::new(EXIT_INVALID, msg));
    }
    Ok(sys)
}

pub fn validate(path: &Path) -> Result<(), Failure> {
    let sys = load(path)?;
    say!(
        "{}: valid ({} hours, {} power nodes, {} gas nodes, {} pipelines)",
        sys.name,
        sys.hours,
        sys.power.nodes.len(),
        sys.gas.nodes.len(),
        sys.gas.pipelines.len()
    );
    Ok(())
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Failure::io(&path, e))
}

/// Per-mode analyses of one schedule.
struct Analysed {
    schedule: ScheduleSolution,
    delta: ApproxErrorReport,
    report: ModeReport,
}

fn analyse(
    schedule: ScheduleSolution,
    sys: &IntegratedSystem,
    settings: &RunSettings,
    dir: &Path,
    generated: &str,
) -> Result<Analysed, Failure> {
    let mode = schedule.mode;
    let big_m = derive_big_m(
        sys,
        settings.formulation.pressure_resolution,
        settings.formulation.big_m,
    );
    let delta = approximation_error_delta(&schedule, sys);
    let directions = verify_directions(&schedule, sys, &default_flow_tolerance(&big_m));
    let linepack = linepack_profile(&schedule, sys);
    let initial: Vec<f64> = sys
        .gas
        .pipelines
        .iter()
        .map(|p| p.initial_linepack)
        .collect();
    let exactness = check_exactness(&schedule, sys, &big_m, Some(&initial));
    for c in exactness.failures() {
        log::warn!(
            "{mode}: {} is {:e} at {} (limit {:e})",
            c.name,
            c.worst,
            c.at,
            c.limit
        );
    }
    if !directions.all_consistent() {
        log::warn!(
            "{mode}: {} pipeline-hours flow against the pressure gradient",
            directions.inconsistent
        );
    }

    let doc =
        serde_json::to_string_pretty(&schedule.to_document(sys)).expect("solution serializes");
    write(dir, &format!("solution-{mode}.json"), &(doc + "\n"))?;
    write(
        dir,
        &format!("delta-{mode}.csv"),
        &report::delta_csv(&delta, sys, generated),
    )?;
    write(
        dir,
        &format!("directions-{mode}.csv"),
        &report::directions_csv(&directions, sys, generated),
    )?;
    write(
        dir,
        &format!("direction-changes-{mode}.csv"),
        &report::direction_changes_csv(&directions, sys, generated),
    )?;
    write(
        dir,
        &format!("linepack-{mode}.csv"),
        &report::linepack_csv(&linepack, generated),
    )?;

    let report = ModeReport::solved(&schedule, &delta, &directions, &linepack, &exactness);
    Ok(Analysed {
        schedule,
        delta,
        report,
    })
}

fn summary(sys: &IntegratedSystem, settings: &RunSettings, modes: Vec<ModeReport>) -> Summary {
    Summary {
        schema_version: report::REPORT_SCHEMA_VERSION,
        system: sys.name.clone(),
        hours: sys.hours,
        points: settings.formulation.points,
        tightening: settings.formulation.tightening,
        split: settings.split.clone(),
        modes,
        savings_percent: None,
        gfpp_share_percent_uni: None,
        gfpp_share_percent_bi: None,
    }
}

fn failed_report(mode: FlowModel, err: &Failure) -> ModeReport {
    let status = if err.code == EXIT_INFEASIBLE {
        SolveStatus::Infeasible
    } else {
        SolveStatus::Error
    };
    ModeReport::failed(mode, status, err.message.clone())
}

fn prepare_output(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))
}

fn print_mode(r: &ModeReport) {
    match (r.objective, r.xi) {
        (Some(obj), Some(xi)) => say!(
            "{}: {} cost {obj:.4} Xi {xi:.6} consistency {:.2}% direction changes {}",
            r.mode,
            r.status,
            r.direction_consistency_percent.unwrap_or(0.0),
            r.direction_changes.unwrap_or(0)
        ),
        _ => say!("{}: {}", r.mode, r.status),
    }
}

pub fn solve(path: &Path, mode: FlowModel, settings: &RunSettings) -> Result<(), Failure> {
    let sys = load(path)?;
    let dir = &settings.output;
    prepare_output(dir)?;
    let generated = report::timestamp_now();
    let result = solve_split(
        &sys,
        mode,
        &settings.formulation,
        &settings.options,
        &settings.split,
        settings.backend,
    )
    .map_err(Failure::from);
    let (mode_report, outcome) = match result {
        Ok(schedule) => (
            analyse(schedule, &sys, settings, dir, &generated)?.report,
            Ok(()),
        ),
        Err(e) => (failed_report(mode, &e), Err(e)),
    };
    print_mode(&mode_report);
    write(
        dir,
        "summary.json",
        &summary(&sys, settings, vec![mode_report]).to_json(),
    )?;
    outcome
}

pub fn compare(path: &Path, settings: &RunSettings) -> Result<(), Failure> {
    let sys = load(path)?;
    let dir = &settings.output;
    prepare_output(dir)?;
    let generated = report::timestamp_now();
    let modes = [FlowModel::Unidirectional, FlowModel::Bidirectional];
    let results = sweep::map(&modes, |&mode| {
        solve_split(
            &sys,
            mode,
            &settings.formulation,
            &settings.options,
            &settings.split,
            settings.backend,
        )
        .map_err(Failure::from)
    });

    let mut analysed = Vec::new();
    let mut reports = Vec::new();
    let mut first_failure: Option<Failure> = None;
    for (mode, result) in modes.into_iter().zip(results) {
        match result {
            Ok(schedule) => {
                let a = analyse(schedule, &sys, settings, dir, &generated)?;
                reports.push(a.report.clone());
                analysed.push(a);
            }
            Err(e) => {
                log::error!("{mode}: {e}");
                reports.push(failed_report(mode, &e));
                first_failure.get_or_insert(e);
            }
        }
    }
    reports.iter().for_each(print_mode);
    let mut summary = summary(&sys, settings, reports);

    if let [uni, bi] = &analysed[..] {
        let cmp = compare_runs(&uni.schedule, &bi.schedule, &sys)
            .map_err(|e| Failure::new(EXIT_SOLVER, e.to_string()))?;
        summary.savings_percent = Some(cmp.savings_percent);
        summary.gfpp_share_percent_uni = Some(cmp.uni.gfpp_share_percent);
        summary.gfpp_share_percent_bi = Some(cmp.bi.gfpp_share_percent);
        say!(
            "savings {:.4}% (uni {:.4}, bi {:.4}); GFPP share uni {:.2}% bi {:.2}%",
            cmp.savings_percent,
            cmp.cost_uni,
            cmp.cost_bi,
            cmp.uni.gfpp_share_percent,
            cmp.bi.gfpp_share_percent
        );
        let runs = [("uni", &uni.schedule), ("bi", &bi.schedule)];
        write(
            dir,
            "flows.csv",
            &report::pipeline_series_csv(Symbol::Q, &runs, &sys, &generated),
        )?;
        write(
            dir,
            "linepack-series.csv",
            &report::pipeline_series_csv(Symbol::H, &runs, &sys, &generated),
        )?;
        write(
            dir,
            "delta-difference.csv",
            &report::delta_difference_csv(&uni.delta, &bi.delta, &sys, &generated),
        )?;
        let json = serde_json::to_string_pretty(&cmp).expect("comparison serializes");
        write(dir, "comparison.json", &(json + "\n"))?;
    }
    write(dir, "summary.json", &summary.to_json())?;
    first_failure.map_or(Ok(()), Err)
}
