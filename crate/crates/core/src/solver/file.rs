use std::collections::BTreeMap;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use crate::model::OptModel;
use crate::mps::export_standard_form;

use super::{Backend, RawSolution, SolveError, SolveOptions, SolveStats, SolveStatus};

/// Environment variable naming the solver command, e.g. `highs` or
/// `python3 scripts/highs_cli.py`. Whitespace separates program and leading
/// arguments.
pub const SOLVER_ENV: &str = "GASFLEX_SOLVER";

/// Exchanges MPS and solution files with an external solver executable.
///
/// The executable is invoked as
/// `<program> <args..> --model_file model.mps --options_file solver.opt --solution_file model.sol`
/// and must write a HiGHS-style raw solution file. Each solve runs in its own
/// temporary directory.
#[derive(Debug, Clone)]
pub struct FileBackend {
    pub program: PathBuf,
    pub args: Vec<String>,
}

impl FileBackend {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        Self {
            program: program.into(),
            args: Vec::new(),
        }
    }

    /// Parses a whitespace-separated command line.
    pub fn from_command(command: &str) -> Option<Self> {
        let mut parts = command.split_whitespace();
        let program = parts.next()?;
        Some(Self {
            program: program.into(),
            args: parts.map(str::to_string).collect(),
        })
    }

    /// `$GASFLEX_SOLVER` if set, otherwise a `highs` executable on `PATH`.
    pub fn locate() -> Option<Self> {
        if let Ok(cmd) = std::env::var(SOLVER_ENV) {
            return Self::from_command(&cmd);
        }
        let path = std::env::var_os("PATH")?;
        std::env::split_paths(&path)
            .map(|dir| dir.join("highs"))
            .find(|p| p.is_file())
            .map(Self::new)
    }

    fn options_text(options: &SolveOptions) -> String {
        let mut s = format!(
            "mip_rel_gap = {}\ntime_limit = {}\nprimal_feasibility_tolerance = {}\nmip_feasibility_tolerance = {}\n",
            options.mip_gap,
            options.time_limit_secs,
            options.feasibility_tolerance,
            options.feasibility_tolerance
        );
        if let Some(seed) = options.seed {
            s.push_str(&format!("random_seed = {seed}\n"));
        }
        if let Some(t) = options.threads {
            s.push_str(&format!("threads = {t}\n"));
        }
        s
    }

    fn run(&self, dir: &Path) -> Result<(), SolveError> {
        let out = Command::new(&self.program)
            .args(&self.args)
            .arg("--model_file")
            .arg(dir.join("model.mps"))
            .arg("--options_file")
            .arg(dir.join("solver.opt"))
            .arg("--solution_file")
            .arg(dir.join("model.sol"))
            .output()
            .map_err(|e| match e.kind() {
                ErrorKind::NotFound | ErrorKind::PermissionDenied => {
                    SolveError::BackendUnavailable(format!(
                        "cannot run `{}`: {e}",
                        self.program.display()
                    ))
                }
                _ => SolveError::Io(e),
            })?;
        if !out.status.success() {
            let stderr = String::from_utf8_lossy(&out.stderr);
            return Err(SolveError::Failed(format!(
                "`{}` exited with {}: {}",
                self.program.display(),
                out.status,
                stderr.trim()
            )));
        }
        Ok(())
    }
}

impl Backend for FileBackend {
    fn name(&self) -> &str {
        "mps-file"
    }

    fn solve(&self, model: &OptModel, options: &SolveOptions) -> Result<RawSolution, SolveError> {
        options.validate()?;
        let start = Instant::now();
        let dir = tempfile::Builder::new().prefix("gasflex-").tempdir()?;
        let doc = export_standard_form(model);
        std::fs::write(dir.path().join("model.mps"), &doc.text)?;
        std::fs::write(dir.path().join("solver.opt"), Self::options_text(options))?;
        self.run(dir.path())?;
        let text = std::fs::read_to_string(dir.path().join("model.sol"))
            .map_err(|e| SolveError::Parse(format!("no solution file: {e}")))?;
        let parsed = parse_highs_solution(&text)?;
        let stats = SolveStats {
            backend: self.name().to_string(),
            wall_seconds: start.elapsed().as_secs_f64(),
            gap: None,
        };
        if !parsed.status.has_values() {
            return Ok(RawSolution::without_values(parsed.status, stats));
        }
        let Some(by_column) = parsed.values else {
            return match parsed.status {
                SolveStatus::FeasibleLimit => Err(SolveError::NoIncumbent),
                _ => Err(SolveError::Parse(
                    "optimal status without primal values".into(),
                )),
            };
        };
        // Map exported column names back to model names.
        let mut values = BTreeMap::new();
        for (spec, col) in model.variables().iter().zip(&doc.column_names) {
            let v = by_column.get(col).ok_or_else(|| {
                SolveError::Parse(format!("column `{col}` missing from solution"))
            })?;
            values.insert(spec.name.clone(), *v);
        }
        let dense: Vec<f64> = doc.column_names.iter().map(|c| by_column[c]).collect();
        Ok(RawSolution {
            status: parsed.status,
            objective: model.objective_value(&dense),
            values: Some(values),
            stats,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSolution {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub values: Option<BTreeMap<String, f64>>,
}

fn map_status(s: &str) -> SolveStatus {
    match s.trim() {
        "Optimal" | "Empty" => SolveStatus::Optimal,
        "Infeasible" | "Primal infeasible or unbounded" => SolveStatus::Infeasible,
        "Unbounded" => SolveStatus::Unbounded,
        "Time limit reached"
        | "Iteration limit reached"
        | "Solution limit reached"
        | "Interrupted by user" => SolveStatus::FeasibleLimit,
        _ => SolveStatus::Error,
    }
}

/// Parses the raw solution style written by HiGHS (`write_solution_style = 0`).
pub fn parse_highs_solution(text: &str) -> Result<ParsedSolution, SolveError> {
    let lines: Vec<&str> = text.lines().collect();
    let pos = |header: &str| lines.iter().position(|l| l.trim() == header);
    let status_at = pos("Model status")
        .ok_or_else(|| SolveError::Parse("missing `Model status` section".into()))?;
    let status = map_status(
        lines
            .get(status_at + 1)
            .ok_or_else(|| SolveError::Parse("truncated model status".into()))?,
    );

    let Some(primal_at) = pos("# Primal solution values") else {
        return Ok(ParsedSolution {
            status,
            objective: None,
            values: None,
        });
    };
    let mut i = primal_at + 1;
    let feasibility = lines.get(i).map(|l| l.trim()).unwrap_or("None");
    if feasibility == "None" || feasibility == "Infeasible" {
        return Ok(ParsedSolution {
            status,
            objective: None,
            values: None,
        });
    }
    i += 1;
    let mut objective = None;
    if let Some(rest) = lines
        .get(i)
        .and_then(|l| l.trim().strip_prefix("Objective"))
    {
        objective = rest.trim().parse().ok();
        i += 1;
    }
    let count: usize = lines
        .get(i)
        .and_then(|l| l.trim().strip_prefix("# Columns"))
        .and_then(|n| n.trim().parse().ok())
        .ok_or_else(|| SolveError::Parse(format!("expected `# Columns N` at line {}", i + 1)))?;
    let mut values = BTreeMap::new();
    for l in lines.iter().skip(i + 1).take(count) {
        let mut parts = l.split_whitespace();
        let (Some(name), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(SolveError::Parse(format!("bad column line `{l}`")));
        };
        let v: f64 = v
            .parse()
            .map_err(|_| SolveError::Parse(format!("bad value in `{l}`")))?;
        values.insert(name.to_string(), v);
    }
    if values.len() != count {
        return Err(SolveError::Parse(format!(
            "expected {count} columns, found {}",
            values.len()
        )));
    }
    Ok(ParsedSolution {
        status,
        objective,
        values: Some(values),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const OPTIMAL: &str = "Model status
Optimal

# Primal solution values
Feasible
Objective 3
# Columns 2
x 3
y_a_t1 1
# Rows 1
lb 3

# Dual solution values
None
";

    #[test]
    fn parses_optimal_file() {
        let p = parse_highs_solution(OPTIMAL).unwrap();
        assert_eq!(p.status, SolveStatus::Optimal);
        assert_eq!(p.objective, Some(3.0));
        let v = p.values.unwrap();
        assert_eq!(v["x"], 3.0);
        assert_eq!(v["y_a_t1"], 1.0);
    }

    #[test]
    fn parses_infeasible_file() {
        let text = "Model status\nInfeasible\n\n# Primal solution values\nNone\n";
        let p = parse_highs_solution(text).unwrap();
        assert_eq!(p.status, SolveStatus::Infeasible);
        assert!(p.values.is_none());
    }

    #[test]
    fn truncated_columns_rejected() {
        let text = OPTIMAL.replace("# Columns 2", "# Columns 5");
        assert!(parse_highs_solution(&text).is_err());
    }

    #[test]
    fn garbage_rejected() {
        assert!(parse_highs_solution("hello").is_err());
    }

    #[test]
    fn missing_program_is_unavailable() {
        let backend = FileBackend::new("/nonexistent/solver-binary");
        let err = backend
            .solve(&OptModel::new(), &SolveOptions::default())
            .unwrap_err();
        assert!(matches!(err, SolveError::BackendUnavailable(_)), "{err}");
    }

    #[test]
    fn command_parsing() {
        let b = FileBackend::from_command("python3  shim.py").unwrap();
        assert_eq!(b.program, PathBuf::from("python3"));
        assert_eq!(b.args, vec!["shim.py"]);
        assert!(FileBackend::from_command("  ").is_none());
    }
}
