use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use stiffness_lab::certificates::{trace_along, Certificate};
use stiffness_lab::criteria::{chetaev_instability_check, thm1_check, thm2_check, DEFAULT_CRITERIA_GRID};
use stiffness_lab::io::{fmt17, line_plot_svg, write_trajectory_csv};
use stiffness_lab::oracles::ClosedFormSolution;
use stiffness_lab::parallel::Execution;
use stiffness_lab::sweep::{run_sweep, write_sweep_csv, SweepSpec};
use stiffness_lab::transform::{base_problem, corollary_condition_check, equivalence_check, reparametrize};
use stiffness_lab::{
    integrate, CoefficientProfile, Error, ExampleFamily, Gauge, GaugeDirection, IntegrationConfig, PlanarState,
    Window,
};

#[derive(Parser)]
#[command(name = "stiffness-lab", version, about = "Boundedness and instability analysis for x'' + a(t)x' - k(t)x = 0")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a condition set on a window and print the report as JSON.
    Analyze(AnalyzeArgs),
    /// Integrate, write the trajectory CSV and a classification report.
    Simulate(SimulateArgs),
    /// Integrate and print only the classification report.
    Classify(SystemArgs),
    /// Compare a closed-form solution with the integrator.
    OracleCompare(OracleArgs),
    /// Print the reparametrized coefficients and optionally check equivalence.
    Transform(TransformArgs),
    /// Scan beta and omega^2 for an example family.
    Sweep(SweepArgs),
}

#[derive(Args)]
#[command(group(ArgGroup::new("criterion").required(true).args(["thm1", "thm2", "corollary", "chetaev"])))]
struct AnalyzeArgs {
    /// Constant damping beta with time-varying stiffness k(t).
    #[arg(long)]
    thm1: bool,
    /// Constant stiffness omega^2 with time-varying damping alpha(t).
    #[arg(long)]
    thm2: bool,
    /// Reparametrized equation built from a gauge profile.
    #[arg(long)]
    corollary: bool,
    /// Instability test for increasing k(t) with constant damping.
    #[arg(long)]
    chetaev: bool,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Stiffness profile: inline ("powerlaw a=1 p=-1"), JSON, or a JSON file path.
    #[arg(long)]
    k: Option<String>,
    /// Damping profile, same formats as --k.
    #[arg(long)]
    alpha: Option<String>,
    #[command(flatten)]
    gauge: GaugeArgs,
    #[arg(long, num_args = 2, value_names = ["START", "END"], allow_negative_numbers = true)]
    window: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_CRITERIA_GRID)]
    grid: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GaugeArgs {
    /// Gauge profile f or g.
    #[arg(long)]
    gauge: Option<String>,
    /// Gauge exponent n.
    #[arg(long, allow_negative_numbers = true)]
    n: Option<f64>,
    /// Which base problem the gauge maps from.
    #[arg(long, value_enum, default_value_t = Base::Damping)]
    base: Base,
}

#[derive(Clone, Copy, ValueEnum)]
enum Base {
    /// Constant damping, decreasing gauge.
    Damping,
    /// Constant stiffness, increasing gauge.
    Stiffness,
}

impl GaugeArgs {
    fn build(&self) -> Result<Gauge, Error> {
        let profile = parse_profile(required(&self.gauge, "--gauge")?)?;
        let n = *required(&self.n, "--n")?;
        let direction = match self.base {
            Base::Damping => GaugeDirection::Thm1Base,
            Base::Stiffness => GaugeDirection::Thm2Base,
        };
        Gauge::new(profile, n, direction)
    }
}

#[derive(Args)]
struct SystemArgs {
    /// Example family, e.g. "ex3 beta=3 omega=1 m=1"; replaces --alpha/--k.
    #[arg(long, conflicts_with_all = ["alpha", "k"])]
    family: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    k: Option<String>,
    /// Initial state t0 x1 x2. With --family, t0 defaults to the family's start time.
    #[arg(long, num_args = 2..=3, value_names = ["T0", "X1", "X2"], allow_negative_numbers = true)]
    x0: Vec<f64>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON file with a full integration config; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    r_escape: Option<f64>,
    #[arg(long)]
    bound_factor: Option<f64>,
    #[arg(long)]
    max_steps: Option<u64>,
    /// Record states on a uniform grid with this spacing.
    #[arg(long)]
    sample_dt: Option<f64>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<IntegrationConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => serde_json::from_str(&read_file(path)?)
                .map_err(|e| Error::InvalidArgument(format!("bad config JSON in {}: {e}", path.display())))?,
            None => IntegrationConfig::default(),
        };
        if let Some(v) = self.horizon {
            cfg.horizon = v;
        }
        if let Some(v) = self.rel_tol {
            cfg.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            cfg.abs_tol = v;
        }
        if self.r_escape.is_some() {
            cfg.r_escape = self.r_escape;
        }
        if let Some(v) = self.bound_factor {
            cfg.bound_factor = v;
        }
        if let Some(v) = self.max_steps {
            cfg.max_steps = v;
        }
        if self.sample_dt.is_some() {
            cfg.sample_dt = self.sample_dt;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Trajectory CSV (t,x1,x2).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Classification report; stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Line plot of x1(t).
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Certificate to evaluate along the trajectory.
    #[arg(long, value_enum, requires = "certificate_csv")]
    certificate: Option<CertificateChoice>,
    #[arg(long, requires = "certificate")]
    certificate_csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CertificateChoice {
    /// Needs constant damping.
    LyapunovK,
    /// Needs constant stiffness.
    LyapunovAlpha,
    /// Needs constant damping.
    Chetaev,
}

#[derive(Args)]
struct OracleArgs {
    /// Family with a closed form: ex3 (m=2), ex4 or ex5x.
    #[arg(long)]
    family: String,
    #[arg(long, num_args = 2..=3, value_names = ["T0", "X1", "X2"], allow_negative_numbers = true)]
    x0: Vec<f64>,
    #[command(flatten)]
    config: ConfigArgs,
    /// Difference CSV; stdout when omitted (the summary then goes to stderr).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    gauge: GaugeArgs,
    #[arg(long, allow_negative_numbers = true)]
    beta: f64,
    #[arg(long, allow_negative_numbers = true)]
    omega: f64,
    /// Run the equivalence check on this tau window.
    #[arg(long, num_args = 2, value_names = ["START", "END"], allow_negative_numbers = true)]
    equivalence: Vec<f64>,
    /// y(tau0) and y'(tau0) for the equivalence check.
    #[arg(long, num_args = 2, value_names = ["Y", "DY"], allow_negative_numbers = true, default_values_t = [1.0, 0.0])]
    y0: Vec<f64>,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Template family; its beta and omega are replaced at each grid point.
    #[arg(long)]
    family: String,
    /// Comma-separated values or START:END:COUNT.
    #[arg(long, allow_hyphen_values = true)]
    betas: String,
    #[arg(long, allow_hyphen_values = true)]
    omega2s: String,
    #[arg(long, num_args = 2, value_names = ["X1", "X2"], allow_negative_numbers = true, default_values_t = [1.0, 0.0])]
    x0: Vec<f64>,
    /// Criteria window; defaults to [t0, horizon].
    #[arg(long, num_args = 2, value_names = ["START", "END"], allow_negative_numbers = true)]
    window: Vec<f64>,
    #[command(flatten)]
    config: ConfigArgs,
    /// Evaluate grid points on the calling thread only.
    #[arg(long)]
    sequential: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Io { path: String, message: String },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
}

fn required<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T, Error> {
    value
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument(format!("{flag} is required here")))
}

fn read_file(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

/// Inline spec, JSON text, or a path to a JSON file.
fn parse_profile(arg: &str) -> Result<CoefficientProfile, Error> {
    let path = Path::new(arg);
    if !arg.trim_start().starts_with('{') && path.is_file() {
        return CoefficientProfile::from_json(&read_file(path)?);
    }
    arg.parse()
}

fn parse_window(values: &[f64]) -> Result<Option<Window>, Error> {
    match values {
        [] => Ok(None),
        [a, b] => Window::new(*a, *b).map(Some),
        _ => Err(Error::InvalidArgument("--window takes START END".into())),
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::InvalidArgument(format!("bad value list {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let end: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        return Ok(match count {
            0 => Vec::new(),
            1 => vec![start],
            _ => (0..count)
                .map(|i| start + (end - start) * i as f64 / (count - 1) as f64)
                .collect(),
        });
    }
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}

/// Writes to `path`, or to stdout when `None`.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| io_failure(p, e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| io_failure(Path::new("<stdout>"), e))
        }
    }
}

fn json_line<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization is infallible");
    s.push('\n');
    s.into_bytes()
}

fn analyze(args: &AnalyzeArgs) -> Result<(), Failure> {
    let window = parse_window(&args.window)?
        .ok_or_else(|| Error::InvalidArgument("--window START END is required".into()))?;
    let bytes = if args.thm1 {
        let k = parse_profile(required(&args.k, "--k")?)?;
        json_line(&thm1_check(*required(&args.beta, "--beta")?, &k, window, args.grid)?)
    } else if args.thm2 {
        let alpha = parse_profile(required(&args.alpha, "--alpha")?)?;
        json_line(&thm2_check(*required(&args.omega, "--omega")?, &alpha, window, args.grid)?)
    } else if args.corollary {
        let gauge = args.gauge.build()?;
        let beta = *required(&args.beta, "--beta")?;
        let omega = *required(&args.omega, "--omega")?;
        json_line(&corollary_condition_check(&gauge, beta, omega, window, args.grid)?)
    } else {
        let k = parse_profile(required(&args.k, "--k")?)?;
        json_line(&chetaev_instability_check(*required(&args.beta, "--beta")?, &k, window, args.grid)?)
    };
    emit(args.output.as_deref(), &bytes)
}

struct System {
    alpha: CoefficientProfile,
    k: CoefficientProfile,
    x0: PlanarState,
    config: IntegrationConfig,
}

impl SystemArgs {
    fn build(&self) -> Result<System, Error> {
        let (alpha, k, default_t0) = match &self.family {
            Some(spec) => {
                let fam: ExampleFamily = spec.parse()?;
                let (alpha, k) = fam.coefficients();
                (alpha, k, Some(fam.t0()))
            }
            None => (
                parse_profile(required(&self.alpha, "--alpha")?)?,
                parse_profile(required(&self.k, "--k")?)?,
                None,
            ),
        };
        let x0 = match (self.x0.as_slice(), default_t0) {
            ([t0, x1, x2], _) => PlanarState::new(*t0, *x1, *x2),
            ([x1, x2], Some(t0)) => PlanarState::new(t0, *x1, *x2),
            ([_, _], None) => {
                return Err(Error::InvalidArgument("--x0 needs T0 X1 X2 without --family".into()))
            }
            _ => return Err(Error::InvalidArgument("--x0 is required".into())),
        };
        Ok(System {
            alpha,
            k,
            x0,
            config: self.config.resolve()?,
        })
    }
}

fn constant_of(p: &CoefficientProfile, what: &str) -> Result<f64, Error> {
    match p {
        CoefficientProfile::Constant { c } => Ok(*c),
        _ => Err(Error::InvalidArgument(format!("this certificate needs constant {what}"))),
    }
}

fn simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let sys = args.system.build()?;
    let traj = integrate(&sys.alpha, &sys.k, sys.x0, &sys.config)?;
    if let Some(path) = &args.csv {
        let mut buf = Vec::new();
        write_trajectory_csv(&traj, &mut buf).expect("writing to memory");
        emit(Some(path), &buf)?;
    }
    if let Some(path) = &args.svg {
        let points: Vec<(f64, f64)> = traj.states.iter().map(|s| (s.t, s.x1)).collect();
        emit(Some(path), line_plot_svg(&points, "x1(t)", "t", "x1").as_bytes())?;
    }
    if let (Some(choice), Some(path)) = (args.certificate, &args.certificate_csv) {
        let cert = match choice {
            CertificateChoice::LyapunovK => Certificate::lyapunov_k(sys.k.clone(), constant_of(&sys.alpha, "damping")?),
            CertificateChoice::Chetaev => Certificate::chetaev(sys.k.clone(), constant_of(&sys.alpha, "damping")?),
            CertificateChoice::LyapunovAlpha => {
                let w2 = constant_of(&sys.k, "stiffness")?;
                if w2 < 0.0 {
                    return Err(Error::InvalidArgument("stiffness must be >= 0 for this certificate".into()).into());
                }
                Certificate::lyapunov_alpha(sys.alpha.clone(), w2.sqrt())
            }
        };
        let trace = trace_along(&cert, &traj)?;
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).expect("writing to memory");
        emit(Some(path), &buf)?;
    }
    let mut report = traj.summary_json(&sys.config);
    report.push('\n');
    emit(args.report.as_deref(), report.as_bytes())
}

fn classify(args: &SystemArgs) -> Result<(), Failure> {
    let sys = args.build()?;
    let traj = integrate(&sys.alpha, &sys.k, sys.x0, &sys.config)?;
    let mut report = traj.summary_json(&sys.config);
    report.push('\n');
    emit(None, report.as_bytes())
}

#[derive(Serialize)]
struct OracleSummary {
    family: ExampleFamily,
    c1: f64,
    c2: f64,
    samples: usize,
    max_abs_diff: f64,
    t_at_max: f64,
    config: IntegrationConfig,
}

fn oracle_compare(args: &OracleArgs) -> Result<(), Failure> {
    let fam: ExampleFamily = args.family.parse()?;
    let closed = fam.closed_form().ok_or_else(|| {
        Error::InvalidArgument(format!("{} has no closed form (use ex3 with m=2, ex4 or ex5x)", fam.name()))
    })?;
    let x0 = match args.x0.as_slice() {
        [t0, x1, x2] => PlanarState::new(*t0, *x1, *x2),
        [x1, x2] => PlanarState::new(fam.t0(), *x1, *x2),
        _ => return Err(Error::InvalidArgument("--x0 is required".into()).into()),
    };
    let config = args.config.resolve()?;
    let sol = ClosedFormSolution::fitted(closed, &x0)?;
    let (alpha, k) = fam.coefficients();
    let traj = integrate(&alpha, &k, x0, &config)?;
    let mut csv = String::from("t,x_closed_form,x_integrated,abs_diff\n");
    let (mut max_abs_diff, mut t_at_max) = (0.0_f64, x0.t);
    for s in &traj.states {
        let exact = sol.solution_eval(s.t)?;
        let diff = (exact - s.x1).abs();
        if diff > max_abs_diff {
            max_abs_diff = diff;
            t_at_max = s.t;
        }
        csv.push_str(&format!("{},{},{},{}\n", fmt17(s.t), fmt17(exact), fmt17(s.x1), fmt17(diff)));
    }
    let summary = json_line(&OracleSummary {
        family: fam,
        c1: sol.c1,
        c2: sol.c2,
        samples: traj.states.len(),
        max_abs_diff,
        t_at_max,
        config,
    });
    match &args.output {
        Some(path) => {
            emit(Some(path), csv.as_bytes())?;
            emit(None, &summary)
        }
        None => {
            emit(None, csv.as_bytes())?;
            io::stderr().write_all(&summary).map_err(|e| io_failure(Path::new("<stderr>"), e))
        }
    }
}

#[derive(Serialize)]
struct TransformReport {
    gauge: Gauge,
    beta: f64,
    omega: f64,
    alpha: CoefficientProfile,
    k: CoefficientProfile,
    base_alpha: CoefficientProfile,
    base_k: CoefficientProfile,
    time_range_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equivalence: Option<EquivalenceSummary>,
}

#[derive(Serialize)]
struct EquivalenceSummary {
    y0: (f64, f64),
    report: stiffness_lab::transform::EquivalenceReport,
    config: IntegrationConfig,
}

fn transform(args: &TransformArgs) -> Result<(), Failure> {
    let gauge = args.gauge.build()?;
    let (alpha, k) = reparametrize(&gauge, args.beta, args.omega)?;
    let window = parse_window(&args.equivalence)?;
    let tau0 = window.map_or(gauge.profile.domain_start().max(0.0), |w| w.start);
    let (base_alpha, base_k) = base_problem(&gauge, args.beta, args.omega, tau0)?;
    let equivalence = match window {
        Some(w) => {
            let config = args.config.resolve()?;
            let y0 = (args.y0[0], args.y0[1]);
            let (report, _, _) = equivalence_check(&gauge, args.beta, args.omega, w, y0, &config)?;
            Some(EquivalenceSummary { y0, report, config })
        }
        None => None,
    };
    let report = TransformReport {
        time_range_end: gauge.time_range_end(tau0),
        gauge,
        beta: args.beta,
        omega: args.omega,
        alpha,
        k,
        base_alpha,
        base_k,
        equivalence,
    };
    emit(args.output.as_deref(), &json_line(&report))
}

fn sweep(args: &SweepArgs) -> Result<(), Failure> {
    let template: ExampleFamily = args.family.parse()?;
    let spec = SweepSpec {
        template,
        betas: parse_grid(&args.betas)?,
        omega2s: parse_grid(&args.omega2s)?,
        x0: (args.x0[0], args.x0[1]),
        config: args.config.resolve()?,
        window: parse_window(&args.window)?,
    };
    let exec = if args.sequential { Execution::Sequential } else { Execution::Parallel };
    let rows = run_sweep(&spec, exec);
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf).expect("writing to memory");
    emit(args.output.as_deref(), &buf)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Simulate(a) => simulate(a),
        Command::Classify(a) => classify(a),
        Command::OracleCompare(a) => oracle_compare(a),
        Command::Transform(a) => transform(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let Err(failure) = run(&cli) else {
        return ExitCode::SUCCESS;
    };
    let (code, report) = match &failure {
        Failure::Lib(e) => (
            if e.is_numerical() { 2 } else { 1 },
            ErrorReport {
                error: e.kind(),
                message: e.to_string(),
            },
        ),
        Failure::Io { path, message } => (
            1,
            ErrorReport {
                error: "io",
                message: format!("{path}: {message}"),
            },
        ),
    };
    let _ = writeln!(io::stderr(), "{}", serde_json::to_string(&report).expect("serializable"));
    ExitCode::from(code)
}
