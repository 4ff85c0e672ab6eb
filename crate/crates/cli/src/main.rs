//! Command line front end: simulate orbits, evaluate criteria, build
//! certificates, classify trajectories, sweep the (a, c) plane, and probe
//! the open conjectures.
//!
//! Exit codes: 0 success, 2 invalid input, 3 violation or counterexample
//! candidate detected by sweep/probe.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use secdiff::sweep::{write_csv, write_json};
use secdiff::{
    classify, evaluate_all, make_certificate, probe_conjecture, run_sweep, simulate,
    ClassifyParams, Conjecture, Error, ExportFormat, Family, NonlinearitySpec, RatioChoice,
    SimulationGuards, SweepConfig, SystemSpec, TheoremId, Trajectory,
};

const USAGE: &str = "\
usage: secdiff <command> [options]

commands:
  simulate   --c <real> --f <spec> --x0 <real> --x1 <real> [guards] [--format csv|json] [--output PATH]
  classify   same arguments as simulate; prints the orbit verdict as JSON
  criteria   --c <real> --f <spec|family> [--a <real>]
  certificate --a <real> --c <real> --theorem 2|3 [--ratio <frac in (0,1)>]
  sweep      --config <path.json> [--format csv|json] [--output PATH]
  probe      --conjecture 1|2 --config <path.json> [--output PATH]

guards (defaults in brackets):
  --horizon N [100000] --divergence-bound M [1e12]
  --convergence-tol E [1e-9] --convergence-window W [50]

nonlinearity spec forms:
  tanh:a=0.8   linneg:a=0.6   linpos:a=0.4   ramp:a=0.9
  sublinear:lambda=0.5   sat:a=0.9,cap=2.5   pwl:(-1,-0.5);(0,0);(1,0.5)

sweep families (the sector bound a is swept): tanh linneg linpos ramp sat:cap=<v>
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = args.first() else {
        eprint!("{USAGE}");
        return ExitCode::from(2);
    };
    let rest = &args[1..];
    let outcome = match command.as_str() {
        "simulate" => cmd_simulate(rest, false),
        "classify" => cmd_simulate(rest, true),
        "criteria" => cmd_criteria(rest),
        "certificate" => cmd_certificate(rest),
        "sweep" => cmd_sweep(rest),
        "probe" => cmd_probe(rest),
        "help" | "--help" | "-h" => {
            print!("{USAGE}");
            return ExitCode::SUCCESS;
        }
        other => {
            eprintln!("unknown command `{other}`\n");
            eprint!("{USAGE}");
            return ExitCode::from(2);
        }
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Flat flag map: every option takes exactly one value.
struct Args {
    pairs: Vec<(String, String)>,
}

impl Args {
    fn parse(raw: &[String]) -> Result<Self, String> {
        let mut pairs = Vec::new();
        let mut it = raw.iter();
        while let Some(flag) = it.next() {
            let Some(name) = flag.strip_prefix("--") else {
                return Err(format!("expected a --flag, got `{flag}`"));
            };
            let Some(value) = it.next() else {
                return Err(format!("flag --{name} needs a value"));
            };
            pairs.push((name.to_string(), value.clone()));
        }
        Ok(Self { pairs })
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.pairs.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
    }

    fn required(&self, name: &str) -> Result<&str, String> {
        self.get(name).ok_or_else(|| format!("missing required flag --{name}"))
    }

    fn f64(&self, name: &str) -> Result<Option<f64>, String> {
        self.get(name)
            .map(|v| v.parse().map_err(|_| format!("--{name}: bad number `{v}`")))
            .transpose()
    }

    fn required_f64(&self, name: &str) -> Result<f64, String> {
        self.required(name)?
            .parse()
            .map_err(|_| format!("--{name}: bad number"))
    }

    fn usize(&self, name: &str) -> Result<Option<usize>, String> {
        self.get(name)
            .map(|v| v.parse().map_err(|_| format!("--{name}: bad integer `{v}`")))
            .transpose()
    }
}

type CmdResult = Result<ExitCode, Box<dyn std::error::Error>>;

fn guards_from(args: &Args) -> Result<SimulationGuards, String> {
    let mut g = SimulationGuards::default();
    if let Some(h) = args.usize("horizon")? {
        g.horizon = h;
    }
    if let Some(m) = args.f64("divergence-bound")? {
        g.divergence_bound = m;
    }
    if let Some(e) = args.f64("convergence-tol")? {
        g.convergence_tol = e;
    }
    if let Some(w) = args.usize("convergence-window")? {
        g.convergence_window = w;
    }
    Ok(g)
}

fn output_writer(args: &Args) -> std::io::Result<Box<dyn Write>> {
    match args.get("output") {
        Some(path) => Ok(Box::new(BufWriter::new(File::create(PathBuf::from(path))?))),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn run_simulation(args: &Args) -> Result<Trajectory, Box<dyn std::error::Error>> {
    let c = args.required_f64("c")?;
    let f: NonlinearitySpec = args.required("f")?.parse()?;
    let x0 = args.required_f64("x0")?;
    let x1 = args.required_f64("x1")?;
    let guards = guards_from(args)?;
    let spec = SystemSpec::new(c, f)?;
    Ok(simulate(&spec, x0, x1, &guards)?)
}

fn cmd_simulate(raw: &[String], classify_orbit: bool) -> CmdResult {
    let args = Args::parse(raw)?;
    let traj = run_simulation(&args)?;
    let mut out = output_writer(&args)?;
    if classify_orbit {
        let verdict = classify(&traj, &ClassifyParams::default());
        write_json(&verdict, &mut out)?;
    } else {
        match args.get("format").unwrap_or("csv") {
            "json" => write_json(&traj, &mut out)?,
            "csv" => traj.write_csv(&mut out)?,
            other => return Err(format!("--format: expected csv or json, got `{other}`").into()),
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_criteria(raw: &[String]) -> CmdResult {
    let args = Args::parse(raw)?;
    let c = args.required_f64("c")?;
    let fspec = args.required("f")?;
    // `--f tanh --a 0.8` instantiates a family at the given sector bound;
    // `--f tanh:a=0.8` carries its parameters inline.
    let nl: NonlinearitySpec = match args.f64("a")? {
        Some(a) => fspec.parse::<Family>()?.instantiate(a)?,
        None => fspec.parse()?,
    };
    let spec = SystemSpec::new(c, nl)?;
    let report = evaluate_all(&spec);
    let mut out = output_writer(&args)?;
    write_json(&report, &mut out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_certificate(raw: &[String]) -> CmdResult {
    let args = Args::parse(raw)?;
    let a = args.required_f64("a")?;
    let c = args.required_f64("c")?;
    let theorem = match args.required("theorem")? {
        "2" => TheoremId::SectorBounded,
        "3" => TheoremId::NonnegativeTail,
        other => return Err(format!("--theorem: expected 2 or 3, got `{other}`").into()),
    };
    let ratio = match args.f64("ratio")? {
        Some(f) => RatioChoice::Fraction(f),
        None => RatioChoice::Midpoint,
    };
    let mut out = output_writer(&args)?;
    match make_certificate(a, c, theorem, ratio) {
        Ok(cert) => write_json(&cert, &mut out)?,
        Err(Error::InfeasibleWindow { theorem, a, c }) => {
            let record = serde_json::json!({
                "theorem": theorem,
                "a": a,
                "c": c,
                "infeasible": true,
            });
            write_json(&record, &mut out)?;
        }
        Err(e) => return Err(e.into()),
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn load_config(path: &str) -> Result<SweepConfig, Box<dyn std::error::Error>> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| format!("cannot read config {path}: {e}"))?;
    let cfg: SweepConfig = serde_json::from_str(&text)
        .map_err(|e| format!("cannot parse config {path}: {e}"))?;
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_sweep(raw: &[String]) -> CmdResult {
    let args = Args::parse(raw)?;
    let cfg = load_config(args.required("config")?)?;
    let format: ExportFormat = args.get("format").unwrap_or("csv").parse()?;
    let result = run_sweep(&cfg)?;
    let mut out = output_writer(&args)?;
    match format {
        ExportFormat::Csv => write_csv(&result, &mut out)?,
        ExportFormat::Json => write_json(&result, &mut out)?,
    }
    out.flush()?;
    if result.has_violations() {
        eprintln!(
            "{} VIOLATION cell(s): a proven-attracting cell produced a non-convergent orbit",
            result.violation_count
        );
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_probe(raw: &[String]) -> CmdResult {
    let args = Args::parse(raw)?;
    let conjecture: Conjecture = args.required("conjecture")?.parse()?;
    let cfg = load_config(args.required("config")?)?;
    let report = probe_conjecture(conjecture, &cfg)?;
    let mut out = output_writer(&args)?;
    write_json(&report, &mut out)?;
    out.flush()?;
    if report.counterexample_found {
        eprintln!(
            "{} candidate counterexample orbit(s) found; reproduction data in the report",
            report.candidates.len()
        );
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}
