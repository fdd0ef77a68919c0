use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rsskit::config::load_scenario;
use rsskit::gen;
use rsskit::hp::RssParams;
use rsskit::interp::ExecLimit;
use rsskit::pycc::{compile, difftest, emit_harness_wrapper, DiffCase};
use rsskit::rss::{build_model, build_optimality_model, run_model2, safe_dist, CtrlMonitor, DirectionMode};
use rsskit::sim::{check_trace, run_scenario, Trace};
use rsskit::syntax::parse_hp;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_COLLISION: u8 = 4;
pub const EXIT_MONITOR: u8 = 5;
/// Every monitor passed and yet `J` failed or the cars collided.
pub const EXIT_MODELING_FLAW: u8 = 6;

type Result<T> = std::result::Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(
    name = "rsskit",
    version,
    about = "Longitudinal RSS models, monitors, simulator and Python compiler"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct ParamArgs {
    #[arg(long, default_value = "same")]
    mode: DirectionMode,
    #[arg(long = "a-min-brake", default_value_t = 4.0)]
    a_min_brake: f64,
    #[arg(long = "a-max-brake", default_value_t = 8.0)]
    a_max_brake: f64,
    #[arg(long = "a-max-accel", default_value_t = 2.0)]
    a_max_accel: f64,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<RssParams> {
        let p = RssParams::new(self.a_min_brake, self.a_max_brake, self.a_max_accel, self.rho);
        let bad = p.validate();
        if !bad.is_empty() {
            let list: Vec<_> = bad.iter().map(ToString::to_string).collect();
            return Err(format!("invalid parameters: {}", list.join(", ")).into());
        }
        Ok(p)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write the trace as CSV.
    Simulate {
        scenario: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Re-check a trace CSV offline.
    Monitor {
        trace: PathBuf,
        /// Take mode and parameters from this scenario file.
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Compile a deterministic program to a Python script.
    Compile {
        program: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Compare interpreter and compiled Python on random programs.
    Difftest {
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random initial states per program.
        #[arg(long, default_value_t = 4)]
        states: usize,
        #[arg(long, default_value = "python3")]
        python: String,
    },
    /// Run the worst case from just inside and exactly at the safe distance.
    Optimality {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_hyphen_values = true)]
        v1: f64,
        #[arg(long, allow_hyphen_values = true)]
        v2: f64,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
    },
    /// Print the model programs and the monitor clauses.
    PrintModel {
        #[arg(long, default_value = "same")]
        mode: DirectionMode,
    },
}

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Simulate { scenario, out } => simulate(&scenario, out.as_deref()),
        Command::Monitor {
            trace,
            scenario,
            params,
        } => monitor(&trace, scenario.as_deref(), params),
        Command::Compile { program, out } => compile_cmd(&program, out.as_deref()),
        Command::Difftest {
            count,
            seed,
            states,
            python,
        } => difftest_cmd(count, seed, states, &python),
        Command::Optimality {
            params,
            v1,
            v2,
            epsilon,
        } => optimality(params, v1, v2, epsilon),
        Command::PrintModel { mode } => print_model(mode),
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()))?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn outcome_code(monitor_failed: bool, collided: bool) -> u8 {
    if collided {
        EXIT_COLLISION
    } else if monitor_failed {
        EXIT_MONITOR
    } else {
        EXIT_OK
    }
}

fn simulate(path: &Path, out: Option<&Path>) -> Result<u8> {
    let file = load_scenario(path)?;
    let trace = run_scenario(&file.scenario)?;
    write_out(out, &trace.to_csv_string())?;
    let show = |i: Option<usize>| {
        i.map_or("none".to_string(), |i| {
            format!("record {i} (t = {})", trace.records[i].t)
        })
    };
    eprintln!("records: {}", trace.len());
    eprintln!("first monitor failure: {}", show(trace.first_monitor_failure()));
    if let Some(i) = trace.first_monitor_failure() {
        eprintln!(
            "failed clause: {}",
            trace.records[i].monitor_id.as_deref().unwrap_or("")
        );
    }
    eprintln!("first collision: {}", show(trace.first_collision()));
    if let Some(last) = trace.records.last() {
        eprintln!("final gap: {}", last.x2 - last.x1);
    }
    Ok(outcome_code(
        trace.first_monitor_failure().is_some(),
        trace.first_collision().is_some(),
    ))
}

fn monitor(path: &Path, scenario: Option<&Path>, args: ParamArgs) -> Result<u8> {
    let (mode, params) = match scenario {
        Some(s) => {
            let f = load_scenario(s)?;
            (f.scenario.mode, f.scenario.params)
        }
        None => (args.mode, args.params()?),
    };
    let file = fs::File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let trace = Trace::read_csv(file).map_err(|e| format!("{}: {e}", path.display()))?;
    let rep = check_trace(&trace, mode, &params)?;
    let idx = |i: Option<usize>| i.map_or("none".to_string(), |i| i.to_string());
    println!("records: {}", rep.records);
    match &rep.first_monitor_failure {
        Some((i, id)) => println!("first monitor failure: {i} ({id})"),
        None => println!("first monitor failure: none"),
    }
    println!("first invariant failure: {}", idx(rep.first_invariant_failure));
    println!("first collision: {}", idx(rep.first_collision));
    match rep.first_column_mismatch {
        Some(i) => println!("recorded columns: differ from recomputation at record {i}"),
        None => println!("recorded columns: reproduced"),
    }
    if rep.modeling_flaw {
        println!("modeling flaw: all monitors passed but the trace is unsafe");
        return Ok(EXIT_MODELING_FLAW);
    }
    Ok(outcome_code(
        rep.first_monitor_failure.is_some(),
        rep.first_collision.is_some(),
    ))
}

fn compile_cmd(path: &Path, out: Option<&Path>) -> Result<u8> {
    let src = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let p = parse_hp(&src).map_err(|e| format!("{}:{e}", path.display()))?;
    let emitted = compile(&p).map_err(|e| format!("{}: {e}", path.display()))?;
    write_out(out, &emit_harness_wrapper(&emitted))?;
    Ok(EXIT_OK)
}

fn difftest_cmd(count: usize, seed: u64, states: usize, python: &str) -> Result<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<DiffCase> = (0..count)
        .map(|_| {
            let vars = gen::identifiers(&mut rng, 3);
            let program = gen::det_hp(&mut rng, 6, &vars);
            let states = (0..states).map(|_| gen::state_for(&mut rng, &program)).collect();
            DiffCase { program, states }
        })
        .collect();
    let rep = difftest(&cases, python, ExecLimit::default());
    if let Some((prog, why)) = rep.failures.first() {
        return Err(format!("could not run `{prog}` under {python}: {why}").into());
    }
    let bad: std::collections::BTreeSet<&str> = rep.mismatches.iter().map(|m| m.program.as_str()).collect();
    println!("{}/{} exact matches", count - bad.len(), count);
    println!(
        "{} runs, {} matched, {} raised the same error on both sides",
        rep.runs, rep.matches, rep.errors_on_both_sides
    );
    for m in rep.mismatches.iter().take(5) {
        println!("mismatch: {}", serde_json::to_string(m)?);
    }
    Ok(if rep.mismatches.is_empty() {
        EXIT_OK
    } else {
        EXIT_MONITOR
    })
}

fn optimality(args: ParamArgs, v1: f64, v2: f64, epsilon: f64) -> Result<u8> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(format!("epsilon must be positive, got {epsilon}").into());
    }
    let p = args.params()?;
    let sd = safe_dist(args.mode, v1, v2, &p)?;
    let inside = run_model2(args.mode, &p, v1, v2, sd - epsilon)?;
    let at = run_model2(args.mode, &p, v1, v2, sd)?;
    let verdict = |r: &rsskit::rss::Model2Run| {
        if r.collided {
            format!("collision (min separation {})", r.min_separation)
        } else {
            format!("min separation {}", r.min_separation)
        }
    };
    println!("safe distance {sd}");
    println!("gap {} => {}", sd - epsilon, verdict(&inside));
    println!("gap {sd} => {}", verdict(&at));
    let expected = inside.collided && !at.collided && at.min_separation >= -1e-9;
    Ok(if expected { EXIT_OK } else { EXIT_MONITOR })
}

fn print_model(mode: DirectionMode) -> Result<u8> {
    let m = build_model(mode);
    let o = build_optimality_model(mode);
    println!("# Model 1 ({mode} direction)");
    println!("safeDist = {}", m.safe_dist);
    println!("init     = {}", m.init);
    println!("freeDriving     = {}", m.free_driving);
    println!("properResponse  = {}", m.proper_response);
    println!("ctrl     = {}", m.ctrl);
    println!("motion   = {}", m.motion);
    println!("program  = {}", m.program);
    println!("safety   = {}", m.safety);
    println!();
    println!("# Model 2 ({mode} direction)");
    println!("init     = {}", o.init);
    println!("program  = {}", o.program);
    println!("unsafe   = {}", o.unsafe_goal);
    println!();
    println!("# Controller monitor");
    for (_, clauses) in CtrlMonitor::cached(mode).branches() {
        for c in clauses {
            println!("{:<12} {}", c.id, c.formula);
        }
    }
    Ok(EXIT_OK)
}
