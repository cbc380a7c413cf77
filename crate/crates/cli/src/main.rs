use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use log::info;

use combsynth::dsl::NoCommand;
use combsynth::inputgen::SearchConfig;
use combsynth::oracle::{set_process_limit, CommandHandle, CommandOps};
use combsynth::pipeline::{
    combine_k, emit_script, execute_parallel, parse_pipeline, plan, InputSource, PipelinePlan, PlanConfig, Sink,
};
use combsynth::synth::{synthesize, CacheRecord, CombinerCache, Composite, SynthConfig, SynthStatus};
use combsynth::verifier::verify;

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_NO_COMBINER: u8 = 2;
const EXIT_UNSUPPORTED_SYNTAX: u8 = 3;
const EXIT_EXEC: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "combsynth", version, about = "Synthesize combiners for stream commands and parallelize pipelines")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Log filter (error, warn, info, debug, trace).
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,
    /// Run only the in-process emulations of common commands.
    #[arg(long, global = true)]
    builtin_only: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 7, value_parser = clap::value_parser!(u64).range(3..=12))]
    max_size: u64,
    /// Input pairs generated per shape.
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pairs: u64,
    /// Shape mutation steps per synthesis round.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    mutation_rounds: u64,
    /// Rounds without elimination before synthesis stops.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    no_progress_rounds: u64,
    /// Per-process timeout in seconds.
    #[arg(long, global = true, default_value_t = 10.0)]
    timeout: f64,
    /// Maximum concurrent subprocesses (default: logical CPUs).
    #[arg(long, global = true)]
    pool: Option<usize>,
    /// Combiner cache file (JSON).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Pass the caller's locale to commands instead of forcing LC_ALL=C.
    #[arg(long, global = true)]
    inherit_locale: bool,
}

impl RunConfig {
    fn synth(&self) -> SynthConfig {
        SynthConfig {
            max_size: self.max_size as usize,
            search: SearchConfig {
                rounds: self.mutation_rounds as usize,
                per_shape: self.pairs as usize,
            },
            no_progress_rounds: self.no_progress_rounds as usize,
            seed: self.seed,
            ..SynthConfig::default()
        }
    }

    fn timeout(&self) -> Duration {
        Duration::from_secs_f64(self.timeout.max(0.001))
    }

    fn handle(&self, text: &str) -> Result<CommandHandle, Failure> {
        Ok(CommandHandle::resolve(text, self.builtin_only)
            .map_err(|e| Failure::exec(e.to_string()))?
            .with_timeout(self.timeout())
            .with_c_locale(!self.inherit_locale))
    }

    fn load_cache(&self) -> Result<CombinerCache, Failure> {
        match &self.cache {
            Some(p) => CombinerCache::load(p).map_err(|e| Failure::other(format!("{}: {e}", p.display()))),
            None => Ok(CombinerCache::default()),
        }
    }

    fn save_cache(&self, cache: &CombinerCache) -> Result<(), Failure> {
        if let Some(p) = &self.cache {
            cache
                .save(p)
                .map_err(|e| Failure::other(format!("{}: {e}", p.display())))?;
        }
        Ok(())
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Synthesize a combiner for one command.
    Synth {
        #[arg(long = "cmd")]
        command: String,
    },
    /// Plan a data-parallel version of a pipeline script.
    Parallelize {
        /// Script file holding one pipeline (`-` for stdin).
        script: PathBuf,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(2..))]
        width: u64,
        /// Write a standalone shell script for the plan.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        /// Write the plan as JSON (for `run`).
        #[arg(long)]
        plan: Option<PathBuf>,
        /// Execute the plan after building it.
        #[arg(long)]
        run: bool,
        /// Parallelize stages whose only combiner is rerun.
        #[arg(long)]
        parallel_rerun: bool,
        /// Leave sort's own thread count alone.
        #[arg(long)]
        no_pin_sort: bool,
    },
    /// Execute a plan written by `parallelize --plan`.
    Run { plan: PathBuf },
    /// Combine partial outputs with a combiner.
    Combine {
        #[arg(long)]
        combiner: String,
        /// Command for combiners that rerun it.
        #[arg(long = "cmd")]
        command: Option<String>,
        parts: Vec<PathBuf>,
    },
    /// Check a combiner against a command on generated inputs.
    Verify {
        #[arg(long = "cmd")]
        command: String,
        #[arg(long)]
        combiner: String,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn exec(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_EXEC, msg: msg.into() }
    }

    fn other(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_ERROR, msg: msg.into() }
    }
}

fn read_input(source: &InputSource) -> Result<Vec<u8>, Failure> {
    match source {
        InputSource::Stdin => {
            let mut buf = Vec::new();
            io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| Failure::other(format!("stdin: {e}")))?;
            Ok(buf)
        }
        InputSource::File(f) => {
            let path = f.expand().map_err(Failure::other)?;
            fs::read(&path).map_err(|e| Failure::other(format!("{path}: {e}")))
        }
    }
}

fn write_output(sink: &Sink, data: &[u8]) -> Result<(), Failure> {
    match sink {
        Sink::Stdout => io::stdout()
            .write_all(data)
            .map_err(|e| Failure::other(format!("stdout: {e}"))),
        Sink::File(f) => {
            let path = f.expand().map_err(Failure::other)?;
            fs::write(&path, data).map_err(|e| Failure::other(format!("{path}: {e}")))
        }
    }
}

fn run_plan(p: &PipelinePlan) -> Result<u8, Failure> {
    let input = read_input(&p.input)?;
    let out = execute_parallel(p, &input).map_err(|e| Failure::exec(e.to_string()))?;
    write_output(&p.sink, &out)?;
    Ok(EXIT_OK)
}

fn cmd_synth(cfg: &RunConfig, text: &str) -> Result<u8, Failure> {
    let f = cfg.handle(text)?;
    let synth = cfg.synth();
    let r = synthesize(&f, &synth).map_err(|e| Failure::exec(e.to_string()))?;
    let record = CacheRecord::from_result(text, synth.max_size, &r);
    let mut cache = cfg.load_cache()?;
    cache.insert(record.clone());
    cfg.save_cache(&cache)?;
    eprintln!(
        "{text}: {} plausible after {} rounds; combiner {}",
        r.plausible.len(),
        r.rounds,
        r.composite.as_ref().map_or("none".into(), |c| c.to_string())
    );
    let json = serde_json::to_string_pretty(&record).map_err(|e| Failure::other(e.to_string()))?;
    println!("{json}");
    Ok(if r.status == SynthStatus::Ok { EXIT_OK } else { EXIT_NO_COMBINER })
}

#[allow(clippy::too_many_arguments)]
fn cmd_parallelize(
    cfg: &RunConfig,
    script: &Path,
    width: usize,
    output: Option<&Path>,
    plan_out: Option<&Path>,
    run: bool,
    parallel_rerun: bool,
    no_pin_sort: bool,
) -> Result<u8, Failure> {
    let text = if script == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::other(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(script).map_err(|e| Failure::other(format!("{}: {e}", script.display())))?
    };
    let spec = parse_pipeline(&text).map_err(|e| Failure {
        code: EXIT_UNSUPPORTED_SYNTAX,
        msg: e.to_string(),
    })?;
    let pcfg = PlanConfig {
        synth: cfg.synth(),
        rerun_sequential: !parallel_rerun,
        pin_sort: !no_pin_sort,
        builtin_only: cfg.builtin_only,
        timeout: cfg.timeout(),
        inherit_locale: cfg.inherit_locale,
        ..PlanConfig::default()
    };
    let mut cache = cfg.load_cache()?;
    let p = plan(&spec, &mut cache, width, &pcfg).map_err(|e| Failure::exec(e.to_string()))?;
    cfg.save_cache(&cache)?;
    for (i, s) in p.stages.iter().enumerate() {
        eprintln!(
            "stage {i} [{}] {}: {:?}, combiner {}{}",
            s.group,
            s.command,
            s.mode,
            s.combiner.as_ref().map_or("-".into(), Composite::to_string),
            if s.combiner_eliminated { " (eliminated)" } else { "" }
        );
    }
    let json = serde_json::to_string_pretty(&p).map_err(|e| Failure::other(e.to_string()))?;
    if let Some(path) = plan_out {
        fs::write(path, json.clone() + "\n").map_err(|e| Failure::other(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = output {
        fs::write(path, emit_script(&p)).map_err(|e| Failure::other(format!("{}: {e}", path.display())))?;
        make_executable(path);
    }
    if run {
        return run_plan(&p);
    }
    if plan_out.is_none() && output.is_none() {
        println!("{json}");
    }
    Ok(EXIT_OK)
}

#[cfg(unix)]
fn make_executable(path: &Path) {
    use std::os::unix::fs::PermissionsExt;
    if let Ok(meta) = fs::metadata(path) {
        let mut perm = meta.permissions();
        perm.set_mode(perm.mode() | 0o111);
        let _ = fs::set_permissions(path, perm);
    }
}

#[cfg(not(unix))]
fn make_executable(_path: &Path) {}

fn cmd_combine(cfg: &RunConfig, combiner: &str, command: Option<&str>, parts: &[PathBuf]) -> Result<u8, Failure> {
    let c: Composite = combiner
        .parse()
        .map_err(|e| Failure::other(format!("combiner: {e}")))?;
    let data = parts
        .iter()
        .map(|p| fs::read(p).map_err(|e| Failure::other(format!("{}: {e}", p.display()))))
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&[u8]> = data.iter().map(Vec::as_slice).collect();
    let out = match command {
        Some(text) => {
            let f = cfg.handle(text)?;
            combine_k(&c, &refs, &CommandOps::new(&f))
        }
        None => combine_k(&c, &refs, &NoCommand),
    }
    .map_err(|e| Failure::exec(e.to_string()))?;
    io::stdout()
        .write_all(&out)
        .map_err(|e| Failure::other(format!("stdout: {e}")))?;
    Ok(EXIT_OK)
}

fn cmd_verify(cfg: &RunConfig, command: &str, combiner: &str, samples: usize) -> Result<u8, Failure> {
    let f = cfg.handle(command)?;
    let g: Composite = combiner
        .parse()
        .map_err(|e| Failure::other(format!("combiner: {e}")))?;
    let report = verify(&f, &g, samples, cfg.seed).map_err(|e| Failure::exec(e.to_string()))?;
    println!("verdict: {} ({} on {} sampled pairs)", report.verdict(), report.combiner, report.pairs);
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::other(e.to_string()))?;
    println!("{json}");
    Ok(if report.verdict() == "holds" { EXIT_OK } else { EXIT_NO_COMBINER })
}

fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    let cfg = &cli.run;
    match &cli.command {
        Cmd::Synth { command } => cmd_synth(cfg, command),
        Cmd::Parallelize {
            script,
            width,
            output,
            plan,
            run,
            parallel_rerun,
            no_pin_sort,
        } => cmd_parallelize(
            cfg,
            script,
            *width as usize,
            output.as_deref(),
            plan.as_deref(),
            *run,
            *parallel_rerun,
            *no_pin_sort,
        ),
        Cmd::Run { plan } => {
            let text = fs::read_to_string(plan).map_err(|e| Failure::other(format!("{}: {e}", plan.display())))?;
            let p: PipelinePlan =
                serde_json::from_str(&text).map_err(|e| Failure::other(format!("{}: {e}", plan.display())))?;
            run_plan(&p)
        }
        Cmd::Combine {
            combiner,
            command,
            parts,
        } => cmd_combine(cfg, combiner, command.as_deref(), parts),
        Cmd::Verify {
            command,
            combiner,
            samples,
        } => cmd_verify(cfg, command, combiner, *samples),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_OK });
        }
    };
    env_logger::Builder::new()
        .parse_filters(&cli.run.log_level)
        .format_timestamp(None)
        .init();
    if let Some(n) = cli.run.pool {
        set_process_limit(n);
    }
    info!("{:?}", cli.command);
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("combsynth: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
