mod args;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use aqfactor::compiler::EquationSystem;
use aqfactor::engine::{gap_profile, run_schedule, Schedule};
use aqfactor::export::{self, CompileJson, SystemJson};
use aqfactor::hamiltonian::{qubit_cap, Pairing};
use aqfactor::orchestrator::{
    compile_split, decode_assignment, factor, first_feasible, ground_manifold, success_probability, sweep,
    FactorOptions, Instance, Problem, SweepAxis,
};
use aqfactor::Error;
use clap::Parser;
use serde_json::{json, Value};

use crate::args::{Axis, Cli, Command, Common, Format, ScheduleArgs};

/// Failure of a subcommand, carrying its exit code.
enum Failure {
    Usage(String),
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CmdResult = Result<(), Failure>;

fn pairing(common: &Common) -> Pairing {
    if common.paper_pairing {
        Pairing::FirstProduct
    } else {
        Pairing::LastProduct
    }
}

fn widths(common: &Common) -> Option<(u32, u32)> {
    common.widths.as_ref().map(|w| (w[0], w[1]))
}

fn schedule(args: &ScheduleArgs) -> Result<Schedule, Error> {
    let s = Schedule::new(args.g, args.total_time, args.steps)?;
    match &args.checkpoints {
        Some(c) => s.with_checkpoints(c.clone()),
        None => Ok(s),
    }
}

fn emit(common: &Common, text: &str) -> CmdResult {
    match &common.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn emit_json(common: &Common, value: &Value) -> CmdResult {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    emit(common, &text)
}

fn compile(args: &args::CompileArgs) -> CmdResult {
    let pairing = pairing(&args.common);
    let inst = match widths(&args.common) {
        Some(w) => compile_split(args.n, w, pairing)?,
        None => first_feasible(args.n, None, pairing)?,
    };
    let doc = serde_json::to_value(CompileJson::new(&inst, pairing)).expect("serializable");
    emit_json(&args.common, &doc)
}

fn load_system(path: &std::path::Path) -> Result<EquationSystem, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let doc: SystemJson = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{}: not a compiled system: {e}", path.display())))?;
    Ok(EquationSystem::try_from(&doc)?)
}

fn simulate(args: &args::SimulateArgs) -> CmdResult {
    let pairing = pairing(&args.common);
    let schedule = schedule(&args.schedule)?;
    let system = match (&args.system, args.n) {
        (Some(path), _) => load_system(path)?,
        (None, Some(n)) => first_feasible(n, widths(&args.common), pairing)?.system,
        (None, None) => unreachable!("clap requires one of N or --system"),
    };
    let problem = match Problem::from_system(&system, pairing) {
        Ok(p) => p,
        Err(Error::EmptySystem) => {
            return Err(Failure::Usage("nothing to simulate: presolve fixed every variable (try `factor`)".into()))
        }
        Err(e) => return Err(e.into()),
    };
    let trace = run_schedule(&problem.mixer(schedule.g)?, &problem.diagonal, &schedule)?;
    match args.format {
        Format::Csv => emit(&args.common, &export::evolution_trace_to_csv(&trace)),
        Format::Json => {
            let manifold = ground_manifold(&problem.diagonal);
            let pops = trace.final_populations();
            let success = success_probability(&pops, &manifold)?;
            let decodings = manifold
                .indices
                .iter()
                .map(|&b| decode_assignment(b, system.widths, &problem.map, &system.fixed))
                .collect::<Result<Vec<_>, _>>()?;
            let doc = json!({
                "n": system.n,
                "widths": system.widths,
                "qubits": export::qubit_labels(&problem.map),
                "schedule": trace.schedule,
                "manifold": manifold.indices,
                "manifold_energy": format!("{}/{}", manifold.energy.numer(), manifold.energy.denom()),
                "decodings": decodings,
                "success_probability": success,
                "min_gap": trace.min_gap,
                "final_populations": pops,
                "snapshots": trace.snapshots,
            });
            emit_json(&args.common, &doc)
        }
    }
}

fn spectrum(args: &args::SpectrumArgs) -> CmdResult {
    let inst: Instance = first_feasible(args.n, widths(&args.common), pairing(&args.common))?;
    let problem = inst.problem.ok_or_else(|| Failure::Usage("no spectrum: presolve fixed every variable".into()))?;
    let trace = gap_profile(&problem.mixer(args.g)?, &problem.diagonal, args.points, args.levels)?;
    match args.format {
        Format::Csv => emit(&args.common, &export::gap_trace_to_csv(&trace)),
        Format::Json => emit_json(&args.common, &serde_json::to_value(&trace).expect("serializable")),
    }
}

fn factor_options(common: &Common, args: &ScheduleArgs) -> Result<FactorOptions, Error> {
    Ok(FactorOptions {
        schedule: schedule(args)?,
        split: widths(common),
        pairing: pairing(common),
        qubit_cap: qubit_cap(),
    })
}

fn factor_cmd(args: &args::FactorArgs) -> CmdResult {
    let options = factor_options(&args.common, &args.schedule)?;
    let result = factor(args.n, &options)?;
    emit_json(&args.common, &serde_json::to_value(&result).expect("serializable"))
}

fn sweep_cmd(args: &args::SweepArgs) -> CmdResult {
    let options = factor_options(&args.common, &args.schedule)?;
    let axis = match args.axis {
        Axis::T => SweepAxis::T,
        Axis::M => SweepAxis::M,
        Axis::G => SweepAxis::G,
    };
    let rows = sweep(args.n, axis, &args.values, &options)?;
    match args.format {
        Format::Csv => emit(&args.common, &export::sweep_to_csv(&rows)),
        Format::Json => emit_json(&args.common, &serde_json::to_value(&rows).expect("serializable")),
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Infeasible(_) => "infeasible",
        Error::NotFactorable(_) => "not_factorable",
        Error::NumericalFailure(_) => "numerical_failure",
        _ => "error",
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible(_) | Error::NotFactorable(_) => 2,
        Error::NumericalFailure(_) => 3,
        Error::EvenInput(_)
        | Error::TooSmall(_)
        | Error::WidthMismatch { .. }
        | Error::InvalidParameter(_)
        | Error::DimensionTooLarge { .. }
        | Error::Parse(_) => 1,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match &cli.command {
        Command::Compile(a) => compile(a),
        Command::Simulate(a) => simulate(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Factor(a) => factor_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            let code = exit_code(&e);
            eprintln!("error: {e}");
            if code == 2 {
                let doc = json!({ "error": error_kind(&e), "message": e.to_string() });
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            }
            ExitCode::from(code)
        }
    }
}
