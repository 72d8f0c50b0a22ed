use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toss::harness::{bundled, plan_checks, run_all, ScenarioRun, EXAMPLES};
use toss::metrics::ComparisonTable;
use toss::output::{
    to_mps, LtvSummary, RunSummary, TossSummary, TrajectoryTable, ValidationSummary,
};
use toss::run::{
    departure_threshold, run_baseline_with, run_compare, run_toss, run_validation, speed_ladder,
    toss_metrics,
};
use toss::scenario::{load_scenario, Scenario};
use toss::units::{to_kmh, Speed};

#[derive(Parser)]
#[command(
    name = "toss",
    version,
    about = "Spatial-domain time-optimal smooth-steering trajectory planner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan with the spatial LP planner.
    Plan {
        scenario: PathBuf,
        /// Directory for the trajectory table and summary.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the final LP in MPS format.
        #[arg(long)]
        mps: bool,
    },
    /// Run the time-domain LTV-MPC baseline.
    Baseline {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Reference speed, e.g. "94 km/h" (overrides the scenario).
        #[arg(long)]
        v_ref: Option<String>,
        /// Cap the reference speed by the centerline friction limit.
        #[arg(long)]
        friction_adapted: Option<bool>,
        /// Sweep the scenario's reference-speed ladder for lane departures.
        #[arg(long)]
        ladder: bool,
    },
    /// Run both methods and print the comparison table.
    Compare {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Roll the planned controls through the nonlinear model.
    Validate {
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the five bundled example scenarios and their property checks.
    Examples {
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print a bundled scenario file instead of running.
        #[arg(long)]
        show: Option<String>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load(path: &Path) -> Result<Scenario, String> {
    load_scenario(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(dir: &Path, file: &str, text: &str) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let path = dir.join(file);
    fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Plan { scenario, out, mps } => {
            let sc = load(&scenario)?;
            let report = run_toss(&sc).map_err(|e| e.to_string())?;
            let s = TossSummary::new(&report);
            println!(
                "{}: traversal time {:.3} s over {} intervals",
                sc.name, s.traversal_time, s.intervals
            );
            println!(
                "slacks {:?}, LP solves {}, iterations {:?}",
                s.slacks, s.lp_solves, s.lp_iterations
            );
            let checks = plan_checks(&sc, &report);
            for c in &checks {
                println!(
                    "[{}] {}: {}",
                    if c.passed { "ok" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            if let Some(dir) = out {
                let table = TrajectoryTable::from_plan(&sc, &report).map_err(|e| e.to_string())?;
                write(&dir, "toss.csv", &table.to_csv())?;
                let summary = RunSummary {
                    scenario: sc.name.clone(),
                    toss: Some(s),
                    checks,
                    ..Default::default()
                };
                write(&dir, "summary.json", &summary.to_json())?;
                if mps {
                    write(&dir, "toss.mps", &to_mps(&report.lp, &sc.name))?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Baseline {
            scenario,
            out,
            v_ref,
            friction_adapted,
            ladder,
        } => {
            let sc = load(&scenario)?;
            if ladder {
                let steps = speed_ladder(&sc, &sc.baseline.ladder).map_err(|e| e.to_string())?;
                for s in &steps {
                    println!(
                        "v_ref {:>6.1} km/h: {} (max |e_y| {:.2} m)",
                        to_kmh(s.v_ref),
                        if s.departs { "departs" } else { "in lane" },
                        s.max_abs_e_y
                    );
                }
                match departure_threshold(&steps) {
                    Some(v) => println!("lowest departing reference speed: {:.1} km/h", to_kmh(v)),
                    None => println!("no swept reference speed departs"),
                }
                return Ok(ExitCode::SUCCESS);
            }
            let v = match v_ref {
                Some(text) => Speed::parse(&text)?.si(),
                None => sc.baseline.v_ref,
            };
            let run = run_baseline_with(
                &sc,
                v,
                friction_adapted.unwrap_or(sc.baseline.friction_adapted),
            )
            .map_err(|e| e.to_string())?;
            let s = LtvSummary::new(&run);
            println!(
                "{}: v_ref {:.1} km/h, {} steps, cost {:.6e}",
                sc.name,
                to_kmh(v),
                s.steps,
                s.cost
            );
            match (run.lane.departure, run.t_star) {
                (Some(k), _) => println!(
                    "lane departure at step {k} (t = {:.1} s)",
                    k as f64 * run.refs.ts
                ),
                (None, Some(t)) => println!("in lane; end of horizon reached after {t:.3} s"),
                (None, None) => println!("in lane; end of horizon not reached"),
            }
            if let Some(dir) = out {
                write(
                    &dir,
                    "ltv.csv",
                    &TrajectoryTable::from_baseline(&sc, &run).to_csv(),
                )?;
                let summary = RunSummary {
                    scenario: sc.name.clone(),
                    ltv: Some(s),
                    ..Default::default()
                };
                write(&dir, "summary.json", &summary.to_json())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { scenario, out } => {
            let sc = load(&scenario)?;
            let cmp = run_compare(&sc).map_err(|e| e.to_string())?;
            print!("{}", cmp.table.render());
            if let Some(dir) = out {
                write(
                    &dir,
                    "toss.csv",
                    &TrajectoryTable::from_plan(&sc, &cmp.toss)
                        .map_err(|e| e.to_string())?
                        .to_csv(),
                )?;
                write(
                    &dir,
                    "ltv.csv",
                    &TrajectoryTable::from_baseline(&sc, &cmp.ltv).to_csv(),
                )?;
                let summary = RunSummary {
                    scenario: sc.name.clone(),
                    toss: Some(TossSummary::new(&cmp.toss)),
                    ltv: Some(LtvSummary::new(&cmp.ltv)),
                    table: Some(cmp.table.clone()),
                    ..Default::default()
                };
                write(&dir, "summary.json", &summary.to_json())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { scenario, out } => {
            let sc = load(&scenario)?;
            let report = run_toss(&sc).map_err(|e| e.to_string())?;
            let v = run_validation(&sc, &report);
            let s = ValidationSummary::from(&v);
            println!(
                "{}: max |e_y| deviation {:.4} m, max |t| deviation {:.4} s",
                sc.name, s.max_e_y_deviation, s.max_time_deviation
            );
            println!(
                "corridor violation {:.4} m, max one-interval defect {:.3e} m",
                s.corridor_violation, s.max_step_defect
            );
            if let Some(f) = &s.failure {
                println!("rollout stopped: {f}");
            }
            if let Some(dir) = out {
                let summary = RunSummary {
                    scenario: sc.name.clone(),
                    toss: Some(TossSummary::new(&report)),
                    table: Some(ComparisonTable {
                        rows: vec![toss_metrics(&report)],
                    }),
                    validation: Some(s.clone()),
                    ..Default::default()
                };
                write(&dir, "summary.json", &summary.to_json())?;
            }
            Ok(if s.failure.is_some() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Examples { out, show } => {
            if let Some(name) = show {
                let text = toss::harness::BUNDLED
                    .iter()
                    .find(|(n, _)| *n == name)
                    .map(|(_, t)| *t);
                print!(
                    "{}",
                    text.ok_or_else(|| format!("no bundled scenario named {name:?}"))?
                );
                return Ok(ExitCode::SUCCESS);
            }
            let scenarios: Vec<Scenario> = EXAMPLES
                .iter()
                .map(|n| bundled(n).expect("bundled example"))
                .collect();
            let results = run_all(&scenarios);
            let mut ok = true;
            for (sc, r) in scenarios.iter().zip(&results) {
                match r {
                    Ok(run) => {
                        ok &= run.passed();
                        report_run(run);
                        if let Some(dir) = &out {
                            write_run(&dir.join(&sc.name), run)?;
                        }
                    }
                    Err(e) => {
                        ok = false;
                        println!("== {}: FAILED\n{e}", sc.name);
                    }
                }
            }
            if let Some(sc) = scenarios.iter().find(|s| !s.baseline.ladder.is_empty()) {
                let steps = speed_ladder(sc, &sc.baseline.ladder).map_err(|e| e.to_string())?;
                match departure_threshold(&steps) {
                    Some(v) => println!(
                        "{} ladder: lowest departing reference speed {:.1} km/h",
                        sc.name,
                        to_kmh(v)
                    ),
                    None => println!("{} ladder: no swept speed departs", sc.name),
                }
            }
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn report_run(run: &ScenarioRun) {
    let s = &run.summary;
    println!(
        "== {}: {}",
        s.scenario,
        if run.passed() { "ok" } else { "FAILED" }
    );
    if let Some(t) = &s.table {
        print!("{}", t.render());
    } else if let Some(t) = &s.toss {
        println!("TOSS t* = {:.3} s", t.traversal_time);
    }
    for c in &s.checks {
        println!(
            "  [{}] {}: {}",
            if c.passed { "ok" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
}

fn write_run(dir: &Path, run: &ScenarioRun) -> Result<(), String> {
    write(dir, "toss.csv", &run.toss_table.to_csv())?;
    if let Some(t) = &run.ltv_table {
        write(dir, "ltv.csv", &t.to_csv())?;
    }
    write(dir, "summary.json", &run.summary.to_json())
}
