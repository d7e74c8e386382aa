use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

use cmjtree::experiments::{self as exp, CsvTable, InitialShape, TrackOptions};
use cmjtree::growth::{population_trajectory_capped, population_trajectory_until, CmjProcess, DEFAULT_POPULATION_CAP};
use cmjtree::seeds::{run_trials, trial_rng, SEED_SCHEME};
use cmjtree::{grow_discrete, solve_malthusian, AttractionSpec, GrowingTree, Stop};
use serde_json::{json, Value};

use crate::config::{Command, ExperimentConfig, GrowthModel};
use crate::error::{ConfigError, RunError};
use crate::tables::{Analysis, MalthusRow, PerTrial, Trajectories};
use crate::{OUT_DIR_ENV, VERSION};

/// Files written by one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub csv_path: PathBuf,
    pub sidecar_path: PathBuf,
    /// Printed to stdout by the binary, when the command has a direct answer.
    pub stdout: Option<String>,
    /// The `summary` object of the sidecar.
    pub summary: Value,
}

struct Produced {
    csv: Vec<u8>,
    summary: Value,
    stdout: Option<String>,
}

fn csv_of<T: CsvTable + ?Sized>(table: &T) -> Result<Vec<u8>, RunError> {
    let mut buf = Vec::new();
    exp::write_csv(table, &mut buf)?;
    Ok(buf)
}

/// Vertex list as 1-based labels.
fn labels(vs: &[usize]) -> Vec<usize> {
    vs.iter().map(|v| v + 1).collect()
}

fn read_tree(path: &Path) -> Result<GrowingTree, RunError> {
    let file = File::open(path).map_err(|e| ConfigError(format!("cannot open tree file {}: {e}", path.display())))?;
    Ok(GrowingTree::read_csv(BufReader::new(file))?)
}

fn shape(s: &str) -> Result<InitialShape, RunError> {
    match s.trim().strip_prefix("file:") {
        Some(path) => Ok(InitialShape::Tree(read_tree(Path::new(path))?)),
        None => Ok(s.parse()?),
    }
}

/// Resolves `config`, runs it, and writes `<cmd>.csv` and `<cmd>.json` to
/// the output directory (the config's `out_dir`, else the `CMJTREE_OUT_DIR`
/// variable, else the working directory).
pub fn run(config: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let start = Instant::now();
    let mut cfg = config.clone().resolve()?;
    let out_dir = cfg
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    cfg.out_dir = Some(out_dir.clone());

    let produced = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RunError::Runtime(e.to_string()))?
            .install(|| dispatch(&mut cfg))?,
        None => dispatch(&mut cfg)?,
    };

    let name = cfg.command().name();
    fs::create_dir_all(&out_dir)?;
    let csv_path = out_dir.join(format!("{name}.csv"));
    let sidecar_path = out_dir.join(format!("{name}.json"));
    fs::write(&csv_path, &produced.csv)?;
    let sidecar = json!({
        "command": name,
        "config": cfg,
        "master_seed": cfg.master_seed,
        "seed_scheme": SEED_SCHEME,
        "version": VERSION,
        "runtime_seconds": start.elapsed().as_secs_f64(),
        "csv": format!("{name}.csv"),
        "summary": produced.summary,
    });
    fs::write(&sidecar_path, serde_json::to_string_pretty(&sidecar).expect("sidecar serializes") + "\n")?;
    Ok(RunOutput { csv_path, sidecar_path, stdout: produced.stdout, summary: produced.summary })
}

/// Runs the resolved command; may fill computed defaults (horizons) back
/// into `cfg` so the sidecar echoes them.
fn dispatch(cfg: &mut ExperimentConfig) -> Result<Produced, RunError> {
    let seed = cfg.master_seed.unwrap_or(0);
    let spec = cfg.spec.clone();
    let spec = || spec.clone().expect("resolved config has a spec");
    let trials = cfg.trials.unwrap_or(1);
    let out = match cfg.command() {
        Command::Grow => {
            let mut rng = trial_rng(seed, 0);
            let (tree, final_time) = match cfg.model.unwrap_or_default() {
                GrowthModel::Discrete => (grow_discrete(&spec(), cfg.n.expect("resolved"), &mut rng)?, None),
                GrowthModel::Cmj => {
                    let stop = match cfg.n {
                        Some(n) => Stop::Vertices(n),
                        None => Stop::Time(cfg.t_end.expect("resolved")),
                    };
                    let mut p =
                        CmjProcess::new(&spec(), &mut rng)?.with_cap(cfg.cap.unwrap_or(DEFAULT_POPULATION_CAP));
                    p.run(stop, &mut rng)?;
                    let t = p.time();
                    (p.into_tree(), Some(t))
                }
            };
            let mut csv = Vec::new();
            tree.write_csv(&mut csv)?;
            let report = tree.centroids();
            Produced {
                csv,
                summary: json!({
                    "n": tree.len(),
                    "final_time": final_time,
                    "max_degree": tree.max_degree(),
                    "centroids": labels(&report.centroid_ids),
                    "psi_min": report.psi(),
                }),
                stdout: None,
            }
        }
        Command::Analyze => {
            let tree = read_tree(cfg.tree.as_deref().expect("resolved"))?;
            let a = Analysis::new(&tree);
            Produced {
                csv: csv_of(&a)?,
                summary: json!({
                    "n": tree.len(),
                    "max_degree": tree.max_degree(),
                    "centroids": labels(&a.centroids),
                    "selected": a.selected + 1,
                    "psi_min": a.psi[a.selected],
                }),
                stdout: None,
            }
        }
        Command::Malthus => {
            let est = solve_malthusian(&spec(), cfg.tol.expect("resolved"))?;
            let summary = serde_json::to_value(est).expect("estimate serializes");
            Produced {
                csv: csv_of(&MalthusRow(est))?,
                stdout: Some(serde_json::to_string(&summary).expect("estimate serializes")),
                summary,
            }
        }
        Command::Trajectory => {
            let spec = spec();
            // Normalisation is skipped when the spec has no Malthusian parameter.
            let theta = solve_malthusian(&spec, 1e-10).ok().map(|e| e.theta);
            let dt = cfg.dt.expect("resolved");
            let (t_end, target, cap) = (cfg.t_end, cfg.target, cfg.cap.unwrap_or(DEFAULT_POPULATION_CAP));
            let trajs = run_trials(seed, trials, |_, rng| match (t_end, target) {
                (Some(t), _) => population_trajectory_capped(&spec, t, dt, theta, cap, rng),
                (None, Some(z)) => population_trajectory_until(&spec, z, dt, theta, rng),
                (None, None) => unreachable!("resolve requires t_end or target"),
            })?;
            let slopes: Vec<f64> =
                trajs.iter().filter_map(|t| t.log_slope(t.final_time() / 2.0, t.final_time())).collect();
            Produced {
                csv: csv_of(&Trajectories(&trajs))?,
                summary: json!({
                    "theta": theta,
                    "mean_log_slope_second_half": exp::stats::mean(&slopes),
                    "mean_final_population": exp::stats::mean(
                        &trajs.iter().map(|t| t.final_population() as f64).collect::<Vec<_>>()
                    ),
                }),
                stdout: None,
            }
        }
        Command::Coverage => {
            let table = exp::root_coverage(
                &spec(),
                cfg.n.expect("resolved"),
                cfg.k_list.as_deref().expect("resolved"),
                trials,
                seed,
                cfg.allow_other_specs.unwrap_or(false),
            )?;
            Produced {
                csv: csv_of(&table)?,
                summary: json!({
                    "smallest_k_0.90": table.smallest_k(0.90),
                    "smallest_k_0.95": table.smallest_k(0.95),
                    "smallest_k_0.99": table.smallest_k(0.99),
                }),
                stdout: None,
            }
        }
        Command::Track => {
            let opts = TrackOptions {
                checkpoints: cfg.checkpoints.clone().unwrap_or_default(),
                k_top: cfg.k_top.expect("resolved"),
                full_recompute_upto: cfg.stride.expect("resolved"),
            };
            let logs = exp::track_centroid_trials(&spec(), cfg.n_max.expect("resolved"), &opts, trials, seed)?;
            let sum = |f: fn(&exp::CentroidChangeLog) -> usize| logs.iter().map(f).sum::<usize>();
            Produced {
                csv: csv_of(&PerTrial(&logs))?,
                summary: json!({
                    "trials": logs.len(),
                    "change_events": sum(|l| l.events.len()),
                    "steps_checked": sum(|l| l.steps_checked),
                    "half_bound_violations": sum(|l| l.half_bound_violations),
                    "newcomer_checks": sum(|l| l.newcomer_checks),
                    "newcomer_bound_violations": sum(|l| l.newcomer_bound_violations),
                }),
                stdout: None,
            }
        }
        Command::Maxdeg => {
            let rows =
                exp::max_degree_scan(cfg.alpha.expect("resolved"), cfg.n_list.as_deref().expect("resolved"), trials, seed)?;
            let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).filter(|r| r.is_finite()).collect();
            let spread = ratios.iter().copied().fold(f64::NAN, f64::max) / ratios.iter().copied().fold(f64::NAN, f64::min);
            Produced { csv: csv_of(&rows)?, summary: json!({ "ratio_spread": spread }), stdout: None }
        }
        Command::Race => {
            let spec = spec();
            let (shape1, shape2, r_list) = (cfg.shape1.clone(), cfg.shape2.clone(), cfg.r_list.clone());
            let results = match (shape1, shape2, r_list) {
                (Some(a), Some(b), _) => {
                    let (a, b) = (shape(&a)?, shape(&b)?);
                    let t_end = match cfg.t_end {
                        Some(t) => t,
                        None => exp::default_race_horizon(&spec, a.len().min(b.len()))?,
                    };
                    cfg.t_end = Some(t_end);
                    vec![exp::race(&a, &b, &spec, t_end, trials, seed)?]
                }
                (_, _, Some(rs)) => rs
                    .iter()
                    .enumerate()
                    .map(|(i, &r)| {
                        let t_end = match cfg.t_end {
                            Some(t) => t,
                            None => exp::default_race_horizon(&spec, r)?,
                        };
                        // Each r gets its own master seed so the races are independent.
                        exp::race(&InitialShape::Line(r), &InitialShape::Star(r), &spec, t_end, trials, seed.wrapping_add(i as u64))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                _ => unreachable!("resolve checks the race shapes"),
            };
            Produced {
                csv: csv_of(&results)?,
                summary: serde_json::to_value(&results).expect("results serialize"),
                stdout: None,
            }
        }
        Command::Dominance => {
            let alpha = cfg.alpha.expect("resolved");
            let t_end = match cfg.t_end {
                Some(t) => t,
                None => {
                    // Long enough for a single-vertex process to reach about 10^3.
                    let theta = solve_malthusian(&AttractionSpec::alpha_sublinear(alpha)?, 1e-10)?.theta;
                    1e3f64.ln() / theta
                }
            };
            cfg.t_end = Some(t_end);
            let report = exp::dominance_check(cfg.d.expect("resolved"), alpha, t_end, trials, seed)?;
            Produced {
                csv: csv_of(&report)?,
                summary: json!({
                    "mean_shifted": report.mean_shifted,
                    "mean_sum": report.mean_sum,
                    "mean_gap_z": report.mean_gap_z(),
                    "ecdf_violations_2se": report.ecdf_violations(2.0),
                }),
                stdout: None,
            }
        }
        Command::Hoeffding => {
            let rows = exp::hoeffding_probe(cfg.n_list.as_deref().expect("resolved"), trials, seed)?;
            Produced {
                csv: csv_of(&rows)?,
                summary: serde_json::to_value(&rows).expect("rows serialize"),
                stdout: None,
            }
        }
    };
    Ok(out)
}
