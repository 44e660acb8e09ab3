use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use buoylink::antenna::{reference_tables, ElevationPattern, PatternTable};
use buoylink::dielectric::{log_spaced, MediumSpec};
use buoylink::harness::{HarnessOptions, REFERENCE_ROWS};
use buoylink::los_engine::SweepAxis;
use buoylink::output::{resolve_output_dir, OutputDir};
use buoylink::power_budget::{DriveAccounting, PaAssumptions};
use buoylink::runner::{self, AntennaOptions, PowerQuery, RunOutput, WaveOptions};
use buoylink::scenario::{parse_scenario_file, Scenario};
use buoylink::sea_state::{AmplitudeConvention, GridSettings, SeaStateParams};
use buoylink::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "buoylink", version, about = "Wave-blocking LoS simulator for buoy-to-shore links")]
struct Cli {
    /// Master seed; overrides the scenario's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (speed only; results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory [default: scenario `outputs`, then $BUOYLINK_OUT, then ./buoylink-out]
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Permittivity, penetration depth and attenuation of water or ice.
    Dielectric(DielectricArgs),
    /// Surface elevation traces and realized significant wave height.
    Wave(WaveArgs),
    /// Monte Carlo LoS statistics for a scenario file.
    Los(LosArgs),
    /// Antenna tilt series and directivity along it.
    Antenna(AntennaArgs),
    /// PA DC power versus EIRP.
    Power(PowerArgs),
    /// LoS statistics over a range of one parameter.
    Sweep(SweepArgs),
    /// Reference-row regression report.
    Regress(RegressArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Medium {
    Pure,
    Sea,
    Ice,
}

#[derive(Args, Debug)]
struct DielectricArgs {
    #[arg(long, value_enum, default_value = "sea")]
    medium: Medium,
    #[arg(long = "temp-c", default_value_t = 20.0, allow_negative_numbers = true)]
    temp_c: f64,
    /// Salinity in g/kg (sea water only).
    #[arg(long, default_value_t = 35.0)]
    salinity: f64,
    /// Explicit frequencies in GHz.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["fmin", "fmax"])]
    freqs: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    fmin: f64,
    #[arg(long, default_value_t = 100.0)]
    fmax: f64,
    #[arg(long, default_value_t = 61)]
    points: usize,
    /// Print the table instead of writing dielectric.csv.
    #[arg(long)]
    stdout: bool,
}

#[derive(Args, Debug)]
struct SeaArgs {
    #[arg(long)]
    hs: f64,
    #[arg(long)]
    tp: f64,
    #[arg(long, value_enum, default_value = "energy-conserving")]
    convention: Convention,
    #[arg(long, default_value_t = 256)]
    components: usize,
    /// Upper grid frequency in Hz [default: max(1.5, 3/T_p)]
    #[arg(long)]
    f_max_hz: Option<f64>,
    #[arg(long, default_value_t = 60.0)]
    window: f64,
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
}

impl SeaArgs {
    fn grid(&self) -> GridSettings {
        GridSettings {
            n_components: self.components,
            omega_max: self.f_max_hz.map(|f| 2.0 * std::f64::consts::PI * f),
            ..GridSettings::default()
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Convention {
    EnergyConserving,
    PaperLiteral,
}

impl From<Convention> for AmplitudeConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::EnergyConserving => AmplitudeConvention::EnergyConserving,
            Convention::PaperLiteral => AmplitudeConvention::PaperLiteral,
        }
    }
}

#[derive(Args, Debug)]
struct WaveArgs {
    #[command(flatten)]
    sea: SeaArgs,
    #[arg(long, default_value_t = 1)]
    realizations: usize,
    /// Positions along the transect, metres.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    x: Vec<f64>,
}

#[derive(Args, Debug)]
struct LosArgs {
    /// Scenario file (TOML or JSON).
    config: PathBuf,
    /// Also write timeline.csv with every sample of every realization.
    #[arg(long)]
    timelines: bool,
}

#[derive(Args, Debug)]
struct AntennaArgs {
    #[command(flatten)]
    sea: SeaArgs,
    #[arg(long, default_value_t = 0)]
    realization: usize,
    /// Buoy position along the transect, metres.
    #[arg(long, default_value_t = 0.0)]
    x: f64,
    /// Effective antenna height, metres.
    #[arg(long, default_value_t = 1.0)]
    ha: f64,
    /// `dipole` (analytic), `dipole-table`, `monopole`, `bowtie`, `bicone`, or a CSV file `angle_deg,dbi`.
    #[arg(long, default_value = "dipole")]
    pattern: String,
    /// Treat a CSV pattern as one-sided (no mirroring to negative angles).
    #[arg(long)]
    one_sided: bool,
    #[arg(long, default_value_t = 0.5)]
    gain_step: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Drive {
    PowerAdded,
    Neglected,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("query").required(true).args(["eirp_dbm", "dc_mw"])))]
struct PowerArgs {
    /// Target EIRP; prints the PA DC power needed.
    #[arg(long, allow_negative_numbers = true)]
    eirp_dbm: Option<f64>,
    /// PA DC power; prints the resulting EIRP.
    #[arg(long)]
    dc_mw: Option<f64>,
    #[arg(long, default_value_t = 0.4)]
    pae: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pin_dbm: f64,
    #[arg(long, default_value_t = 1.0)]
    switch_loss_db: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    gain_dbi: f64,
    #[arg(long, default_value_t = 6.0)]
    backoff_db: f64,
    #[arg(long, value_enum, default_value = "power-added")]
    drive: Drive,
}

#[derive(Args, Debug)]
struct SweepArgs {
    config: PathBuf,
    /// tp, distance or ha
    #[arg(long)]
    axis: SweepAxis,
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
}

#[derive(Args, Debug)]
struct RegressArgs {
    #[arg(long, default_value_t = 1000)]
    realizations: usize,
    /// Row indices (0-based) to run [default: all]
    #[arg(long, value_delimiter = ',')]
    rows: Vec<usize>,
    /// Tower heights for the sensitivity table.
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,50")]
    tower_heights: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    sensitivity_realizations: usize,
    #[arg(long, default_value_t = 100)]
    monotonicity_realizations: usize,
    /// Exit nonzero when any check fails.
    #[arg(long)]
    strict: bool,
}

fn output_dir(cli: &Cli, scenario: Option<&Path>) -> Result<OutputDir> {
    OutputDir::prepare(resolve_output_dir(cli.out.as_deref(), scenario))
}

fn load_scenario(cli: &Cli, path: &Path) -> Result<Scenario> {
    let mut s = parse_scenario_file(path)?;
    if let Some(seed) = cli.seed {
        s.master_seed = seed;
    }
    if s.deep_water_warning {
        eprintln!("warning: water depth is below 0.3 peak wavelengths; deep-water dispersion is assumed anyway");
    }
    Ok(s)
}

fn report(out: &RunOutput) {
    for f in &out.files {
        eprintln!("wrote {}", f.display());
    }
    eprintln!("wrote {}", out.manifest.display());
}

fn pattern_from_arg(arg: &str, one_sided: bool) -> Result<ElevationPattern> {
    match arg {
        "dipole" => return Ok(ElevationPattern::AnalyticHalfWaveDipole),
        "dipole-table" => return Ok(ElevationPattern::Tabulated(reference_tables()[0].1.clone())),
        _ => {}
    }
    if let Some((_, t)) = reference_tables().into_iter().find(|(name, _)| *name == arg) {
        return Ok(ElevationPattern::Tabulated(t));
    }
    Ok(ElevationPattern::Tabulated(PatternTable::from_csv_file(Path::new(arg), !one_sided)?))
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Dielectric(a) => {
            let medium = match a.medium {
                Medium::Pure => MediumSpec::pure_water(a.temp_c),
                Medium::Sea => MediumSpec::sea_water(a.temp_c, a.salinity),
                Medium::Ice => MediumSpec::ice(a.temp_c),
            };
            let freqs = if a.freqs.is_empty() { log_spaced(a.fmin, a.fmax, a.points) } else { a.freqs.clone() };
            if a.stdout {
                print!("{}", runner::dielectric_csv(medium, &freqs)?.as_str());
            } else {
                report(&runner::run_dielectric(medium, &freqs, &output_dir(cli, None)?)?);
            }
        }
        Command::Wave(a) => {
            let opts = WaveOptions {
                sea: SeaStateParams::new(a.sea.hs, a.sea.tp),
                grid: a.sea.grid(),
                convention: a.sea.convention.into(),
                master_seed: cli.seed.unwrap_or(0),
                n_realizations: a.realizations,
                window_s: a.sea.window,
                dt_s: a.sea.dt,
                positions_m: a.x.clone(),
            };
            let dir = output_dir(cli, None)?;
            let (summary, out) = runner::run_wave(&opts, &dir)?;
            println!("{}", serde_json::to_string(&summary)?);
            report(&out);
        }
        Command::Los(a) => {
            let s = load_scenario(cli, &a.config)?;
            let dir = output_dir(cli, s.outputs.as_deref())?;
            let (stats, out) = runner::run_los(&s, &dir, a.timelines)?;
            println!(
                "P_LoS {:.5}  mu {}  sigma {}  gamma {}",
                stats.p_los,
                fmt_opt(stats.mu_clos_s),
                fmt_opt(stats.sigma_clos_s),
                fmt_opt(stats.gamma_clos_s)
            );
            report(&out);
        }
        Command::Antenna(a) => {
            let opts = AntennaOptions {
                sea: SeaStateParams::new(a.sea.hs, a.sea.tp),
                grid: a.sea.grid(),
                convention: a.sea.convention.into(),
                master_seed: cli.seed.unwrap_or(0),
                realization: a.realization,
                window_s: a.sea.window,
                dt_s: a.sea.dt,
                position_m: a.x,
                antenna_height_m: a.ha,
                pattern: pattern_from_arg(&a.pattern, a.one_sided)?,
                gain_step_deg: a.gain_step,
            };
            let dir = output_dir(cli, None)?;
            let (summary, out) = runner::run_antenna(&opts, &dir)?;
            println!("{}", serde_json::to_string(&summary)?);
            report(&out);
        }
        Command::Power(a) => {
            let assumptions = PaAssumptions {
                pae_fraction: a.pae,
                pa_input_dbm: a.pin_dbm,
                switch_loss_db: a.switch_loss_db,
                antenna_gain_dbi: a.gain_dbi,
                backoff_db: a.backoff_db,
                drive: match a.drive {
                    Drive::PowerAdded => DriveAccounting::PowerAdded,
                    Drive::Neglected => DriveAccounting::Neglected,
                },
            };
            let query = match (a.eirp_dbm, a.dc_mw) {
                (Some(eirp_dbm), _) => PowerQuery::DcForEirp { eirp_dbm },
                (None, Some(pa_dc_mw)) => PowerQuery::EirpForDc { pa_dc_mw },
                (None, None) => unreachable!("clap enforces one of the two"),
            };
            println!("{}", runner::power_json(query, &assumptions)?);
        }
        Command::Sweep(a) => {
            let s = load_scenario(cli, &a.config)?;
            let dir = output_dir(cli, s.outputs.as_deref())?;
            let out = runner::run_sweep(&s, a.axis, &a.values, &dir)?;
            print!("{}", std::fs::read_to_string(&out.files[0])?);
            report(&out);
        }
        Command::Regress(a) => {
            let rows = if a.rows.is_empty() { (0..REFERENCE_ROWS.len()).collect() } else { a.rows.clone() };
            if let Some(&bad) = rows.iter().find(|&&r| r >= REFERENCE_ROWS.len()) {
                return Err(Error::Config(format!("row {bad} out of range (0..{})", REFERENCE_ROWS.len())));
            }
            let opts = HarnessOptions {
                n_realizations: a.realizations,
                master_seed: cli.seed.unwrap_or(0),
                rows,
                tower_heights_m: a.tower_heights.clone(),
                sensitivity_realizations: a.sensitivity_realizations,
                monotonicity_realizations: a.monotonicity_realizations,
            };
            let dir = output_dir(cli, None)?;
            let (rep, out) = runner::run_regress(&opts, &dir)?;
            print!("{}", rep.render());
            report(&out);
            if a.strict && !rep.all_passed() {
                return Err(Error::Domain("regression checks failed".into()));
            }
        }
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.3}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} worker threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Parse(_) | Error::Refinement { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
