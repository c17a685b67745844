use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kickfid_core::classical::{default_portrait_seeds, rotation_frequency, DEFAULT_PORTRAIT_ITERATIONS};
use kickfid_core::io::WignerView;
use kickfid_core::{MomentumForm, OscModelParams, OverlapPath, PhasePoint, Window};

use kickfid_cli::config::{load_file, workers_from_env};
use kickfid_cli::manifest::BandEntry;
use kickfid_cli::{figures, runner, CliError, CliResult, ConfigOverrides, ExperimentConfig, Figure, RunOutput};

#[derive(Parser)]
#[command(name = "kickfid", version, about = "Fidelity of kicked wavepackets with mean-field interaction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classical orbits of the kicked map.
    Portrait {
        #[command(flatten)]
        common: Common,
        /// Seeds as `x:p` pairs; defaults to x = 0.1 .. 1.4 at p = 0.
        #[arg(long, value_delimiter = ',', value_parser = parse_point)]
        seeds: Vec<PhasePoint>,
        #[arg(long, default_value_t = DEFAULT_PORTRAIT_ITERATIONS)]
        iterations: usize,
    },
    /// Evolve one wavepacket under K1 and save snapshots.
    Evolve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        save_at: Vec<usize>,
    },
    /// Twin evolution under K1 and K2 with period extraction.
    Fidelity {
        #[command(flatten)]
        common: Common,
    },
    /// Spectrum and band peaks of an existing `kick,value` series.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long = "in")]
        input: PathBuf,
        /// `default` or a list of `name=lo:hi` bands in cycles per kick.
        #[arg(long, default_value = "default")]
        bands: String,
    },
    /// Wigner snapshots at the requested kicks.
    Wigner {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        at_kick: Vec<usize>,
        /// Keep every n-th grid point in both directions.
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Restrict the written window to |x|, |p| <= extent.
        #[arg(long)]
        extent: Option<f64>,
    },
    /// Wigner correlation G(n) compared with the fidelity.
    Gcorr {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        g: GArgs,
    },
    /// Fidelity periods over a list of beta values.
    SweepBeta {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Fidelity periods over a list of initial positions.
    SweepX0 {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Closed-form oscillator model of the fidelity and G.
    Analytic {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: AnalyticArgs,
    },
    /// Run a named figure scenario.
    Reproduce {
        figure: Figure,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        g: GArgs,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML file with top-level keys and per-scenario tables.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    k1: Option<f64>,
    #[arg(long)]
    k2: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    p0: Option<f64>,
    /// Frequency of the initial coherent state.
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    n_kicks: Option<usize>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    window: Option<Window>,
    #[arg(long)]
    pad: Option<usize>,
    #[arg(long)]
    detrend: Option<bool>,
}

#[derive(Args, Clone, Default)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    x0s: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    p0s: Option<Vec<f64>>,
}

#[derive(Args, Clone, Default)]
struct GArgs {
    #[arg(long)]
    delta_n: Option<usize>,
    #[arg(long, value_enum)]
    overlap: Option<OverlapArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OverlapArg {
    InnerProduct,
    Wigner,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum FormArg {
    #[default]
    Difference,
    Sum,
}

#[derive(Args, Clone)]
struct AnalyticArgs {
    /// Defaults to the rotation frequency at K1.
    #[arg(long)]
    omega1: Option<f64>,
    /// Defaults to the rotation frequency at K2.
    #[arg(long)]
    omega2: Option<f64>,
    /// Orbit radius; defaults to x0.
    #[arg(long)]
    rho: Option<f64>,
    /// Breathing depth of the position width relative to its mean.
    #[arg(long, default_value_t = 0.04)]
    gamma_x: f64,
    /// Breathing depth of the momentum width relative to its mean.
    #[arg(long, default_value_t = 0.04)]
    gamma_p: f64,
    /// Breathing frequency of the widths.
    #[arg(long = "Omega", default_value_t = 1.94)]
    big_omega: f64,
    #[arg(long, default_value_t = 0.0)]
    phi_x: f64,
    #[arg(long, default_value_t = 0.0)]
    phi_p: f64,
    #[arg(long, default_value_t = 2000)]
    t_max: usize,
    /// Lag of the correlation G.
    #[arg(long, default_value_t = 1.0)]
    delta_t: f64,
    #[arg(long, value_enum, default_value_t = FormArg::Difference)]
    form: FormArg,
}

fn parse_point(s: &str) -> Result<PhasePoint, String> {
    let (x, p) = s.split_once(':').ok_or_else(|| format!("'{s}' is not x:p"))?;
    let x = x.trim().parse().map_err(|_| format!("bad x in '{s}'"))?;
    let p = p.trim().parse().map_err(|_| format!("bad p in '{s}'"))?;
    Ok(PhasePoint::new(x, p))
}

impl Common {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            k1: self.k1,
            k2: self.k2,
            beta: self.beta,
            tau: self.tau,
            x0: self.x0,
            p0: self.p0,
            omega0: self.omega0,
            n_kicks: self.n_kicks,
            grid_points: self.grid_points,
            x_max: self.x_max,
            window: self.window,
            pad: self.pad,
            detrend: self.detrend,
            output: self.out.clone(),
            ..Default::default()
        }
    }
}

fn flag_layer(common: &Common, sweep: Option<&SweepArgs>, g: Option<&GArgs>) -> ConfigOverrides {
    let mut o = common.overrides();
    if let Some(s) = sweep {
        o.betas = s.betas.clone();
        o.x0s = s.x0s.clone();
        o.p0s = s.p0s.clone();
    }
    if let Some(g) = g {
        o.delta_n = g.delta_n;
        o.overlap = g.overlap.map(|v| match v {
            OverlapArg::InnerProduct => OverlapPath::InnerProduct,
            OverlapArg::Wigner => OverlapPath::Wigner,
        });
    }
    o
}

/// Defaults, optional preset, file layers, then flags.
fn resolve(
    scenario: &str,
    figure: Option<Figure>,
    common: &Common,
    flags: &ConfigOverrides,
) -> CliResult<ExperimentConfig> {
    let (global, section) = match &common.config {
        Some(path) => load_file(path, scenario)?,
        None => Default::default(),
    };
    let layers = [&global, &section, flags];
    match figure {
        Some(f) => figures::resolve(f, &layers),
        None => ExperimentConfig::resolve(scenario, &layers),
    }
}

fn execute(command: Command) -> CliResult<RunOutput> {
    match command {
        Command::Portrait { common, seeds, iterations } => {
            let cfg = resolve("portrait", None, &common, &flag_layer(&common, None, None))?;
            let seeds = if seeds.is_empty() { default_portrait_seeds() } else { seeds };
            runner::run_portrait(&cfg, &seeds, iterations)
        }
        Command::Evolve { common, save_at } => {
            let cfg = resolve("evolve", None, &common, &flag_layer(&common, None, None))?;
            runner::run_evolve(&cfg, &save_at)
        }
        Command::Fidelity { common } => {
            let cfg = resolve("fidelity", None, &common, &flag_layer(&common, None, None))?;
            runner::run_fidelity_experiment(&cfg)
        }
        Command::Spectrum { common, input, bands } => {
            let cfg = resolve("spectrum", None, &common, &flag_layer(&common, None, None))?;
            runner::run_spectrum(&cfg, &input, &bands)
        }
        Command::Wigner { common, at_kick, stride, extent } => {
            let mut flags = flag_layer(&common, None, None);
            if flags.n_kicks.is_none() {
                flags.n_kicks = at_kick.iter().copied().max();
            }
            let cfg = resolve("wigner", None, &common, &flags)?;
            let range = extent.map(|e| (-e, e));
            let view = WignerView { stride, x_range: range, p_range: range };
            runner::run_wigner_sequence(&cfg, &at_kick, &view)
        }
        Command::Gcorr { common, g } => {
            let cfg = resolve("gcorr", None, &common, &flag_layer(&common, None, Some(&g)))?;
            runner::run_g_correlation(&cfg)
        }
        Command::SweepBeta { common, sweep } => {
            let cfg = resolve("sweep-beta", None, &common, &flag_layer(&common, Some(&sweep), None))?;
            runner::sweep_beta(&cfg)
        }
        Command::SweepX0 { common, sweep } => {
            let cfg = resolve("sweep-x0", None, &common, &flag_layer(&common, Some(&sweep), None))?;
            runner::sweep_x0(&cfg)
        }
        Command::Analytic { common, model } => {
            let cfg = resolve("analytic", None, &common, &flag_layer(&common, None, None))?;
            let omega1 = match model.omega1 {
                Some(w) => w,
                None => rotation_frequency(cfg.k1)?,
            };
            let omega2 = match model.omega2 {
                Some(w) => w,
                None => rotation_frequency(cfg.k2)?,
            };
            let params = OscModelParams::coherent(omega1, omega2, model.rho.unwrap_or(cfg.x0), cfg.tau)
                .with_relative_gammas(model.gamma_x, model.gamma_p)
                .with_width_frequency(model.big_omega)
                .with_phases(model.phi_x, model.phi_p);
            let form = match model.form {
                FormArg::Difference => MomentumForm::Difference,
                FormArg::Sum => MomentumForm::Sum,
            };
            runner::run_analytic(&cfg, &params, form, model.t_max, model.delta_t)
        }
        Command::Reproduce { figure, common, sweep, g } => {
            let flags = flag_layer(&common, Some(&sweep), Some(&g));
            let cfg = resolve(figure.name(), Some(figure), &common, &flags)?;
            figure.run(&cfg)
        }
    }
}

fn report(out: &RunOutput) {
    let m = &out.manifest;
    println!("{}: {}", m.command, out.dir.display());
    for (name, entry) in &m.peaks {
        match entry {
            BandEntry::Peak(p) => println!(
                "  {name}: period {:.4} kicks (nu {:.6}, amplitude {:.4e})",
                p.period, p.nu, p.amplitude
            ),
            BandEntry::NoPeak => println!("  {name}: no peak"),
            BandEntry::Error { message } => println!("  {name}: {message}"),
        }
    }
    for (name, v) in &m.values {
        println!("  {name} = {v}");
    }
    if !m.leaks.is_empty() {
        println!("  {} boundary leak warnings", m.leaks.len());
    }
    for e in &m.errors {
        eprintln!("  error: {e}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = workers_from_env().and_then(|workers| {
        if let Some(n) = workers {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        execute(cli.command)
    });
    let code = match result {
        Ok(out) => {
            report(&out);
            out.exit_code()
        }
        Err(e) => {
            eprintln!("kickfid: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
