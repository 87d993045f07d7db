use clap::{Parser, Subcommand};

use kerrline::config::load_config;
use kerrline::pipeline::{
    run_coupling, run_current_profile, run_kerr, run_lattice, run_modes, run_spectrum, run_sweep,
    run_verify_kerr, write_outputs, RWA_TOL,
};

#[derive(Parser)]
#[command(
    name = "kerrline",
    version,
    about = "Eigenmodes, Kerr nonlinearities and Bose-Hubbard lattices of a junction-intersected transmission line resonator"
)]
struct Cli {
    /// JSON configuration file
    #[arg(long, global = true, default_value = "config.json")]
    config: String,
    /// Output directory for CSV files and the manifest
    #[arg(long, global = true, default_value = "out")]
    out: String,
    /// Worker threads for sweeps (0 = one per core)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenmode spectrum at the configured point I_c
    Spectrum,
    /// Eigenmode spectrum across the configured I_c sweep, with branch gaps
    Sweep,
    /// Mode normalization: wavenumbers, jumps, eta, zero-point amplitudes
    Modes,
    /// RMS current along the line and through the junction
    CurrentProfile {
        /// Photons in the fundamental (closed form: 0, 1 or 2)
        #[arg(long, default_value_t = 0)]
        n_photons: usize,
        /// Vacuum modes kept in the line profile (default: all configured)
        #[arg(long)]
        n_cutoff: Option<usize>,
        /// Number of sampled positions
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Kerr shift and self-Kerr of the fundamental (sweep when configured)
    Kerr,
    /// Check the closed-form Kerr against exact Fock-space diagonalization
    VerifyKerr {
        /// Verification points across the sweep range
        #[arg(long, default_value_t = 5)]
        points: usize,
        /// Maximum accepted relative deviation
        #[arg(long, default_value_t = RWA_TOL)]
        tol: f64,
    },
    /// Inter-resonator coupling strengths for the configured C_c
    Coupling,
    /// Bose-Hubbard chain of capacitively coupled resonators
    Lattice {
        #[arg(long, default_value_t = 6)]
        sites: usize,
        /// Per-site photon cutoff (levels 0..cutoff-1)
        #[arg(long, default_value_t = 3)]
        cutoff: usize,
        /// Restrict to one total-photon-number sector
        #[arg(long)]
        sector: Option<usize>,
        #[arg(long)]
        periodic: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Sweep => "sweep",
            Command::Modes => "modes",
            Command::CurrentProfile { .. } => "current-profile",
            Command::Kerr => "kerr",
            Command::VerifyKerr { .. } => "verify-kerr",
            Command::Coupling => "coupling",
            Command::Lattice { .. } => "lattice",
        }
    }
}

fn run(cli: &Cli) -> kerrline::Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .ok();
    }
    let cfg = load_config(&cli.config)?;
    let out = match &cli.command {
        Command::Spectrum => run_spectrum(&cfg)?,
        Command::Sweep => run_sweep(&cfg)?,
        Command::Modes => run_modes(&cfg)?,
        Command::CurrentProfile {
            n_photons,
            n_cutoff,
            points,
        } => run_current_profile(&cfg, *n_photons, *n_cutoff, *points)?,
        Command::Kerr => run_kerr(&cfg)?,
        Command::VerifyKerr { points, tol } => run_verify_kerr(&cfg, *points, *tol)?,
        Command::Coupling => run_coupling(&cfg)?,
        Command::Lattice {
            sites,
            cutoff,
            sector,
            periodic,
        } => run_lattice(&cfg, *sites, *cutoff, *sector, *periodic)?,
    };
    write_outputs(&cli.out, &out, &cfg, cli.command.name())?;
    print!("{}", out.summary);
    if let Some(err) = out.failure {
        return Err(err);
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(kerrline::exit_code(&e));
    }
}
