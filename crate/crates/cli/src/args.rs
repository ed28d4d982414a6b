use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fronts::classify::{ClassifyOptions, Theorem};
use fronts::Tolerances;

/// Inflections, front singularities, godron counts and cuspidal curvature.
#[derive(Debug, Parser)]
#[command(name = "fronts", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Directory for the report and any CSV/SVG files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for the parallel stages.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify one point: A_k-inflection, front singularity or Morin singularity.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Point as `u=..,v=..` (or bare values in variable order).
        #[arg(long)]
        point: String,
        /// Also classify the dual side and check the pairing.
        #[arg(long)]
        dual: bool,
    },
    /// The dual object at a point and its verdict.
    Dual {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        point: String,
        /// Pairing to use; defaults from the map kind.
        #[arg(long, value_enum)]
        theorem: Option<TheoremArg>,
    },
    /// Trace the inflection curve (or the singular curve of a plane map).
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, value_enum)]
        function: Option<FunctionArg>,
    },
    /// Godron census and the signed count against the Euler characteristic.
    Euler {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        /// Largest lattice used to resolve saddle-ambiguous cells.
        #[arg(long, default_value_t = 1024)]
        max_grid: usize,
    },
    /// Cuspidal curvature and best cycloid of a planar curve.
    Cusp {
        /// Map file (a planar curve).
        map: PathBuf,
        #[arg(long)]
        point: String,
        /// Half-width of the parameter window for the cycloid residual.
        #[arg(long, default_value_t = 0.1)]
        window: f64,
        /// At a regular point, report the osculating cycloid instead.
        #[arg(long)]
        regular: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Dual { .. } => "dual",
            Command::Trace { .. } => "trace",
            Command::Euler { .. } => "euler",
            Command::Cusp { .. } => "cusp",
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// Map file.
    pub map: PathBuf,
    #[arg(long)]
    pub tol_zero: Option<f64>,
    #[arg(long)]
    pub tol_rank: Option<f64>,
    /// Jet order of the admissible function.
    #[arg(long, default_value_t = fronts::jet::DEFAULT_ORDER as u8, value_parser = clap::value_parser!(u8).range(3..=14))]
    pub order: u8,
}

impl Common {
    pub fn tolerances(&self) -> Tolerances {
        let mut tol = Tolerances::default();
        if let Some(z) = self.tol_zero {
            tol.zero = z;
        }
        if let Some(r) = self.tol_rank {
            tol.rank = r;
        }
        tol
    }

    pub fn classify_options(&self) -> ClassifyOptions {
        ClassifyOptions {
            order: self.order.into(),
            tol: self.tolerances(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TheoremArg {
    /// Inflections against Morin singularities of the affine Gauss map.
    A,
    /// Front singularities against inflections of the affine Gauss map.
    APrime,
    /// Inflections against singularities of the dual front.
    B,
}

impl From<TheoremArg> for Theorem {
    fn from(t: TheoremArg) -> Theorem {
        match t {
            TheoremArg::A => Theorem::A,
            TheoremArg::APrime => Theorem::APrime,
            TheoremArg::B => Theorem::B,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FunctionArg {
    Hessian,
    Lambda,
}
