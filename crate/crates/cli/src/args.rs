//! Command-line surface.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dmst_core::sim::{DelayModel, Wakeup};
use dmst_core::{generate, GraphKind, WeightedGraph};

#[derive(Debug, Parser)]
#[command(name = "dmst", version, about = "Static, dynamic and distributed MST experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a generated graph as an edge list.
    Gen(GenArgs),
    /// Run an algorithm and check it against the oracle.
    Run(RunArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// kind:n:m:seed, kind one of random, path, star, grid
    pub spec: GenSpec,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Kruskal,
    Prim,
    RespDmst,
    TopoDmst,
    Ghs,
    ChinTing,
    DistDynamic,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Kruskal => "kruskal",
            Algo::Prim => "prim",
            Algo::RespDmst => "resp-dmst",
            Algo::TopoDmst => "topo-dmst",
            Algo::Ghs => "ghs",
            Algo::ChinTing => "chin-ting",
            Algo::DistDynamic => "dist-dynamic",
        }
    }

    pub fn is_distributed(self) -> bool {
        matches!(self, Algo::Ghs | Algo::ChinTing | Algo::DistDynamic)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WakeArg {
    Lowest,
    All,
}

impl From<WakeArg> for Wakeup {
    fn from(w: WakeArg) -> Self {
        match w {
            WakeArg::Lowest => Wakeup::Lowest,
            WakeArg::All => Wakeup::All,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// Edge-list file.
    #[arg(long, conflicts_with = "generate", required_unless_present = "generate")]
    pub graph: Option<PathBuf>,
    /// kind:n:m:seed
    #[arg(long)]
    pub generate: Option<GenSpec>,
    /// Update script: inc/dec/del/ins lines.
    #[arg(long)]
    pub updates: Option<PathBuf>,
    /// unit | seeded:<seed>
    #[arg(long, default_value = "unit")]
    pub delay: DelayArg,
    /// Which processes start spontaneously.
    #[arg(long, value_enum, default_value = "all")]
    pub wakeup: WakeArg,
    /// Cluster size bound; defaults to ceil(sqrt(m)).
    #[arg(long)]
    pub z: Option<usize>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Added to the generator and delay seeds.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of runs; run i adds i to every seed.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub sweep: u64,
}

/// `kind:n:m:seed`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub kind: GraphKind,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn build(&self, offset: u64) -> dmst_core::Result<WeightedGraph> {
        generate(self.kind, self.n, self.m, self.seed + offset)
    }
}

impl FromStr for GenSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [kind, n, m, seed] = parts[..] else {
            return Err(format!("expected kind:n:m:seed, got {s:?}"));
        };
        let num = |x: &str, what: &str| -> Result<u64, String> {
            x.parse().map_err(|_| format!("bad {what} {x:?}"))
        };
        Ok(GenSpec {
            kind: kind.parse().map_err(|e: dmst_core::Error| e.to_string())?,
            n: num(n, "n")? as usize,
            m: num(m, "m")? as usize,
            seed: num(seed, "seed")?,
        })
    }
}

/// `unit` or `seeded:<seed>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DelayArg(pub DelayModel);

impl DelayArg {
    pub fn offset(self, by: u64) -> DelayModel {
        match self.0 {
            DelayModel::Unit => DelayModel::Unit,
            DelayModel::Seeded(s) => DelayModel::Seeded(s + by),
        }
    }
}

impl FromStr for DelayArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "unit" {
            return Ok(DelayArg(DelayModel::Unit));
        }
        s.strip_prefix("seeded:")
            .and_then(|x| x.parse().ok())
            .map(|x| DelayArg(DelayModel::Seeded(x)))
            .ok_or_else(|| format!("expected unit or seeded:<seed>, got {s:?}"))
    }
}
