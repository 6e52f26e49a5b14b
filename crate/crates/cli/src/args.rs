use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "falsilab", version, about = "Falsifiable content of first-order theories and classes of finite structures")]
pub struct Cli {
    /// Master seed; subsystems derive their own seeds from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cap on structures and diagrams visited by a single enumeration.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Exit with status 1 when the verdict is negative (refuted, not Fraïssé, ...).
    #[arg(long, global = true)]
    pub fail_on_refuted: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// A class given by a class file, or the finite models of `T_τ` over a signature.
#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct ClassArg {
    /// Class file (`class`, `sig`, `axiom`, `theory`, `structure` lines).
    #[arg(short = 'K', long = "class")]
    pub class: Option<PathBuf>,
    /// Theory file; the class of its finite models.
    #[arg(short = 'T', long = "theory")]
    pub theory: Option<PathBuf>,
    /// Finite models of the time-indexed theory over this base signature, e.g. `sig coin { rel H/1 }`.
    #[arg(long = "tau")]
    pub tau: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Syntactic class of a sentence (universal, UNCAF, prenex level).
    Classify {
        #[arg(long)]
        phi: String,
        /// Signature to parse against; inferred when omitted.
        #[arg(long)]
        sig: Option<String>,
    },
    /// Truth of a sentence in a structure.
    Eval {
        /// Structure file.
        #[arg(short = 'M', long = "structure")]
        structure: PathBuf,
        #[arg(long)]
        phi: String,
    },
    /// Forbidden configurations of a class on at most `n` variables.
    Forbid {
        #[command(flatten)]
        class: ClassArg,
        #[arg(short, long)]
        n: usize,
        /// Also compare against this superclass.
        #[arg(long)]
        relative_to: Option<PathBuf>,
    },
    /// Refute a theory from observations.
    Refute {
        #[arg(short = 'T', long = "theory")]
        theory: PathBuf,
        #[arg(short = 'O', long = "observations")]
        observations: PathBuf,
    },
    /// FIT (or fg-FIT) check up to a size bound.
    Fit {
        #[command(flatten)]
        class: ClassArg,
        #[arg(short = 'B', long)]
        bound: usize,
        /// Use finitely generated substructures.
        #[arg(long)]
        fg: bool,
    },
    /// The universal sentence ψ_n of a class.
    SynthPsi {
        #[command(flatten)]
        class: ClassArg,
        #[arg(short, long)]
        n: usize,
        /// Also write the result to this file.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// The domain-size formula χ_n of a signature.
    SynthChi {
        #[arg(long)]
        sig: String,
        #[arg(short, long)]
        n: usize,
    },
    /// VC dimension of a partitioned formula in a structure.
    Vc {
        #[arg(short = 'M', long = "structure")]
        structure: PathBuf,
        /// Partitioned formula, e.g. `R(x;y)`.
        #[arg(long)]
        phi: String,
        #[arg(long, default_value_t = 8)]
        cap: usize,
    },
    /// The sentence VC_n(φ).
    VcSentence {
        #[arg(long)]
        phi: String,
        #[arg(short, long)]
        n: usize,
        #[arg(long)]
        sig: Option<String>,
        /// Also write the result to this file.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Certified lower bound on the VC dimension of a planar family on sample points.
    VcParam {
        /// `line` or `fatline`.
        #[arg(long)]
        family: String,
        /// CSV of points with a header row.
        #[arg(long)]
        points: PathBuf,
        /// CSV of parameters with a header row.
        #[arg(long)]
        grid: PathBuf,
    },
    /// Hereditary, joint embedding and amalgamation properties up to a size bound.
    Fraisse {
        #[command(flatten)]
        class: ClassArg,
        #[arg(short = 'B', long)]
        bound: usize,
        /// Disjoint amalgamation.
        #[arg(long)]
        strong: bool,
    },
    /// A finite chain approximating the generic structure of a class.
    Generic {
        #[command(flatten)]
        class: ClassArg,
        #[arg(short, long, default_value_t = 2)]
        level: usize,
        /// Largest structure to build.
        #[arg(long)]
        max_size: Option<usize>,
        /// Also write the result to this file.
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Markov chains on structure spaces.
    Markov {
        #[command(subcommand)]
        command: MarkovCommand,
    },
    /// The worked examples.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
    /// The bipartite membership graph G_n.
    Gn { n: usize },
    /// Test position observations against the free-particle hypothesis.
    Particle {
        /// CSV with columns t,x,y,z.
        #[arg(short = 'O', long = "observations")]
        observations: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum MarkovCommand {
    /// Stationary distribution of an irreducible chain.
    Stationary {
        #[arg(short, long)]
        chain: PathBuf,
    },
    /// A seeded run, as state indices and as a time-indexed structure.
    Simulate {
        #[arg(short, long)]
        chain: PathBuf,
        #[arg(long)]
        horizon: usize,
    },
    /// Probability that a configuration is realized within a horizon.
    Realize {
        #[arg(short, long)]
        chain: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        horizon: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// The product chain on tuples of states at the given times.
    Product {
        #[arg(short, long)]
        chain: PathBuf,
        /// Strictly increasing times, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        times: Vec<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Montecarlo,
}

#[derive(Subcommand, Debug)]
pub enum CorpusCommand {
    /// Recompute every expected value.
    Verify {
        /// Only this entry.
        #[arg(long)]
        entry: Option<String>,
    },
    /// List the entries.
    List,
}
