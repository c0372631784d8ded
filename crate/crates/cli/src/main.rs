//! `kmbord`: JSON in, JSON (or SVG) out.
//!
//! Exit status is 0 on success, 2 when the input does not fit the schema and
//! 1 when it is well-formed but violates a mathematical precondition.

mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "kmbord", version, about = "Exact combinatorics for affine loop-group bordifications")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Root datum: affine-sl2 .. affine-sl12, affine-g2.
    #[arg(long, global = true, default_value = "affine-sl2")]
    pub datum: String,
    /// Read the main JSON document from this file instead of the command-specific flag.
    #[arg(long = "in", global = true)]
    pub input: Option<std::path::PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Truncation order N for loop-group series.
    #[arg(long, global = true, default_value_t = kmbord::loopu::DEFAULT_ORDER)]
    pub order: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Svg,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Generalized Cartan matrices.
    #[command(subcommand)]
    Gcm(GcmCmd),
    /// The extended Cartan algebra and its dual.
    #[command(subcommand)]
    Cartan(CartanCmd),
    /// The affine Weyl group.
    #[command(subcommand)]
    Weyl(WeylCmd),
    /// Standard parabolic subsets and their ρ data.
    #[command(subcommand)]
    Parabolic(ParabolicCmd),
    /// Cartan decompositions and the corner.
    #[command(subcommand)]
    Corners(CornersCmd),
    /// Orthogonal families.
    #[command(subcommand)]
    Orthofam(OrthofamCmd),
    /// SL2(Z) on the upper half-plane.
    #[command(subcommand)]
    Halfplane(HalfplaneCmd),
    /// The pro-unipotent group of affine SL2.
    #[command(subcommand)]
    Loopu(LoopuCmd),
    /// Canonical pairs and partition cells.
    #[command(subcommand)]
    Stability(StabilityCmd),
    /// Run a seeded property suite.
    Sweep {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum GcmCmd {
    /// Finite or untwisted affine, with null vectors.
    Classify {
        /// e.g. '[[2,-2],[-2,2]]'
        #[arg(long)]
        matrix: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CartanCmd {
    /// The coweights λ̌_i and ψ̌ = c in the coroot basis.
    Coweights,
    /// ρ, its classical part and the dual Coxeter number.
    Rho,
    /// <H, λ> for a vector and a functional.
    Pair {
        #[arg(long)]
        h: String,
        #[arg(long)]
        phi: String,
    },
    /// The Kac form (x, y).
    Kac {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Tits cone membership, <H, δ> < 0.
    Tits {
        #[arg(long)]
        h: String,
    },
    /// Re-express a vector in the coroot or coweight basis.
    Convert {
        #[arg(long)]
        h: String,
        #[arg(long, default_value = "coweight")]
        to: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum WeylCmd {
    /// Length and a reduced word.
    Reduce {
        #[arg(long)]
        word: String,
    },
    /// w·H.
    Act {
        #[arg(long)]
        word: String,
        #[arg(long)]
        h: String,
    },
    /// Minimal representative of w W_J.
    CosetRep {
        #[arg(long)]
        word: String,
        #[arg(long = "J")]
        j: String,
    },
    /// The Borel subset across the wall α and the separating root.
    Adjacency {
        #[arg(long)]
        word: String,
        #[arg(long)]
        alpha: usize,
    },
    /// Roots in B_w ∖ B_{w'}.
    Separating {
        #[arg(long)]
        word: String,
        #[arg(long)]
        other: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum ParabolicCmd {
    RhoData {
        #[arg(long = "J")]
        j: String,
    },
    RhoPq {
        #[arg(long = "J")]
        j: String,
        #[arg(long = "K")]
        k: String,
    },
    Raghunathan {
        #[arg(long)]
        d: usize,
        #[arg(long = "J")]
        j: String,
    },
    /// Semisimple, nilpotent or outside for a root {"finite": [..], "level": n}.
    ClassifyRoot {
        #[arg(long)]
        root: String,
        #[arg(long = "J")]
        j: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum CornersCmd {
    Split {
        #[arg(long)]
        h: String,
        #[arg(long)]
        r: String,
        #[arg(long = "J")]
        j: String,
    },
    Relative {
        #[arg(long)]
        h: String,
        #[arg(long)]
        r: String,
        #[arg(long = "J")]
        j: String,
        #[arg(long = "K")]
        k: String,
    },
    Paths {
        #[arg(long)]
        h: String,
        #[arg(long)]
        r: String,
        #[arg(long = "J")]
        j: String,
        #[arg(long = "K")]
        k: String,
    },
    /// Limit of a declared sequence.
    Limit {
        #[arg(long)]
        spec: Option<String>,
    },
    Window {
        #[arg(long)]
        point: String,
        #[arg(long)]
        m0: String,
        #[arg(long)]
        r0: String,
        #[arg(long)]
        t: String,
    },
    /// F_{-ρ̌}, as floats.
    Push {
        #[arg(long)]
        point: String,
    },
    /// The strata of c(Â⁺_{J,σ}).
    Strata {
        #[arg(long = "J")]
        j: String,
        #[arg(long)]
        sigma: String,
    },
    /// The contraction at time t of exp(point).
    Homotopy {
        #[arg(long)]
        point: String,
        #[arg(long)]
        t: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum OrthofamCmd {
    Verify {
        #[arg(long)]
        family: Option<String>,
    },
    /// The family w ↦ wT over words of length at most `len`.
    Orbit {
        #[arg(long)]
        t: String,
        #[arg(long)]
        len: usize,
    },
    Witness {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum HalfplaneCmd {
    Iwasawa {
        #[arg(long)]
        z: String,
    },
    Im {
        #[arg(long)]
        z: String,
        #[arg(long)]
        cusp: String,
    },
    DegInst {
        #[arg(long)]
        z: String,
    },
    CanonicalPair {
        #[arg(long)]
        z: String,
    },
    Reduce {
        #[arg(long)]
        z: String,
    },
    /// The Ford-disc partition of a window x0,x1,y0,y1.
    Svg {
        #[arg(long)]
        window: String,
        #[arg(long, default_value_t = 1)]
        smax: u32,
        #[arg(long, default_value_t = 600)]
        resolution: u32,
    },
}

#[derive(Args, Debug)]
pub struct ImArgs {
    /// Coefficients of σ, comma separated.
    #[arg(long, default_value = "0")]
    pub sigma: String,
    /// Coefficients of μ; the constant term must be 1.
    #[arg(long, default_value = "1")]
    pub mu: String,
    /// Coefficients of τ; the constant term must be 0.
    #[arg(long, default_value = "0")]
    pub tau: String,
}

#[derive(Subcommand, Debug)]
pub enum LoopuCmd {
    /// IM coordinates to the matrix model.
    Matrix {
        #[command(flatten)]
        u: ImArgs,
    },
    /// IM coordinates of a matrix [[m11, m12], [m21, m22]] of series JSON.
    Coords {
        #[arg(long)]
        matrix: Option<String>,
    },
    /// Product of two coordinate documents.
    Multiply {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    Scale {
        #[command(flatten)]
        u: ImArgs,
        #[arg(long)]
        s: String,
        #[arg(long, value_parser = ["loop", "torus"])]
        kind: String,
    },
    Reduce {
        #[command(flatten)]
        u: ImArgs,
    },
    Siegel {
        #[command(flatten)]
        u: ImArgs,
        /// log of the torus point as a corner point JSON.
        #[arg(long)]
        a: String,
        #[arg(long)]
        t: String,
        #[arg(long, default_value = "-1/2,1/2")]
        omega: String,
    },
}

#[derive(Args, Debug)]
pub struct PointArgs {
    #[arg(long = "J")]
    pub j: String,
    /// Levi point: "trivial" or a half-plane point such as 0/1+1/1i.
    #[arg(long, default_value = "trivial")]
    pub levi: String,
    /// log of the torus coordinate, as a corner point JSON.
    #[arg(long)]
    pub a: String,
}

#[derive(Subcommand, Debug)]
pub enum StabilityCmd {
    CellContains {
        #[arg(long = "J")]
        j: String,
        #[arg(long)]
        a: String,
        #[arg(long, default_value = "1")]
        t: String,
    },
    CheckCanonical {
        #[command(flatten)]
        p: PointArgs,
    },
    Cell {
        #[command(flatten)]
        p: PointArgs,
    },
    /// Minimum of <ρ_P^Q, H> over [{"J": [..], "K": [..], "h": vector}, ..].
    DegQ {
        #[arg(long)]
        candidates: Option<String>,
    },
    CentralShift {
        #[arg(long)]
        deg: String,
        #[arg(long)]
        mc: String,
    },
    Family {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        r: String,
    },
    Threshold {
        #[arg(long)]
        c: String,
        /// An upper bound for |log t|.
        #[arg(long = "log-t")]
        log_t: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            let text = match out {
                commands::Output::Json(v) => format!("{}\n", serde_json::to_string(&v).expect("serializable")),
                commands::Output::Svg(s) => s,
            };
            let written = match &cli.global.out {
                Some(p) => std::fs::write(p, text).map_err(|e| e.to_string()),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: cannot write output: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
