use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod checks;
mod commands;
mod io;
mod shapes;

/// Self-similar tilings from iterated function systems.
///
/// SPEC is a JSON spec file or `builtin:NAME` for a bundled example
/// (dyadic-1d, square-4map, sierpinski, golden, quartic, fern, crack, newgrowth).
#[derive(Parser, Debug)]
#[command(name = "cotile", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
pub struct SpecArgs {
    /// Spec file path or builtin:NAME.
    pub spec: String,
    /// Use the spec's integer `forced_costs` instead of its listed costs.
    #[arg(long)]
    pub force_costs: bool,
}

#[derive(clap::Args, Debug, Clone)]
pub struct ShapeArgs {
    /// Tile shape: attractor, central, polygon:FILE, box:x0,y0,x1,y1 or
    /// interval:lo,hi. Defaults to the spec's own tile.
    #[arg(long)]
    pub tile: Option<String>,
    /// Raster resolution used to estimate raster tile shapes.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    /// Neighbor depth for central set estimates.
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Chaos-game points for central set estimates.
    #[arg(long, default_value_t = 1_000_000)]
    pub points: usize,
    /// Seed for the chaos game; required whenever randomness is involved.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Nesting,
    Overlap,
    Feasibility,
    ShiftEquivalence,
    CanonicalRelation,
    Commensurability,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Expectation {
    Commensurate,
    Incommensurate,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample the attractor by random iteration; optionally rasterize it.
    Attractor {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 1_000_000)]
        points: usize,
        #[arg(long, default_value_t = 50)]
        burn_in: usize,
        #[arg(long)]
        seed: u64,
        /// CSV point list.
        #[arg(long)]
        out: Option<String>,
        /// Raster size WxH for --out-mask (W for 1-d systems).
        #[arg(long)]
        raster: Option<String>,
        /// Binary PGM attractor mask, with a JSON header alongside.
        #[arg(long)]
        out_mask: Option<String>,
        /// Window x0,y0,x1,y1 (lo,hi in 1-d) for the raster.
        #[arg(long)]
        window: Option<String>,
        #[arg(long)]
        out_svg: Option<String>,
    },
    /// Similarity dimension from the scaling ratios.
    Dimension {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Neighbor maps f_i⁻¹ f_j with i₁ ≠ j₁.
    Neighbors {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Keep only maps whose image ball comes within this distance of the attractor.
        #[arg(long)]
        cutoff: Option<f64>,
        /// JSON output; stdout when omitted.
        #[arg(long)]
        out: Option<String>,
    },
    /// Raster estimate of the central open set.
    Centralset {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 1024)]
        grid: usize,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 1_000_000)]
        points: usize,
        #[arg(long, default_value_t = 50)]
        burn_in: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        window: Option<String>,
        /// Binary PGM mask, with a JSON header alongside.
        #[arg(long)]
        out_mask: Option<String>,
        /// 16-bit PGM of the margin d(x,H) − d(x,A), clipped at zero.
        #[arg(long)]
        out_margin: Option<String>,
        /// CSV boundary points.
        #[arg(long)]
        out_boundary: Option<String>,
        /// CSV of circles about every 8th boundary point touching the attractor.
        #[arg(long)]
        circles: Option<String>,
        /// Picture of the attractor, basin sample, boundary and circles.
        #[arg(long)]
        out_svg: Option<String>,
        /// Also run the feasibility check; exit 1 if it fails.
        #[arg(long)]
        check: bool,
    },
    /// The tiling Π_T(i|k).
    Tile {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        shape: ShapeArgs,
        /// Address such as 12(21); a bare word repeats its last digit.
        #[arg(long)]
        address: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out_json: Option<String>,
        #[arg(long)]
        out_csv: Option<String>,
        #[arg(long)]
        out_svg: Option<String>,
        /// Keep only the tiles meeting this box (x0,y0,x1,y1 or lo,hi).
        #[arg(long)]
        window: Option<String>,
        #[arg(long, default_value_t = 1024)]
        width: usize,
    },
    /// The canonical tiling T_k (costs equal to integer scale exponents).
    Canonical {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long)]
        k: u32,
        /// Print the tile counts of T_0 … T_k.
        #[arg(long)]
        counts: bool,
        #[arg(long)]
        out_json: Option<String>,
        #[arg(long)]
        out_svg: Option<String>,
        #[arg(long, default_value_t = 1024)]
        width: usize,
    },
    /// Run a check suite; exit 1 when it fails.
    Check {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value = "(1)")]
        address: String,
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// Overlap raster resolution along the longer side.
        #[arg(long, default_value_t = 1024)]
        resolution: usize,
        /// Random configurations for the nesting suite.
        #[arg(long, default_value_t = 0)]
        trials: usize,
        /// Shift-equivalence: first address.
        #[arg(long)]
        i: Option<String>,
        /// Shift-equivalence: second address.
        #[arg(long)]
        j: Option<String>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        /// Commensurability: use T_k instead of Π(i|k).
        #[arg(long)]
        canonical: bool,
        /// Commensurability: fail unless the tiling is classified this way.
        #[arg(long, value_enum)]
        expect: Option<Expectation>,
    },
}

/// What a command concluded; errors are reported separately.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Attractor {
            spec,
            points,
            burn_in,
            seed,
            out,
            raster,
            out_mask,
            window,
            out_svg,
        } => commands::attractor(&spec, points, burn_in, seed, out, raster, out_mask, window, out_svg),
        Command::Dimension { spec } => commands::dimension(&spec),
        Command::Neighbors { spec, depth, cutoff, out } => commands::neighbors(&spec, depth, cutoff, out),
        Command::Centralset {
            spec,
            grid,
            depth,
            points,
            burn_in,
            seed,
            window,
            out_mask,
            out_margin,
            out_boundary,
            circles,
            out_svg,
            check,
        } => commands::centralset(
            &spec,
            commands::CentralOptions {
                grid,
                depth,
                points,
                burn_in,
                seed,
                window,
                out_mask,
                out_margin,
                out_boundary,
                circles,
                out_svg,
                check,
            },
        ),
        Command::Tile {
            spec,
            shape,
            address,
            k,
            out_json,
            out_csv,
            out_svg,
            window,
            width,
        } => commands::tile(&spec, &shape, &address, k, out_json, out_csv, out_svg, window, width),
        Command::Canonical {
            spec,
            shape,
            k,
            counts,
            out_json,
            out_svg,
            width,
        } => commands::canonical(&spec, &shape, k, counts, out_json, out_svg, width),
        Command::Check {
            spec,
            shape,
            suite,
            address,
            k,
            resolution,
            trials,
            i,
            j,
            p,
            q,
            canonical,
            expect,
        } => checks::run(
            &spec,
            &shape,
            checks::CheckOptions {
                suite,
                address,
                k,
                resolution,
                trials,
                i,
                j,
                p,
                q,
                canonical,
                expect,
            },
        ),
    }
}

fn main() -> ExitCode {
    // die quietly on a closed pipe, as in `cotile neighbors … | head`
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
