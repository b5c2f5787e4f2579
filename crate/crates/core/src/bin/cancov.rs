use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cancov::canonical::{minimal_canonical, Provider};
use cancov::cover::{Cover, Target};
use cancov::experiment::{run, ExperimentConfig};
use cancov::io::{load_cover, load_pack, read_json, save_cover, save_pack, write_json, write_text};
use cancov::metric::{generate_pack, PackKind, ScaleLadder, Tolerances};
use cancov::relation::{ball_cover, controlled_e, LambdaSpec};
use cancov::suite::{verify_suite, SuiteSizes};
use cancov::svg::{emit_svg, SvgStyle};

#[derive(Parser)]
#[command(version, about = "Canonical covers of finite compactification packs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Example packs.
    Pack {
        #[command(subcommand)]
        command: PackCommand,
    },
    /// Covers of a pack file.
    Cover {
        #[command(subcommand)]
        command: CoverCommand,
    },
    /// Runs the property suite; fails on any counterexample.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs an experiment config and writes its report.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Drawing of the canonical cover.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Draws a pack and optionally a cover.
    Render {
        #[arg(long)]
        pack: PathBuf,
        #[arg(long)]
        cover: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        log_levels: bool,
    },
}

#[derive(Subcommand)]
enum PackCommand {
    Gen {
        /// Family tag, e.g. interval_cylinder.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        base_points: Option<usize>,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        ratio: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CoverKind {
    /// Balls of `E_{d,λ}`.
    Ball,
    Singletons,
    /// The minimal-multiplicity pipeline run on the ball cover.
    Canonical,
}

#[derive(Subcommand)]
enum CoverCommand {
    Build {
        #[arg(long)]
        pack: PathBuf,
        #[arg(long, value_enum)]
        kind: CoverKind,
        /// Slope of `λ(t) = slope · t`.
        #[arg(long, default_value_t = 0.5)]
        lambda_slope: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn pack_kind(tag: &str, base_points: Option<usize>, levels: Option<usize>, ratio: Option<f64>) -> Result<PackKind, String> {
    let mut kind = PackKind::from_tag(tag).ok_or_else(|| format!("unknown pack kind {tag:?}"))?;
    match &mut kind {
        PackKind::FiniteCylinder { base_points: b, levels: l, ratio: r, .. }
        | PackKind::IntervalCylinder { base_points: b, levels: l, ratio: r }
        | PackKind::CircleInDisk { base_points: b, levels: l, ratio: r } => {
            *b = base_points.unwrap_or(*b);
            *l = levels.unwrap_or(*l);
            *r = ratio.unwrap_or(*r);
        }
        PackKind::CubeFace { side_points, levels: l, ratio: r, .. } => {
            *side_points = base_points.unwrap_or(*side_points);
            *l = levels.unwrap_or(*l);
            *r = ratio.unwrap_or(*r);
        }
        PackKind::CountableExample { y_points } => *y_points = base_points.unwrap_or(*y_points),
    }
    Ok(kind)
}

fn main() -> ExitCode {
    match execute(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether every verdict passed.
fn execute(command: Command) -> Result<bool, Box<dyn std::error::Error>> {
    let tolerances = Tolerances::default();
    match command {
        Command::Pack {
            command: PackCommand::Gen { kind, base_points, levels, ratio, out },
        } => {
            let pack = generate_pack(&pack_kind(&kind, base_points, levels, ratio)?)?;
            save_pack(&out, &pack)?;
            println!("{} points, {} on the boundary", pack.len(), pack.boundary().len());
            Ok(true)
        }
        Command::Cover {
            command: CoverCommand::Build { pack, kind, lambda_slope, out },
        } => {
            let pack = load_pack(&pack, &tolerances)?;
            let interior = pack.interior_set();
            let cover = match kind {
                CoverKind::Singletons => Cover::singletons(pack.len(), &interior, Target::Interior),
                CoverKind::Ball | CoverKind::Canonical => {
                    let ladder = ScaleLadder::default_for(&pack);
                    let lambda = LambdaSpec::Linear { slope: lambda_slope };
                    let e = controlled_e(&pack, &ladder, &lambda, tolerances.lambda)?;
                    let gamma = ball_cover(&e.relation, &interior, Target::Interior)?;
                    if let CoverKind::Ball = kind {
                        gamma
                    } else {
                        let dim = pack.known_dim().ok_or("pack has no known dimension")?;
                        let provider = Provider::for_dim(dim).ok_or("no provider for this dimension")?;
                        minimal_canonical(&pack, Some(&ladder), &gamma, &provider, tolerances.uniformity)?.cover
                    }
                }
            };
            save_cover(&out, &pack, &cover)?;
            println!("{} members, multiplicity {}", cover.len(), cancov::cover::multiplicity(&cover));
            Ok(true)
        }
        Command::Verify { seed, out } => {
            let summary = verify_suite(seed, &SuiteSizes::default());
            for c in &summary.checks {
                let status = if c.failures == 0 { "ok" } else { "FAILED" };
                println!("{:<28} {:>8} instances  {:>4} failures  {status}", c.name, c.instances, c.failures);
                if let Some(f) = &c.first_failure {
                    println!("    first failure: {f}");
                }
            }
            if let Some(out) = out {
                write_json(&out, &summary)?;
            }
            Ok(summary.all_pass())
        }
        Command::Experiment { config, out, svg } => {
            let config: ExperimentConfig = read_json(&config)?;
            let result = run(&config)?;
            write_json(&out, &result.report)?;
            if let Some(svg) = svg {
                let style = SvgStyle {
                    log_levels: true,
                    ..SvgStyle::default()
                };
                write_text(&svg, &emit_svg(&result.pack, result.canonical.as_ref(), &style)?)?;
            }
            for s in &result.report.stages {
                println!("{:<20} {:?}", s.name, s.verdict);
            }
            let sum = &result.report.summary;
            match sum.achieved {
                Some(m) => println!(
                    "multiplicity {m} (dim+2 = {}, 2dim+2 = {})",
                    sum.bound_dim_plus_2, sum.naive_bound_2dim_plus_2
                ),
                None => println!("no canonical cover"),
            }
            Ok(sum.all_pass)
        }
        Command::Render { pack, cover, out, log_levels } => {
            let pack = load_pack(&pack, &tolerances)?;
            let cover = cover.map(|c| load_cover(&c, &pack)).transpose()?;
            let style = SvgStyle {
                log_levels,
                ..SvgStyle::default()
            };
            write_text(&out, &emit_svg(&pack, cover.as_ref(), &style)?)?;
            Ok(true)
        }
    }
}
