//! Draws the canonical cover of the interval cylinder and the arc cover of
//! the circle.
//!
//! cargo run --example render_svg -- [out_dir]

use std::path::PathBuf;

use cancov::canonical::Provider;
use cancov::experiment::{run, ExperimentConfig};
use cancov::io::write_text;
use cancov::metric::{generate_pack, PackKind};
use cancov::svg::{emit_svg, SvgStyle};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    std::fs::create_dir_all(&dir)?;
    let style = SvgStyle {
        log_levels: true,
        ..SvgStyle::default()
    };

    let mut config = ExperimentConfig::for_tag("interval_cylinder").expect("known tag");
    config.sweep.candidates = 1;
    let out = run(&config)?;
    let path = dir.join("interval_canonical.svg");
    write_text(&path, &emit_svg(&out.pack, out.canonical.as_ref(), &style)?)?;
    println!("{}", path.display());

    let circle = generate_pack(&PackKind::from_tag("circle_in_disk").expect("known tag"))?;
    let arcs = Provider::IntervalDim1.cover(&circle, 3)?;
    let path = dir.join("circle_arcs.svg");
    write_text(&path, &emit_svg(&circle, Some(&arcs), &SvgStyle::default())?)?;
    println!("{}", path.display());
    Ok(())
}
