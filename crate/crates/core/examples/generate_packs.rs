//! Generates every example family and writes each pack file.
//!
//! cargo run --example generate_packs -- [out_dir]

use std::path::PathBuf;

use cancov::io::save_pack;
use cancov::metric::{generate_pack, PackKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "packs".into()));
    std::fs::create_dir_all(&dir)?;
    for tag in ["finite_cylinder", "interval_cylinder", "circle_in_disk", "cube_face", "countable_example"] {
        let kind = PackKind::from_tag(tag).expect("known tag");
        let pack = generate_pack(&kind)?;
        let path = dir.join(format!("{tag}.json"));
        save_pack(&path, &pack)?;
        println!(
            "{tag:<18} {:>5} points  {:>3} boundary  dim {}  k_sup {:.3}  floor {:.2e}  -> {}",
            pack.len(),
            pack.boundary().len(),
            kind.known_dim(),
            pack.k_sup(),
            pack.floor(),
            path.display()
        );
    }
    Ok(())
}
