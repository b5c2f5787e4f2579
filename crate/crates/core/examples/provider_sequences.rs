//! Boundary cover sequences: partitions in dimension 0 and overlapping arcs
//! in dimension 1, with their multiplicities and the common multiplicity of
//! consecutive covers.

use cancov::canonical::Provider;
use cancov::cover::{common_multiplicity, mesh, multiplicity};
use cancov::metric::{generate_pack, PackKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for tag in ["finite_cylinder", "interval_cylinder", "circle_in_disk"] {
        let pack = generate_pack(&PackKind::from_tag(tag).expect("known tag"))?;
        let provider = Provider::for_dim(pack.known_dim().expect("generated")).expect("dims 0 and 1");
        let seq = provider.sequence(&pack, 6)?;
        println!("{tag} with {}:", provider.tag());
        for (i, c) in seq.covers.iter().enumerate() {
            let common = seq.covers.get(i + 1).map(|next| common_multiplicity(&[c, next]));
            println!(
                "  α_{i}: {:>3} members  mesh {:.4}  mult {}  common with next {:?}",
                c.len(),
                mesh(&pack, c),
                multiplicity(c),
                common
            );
        }
    }
    Ok(())
}
