//! The minimal-multiplicity pipeline on the dimension 0 and 1 cylinders:
//! `E_{d,λ}`, its ball cover `γ`, then a canonical cover refined by `γ`.

use cancov::canonical::{minimal_canonical, Provider};
use cancov::cover::Target;
use cancov::metric::{generate_pack, PackKind, ScaleLadder};
use cancov::relation::{ball_cover, controlled_e, LambdaSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for tag in ["finite_cylinder", "interval_cylinder", "circle_in_disk"] {
        let pack = generate_pack(&PackKind::from_tag(tag).expect("known tag"))?;
        let ladder = ScaleLadder::default_for(&pack);
        let e = controlled_e(&pack, &ladder, &LambdaSpec::default(), 0.05)?.relation;
        let gamma = ball_cover(&e, &pack.interior_set(), Target::Interior)?;
        let provider = Provider::for_dim(pack.known_dim().expect("generated")).expect("dims 0 and 1");
        let out = minimal_canonical(&pack, Some(&ladder), &gamma, &provider, 0.05)?;
        let r = &out.report;
        println!(
            "{tag:<18} multiplicity {} (dim+2 = {}, 2dim+2 = {})  members {}  rungs {:?}  uniform {}  refines γ {}",
            r.multiplicity,
            r.bound_dim_plus_2,
            r.naive_bound_2dim_plus_2,
            out.cover.len(),
            r.subsequence,
            r.uniformity_verdict.accept,
            r.witness_ok,
        );
    }
    Ok(())
}
