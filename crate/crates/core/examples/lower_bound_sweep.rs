//! `mult α ≥ dim X + 2` for uniform covers of cylindrical packs, checked on
//! random candidates built from the resolution relation.

use cancov::cylinder::{lower_bound_check, random_candidate, resolution_relation, CylinderError, LowerBoundVerdict};
use cancov::metric::{generate_pack, PackKind, ScaleLadder};
use cancov::relation::LambdaSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for tag in ["finite_cylinder", "interval_cylinder"] {
        let pack = generate_pack(&PackKind::from_tag(tag).expect("known tag"))?;
        let ladder = ScaleLadder::default_for(&pack);
        let res = resolution_relation(&pack, &ladder, &LambdaSpec::default(), 0.05)?;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (mut draws, mut accepted, mut holds, mut least) = (0, 0, 0, usize::MAX);
        while accepted < 200 && draws < 2000 {
            draws += 1;
            let alpha = random_candidate(&pack, &res, &mut rng)?;
            match lower_bound_check(&pack, &ladder, &alpha, &res, 0.05) {
                Ok(c) => {
                    accepted += 1;
                    least = least.min(c.mult_at_witness);
                    holds += usize::from(c.verdict == LowerBoundVerdict::Holds);
                }
                Err(CylinderError::PreconditionUnmet(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        println!(
            "{tag:<18} {accepted} uniform candidates of {draws} drawn, {holds} hold, least multiplicity {least}, bound {}",
            pack.known_dim().expect("generated") + 2
        );
    }
    Ok(())
}
