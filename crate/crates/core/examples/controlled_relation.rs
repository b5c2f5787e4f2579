//! Builds `E_{d,λ}` on the interval cylinder and reads its C0 modulus,
//! next to the all-pairs relation, which the same test rejects.

use cancov::metric::{generate_pack, PackKind, ScaleLadder};
use cancov::relation::{c0_modulus, controlled_e, diag_nbhd_from_lambda, LambdaSpec, Relation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pack = generate_pack(&PackKind::from_tag("interval_cylinder").expect("known tag"))?;
    let ladder = ScaleLadder::default_for(&pack);
    let lambda = LambdaSpec::Linear { slope: 0.5 };

    let e = controlled_e(&pack, &ladder, &lambda, 0.05)?;
    let v = c0_modulus(&pack, &ladder, &e.relation, 0.05);
    println!("E_d,λ: {} pairs, modulus {:.4} at the floor, threshold {:.4}, accept {}", e.relation.len(), v.value, v.threshold, v.accept);
    for (t, phi) in e.phi.samples().iter().step_by(e.phi.samples().len() / 8 + 1) {
        println!("  φ({t:.3e}) = {phi:.3e}");
    }

    let nbhd = diag_nbhd_from_lambda(&pack, &lambda)?;
    println!("diagonal neighbourhood from λ: {} pairs, inside E: {}", nbhd.len(), nbhd.is_subset(&e.relation));

    let all = Relation::square(pack.len(), &pack.interior_set());
    let v = c0_modulus(&pack, &ladder, &all, 0.05);
    println!("all pairs: modulus {:.3} at the floor, accept {}", v.value, v.accept);
    Ok(())
}
