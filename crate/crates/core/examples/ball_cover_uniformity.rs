//! The ball cover `Κ(E)` of a controlled relation is uniform; the cover by
//! the whole space is not.

use cancov::cover::{multiplicity, uniformity_verdict, Cover, Target};
use cancov::metric::{generate_pack, PackKind, ScaleLadder};
use cancov::relation::{ball_cover, controlled_e, shrink_cover, LambdaSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pack = generate_pack(&PackKind::from_tag("finite_cylinder").expect("known tag"))?;
    let ladder = ScaleLadder::default_for(&pack);
    let e = controlled_e(&pack, &ladder, &LambdaSpec::default(), 0.05)?.relation;
    let interior = pack.interior_set();

    let gamma = ball_cover(&e, &interior, Target::Interior)?;
    let v = uniformity_verdict(&pack, &ladder, &gamma, 0.05);
    println!("ball cover: {} members, multiplicity {}, uniform {}", gamma.len(), multiplicity(&gamma), v.accept);
    for (t, m) in v.mesh_curve.samples() {
        println!("  mesh below {t:.3e}: {m:.3e}");
    }

    let whole = Cover::whole(pack.len(), &interior, Target::Interior);
    println!("whole space: uniform {}", uniformity_verdict(&pack, &ladder, &whole, 0.05).accept);

    let shrunk = shrink_cover(&e, &Cover::singletons(pack.len(), &interior, Target::Interior).join(&gamma)?)?;
    println!("shrunk cover: {} members, multiplicity {}", shrunk.len(), multiplicity(&shrunk));
    Ok(())
}
