//! The maps `f : X̂ → X × (0,1]` and `g : X × (0,1] → X̂` on an exact
//! cylinder: round trips stay within `3 h(t)`, and `f × f` keeps `E_{d,λ}`
//! controlled.

use cancov::cylinder::{push_forward_f, round_trips, CylinderPack};
use cancov::metric::{generate_pack, PackKind, ScaleLadder};
use cancov::relation::{c0_modulus, controlled_e, LambdaSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pack = generate_pack(&PackKind::from_tag("interval_cylinder").expect("known tag"))?;
    let cyl = CylinderPack::from_pack(pack.clone())?;
    let trips = round_trips(&pack, cyl.levels())?;
    let worst = trips.iter().max_by(|a, b| (a.displacement - a.bound).total_cmp(&(b.displacement - b.bound)));
    println!("{} round trips, all within 3h: {}", trips.len(), trips.iter().all(|r| r.displacement <= r.bound));
    if let Some(r) = worst {
        println!("  tightest at t = {:.3e}: displacement {:.3e}, bound {:.3e}", r.t, r.displacement, r.bound);
    }

    let ladder = ScaleLadder::default_for(&pack);
    let e = controlled_e(&pack, &ladder, &LambdaSpec::default(), 0.05)?.relation;
    let (image, pushed) = push_forward_f(&pack, &e)?;
    let v = c0_modulus(image.pack(), &ScaleLadder::default_for(image.pack()), &pushed, 0.05);
    println!("f×f(E): {} pairs, modulus {:.3e} at the floor, accept {}", pushed.len(), v.value, v.accept);
    Ok(())
}
