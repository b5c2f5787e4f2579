//! Doubling a cover of `X × [0,1]` without members meeting both ends, and
//! cutting a slab out of a canonical cover.

use std::collections::BTreeSet;

use cancov::canonical::{minimal_canonical, Provider};
use cancov::cover::Target;
use cancov::cylinder::{double_cover, select_slab, slab_rescale, Cell, CylinderPack, GridCover};
use cancov::metric::{generate_pack, PackKind, ScaleLadder};
use cancov::relation::{ball_cover, controlled_e, LambdaSpec};

fn spans(g: &GridCover) -> Vec<(f64, f64)> {
    g.members
        .iter()
        .map(|m| {
            let ts = m.iter().map(|&(_, l)| g.levels[l]);
            (ts.clone().fold(f64::INFINITY, f64::min), ts.fold(0.0, f64::max))
        })
        .collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // two columns over levels 0, 0.1, …, 1
    let levels: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let block = |lo: usize, hi: usize| -> BTreeSet<Cell> { (0..2).flat_map(|x| (lo..=hi).map(move |l| (x, l))).collect() };
    let alpha = GridCover::new(2, levels, vec![block(0, 6), block(5, 10)])?;
    for k in 1..=3 {
        let doubled = double_cover(&alpha, k)?;
        println!(
            "k = {k}: {} members, multiplicity {} (input {}), vertical extent {:.3}, spans {:?}",
            doubled.members.len(),
            doubled.multiplicity(),
            alpha.multiplicity(),
            doubled.vertical_extent(),
            spans(&doubled)
        );
    }

    let pack = generate_pack(&PackKind::from_tag("interval_cylinder").expect("known tag"))?;
    let ladder = ScaleLadder::default_for(&pack);
    let e = controlled_e(&pack, &ladder, &LambdaSpec::default(), 0.05)?.relation;
    let gamma = ball_cover(&e, &pack.interior_set(), Target::Interior)?;
    let canonical = minimal_canonical(&pack, Some(&ladder), &gamma, &Provider::IntervalDim1, 0.05)?.cover;
    let cyl = CylinderPack::from_pack(pack.clone())?;
    let (d1, d2) = select_slab(&cyl, &ladder, &canonical, 0.5 * pack.k_sup(), 0.05)?;
    let slab = slab_rescale(&cyl, &canonical, d1, d2)?;
    println!(
        "slab [{d2:.3e}, {d1:.3e}] of the canonical cover: {} members, multiplicity {}, member across both ends: {:?}",
        slab.members.len(),
        slab.multiplicity(),
        slab.straddler()
    );
    Ok(())
}
