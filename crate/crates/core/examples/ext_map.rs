//! The extension `v(U) = {x : d(x,U) < d(x, X∖U)}` of boundary sets on a
//! small cylinder.

use cancov::canonical::ext;
use cancov::metric::{generate_pack, PackKind, PointSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pack = generate_pack(&PackKind::FiniteCylinder {
        base_points: 3,
        levels: 3,
        ratio: 0.5,
        spacing: 1.0,
    })?;
    let boundary: Vec<usize> = pack.boundary().to_vec();
    let show = |s: &PointSet| s.iter().map(|&p| pack.ids()[p].as_str()).collect::<Vec<_>>().join(" ");
    for mask in 1u32..(1 << boundary.len()) {
        let u: PointSet = boundary.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
        println!("v({{{}}}) = {{{}}}", show(&u), show(&ext(&pack, &u)?));
    }
    Ok(())
}
