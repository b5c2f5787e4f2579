//! On the countable example the singletons already form a canonical cover,
//! so multiplicity 1 is reached whatever the dimension; the pack has no
//! cylinder, and no lower bound applies.

use cancov::cover::{is_canonical, multiplicity, Cover, Target};
use cancov::cylinder::{lower_bound_check, resolution_relation, CylinderError};
use cancov::metric::{generate_pack, PackKind, ScaleLadder};
use cancov::relation::LambdaSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pack = generate_pack(&PackKind::CountableExample { y_points: 8 })?;
    let ladder = ScaleLadder::default_for(&pack);
    let singletons = Cover::singletons(pack.len(), &pack.interior_set(), Target::Interior);
    println!(
        "{} points, singletons canonical: {}, multiplicity {}",
        pack.len(),
        is_canonical(&pack, &ladder, &singletons, 0.05),
        multiplicity(&singletons)
    );
    let lambda = LambdaSpec::Power { coef: 0.5, exponent: 2.0 };
    let res = resolution_relation(&pack, &ladder, &lambda, 0.05)?;
    match lower_bound_check(&pack, &ladder, &singletons, &res, 0.05) {
        Err(CylinderError::NonCylindricalPack) => println!("lower bound: not asserted, the pack is not cylindrical"),
        other => println!("lower bound: {other:?}"),
    }
    Ok(())
}
