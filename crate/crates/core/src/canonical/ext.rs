use crate::metric::{DiscretePack, PointSet};

use super::CanonicalError;

/// `v(U) = {p : d(p,U) < d(p, X \ U)}` with `d(·, ∅) = ∞`.
///
/// Points tied between `U` and its complement belong to no `v(U)`.
pub fn ext(pack: &DiscretePack, u: &PointSet) -> Result<PointSet, CanonicalError> {
    if let Some(&p) = u.iter().find(|&&p| !pack.is_boundary(p)) {
        return Err(CanonicalError::NotBoundarySubset(p));
    }
    let rest: Vec<_> = pack.boundary().iter().copied().filter(|x| !u.contains(x)).collect();
    Ok((0..pack.len())
        .filter(|&p| pack.dist_to_set(p, u) < pack.dist_to_set(p, &rest))
        .collect())
}

/// `{v(U) : U ∈ family}` with empty images dropped.
pub fn ext_family(pack: &DiscretePack, family: &[PointSet]) -> Result<Vec<PointSet>, CanonicalError> {
    let mut out = Vec::with_capacity(family.len());
    for u in family {
        let v = ext(pack, u)?;
        if !v.is_empty() {
            out.push(v);
        }
    }
    Ok(out)
}
