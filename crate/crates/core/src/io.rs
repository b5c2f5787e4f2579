//! JSON files for packs, ladders, relations and covers, and CSV curves.
//!
//! Points are referred to by id in every file, never by index.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover::{Cover, CoverError, Target};
use crate::metric::{
    validate_pack, CylinderLayout, DiscretePack, MetricError, ModulusCurve, PackKind, PackMeta, PointId,
    PointSet, ScaleLadder, Tolerances,
};
use crate::relation::{Relation, RelationError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Fs { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("unknown point id {0:?}")]
    UnknownId(String),
    #[error("duplicate point id {0:?}")]
    DuplicateId(String),
    #[error("layout has {got} cells for {expected} points")]
    LayoutSize { expected: usize, got: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// Descriptive block of a pack file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PackFileMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<PackKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_dim: Option<u32>,
    #[serde(default)]
    pub delta_res: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<CylinderLayout>,
    #[serde(default)]
    pub base_spacing: f64,
}

/// `{points, dist, boundary, meta}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackFile {
    pub points: Vec<String>,
    pub dist: Vec<Vec<f64>>,
    pub boundary: Vec<String>,
    #[serde(default)]
    pub meta: PackFileMeta,
}

impl PackFile {
    pub fn from_pack(pack: &DiscretePack) -> Self {
        let m = pack.meta();
        PackFile {
            points: pack.ids().to_vec(),
            dist: pack.dist_rows(),
            boundary: pack.boundary().iter().map(|&p| pack.ids()[p].clone()).collect(),
            meta: PackFileMeta {
                kind: m.kind.clone(),
                known_dim: m.known_dim,
                delta_res: pack.delta_res(),
                coords: m.coords.clone(),
                layout: m.layout.clone(),
                base_spacing: m.base_spacing,
            },
        }
    }

    /// Validates the metric and attaches the descriptive data.
    pub fn into_pack(self, tolerances: &Tolerances) -> Result<DiscretePack, IoError> {
        let index = id_index(&self.points)?;
        let mut mask = vec![false; self.points.len()];
        for id in &self.boundary {
            mask[*index.get(id.as_str()).ok_or_else(|| IoError::UnknownId(id.clone()))?] = true;
        }
        let n = self.points.len();
        if let Some(layout) = &self.meta.layout {
            if layout.cells.len() != n {
                return Err(IoError::LayoutSize {
                    expected: n,
                    got: layout.cells.len(),
                });
            }
        }
        let pack = validate_pack(self.points, self.dist, mask, tolerances)?;
        let known_dim = self.meta.known_dim.or(self.meta.kind.as_ref().map(PackKind::known_dim));
        Ok(pack.with_meta(PackMeta {
            kind: self.meta.kind,
            known_dim,
            coords: self.meta.coords,
            layout: self.meta.layout,
            base_spacing: self.meta.base_spacing,
        }))
    }
}

fn id_index(ids: &[String]) -> Result<HashMap<&str, PointId>, IoError> {
    let mut index = HashMap::with_capacity(ids.len());
    for (p, id) in ids.iter().enumerate() {
        if index.insert(id.as_str(), p).is_some() {
            return Err(IoError::DuplicateId(id.clone()));
        }
    }
    Ok(index)
}

fn lookup(pack: &DiscretePack, id: &str) -> Result<PointId, IoError> {
    pack.index_of(id).ok_or_else(|| IoError::UnknownId(id.to_string()))
}

/// `[[p, q], …]` by id, in sorted index order.
pub fn relation_to_ids(pack: &DiscretePack, e: &Relation) -> Vec<[String; 2]> {
    e.pairs()
        .into_iter()
        .map(|(p, q)| [pack.ids()[p].clone(), pack.ids()[q].clone()])
        .collect()
}

pub fn relation_from_ids(pack: &DiscretePack, pairs: &[[String; 2]]) -> Result<Relation, IoError> {
    let mut e = Relation::empty(pack.len());
    for [p, q] in pairs {
        e.insert(lookup(pack, p)?, lookup(pack, q)?)?;
    }
    Ok(e)
}

/// `{target, members}` with members as lists of ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverFile {
    pub target: Target,
    pub members: Vec<Vec<String>>,
}

impl CoverFile {
    pub fn from_cover(pack: &DiscretePack, alpha: &Cover) -> Self {
        CoverFile {
            target: alpha.tag(),
            members: alpha
                .members()
                .iter()
                .map(|u| u.iter().map(|&p| pack.ids()[p].clone()).collect())
                .collect(),
        }
    }

    /// Only the interior, boundary and whole-pack targets can be rebuilt
    /// from the tag alone; other tags take the union of the members.
    pub fn into_cover(self, pack: &DiscretePack) -> Result<Cover, IoError> {
        let members = self
            .members
            .iter()
            .map(|u| u.iter().map(|id| lookup(pack, id)).collect::<Result<PointSet, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let target = match self.target {
            Target::Interior => pack.interior_set(),
            Target::Boundary => pack.boundary_set(),
            Target::All => pack.all_points(),
            Target::Custom => members.iter().flatten().copied().collect(),
        };
        Ok(Cover::new(pack.len(), target, self.target, members)?)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(value).map_err(|source| IoError::Json {
        path: path.display().to_string(),
        source,
    })?;
    write_text(path, &(text + "\n"))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Fs {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Fs {
        path: path.display().to_string(),
        source,
    })
}

pub fn save_pack(path: &Path, pack: &DiscretePack) -> Result<(), IoError> {
    write_json(path, &PackFile::from_pack(pack))
}

pub fn load_pack(path: &Path, tolerances: &Tolerances) -> Result<DiscretePack, IoError> {
    read_json::<PackFile>(path)?.into_pack(tolerances)
}

/// Reads a JSON array of radii and checks it against `pack`.
pub fn load_ladder(path: &Path, pack: &DiscretePack) -> Result<ScaleLadder, IoError> {
    let radii: Vec<f64> = read_json(path)?;
    Ok(ScaleLadder::new(pack, radii)?)
}

pub fn save_cover(path: &Path, pack: &DiscretePack, alpha: &Cover) -> Result<(), IoError> {
    write_json(path, &CoverFile::from_cover(pack, alpha))
}

pub fn load_cover(path: &Path, pack: &DiscretePack) -> Result<Cover, IoError> {
    read_json::<CoverFile>(path)?.into_cover(pack)
}

pub fn save_relation(path: &Path, pack: &DiscretePack, e: &Relation) -> Result<(), IoError> {
    write_json(path, &relation_to_ids(pack, e))
}

pub fn load_relation(path: &Path, pack: &DiscretePack) -> Result<Relation, IoError> {
    relation_from_ids(pack, &read_json::<Vec<[String; 2]>>(path)?)
}

pub fn save_curve_csv(path: &Path, curve: &ModulusCurve) -> Result<(), IoError> {
    write_text(path, &curve.to_csv())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::generate_pack;

    #[test]
    fn pack_file_round_trip() {
        let pack = generate_pack(&PackKind::CountableExample { y_points: 3 }).unwrap();
        let file = PackFile::from_pack(&pack);
        let json = serde_json::to_string(&file).unwrap();
        let back = serde_json::from_str::<PackFile>(&json)
            .unwrap()
            .into_pack(&Tolerances::default())
            .unwrap();
        assert_eq!(back.ids(), pack.ids());
        assert_eq!(back.dist_rows(), pack.dist_rows());
        assert_eq!(back.boundary(), pack.boundary());
        assert_eq!(back.meta(), pack.meta());
    }

    #[test]
    fn cover_and_relation_round_trip() {
        let pack = generate_pack(&PackKind::CountableExample { y_points: 3 }).unwrap();
        let alpha = Cover::singletons(pack.len(), &pack.interior_set(), Target::Interior);
        let back = CoverFile::from_cover(&pack, &alpha).into_cover(&pack).unwrap();
        assert_eq!(back, alpha);
        let e = Relation::from_pairs(pack.len(), [(3, 4), (4, 3), (5, 5)]).unwrap();
        assert_eq!(relation_from_ids(&pack, &relation_to_ids(&pack, &e)).unwrap(), e);
    }

    #[test]
    fn unknown_ids_are_reported() {
        let pack = generate_pack(&PackKind::CountableExample { y_points: 2 }).unwrap();
        let pairs = [["y0".to_string(), "nowhere".to_string()]];
        assert!(matches!(relation_from_ids(&pack, &pairs), Err(IoError::UnknownId(id)) if id == "nowhere"));
    }

    #[test]
    fn files_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let pack = generate_pack(&PackKind::CountableExample { y_points: 3 }).unwrap();
        let path = dir.path().join("pack.json");
        save_pack(&path, &pack).unwrap();
        let back = load_pack(&path, &Tolerances::default()).unwrap();
        assert_eq!(back.ids(), pack.ids());
        let ladder_path = dir.path().join("ladder.json");
        let ladder = ScaleLadder::default_for(&pack);
        write_json(&ladder_path, &ladder).unwrap();
        assert_eq!(load_ladder(&ladder_path, &back).unwrap(), ladder);
    }
}
