//! Deterministic SVG drawings of packs and covers.

use std::fmt::Write;

use thiserror::Error;

use crate::cover::Cover;
use crate::metric::{DiscretePack, PackKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvgError {
    #[error("pack has no 2D coordinates to draw")]
    NoCoordinates,
}

/// Drawing options.
#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    /// Side of the square canvas in pixels.
    pub size: f64,
    pub margin: f64,
    pub point_radius: f64,
    /// Fill opacity of cover members.
    pub opacity: f64,
    /// Draw the level axis of cylinders on a log scale so deep levels stay apart.
    pub log_levels: bool,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle {
            size: 640.0,
            margin: 24.0,
            point_radius: 2.0,
            opacity: 0.18,
            log_levels: false,
        }
    }
}

const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#1f78b4",
];

/// Plane positions: 2D coordinates as they are, 3D ones by an oblique
/// projection of the last axis.
fn plane(pack: &DiscretePack, style: &SvgStyle) -> Result<Vec<(f64, f64)>, SvgError> {
    let coords = pack.meta().coords.as_ref().ok_or(SvgError::NoCoordinates)?;
    let cylinder = pack.meta().layout.is_some() && !matches!(pack.meta().kind, Some(PackKind::CircleInDisk { .. }));
    // log scale sends the floor to 0.05 and level 1 to 1
    let depth = -pack.floor().min(0.5).ln();
    let level = |t: f64| {
        if cylinder && style.log_levels && t > 0.0 {
            1.0 + 0.95 * t.ln() / depth
        } else {
            t
        }
    };
    coords
        .iter()
        .map(|c| match *c.as_slice() {
            [x, t] if cylinder => Ok((x, level(t))),
            [x, y] => Ok((x, y)),
            [x, y, t] => Ok((x + 0.35 * level(t), y + 0.35 * level(t))),
            _ => Err(SvgError::NoCoordinates),
        })
        .collect()
}

/// Convex hull by the monotone chain, counter-clockwise.
fn hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Points, with the boundary highlighted, and each cover member as a
/// translucent hull, in member order.
pub fn emit_svg(pack: &DiscretePack, cover: Option<&Cover>, style: &SvgStyle) -> Result<String, SvgError> {
    let raw = plane(pack, style)?;
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &raw {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(f64::EPSILON);
    let inner = style.size - 2.0 * style.margin;
    // y grows upwards in the drawing
    let at = |(x, y): (f64, f64)| {
        (
            style.margin + (x - x0) / span * inner,
            style.size - style.margin - (y - y0) / span * inner,
        )
    };
    let pos: Vec<(f64, f64)> = raw.into_iter().map(at).collect();

    let mut out = String::new();
    let s = style.size;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#
    )
    .unwrap();
    writeln!(out, r##"<rect width="{s}" height="{s}" fill="#ffffff"/>"##).unwrap();
    if let Some(alpha) = cover {
        writeln!(out, r#"<g id="members">"#).unwrap();
        for (i, u) in alpha.members().iter().enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            let h = hull(u.iter().map(|&p| pos[p]).collect());
            let points: Vec<String> = h.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            writeln!(
                out,
                r#"<polygon points="{}" fill="{colour}" fill-opacity="{}" stroke="{colour}" stroke-width="{:.2}" stroke-linejoin="round"/>"#,
                points.join(" "),
                style.opacity,
                2.0 * style.point_radius + 2.0,
            )
            .unwrap();
        }
        writeln!(out, "</g>").unwrap();
    }
    writeln!(out, r#"<g id="points">"#).unwrap();
    for (p, &(x, y)) in pos.iter().enumerate() {
        let (fill, r) = if pack.is_boundary(p) {
            ("#c0392b", 1.5 * style.point_radius)
        } else {
            ("#222222", style.point_radius)
        };
        writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="{fill}"/>"#).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::Target;
    use crate::metric::{generate_pack, validate_pack, Tolerances};

    #[test]
    fn drawing_is_deterministic() {
        let pack = generate_pack(&PackKind::IntervalCylinder {
            base_points: 5,
            levels: 3,
            ratio: 0.5,
        })
        .unwrap();
        let alpha = Cover::singletons(pack.len(), &pack.interior_set(), Target::Interior);
        let a = emit_svg(&pack, Some(&alpha), &SvgStyle::default()).unwrap();
        let b = emit_svg(&pack, Some(&alpha), &SvgStyle::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.matches("<polygon").count(), alpha.len());
        assert_eq!(a.matches("<circle").count(), pack.len());
    }

    #[test]
    fn empty_cover_draws_points_only() {
        let pack = generate_pack(&PackKind::CircleInDisk {
            base_points: 6,
            levels: 2,
            ratio: 0.5,
        })
        .unwrap();
        let svg = emit_svg(&pack, None, &SvgStyle::default()).unwrap();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(!svg.contains("<polygon"));
    }

    #[test]
    fn packs_without_coordinates_are_refused() {
        let pack = validate_pack(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![true, false],
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(emit_svg(&pack, None, &SvgStyle::default()).unwrap_err(), SvgError::NoCoordinates);
    }

    #[test]
    fn hull_of_a_square() {
        let h = hull(vec![(0.0, 0.0), (1.0, 0.0), (0.5, 0.5), (1.0, 1.0), (0.0, 1.0)]);
        assert_eq!(h.len(), 4);
    }
}
