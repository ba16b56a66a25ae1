//! Polyhedral Alexandrov spaces with exact unfolding geodesics, and the
//! triangle-refinement engine that shrinks a comparison-violating triangle.
//!
//! Two families are provided: flat cones ([`ConeSpace`], curvature ≥ 0
//! exactly when the cone angle is at most 2π) and doublings of convex
//! polygons ([`DoubledPolygon`], always curvature ≥ 0).

mod angles;
mod cone;
mod dpoly;
mod engine;
mod sampling;
mod space;

pub use angles::{comparison_angle, lemma33_limit_check, space_angle, split_angles, vertex_angle, Lemma33Report};
pub use cone::{ConePath, ConePoint, ConeSpace};
pub use dpoly::{DPolyPath, DPolyPoint, DoubledPolygon, Sheet, MAX_UNFOLD_DEPTH};
pub use engine::{
    branch_holds, refine_loop, step1_find_bad_point, step2_refine, BadPoint, Branch, Defect, RefineStop,
    RefinementTrace, SpaceTriangle, StepKind, StepOutcome, TraceStatus, TraceStep, DEFECT_CERT, DEFECT_SLACK,
    PERI_DECREASE,
};
pub use sampling::{verify_theorem_b_sampling, SamplingReport};
pub use space::{geodesic, space_distance, AlexandrovSpace, Segment, SpaceDistance, MINIMIZER_SLACK};

use crate::error::{invalid, Result};

/// A space addressed by a descriptor: `cone:theta=<radians>` or
/// `dpoly:x0,y0;x1,y1;...`.
#[derive(Debug, Clone, PartialEq)]
pub enum PolyhedralSpace {
    Cone(ConeSpace),
    Doubled(DoubledPolygon),
}

impl PolyhedralSpace {
    pub fn parse(desc: &str) -> Result<Self> {
        let spec = desc.trim();
        if let Some(rest) = spec.strip_prefix("cone:") {
            let v = rest
                .strip_prefix("theta=")
                .ok_or_else(|| invalid(format!("expected `cone:theta=<radians>`, got `{spec}`")))?;
            let theta: f64 = v.trim().parse().map_err(|e| invalid(format!("bad cone angle `{v}`: {e}")))?;
            Ok(PolyhedralSpace::Cone(ConeSpace::new(theta)?))
        } else if let Some(rest) = spec.strip_prefix("dpoly:") {
            let mut verts = Vec::new();
            for pair in rest.split(';').filter(|s| !s.trim().is_empty()) {
                let xy: Vec<&str> = pair.split(',').map(str::trim).collect();
                if xy.len() != 2 {
                    return Err(invalid(format!("bad vertex `{pair}` in `{spec}`")));
                }
                let parse = |s: &str| s.parse::<f64>().map_err(|e| invalid(format!("bad coordinate `{s}`: {e}")));
                verts.push([parse(xy[0])?, parse(xy[1])?]);
            }
            Ok(PolyhedralSpace::Doubled(DoubledPolygon::new(verts)?))
        } else {
            Err(invalid(format!("unknown space `{spec}`; expected `cone:` or `dpoly:`")))
        }
    }

    pub fn name(&self) -> String {
        match self {
            PolyhedralSpace::Cone(c) => c.name(),
            PolyhedralSpace::Doubled(d) => d.name(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_space_strings() {
        match PolyhedralSpace::parse("cone:theta=7.853981633974483").unwrap() {
            PolyhedralSpace::Cone(c) => assert_eq!(c.theta(), 7.853981633974483),
            other => panic!("{other:?}"),
        }
        match PolyhedralSpace::parse("dpoly:0,0;1,0;1,1;0,1").unwrap() {
            PolyhedralSpace::Doubled(d) => assert_eq!(d.vertices().len(), 4),
            other => panic!("{other:?}"),
        }
        assert!(PolyhedralSpace::parse("torus:1").is_err());
        assert!(PolyhedralSpace::parse("cone:theta=-1").is_err());
    }
}
