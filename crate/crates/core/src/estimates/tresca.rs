use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fields::{BoundaryPart, FieldParams, TestField};
use crate::geometry::{GapGeometry, Point};
use crate::quadrature::{boundary_panels, QuadratureSpec};

/// Which shear enters the threshold comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShearMeasure {
    /// `|D(w) n . tau|`.
    #[default]
    Symmetric,
    /// `|2 D(w) n . tau|`.
    Doubled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StickSlip {
    Stick,
    Slip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrescaSample {
    pub part: BoundaryPart,
    pub point: Point,
    /// Arc-length weight of the sample.
    pub weight: f64,
    /// `2 D(w) n . tau`.
    pub shear: f64,
    pub tag: StickSlip,
    /// `|(w - lambda w*) . tau|`.
    pub slip: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrescaPartition {
    pub h: f64,
    pub threshold: f64,
    pub measure: ShearMeasure,
    pub samples: Vec<TrescaSample>,
    pub stick_count: usize,
    pub slip_count: usize,
    /// Total arc length of the slip zone.
    pub slip_length: f64,
}

impl TrescaPartition {
    pub fn slip_samples(&self) -> impl Iterator<Item = &TrescaSample> {
        self.samples.iter().filter(|s| s.tag == StickSlip::Slip)
    }
}

/// Tags every boundary quadrature node as stick (`shear < threshold`) or slip.
pub fn tresca_classify(
    p: &FieldParams,
    g: &GapGeometry,
    threshold: f64,
    measure: ShearMeasure,
    spec: &QuadratureSpec,
) -> Result<TrescaPartition> {
    let field = TestField::new(*p, *g)?;
    let rigid = field.rigid();
    let mut samples = Vec::new();
    for (part, frame, weight) in boundary_panels(g, spec)? {
        let jet = field.boundary_jet(part, &frame)?;
        let shear = jet.shear(frame.normal, frame.tangent);
        let compared = match measure {
            ShearMeasure::Symmetric => 0.5 * shear.abs(),
            ShearMeasure::Doubled => shear.abs(),
        };
        let w = jet.velocity();
        let ws = rigid.w_star(part == BoundaryPart::Disk);
        let slip = ((w[0] - ws[0]) * frame.tangent[0] + (w[1] - ws[1]) * frame.tangent[1]).abs();
        samples.push(TrescaSample {
            part,
            point: frame.point,
            weight,
            shear,
            tag: if compared < threshold {
                StickSlip::Stick
            } else {
                StickSlip::Slip
            },
            slip,
        });
    }
    let slip_count = samples.iter().filter(|s| s.tag == StickSlip::Slip).count();
    let slip_length = samples
        .iter()
        .filter(|s| s.tag == StickSlip::Slip)
        .map(|s| s.weight)
        .sum();
    Ok(TrescaPartition {
        h: g.h,
        threshold,
        measure,
        stick_count: samples.len() - slip_count,
        slip_count,
        slip_length,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_threshold_is_all_stick() {
        let g = GapGeometry::default().with_h(1e-3);
        let t = tresca_classify(
            &FieldParams::default(),
            &g,
            f64::INFINITY,
            ShearMeasure::Doubled,
            &QuadratureSpec::default(),
        )
        .unwrap();
        assert_eq!(t.slip_count, 0);
        assert_eq!(t.stick_count, t.samples.len());
        assert_eq!(t.slip_length, 0.0);
    }

    #[test]
    fn far_walls_stick_with_zero_shear() {
        let g = GapGeometry::default().with_h(1e-2);
        let t = tresca_classify(&FieldParams::default(), &g, 1.0, ShearMeasure::Symmetric, &QuadratureSpec::default())
            .unwrap();
        for s in t.samples.iter().filter(|s| matches!(s.part, BoundaryPart::Left | BoundaryPart::Right | BoundaryPart::Top)) {
            assert_eq!(s.shear, 0.0);
            assert_eq!(s.tag, StickSlip::Stick);
        }
    }
}
