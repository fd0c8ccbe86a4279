//! Per-point evaluation for the three chart types.

use toric_asd::bridge::{BridgeMap, BridgedField, JoyceMetricField};
use toric_asd::complex::C64;
use toric_asd::config::Chart;
use toric_asd::curvature::{analyze_point, coordinate_field, FdOptions, MetricField, PointCurvature, VectorField};
use toric_asd::gen_engine::{general_metric, GenMetricField, GenOptions};
use toric_asd::holo::HoloData;
use toric_asd::so_engine::{holomorphic_metric, LinePoint, Mat4, SoMetricField, SoOptions};
use toric_asd::Result;

pub struct Engine {
    pub data: HoloData,
    pub chart: Chart,
    pub so: SoOptions,
    pub gen: GenOptions,
    pub fd: FdOptions,
    bridge: BridgeMap,
}

impl Engine {
    pub fn new(data: HoloData, chart: Chart) -> Self {
        Self {
            data,
            chart,
            so: SoOptions::default(),
            gen: GenOptions::default(),
            fd: FdOptions::default(),
            bridge: BridgeMap::default(),
        }
    }

    fn joyce(&self) -> JoyceMetricField<BridgedField> {
        JoyceMetricField {
            field: BridgedField::new(self.data.clone(), self.so),
        }
    }

    /// Chart coordinates of a real point are (x, y, u₁, u₂); only real parts count.
    fn realify(x: &[C64; 4]) -> [C64; 4] {
        x.map(|v| C64::new(v.re, 0.0))
    }

    /// The line (r, s) a chart point lies on.
    pub fn line_of(&self, x: &[C64; 4]) -> (C64, C64) {
        match self.chart {
            Chart::Real => {
                let zeta = C64::new(x[0].re, x[1].re);
                (self.bridge.r(zeta), self.bridge.s(zeta.conj()))
            }
            Chart::Holomorphic | Chart::General => (x[0], x[1]),
        }
    }

    /// Metric components in the output chart. The general engine reports the
    /// raw formula; curvature works with a conformal representative.
    pub fn metric_at(&self, x: &[C64; 4]) -> Result<Mat4> {
        match self.chart {
            Chart::Real => self.joyce().metric(&Self::realify(x)),
            Chart::Holomorphic => Ok(holomorphic_metric(&self.data, &LinePoint::from_coords(x), &self.so)?.g),
            Chart::General => Ok(general_metric(&self.data, &LinePoint::from_coords(x), &self.gen)?.g),
        }
    }

    pub fn curvature_at(&self, x: &[C64; 4], orientation: i8) -> Result<PointCurvature> {
        let (k1, k2) = (coordinate_field(2), coordinate_field(3));
        let killing: [&VectorField; 2] = [&k1, &k2];
        match self.chart {
            Chart::Real => analyze_point(&self.joyce(), &Self::realify(x), &killing, orientation, &self.fd),
            Chart::Holomorphic => {
                let field = SoMetricField {
                    data: self.data.clone(),
                    opts: self.so,
                };
                analyze_point(&field, x, &killing, orientation, &self.fd)
            }
            Chart::General => {
                // The adapted chart shifts v by a function of (r, s) only, so
                // ∂/∂v₁ and ∂/∂v₂ are unchanged.
                let field = GenMetricField {
                    data: self.data.clone(),
                    opts: self.gen,
                };
                analyze_point(&field.adapted_at(*x)?, x, &killing, orientation, &self.fd)
            }
        }
    }
}
