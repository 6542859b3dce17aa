//! Electromechanics of printed conductive traces.
//!
//! Two layers live here. The analytic layer covers trace geometry and the
//! constant-volume (incompressible) stretch relations: a trace of volume
//! `V = l·t·w` that keeps its volume while stretching has conductivity
//! `sigma = l^2 / (R·V)`. The network layer models the ink itself as a
//! seeded 2D bond-percolation resistor lattice whose bonds carry random
//! break strains, optionally bridged by liquid-metal inclusions that
//! survive to much larger strains.

mod network;
mod reference;
mod solver;
mod sweep;

pub use network::{build_network, Bond, DamageModelParams, PercolationNetwork};
pub use reference::{MaterialReference, ReferenceRange, ReferenceValue};
pub use solver::{solve_conductance, solve_conductance_at, EffectiveConductance};
pub use sweep::{
    strain_sweep, strain_sweep_with_options, uniform_strain_grid, CurvePoint, ResistanceCurve,
    SweepOptions, DEFAULT_FAILURE_THRESHOLD,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ElectromechError {
    #[error("trace dimension {name} must be strictly positive and finite, got {value}")]
    InvalidDimension { name: &'static str, value: f64 },
    #[error("argument {name} must be strictly positive and finite, got {value}")]
    NonPositiveArgument { name: &'static str, value: f64 },
    #[error("strain must be >= 0 and finite, got {0}")]
    InvalidStrain(f64),
    #[error("ag weight fraction {0} outside [0, 1]")]
    WeightFractionOutOfRange(f64),
    #[error("occupancy {0} outside [0, 1]")]
    OccupancyOutOfRange(f64),
    #[error("lattice must be at least 2x2 nodes, got {rows}x{cols}")]
    DegenerateLattice { rows: usize, cols: usize },
    #[error("damage model parameter {name} invalid: {value}")]
    InvalidDamageParam { name: &'static str, value: f64 },
    #[error("bond references node {node} outside a {rows}x{cols} lattice")]
    BondOutOfLattice { node: usize, rows: usize, cols: usize },
    #[error("strain grid must start at 0, got first point {0}")]
    GridDoesNotStartAtZero(f64),
    #[error("strain grid must be strictly increasing and finite")]
    GridNotIncreasing,
    #[error("strain grid is empty")]
    EmptyGrid,
    #[error("failure threshold must be > 1, got {0}")]
    InvalidFailureThreshold(f64),
}

fn check_positive(name: &'static str, value: f64) -> Result<(), ElectromechError> {
    if !value.is_finite() || value <= 0.0 {
        return Err(ElectromechError::NonPositiveArgument { name, value });
    }
    Ok(())
}

/// Rectangular printed-trace geometry. All dimensions in meters, strictly
/// positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGeometry", into = "RawGeometry")]
pub struct TraceGeometry {
    length_m: f64,
    width_m: f64,
    thickness_m: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    length_m: f64,
    width_m: f64,
    thickness_m: f64,
}

impl TryFrom<RawGeometry> for TraceGeometry {
    type Error = ElectromechError;
    fn try_from(raw: RawGeometry) -> Result<Self, Self::Error> {
        TraceGeometry::new(raw.length_m, raw.width_m, raw.thickness_m)
    }
}

impl From<TraceGeometry> for RawGeometry {
    fn from(g: TraceGeometry) -> Self {
        RawGeometry {
            length_m: g.length_m,
            width_m: g.width_m,
            thickness_m: g.thickness_m,
        }
    }
}

impl TraceGeometry {
    pub fn new(length_m: f64, width_m: f64, thickness_m: f64) -> Result<Self, ElectromechError> {
        for (name, value) in [
            ("length_m", length_m),
            ("width_m", width_m),
            ("thickness_m", thickness_m),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(ElectromechError::InvalidDimension { name, value });
            }
        }
        Ok(Self {
            length_m,
            width_m,
            thickness_m,
        })
    }

    /// The stencil-printed characterization trace: 8 cm x 5 mm x 102 um.
    pub fn reference_trace() -> Self {
        Self::new(0.08, 0.005, 102e-6).expect("reference dimensions are valid")
    }

    pub fn length_m(&self) -> f64 {
        self.length_m
    }

    pub fn width_m(&self) -> f64 {
        self.width_m
    }

    pub fn thickness_m(&self) -> f64 {
        self.thickness_m
    }

    /// `V = l * t * w`, in cubic meters.
    pub fn volume_m3(&self) -> f64 {
        self.length_m * self.thickness_m * self.width_m
    }
}

/// `V = l * t * w`. Free-function form of [`TraceGeometry::volume_m3`].
pub fn volume(geom: &TraceGeometry) -> f64 {
    geom.volume_m3()
}

/// Conductivity of a stretched trace under the constant-volume assumption:
/// `sigma = l^2 / (R * V)`. With the cross-section eliminated this is only an
/// approximate estimate; it is exact for the unstretched trace.
pub fn conductivity_constant_volume(
    stretched_length_m: f64,
    resistance_ohm: f64,
    volume_m3: f64,
) -> Result<f64, ElectromechError> {
    check_positive("stretched_length_m", stretched_length_m)?;
    check_positive("resistance_ohm", resistance_ohm)?;
    check_positive("volume_m3", volume_m3)?;
    Ok(stretched_length_m * stretched_length_m / (resistance_ohm * volume_m3))
}

/// DC resistance of an unstretched trace: `R = l / (sigma * w * t)`.
pub fn resistance_of_trace(geom: &TraceGeometry, sigma_s_per_m: f64) -> Result<f64, ElectromechError> {
    check_positive("sigma_s_per_m", sigma_s_per_m)?;
    Ok(geom.length_m / (sigma_s_per_m * geom.width_m * geom.thickness_m))
}

/// Paired resistance/conductivity measurement for one trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConductivityMeasurement {
    pub resistance_ohm: f64,
    pub sigma_s_per_m: f64,
}

impl ConductivityMeasurement {
    /// Derive the conductivity implied by a measured resistance on `geom`.
    pub fn from_resistance(
        geom: &TraceGeometry,
        resistance_ohm: f64,
    ) -> Result<Self, ElectromechError> {
        check_positive("resistance_ohm", resistance_ohm)?;
        let sigma = geom.length_m / (resistance_ohm * geom.width_m * geom.thickness_m);
        Ok(Self {
            resistance_ohm,
            sigma_s_per_m: sigma,
        })
    }

    /// Derive the resistance implied by a known conductivity on `geom`.
    pub fn from_sigma(geom: &TraceGeometry, sigma_s_per_m: f64) -> Result<Self, ElectromechError> {
        let resistance_ohm = resistance_of_trace(geom, sigma_s_per_m)?;
        Ok(Self {
            resistance_ohm,
            sigma_s_per_m,
        })
    }

    /// Relative error of the pairing invariant
    /// `sigma * R * (w * t) = l`; zero for a consistent measurement.
    pub fn consistency_error(&self, geom: &TraceGeometry) -> f64 {
        let lhs = self.sigma_s_per_m * self.resistance_ohm * geom.width_m * geom.thickness_m;
        (lhs - geom.length_m).abs() / geom.length_m
    }
}

/// Engineering strain state of a trace stretched from a reference length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StretchState {
    pub strain: f64,
    pub stretched_length_m: f64,
}

impl StretchState {
    pub fn new(reference_length_m: f64, strain: f64) -> Result<Self, ElectromechError> {
        check_positive("reference_length_m", reference_length_m)?;
        if !strain.is_finite() || strain < 0.0 {
            return Err(ElectromechError::InvalidStrain(strain));
        }
        Ok(Self {
            strain,
            stretched_length_m: reference_length_m * (1.0 + strain),
        })
    }
}

/// Map dry Ag weight fraction to lattice bond occupancy:
/// `p(w) = clamp((w - 0.70) / 0.25, 0, 1)`.
///
/// The anchors place 75 % Ag (non-conductive ink) at p = 0.20, below the
/// square-lattice bond-percolation threshold of 0.5, and the working recipe
/// at 89.18 % Ag at p = 0.767, well above it.
pub fn occupancy_from_ag_weight(ag_wt_fraction: f64) -> Result<f64, ElectromechError> {
    if !ag_wt_fraction.is_finite() || !(0.0..=1.0).contains(&ag_wt_fraction) {
        return Err(ElectromechError::WeightFractionOutOfRange(ag_wt_fraction));
    }
    Ok(((ag_wt_fraction - 0.70) / 0.25).clamp(0.0, 1.0))
}
