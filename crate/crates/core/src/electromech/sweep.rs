//! Strain sweep of a percolation network into a normalized resistance curve.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::network::PercolationNetwork;
use super::solver::{solve_conductance_at, EffectiveConductance};
use super::{ElectromechError, StretchState, TraceGeometry};

pub const DEFAULT_FAILURE_THRESHOLD: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepOptions {
    /// Normalized resistance at which the trace counts as electrically
    /// failed. Must be > 1.
    pub failure_threshold: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            failure_threshold: DEFAULT_FAILURE_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub strain: f64,
    /// R(strain) / R(0).
    pub normalized_resistance: f64,
}

/// Normalized strain-resistance curve of one network realization.
///
/// Points stop at the last strain where the network still conducts;
/// disconnection never produces an infinite resistance value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResistanceCurve {
    pub points: Vec<CurvePoint>,
    /// Smallest grid strain at which normalized resistance reached the
    /// failure threshold or the network disconnected; `None` if neither
    /// happened over the grid.
    pub failure_strain: Option<f64>,
    pub failure_threshold: f64,
}

impl ResistanceCurve {
    pub fn failed(&self) -> bool {
        self.failure_strain.is_some()
    }
}

/// Sweep the network over `strain_grid` with the default failure threshold
/// of 100.
pub fn strain_sweep(
    network: &PercolationNetwork,
    geom: &TraceGeometry,
    strain_grid: &[f64],
) -> Result<ResistanceCurve, ElectromechError> {
    strain_sweep_with_options(network, geom, strain_grid, SweepOptions::default())
}

/// Sweep the network over `strain_grid`.
///
/// At each strain the normalized resistance is `(1 + strain)^2 * G(0) /
/// G(strain)`: the affine factor is the constant-volume geometric response
/// of the trace (length up, cross-section down), the conductance ratio the
/// percolation response of the ink. The curve is therefore independent of
/// the absolute trace dimensions; `geom` fixes the trace being described
/// and validates the strain states.
///
/// Grid points are evaluated in parallel; the output is identical to a
/// sequential evaluation because each point is solved independently and
/// collected in grid order.
pub fn strain_sweep_with_options(
    network: &PercolationNetwork,
    geom: &TraceGeometry,
    strain_grid: &[f64],
    options: SweepOptions,
) -> Result<ResistanceCurve, ElectromechError> {
    network.validate()?;
    if strain_grid.is_empty() {
        return Err(ElectromechError::EmptyGrid);
    }
    if strain_grid[0] != 0.0 {
        return Err(ElectromechError::GridDoesNotStartAtZero(strain_grid[0]));
    }
    for pair in strain_grid.windows(2) {
        if !pair[1].is_finite() || pair[1] <= pair[0] {
            return Err(ElectromechError::GridNotIncreasing);
        }
    }
    for &strain in strain_grid {
        StretchState::new(geom.length_m(), strain)?;
    }
    if !options.failure_threshold.is_finite() || options.failure_threshold <= 1.0 {
        return Err(ElectromechError::InvalidFailureThreshold(options.failure_threshold));
    }

    let g0 = match solve_conductance_at(network, 0.0)? {
        EffectiveConductance::Connected { conductance_s } => conductance_s,
        EffectiveConductance::Disconnected => {
            // Never conductive: no reference resistance exists, the trace
            // counts as failed from the start.
            return Ok(ResistanceCurve {
                points: Vec::new(),
                failure_strain: Some(strain_grid[0]),
                failure_threshold: options.failure_threshold,
            });
        }
    };

    let solved: Vec<Option<f64>> = strain_grid
        .par_iter()
        .map(|&strain| {
            solve_conductance_at(network, strain)
                .expect("grid strains validated above")
                .conductance()
        })
        .collect();

    let mut points = Vec::with_capacity(strain_grid.len());
    let mut failure_strain = None;
    for (&strain, g) in strain_grid.iter().zip(&solved) {
        match g {
            Some(g) if *g > 0.0 => {
                let normalized = if strain == 0.0 {
                    // G(0)/G(0) and the affine factor are both exactly 1.
                    1.0
                } else {
                    let affine = (1.0 + strain) * (1.0 + strain);
                    // Ratio first: identical conductances divide to exactly
                    // 1, keeping the unbroken-network curve exactly affine.
                    affine * (g0 / g)
                };
                points.push(CurvePoint {
                    strain,
                    normalized_resistance: normalized,
                });
                if failure_strain.is_none() && normalized >= options.failure_threshold {
                    failure_strain = Some(strain);
                }
            }
            // Bond removal is monotone in strain, so the first
            // disconnected point ends the curve.
            _ => {
                if failure_strain.is_none() {
                    failure_strain = Some(strain);
                }
                break;
            }
        }
    }

    Ok(ResistanceCurve {
        points,
        failure_strain,
        failure_threshold: options.failure_threshold,
    })
}

/// Evenly spaced strain grid from 0 to `max_strain` inclusive.
pub fn uniform_strain_grid(max_strain: f64, steps: usize) -> Result<Vec<f64>, ElectromechError> {
    if !max_strain.is_finite() || max_strain <= 0.0 {
        return Err(ElectromechError::NonPositiveArgument {
            name: "max_strain",
            value: max_strain,
        });
    }
    if steps == 0 {
        return Err(ElectromechError::EmptyGrid);
    }
    Ok((0..=steps)
        .map(|i| max_strain * i as f64 / steps as f64)
        .collect())
}
