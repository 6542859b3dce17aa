//! Ink stoichiometry and recycling mass-balance accounting.
//!
//! Ledgers enforce conservation: the outputs of every processing step must
//! sum back to the input mass within [`CONSERVATION_TOLERANCE_G`]. Fractions
//! are always reported relative to the step input.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Mass conservation tolerance for ledgers, in grams. Matches the two-decimal
/// precision used when weighing recovered material.
pub const CONSERVATION_TOLERANCE_G: f64 = 0.01;

#[derive(Debug, Error, PartialEq)]
pub enum RecycleError {
    #[error("formulation has no dry solids (ag + wpu solids + egain must be > 0)")]
    NoSolids,
    #[error("negative mass for {0}")]
    NegativeMass(&'static str),
    #[error("wpu_solid_fraction {0} outside [0, 1]")]
    SolidFractionOutOfRange(f64),
    #[error("mass not finite for {0}")]
    NonFiniteMass(&'static str),
    #[error("ledger outputs ({outputs_g} g) exceed input ({input_g} g)")]
    OutputsExceedInput { input_g: f64, outputs_g: f64 },
    #[error("ledger does not conserve mass: input {input_g} g, outputs sum {outputs_g} g")]
    ConservationViolation { input_g: f64, outputs_g: f64 },
    #[error("ledger input mass must be > 0, got {0}")]
    NonPositiveInput(f64),
    #[error("discarded mass {discarded_g} g exceeds post-wash solids {post_wash_g} g")]
    DiscardExceedsPostWash { post_wash_g: f64, discarded_g: f64 },
    #[error("post-wash solids {post_wash_g} g exceed initial mass {initial_g} g")]
    PostWashExceedsInitial { initial_g: f64, post_wash_g: f64 },
    #[error("conductivity must be > 0, got {0}")]
    NonPositiveConductivity(f64),
}

/// Wet-ink recipe. Masses are as weighed into the mixing vial; the WPU
/// dispersion is mostly water, so only `wpu_solid_fraction` of it survives
/// drying. EGaIn never evaporates and counts as a solid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InkFormulation {
    pub ag_mass_g: f64,
    pub wpu_dispersion_mass_g: f64,
    #[serde(default = "default_wpu_solid_fraction")]
    pub wpu_solid_fraction: f64,
    #[serde(default)]
    pub water_mass_g: f64,
    #[serde(default)]
    pub egain_mass_g: f64,
}

fn default_wpu_solid_fraction() -> f64 {
    0.40
}

impl InkFormulation {
    /// Silver-only formulation: 4.12 g Ag flakes, 1.25 g WPU dispersion at
    /// 40 % solids, 0.5 g deionized water.
    pub fn reference_ag_wpu() -> Self {
        Self {
            ag_mass_g: 4.12,
            wpu_dispersion_mass_g: 1.25,
            wpu_solid_fraction: 0.40,
            water_mass_g: 0.5,
            egain_mass_g: 0.0,
        }
    }

    /// Biphasic variant: the silver recipe plus 6.2 g of EGaIn liquid metal.
    pub fn reference_biphasic() -> Self {
        Self {
            egain_mass_g: 6.2,
            ..Self::reference_ag_wpu()
        }
    }

    pub fn validate(&self) -> Result<(), RecycleError> {
        for (name, mass) in [
            ("ag_mass_g", self.ag_mass_g),
            ("wpu_dispersion_mass_g", self.wpu_dispersion_mass_g),
            ("water_mass_g", self.water_mass_g),
            ("egain_mass_g", self.egain_mass_g),
        ] {
            if !mass.is_finite() {
                return Err(RecycleError::NonFiniteMass(name));
            }
            if mass < 0.0 {
                return Err(RecycleError::NegativeMass(name));
            }
        }
        if !(0.0..=1.0).contains(&self.wpu_solid_fraction) {
            return Err(RecycleError::SolidFractionOutOfRange(self.wpu_solid_fraction));
        }
        Ok(())
    }

    /// Total dry solids after all water (free and dispersion) evaporates.
    pub fn dry_solids_g(&self) -> f64 {
        self.ag_mass_g + self.wpu_dispersion_mass_g * self.wpu_solid_fraction + self.egain_mass_g
    }
}

/// Weight fraction of Ag flakes in the dried ink. Water does not count;
/// EGaIn does. The reference silver recipe gives 0.8918.
pub fn ag_dry_weight_fraction(formulation: &InkFormulation) -> Result<f64, RecycleError> {
    formulation.validate()?;
    let solids = formulation.dry_solids_g();
    if solids <= 0.0 {
        return Err(RecycleError::NoSolids);
    }
    Ok(formulation.ag_mass_g / solids)
}

/// Conservation-checked record of one processing step: `input_mass_g` split
/// into labeled output streams that must sum back to the input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassLedger {
    input_mass_g: f64,
    outputs: Vec<(String, f64)>,
}

impl MassLedger {
    pub fn new(input_mass_g: f64, outputs: Vec<(String, f64)>) -> Result<Self, RecycleError> {
        if !input_mass_g.is_finite() {
            return Err(RecycleError::NonFiniteMass("input_mass_g"));
        }
        if input_mass_g <= 0.0 {
            return Err(RecycleError::NonPositiveInput(input_mass_g));
        }
        let mut total = 0.0;
        for (label, mass) in &outputs {
            if !mass.is_finite() {
                return Err(RecycleError::NonFiniteMass("output mass"));
            }
            if *mass < 0.0 {
                return Err(RecycleError::NegativeMass("output mass"));
            }
            let _ = label;
            total += mass;
        }
        if (total - input_mass_g).abs() > CONSERVATION_TOLERANCE_G {
            return Err(RecycleError::ConservationViolation {
                input_g: input_mass_g,
                outputs_g: total,
            });
        }
        Ok(Self { input_mass_g, outputs })
    }

    pub fn input_mass_g(&self) -> f64 {
        self.input_mass_g
    }

    pub fn outputs(&self) -> &[(String, f64)] {
        &self.outputs
    }

    pub fn output_mass_g(&self, label: &str) -> Option<f64> {
        self.outputs
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, m)| *m)
    }

    /// Output masses as percentages of the input, in ledger order.
    pub fn fractions_percent(&self) -> Vec<(String, f64)> {
        self.outputs
            .iter()
            .map(|(label, mass)| (label.clone(), 100.0 * mass / self.input_mass_g))
            .collect()
    }
}

/// Circuit-separation ledger: recovered ink, ink bonded to the substrate, and
/// the remainder lost during decanting. The loss is computed as the remainder
/// so the ledger conserves mass exactly.
pub fn separation_ledger(
    initial_ink_mass_g: f64,
    recovered_g: f64,
    substrate_bound_g: f64,
) -> Result<MassLedger, RecycleError> {
    for (name, m) in [
        ("initial_ink_mass_g", initial_ink_mass_g),
        ("recovered_g", recovered_g),
        ("substrate_bound_g", substrate_bound_g),
    ] {
        if !m.is_finite() {
            return Err(RecycleError::NonFiniteMass(name));
        }
        if m < 0.0 {
            return Err(RecycleError::NegativeMass(name));
        }
    }
    let accounted = recovered_g + substrate_bound_g;
    if accounted > initial_ink_mass_g {
        return Err(RecycleError::OutputsExceedInput {
            input_g: initial_ink_mass_g,
            outputs_g: accounted,
        });
    }
    let lost_g = initial_ink_mass_g - accounted;
    MassLedger::new(
        initial_ink_mass_g,
        vec![
            ("recovered".to_string(), recovered_g),
            ("lost".to_string(), lost_g),
            ("substrate_bound".to_string(), substrate_bound_g),
        ],
    )
}

/// IPA-wash ledger for recovering silver powder from ink chunks:
/// `recovered_powder = post_wash - discarded_pu`, `process_loss = initial - post_wash`.
pub fn wash_ledger(
    initial_g: f64,
    post_wash_solids_g: f64,
    discarded_pu_g: f64,
) -> Result<MassLedger, RecycleError> {
    for (name, m) in [
        ("initial_g", initial_g),
        ("post_wash_solids_g", post_wash_solids_g),
        ("discarded_pu_g", discarded_pu_g),
    ] {
        if !m.is_finite() {
            return Err(RecycleError::NonFiniteMass(name));
        }
        if m < 0.0 {
            return Err(RecycleError::NegativeMass(name));
        }
    }
    if post_wash_solids_g > initial_g {
        return Err(RecycleError::PostWashExceedsInitial {
            initial_g,
            post_wash_g: post_wash_solids_g,
        });
    }
    if discarded_pu_g > post_wash_solids_g {
        return Err(RecycleError::DiscardExceedsPostWash {
            post_wash_g: post_wash_solids_g,
            discarded_g: discarded_pu_g,
        });
    }
    MassLedger::new(
        initial_g,
        vec![
            ("recovered_powder".to_string(), post_wash_solids_g - discarded_pu_g),
            ("discarded_pu".to_string(), discarded_pu_g),
            ("process_loss".to_string(), initial_g - post_wash_solids_g),
        ],
    )
}

/// Conductivity of a recycled ink relative to the pristine ink it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetentionReport {
    pub sigma_pristine_s_per_m: f64,
    pub sigma_recycled_s_per_m: f64,
    pub retention_fraction: f64,
}

impl RetentionReport {
    pub fn decay_fraction(&self) -> f64 {
        1.0 - self.retention_fraction
    }
}

pub fn conductivity_retention(
    sigma_pristine: f64,
    sigma_recycled: f64,
) -> Result<RetentionReport, RecycleError> {
    if !sigma_pristine.is_finite() || sigma_pristine <= 0.0 {
        return Err(RecycleError::NonPositiveConductivity(sigma_pristine));
    }
    if !sigma_recycled.is_finite() || sigma_recycled <= 0.0 {
        return Err(RecycleError::NonPositiveConductivity(sigma_recycled));
    }
    Ok(RetentionReport {
        sigma_pristine_s_per_m: sigma_pristine,
        sigma_recycled_s_per_m: sigma_recycled,
        retention_fraction: sigma_recycled / sigma_pristine,
    })
}
