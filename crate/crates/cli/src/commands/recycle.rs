//! `recycle`: ink stoichiometry and mass-balance ledgers.

use serde::Serialize;
use softcircuit_core::recycle::{
    ag_dry_weight_fraction, separation_ledger, wash_ledger, InkFormulation, MassLedger,
};

use crate::config::Resolved;
use crate::io;
use crate::CliError;

#[derive(Debug, Serialize)]
struct RecipeReport {
    formulation: InkFormulation,
    wet_mass_g: f64,
    dry_solids_g: f64,
    ag_dry_weight_fraction: f64,
}

/// Dry-mass breakdown of a formulation given inline or as a file.
pub fn recipe(resolved: &Resolved, json: &str) -> Result<(), CliError> {
    let text = if json.trim_start().starts_with('{') {
        json.to_string()
    } else {
        std::fs::read_to_string(json)
            .map_err(|e| CliError::Io(format!("cannot read {json}: {e}")))?
    };
    let mut de = serde_json::Deserializer::from_str(&text);
    let formulation: InkFormulation =
        serde_path_to_error::deserialize(&mut de).map_err(|e| {
            CliError::Validation(format!("formulation: {} (at {})", e.inner(), e.path()))
        })?;
    let fraction = ag_dry_weight_fraction(&formulation)?;

    let wpu_dry = formulation.wpu_dispersion_mass_g * formulation.wpu_solid_fraction;
    let wet_mass = formulation.ag_mass_g
        + formulation.wpu_dispersion_mass_g
        + formulation.water_mass_g
        + formulation.egain_mass_g;
    let dry_mass = formulation.dry_solids_g();

    println!("component        wet g     dry g");
    println!("ag flakes      {:>7.2}   {:>7.2}", formulation.ag_mass_g, formulation.ag_mass_g);
    println!(
        "wpu dispersion {:>7.2}   {:>7.2}",
        formulation.wpu_dispersion_mass_g, wpu_dry
    );
    println!("water          {:>7.2}   {:>7.2}", formulation.water_mass_g, 0.0);
    println!(
        "egain          {:>7.2}   {:>7.2}",
        formulation.egain_mass_g, formulation.egain_mass_g
    );
    println!("total          {:>7.2}   {:>7.2}", wet_mass, dry_mass);
    println!("dry silver weight fraction: {:.2} %", 100.0 * fraction);

    let report = RecipeReport {
        formulation,
        wet_mass_g: wet_mass,
        dry_solids_g: dry_mass,
        ag_dry_weight_fraction: fraction,
    };
    io::write_json(&resolved.out_dir.join("recipe.json"), &report)?;
    Ok(())
}

fn print_ledger(ledger: &MassLedger) {
    println!("input: {:.2} g", ledger.input_mass_g());
    for ((label, mass), (_, percent)) in
        ledger.outputs().iter().zip(ledger.fractions_percent())
    {
        println!("{label:<16} {mass:>8.2} g  {percent:>6.2} %");
    }
}

/// Circuit-separation ledger; the decanting loss is the remainder.
pub fn ledger(
    resolved: &Resolved,
    input: f64,
    recovered: f64,
    bound: f64,
) -> Result<(), CliError> {
    let ledger = separation_ledger(input, recovered, bound)?;
    print_ledger(&ledger);
    io::write_json(&resolved.out_dir.join("separation_ledger.json"), &ledger)?;
    Ok(())
}

/// Powder-recovery wash ledger.
pub fn wash(
    resolved: &Resolved,
    initial: f64,
    post_wash: f64,
    discarded: f64,
) -> Result<(), CliError> {
    let ledger = wash_ledger(initial, post_wash, discarded)?;
    print_ledger(&ledger);
    io::write_json(&resolved.out_dir.join("wash_ledger.json"), &ledger)?;
    Ok(())
}
