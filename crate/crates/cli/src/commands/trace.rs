//! `trace`: build seeded percolation networks and sweep them over a
//! strain grid.
//!
//! Writes one `trace_seed<seed>.csv` per configured seed plus a
//! `trace_summary.csv`, and prints one line per seed.

use softcircuit_core::electromech::{
    build_network, solve_conductance, strain_sweep_with_options, uniform_strain_grid,
    SweepOptions,
};

use crate::config::Resolved;
use crate::io::{self, fmt_f64};
use crate::CliError;

pub const CURVE_HEADER: &str = "strain,normalized_resistance";
pub const SUMMARY_HEADER: &str = "seed,occupancy,occupied_bonds,connected,failure_strain";

pub fn run(resolved: &Resolved) -> Result<(), CliError> {
    let em = &resolved.config.electromech;
    let occupancy = em.resolved_occupancy()?;
    let grid = uniform_strain_grid(em.strain_max, em.strain_steps)?;
    let options = SweepOptions {
        failure_threshold: em.failure_threshold,
    };

    let mut summary_rows = Vec::with_capacity(em.seeds.len());
    for &offset in &em.seeds {
        // The base seed shifts the whole batch; each list entry names one
        // network within it.
        let seed = resolved.seed.wrapping_add(offset);
        let network = build_network(em.rows, em.cols, occupancy, &em.damage, seed)?;
        let connected = solve_conductance(&network)?.is_connected();
        let curve = strain_sweep_with_options(&network, &em.geometry, &grid, options)?;

        let rows = curve.points.iter().map(|p| {
            format!(
                "{},{}",
                fmt_f64(p.strain),
                fmt_f64(p.normalized_resistance)
            )
        });
        io::write_csv(
            &resolved.out_dir.join(format!("trace_seed{seed}.csv")),
            CURVE_HEADER,
            rows,
        )?;

        let occupied = network.occupied_bond_count();
        let failure = curve.failure_strain.map(fmt_f64).unwrap_or_default();
        summary_rows.push(format!(
            "{seed},{},{occupied},{connected},{failure}",
            fmt_f64(occupancy)
        ));

        let outcome = match curve.failure_strain {
            Some(s) if connected => format!("failure at strain {}", fmt_f64(s)),
            Some(_) => "never conductive".to_string(),
            None => "no failure within the grid".to_string(),
        };
        println!("seed {seed}: {occupied} occupied bonds, {outcome}");
    }

    io::write_csv(
        &resolved.out_dir.join("trace_summary.csv"),
        SUMMARY_HEADER,
        summary_rows,
    )?;
    Ok(())
}
