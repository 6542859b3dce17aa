//! Measured reference values for the two ink systems.

use serde::Serialize;

use super::TraceGeometry;

/// One measured reference value with the context it was measured in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceValue {
    pub value: f64,
    pub source: &'static str,
}

/// A measured reference range (inclusive bounds) with measurement context.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceRange {
    pub low: f64,
    pub high: f64,
    pub source: &'static str,
}

impl ReferenceRange {
    pub fn contains(&self, value: f64) -> bool {
        (self.low..=self.high).contains(&value)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.low + self.high)
    }
}

/// Measured anchor values used by the acceptance checks. Immutable; every
/// entry records where the number comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaterialReference {
    sigma_day0: ReferenceValue,
    sigma_day30_print: ReferenceValue,
    sigma_day30_vial: ReferenceValue,
    sigma_recycled: ReferenceValue,
    agwpu_failure_strain_range: ReferenceRange,
    biphasic_failure_strain_range: ReferenceRange,
    reference_geometry: TraceGeometry,
}

impl MaterialReference {
    pub fn standard() -> Self {
        Self {
            sigma_day0: ReferenceValue {
                value: 1.16e5,
                source: "four-point probe on stencil-printed matrix-ink traces, day of printing",
            },
            sigma_day30_print: ReferenceValue {
                value: 1.54e5,
                source: "same printed traces re-measured after 30 days of ambient storage",
            },
            sigma_day30_vial: ReferenceValue {
                value: 1.62e5,
                source: "traces printed from ink stored 30 days in a sealed vial",
            },
            sigma_recycled: ReferenceValue {
                value: 1.13e5,
                source: "traces reprinted from powder recovered in the acetone recycling run",
            },
            agwpu_failure_strain_range: ReferenceRange {
                low: 0.283,
                high: 0.335,
                source: "uniaxial pull of matrix-ink traces to open circuit, three specimens",
            },
            biphasic_failure_strain_range: ReferenceRange {
                low: 2.03,
                high: 3.235,
                source: "uniaxial pull of liquid-metal-loaded traces to open circuit, three specimens",
            },
            reference_geometry: TraceGeometry::reference_trace(),
        }
    }

    /// Conductivity of a freshly printed matrix-ink trace, S/m.
    pub fn sigma_day0(&self) -> ReferenceValue {
        self.sigma_day0
    }

    /// Conductivity of the same trace after 30 days in air, S/m.
    pub fn sigma_day30_print(&self) -> ReferenceValue {
        self.sigma_day30_print
    }

    /// Conductivity printed from 30-day vial-stored ink, S/m.
    pub fn sigma_day30_vial(&self) -> ReferenceValue {
        self.sigma_day30_vial
    }

    /// Conductivity printed from recycled powder, S/m.
    pub fn sigma_recycled(&self) -> ReferenceValue {
        self.sigma_recycled
    }

    /// Observed electrical failure strains of matrix-ink traces.
    pub fn agwpu_failure_strain_range(&self) -> ReferenceRange {
        self.agwpu_failure_strain_range
    }

    /// Observed electrical failure strains of liquid-metal-loaded traces.
    pub fn biphasic_failure_strain_range(&self) -> ReferenceRange {
        self.biphasic_failure_strain_range
    }

    /// The 8 cm x 5 mm x 102 um characterization trace.
    pub fn reference_geometry(&self) -> TraceGeometry {
        self.reference_geometry
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conductivity_improves_with_age() {
        let m = MaterialReference::standard();
        assert!(m.sigma_day30_print().value > m.sigma_day0().value);
        assert!(m.sigma_day30_vial().value > m.sigma_day30_print().value);
    }

    #[test]
    fn recycled_conductivity_is_slightly_below_pristine() {
        let m = MaterialReference::standard();
        let retention = m.sigma_recycled().value / m.sigma_day0().value;
        assert!(retention > 0.95 && retention < 1.0, "retention {retention}");
    }

    #[test]
    fn failure_ranges_are_ordered_and_disjoint() {
        let m = MaterialReference::standard();
        let matrix = m.agwpu_failure_strain_range();
        let biphasic = m.biphasic_failure_strain_range();
        assert!(matrix.low < matrix.high);
        assert!(biphasic.low < biphasic.high);
        assert!(matrix.high < biphasic.low);
        assert!(matrix.contains(0.3));
        assert!(!matrix.contains(0.4));
    }

    #[test]
    fn reference_geometry_matches_characterization_trace() {
        let g = MaterialReference::standard().reference_geometry();
        assert_eq!(g.length_m(), 0.08);
        assert_eq!(g.width_m(), 0.005);
        assert_eq!(g.thickness_m(), 102e-6);
    }

    #[test]
    fn every_value_names_its_source() {
        let m = MaterialReference::standard();
        for source in [
            m.sigma_day0().source,
            m.sigma_day30_print().source,
            m.sigma_day30_vial().source,
            m.sigma_recycled().source,
            m.agwpu_failure_strain_range().source,
            m.biphasic_failure_strain_range().source,
        ] {
            assert!(!source.is_empty());
        }
    }
}
