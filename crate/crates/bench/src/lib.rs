//! Fixtures shared by the benchmarks.

use advncg::families::{build_family, FamilyKind, FamilySpec};
use advncg::OwnedMultiGraph;

pub fn family(kind: FamilyKind, n: usize) -> OwnedMultiGraph {
    build_family(&FamilySpec::new(kind, n)).expect("valid family")
}

/// Networks of increasing size for cost and best-response timing.
pub fn cost_fixtures() -> Vec<(String, OwnedMultiGraph)> {
    let mut out = Vec::new();
    for n in [6, 12, 24] {
        for kind in [FamilyKind::DoubleClique, FamilyKind::DoubleStar, FamilyKind::Cycle] {
            let spec = FamilySpec::new(kind, n);
            out.push((spec.to_string(), family(kind, n)));
        }
    }
    out
}
