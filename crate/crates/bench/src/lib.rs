//! Fixtures shared by the benchmarks.

use cssball_core::driver::{build_ansatz, reduced_scan, AnsatzSpec, ScanConfig};
use cssball_core::{Params, RadialField, RadialGrid};

/// Best ansatz at `p = 2, omega = 0.05` on the default grid of radius `radius`.
pub fn reference_field(radius: f64) -> (Params, RadialField) {
    let params = Params::new(2.0, 0.05).expect("valid parameters");
    let grid = RadialGrid::with_default_nodes(radius).expect("valid grid");
    let scan = reduced_scan(&params, &grid, &ScanConfig::default()).expect("scan");
    let spec = AnsatzSpec::new(2.0, radius, scan.k2, scan.rho_star, scan.alpha, scan.beta)
        .expect("admissible ansatz");
    let field = build_ansatz(&params, &grid, &spec).expect("ansatz");
    (params, field)
}
