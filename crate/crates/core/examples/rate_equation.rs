//! Secular rate equation: stationary populations under a pure drive, and
//! coherence frequencies predicted for dipole-coupled rings and chains.

use driven_dicke::operators::{collective_ops, hamiltonian, Boundary, ModelParams};
use driven_dicke::rateq::{build_rate_matrix, predicted_frequencies, stationary_count, NULL_TOL};
use driven_dicke::symmetry::{build_group, GroupKind};

fn main() -> driven_dicke::Result<()> {
    let jm = collective_ops(4).jminus;
    let p = ModelParams::new(4, 200.0, vec![0.0; 4])?;
    let r = build_rate_matrix(&hamiltonian(&p), &jm, 1.0, None)?;
    println!("drive only: {} stationary populations, column-sum defect {:.1e}", stationary_count(&r, NULL_TOL)?, r.conservation_defect());

    for (boundary, kind) in [(Boundary::Periodic, GroupKind::D), (Boundary::Open, GroupKind::Cs)] {
        let p = ModelParams::new(4, 200.0, vec![0.0; 4])?.with_dipole(1.0, boundary)?;
        let g = build_group(kind, 4)?;
        let r = build_rate_matrix(&hamiltonian(&p), &jm, 1.0, Some(&g))?;
        let pred = predicted_frequencies(&r, &g, p.omega, 1e-6)?;
        println!("{boundary:?} ({}): {:?}", g.name(), pred.frequencies);
    }
    Ok(())
}
