//! Dark modes with dipole-dipole coupling on a ring and on a chain. Dark modes
//! are those whose rates keep falling when the drive is raised tenfold.

use driven_dicke::liouvillian::{build_liouvillian, classify_subradiant, dark_cluster, spectrum};
use driven_dicke::operators::{Boundary, ModelParams};

fn main() -> driven_dicke::Result<()> {
    let w = vec![-0.62448819, 5.93539815, -1.53186917, 3.04670911];
    for boundary in [Boundary::Periodic, Boundary::Open] {
        let p = ModelParams::new(4, 200.0, w.clone())?.with_dipole(1.0, boundary)?;
        let dark = dark_cluster(&p, 0.05, 10.0, 1e-6)?;
        let spec = spectrum(&build_liouvillian(&p)?)?;
        let slow = classify_subradiant(&spec, 0.25, 1e-6);
        println!(
            "{boundary:?}: {} dark ({} besides the steady state); long-lived frequencies {:?}",
            dark.count_inclusive, dark.count_exclusive, slow.frequencies
        );
    }
    Ok(())
}
