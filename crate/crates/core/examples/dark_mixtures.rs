//! Uniform mixtures over a Dicke multiplet (x-quantized) are stationary in
//! the strong-drive limit: their drift after one decay time halves each time
//! the drive doubles.

use driven_dicke::dynamics::propagate_spectral;
use driven_dicke::linalg::fro;
use driven_dicke::liouvillian::{build_liouvillian, spectrum};
use driven_dicke::operators::{dark_mixture, dicke_basis, Axis, HalfInt, ModelParams};

fn main() -> driven_dicke::Result<()> {
    let basis = dicke_basis(4, Axis::X)?;
    let w = vec![-0.62448819, 5.93539815, -1.53186917, 3.04670911];
    for (j, nu) in [(HalfInt::int(2), 1), (HalfInt::int(1), 2), (HalfInt::int(0), 1)] {
        let rho = dark_mixture(&basis, j, nu, nu)?;
        print!("j={j} nu={nu}:");
        for omega in [50.0, 100.0, 200.0] {
            let p = ModelParams::new(4, omega, w.clone())?;
            let spec = spectrum(&build_liouvillian(&p)?)?;
            let traj = propagate_spectral(&spec, &rho, &[1.0])?;
            print!("  omega={omega}: {:.4}", fro((&traj.states[0] - &rho).as_ref()));
        }
        println!();
    }
    Ok(())
}
