//! Strong-drive dark-state count: closed form against the near-zero cluster
//! of the disordered Liouvillian.

use driven_dicke::commands::strong_drive_count;
use driven_dicke::liouvillian::{build_liouvillian, classify_subradiant, spectrum};
use driven_dicke::operators::ModelParams;
use driven_dicke::symmetry::count_strong_drive;

fn main() -> driven_dicke::Result<()> {
    for n in 1..=8 {
        println!("N={n}: closed form {}, sum d_j^2 {}", count_strong_drive(n), strong_drive_count(n));
    }
    let w = vec![-0.62448819, 5.93539815, -1.53186917, 3.04670911];
    let spec = spectrum(&build_liouvillian(&ModelParams::new(4, 200.0, w)?)?)?;
    let rates = spec.rates();
    let rep = classify_subradiant(&spec, 0.05, 1e-6);
    println!("N=4, omega=200: {} eigenvalues below 0.05", rep.count_inclusive);
    for (k, r) in rates.iter().take(16).enumerate() {
        println!("  {:>2}  {r:.4e}", k + 1);
    }
    Ok(())
}
