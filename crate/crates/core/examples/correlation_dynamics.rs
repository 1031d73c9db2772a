//! Pair correlations of four strongly driven atoms from the ground state, with
//! exponential fits and the eigenmode that dominates each pair.

use driven_dicke::dynamics::{
    correlations, eigenvector_observables, fit_exponential, ground_state, log_grid, propagate_spectral, FitMethod,
    FitWindow,
};
use driven_dicke::liouvillian::{build_liouvillian, spectrum};
use driven_dicke::operators::ModelParams;

fn main() -> driven_dicke::Result<()> {
    let w = vec![-0.62448819, 5.93539815, -1.53186917, 3.04670911];
    let p = ModelParams::new(4, 200.0, w)?;
    let spec = spectrum(&build_liouvillian(&p)?)?;
    let times = log_grid(20.0, 5000.0, 500);
    let traj = propagate_spectral(&spec, &ground_state(4), &times)?;
    let pairs = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
    let trace = correlations(&traj, &pairs)?;
    // the 14 long-lived modes of the strong-drive limit
    let modes = eigenvector_observables(&spec, &pairs, 14)?;
    let window = FitWindow { t_min: 20.0, t_max: 5000.0 };
    println!("pair        A          B     dominant -Re");
    for (k, pair) in pairs.iter().enumerate() {
        let f = fit_exponential(&times, &trace.magnitudes(k), window, FitMethod::Nonlinear, false)?;
        let dom = modes.dominant_mode(k).map(|i| -modes.eigenvalues[i][0]).unwrap_or(f64::NAN);
        println!("{pair:?}  {:.4}  {:.4e}  {dom:.4e}", f.amplitude, f.rate);
    }
    Ok(())
}
