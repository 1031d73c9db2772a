//! Coarse map of the Liouvillian gap -Re(lambda_1) over drive and disorder width.

use driven_dicke::dynamics::log_grid;
use driven_dicke::liouvillian::{build_liouvillian, classify_subradiant, spectrum};
use driven_dicke::operators::{equidistant_detunings, ModelParams};
use rayon::prelude::*;

fn main() -> driven_dicke::Result<()> {
    let omegas = log_grid(0.1, 100.0, 7);
    let widths = [3.0, 2.0, 1.0, 0.5, 0.0];
    print!("dw \\ omega");
    for o in &omegas {
        print!("{o:>9.2}");
    }
    println!();
    for dw in widths {
        let row: Vec<f64> = omegas
            .par_iter()
            .map(|&o| {
                let p = ModelParams::new(4, o, equidistant_detunings(4, dw)).expect("valid");
                let spec = spectrum(&build_liouvillian(&p).expect("N=4")).expect("spectrum");
                -classify_subradiant(&spec, 0.05, 1e-6).lambda1[0]
            })
            .collect();
        print!("{dw:>10.1}");
        for g in row {
            print!("{g:>9.4}");
        }
        println!();
    }
    Ok(())
}
