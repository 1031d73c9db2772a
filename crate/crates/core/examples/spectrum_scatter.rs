//! Lowest Liouvillian eigenvalues for four equidistantly detuned atoms at
//! increasing drive. Both real and imaginary parts shrink toward the origin.

use driven_dicke::liouvillian::{build_liouvillian, spectrum};
use driven_dicke::operators::{equidistant_detunings, ModelParams};

fn main() -> driven_dicke::Result<()> {
    for omega in [0.5, 5.0, 50.0] {
        let p = ModelParams::new(4, omega, equidistant_detunings(4, 2.0))?;
        let spec = spectrum(&build_liouvillian(&p)?)?;
        println!("omega = {omega}");
        for z in spec.eigenvalues.iter().take(14) {
            println!("  {:>12.6} {:>+12.6}i", z.re, z.im);
        }
    }
    Ok(())
}
