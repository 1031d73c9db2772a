//! Irrep decompositions of the spin multiplicity spaces and the resulting
//! dark-state and frequency counts for two to five atoms.

use driven_dicke::symmetry::symmetry_report;

fn main() -> driven_dicke::Result<()> {
    for n in 2..=5 {
        print!("{}", symmetry_report(n)?.to_text());
        println!();
    }
    Ok(())
}
