//! Lifting a perfect F_p-algebra to a flat Z/p^2-algebra through divided
//! powers, and the inverse construction.

use witt_omega::chainring::FieldSpec;
use witt_omega::wrinkle::{catalog, galois_isomorphism, lift_2flat, psi2, WrinkledAlgebra};

fn main() {
    for (name, a) in catalog() {
        let w = WrinkledAlgebra::perfect(a).expect("perfect");
        let (flat, cert) = lift_2flat(&w).expect("lift");
        let back = psi2(&flat).expect("reduction");
        println!(
            "{name:10} rank {} free {} round trip {} reduces back {}",
            cert.rank,
            cert.free_of_rank,
            cert.round_trip,
            back.algebra == w.algebra
        );
        if name == "F_4" {
            let iso = galois_isomorphism(FieldSpec::new(2, 2).expect("F_4"), &flat).expect("search");
            println!("  lift of F_4 is GR(4, 2): {}", iso.is_some());
            println!("  table {:?}", flat.0.table);
        }
    }
}
