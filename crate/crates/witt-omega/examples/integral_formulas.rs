//! Frobenius and Verschiebung powers on small Omega as normalised sums
//! of transfers over a Grassmannian.

use witt_omega::chainring::FieldSpec;
use witt_omega::transfer::{gaussian_binomial, integral_formulas};

fn main() {
    for (q_field, d) in [(FieldSpec::prime(2), 3), (FieldSpec::prime(3), 2)] {
        let q = q_field.q();
        for m in 1..d {
            let r = integral_formulas(q_field, d, m, 1).expect("report");
            println!(
                "q={q} d={d} m={m}: |Gr(m, d)| = {}, normalisers ({}, {}), Frob {} Ver {}",
                gaussian_binomial(q, m, d),
                r.frobenius_normaliser,
                r.verschiebung_normaliser,
                r.frobenius_formula,
                r.verschiebung_formula
            );
        }
    }
}
