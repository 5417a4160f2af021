//! Transfer along a subspace W of F_q^d as a polynomial law, and the
//! checks tying transfers to the Frobenius.

use witt_omega::chainring::FieldSpec;
use witt_omega::transfer::{check_transfer_laws, Laws, Subspace};

fn main() {
    let f2 = FieldSpec::prime(2);
    let k = f2.field();
    let line = Subspace::new(f2, 2, &[vec![k.one(), k.zero()]]);
    let laws = Laws::new(f2);
    let law = laws.transfer_law(&line).expect("transfer");
    println!("T: F_2^2 -> H = <(1,0)> has degree {}", law.degree);
    for (a, c) in &law.coords[0].terms {
        println!("  x^{a:?} * {}", k.fmt_elem(*c));
    }

    // Evaluate over F_4: the law is defined on every extension.
    let f4 = FieldSpec::new(2, 2).expect("F_4");
    let w = f4.field().gen();
    let at = law.eval(f4, &[w, f4.field().one()]).expect("evaluation");
    println!("T(w, 1) = {}", f4.field().fmt_elem(at[0]));

    for (d, c) in [(2, 1), (3, 1), (3, 2)] {
        let r = check_transfer_laws(&laws, d, c).expect("report");
        println!(
            "q=2 d={d} c={c}: {} subspaces, flags agree {}, restriction is F^c {}, integral {}",
            r.subspaces, r.flag_independent, r.restriction_is_frobenius, r.integral_formula
        );
    }
}
