//! Arithmetic in the Galois ring GR(8, 2) = W_3(F_4): Frobenius,
//! Teichmuller lifts and p-adic valuations.

use witt_omega::chainring::FieldSpec;

fn main() {
    let f4 = FieldSpec::new(2, 2).expect("F_4");
    let w3 = f4.ring(3);
    let omega = w3.gen();

    println!("W_3(F_4) has {} elements", 1u64 << (3 * 2));
    println!("generator     w = {}", w3.fmt_elem(omega));
    println!("Frobenius  F(w) = {}", w3.fmt_elem(w3.frob(omega)));
    println!("           F^2(w) = {}", w3.fmt_elem(w3.frob(w3.frob(omega))));

    // The Teichmuller lift of w satisfies t^4 = t.
    let t = w3.teichmuller(omega);
    println!("teichmuller [w] = {}  ([w]^4 == [w]: {})", w3.fmt_elem(t), w3.pow(t, 4) == t);

    for n in [1i64, 2, 4, 6] {
        let x = w3.mul(w3.from_int(n), omega);
        println!("v({n}w) = {}", w3.val(x));
    }
}
