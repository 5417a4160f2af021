//! The tense product of torsion modules, its valuation and the Chern
//! polynomial that computes it.

use witt_omega::chainring::FieldSpec;
use witt_omega::tense::{chern, tense_product, valuation};
use witt_omega::wmodule::TorsionModule;

fn main() {
    let f2 = FieldSpec::prime(2);
    let n = 3;
    let cases = [(vec![0], vec![0]), (vec![1], vec![1]), (vec![2], vec![1]), (vec![0, 1], vec![2])];
    for (a, b) in cases {
        let m = TorsionModule::new(f2, n, a.clone()).expect("module");
        let k = TorsionModule::new(f2, n, b.clone()).expect("module");
        let (t, _) = tense_product(&m, &k, n);
        let (cm, ck, ct) = (chern(&m), chern(&k), chern(&t));
        println!(
            "weights {a:?} x {b:?}: orders {:?}  v = {} + {} -> {}  Ch {:?} * {:?} = {:?}",
            t.orders(),
            valuation(&m),
            valuation(&k),
            valuation(&t),
            cm.coeffs,
            ck.coeffs,
            ct.coeffs
        );
    }
}
