//! Divided powers of a torsion module: the composition basis, the
//! invariant factors and the perfect pairing at degree p^n.

use witt_omega::chainring::FieldSpec;
use witt_omega::gamma::GammaModule;
use witt_omega::wmodule::TorsionModule;

fn main() {
    let f2 = FieldSpec::prime(2);
    for (m, weights, degree) in [(1, vec![0], 4), (1, vec![0, 0], 2), (2, vec![0, 1], 2)] {
        let base = TorsionModule::new(f2, m, weights.clone()).expect("valid module");
        let g = GammaModule::new(&base, degree).expect("divided power");
        let factors: Vec<u64> = g.module.orders().iter().map(|&e| 2u64.pow(e)).collect();
        println!("Gamma^{degree} of W_{m} weights {weights:?}");
        for (a, f) in g.basis.iter().zip(&factors) {
            println!("  {a:?}  order {f}");
        }
    }

    // The symbol [x]_2 of x = (1, 1) expands as [e1]_2 + [e1][e2] + [e2]_2.
    let v = TorsionModule::free(f2, 1, 2);
    let g = GammaModule::new(&v, 2).expect("divided power");
    let x = vec![v.ring().one(), v.ring().one()];
    let s = g.symbol(&x);
    println!("[(1,1)]_2 = {}", serde_json::to_string(&g.to_json(&s)).expect("json"));
    let e1 = g.symbol(&[v.ring().one(), v.ring().zero()]);
    let pairing = g.pairing(&s, &e1).expect("p-power degree");
    println!("<[(1,1)]_2, [(1,0)]_2> = {}", v.field.ring(2).fmt_elem(pairing));
}
