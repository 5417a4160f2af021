//! The three Omega powers of a module and the Kummer-Witt sequences
//! relating them through Frobenius and Verschiebung.

use witt_omega::chainring::FieldSpec;
use witt_omega::omega::{kummer_witt_medium, BigOmega, MediumOmega, SmallOmega};
use witt_omega::wmodule::TorsionModule;

fn main() {
    let f2 = FieldSpec::prime(2);
    let v = TorsionModule::free(f2, 1, 2);
    for n in 1..=2 {
        let medium = MediumOmega::new(&v, n).expect("medium");
        let big = BigOmega::new(&v, n).expect("big");
        let small = SmallOmega::new(&v, n).expect("small");
        println!("n = {n}");
        println!("  medium orders {:?}", medium.module.orders());
        println!("  big    orders {:?}", big.module().orders());
        println!("  small  levels {:?}", small.invariant_levels());

        let kw = kummer_witt_medium(&v, n).expect("sequence");
        println!(
            "  FV = p: {}, VF = p: {}, F onto: {}, V injective: {}",
            kw.frob_ver_is_p, kw.ver_frob_is_p, kw.frob_surjective, kw.ver_injective
        );
    }
}
