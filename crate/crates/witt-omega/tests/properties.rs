//! Algebraic invariants checked on random inputs.

use proptest::prelude::*;

use witt_omega::chainring::{tau_bar, FieldSpec, GaloisRing, Gr};
use witt_omega::gamma::{mul, GammaModule};
use witt_omega::suite::{run, SuiteOptions};
use witt_omega::tense::{chern, clamp_add, tense_product, valuation};
use witt_omega::transfer::{gaussian_binomial, Laws, Subspace};
use witt_omega::wmodule::TorsionModule;

const FIELDS: [(u64, usize); 6] = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)];

fn ring_case() -> impl Strategy<Value = (GaloisRing, [u64; 3])> {
    (0..FIELDS.len(), 1u32..=3, any::<[u64; 3]>()).prop_map(|(i, level, seeds)| {
        let (p, r) = FIELDS[i];
        (FieldSpec::new(p, r).expect("field").ring(level), seeds)
    })
}

fn element(ring: &GaloisRing, seed: u64) -> Gr {
    let card = (ring.p()).pow(ring.r() as u32 * ring.level);
    ring.from_index(seed % card)
}

/// A small module over `W_m(F_q)` with at most 64 elements, and points in it.
fn module_case() -> impl Strategy<Value = (TorsionModule, Vec<u64>)> {
    (0..3usize, 1u32..=3, prop::collection::vec(0u32..3, 1..=3), prop::collection::vec(any::<u64>(), 8)).prop_filter_map(
        "module too large",
        |(fi, m, raw, seeds)| {
            let (p, r) = [(2, 1), (3, 1), (2, 2)][fi];
            let weights: Vec<u32> = raw.into_iter().map(|w| w % m).collect();
            let field = FieldSpec::new(p, r).ok()?;
            let module = TorsionModule::new(field, m, weights).ok()?;
            (module.log_card() <= 6 * (p == 2) as u64 + 3 * (p == 3) as u64).then_some((module, seeds))
        },
    )
}

fn point(m: &TorsionModule, seed: u64) -> Vec<Gr> {
    let all = m.elements();
    all[(seed % all.len() as u64) as usize].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms((ring, s) in ring_case()) {
        let (a, b, c) = (element(&ring, s[0]), element(&ring, s[1]), element(&ring, s[2]));
        prop_assert_eq!(ring.mul(ring.mul(a, b), c), ring.mul(a, ring.mul(b, c)));
        prop_assert_eq!(ring.mul(a, b), ring.mul(b, a));
        prop_assert_eq!(ring.mul(a, ring.add(b, c)), ring.add(ring.mul(a, b), ring.mul(a, c)));
        prop_assert_eq!(ring.add(a, ring.neg(a)), ring.zero());
        prop_assert_eq!(ring.mul(a, ring.one()), a);
    }

    #[test]
    fn units_invert_and_valuation_adds((ring, s) in ring_case()) {
        let (a, b) = (element(&ring, s[0]), element(&ring, s[1]));
        if let Some(inv) = ring.inv(a) {
            prop_assert!(ring.is_unit(a));
            prop_assert_eq!(ring.mul(a, inv), ring.one());
        } else {
            prop_assert!(ring.val(a) >= 1);
        }
        let level = ring.level;
        prop_assert_eq!(ring.val(ring.mul(a, b)), (ring.val(a) + ring.val(b)).min(level));
    }

    #[test]
    fn frobenius_is_a_ring_automorphism_of_order_r((ring, s) in ring_case()) {
        let (a, b) = (element(&ring, s[0]), element(&ring, s[1]));
        prop_assert_eq!(ring.frob(ring.mul(a, b)), ring.mul(ring.frob(a), ring.frob(b)));
        prop_assert_eq!(ring.frob(ring.add(a, b)), ring.add(ring.frob(a), ring.frob(b)));
        let mut x = a;
        for _ in 0..ring.r() {
            x = ring.frob(x);
        }
        prop_assert_eq!(x, a);
        // On the residue field the Frobenius is the p-th power.
        let k = ring.at_level(1);
        prop_assert_eq!(k.frob(k.reduce(a)), k.pow(k.reduce(a), ring.p()));
    }

    #[test]
    fn teichmuller_is_multiplicative_and_fixed_by_q_power((ring, s) in ring_case()) {
        let k = ring.at_level(1);
        let (x, y) = (k.reduce(element(&ring, s[0])), k.reduce(element(&ring, s[1])));
        let (tx, ty) = (ring.teichmuller(x), ring.teichmuller(y));
        prop_assert_eq!(ring.mul(tx, ty), ring.teichmuller(k.mul(x, y)));
        let q = ring.p().pow(ring.r() as u32);
        prop_assert_eq!(ring.pow(tx, q), tx);
        prop_assert_eq!(k.reduce(tx), x);
    }

    #[test]
    fn gamma_symbols_are_homogeneous((m, s) in module_case(), degree in 1u32..=4, c in any::<u64>()) {
        let g = GammaModule::new(&m, degree).unwrap();
        let ring = m.ring();
        let x = point(&m, s[0]);
        let scalar = element(&ring, c);
        let cx = m.reduce(&x.iter().map(|&xi| ring.mul(scalar, xi)).collect::<Vec<_>>());
        let lhs = g.symbol(&cx);
        // Gamma^degree(M) lives at a higher level; any lift of the scalar works.
        let high = g.module.ring();
        let power = high.pow(scalar, degree as u64);
        let rhs = g.module.reduce(&g.symbol(&x).iter().map(|&v| high.mul(power, v)).collect::<Vec<_>>());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gamma_symbols_expand_sums((m, s) in module_case(), degree in 1u32..=4) {
        let ring = m.ring();
        let (x, y) = (point(&m, s[0]), point(&m, s[1]));
        let sum = m.reduce(&x.iter().zip(&y).map(|(&a, &b)| ring.add(a, b)).collect::<Vec<_>>());
        let target = GammaModule::new(&m, degree).unwrap();
        let mut acc = vec![Gr::ZERO; target.dim()];
        for i in 0..=degree {
            let gi = GammaModule::new(&m, i).unwrap();
            let gj = GammaModule::new(&m, degree - i).unwrap();
            let term = mul(&target, &gi, &gi.symbol(&x), &gj, &gj.symbol(&y));
            acc = acc.iter().zip(&term).map(|(&a, &b)| target.module.ring().add(a, b)).collect();
        }
        prop_assert_eq!(target.symbol(&sum), target.module.reduce(&acc));
    }

    #[test]
    fn symbol_pairing_is_a_lifted_power((m, s) in module_case(), n in 0u32..=2) {
        let p = m.field.p;
        let g = GammaModule::new(&m, p.pow(n) as u32).unwrap();
        let dual = m.dual();
        let (x, phi) = (point(&m, s[0]), point(&dual, s[1]));
        let gd = GammaModule::new(&dual, p.pow(n) as u32).unwrap();
        let got = g.pairing(&g.symbol(&x), &gd.symbol(&phi)).unwrap();
        prop_assert_eq!(got, tau_bar(&m.field, m.pairing(&x, &phi), m.m, n));
    }

    #[test]
    fn module_json_round_trips_and_dual_is_involutive((m, _s) in module_case()) {
        let back = TorsionModule::from_json(&m.to_json()).unwrap();
        prop_assert_eq!(&back, &m);
        let dd = m.dual().dual();
        prop_assert_eq!(dd.orders(), m.orders());
        prop_assert_eq!(m.dual().log_card(), m.log_card());
        let r = m.field.r as u64;
        prop_assert_eq!(m.log_card(), m.orders().iter().map(|&e| e as u64 * r).sum::<u64>());
    }

    #[test]
    fn chern_polynomial_is_multiplicative((a, _s) in module_case(), b_raw in prop::collection::vec(0u32..3, 1..=2)) {
        let b = TorsionModule::new(a.field, a.m, b_raw.into_iter().map(|w| w % a.m).collect()).unwrap();
        let (t, _) = tense_product(&a, &b, a.m);
        prop_assert_eq!(chern(&t), chern(&a).mul_trunc(&chern(&b)));
        prop_assert_eq!(valuation(&t), clamp_add(valuation(&a), valuation(&b), a.m));
    }

    #[test]
    fn clamp_add_is_commutative_and_bounded(a in -6i32..=0, b in -6i32..=0, n in 1u32..=6) {
        let c = clamp_add(a, b, n);
        prop_assert_eq!(c, clamp_add(b, a, n));
        prop_assert!(c <= 0 && c >= -(n as i32));
    }

    #[test]
    fn gaussian_binomials_are_symmetric_and_one_mod_p(qi in 0..4usize, d in 0usize..=5, k in 0usize..=5) {
        let q = [2u64, 3, 4, 5][qi];
        let k = k.min(d);
        let g = gaussian_binomial(q, k, d);
        prop_assert_eq!(g, gaussian_binomial(q, d - k, d));
        let p = if q == 4 { 2 } else { q };
        prop_assert_eq!(g % p, 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Transfer laws are homogeneous: T(t v) = t^N T(v) over F_4.
    #[test]
    fn transfer_laws_are_homogeneous(gen in prop::collection::vec(0u64..2, 3), pt in prop::collection::vec(0u64..4, 3), t in 1u64..4) {
        prop_assume!(gen.iter().any(|&g| g != 0));
        let f2 = FieldSpec::prime(2);
        let k = f2.field();
        let w = Subspace::new(f2, 3, &[gen.iter().map(|&g| k.from_int(g as i64)).collect()]);
        let law = Laws::new(f2).transfer_law(&w).unwrap();
        let f4 = FieldSpec::new(2, 2).unwrap();
        let big = f4.field();
        let v: Vec<Gr> = pt.iter().map(|&i| big.from_index(i)).collect();
        let t = big.from_index(t);
        let tv: Vec<Gr> = v.iter().map(|&x| big.mul(t, x)).collect();
        let scale = big.pow(t, law.degree);
        let lhs = law.eval(f4, &tv).unwrap();
        let rhs: Vec<Gr> = law.eval(f4, &v).unwrap().into_iter().map(|x| big.mul(scale, x)).collect();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn reports_depend_only_on_the_seed(seed in any::<u64>(), jobs in 2usize..=4) {
        let one = run("tense", &SuiteOptions { seed, jobs: 1, ..Default::default() }).unwrap();
        let many = run("tense", &SuiteOptions { seed, jobs, ..Default::default() }).unwrap();
        prop_assert_eq!(one.to_json_lines(), many.to_json_lines());
    }
}
