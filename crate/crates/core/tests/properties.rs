use std::sync::LazyLock;

use drb_core::eisenstein::lattice_point_f64;
use drb_core::mp;
use drb_core::quadfield::{Gamma0Sampler, Residues};
use drb_core::relation::find_relation;
use drb_core::{Lattice, LatticeConstants, Level, OrderSpec, QuadInt};
use proptest::prelude::*;
use rug::{Complex, Float};

/// Norm-Euclidean discriminants other than −3 and −4.
const DISCS: [i64; 3] = [-7, -8, -11];

static LC: LazyLock<LatticeConstants> =
    LazyLock::new(|| LatticeConstants::new(&Lattice::standard(OrderSpec::maximal(-8).unwrap(), 128)).unwrap());

fn order() -> impl Strategy<Value = OrderSpec> {
    prop::sample::select(DISCS.to_vec()).prop_map(|d| OrderSpec::maximal(d).unwrap())
}

fn elem(o: OrderSpec, r: i64) -> impl Strategy<Value = QuadInt> {
    (-r..=r, -r..=r).prop_map(move |(x, y)| o.elem(x, y))
}

fn triple() -> impl Strategy<Value = (QuadInt, QuadInt, QuadInt)> {
    order().prop_flat_map(|o| (elem(o, 60), elem(o, 60), elem(o, 60)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ring_axioms((a, b, c) in triple()) {
        prop_assert_eq!((a * b) * c, a * (b * c));
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!((a * b).norm(), a.norm() * b.norm());
        prop_assert_eq!((a * b).conj(), a.conj() * b.conj());
        prop_assert_eq!(a + a.conj(), a.order().elem(a.trace(), 0));
    }

    #[test]
    fn euclidean_division((a, b, _) in triple()) {
        prop_assume!(!b.is_zero());
        let (q, r) = a.div_rem(&b).unwrap();
        prop_assert_eq!(q * b + r, a);
        prop_assert!(r.norm() < b.norm());
    }

    #[test]
    fn display_parses_back((a, _, _) in triple()) {
        let o = *a.order();
        prop_assert_eq!(o.parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn residues_are_a_transversal((c, x, m) in order().prop_flat_map(|o| (elem(o, 8), elem(o, 60), elem(o, 60)))) {
        prop_assume!(!c.is_zero());
        let res = Residues::new(&c).unwrap();
        prop_assert_eq!(res.len() as i64, c.norm());
        let i = res.index_of(&x);
        prop_assert_eq!(res.index_of(&(x + m * c)), i);
        prop_assert!(c.divides(&(x - res.reps()[i])).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_matrices_are_in_gamma0(d in prop::sample::select(DISCS.to_vec()), seed in any::<u64>(), h in 12i64..60) {
        let o = OrderSpec::maximal(d).unwrap();
        let lev = Level::new(o.sqrt_neg_d()).unwrap();
        let mut s = Gamma0Sampler::new(o, Some(lev), h.max(2 * lev.n.norm()), seed);
        let a = s.sample().unwrap();
        let b = s.sample().unwrap();
        prop_assert!(a.is_sl2() && a.in_gamma0(&lev));
        prop_assert!((a * b).is_sl2() && (a * b).in_gamma0(&lev));
        prop_assert_eq!(a.conj_by_reflection().conj_by_reflection(), a);
        prop_assert!((a.conj_by_reflection() * b.conj_by_reflection()) == (a * b).conj_by_reflection());
        let sm = a.smear(&lev).unwrap();
        prop_assert!(sm.is_sl2());
        prop_assert_eq!(a * a.inverse().unwrap(), drb_core::Mat2::identity(&o));
    }

    #[test]
    fn planted_relation_is_found(x in -1000i64..1000, y in -1000i64..1000) {
        // v = x + y·√−2 satisfies v − x·1 − y·√−2 = 0
        let p = 200;
        let w = Complex::with_val(p, (0, Float::with_val(p, 2).sqrt()));
        let v = Complex::with_val(p, &w * y) + x;
        let r = find_relation(&[v, Complex::with_val(p, 1), w], 150).unwrap();
        let c0 = r.coeffs[0];
        prop_assert_eq!(c0.abs(), 1);
        prop_assert_eq!(-r.coeffs[1] * c0, x);
        prop_assert_eq!(-r.coeffs[2] * c0, y);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn e1_is_odd_and_periodic(s in -0.49f64..0.49, t in -0.49f64..0.49, i in -3i64..3, j in -3i64..3) {
        let lc = &*LC;
        let lat = lc.lattice();
        prop_assume!(s.abs() + t.abs() > 1e-3);
        let x = lattice_point_f64(lat, s, t);
        let e = lc.e1(&x);
        let shifted = Complex::with_val(lc.working_prec(), &x + lat.point(&lat.order().elem(i, j)));
        prop_assert!(mp::dist(&lc.e1(&shifted), &e) < 1e-30 * (1.0 + mp::mag_f64(&e)));
        let neg = Complex::with_val(lc.working_prec(), -&x);
        prop_assert!(mp::dist(&lc.e1(&neg), &-e.clone()) < 1e-30 * (1.0 + mp::mag_f64(&e)));
        let e2 = lc.e2(&x);
        prop_assert!(mp::dist(&lc.e2(&neg), &e2) < 1e-30 * (1.0 + mp::mag_f64(&e2)));
    }
}
