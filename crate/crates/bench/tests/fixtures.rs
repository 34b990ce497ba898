use drb_bench::{constants, z_sqrt_m2};
use drb_core::cocycle::phi;
use drb_core::{mp, Mat2};

#[test]
fn fixtures_agree_across_precisions() {
    let o = z_sqrt_m2();
    assert_eq!(o.field_disc(), -8);
    let m = Mat2::new(o.one(), o.zero(), o.elem(3, 1), o.one());
    let lo = phi(&m, &constants(128)).unwrap().value;
    let hi = phi(&m, &constants(256)).unwrap().value;
    assert!(mp::mag_f64(&lo) > 1e-3);
    assert!(mp::dist(&lo, &hi) < 1e-35);
}
