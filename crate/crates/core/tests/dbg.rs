use qpb_core::bundle::*;
use qpb_core::group::FiniteGroup;

#[test]
fn construction_steps() {
    let q = regular_bundle(FiniteGroup::cyclic(2)).unwrap();
    match finite_bundle_universal(q, 2) {
        Ok(_) => println!("construction ok"),
        Err(e) => println!("construction err: {e}"),
    }
}
