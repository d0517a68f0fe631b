use std::time::Instant;

use conetensor::ballcones::{certify_entangleable_semiquantum, verify_semiquantum};
use conetensor::repro::cube_cone;

#[test]
fn cube_against_four_by_four_psd() {
    let start = Instant::now();
    let cube = cube_cone();
    let cert = certify_entangleable_semiquantum(&cube, 4, 11).unwrap();
    assert!(verify_semiquantum(&cert, &cube, 4).unwrap());
    assert!(cert.pairing().unwrap() < conetensor::exactnum::rational::int(0));
    assert!(start.elapsed().as_secs() < 120);
}
