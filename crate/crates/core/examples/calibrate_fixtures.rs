//! Regenerates the checked-in calibration fixtures:
//! `cargo run --release -p lattice-harmonics --example calibrate_fixtures`

use lattice_harmonics::verify;

fn main() {
    let seed = 42;
    let cases = 2000;
    let safety = 1.2;
    let fixtures = verify::calibrate_all(cases, safety, seed).expect("calibration");
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/calibration.json");
    std::fs::write(path, fixtures.to_json()).expect("write fixtures");
    println!("wrote {} constants to {path}", fixtures.constants.len());
}
