use hermite_lbm::collision::RelaxationSpec;
use hermite_lbm::solver::{GasSpec, LatticeState};
use hermite_lbm::velset::d2q37;
use std::time::Instant;

fn main() {
    let set = d2q37().unwrap();
    let mut state = LatticeState::from_fields(
        &[100, 100], set, GasSpec::monatomic(2), 4,
        |cell| {
            let phase = 2.0 * std::f64::consts::PI * cell[0] as f64 / 100.0;
            (1.0, vec![0.0, 1e-5 * phase.cos()], 1.0)
        },
    ).unwrap();
    let spec = RelaxationSpec::new(0.8, 1.1, 0.9, 1.2, 0.7, 1.3, 0.6).unwrap();
    // warm
    for _ in 0..5 { state.step(&spec, None).unwrap(); }
    let t0 = Instant::now();
    let n = 100;
    for _ in 0..n { state.step(&spec, None).unwrap(); }
    let dt = t0.elapsed().as_secs_f64();
    println!("D2Q37 100x100 N=4: {:.2} ms/step ({:.0} ns/site)", dt / n as f64 * 1e3, dt / n as f64 / 1e4 * 1e9);

    // with internal energy
    let set = d2q37().unwrap();
    let mut state = LatticeState::from_fields(
        &[100, 100], set, GasSpec::with_internal(2, 3), 4,
        |_| (1.0, vec![0.0, 0.0], 1.0),
    ).unwrap();
    for _ in 0..5 { state.step(&spec, None).unwrap(); }
    let t0 = Instant::now();
    for _ in 0..n { state.step(&spec, None).unwrap(); }
    let dt = t0.elapsed().as_secs_f64();
    println!("D2Q37 100x100 N=4 S=3: {:.2} ms/step", dt / n as f64 * 1e3);
}
