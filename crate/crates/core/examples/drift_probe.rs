use hermite_lbm::collision::RelaxationSpec;
use hermite_lbm::solver::{GasSpec, LatticeState};
use hermite_lbm::velset::d2q9;

fn main() {
    let dims = [8usize, 8];
    let mut noise = vec![0.0; 64];
    for (i, v) in noise.iter_mut().enumerate() {
        *v = 0.02 * ((i * 37 % 11) as f64 - 5.0) / 5.0;
    }
    let mut state = LatticeState::from_fields(
        &dims, d2q9(), GasSpec::monatomic(2), 2,
        |cell| {
            let site = cell[0] + 8 * cell[1];
            (1.0 + noise[site], vec![0.5 * noise[site], -0.3 * noise[site]], 1.0 + 0.5 * noise[site])
        },
    ).unwrap();
    let spec = RelaxationSpec::new(0.8, 1.1, 0.9, 1.2, 0.7, 1.3, 0.6).unwrap();
    let m0 = state.total_mass();
    let p0 = state.total_momentum();
    let e0 = state.total_energy();
    for step in 0..10_000 {
        state.step(&spec, None).unwrap();
        if (step + 1) % 2000 == 0 {
            println!(
                "step {}: dm={:.3e} dpx={:.3e} de={:.3e}",
                step + 1,
                (state.total_mass() - m0) / m0,
                (state.total_momentum()[0] - p0[0]) / m0,
                (state.total_energy() - e0) / e0
            );
        }
    }
}
