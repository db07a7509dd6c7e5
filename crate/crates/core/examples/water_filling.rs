//! Water-filling capacity of a fixed 2x3 channel at a few power levels.

use dmimo::linalg::{eigenmode_gains, mimo_capacity, water_fill, ComplexMatrix};

fn main() -> dmimo::Result<()> {
    let h = ComplexMatrix::from_real_rows(&[vec![1.0, 0.4, 0.0], vec![0.2, 0.9, 0.5]])?;
    let bt = 1000.0;
    let gains = eigenmode_gains(&h)?;
    println!("eigenmode gains: {gains:?}");
    for power in [0.1, 1.0, 10.0] {
        let wf = water_fill(&gains, power, bt)?;
        let c = mimo_capacity(&h, power, bt)?;
        println!(
            "P = {power:>5}: level {:.4}, powers {:?}, active {}, capacity {:.2} nats/frame",
            wf.water_level, wf.powers, wf.active, c
        );
    }
    Ok(())
}
