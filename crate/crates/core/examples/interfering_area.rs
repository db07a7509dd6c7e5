//! Interfering area of one BS against the analytic disk, and of two BSs
//! whose coverage overlaps.

use std::f64::consts::PI;

use dmimo::channel::PathLossModel;
use dmimo::metrics::{interfering_area, AreaGrid};

fn main() -> dmimo::Result<()> {
    let model = PathLossModel::reference();
    let grid = AreaGrid::new(1.0, 0.25)?;
    let r = model.range_for(4.0, 1.0);
    let a = interfering_area(&[[0.0, 0.0]], &[4.0], &model, &grid);
    println!(
        "one BS, P = 4: radius {r:.2} m, disk {:.0} m^2, grid {a:.0} m^2",
        PI * r * r
    );
    for sep in [0.0, 50.0, 100.0, 200.0] {
        let a = interfering_area(&[[0.0, 0.0], [sep, 0.0]], &[2.0, 2.0], &model, &grid);
        println!("two BSs, P = 2 each, {sep:>5} m apart: {a:.0} m^2");
    }
    Ok(())
}
