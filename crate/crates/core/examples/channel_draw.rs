//! Draw fading states on the built-in single-user geometry and report the
//! per-BS aggregate gains next to their path-loss means.

use dmimo::channel::{builtin_scenario, BuiltinScenario, ChannelModel, PathLossModel};

fn main() -> dmimo::Result<()> {
    let dep = builtin_scenario(BuiltinScenario::SingleUser, 2, 2);
    let model = ChannelModel::new(dep.clone(), PathLossModel::reference())?;
    let frames = 2000;
    let mut sums = vec![0.0; dep.num_bs()];
    for f in 0..frames {
        let state = model.draw(7, f);
        for (s, g) in sums.iter_mut().zip(state.aggregate_gains(0)) {
            *s += g;
        }
    }
    println!("bs  distance_m  mean_gain  avg_aggregate_gain_per_entry");
    for (m, sum) in sums.iter().enumerate() {
        let entries = (dep.bs_antennas[m] * dep.user_antennas[0]) as f64;
        println!(
            "{m:>2}  {:>10.2}  {:>9.3}  {:>9.3}",
            dep.distance(0, m),
            model.mean_gain(0, m),
            sum / frames as f64 / entries
        );
    }
    Ok(())
}
