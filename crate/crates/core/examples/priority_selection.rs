//! User priorities from full-cooperation effective capacities, then the
//! round-robin BS subsets they induce next to uniform random subsets.

use dmimo::channel::{builtin_scenario, BuiltinScenario, ChannelModel, PathLossModel};
use dmimo::metrics::PowerPolicy;
use dmimo::multi::{full_cooperation_rates, priority_chain, priority_order, semi_random_select};
use dmimo::qos::QoSSpec;

fn main() -> dmimo::Result<()> {
    let dep = builtin_scenario(BuiltinScenario::MultiUser, 2, 2);
    let model = ChannelModel::new(dep, PathLossModel::reference())?;
    let power = PowerPolicy::new(4.0, 1.2)?;
    let qos = vec![
        QoSSpec::from_physical(400e3, 0.05, 1e-4, 0.01)?,
        QoSSpec::from_physical(400e3, 0.05, 1e-4, 0.01)?,
        QoSSpec::from_physical(400e3, 0.04, 1e-4, 0.01)?,
    ];
    let rates: Vec<Vec<f64>> = (0..2000)
        .map(|f| full_cooperation_rates(&model.draw(1, f), &power, 1000.0))
        .collect::<dmimo::Result<_>>()?;
    let order = priority_order(&rates, &qos)?;
    println!(
        "C_max {:.1?}, fraction {:.3?}, order {:?}",
        order.c_max, order.fraction, order.order
    );

    let state = model.draw(1, 5000);
    let gains: Vec<Vec<f64>> = (0..state.num_users())
        .map(|n| state.aggregate_gains(n))
        .collect();
    for (l, subset) in priority_chain(&gains, &order.order).iter().enumerate() {
        println!(
            "L = {l}: priority {subset:?}, semi-random {:?}",
            semi_random_select(6, l, 9, 5000)
        );
    }
    Ok(())
}
