//! Nested BS subsets chosen by the incremental, ordered-gain and exhaustive
//! rules on one fading state.

use dmimo::channel::{builtin_scenario, BuiltinScenario, ChannelModel, PathLossModel};
use dmimo::metrics::PowerPolicy;
use dmimo::single::{exhaustive_chain, incremental_chain, ordered_gain_chain};

fn main() -> dmimo::Result<()> {
    let dep = builtin_scenario(BuiltinScenario::SingleUser, 2, 2);
    let model = ChannelModel::new(dep, PathLossModel::reference())?;
    let power = PowerPolicy::new(4.0, 2.4)?;
    let state = model.draw(1, 0);
    let chains = [
        ("incremental", incremental_chain(&state, 0, &power, 1000.0)?),
        (
            "ordered-gain",
            ordered_gain_chain(&state, 0, &power, 1000.0)?,
        ),
        ("exhaustive", exhaustive_chain(&state, 0, &power, 1000.0)?),
    ];
    for (name, chain) in &chains {
        println!("{name}");
        for (l, s) in chain.iter().enumerate() {
            println!("  L = {l}: {:?} -> {:.1} nats/frame", s.subset, s.rate);
        }
    }
    Ok(())
}
