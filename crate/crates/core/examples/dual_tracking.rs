//! Track the QoS multiplier of the time-sharing scheme on training frames
//! and check the constraint on fresh frames.

use dmimo::channel::{builtin_scenario, BuiltinScenario, ChannelModel, PathLossModel};
use dmimo::dual::{mean_residuals, track, TrackerConfig};
use dmimo::metrics::PowerPolicy;
use dmimo::qos::QoSSpec;
use dmimo::scheme::{prepare_frames, PolicyProblem};
use dmimo::single::{SingleScheme, SingleUserPolicy};

fn main() -> dmimo::Result<()> {
    let dep = builtin_scenario(BuiltinScenario::SingleUser, 2, 2);
    let model = ChannelModel::new(dep.clone(), PathLossModel::reference())?;
    let qos = vec![QoSSpec::from_physical(800e3, 0.05, 1e-4, 0.01)?];
    let policy = SingleUserPolicy::new(
        SingleScheme::IbsTs,
        qos[0],
        PowerPolicy::new(4.0, 2.4)?,
        1000.0,
        dep,
    )?;

    let train = prepare_frames(&policy, &model, 1, 0, 3000)?;
    let report = track(
        &PolicyProblem {
            policy: &policy,
            frames: &train,
            qos: &qos,
        },
        &TrackerConfig::default(),
    )?;
    println!(
        "lambda {:.3e} after {} iterations, training residual {:.2e}, converged {}",
        report.lambda[0], report.iterations, report.residuals[0], report.converged
    );

    let test = prepare_frames(&policy, &model, 1, 3000, 3000)?;
    let held_out = mean_residuals(
        &PolicyProblem {
            policy: &policy,
            frames: &test,
            qos: &qos,
        },
        &report.lambda,
    );
    println!("held-out residual {:.2e}", held_out[0]);
    Ok(())
}
