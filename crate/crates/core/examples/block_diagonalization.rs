//! Block-diagonalization precoders for three users on six BSs, and the
//! multiplier-weighted power split across users.

use dmimo::channel::{builtin_scenario, BuiltinScenario, ChannelModel, PathLossModel};
use dmimo::multi::{bd_precoders, solve_zeta, BdUser};

fn main() -> dmimo::Result<()> {
    let dep = builtin_scenario(BuiltinScenario::MultiUser, 2, 2);
    let model = ChannelModel::new(dep, PathLossModel::reference())?;
    let state = model.draw(5, 0);
    let subset = [0, 1, 2, 3, 4, 5];
    let channels: Vec<_> = (0..state.num_users())
        .map(|n| state.user_channel(n, &subset))
        .collect();
    let decomp = bd_precoders(&channels)?;

    for (n, d) in decomp.iter().enumerate() {
        let leak: f64 = match &d.precoder {
            Some(v) => (0..channels.len())
                .filter(|&j| j != n)
                .map(|j| {
                    channels[j]
                        .matmul(v)
                        .map(|m| m.frobenius_norm())
                        .unwrap_or(f64::NAN)
                })
                .fold(0.0, f64::max),
            None => 0.0,
        };
        println!(
            "user {n}: rank {}, gains {:.3?}, leakage {leak:.1e}",
            d.rank(),
            d.gains
        );
    }

    let thetas = [2.2e-3, 2.2e-3, 2.8e-3];
    let lambdas = [50.0, 50.0, 80.0];
    let users: Vec<BdUser> = decomp
        .iter()
        .zip(thetas.iter().zip(&lambdas))
        .map(|(d, (&theta, &lambda))| BdUser {
            gains: &d.gains,
            theta,
            lambda,
        })
        .collect();
    let sol = solve_zeta(&users, 4.0 + 1.2 * 5.0, 1000.0).expect("some user is eligible");
    println!("zeta = {:.4e}", sol.zeta);
    for (n, u) in sol.users.iter().enumerate() {
        println!(
            "user {n}: power {:.3}, rate {:.1} nats/frame",
            u.power, u.rate
        );
    }
    Ok(())
}
