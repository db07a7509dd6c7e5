//! Concave envelope of a rate-versus-L curve and the optimal fractional BS
//! usage as the multiplier grows.

use dmimo::single::{rate_envelope, theorem1_usage, usage_to_alpha};

fn main() -> dmimo::Result<()> {
    let rates = [0.0, 900.0, 1300.0, 1400.0, 1750.0, 1800.0];
    let env = rate_envelope(&rates)?;
    println!("hull vertices {:?}, slopes {:?}", env.vertices, env.slopes);
    let theta = 2e-3;
    for lambda in [1.0, 10.0, 100.0, 1e3, 1e4, 1e5] {
        let usage = theorem1_usage(&env, theta, lambda);
        let alpha = usage_to_alpha(&env, usage)?;
        println!(
            "lambda {lambda:>8}: usage {usage:.4}, rate {:.1}, alpha {alpha:.3?}",
            env.value(usage)
        );
    }
    Ok(())
}
