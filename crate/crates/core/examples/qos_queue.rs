//! QoS exponent of a delay requirement, then a queue driven by i.i.d. on/off
//! service that meets it with equality.

use dmimo::qos::{effective_capacity, qos_exponent, simulate_queue};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> dmimo::Result<()> {
    let arrival = 1.0;
    let delay_bound = 20.0;
    let xi = 1e-3;
    let theta = qos_exponent(arrival, delay_bound, xi)?;
    println!("theta = {theta:.5} per nat");

    // Service 2 w.p. p, 0 otherwise; pick p so that E{e^{-θR}} = e^{-θC}.
    let target = (-theta * arrival).exp();
    let p = (1.0 - target) / (1.0 - (-2.0 * theta).exp());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let service: Vec<f64> = (0..1_000_000)
        .map(|_| if rng.random_bool(p) { 2.0 } else { 0.0 })
        .collect();

    println!(
        "effective capacity {:.4} (arrival {arrival})",
        effective_capacity(&service, theta)?
    );
    let rep = simulate_queue(arrival, &service, delay_bound)?;
    println!(
        "Pr{{D > D_th}} = {:.2e} (xi = {xi:.0e}), tail decay {:?}",
        rep.violation_probability, rep.tail_decay
    );
    Ok(())
}
