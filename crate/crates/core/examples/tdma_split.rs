//! Time shares for one-user-at-a-time service across a frame.

use dmimo::multi::{mode_objective, solve_delta, tdma_time_alloc};

fn main() {
    let rates = [800.0, 1200.0, 500.0];
    let thetas = [3e-3, 2e-3, 3e-3];
    for lambdas in [[1.0, 1.0, 1.0], [20.0, 5.0, 40.0], [500.0, 500.0, 500.0]] {
        match solve_delta(&rates, &thetas, &lambdas) {
            Some(delta) => {
                let t = tdma_time_alloc(&rates, &thetas, &lambdas, delta);
                let served: Vec<f64> = t.iter().zip(&rates).map(|(t, r)| t * r).collect();
                println!(
                    "lambda {lambdas:?}: delta {delta:.4}, shares {t:.4?}, sum {:.12}, objective {:.4}",
                    t.iter().sum::<f64>(),
                    mode_objective(1, &served, &thetas, &lambdas)
                );
            }
            None => println!("lambda {lambdas:?}: no user worth serving"),
        }
    }
}
