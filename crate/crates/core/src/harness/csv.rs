use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;
use crate::qos::QoSSpec;

use super::config::SweepAxis;
use super::run::RunResult;

/// `scheme,axis,axis_value,avg_bs_usage,avg_interfering_area_m2,residual_user_1..K,effcap_user_1..K,converged,frames,seed`
pub fn csv_header(users: usize) -> String {
    let mut h = String::from("scheme,axis,axis_value,avg_bs_usage,avg_interfering_area_m2");
    for n in 1..=users {
        write!(h, ",residual_user_{n}").unwrap();
    }
    for n in 1..=users {
        write!(h, ",effcap_user_{n}").unwrap();
    }
    h.push_str(",converged,frames,seed");
    h
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One row; effective capacities in kbit/s. Infeasible runs leave every
/// metric empty.
pub fn csv_row(
    result: &RunResult,
    axis: Option<(SweepAxis, f64)>,
    users: usize,
    frame_s: f64,
) -> String {
    let (name, value) = axis.map_or(("none".to_string(), String::new()), |(a, v)| {
        (a.name().to_string(), v.to_string())
    });
    let mut row = format!(
        "{},{},{},{},{}",
        result.scheme,
        name,
        value,
        opt(result.avg_bs_usage),
        opt(result.avg_interfering_area)
    );
    for n in 0..users {
        write!(row, ",{}", opt(result.residuals.get(n).copied())).unwrap();
    }
    for n in 0..users {
        let kbps = result
            .effective_capacity
            .get(n)
            .map(|c| c / (std::f64::consts::LN_2 * frame_s) / 1e3);
        write!(row, ",{}", opt(kbps)).unwrap();
    }
    write!(
        row,
        ",{},{},{}",
        result.converged && result.is_feasible(),
        result.frames,
        result.seed
    )
    .unwrap();
    row
}

pub fn write_csv<W: Write>(
    out: &mut W,
    results: &[RunResult],
    axis: Option<(SweepAxis, &[f64])>,
    qos: &[QoSSpec],
    frame_s: f64,
) -> Result<()> {
    writeln!(out, "{}", csv_header(qos.len()))?;
    for (i, r) in results.iter().enumerate() {
        let a = axis.map(|(ax, vals)| (ax, vals[i]));
        writeln!(out, "{}", csv_row(r, a, qos.len(), frame_s))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        assert_eq!(
            csv_header(2),
            "scheme,axis,axis_value,avg_bs_usage,avg_interfering_area_m2,residual_user_1,residual_user_2,effcap_user_1,effcap_user_2,converged,frames,seed"
        );
    }
}
