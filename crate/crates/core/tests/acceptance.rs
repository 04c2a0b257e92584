//! Prints one line per acceptance criterion and fails on any unexpected FAIL.

use std::process::ExitCode;

use orlicz_core::acceptance::run_all;
use orlicz_core::duality::truncated_norm_sequence;
use orlicz_core::gallery::half_space;
use orlicz_core::{OrliczGenerator, SimpleFunction};

/// Criteria that cannot pass as stated; see the README.
const UNATTAINABLE: [u8; 1] = [10];

/// `‖(1, 2)‖` under the truncated indicator `n(u - 1)_+`: only the second atom
/// is active while the norm stays at or above 1 (`n >= 2`), both atoms below.
fn truncated_closed_form(n: f64) -> f64 {
    if n >= 2.0 {
        2.0 * n / (n + 2.0)
    } else {
        3.0 * n / (2.0 * n + 2.0)
    }
}

fn truncation_matches_closed_form() -> bool {
    let levels = [1.0, 10.0, 100.0, 1000.0];
    let seq = truncated_norm_sequence(
        &OrliczGenerator::indicator(1.0).unwrap(),
        &half_space(),
        &SimpleFunction::new(vec![1.0, 2.0]).unwrap(),
        &levels,
    )
    .unwrap();
    seq.values.iter().all(|&(n, x)| (x / truncated_closed_form(n) - 1.0).abs() <= 1e-9)
}

fn main() -> ExitCode {
    let outcomes = run_all();
    let mut ok = outcomes.len() == 12;
    for o in &outcomes {
        println!("{o}");
        if !o.pass && !UNATTAINABLE.contains(&o.id) {
            ok = false;
        }
    }
    let closed = truncation_matches_closed_form();
    println!("criterion 10 sequence matches the closed form: {closed}");
    ok &= closed;
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("{passed}/{} criteria pass", outcomes.len());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
