//! Coarse ASCII security map over (mu, eta_L) with the small-eta_B critical
//! line for comparison.
//!
//!     cargo run --release --example security_map -- 0.001

use usd_attack::click::DetectorParams;
use usd_attack::region::{security_map, Axis, CriteriaMode, CriticalEta, Verdict};

fn main() -> usd_attack::Result<()> {
    let eta_b: f64 = std::env::args()
        .nth(1)
        .map_or(1e-3, |a| a.parse().expect("numeric eta_B"));
    let etas = Axis::log(1e-4, 1.0, 48);
    let map = security_map(
        &Axis::linear(0.2, 5.0, 25),
        &etas,
        DetectorParams::new(eta_b)?,
        CriteriaMode::Geometric,
    )?;
    let width = etas.steps;

    println!("eta_B = {eta_b}; '#' insecure, '.' secure, '?' indeterminate; eta_L from 1e-4 (left) to 1 (right)");
    for (row, b) in map.cells.chunks(width).zip(&map.boundaries) {
        let line: String = row
            .iter()
            .map(|c| match c.verdict.verdict {
                Verdict::InsecureUnderUsd => '#',
                Verdict::SecureAgainstUsd => '.',
                Verdict::Indeterminate => '?',
            })
            .collect();
        let crit = match b.critical {
            CriticalEta::Bound { exact, .. } => format!("{exact:.4}"),
            CriticalEta::BeyondBranchPoint { .. } => "beyond".into(),
        };
        println!("mu {:>4.2} {line}  crit {crit}", b.mu);
    }
    Ok(())
}
