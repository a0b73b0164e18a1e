//! Simulates the link with and without a USD attacker and compares the click
//! frequencies with the analytic prediction.
//!
//!     cargo run --release --example monte_carlo -- 2000000

use usd_attack::click::{ChannelParams, DetectorParams, ResendDistribution};
use usd_attack::sim::{run_simulation, EveStrategy, SimConfig};
use usd_attack::usd::MeanPhotonNumber;

fn main() -> usd_attack::Result<()> {
    let trials: u64 = std::env::args()
        .nth(1)
        .map_or(1_000_000, |a| a.parse().expect("trial count"));
    let strategies = [
        ("no eve", EveStrategy::None),
        (
            "usd, resend 2",
            EveStrategy::usd(ResendDistribution::point_mass(2), 1.0)?,
        ),
        (
            "usd half-time",
            EveStrategy::usd(ResendDistribution::point_mass(2), 0.5)?,
        ),
        (
            "usd, poisson resend",
            EveStrategy::usd(ResendDistribution::poisson(1.5, 1e-14)?, 1.0)?,
        ),
    ];
    for (label, eve) in strategies {
        let config = SimConfig {
            mu: MeanPhotonNumber::new(4.0)?,
            ch: ChannelParams::new(0.1)?,
            det: DetectorParams::new(0.5)?,
            eve,
            trials,
            seed: 2024,
        };
        let r = run_simulation(&config)?;
        println!(
            "{label:<20} single {:.5} +/- {:.5} (pred {:.5}, z {:+.2})   double {:.6} +/- {:.6} (pred {:.6}, z {:+.2})",
            r.est.p_single,
            r.ci95.p_single,
            r.predicted.point.p_single,
            r.z_scores.p_single,
            r.est.p_double,
            r.ci95.p_double,
            r.predicted.point.p_double,
            r.z_scores.p_double,
        );
    }
    Ok(())
}
