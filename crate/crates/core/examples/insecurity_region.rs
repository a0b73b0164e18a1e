//! Builds the insecurity polygon and classifies a few working points in both
//! criteria modes.

use usd_attack::click::{ChannelParams, DetectorParams};
use usd_attack::region::{build_insecurity_polygon, classify, CriteriaMode, CRITERIA_MODEL};
use usd_attack::usd::{usd_probability, MeanPhotonNumber};

fn main() -> usd_attack::Result<()> {
    let det = DetectorParams::new(0.5)?;
    let p_d = usd_probability(MeanPhotonNumber::new(4.0)?, CRITERIA_MODEL);
    let poly = build_insecurity_polygon(det, p_d, 1e-9)?;
    println!(
        "mu = 4, eta_B = 0.5: {} vertices (N up to {}), convex: {}",
        poly.vertices().len(),
        poly.n_max(),
        poly.is_convex()
    );
    for v in poly.vertices().iter().take(5) {
        println!("  ({:.6}, {:.6})", v.p_single, v.p_double);
    }
    println!("  ...");

    println!(
        "\n{:>5} {:>6} {:>6}  {:>10} {:>10}  {:>11}",
        "mu", "eta_L", "eta_B", "geometric", "paper", "F"
    );
    for (m, l, b) in [
        (1.0, 0.1, 0.5),
        (4.0, 0.1, 0.5),
        (1.0, 0.9, 0.9),
        (20.0, 0.1, 0.5),
        (0.3, 0.002, 0.9),
    ] {
        let mu = MeanPhotonNumber::new(m)?;
        let (ch, det) = (ChannelParams::new(l)?, DetectorParams::new(b)?);
        let g = classify(mu, ch, det, CriteriaMode::Geometric)?;
        let p = classify(mu, ch, det, CriteriaMode::PaperLinearized)?;
        println!(
            "{m:>5} {l:>6} {b:>6}  {:>10} {:>10}  {:>11.3e}",
            g.verdict.as_str(),
            p.verdict.as_str(),
            g.f
        );
    }
    Ok(())
}
