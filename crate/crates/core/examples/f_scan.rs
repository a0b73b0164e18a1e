//! The F criterion along mu at fixed losses, its root and the mu2 cut-off.

use usd_attack::click::{ChannelParams, DetectorParams};
use usd_attack::region::{f_criterion, f_root, mu2_threshold, necessary_threshold, small_etab_f, CRITERIA_MODEL};
use usd_attack::usd::MeanPhotonNumber;

fn main() -> usd_attack::Result<()> {
    let ch = ChannelParams::new(0.1)?;
    let det = DetectorParams::new(0.5)?;
    let mu2 = mu2_threshold(ch, det)?;
    let root = f_root(ch, det, 0.1, 13.0, 1e-12)?.expect("sign change");
    println!("eta_L = 0.1, eta_B = 0.5: mu2 = {mu2:.6}, F = 0 at mu = {root:.6}");

    println!("\n{:>6}  {:>12}  {:>12}", "mu", "F", "small-eta_B");
    for i in 0..=13 {
        let mu = MeanPhotonNumber::new(i as f64)?;
        println!(
            "{:>6}  {:>12.5e}  {:>12.5e}",
            i,
            f_criterion(mu, ch, det),
            small_etab_f(mu, ch, det)
        );
    }

    println!("\nnecessary condition on eta_L eta_B:");
    for m in [0.1, 1.0, 10.0, 100.0, 700.0] {
        println!(
            "  mu {m:>5}: {:.6}",
            necessary_threshold(MeanPhotonNumber::new(m)?, CRITERIA_MODEL)?
        );
    }
    Ok(())
}
