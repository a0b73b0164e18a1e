//! The beamsplitting gain stays positive where the USD attack already breaks
//! the link.

use usd_attack::attacks::{compare_attacks, two_photon_split};
use usd_attack::click::{ChannelParams, DetectorParams};
use usd_attack::usd::MeanPhotonNumber;

fn main() -> usd_attack::Result<()> {
    let det = DetectorParams::new(0.5)?;
    println!(
        "{:>4} {:>6}  {:>10} {:>10}  {:>9}",
        "mu", "eta_L", "G_BS", "USD", "crossover"
    );
    for m in [0.5, 1.0, 4.0] {
        for l in [0.01, 0.1, 0.5] {
            let c = compare_attacks(MeanPhotonNumber::new(m)?, ChannelParams::new(l)?, det)?;
            let crossover = c.crossover_eta.map_or("-".to_string(), |x| format!("{x:.4}"));
            println!(
                "{m:>4} {l:>6}  {:>10.3e} {:>10}  {crossover:>9}",
                c.beamsplit.g_bs,
                c.usd_verdict.verdict.as_str()
            );
        }
    }
    let (p02, p11, p20) = two_photon_split(0.5)?;
    println!("\ntwo photons through eta = 0.5: p(0,2) = {p02}, p(1,1) = {p11}, p(2,0) = {p20}");
    Ok(())
}
