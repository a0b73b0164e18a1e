//! Where the honest link and the USD attacker sit in the
//! (single-click, double-click) plane.

use usd_attack::click::{
    mixture_point, n_curve_y, number_state_point, working_curve_y, working_point, ChannelParams, DetectorParams,
    ResendDistribution,
};
use usd_attack::usd::{usd_probability, MeanPhotonNumber, SourceModel};

fn main() -> usd_attack::Result<()> {
    let mu = MeanPhotonNumber::new(2.07)?;
    let ch = ChannelParams::new(0.1)?;
    let det = DetectorParams::new(0.5)?;
    let p_d = usd_probability(mu, SourceModel::PhaseAveragedFock);

    let w = working_point(mu, ch, det);
    println!("working point      ({:.6}, {:.7})", w.p_single, w.p_double);
    println!("  on W-curve       y(x) = {:.7}", working_curve_y(w.p_single)?);
    println!("P_D                {:.6}   kappa = {:.6}", p_d.get(), det.kappa());

    println!("\nnumber-state resend points:");
    for n in 0..=6 {
        let v = number_state_point(n, det, p_d);
        println!(
            "  N={n}  ({:.6}, {:.6})  N-curve {:.6}",
            v.p_single,
            v.p_double,
            n_curve_y(v.p_single, det, p_d)?
        );
    }

    let mix = ResendDistribution::new([(1, 0.6), (3, 0.4)])?;
    let m = mixture_point(&mix, det, p_d);
    println!("\n0.6 N=1 + 0.4 N=3   ({:.6}, {:.6})", m.p_single, m.p_double);
    Ok(())
}
