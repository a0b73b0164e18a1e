//! Optimal USD success probability for the four BB84 signal states.
//!
//! Prints the canonical coefficients, both source models and the
//! Gram-matrix route for a few mean photon numbers.
//!
//!     cargo run --example discrimination -- 0.1 1 4

use usd_attack::usd::{
    coherent_coefficients, coherent_overlap_matrix, fock_conditional_coefficients, symmetric_usd_from_overlaps,
    usd_probability, usd_probability_n, MeanPhotonNumber, SourceModel,
};

fn main() -> usd_attack::Result<()> {
    let mus: Vec<f64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric mu"))
        .collect();
    let mus = if mus.is_empty() { vec![0.1, 1.0, 2.07, 4.0] } else { mus };

    println!(
        "{:>6}  {:>26}  {:>10}  {:>10}  {:>10}",
        "mu", "|c_j|^2", "coherent", "fock", "via Gram"
    );
    for m in mus {
        let mu = MeanPhotonNumber::new(m)?;
        let c = coherent_coefficients(mu).squared();
        let gram = symmetric_usd_from_overlaps(&coherent_overlap_matrix(mu))?;
        println!(
            "{m:>6.3}  {:.4} {:.4} {:.4} {:.4}  {:>10.6}  {:>10.6}  {:>10.6}",
            c[0],
            c[1],
            c[2],
            c[3],
            usd_probability(mu, SourceModel::CoherentPure).get(),
            usd_probability(mu, SourceModel::PhaseAveragedFock).get(),
            gram.get(),
        );
    }

    println!("\nn-photon subspaces:");
    for n in 0..=8 {
        let c = fock_conditional_coefficients(n).squared();
        println!(
            "  n={n}  |c_j|^2 = [{:.3}, {:.3}, {:.3}, {:.3}]  P_D^(n) = {:.6}",
            c[0],
            c[1],
            c[2],
            c[3],
            usd_probability_n(n).get()
        );
    }
    Ok(())
}
