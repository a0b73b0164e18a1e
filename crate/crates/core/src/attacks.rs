//! Beamsplitting attack and its comparison with the USD attack.
//!
//! In the beamsplitting attack Eve replaces the lossy line by a lossless one
//! plus a beamsplitter of transmission `eta`, keeping the reflected photons.
//! Her success needs at least two photons, so it scales as `mu^2`, against
//! `mu^3` for USD. The gain estimate `G_BS` is nonetheless positive for every
//! `mu`, while the USD attack can break the same setup completely once the loss
//! is high enough.

use serde::Serialize;

use crate::click::{ChannelParams, DetectorParams};
use crate::error::{check_unit_interval, Result};
use crate::region::{classify, CriteriaMode, SecurityVerdict, Verdict, CRITERIA_MODEL};
use crate::usd::{usd_probability, DiscriminationProbability, MeanPhotonNumber};

/// Resolution of the crossover search over `eta_L`.
pub const CROSSOVER_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamsplitReport {
    /// Probability that Bob receives a signal.
    pub p_exp: f64,
    /// Joint probability that Bob receives a signal and Eve keeps a photon.
    pub p_split: f64,
    /// Secure key bits per signal, `(p_exp - p_split) / 2`.
    pub g_bs: f64,
}

/// `p_exp = 1 - e^{-eta mu}`, `p_split = p_exp (1 - e^{-(1-eta) mu})`,
/// `G_BS = e^{-(1-eta) mu} (1 - e^{-eta mu}) / 2`.
pub fn beamsplit_report(mu: MeanPhotonNumber, eta: f64) -> Result<BeamsplitReport> {
    let eta = check_unit_interval("eta", eta)?;
    let m = mu.get();
    let p_exp = -(-eta * m).exp_m1();
    let p_split = p_exp * -(-(1.0 - eta) * m).exp_m1();
    Ok(BeamsplitReport {
        p_exp,
        p_split,
        g_bs: 0.5 * (-(1.0 - eta) * m).exp() * p_exp,
    })
}

/// Photon split of a two-photon pulse: `(p(0,2), p(1,1), p(2,0))`, where the
/// first index counts photons reaching Bob.
pub fn two_photon_split(eta: f64) -> Result<(f64, f64, f64)> {
    let eta = check_unit_interval("eta", eta)?;
    let lost = 1.0 - eta;
    Ok((lost * lost, 2.0 * eta * lost, eta * eta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttackComparison {
    /// Evaluated at the total transmission `eta_L eta_B`.
    pub beamsplit: BeamsplitReport,
    pub usd_verdict: SecurityVerdict,
    pub usd_p_d: DiscriminationProbability,
    /// Largest `eta_L` at which the USD attack still breaks the system at
    /// this `(mu, eta_B)`; present only when the system is USD-insecure and
    /// becomes secure before `eta_L = 1`.
    pub crossover_eta: Option<f64>,
}

pub fn compare_attacks(mu: MeanPhotonNumber, ch: ChannelParams, det: DetectorParams) -> Result<AttackComparison> {
    let beamsplit = beamsplit_report(mu, ch.eta_l() * det.eta_b())?;
    let usd_verdict = classify(mu, ch, det, CriteriaMode::Geometric)?;
    let crossover_eta = if usd_verdict.verdict == Verdict::InsecureUnderUsd {
        crossover_eta_l(mu, ch.eta_l(), det)?
    } else {
        None
    };
    Ok(AttackComparison {
        beamsplit,
        usd_verdict,
        usd_p_d: usd_probability(mu, CRITERIA_MODEL),
        crossover_eta,
    })
}

// Bisection between an insecure eta_L and eta_L = 1.
fn crossover_eta_l(mu: MeanPhotonNumber, insecure_at: f64, det: DetectorParams) -> Result<Option<f64>> {
    let insecure = |eta_l: f64| -> Result<bool> {
        let v = classify(mu, ChannelParams::new(eta_l)?, det, CriteriaMode::Geometric)?;
        Ok(v.verdict == Verdict::InsecureUnderUsd)
    };
    if insecure(1.0)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (insecure_at, 1.0);
    while hi - lo > CROSSOVER_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if insecure(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu(v: f64) -> MeanPhotonNumber {
        MeanPhotonNumber::new(v).unwrap()
    }

    #[test]
    fn beamsplit_values() {
        let r = beamsplit_report(mu(0.0), 0.5).unwrap();
        assert_eq!((r.p_exp, r.p_split, r.g_bs), (0.0, 0.0, 0.0));

        let r = beamsplit_report(mu(1.0), 0.5).unwrap();
        assert!((r.p_exp - 0.393_469_340_287_366_6).abs() < 1e-15);
        assert!((r.p_split - 0.154_818_121_746_175_5).abs() < 1e-15);
        assert!((r.g_bs - 0.119_325_609_270_595_6).abs() < 1e-15);
        assert!((r.g_bs - 0.5 * (r.p_exp - r.p_split)).abs() < 1e-12);

        let full = beamsplit_report(mu(2.0), 1.0).unwrap();
        assert_eq!(full.p_split, 0.0);
        assert_eq!(full.g_bs, 0.5 * full.p_exp);

        assert!(beamsplit_report(mu(1.0), 1.5).is_err());
    }

    #[test]
    fn two_photon() {
        assert_eq!(two_photon_split(0.5).unwrap(), (0.25, 0.5, 0.25));
        assert_eq!(two_photon_split(0.0).unwrap(), (1.0, 0.0, 0.0));
        let (a, b, c) = two_photon_split(0.3).unwrap();
        assert!((a + b + c - 1.0).abs() < 1e-15);
        assert!(two_photon_split(-0.1).is_err());
    }

    #[test]
    fn headline_inconsistency() {
        let c = compare_attacks(
            mu(4.0),
            ChannelParams::new(0.1).unwrap(),
            DetectorParams::new(0.5).unwrap(),
        )
        .unwrap();
        assert!(c.beamsplit.g_bs > 0.0);
        assert!((c.beamsplit.g_bs - 0.002_027_566_483_715_708).abs() < 1e-15);
        assert_eq!(c.usd_verdict.verdict, Verdict::InsecureUnderUsd);
        let x = c.crossover_eta.expect("crossover exists");
        assert!(x > 0.1 && x < 1.0, "{x}");
    }

    #[test]
    fn secure_at_high_transmission() {
        let c = compare_attacks(
            mu(1.0),
            ChannelParams::new(0.9).unwrap(),
            DetectorParams::new(1.0).unwrap(),
        )
        .unwrap();
        assert!(c.beamsplit.g_bs > 0.0);
        assert_eq!(c.usd_verdict.verdict, Verdict::SecureAgainstUsd);
        assert_eq!(c.crossover_eta, None);
    }
}
