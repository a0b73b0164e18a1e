//! Monte Carlo simulation of the BB84 link with an optional USD eavesdropper.
//!
//! Each trial draws Alice's polarisation and a Poisson photon number, passes
//! the pulse through either the lossy line or Eve's discriminate-and-resend
//! station, then through Bob's basis choice, polarising beamsplitter and two
//! yes/no detectors of efficiency `eta_B`.
//!
//! Trials are grouped in fixed blocks of [`BLOCK_TRIALS`]; block `b` draws from
//! a ChaCha8 stream keyed by `(seed, b)`. Blocks are tallied in parallel and
//! the integer tallies summed, so a report depends only on the configuration,
//! never on the number of worker threads.

use rand::distr::weighted::WeightedIndex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::click::{mixture_point, working_point, ChannelParams, ClickPoint, DetectorParams, ResendDistribution};
use crate::error::{check_unit_interval, Error, Result};
use crate::usd::{usd_probability, usd_probability_n, MeanPhotonNumber, SourceModel};

/// Trials per RNG stream.
pub const BLOCK_TRIALS: u64 = 1 << 14;

/// Two-sided 95% normal quantile.
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EveStrategy {
    None,
    /// On a fraction `attack_fraction` of the pulses (chosen independently per
    /// pulse) Eve performs USD; on success she resends the identified state
    /// with a photon number drawn from `resend` directly into Bob's
    /// detection stage, on failure she sends vacuum.
    Usd {
        resend: ResendDistribution,
        attack_fraction: f64,
    },
}

impl EveStrategy {
    pub fn usd(resend: ResendDistribution, attack_fraction: f64) -> Result<Self> {
        let attack_fraction = check_unit_interval("attack_fraction", attack_fraction)?;
        Ok(Self::Usd {
            resend,
            attack_fraction,
        })
    }

    pub fn attack_fraction(&self) -> f64 {
        match self {
            EveStrategy::None => 0.0,
            EveStrategy::Usd { attack_fraction, .. } => *attack_fraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub mu: MeanPhotonNumber,
    pub ch: ChannelParams,
    pub det: DetectorParams,
    pub eve: EveStrategy,
    pub trials: u64,
    pub seed: u64,
}

/// Analytic click probabilities the simulation should reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PredictedPoint {
    pub point: ClickPoint,
}

/// `f * (attack point) + (1 - f) * (working point)`: a partial-time attack
/// moves the observed point along the segment between the two.
pub fn predicted_point(config: &SimConfig) -> PredictedPoint {
    let honest = working_point(config.mu, config.ch, config.det);
    let point = match &config.eve {
        EveStrategy::None => honest,
        EveStrategy::Usd {
            resend,
            attack_fraction,
        } => {
            let p_d = usd_probability(config.mu, SourceModel::PhaseAveragedFock);
            honest.lerp(mixture_point(resend, config.det, p_d), *attack_fraction)
        }
    };
    PredictedPoint { point }
}

/// Raw event counts. Addition is associative and commutative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Tally {
    pub n_same_basis: u64,
    pub n_diff_basis: u64,
    /// Same basis, a detector fired. Only one detector is ever illuminated.
    pub single_clicks_same_basis: u64,
    pub double_clicks_same_basis: u64,
    /// Different basis, exactly one detector fired.
    pub single_clicks_diff_basis: u64,
    pub double_clicks_diff_basis: u64,
    pub usd_attempts: u64,
    pub usd_successes: u64,
}

impl std::ops::Add for Tally {
    type Output = Tally;

    fn add(self, o: Tally) -> Tally {
        Tally {
            n_same_basis: self.n_same_basis + o.n_same_basis,
            n_diff_basis: self.n_diff_basis + o.n_diff_basis,
            single_clicks_same_basis: self.single_clicks_same_basis + o.single_clicks_same_basis,
            double_clicks_same_basis: self.double_clicks_same_basis + o.double_clicks_same_basis,
            single_clicks_diff_basis: self.single_clicks_diff_basis + o.single_clicks_diff_basis,
            double_clicks_diff_basis: self.double_clicks_diff_basis + o.double_clicks_diff_basis,
            usd_attempts: self.usd_attempts + o.usd_attempts,
            usd_successes: self.usd_successes + o.usd_successes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub trials: u64,
    pub seed: u64,
    pub counts: Tally,
    /// Same-basis single-click and different-basis double-click frequencies.
    pub est: ClickPoint,
    /// Half-widths of the 95% normal-approximation intervals.
    pub ci95: ClickPoint,
    pub predicted: PredictedPoint,
    /// `(est - predicted) / standard error`, the error taken at the predicted
    /// probability. Zero when both agree exactly with zero variance.
    pub z_scores: ClickPoint,
}

impl SimReport {
    /// Frequency of successful discrimination among attacked pulses.
    pub fn usd_success_rate(&self) -> Option<f64> {
        (self.counts.usd_attempts > 0).then(|| self.counts.usd_successes as f64 / self.counts.usd_attempts as f64)
    }
}

pub fn run_simulation(config: &SimConfig) -> Result<SimReport> {
    run_simulation_with_blocks(config, None)
}

/// Like [`run_simulation`] but evaluates blocks serially when `serial` is
/// `Some(true)`; used to check that parallelism does not change the result.
pub fn run_simulation_with_blocks(config: &SimConfig, serial: Option<bool>) -> Result<SimReport> {
    if config.trials == 0 {
        return Err(Error::Domain {
            name: "trials",
            value: 0.0,
            expected: "trials >= 1",
        });
    }
    let sampler = TrialSampler::new(config)?;
    let blocks = config.trials.div_ceil(BLOCK_TRIALS);
    let run_block = |b: u64| {
        let start = b * BLOCK_TRIALS;
        let len = BLOCK_TRIALS.min(config.trials - start);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(b);
        let mut tally = Tally::default();
        for _ in 0..len {
            sampler.trial(&mut rng, &mut tally);
        }
        tally
    };
    let counts = if serial == Some(true) {
        (0..blocks).map(run_block).fold(Tally::default(), |a, b| a + b)
    } else {
        (0..blocks)
            .into_par_iter()
            .map(run_block)
            .reduce(Tally::default, |a, b| a + b)
    };

    let predicted = predicted_point(config);
    let est = ClickPoint::new(
        ratio(counts.single_clicks_same_basis, counts.n_same_basis),
        ratio(counts.double_clicks_diff_basis, counts.n_diff_basis),
    );
    let ci95 = ClickPoint::new(
        Z_95 * binomial_se(est.p_single, counts.n_same_basis),
        Z_95 * binomial_se(est.p_double, counts.n_diff_basis),
    );
    let z_scores = ClickPoint::new(
        z_score(est.p_single, predicted.point.p_single, counts.n_same_basis),
        z_score(est.p_double, predicted.point.p_double, counts.n_diff_basis),
    );
    Ok(SimReport {
        trials: config.trials,
        seed: config.seed,
        counts,
        est,
        ci95,
        predicted,
        z_scores,
    })
}

fn ratio(k: u64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        k as f64 / n as f64
    }
}

fn binomial_se(p: f64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        (p * (1.0 - p) / n as f64).sqrt()
    }
}

fn z_score(est: f64, predicted: f64, n: u64) -> f64 {
    let se = binomial_se(predicted, n);
    let diff = est - predicted;
    if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

struct TrialSampler {
    source: Option<Poisson<f64>>,
    eta_l: f64,
    eta_b: f64,
    attack_fraction: f64,
    resend: Option<(Vec<u64>, WeightedIndex<f64>)>,
}

impl TrialSampler {
    fn new(config: &SimConfig) -> Result<Self> {
        let mu = config.mu.get();
        let source = if mu > 0.0 {
            Some(Poisson::new(mu).map_err(|_| Error::Domain {
                name: "mu",
                value: mu,
                expected: "a mean the Poisson sampler accepts",
            })?)
        } else {
            None
        };
        let resend = match &config.eve {
            EveStrategy::None => None,
            EveStrategy::Usd { resend, .. } => {
                let (ns, ws): (Vec<u64>, Vec<f64>) = resend.iter().map(|(n, w)| (n as u64, w)).unzip();
                let index = WeightedIndex::new(&ws).map_err(|e| Error::Distribution(e.to_string()))?;
                Some((ns, index))
            }
        };
        Ok(Self {
            source,
            eta_l: config.ch.eta_l(),
            eta_b: config.det.eta_b(),
            attack_fraction: config.eve.attack_fraction(),
            resend,
        })
    }

    fn trial<R: Rng>(&self, rng: &mut R, tally: &mut Tally) {
        // Alice: polarisation k in 0..4; states 0, 2 share one basis, 1, 3 the other.
        let alice_basis = rng.random_range(0..4u8) & 1;
        let photons = match &self.source {
            Some(p) => p.sample(rng) as u64,
            None => 0,
        };

        let attacked = self.attack_fraction > 0.0 && rng.random_bool(self.attack_fraction);
        let arriving = if attacked {
            tally.usd_attempts += 1;
            let p_n = usd_probability_n(photons.min(u32::MAX as u64) as u32).get();
            if p_n > 0.0 && rng.random::<f64>() < p_n {
                tally.usd_successes += 1;
                let (ns, index) = self.resend.as_ref().expect("attack implies a resend law");
                ns[index.sample(rng)]
            } else {
                0
            }
        } else {
            thin(rng, photons, self.eta_l)
        };

        let bob_basis = rng.random_range(0..2u8);
        if bob_basis == alice_basis {
            tally.n_same_basis += 1;
            // Every photon exits the port matching Alice's polarisation.
            let fire_a = thin(rng, arriving, self.eta_b) > 0;
            let fire_b = false;
            if fire_a || fire_b {
                tally.single_clicks_same_basis += 1;
            }
            if fire_a && fire_b {
                tally.double_clicks_same_basis += 1;
            }
        } else {
            tally.n_diff_basis += 1;
            let to_first = thin(rng, arriving, 0.5);
            let fire_a = thin(rng, to_first, self.eta_b) > 0;
            let fire_b = thin(rng, arriving - to_first, self.eta_b) > 0;
            match (fire_a, fire_b) {
                (true, true) => tally.double_clicks_diff_basis += 1,
                (true, false) | (false, true) => tally.single_clicks_diff_basis += 1,
                (false, false) => {}
            }
        }
    }
}

/// Keeps each of `n` photons independently with probability `p`.
fn thin<R: Rng>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 || p == 0.0 {
        return 0;
    }
    if p == 1.0 {
        return n;
    }
    if n <= 16 {
        (0..n).filter(|_| rng.random_bool(p)).count() as u64
    } else {
        Binomial::new(n, p).expect("p in (0, 1)").sample(rng)
    }
}
