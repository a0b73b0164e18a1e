//! Unambiguous discrimination of the four BB84 signal states.
//!
//! A symmetric set of `N` states can be written as
//! `|psi_k> = sum_j c_j exp(2 pi i k j / N) |phi_j>` with orthonormal `|phi_j>`;
//! the optimal unambiguous discrimination then succeeds with probability
//! `N * min_j |c_j|^2`. Everything here works with the squared magnitudes.
//!
//! Two source descriptions are supported:
//!
//! - [`SourceModel::CoherentPure`]: the four two-mode coherent states.
//! - [`SourceModel::PhaseAveragedFock`]: a Poisson mixture of Fock states, which
//!   is what an eavesdropper without a phase reference actually faces. Its
//!   success probability is the Poisson average of the per-photon-number
//!   probabilities `P_D^(n)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Relative tolerance for the structural checks on overlap matrices.
pub const OVERLAP_TOLERANCE: f64 = 1e-9;

/// Expected photon number `mu = |alpha|^2` of a signal pulse.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct MeanPhotonNumber(f64);

impl MeanPhotonNumber {
    pub fn new(mu: f64) -> Result<Self> {
        if mu.is_finite() && mu >= 0.0 {
            Ok(Self(mu))
        } else {
            Err(Error::Domain {
                name: "mu",
                value: mu,
                expected: "finite and >= 0",
            })
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// How the signal states seen by the eavesdropper are described.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceModel {
    /// Pure coherent states with a shared phase reference.
    CoherentPure,
    /// Phase-averaged coherent states: a Poisson mixture of Fock states.
    PhaseAveragedFock,
}

/// Squared magnitudes `|c_0|^2 .. |c_3|^2` of a symmetric four-state set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientQuartet {
    c_sq: [f64; 4],
}

impl CoefficientQuartet {
    /// Builds a quartet, checking range and normalisation (to 1e-12).
    pub fn new(c_sq: [f64; 4]) -> Result<Self> {
        for &c in &c_sq {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::Domain {
                    name: "c_sq",
                    value: c,
                    expected: "0 <= |c_j|^2 <= 1",
                });
            }
        }
        let sum: f64 = c_sq.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Domain {
                name: "sum of c_sq",
                value: sum,
                expected: "1 within 1e-12",
            });
        }
        Ok(Self { c_sq })
    }

    pub fn squared(&self) -> [f64; 4] {
        self.c_sq
    }

    pub fn min(&self) -> f64 {
        self.c_sq.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sum(&self) -> f64 {
        self.c_sq.iter().sum()
    }

    /// `4 * min_j |c_j|^2`, the optimal unambiguous discrimination probability.
    pub fn discrimination_probability(&self) -> DiscriminationProbability {
        DiscriminationProbability((4.0 * self.min()).clamp(0.0, 1.0))
    }
}

/// Success probability of unambiguous discrimination, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct DiscriminationProbability(f64);

impl DiscriminationProbability {
    pub const ZERO: Self = Self(0.0);
    pub const ONE: Self = Self(1.0);

    pub fn new(p_d: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&p_d) {
            Ok(Self(p_d))
        } else {
            Err(Error::Domain {
                name: "p_d",
                value: p_d,
                expected: "0 <= p_d <= 1",
            })
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// Coefficients of the four coherent BB84 states with mean photon number `mu`.
///
/// With `x = mu / 2`, `|c_r|^2 = e^{-x} sum_{n = r mod 4} x^n / n!`, i.e. the
/// Poisson(`x`) mass on photon numbers congruent to `r` modulo 4. This equals
/// `1/2 e^{-x} (cosh x +- cos x)` resp. `(sinh x +- sin x)`; the residue sum
/// has no cancellation for small `mu`, and for large `mu` the hyperbolic
/// factors are folded into the exponential so nothing overflows.
pub fn coherent_coefficients(mu: MeanPhotonNumber) -> CoefficientQuartet {
    let x = mu.get() / 2.0;
    let c_sq = if x <= 40.0 {
        poisson_residues_mod4(x)
    } else {
        let decay = (-x).exp();
        let far = (-2.0 * x).exp();
        let (s, c) = x.sin_cos();
        [
            0.25 * (1.0 + far) + 0.5 * decay * c,
            0.25 * (1.0 - far) + 0.5 * decay * s,
            0.25 * (1.0 + far) - 0.5 * decay * c,
            0.25 * (1.0 - far) - 0.5 * decay * s,
        ]
    };
    CoefficientQuartet { c_sq }
}

fn poisson_residues_mod4(x: f64) -> [f64; 4] {
    let mut acc = [0.0; 4];
    let mut term = (-x).exp();
    let mut n = 0usize;
    loop {
        acc[n % 4] += term;
        n += 1;
        term *= x / n as f64;
        if (n as f64) > x && term < 1e-20 * acc.iter().sum::<f64>() {
            break;
        }
    }
    acc
}

/// Coefficients of the conditional signal states with exactly `n` photons.
///
/// `|c_0|^2 = 1/4 + 2^{-(1+n/2)} cos(pi n / 4)`, `|c_1|^2` with `sin`, and
/// `|c_2|^2`, `|c_3|^2` with the opposite sign. The vacuum subspace holds a
/// single state, so `n = 0` gives `(1, 0, 0, 0)`.
pub fn fock_conditional_coefficients(n: u32) -> CoefficientQuartet {
    if n == 0 {
        return CoefficientQuartet {
            c_sq: [1.0, 0.0, 0.0, 0.0],
        };
    }
    // cos and sin of pi n / 4 take values in {0, +-1, +-1/sqrt 2}; fold the
    // 1/sqrt 2 into the power of two so the n = 1 and n = 3 entries are exact.
    let half = -(1.0 + n as f64 / 2.0);
    let full = half.exp2();
    let diag = (half - 0.5).exp2();
    let (cos, sin) = match n % 8 {
        0 => (full, 0.0),
        1 => (diag, diag),
        2 => (0.0, full),
        3 => (-diag, diag),
        4 => (-full, 0.0),
        5 => (-diag, -diag),
        6 => (0.0, -full),
        _ => (diag, -diag),
    };
    CoefficientQuartet {
        c_sq: [
            (0.25 + cos).max(0.0),
            (0.25 + sin).max(0.0),
            (0.25 - cos).max(0.0),
            (0.25 - sin).max(0.0),
        ],
    }
}

/// Optimal discrimination probability `P_D^(n)` within the `n`-photon subspace.
///
/// Zero for `n <= 2` (the conditional states are linearly dependent), then
/// `1 - 2^{1-n/2}` for even and `1 - 2^{(1-n)/2}` for odd `n`.
pub fn usd_probability_n(n: u32) -> DiscriminationProbability {
    let p = match n {
        0..=2 => 0.0,
        _ if n.is_multiple_of(2) => 1.0 - (1.0 - n as f64 / 2.0).exp2(),
        _ => 1.0 - ((1.0 - n as f64) / 2.0).exp2(),
    };
    DiscriminationProbability(p)
}

/// Optimal discrimination probability for signals of mean photon number `mu`.
///
/// For the Fock mixture this is the closed form
/// `1 - e^{-mu} (sqrt2 sinh(mu/sqrt2) + 2 cosh(mu/sqrt2) - 1)`, evaluated as
/// `-(1 + 1/sqrt2) expm1(-mu (1 - 1/sqrt2)) - (1 - 1/sqrt2) expm1(-mu (1 + 1/sqrt2))
/// + expm1(-mu)`, which neither overflows nor loses the small-`mu` tail.
pub fn usd_probability(mu: MeanPhotonNumber, model: SourceModel) -> DiscriminationProbability {
    let p = match model {
        SourceModel::CoherentPure => return coherent_coefficients(mu).discrimination_probability(),
        SourceModel::PhaseAveragedFock => {
            let mu = mu.get();
            let (a, b) = fock_mixture_weights();
            -a * (-mu * (1.0 - FRAC_1_SQRT_2)).exp_m1() - b * (-mu * (1.0 + FRAC_1_SQRT_2)).exp_m1() + (-mu).exp_m1()
        }
    };
    DiscriminationProbability(p.clamp(0.0, 1.0))
}

// (1 + 1/sqrt2, 1 - 1/sqrt2): weights of e^{-mu(1 -+ 1/sqrt2)} in 1 - P_D.
#[inline]
fn fock_mixture_weights() -> (f64, f64) {
    (1.0 + FRAC_1_SQRT_2, 1.0 - FRAC_1_SQRT_2)
}

/// `1 - P_D(mu)`, computed without forming `P_D` so that it stays accurate
/// when `P_D` is within rounding of 1 (large `mu`).
pub fn usd_failure_probability(mu: MeanPhotonNumber, model: SourceModel) -> f64 {
    let p_d = usd_probability(mu, model).get();
    if p_d < 0.5 {
        return 1.0 - p_d;
    }
    let m = mu.get();
    match model {
        SourceModel::PhaseAveragedFock => {
            let (a, b) = fock_mixture_weights();
            a * (-m * (1.0 - FRAC_1_SQRT_2)).exp() + b * (-m * (1.0 + FRAC_1_SQRT_2)).exp() - (-m).exp()
        }
        SourceModel::CoherentPure => {
            // 1 - 4|c_j|^2 for each j; the failure probability is the largest.
            let far = (-m).exp();
            let decay = 2.0 * (-m / 2.0).exp();
            let (s, c) = (m / 2.0).sin_cos();
            [-far - decay * c, far - decay * s, -far + decay * c, far + decay * s]
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max)
        }
    }
    .max(0.0)
}

/// Poisson-weighted sum of [`usd_probability_n`], truncated once the
/// accumulated Poisson weight exceeds `1 - tol`.
///
/// Independent of the closed form in [`usd_probability`] and used to check it.
pub fn usd_probability_series(mu: MeanPhotonNumber, tol: f64) -> Result<DiscriminationProbability> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Domain {
            name: "tol",
            value: tol,
            expected: "0 < tol < 1",
        });
    }
    let mu = mu.get();
    if mu == 0.0 {
        return Ok(DiscriminationProbability::ZERO);
    }
    let ln_mu = mu.ln();
    let mut ln_factorial = 0.0;
    let mut weight_sum = 0.0;
    let mut total = 0.0;
    let mut n = 0u32;
    loop {
        if n > 0 {
            ln_factorial += (n as f64).ln();
        }
        let weight = (-mu + n as f64 * ln_mu - ln_factorial).exp();
        weight_sum += weight;
        total += weight * usd_probability_n(n).get();
        // The second guard only matters when rounding in weight_sum keeps it
        // just below 1 - tol; past the mode a negligible term ends the sum.
        if weight_sum > 1.0 - tol || (n as f64 > mu && weight < tol * 1e-6) {
            break;
        }
        n += 1;
    }
    Ok(DiscriminationProbability(total.clamp(0.0, 1.0)))
}

/// Gram matrix `<psi_k|psi_l>` of the four coherent BB84 states.
///
/// The first polarisation mode is common to all four states; the second
/// carries amplitude `i^k alpha / sqrt 2`, so
/// `<psi_k|psi_l> = exp((mu / 2) (i^{l-k} - 1))`.
pub fn coherent_overlap_matrix(mu: MeanPhotonNumber) -> Vec<Vec<Complex64>> {
    let half = mu.get() / 2.0;
    let phase = |d: usize| match d % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    (0..4)
        .map(|k| (0..4).map(|l| ((phase(l + 4 - k) - 1.0) * half).exp()).collect())
        .collect()
}

/// Squared-coefficient spectrum `|c_j|^2` of a symmetric state set given its
/// Gram matrix.
///
/// For a symmetric set the Gram matrix is circulant, `G[k][l] = g(l - k)`, with
/// `g(d) = sum_j |c_j|^2 w^{dj}`, `w = exp(2 pi i / N)`. Inverting the discrete
/// Fourier transform of the first row recovers the spectrum.
pub fn overlap_spectrum(overlaps: &[Vec<Complex64>]) -> Result<Vec<f64>> {
    let n = overlaps.len();
    if n == 0 {
        return Err(Error::Structure("empty matrix".into()));
    }
    if let Some(row) = overlaps.iter().position(|r| r.len() != n) {
        return Err(Error::Structure(format!("row {row} does not have {n} entries")));
    }
    let close = |a: Complex64, b: Complex64| (a - b).norm() <= OVERLAP_TOLERANCE * a.norm().max(b.norm()).max(1.0);
    for k in 0..n {
        if !close(overlaps[k][k], Complex64::new(1.0, 0.0)) {
            return Err(Error::Structure(format!("diagonal entry {k} is not 1")));
        }
        for l in 0..n {
            if !close(overlaps[k][l], overlaps[l][k].conj()) {
                return Err(Error::Structure(format!("entry ({k}, {l}) breaks hermiticity")));
            }
            if !close(overlaps[k][l], overlaps[0][(l + n - k) % n]) {
                return Err(Error::Structure(format!("entry ({k}, {l}) breaks circulant structure")));
            }
        }
    }

    let row = &overlaps[0];
    let mut spectrum = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for (d, &g) in row.iter().enumerate() {
            let angle = -2.0 * std::f64::consts::PI * ((d * j) % n) as f64 / n as f64;
            acc += g * Complex64::from_polar(1.0, angle);
        }
        let c_sq = acc / n as f64;
        if c_sq.im.abs() > OVERLAP_TOLERANCE || c_sq.re < -OVERLAP_TOLERANCE {
            return Err(Error::Structure(format!(
                "spectral weight {j} is {c_sq}, not a non-negative real"
            )));
        }
        spectrum.push(c_sq.re.max(0.0));
    }
    Ok(spectrum)
}

/// `N * min_j |c_j|^2` for a symmetric set described by its overlaps.
pub fn symmetric_usd_from_overlaps(overlaps: &[Vec<Complex64>]) -> Result<DiscriminationProbability> {
    let spectrum = overlap_spectrum(overlaps)?;
    let min = spectrum.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(DiscriminationProbability((spectrum.len() as f64 * min).clamp(0.0, 1.0)))
}

/// Leading-order constant of the simple beam-splitter USD setup,
/// `P_D ~ mu^3 / 32`. Only the leading order is known; it is not a computed
/// quantity.
pub const BEAMSPLITTER_USD_CUBIC_COEFFICIENT: f64 = 1.0 / 32.0;

/// Leading-order constant of the optimal USD probability, `P_D ~ mu^3 / 12`,
/// shared by both source models.
pub const OPTIMAL_USD_CUBIC_COEFFICIENT: f64 = 1.0 / 12.0;
