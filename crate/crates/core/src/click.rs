//! Bob's click statistics.
//!
//! Bob watches two observables: the probability that a detector fires when his
//! basis matches Alice's (`p_single`), and the probability that both detectors
//! fire when the bases differ (`p_double`). Every scenario, honest or
//! attacked, is a point in this plane.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{check_unit_interval, Error, Result};
use crate::usd::{DiscriminationProbability, MeanPhotonNumber};

/// Above this photon number, binomial weights are accumulated in log space.
const LOG_BINOMIAL_THRESHOLD: u32 = 30;

/// Transmittance `eta_L` of the part of the line Eve can access.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct ChannelParams(f64);

impl ChannelParams {
    pub fn new(eta_l: f64) -> Result<Self> {
        check_unit_interval("eta_l", eta_l).map(Self)
    }

    #[inline]
    pub fn eta_l(self) -> f64 {
        self.0
    }
}

/// Detection efficiency `eta_B`, including every loss Eve cannot access.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct DetectorParams(f64);

impl DetectorParams {
    /// `eta_b` must lie in `(0, 1]`.
    pub fn new(eta_b: f64) -> Result<Self> {
        if eta_b > 0.0 && eta_b <= 1.0 {
            Ok(Self(eta_b))
        } else {
            Err(Error::Domain {
                name: "eta_b",
                value: eta_b,
                expected: "0 < eta_b <= 1",
            })
        }
    }

    #[inline]
    pub fn eta_b(self) -> f64 {
        self.0
    }

    /// Exponent `kappa = ln(1 - eta_B / 2) / ln(1 - eta_B)` of the number-state
    /// curve. Zero at `eta_B = 1`.
    pub fn kappa(self) -> f64 {
        let eta = self.0;
        if eta == 1.0 {
            0.0
        } else {
            (-eta / 2.0).ln_1p() / (-eta).ln_1p()
        }
    }
}

/// A pair of (single-click, double-click) probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ClickPoint {
    pub p_single: f64,
    pub p_double: f64,
}

impl ClickPoint {
    pub const ORIGIN: Self = Self {
        p_single: 0.0,
        p_double: 0.0,
    };

    pub fn new(p_single: f64, p_double: f64) -> Self {
        Self { p_single, p_double }
    }

    /// `self + t (other - self)`.
    pub fn lerp(self, other: Self, t: f64) -> Self {
        Self {
            p_single: self.p_single + t * (other.p_single - self.p_single),
            p_double: self.p_double + t * (other.p_double - self.p_double),
        }
    }
}

/// Photon-number distribution of the states Eve resends after a successful
/// discrimination. Finitely supported; weights sum to one within 1e-12.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResendDistribution {
    weights: BTreeMap<u32, f64>,
}

impl ResendDistribution {
    pub fn new(weights: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, w) in weights {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Distribution(format!("weight {w} for N = {n}")));
            }
            *map.entry(n).or_insert(0.0) += w;
        }
        map.retain(|_, w| *w > 0.0);
        let total: f64 = map.values().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Distribution(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { weights: map })
    }

    /// All weight on a single photon number.
    pub fn point_mass(n: u32) -> Self {
        Self {
            weights: BTreeMap::from([(n, 1.0)]),
        }
    }

    /// Truncates a photon-number law at the first `N` whose remaining tail is
    /// below `tail_tol`, folding that tail into the largest retained `N`.
    pub fn truncated(pmf: impl Fn(u32) -> f64, tail_tol: f64) -> Result<Self> {
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::Domain {
                name: "tail_tol",
                value: tail_tol,
                expected: "0 < tail_tol < 1",
            });
        }
        let mut weights = BTreeMap::new();
        let mut mass = 0.0;
        for n in 0..=u32::MAX {
            let w = pmf(n);
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Distribution(format!("pmf({n}) = {w}")));
            }
            weights.insert(n, w);
            mass += w;
            if 1.0 - mass < tail_tol {
                *weights.get_mut(&n).expect("just inserted") += 1.0 - mass;
                break;
            }
        }
        weights.retain(|_, w| *w > 0.0);
        Ok(Self { weights })
    }

    /// Poisson law with the given mean, truncated as in [`Self::truncated`].
    pub fn poisson(mean: f64, tail_tol: f64) -> Result<Self> {
        let mean = MeanPhotonNumber::new(mean)?.get();
        let ln_mean = mean.ln();
        Self::truncated(
            |n| {
                if mean == 0.0 {
                    return if n == 0 { 1.0 } else { 0.0 };
                }
                let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
                (-mean + n as f64 * ln_mean - ln_fact).exp()
            },
            tail_tol,
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.weights.iter().map(|(&n, &w)| (n, w))
    }

    pub fn max_photons(&self) -> u32 {
        self.weights.keys().next_back().copied().unwrap_or(0)
    }
}

/// Honest working point: `p_single = 1 - e^{-t}`, `p_double = (1 - e^{-t/2})^2`
/// with total transmission `t = eta_L eta_B mu`.
pub fn working_point(mu: MeanPhotonNumber, ch: ChannelParams, det: DetectorParams) -> ClickPoint {
    let t = ch.eta_l() * det.eta_b() * mu.get();
    let half = -(-t / 2.0).exp_m1();
    ClickPoint {
        p_single: -(-t).exp_m1(),
        p_double: half * half,
    }
}

/// Click probabilities when Eve resends an `n`-photon Fock state after every
/// successful discrimination (probability `p_d`) and vacuum otherwise.
pub fn number_state_point(n: u32, det: DetectorParams, p_d: DiscriminationProbability) -> ClickPoint {
    let p_d = p_d.get();
    let eta = det.eta_b();
    let miss_all = pow_1m(eta, n);
    let p_single = p_d * (1.0 - miss_all);
    // 1 - 2(1 - eta/2)^N + (1 - eta)^N; vanishes identically for N <= 1.
    let p_double = if n < 2 {
        0.0
    } else {
        (p_d * (1.0 - 2.0 * pow_1m(eta / 2.0, n) + miss_all)).clamp(0.0, p_single)
    };
    ClickPoint { p_single, p_double }
}

#[inline]
fn pow_1m(p: f64, n: u32) -> f64 {
    // (1 - p)^n with the log taken via ln_1p for small p.
    if p == 1.0 {
        if n == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        (n as f64 * (-p).ln_1p()).exp()
    }
}

/// Joint distribution `Pi[k][l]` of photons registered at Bob's two detectors
/// when the bases differ: each of the `n` photons goes to either detector with
/// probability 1/2 and is then registered with probability `eta_B`. Entries
/// are scaled by `p_d`, so they sum to `p_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointClickMatrix {
    n: u32,
    entries: Vec<f64>,
}

impl JointClickMatrix {
    pub fn photons(&self) -> u32 {
        self.n
    }

    /// `Pi[k][l]`; zero outside `k + l <= n`.
    pub fn get(&self, k: u32, l: u32) -> f64 {
        if k > self.n || l > self.n {
            return 0.0;
        }
        let dim = self.n as usize + 1;
        self.entries[k as usize * dim + l as usize]
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// `sum_k Pi[k][0]`: nothing registered at the second detector.
    pub fn second_silent(&self) -> f64 {
        (0..=self.n).map(|k| self.get(k, 0)).sum()
    }

    /// `sum_l Pi[0][l]`: nothing registered at the first detector.
    pub fn first_silent(&self) -> f64 {
        (0..=self.n).map(|l| self.get(0, l)).sum()
    }

    /// Both detectors fire: `p_d - sum_l Pi[0][l] - sum_k Pi[k][0] + Pi[0][0]`.
    pub fn double_click(&self, p_d: DiscriminationProbability) -> f64 {
        p_d.get() - self.first_silent() - self.second_silent() + self.get(0, 0)
    }
}

pub fn joint_click_matrix(n: u32, det: DetectorParams, p_d: DiscriminationProbability) -> JointClickMatrix {
    let eta = det.eta_b();
    let dim = n as usize + 1;
    let binom = BinomialTable::new(n);
    let mut entries = vec![0.0; dim * dim];
    for m in 0..=n {
        let split = binom.pmf(n, m, 0.5);
        for k in 0..=m {
            let first = binom.pmf(m, k, eta);
            if first == 0.0 {
                continue;
            }
            for l in 0..=(n - m) {
                entries[k as usize * dim + l as usize] += split * first * binom.pmf(n - m, l, eta);
            }
        }
    }
    for e in &mut entries {
        *e *= p_d.get();
    }
    JointClickMatrix { n, entries }
}

/// Binomial probabilities up to a fixed `n`, exact for small `n` and via a
/// log-factorial table beyond [`LOG_BINOMIAL_THRESHOLD`].
struct BinomialTable {
    ln_factorial: Vec<f64>,
    log_space: bool,
}

impl BinomialTable {
    fn new(n_max: u32) -> Self {
        let mut ln_factorial = Vec::with_capacity(n_max as usize + 1);
        let mut acc = 0.0;
        ln_factorial.push(0.0);
        for k in 1..=n_max {
            acc += (k as f64).ln();
            ln_factorial.push(acc);
        }
        Self {
            ln_factorial,
            log_space: n_max > LOG_BINOMIAL_THRESHOLD,
        }
    }

    fn pmf(&self, n: u32, k: u32, p: f64) -> f64 {
        if k > n {
            return 0.0;
        }
        if p == 0.0 {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        if p == 1.0 {
            return if k == n { 1.0 } else { 0.0 };
        }
        let (nk, kk) = (n - k, k);
        if self.log_space {
            let ln_c = self.ln_factorial[n as usize] - self.ln_factorial[k as usize] - self.ln_factorial[nk as usize];
            (ln_c + kk as f64 * p.ln() + nk as f64 * (-p).ln_1p()).exp()
        } else {
            let mut c = 1.0;
            for i in 0..k.min(nk) {
                c = c * (n - i) as f64 / (i + 1) as f64;
            }
            c * p.powi(kk as i32) * (1.0 - p).powi(nk as i32)
        }
    }
}

/// Convex combination of [`number_state_point`] over the resend distribution.
pub fn mixture_point(dist: &ResendDistribution, det: DetectorParams, p_d: DiscriminationProbability) -> ClickPoint {
    dist.iter().fold(ClickPoint::ORIGIN, |acc, (n, w)| {
        let pt = number_state_point(n, det, p_d);
        ClickPoint {
            p_single: acc.p_single + w * pt.p_single,
            p_double: acc.p_double + w * pt.p_double,
        }
    })
}

/// Number-state curve: the real continuation in `N` of the number-state
/// points, `y = [2 - 2 (1 - x/p_d)^kappa - x/p_d] p_d` for `0 <= x <= p_d`.
///
/// At `x = p_d` the value is the `N -> infinity` limit `p_d`. For
/// `eta_B = 1` every point with `N >= 1` sits on the vertical line `x = p_d`,
/// so the curve below `p_d` is the segment from `N = 0` to `N = 1`, `y = 0`.
pub fn n_curve_y(x: f64, det: DetectorParams, p_d: DiscriminationProbability) -> Result<f64> {
    let p = p_d.get();
    if !(0.0..=p).contains(&x) {
        return Err(Error::Domain {
            name: "x",
            value: x,
            expected: "0 <= x <= p_d",
        });
    }
    if x == p {
        return Ok(p);
    }
    let kappa = det.kappa();
    if kappa == 0.0 {
        return Ok(0.0);
    }
    let u = x / p;
    Ok((2.0 - 2.0 * (kappa * (-u).ln_1p()).exp() - u) * p)
}

/// Working-point curve `y = (1 - sqrt(1 - x))^2`, `0 <= x <= 1`.
pub fn working_curve_y(x: f64) -> Result<f64> {
    let x = check_unit_interval("x", x)?;
    let d = 1.0 - (1.0 - x).sqrt();
    Ok(d * d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(eta: f64) -> DetectorParams {
        DetectorParams::new(eta).unwrap()
    }

    fn pd(p: f64) -> DiscriminationProbability {
        DiscriminationProbability::new(p).unwrap()
    }

    #[test]
    fn parameter_domains() {
        assert!(ChannelParams::new(0.0).is_ok());
        assert!(ChannelParams::new(1.0).is_ok());
        assert!(ChannelParams::new(1.01).is_err());
        assert!(DetectorParams::new(0.0).is_err());
        assert!(DetectorParams::new(1.0).is_ok());
        assert!(DetectorParams::new(-0.5).is_err());
    }

    #[test]
    fn working_point_values() {
        let mu = MeanPhotonNumber::new(0.0).unwrap();
        let wp = working_point(mu, ChannelParams::new(0.1).unwrap(), det(0.5));
        assert_eq!(wp, ClickPoint::ORIGIN);

        let mu = MeanPhotonNumber::new(2.07).unwrap();
        let wp = working_point(mu, ChannelParams::new(0.1).unwrap(), det(0.5));
        assert!((wp.p_single - 0.098_323_977_258_144_57).abs() < 1e-15);
        assert!((wp.p_double - 0.002_543_565_284_655_916).abs() < 1e-15);
        assert!((working_curve_y(wp.p_single).unwrap() - wp.p_double).abs() < 1e-12);
    }

    #[test]
    fn number_state_points() {
        assert_eq!(number_state_point(2, det(0.5), pd(1.0)), ClickPoint::new(0.75, 0.125));
        assert_eq!(number_state_point(1, det(0.5), pd(1.0)), ClickPoint::new(0.5, 0.0));
        for eta in [0.1, 0.37, 1.0] {
            assert_eq!(number_state_point(1, det(eta), pd(0.3)).p_double, 0.0);
        }
        assert_eq!(number_state_point(0, det(0.5), pd(0.3)), ClickPoint::ORIGIN);
    }

    #[test]
    fn joint_matrix_small_cases() {
        let m = joint_click_matrix(2, det(1.0), pd(1.0));
        assert!((m.get(1, 1) - 0.5).abs() < 1e-15);
        assert_eq!(m.get(0, 0), 0.0);
        assert!((m.get(2, 0) - 0.25).abs() < 1e-15);

        let m3 = joint_click_matrix(3, det(0.5), pd(1.0));
        assert!((m3.second_silent() - 0.421875).abs() < 1e-15);
        assert!((m3.get(0, 0) - 0.125).abs() < 1e-15);
        assert!((m3.total() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn joint_matrix_log_space_consistency() {
        // Straddle the log-space switch: both paths must give the marginals.
        for n in [29, 30, 31, 45, 80] {
            let m = joint_click_matrix(n, det(0.3), pd(0.7));
            assert!((m.total() - 0.7).abs() < 1e-12, "n={n}");
            let expected = 0.7 * (1.0f64 - 0.15).powi(n as i32);
            assert!((m.second_silent() - expected).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn mixtures() {
        let d = ResendDistribution::point_mass(2);
        assert_eq!(
            mixture_point(&d, det(0.5), pd(1.0)),
            number_state_point(2, det(0.5), pd(1.0))
        );

        let mix = ResendDistribution::new([(0, 0.3), (2, 0.7)]).unwrap();
        let p = mixture_point(&mix, det(0.5), pd(1.0));
        assert!((p.p_single - 0.525).abs() < 1e-15);
        assert!((p.p_double - 0.0875).abs() < 1e-15);

        let uni = ResendDistribution::new([(1, 0.5), (3, 0.5)]).unwrap();
        let mid = number_state_point(1, det(0.5), pd(1.0)).lerp(number_state_point(3, det(0.5), pd(1.0)), 0.5);
        let got = mixture_point(&uni, det(0.5), pd(1.0));
        assert!((got.p_single - mid.p_single).abs() < 1e-15);
        assert!((got.p_double - mid.p_double).abs() < 1e-15);
    }

    #[test]
    fn resend_distribution_validation() {
        assert!(ResendDistribution::new([(1, 0.5), (2, 0.4)]).is_err());
        assert!(ResendDistribution::new([(1, -0.5), (2, 1.5)]).is_err());
        assert!(ResendDistribution::new([(1, f64::NAN)]).is_err());
        let p = ResendDistribution::poisson(3.0, 1e-12).unwrap();
        let total: f64 = p.iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(p.max_photons() > 10);
        assert_eq!(
            ResendDistribution::poisson(0.0, 1e-12).unwrap(),
            ResendDistribution::point_mass(0)
        );
    }

    #[test]
    fn kappa_values() {
        assert!((det(0.5).kappa() - 0.415_037_499_278_843_8).abs() < 1e-15);
        assert_eq!(det(1.0).kappa(), 0.0);
    }

    #[test]
    fn n_curve_through_number_states() {
        assert_eq!(n_curve_y(0.0, det(0.5), pd(0.4)).unwrap(), 0.0);
        for n in 1..=10 {
            let pt = number_state_point(n, det(0.5), pd(0.4));
            let y = n_curve_y(pt.p_single, det(0.5), pd(0.4)).unwrap();
            assert!((y - pt.p_double).abs() < 1e-12, "N={n}: {y} vs {}", pt.p_double);
        }
        assert_eq!(n_curve_y(0.4, det(0.5), pd(0.4)).unwrap(), 0.4);
        assert!(n_curve_y(0.41, det(0.5), pd(0.4)).is_err());
        assert!(n_curve_y(-0.01, det(0.5), pd(0.4)).is_err());
        assert_eq!(n_curve_y(0.0, det(0.5), pd(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn n_curve_unit_efficiency() {
        assert_eq!(n_curve_y(0.3, det(1.0), pd(0.5)).unwrap(), 0.0);
        assert_eq!(n_curve_y(0.5, det(1.0), pd(0.5)).unwrap(), 0.5);
    }

    #[test]
    fn working_curve() {
        assert_eq!(working_curve_y(0.0).unwrap(), 0.0);
        assert_eq!(working_curve_y(0.75).unwrap(), 0.25);
        assert!((working_curve_y(0.098324).unwrap() - 0.0025436).abs() < 1e-6);
        assert!(working_curve_y(1.5).is_err());
    }
}
