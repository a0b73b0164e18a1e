//! Insecurity region and security verdicts.
//!
//! Every photon-number mixture Eve can resend maps to a point inside the
//! convex polygon spanned by the number-state points (plus their `N -> inf`
//! limit `(p_d, p_d)`). If the honest working point lies in that polygon, the
//! attack reproduces Bob's statistics exactly while Eve learns every sifted
//! bit.
//!
//! Two classification modes are offered. [`CriteriaMode::Geometric`] runs a
//! point-in-convex-polygon test and is authoritative. [`CriteriaMode::PaperLinearized`]
//! applies the two linear tests (below the chord through the `N = 2` vertex,
//! i.e. `mu < mu2`, then the sign of `F`), which decide the same question
//! whenever the chord test holds.

use rayon::prelude::*;
use serde::Serialize;

use crate::click::{number_state_point, working_point, ChannelParams, ClickPoint, DetectorParams};
use crate::error::{Error, Result};
use crate::usd::{usd_failure_probability, usd_probability, DiscriminationProbability, MeanPhotonNumber, SourceModel};

/// Absolute tolerance (in probability units) of the point-in-polygon test.
pub const BOUNDARY_EPSILON: f64 = 1e-12;

/// Truncation tolerance used when [`classify`] builds its polygon.
pub const POLYGON_TOLERANCE: f64 = 1e-12;

/// Upper bound on polygon size; reached only for `eta_B` of order 1e-6.
pub const MAX_POLYGON_VERTICES: usize = 5_000_000;

/// The source model behind every criterion: phase-averaged coherent states.
pub const CRITERIA_MODEL: SourceModel = SourceModel::PhaseAveragedFock;

/// Convex hull of the number-state attack points.
///
/// Vertices run from the origin (`N = 0`) through increasing `N` up to
/// `n_max`, closed by the saturation point `(p_d, p_d)`. The order is
/// counter-clockwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InsecurityPolygon {
    vertices: Vec<ClickPoint>,
    p_d: DiscriminationProbability,
    n_max: u32,
}

impl InsecurityPolygon {
    pub fn vertices(&self) -> &[ClickPoint] {
        &self.vertices
    }

    pub fn p_d(&self) -> DiscriminationProbability {
        self.p_d
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    /// Whether `point` lies inside or on the boundary (within
    /// [`BOUNDARY_EPSILON`] of it).
    pub fn contains(&self, point: ClickPoint) -> bool {
        let v = &self.vertices;
        if v.len() < 3 {
            // Degenerate polygon: a point or a segment.
            return match v.len() {
                0 => false,
                1 => distance(v[0], point) <= BOUNDARY_EPSILON,
                _ => segment_distance(v[0], v[1], point) <= BOUNDARY_EPSILON,
            };
        }
        if point.p_single > self.p_d.get() + BOUNDARY_EPSILON || point.p_single < -BOUNDARY_EPSILON {
            return false;
        }
        (0..v.len()).all(|i| {
            let a = v[i];
            let b = v[(i + 1) % v.len()];
            let len = distance(a, b);
            len == 0.0 || cross(a, b, point) / len >= -BOUNDARY_EPSILON
        })
    }

    /// Orientation (`z` of the cross product) of every consecutive vertex
    /// triple, cyclically. All positive for a strictly convex polygon.
    pub fn orientations(&self) -> Vec<f64> {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return Vec::new();
        }
        (0..n).map(|i| cross(v[i], v[(i + 1) % n], v[(i + 2) % n])).collect()
    }

    pub fn is_convex(&self) -> bool {
        let o = self.orientations();
        o.iter().all(|&c| c > 0.0) || o.iter().all(|&c| c < 0.0)
    }
}

#[inline]
fn cross(a: ClickPoint, b: ClickPoint, c: ClickPoint) -> f64 {
    (b.p_single - a.p_single) * (c.p_double - a.p_double) - (b.p_double - a.p_double) * (c.p_single - a.p_single)
}

#[inline]
fn distance(a: ClickPoint, b: ClickPoint) -> f64 {
    (a.p_single - b.p_single).hypot(a.p_double - b.p_double)
}

fn segment_distance(a: ClickPoint, b: ClickPoint, p: ClickPoint) -> f64 {
    let len2 = (b.p_single - a.p_single).powi(2) + (b.p_double - a.p_double).powi(2);
    if len2 == 0.0 {
        return distance(a, p);
    }
    let t = (((p.p_single - a.p_single) * (b.p_single - a.p_single)
        + (p.p_double - a.p_double) * (b.p_double - a.p_double))
        / len2)
        .clamp(0.0, 1.0);
    distance(a.lerp(b, t), p)
}

/// Builds the polygon for vertices `N = 0 ..= n_max`, where `n_max` is the
/// first `N` with `(1 - eta_B)^N < tol`, closed by `(p_d, p_d)`.
pub fn build_insecurity_polygon(
    det: DetectorParams,
    p_d: DiscriminationProbability,
    tol: f64,
) -> Result<InsecurityPolygon> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::Domain {
            name: "tol",
            value: tol,
            expected: "0 < tol < 1",
        });
    }
    if p_d.get() == 0.0 {
        return Ok(InsecurityPolygon {
            vertices: vec![ClickPoint::ORIGIN],
            p_d,
            n_max: 0,
        });
    }
    let eta = det.eta_b();
    let n_max = if eta == 1.0 {
        1
    } else {
        let ln_miss = (-eta).ln_1p();
        let mut n = (tol.ln() / ln_miss).floor().max(1.0) as u64;
        while (n as f64 * ln_miss).exp() >= tol {
            n += 1;
        }
        while n > 1 && ((n - 1) as f64 * ln_miss).exp() < tol {
            n -= 1;
        }
        if n as usize >= MAX_POLYGON_VERTICES {
            return Err(Error::Domain {
                name: "eta_b",
                value: eta,
                expected: "large enough that the polygon truncates below the vertex limit",
            });
        }
        n as u32
    };
    let mut vertices: Vec<ClickPoint> = (0..=n_max).map(|n| number_state_point(n, det, p_d)).collect();
    vertices.push(ClickPoint::new(p_d.get(), p_d.get()));
    Ok(InsecurityPolygon { vertices, p_d, n_max })
}

/// Threshold on the total transmission `eta_L eta_B` below which complete
/// insecurity is possible at all: `-ln(1 - P_D(mu)) / mu`.
///
/// Tends to `1 - 2^{-1/2}` as `mu -> inf` for the Fock mixture.
pub fn necessary_threshold(mu: MeanPhotonNumber, model: SourceModel) -> Result<f64> {
    if mu.get() == 0.0 {
        return Err(Error::Domain {
            name: "mu",
            value: 0.0,
            expected: "mu > 0 (the threshold tends to 0 as mu -> 0)",
        });
    }
    let p_d = usd_probability(mu, model).get();
    let ln_fail = if p_d < 0.5 {
        (-p_d).ln_1p()
    } else {
        usd_failure_probability(mu, model).ln()
    };
    Ok(-ln_fail / mu.get())
}

/// Mean photon number below which the working point lies under the chord from
/// the origin to the `N = 2` vertex:
/// `mu2 = -2 / (eta_L eta_B) ln((4 - 3 eta_B) / (4 - eta_B))`.
pub fn mu2_threshold(ch: ChannelParams, det: DetectorParams) -> Result<f64> {
    let eta_l = ch.eta_l();
    if eta_l == 0.0 {
        return Err(Error::Domain {
            name: "eta_l",
            value: 0.0,
            expected: "eta_l > 0",
        });
    }
    Ok(mu2_times_eta_l(det) / eta_l)
}

// eta_L * mu2, which depends on eta_B only.
fn mu2_times_eta_l(det: DetectorParams) -> f64 {
    let eta = det.eta_b();
    -2.0 / eta * (-2.0 * eta / (4.0 - eta)).ln_1p()
}

/// `F = x_w eta_B - 2 y_w (1 - eta_B) - P_D eta_B^2`; together with
/// `mu < mu2`, `F <= 0` places the working point in the insecurity region.
pub fn f_criterion(mu: MeanPhotonNumber, ch: ChannelParams, det: DetectorParams) -> f64 {
    let wp = working_point(mu, ch, det);
    f_from_parts(wp, usd_probability(mu, CRITERIA_MODEL).get(), det.eta_b())
}

#[inline]
fn f_from_parts(wp: ClickPoint, p_d: f64, eta: f64) -> f64 {
    wp.p_single * eta - 2.0 * wp.p_double * (1.0 - eta) - p_d * eta * eta
}

/// Leading small-`eta_B` form of [`f_criterion`]:
/// `eta_B^2 (eta_L mu - eta_L^2 mu^2 / 2 - P_D)`.
pub fn small_etab_f(mu: MeanPhotonNumber, ch: ChannelParams, det: DetectorParams) -> f64 {
    let (m, l, b) = (mu.get(), ch.eta_l(), det.eta_b());
    b * b * (l * m - 0.5 * l * l * m * m - usd_probability(mu, CRITERIA_MODEL).get())
}

/// Accessible-loss threshold in the small-`eta_B` limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CriticalEta {
    /// `eta_L <= exact` is insecure; `approx = P_D / mu` and the leading
    /// term `mu^2 / 12` are the successive approximations.
    Bound { exact: f64, approx: f64, leading: f64 },
    /// `P_D >= 1/2` strictly: the square root has no real value and the
    /// small-`eta_B` criterion gives no threshold.
    BeyondBranchPoint { p_d: f64 },
}

/// `(1 / mu) (1 - sqrt(1 - 2 P_D))`, independent of `eta_B`.
pub fn critical_eta(mu: MeanPhotonNumber) -> Result<CriticalEta> {
    let m = mu.get();
    if m == 0.0 {
        return Err(Error::Domain {
            name: "mu",
            value: 0.0,
            expected: "mu > 0",
        });
    }
    let p_d = usd_probability(mu, CRITERIA_MODEL).get();
    if p_d > 0.5 {
        return Ok(CriticalEta::BeyondBranchPoint { p_d });
    }
    // 1 - sqrt(1 - 2p) = 2p / (1 + sqrt(1 - 2p)) keeps precision for small p.
    let exact = 2.0 * p_d / (1.0 + (1.0 - 2.0 * p_d).sqrt()) / m;
    Ok(CriticalEta::Bound {
        exact,
        approx: p_d / m,
        leading: m * m / 12.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriteriaMode {
    Geometric,
    PaperLinearized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SecureAgainstUsd,
    InsecureUnderUsd,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::SecureAgainstUsd => "secure",
            Verdict::InsecureUnderUsd => "insecure",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

/// A verdict with the quantities that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecurityVerdict {
    pub verdict: Verdict,
    pub mode: CriteriaMode,
    pub working_point: ClickPoint,
    pub p_d: f64,
    pub f: f64,
    /// Infinite when `eta_L = 0`.
    pub mu2: f64,
    /// `necessary_threshold(mu) - eta_L eta_B`; positive when the necessary
    /// condition for insecurity holds. `None` at `mu = 0`.
    pub necessary_margin: Option<f64>,
}

pub fn classify(
    mu: MeanPhotonNumber,
    ch: ChannelParams,
    det: DetectorParams,
    mode: CriteriaMode,
) -> Result<SecurityVerdict> {
    let p_d = usd_probability(mu, CRITERIA_MODEL);
    let polygon = match mode {
        CriteriaMode::Geometric => Some(LazyPolygon::new(det, p_d)),
        CriteriaMode::PaperLinearized => None,
    };
    classify_with(mu, ch, det, mode, p_d, polygon.as_ref())
}

/// Builds the polygon only when the working point falls inside its
/// `p_single` range; otherwise the point is outside regardless.
struct LazyPolygon {
    det: DetectorParams,
    p_d: DiscriminationProbability,
    cell: std::sync::OnceLock<Result<InsecurityPolygon>>,
}

impl LazyPolygon {
    fn new(det: DetectorParams, p_d: DiscriminationProbability) -> Self {
        Self {
            det,
            p_d,
            cell: std::sync::OnceLock::new(),
        }
    }

    fn contains(&self, point: ClickPoint) -> Result<bool> {
        if point.p_single > self.p_d.get() + BOUNDARY_EPSILON {
            return Ok(false);
        }
        self.cell
            .get_or_init(|| build_insecurity_polygon(self.det, self.p_d, POLYGON_TOLERANCE))
            .as_ref()
            .map(|poly| poly.contains(point))
            .map_err(Clone::clone)
    }
}

fn classify_with(
    mu: MeanPhotonNumber,
    ch: ChannelParams,
    det: DetectorParams,
    mode: CriteriaMode,
    p_d: DiscriminationProbability,
    polygon: Option<&LazyPolygon>,
) -> Result<SecurityVerdict> {
    let wp = working_point(mu, ch, det);
    let f = f_from_parts(wp, p_d.get(), det.eta_b());
    let mu2 = if ch.eta_l() == 0.0 {
        f64::INFINITY
    } else {
        mu2_times_eta_l(det) / ch.eta_l()
    };
    let necessary_margin = match necessary_threshold(mu, CRITERIA_MODEL) {
        Ok(t) => Some(t - ch.eta_l() * det.eta_b()),
        Err(_) => None,
    };
    let verdict = match (mode, polygon) {
        (CriteriaMode::Geometric, Some(poly)) => {
            if poly.contains(wp)? {
                Verdict::InsecureUnderUsd
            } else {
                Verdict::SecureAgainstUsd
            }
        }
        (CriteriaMode::Geometric, None) => unreachable!("geometric mode always carries a polygon"),
        (CriteriaMode::PaperLinearized, _) => {
            if mu.get() >= mu2 {
                Verdict::Indeterminate
            } else if f <= 0.0 {
                Verdict::InsecureUnderUsd
            } else {
                Verdict::SecureAgainstUsd
            }
        }
    };
    Ok(SecurityVerdict {
        verdict,
        mode,
        working_point: wp,
        p_d: p_d.get(),
        f,
        mu2,
        necessary_margin,
    })
}

/// One axis of a sweep: `steps` points from `from` to `to` inclusive, spaced
/// linearly or logarithmically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub log: bool,
}

impl Axis {
    pub fn linear(from: f64, to: f64, steps: usize) -> Self {
        Self {
            from,
            to,
            steps,
            log: false,
        }
    }

    pub fn log(from: f64, to: f64, steps: usize) -> Self {
        Self {
            from,
            to,
            steps,
            log: true,
        }
    }

    pub fn single(value: f64) -> Self {
        Self::linear(value, value, 1)
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if self.steps == 0 {
            return Err(Error::Domain {
                name: "steps",
                value: 0.0,
                expected: "steps >= 1",
            });
        }
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err(Error::Domain {
                name: "from/to",
                value: if self.from.is_finite() { self.to } else { self.from },
                expected: "finite",
            });
        }
        if self.log && !(self.from > 0.0 && self.to > 0.0) {
            return Err(Error::Domain {
                name: "from/to",
                value: self.from.min(self.to),
                expected: "> 0 for logarithmic spacing",
            });
        }
        if self.steps == 1 {
            return Ok(vec![self.from]);
        }
        let last = (self.steps - 1) as f64;
        let (a, b) = if self.log {
            (self.from.ln(), self.to.ln())
        } else {
            (self.from, self.to)
        };
        Ok((0..self.steps)
            .map(|i| {
                // Pin the endpoints exactly.
                if i == 0 {
                    return self.from;
                }
                if i == self.steps - 1 {
                    return self.to;
                }
                let v = a + (b - a) * i as f64 / last;
                if self.log {
                    v.exp()
                } else {
                    v
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapCell {
    pub mu: f64,
    pub eta_l: f64,
    pub verdict: SecurityVerdict,
}

/// Boundary curves of the security map, per `mu`, all expressed as values of
/// `eta_L` at the map's `eta_B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapBoundary {
    pub mu: f64,
    /// `necessary_threshold(mu) / eta_B`; may exceed 1.
    pub necessary_eta_l: f64,
    pub critical: CriticalEta,
    /// `eta_L` at which `mu = mu2`.
    pub mu2_eta_l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecurityMap {
    /// Row-major: `mu` outer, `eta_L` inner.
    pub cells: Vec<MapCell>,
    pub boundaries: Vec<MapBoundary>,
}

/// Classifies every `(mu, eta_L)` grid cell. Columns of constant `mu` are
/// evaluated in parallel; the output order is fixed by the grid.
pub fn security_map(mu_axis: &Axis, eta_l_axis: &Axis, det: DetectorParams, mode: CriteriaMode) -> Result<SecurityMap> {
    let mus = mu_axis
        .values()?
        .into_iter()
        .map(MeanPhotonNumber::new)
        .collect::<Result<Vec<_>>>()?;
    let etas = eta_l_axis
        .values()?
        .into_iter()
        .map(ChannelParams::new)
        .collect::<Result<Vec<_>>>()?;

    let columns = mus
        .par_iter()
        .map(|&mu| {
            let p_d = usd_probability(mu, CRITERIA_MODEL);
            let polygon = (mode == CriteriaMode::Geometric).then(|| LazyPolygon::new(det, p_d));
            let cells = etas
                .iter()
                .map(|&ch| {
                    classify_with(mu, ch, det, mode, p_d, polygon.as_ref()).map(|verdict| MapCell {
                        mu: mu.get(),
                        eta_l: ch.eta_l(),
                        verdict,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let boundary = map_boundary(mu, det)?;
            Ok((cells, boundary))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut map = SecurityMap {
        cells: Vec::with_capacity(mus.len() * etas.len()),
        boundaries: Vec::with_capacity(mus.len()),
    };
    for (cells, boundary) in columns {
        map.cells.extend(cells);
        map.boundaries.push(boundary);
    }
    Ok(map)
}

fn map_boundary(mu: MeanPhotonNumber, det: DetectorParams) -> Result<MapBoundary> {
    let m = mu.get();
    if m == 0.0 {
        return Ok(MapBoundary {
            mu: 0.0,
            necessary_eta_l: 0.0,
            critical: CriticalEta::Bound {
                exact: 0.0,
                approx: 0.0,
                leading: 0.0,
            },
            mu2_eta_l: f64::INFINITY,
        });
    }
    Ok(MapBoundary {
        mu: m,
        necessary_eta_l: necessary_threshold(mu, CRITERIA_MODEL)? / det.eta_b(),
        critical: critical_eta(mu)?,
        mu2_eta_l: mu2_times_eta_l(det) / m,
    })
}

/// Root of `F(., eta_L, eta_B)` in `(lo, hi)` by bisection, if `F` changes
/// sign on the bracket.
pub fn f_root(ch: ChannelParams, det: DetectorParams, lo: f64, hi: f64, tol: f64) -> Result<Option<f64>> {
    let f = |m: f64| -> Result<f64> { Ok(f_criterion(MeanPhotonNumber::new(m)?, ch, det)) };
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(Some(a));
    }
    if fb == 0.0 {
        return Ok(Some(b));
    }
    if fa.signum() == fb.signum() {
        return Ok(None);
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(Some(mid));
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu(v: f64) -> MeanPhotonNumber {
        MeanPhotonNumber::new(v).unwrap()
    }
    fn ch(v: f64) -> ChannelParams {
        ChannelParams::new(v).unwrap()
    }
    fn det(v: f64) -> DetectorParams {
        DetectorParams::new(v).unwrap()
    }

    #[test]
    fn necessary_threshold_values() {
        let t4 = necessary_threshold(mu(4.0), CRITERIA_MODEL).unwrap();
        assert!((t4 - 0.167_847_280_877_644_7).abs() < 1e-13);
        assert!((t4 - 0.1678).abs() < 1e-3);

        let t700 = necessary_threshold(mu(700.0), CRITERIA_MODEL).unwrap();
        assert!((t700 - (1.0 - 0.5f64.sqrt())).abs() < 1e-3, "{t700}");

        let small = necessary_threshold(mu(0.1), CRITERIA_MODEL).unwrap();
        assert!((small - 7.734_869_824_264_99e-4).abs() < 1e-15);
        assert!((small - 8.3e-4).abs() / 8.3e-4 < 0.1);

        assert!(necessary_threshold(mu(0.0), CRITERIA_MODEL).is_err());
    }

    #[test]
    fn mu2_values() {
        let m = mu2_threshold(ch(0.1), det(0.5)).unwrap();
        assert!((m - 13.458_889_464_848_517).abs() < 1e-11);
        assert!((mu2_threshold(ch(1.0), det(1.0)).unwrap() - 2.0 * 3f64.ln()).abs() < 1e-14);
        let lim = mu2_threshold(ch(0.5), det(1e-6)).unwrap();
        assert!((lim - 2.0).abs() < 1e-4);
        assert!(mu2_threshold(ch(0.0), det(0.5)).is_err());
    }

    #[test]
    fn f_values() {
        assert_eq!(f_criterion(mu(0.0), ch(0.1), det(0.5)), 0.0);
        let f1 = f_criterion(mu(1.0), ch(0.1), det(0.5));
        assert!((f1 - 0.013_506_653_299_008_03).abs() < 1e-15);
        let f4 = f_criterion(mu(4.0), ch(0.1), det(0.5));
        assert!((f4 - -0.040_671_732_331_331_77).abs() < 1e-15);
        assert!(f_criterion(mu(2.07), ch(0.1), det(0.5)).abs() < 5e-4);
    }

    #[test]
    fn small_etab_values() {
        assert_eq!(small_etab_f(mu(0.0), ch(0.04), det(0.01)), 0.0);
        let s = small_etab_f(mu(1.0), ch(0.04), det(0.01));
        assert!((s - -1.876_136_026_345_164_5e-7).abs() < 1e-18);
        let b = 1e-3;
        let full = f_criterion(mu(1.0), ch(0.1), det(b));
        let approx = small_etab_f(mu(1.0), ch(0.1), det(b));
        assert!((full - approx).abs() / (b * b) < 0.02);
    }

    #[test]
    fn critical_eta_values() {
        match critical_eta(mu(1.0)).unwrap() {
            CriticalEta::Bound { exact, approx, .. } => {
                assert!((exact - 0.041_956_301_650_436_37).abs() < 1e-15);
                assert!((approx - 0.041_076_136_026_345_16).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        match critical_eta(mu(0.5)).unwrap() {
            CriticalEta::Bound { exact, .. } => assert!((exact - 0.014_526_743_375_040_87).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            critical_eta(mu(5.0)).unwrap(),
            CriticalEta::BeyondBranchPoint { .. }
        ));
        assert!(critical_eta(mu(0.0)).is_err());
    }

    #[test]
    fn critical_eta_at_branch_point() {
        // Bisect for P_D(mu) = 1/2; at the root the bound is 1/mu.
        let (mut a, mut b) = (4.0, 4.2);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if usd_probability(mu(m), CRITERIA_MODEL).get() < 0.5 {
                a = m;
            } else {
                b = m;
            }
        }
        assert!((a - 4.080_851_471_895_232).abs() < 1e-12);
        match critical_eta(mu(a)).unwrap() {
            CriticalEta::Bound { exact, .. } => assert!((exact - 1.0 / a).abs() < 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn polygon_construction() {
        let poly = build_insecurity_polygon(det(0.5), DiscriminationProbability::ONE, 1e-9).unwrap();
        assert_eq!(poly.n_max(), 30);
        assert_eq!(poly.vertices()[0], ClickPoint::ORIGIN);
        assert_eq!(poly.vertices()[1], ClickPoint::new(0.5, 0.0));
        assert_eq!(*poly.vertices().last().unwrap(), ClickPoint::new(1.0, 1.0));
        assert!(poly.is_convex());

        let empty = build_insecurity_polygon(det(0.5), DiscriminationProbability::ZERO, 1e-9).unwrap();
        assert_eq!(empty.vertices(), &[ClickPoint::ORIGIN]);
        assert!(empty.contains(ClickPoint::ORIGIN));
        assert!(!empty.contains(ClickPoint::new(1e-6, 0.0)));

        let unit = build_insecurity_polygon(det(1.0), DiscriminationProbability::new(0.4).unwrap(), 1e-9).unwrap();
        assert_eq!(unit.n_max(), 1);
        assert_eq!(unit.vertices().len(), 3);
        assert!(unit.is_convex());
    }

    #[test]
    fn polygon_membership() {
        let poly = build_insecurity_polygon(det(0.5), DiscriminationProbability::new(0.5).unwrap(), 1e-12).unwrap();
        assert!(poly.contains(ClickPoint::new(0.3, 0.1)));
        assert!(poly.contains(ClickPoint::new(0.25, 0.0)));
        assert!(poly.contains(ClickPoint::ORIGIN));
        assert!(!poly.contains(ClickPoint::new(0.3, 0.31)));
        assert!(!poly.contains(ClickPoint::new(0.51, 0.1)));
        assert!(!poly.contains(ClickPoint::new(0.3, -0.01)));
        // On the chord N=1 -> N=2: boundary counts as inside.
        let a = number_state_point(1, det(0.5), poly.p_d());
        let b = number_state_point(2, det(0.5), poly.p_d());
        assert!(poly.contains(a.lerp(b, 0.3)));
    }

    #[test]
    fn classify_examples() {
        let v = classify(mu(1.0), ch(0.1), det(0.5), CriteriaMode::PaperLinearized).unwrap();
        assert_eq!(v.verdict, Verdict::SecureAgainstUsd);
        let v = classify(mu(4.0), ch(0.1), det(0.5), CriteriaMode::PaperLinearized).unwrap();
        assert_eq!(v.verdict, Verdict::InsecureUnderUsd);
        assert!((v.f - -0.0407).abs() < 1e-4);
        assert!((v.mu2 - 13.459).abs() < 1e-3);
        for mode in [CriteriaMode::Geometric, CriteriaMode::PaperLinearized] {
            let v = classify(mu(1.0), ch(0.9), det(0.9), mode).unwrap();
            assert_eq!(v.verdict, Verdict::SecureAgainstUsd);
        }
        let g = classify(mu(4.0), ch(0.1), det(0.5), CriteriaMode::Geometric).unwrap();
        assert_eq!(g.verdict, Verdict::InsecureUnderUsd);
    }

    #[test]
    fn linearized_mode_indeterminate_beyond_mu2() {
        let v = classify(mu(20.0), ch(0.1), det(0.5), CriteriaMode::PaperLinearized).unwrap();
        assert_eq!(v.verdict, Verdict::Indeterminate);
        let g = classify(mu(20.0), ch(0.1), det(0.5), CriteriaMode::Geometric).unwrap();
        assert_ne!(g.verdict, Verdict::Indeterminate);
    }

    #[test]
    fn axis_spacing() {
        assert_eq!(
            Axis::linear(0.0, 1.0, 5).values().unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        let l = Axis::log(1e-4, 1.0, 5).values().unwrap();
        assert_eq!(l[0], 1e-4);
        assert_eq!(l[4], 1.0);
        assert!((l[2] - 1e-2).abs() < 1e-15);
        assert_eq!(Axis::single(3.0).values().unwrap(), vec![3.0]);
        assert!(Axis::linear(0.0, 1.0, 0).values().is_err());
        assert!(Axis::log(0.0, 1.0, 3).values().is_err());
    }

    #[test]
    fn single_cell_map_matches_classify() {
        let map = security_map(
            &Axis::single(4.0),
            &Axis::single(0.1),
            det(0.5),
            CriteriaMode::Geometric,
        )
        .unwrap();
        assert_eq!(map.cells.len(), 1);
        let direct = classify(mu(4.0), ch(0.1), det(0.5), CriteriaMode::Geometric).unwrap();
        assert_eq!(map.cells[0].verdict, direct);
    }

    #[test]
    fn f_root_fig5() {
        let root = f_root(ch(0.1), det(0.5), 0.1, 13.0, 1e-10).unwrap().unwrap();
        assert!((root - 2.068_084_967_422_033).abs() < 1e-8);
        assert!(f_root(ch(0.9), det(0.9), 0.1, 1.0, 1e-10).unwrap().is_none());
    }
}
