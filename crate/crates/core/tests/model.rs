//! Cross-module behaviour: security maps, the simulator against the analytic
//! click model, and region-level claims that span several operations.

use usd_attack::click::{
    number_state_point, working_point, ChannelParams, ClickPoint, DetectorParams, ResendDistribution,
};
use usd_attack::region::{classify, security_map, Axis, CriteriaMode, CriticalEta, Verdict, CRITERIA_MODEL};
use usd_attack::sim::{predicted_point, run_simulation, run_simulation_with_blocks, EveStrategy, SimConfig};
use usd_attack::usd::{usd_probability, usd_probability_series, MeanPhotonNumber};

fn mu(v: f64) -> MeanPhotonNumber {
    MeanPhotonNumber::new(v).unwrap()
}

fn ch(v: f64) -> ChannelParams {
    ChannelParams::new(v).unwrap()
}

fn det(v: f64) -> DetectorParams {
    DetectorParams::new(v).unwrap()
}

fn usd(n: u32, f: f64) -> EveStrategy {
    EveStrategy::usd(ResendDistribution::point_mass(n), f).unwrap()
}

fn sim(m: f64, eta_l: f64, eta_b: f64, eve: EveStrategy, trials: u64, seed: u64) -> SimConfig {
    SimConfig {
        mu: mu(m),
        ch: ch(eta_l),
        det: det(eta_b),
        eve,
        trials,
        seed,
    }
}

#[test]
fn small_etab_boundary_tracks_critical_eta() {
    let eta_axis = Axis::log(1e-4, 0.5, 60);
    let etas = eta_axis.values().unwrap();
    let map = security_map(
        &Axis::linear(0.1, 5.0, 25),
        &eta_axis,
        det(1e-3),
        CriteriaMode::Geometric,
    )
    .unwrap();
    let mut checked = 0;
    for (i, boundary) in map.boundaries.iter().enumerate() {
        let CriticalEta::Bound { exact, .. } = boundary.critical else {
            continue;
        };
        let column = &map.cells[i * etas.len()..(i + 1) * etas.len()];
        let first_secure = column
            .iter()
            .position(|c| c.verdict.verdict == Verdict::SecureAgainstUsd)
            .expect("secure cells at high transmission");
        assert!(column[first_secure..]
            .iter()
            .all(|c| c.verdict.verdict == Verdict::SecureAgainstUsd));
        assert!(first_secure > 0, "mu = {}", boundary.mu);
        // The flip happens in the cell containing exact, give or take one.
        let lo = etas[first_secure.saturating_sub(2)];
        let hi = etas[(first_secure + 1).min(etas.len() - 1)];
        assert!(
            lo <= exact && exact <= hi,
            "mu = {}: crit {exact} vs cells [{lo}, {hi}]",
            boundary.mu
        );
        checked += 1;
    }
    assert!(checked >= 15);
}

#[test]
fn map_is_secure_above_asymptotic_loss() {
    let map = security_map(
        &Axis::linear(0.1, 20.0, 40),
        &Axis::linear(0.6, 1.0, 9),
        det(0.5),
        CriteriaMode::Geometric,
    )
    .unwrap();
    assert_eq!(map.cells.len(), 360);
    assert!(map.cells.iter().all(|c| c.verdict.verdict != Verdict::InsecureUnderUsd));
}

#[test]
fn map_cells_match_classify() {
    let mus = Axis::linear(0.5, 6.0, 7);
    let etas = Axis::log(1e-3, 1.0, 9);
    for mode in [CriteriaMode::Geometric, CriteriaMode::PaperLinearized] {
        let map = security_map(&mus, &etas, det(0.3), mode).unwrap();
        for cell in &map.cells {
            assert_eq!(
                cell.verdict,
                classify(mu(cell.mu), ch(cell.eta_l), det(0.3), mode).unwrap()
            );
        }
    }
}

#[test]
fn geometric_security_persists_at_higher_transmission() {
    for b in [0.1, 0.5, 0.9] {
        for m in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let p_d = usd_probability(mu(m), CRITERIA_MODEL).get();
            let etas = Axis::linear(1e-3, 1.0, 200).values().unwrap();
            let Some(start) = etas.iter().position(|&e| {
                classify(mu(m), ch(e), det(b), CriteriaMode::Geometric).unwrap().verdict == Verdict::SecureAgainstUsd
            }) else {
                continue;
            };
            for &e in &etas[start..] {
                let v = classify(mu(m), ch(e), det(b), CriteriaMode::Geometric).unwrap();
                if v.working_point.p_single > p_d {
                    assert_ne!(v.verdict, Verdict::InsecureUnderUsd, "mu {m} eta_l {e} eta_b {b}");
                }
            }
        }
    }
}

#[test]
fn partial_attack_prediction_is_the_midpoint() {
    let config = sim(2.07, 0.1, 0.5, usd(2, 0.5), 1, 0);
    let p = predicted_point(&config).point;
    let honest = working_point(mu(2.07), ch(0.1), det(0.5));
    let attack = number_state_point(2, det(0.5), usd_probability(mu(2.07), CRITERIA_MODEL));
    assert!((attack.p_single - 0.139_970_860_559_935_8).abs() < 1e-12);
    assert!((attack.p_double - 0.023_328_476_759_989_3).abs() < 1e-12);
    let mid = ClickPoint::new(
        0.5 * (honest.p_single + attack.p_single),
        0.5 * (honest.p_double + attack.p_double),
    );
    assert!((p.p_single - mid.p_single).abs() < 1e-15);
    assert!((p.p_double - mid.p_double).abs() < 1e-15);
}

#[test]
fn honest_link_single_click_rate() {
    let r = run_simulation(&sim(1.0, 0.1, 0.5, EveStrategy::None, 1_000_000, 11)).unwrap();
    let se = (0.048_770_575_499_286 * (1.0 - 0.048_770_575_499_286) / r.counts.n_same_basis as f64).sqrt();
    assert!((r.est.p_single - 0.048_770_575_499_286).abs() <= 4.0 * se);
}

#[test]
fn full_attack_has_no_same_basis_double_clicks() {
    let r = run_simulation(&sim(4.0, 0.1, 0.5, usd(2, 1.0), 1_000_000, 5)).unwrap();
    assert_eq!(r.counts.double_clicks_same_basis, 0);
    let want = 0.366_751_316_358_83;
    let se = (want * (1.0 - want) / r.counts.n_same_basis as f64).sqrt();
    assert!((r.est.p_single - want).abs() <= 4.0 * se, "{}", r.est.p_single);
}

#[test]
fn conditional_sampling_recovers_marginal_success() {
    for (m, seed) in [(0.5, 1), (2.0, 2), (6.0, 3)] {
        let r = run_simulation(&sim(m, 0.1, 0.5, usd(1, 1.0), 500_000, seed)).unwrap();
        let rate = r.usd_success_rate().unwrap();
        let want = usd_probability_series(mu(m), 1e-15).unwrap().get();
        let se = (want * (1.0 - want) / r.counts.usd_attempts as f64).sqrt();
        assert!((rate - want).abs() <= 4.0 * se, "mu {m}: {rate} vs {want}");
    }
}

#[test]
fn vacuum_source_never_clicks() {
    for eve in [EveStrategy::None, usd(3, 1.0), usd(2, 0.4)] {
        let r = run_simulation(&sim(0.0, 0.7, 0.9, eve, 100_000, 3)).unwrap();
        let t = r.counts;
        assert_eq!(
            t.single_clicks_same_basis
                + t.double_clicks_same_basis
                + t.single_clicks_diff_basis
                + t.double_clicks_diff_basis,
            0
        );
    }
}

#[test]
fn report_independent_of_thread_count() {
    let config = sim(1.5, 0.3, 0.6, usd(2, 0.7), 200_000, 99);
    let serial = run_simulation_with_blocks(&config, Some(true)).unwrap();
    let parallel = run_simulation(&config).unwrap();
    let pooled = rayon::ThreadPoolBuilder::new()
        .num_threads(5)
        .build()
        .unwrap()
        .install(|| run_simulation(&config).unwrap());
    assert_eq!(serial, parallel);
    assert_eq!(serial, pooled);
}
