use crate::attacks::{beamsplit_report, compare_attacks, two_photon_split};
use crate::click::{n_curve_y, working_curve_y, working_point, ChannelParams, DetectorParams, ResendDistribution};
use crate::region::{
    build_insecurity_polygon, classify, critical_eta, f_criterion, f_root, mu2_threshold, necessary_threshold,
    security_map, small_etab_f, Axis, CriteriaMode, CriticalEta, CRITERIA_MODEL,
};
use crate::sim::{run_simulation, EveStrategy, SimConfig};
use crate::usd::{
    coherent_coefficients, fock_conditional_coefficients, usd_probability, usd_probability_n, usd_probability_series,
    DiscriminationProbability, MeanPhotonNumber, SourceModel,
};

use super::{CliError, Command, Document, ModeArg, ModelArg, SweepArgs};

type CmdResult = Result<Document, CliError>;

pub(super) fn dispatch(command: &Command) -> CmdResult {
    match command {
        Command::Coefficients { mu, fock, n_max, sweep } => coefficients(*mu, *fock, *n_max, sweep),
        Command::Pd {
            mu,
            model,
            sweep,
            range,
        } => pd(*mu, *model, *sweep, range),
        Command::Curves { eta_b, mu, p_d, steps } => curves(*eta_b, *mu, *p_d, *steps),
        Command::Region {
            mu,
            eta_b,
            eta_l,
            tol,
            steps,
        } => region(*mu, *eta_b, *eta_l, *tol, *steps),
        Command::Classify { mu, eta_l, eta_b, mode } => classify_cmd(*mu, *eta_l, *eta_b, *mode),
        Command::Map {
            mu,
            eta_l_from,
            eta_l_to,
            eta_l_steps,
            eta_l_log,
            eta_b,
            mode,
            necessary,
            small_etab,
        } => {
            let eta_l = Axis {
                from: *eta_l_from,
                to: *eta_l_to,
                steps: *eta_l_steps,
                log: *eta_l_log,
            };
            map(mu, eta_l, *eta_b, *mode, *necessary, *small_etab)
        }
        Command::Fscan { eta_l, eta_b, range } => fscan(*eta_l, *eta_b, range),
        Command::Beamsplit { mu, eta, range } => beamsplit(*mu, *eta, range),
        Command::Compare { mu, eta_l, eta_b } => compare(*mu, *eta_l, *eta_b),
        Command::Simulate {
            mu,
            eta_l,
            eta_b,
            trials,
            seed,
            resend,
            resend_weights,
            attack_fraction,
        } => simulate(
            *mu,
            *eta_l,
            *eta_b,
            *trials,
            *seed,
            *resend,
            resend_weights.as_deref(),
            *attack_fraction,
        ),
    }
}

fn domain(flag: &str, value: impl std::fmt::Display, expected: &str) -> CliError {
    CliError::Domain(format!("{flag} = {value} is out of range (expected {expected})"))
}

fn mu_flag(flag: &str, v: f64) -> Result<MeanPhotonNumber, CliError> {
    MeanPhotonNumber::new(v).map_err(|_| domain(flag, v, "finite and >= 0"))
}

fn eta_l_flag(flag: &str, v: f64) -> Result<ChannelParams, CliError> {
    ChannelParams::new(v).map_err(|_| domain(flag, v, "0 <= value <= 1"))
}

fn eta_b_flag(flag: &str, v: f64) -> Result<DetectorParams, CliError> {
    DetectorParams::new(v).map_err(|_| domain(flag, v, "0 < value <= 1"))
}

fn unit_flag(flag: &str, v: f64) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(domain(flag, v, "0 <= value <= 1"))
    }
}

fn steps_flag(flag: &str, v: usize) -> Result<usize, CliError> {
    if v >= 1 {
        Ok(v)
    } else {
        Err(domain(flag, v, ">= 1"))
    }
}

/// Resolves a sweep against defaults and validates it as a grid of mean
/// photon numbers (non-negative).
fn mu_sweep(args: &SweepArgs, defaults: (f64, f64, usize)) -> Result<Axis, CliError> {
    let axis = Axis {
        from: args.from.unwrap_or(defaults.0),
        to: args.to.unwrap_or(defaults.1),
        steps: steps_flag("--steps", args.steps.unwrap_or(defaults.2))?,
        log: args.log,
    };
    for (flag, v) in [("--from", axis.from), ("--to", axis.to)] {
        mu_flag(flag, v)?;
        if axis.log && v <= 0.0 {
            return Err(domain(flag, v, "> 0 with --log"));
        }
    }
    Ok(axis)
}

fn mu_axis(args: &SweepArgs, defaults: (f64, f64, usize)) -> Result<Vec<MeanPhotonNumber>, CliError> {
    Ok(mu_sweep(args, defaults)?
        .values()?
        .into_iter()
        .map(|v| MeanPhotonNumber::new(v).expect("between validated endpoints"))
        .collect())
}

fn source_model(m: ModelArg) -> SourceModel {
    match m {
        ModelArg::Fock => SourceModel::PhaseAveragedFock,
        ModelArg::Coherent => SourceModel::CoherentPure,
    }
}

fn model_name(m: SourceModel) -> &'static str {
    match m {
        SourceModel::PhaseAveragedFock => "fock",
        SourceModel::CoherentPure => "coherent",
    }
}

fn criteria_mode(m: ModeArg) -> CriteriaMode {
    match m {
        ModeArg::Geometric => CriteriaMode::Geometric,
        ModeArg::Paper => CriteriaMode::PaperLinearized,
    }
}

fn mode_name(m: CriteriaMode) -> &'static str {
    match m {
        CriteriaMode::Geometric => "geometric",
        CriteriaMode::PaperLinearized => "paper",
    }
}

fn linspace(a: f64, b: f64, steps: usize) -> Vec<f64> {
    Axis::linear(a, b, steps)
        .values()
        .expect("finite bounds and steps >= 1")
}

fn coefficients(mu: Option<f64>, fock: bool, n_max: u32, sweep: &SweepArgs) -> CmdResult {
    if fock {
        let mut doc = Document::new("coefficients-fock", &["n", "c0_sq", "c1_sq", "c2_sq", "c3_sq", "p_d_n"]);
        for n in 0..=n_max {
            let c = fock_conditional_coefficients(n).squared();
            doc.push(vec![
                n.into(),
                c[0].into(),
                c[1].into(),
                c[2].into(),
                c[3].into(),
                usd_probability_n(n).get().into(),
            ]);
        }
        return Ok(doc);
    }
    let mus = match mu {
        Some(m) => vec![mu_flag("--mu", m)?],
        None => mu_axis(sweep, (0.0, 10.0, 201))?,
    };
    let mut doc = Document::new("coefficients", &["mu", "c0_sq", "c1_sq", "c2_sq", "c3_sq", "p_d"]);
    for m in mus {
        let q = coherent_coefficients(m);
        let c = q.squared();
        doc.push(vec![
            m.get().into(),
            c[0].into(),
            c[1].into(),
            c[2].into(),
            c[3].into(),
            q.discrimination_probability().get().into(),
        ]);
    }
    Ok(doc)
}

fn pd(mu: Option<f64>, model: ModelArg, sweep: bool, range: &SweepArgs) -> CmdResult {
    if sweep {
        let mut doc = Document::new(
            "pd-sweep",
            &["mu", "w0", "w1", "w2", "w3", "p_d_coherent", "p_d_fock", "p_d_series"],
        );
        doc.meta("w_j", "4 |c_j|^2 of the coherent states");
        for m in mu_axis(range, (0.0, 10.0, 201))? {
            let c = coherent_coefficients(m).squared();
            doc.push(vec![
                m.get().into(),
                (4.0 * c[0]).into(),
                (4.0 * c[1]).into(),
                (4.0 * c[2]).into(),
                (4.0 * c[3]).into(),
                usd_probability(m, SourceModel::CoherentPure).get().into(),
                usd_probability(m, SourceModel::PhaseAveragedFock).get().into(),
                usd_probability_series(m, 1e-14)?.get().into(),
            ]);
        }
        return Ok(doc);
    }
    let mu = mu.ok_or_else(|| CliError::Usage("pd: --mu is required unless --sweep is given".into()))?;
    let mu = mu_flag("--mu", mu)?;
    let model = source_model(model);
    let mut doc = Document::new("pd", &["mu", "model", "p_d"]);
    doc.push(vec![
        mu.get().into(),
        model_name(model).into(),
        usd_probability(mu, model).get().into(),
    ]);
    Ok(doc)
}

fn resolve_p_d(mu: Option<f64>, p_d: Option<f64>) -> Result<DiscriminationProbability, CliError> {
    match (mu, p_d) {
        (_, Some(p)) => DiscriminationProbability::new(p).map_err(|_| domain("--p-d", p, "0 <= value <= 1")),
        (Some(m), None) => Ok(usd_probability(mu_flag("--mu", m)?, CRITERIA_MODEL)),
        (None, None) => Err(CliError::Usage("one of --mu or --p-d is required".into())),
    }
}

fn push_curves(doc: &mut Document, det: DetectorParams, p_d: DiscriminationProbability, steps: usize, with_n: bool) {
    for x in linspace(0.0, p_d.get(), steps) {
        let y = n_curve_y(x, det, p_d).expect("x within [0, p_d]");
        let mut row = vec!["n_curve".into()];
        if with_n {
            row.push(super::Cell::Null);
        }
        row.extend([x.into(), y.into()]);
        doc.push(row);
    }
    for x in linspace(0.0, 1.0, steps) {
        let y = working_curve_y(x).expect("x within [0, 1]");
        let mut row = vec!["working_curve".into()];
        if with_n {
            row.push(super::Cell::Null);
        }
        row.extend([x.into(), y.into()]);
        doc.push(row);
    }
}

fn curves(eta_b: f64, mu: Option<f64>, p_d: Option<f64>, steps: usize) -> CmdResult {
    let det = eta_b_flag("--eta-b", eta_b)?;
    let p_d = resolve_p_d(mu, p_d)?;
    let steps = steps_flag("--steps", steps)?;
    let mut doc = Document::new("curves", &["curve", "x", "y"]);
    doc.meta("eta_b", det.eta_b())
        .meta("p_d", p_d.get())
        .meta("kappa", det.kappa());
    push_curves(&mut doc, det, p_d, steps, false);
    Ok(doc)
}

fn region(mu: f64, eta_b: f64, eta_l: Option<f64>, tol: f64, steps: usize) -> CmdResult {
    let mu = mu_flag("--mu", mu)?;
    let det = eta_b_flag("--eta-b", eta_b)?;
    let ch = eta_l.map(|v| eta_l_flag("--eta-l", v)).transpose()?;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(domain("--tol", tol, "0 < value < 1"));
    }
    let steps = steps_flag("--steps", steps)?;
    let p_d = usd_probability(mu, CRITERIA_MODEL);
    let polygon = build_insecurity_polygon(det, p_d, tol)?;

    let mut doc = Document::new("region", &["series", "n", "x", "y"]);
    doc.meta("mu", mu.get())
        .meta("eta_b", det.eta_b())
        .meta("p_d", p_d.get())
        .meta("n_max", polygon.n_max())
        .meta("kappa", det.kappa());
    let count = polygon.vertices().len();
    for (i, v) in polygon.vertices().iter().enumerate() {
        // The last vertex is the N -> infinity saturation point.
        let n = if i + 1 == count && count > 1 {
            super::Cell::Null
        } else {
            (i as u64).into()
        };
        doc.push(vec!["vertex".into(), n, v.p_single.into(), v.p_double.into()]);
    }
    push_curves(&mut doc, det, p_d, steps, true);
    if let Some(ch) = ch {
        let wp = working_point(mu, ch, det);
        let verdict = classify(mu, ch, det, CriteriaMode::Geometric)?;
        doc.meta("eta_l", ch.eta_l()).meta("verdict", verdict.verdict.as_str());
        doc.push(vec![
            "working_point".into(),
            super::Cell::Null,
            wp.p_single.into(),
            wp.p_double.into(),
        ]);
    }
    Ok(doc)
}

fn classify_cmd(mu: f64, eta_l: f64, eta_b: f64, mode: ModeArg) -> CmdResult {
    let mu = mu_flag("--mu", mu)?;
    let ch = eta_l_flag("--eta-l", eta_l)?;
    let det = eta_b_flag("--eta-b", eta_b)?;
    let mode = criteria_mode(mode);
    let v = classify(mu, ch, det, mode)?;
    let mut doc = Document::new(
        "classify",
        &[
            "mu",
            "eta_l",
            "eta_b",
            "mode",
            "verdict",
            "f",
            "mu2",
            "necessary_margin",
            "p_single",
            "p_double",
            "p_d",
        ],
    );
    doc.push(vec![
        mu.get().into(),
        ch.eta_l().into(),
        det.eta_b().into(),
        mode_name(mode).into(),
        v.verdict.as_str().into(),
        v.f.into(),
        v.mu2.into(),
        v.necessary_margin.into(),
        v.working_point.p_single.into(),
        v.working_point.p_double.into(),
        v.p_d.into(),
    ]);
    Ok(doc)
}

fn map(mu: &SweepArgs, eta_l: Axis, eta_b: f64, mode: ModeArg, necessary: bool, small_etab: bool) -> CmdResult {
    let det = eta_b_flag("--eta-b", eta_b)?;
    if necessary {
        let mus = mu_axis(mu, (0.1, 5.0, 50))?;
        let mut doc = Document::new("map-necessary", &["mu", "p_d", "eta_total_threshold"]);
        for m in mus {
            let t = necessary_threshold(m, CRITERIA_MODEL)
                .map_err(|_| domain("--from", m.get(), "> 0 with --necessary"))?;
            doc.push(vec![
                m.get().into(),
                usd_probability(m, CRITERIA_MODEL).get().into(),
                t.into(),
            ]);
        }
        doc.meta("limit_mu_to_infinity", 1.0 - std::f64::consts::FRAC_1_SQRT_2);
        return Ok(doc);
    }

    if small_etab {
        let mus = mu_axis(mu, (0.1, 5.0, 50))?;
        let mut doc = Document::new(
            "map-small-etab",
            &[
                "mu",
                "p_d",
                "eta_l_critical",
                "eta_l_critical_approx",
                "eta_l_leading",
                "eta_l_mu2",
            ],
        );
        doc.meta("eta_b", det.eta_b());
        // eta_L * mu2 depends on eta_B only.
        let mu2_at_unit = mu2_threshold(ChannelParams::new(1.0)?, det)?;
        for m in mus {
            let crit = critical_eta(m).map_err(|_| domain("--from", m.get(), "> 0 with --small-etab"))?;
            let (exact, approx, leading) = match crit {
                CriticalEta::Bound { exact, approx, leading } => (Some(exact), Some(approx), Some(leading)),
                CriticalEta::BeyondBranchPoint { .. } => (None, None, Some(m.get() * m.get() / 12.0)),
            };
            doc.push(vec![
                m.get().into(),
                usd_probability(m, CRITERIA_MODEL).get().into(),
                exact.into(),
                approx.into(),
                leading.into(),
                (mu2_at_unit / m.get()).into(),
            ]);
        }
        return Ok(doc);
    }

    for (flag, v) in [("--eta-l-from", eta_l.from), ("--eta-l-to", eta_l.to)] {
        eta_l_flag(flag, v)?;
        if eta_l.log && v <= 0.0 {
            return Err(domain(flag, v, "> 0 with --eta-l-log"));
        }
    }
    steps_flag("--eta-l-steps", eta_l.steps)?;
    let mode = criteria_mode(mode);
    let grid = security_map(&mu_sweep(mu, (0.1, 5.0, 50))?, &eta_l, det, mode)?;
    let mut doc = Document::new("map", &["mu", "eta_l", "verdict", "f", "mu2", "p_single", "p_double"]);
    doc.meta("eta_b", det.eta_b()).meta("mode", mode_name(mode));
    for cell in grid.cells {
        doc.push(vec![
            cell.mu.into(),
            cell.eta_l.into(),
            cell.verdict.verdict.as_str().into(),
            cell.verdict.f.into(),
            cell.verdict.mu2.into(),
            cell.verdict.working_point.p_single.into(),
            cell.verdict.working_point.p_double.into(),
        ]);
    }
    Ok(doc)
}

fn fscan(eta_l: f64, eta_b: f64, range: &SweepArgs) -> CmdResult {
    let ch = eta_l_flag("--eta-l", eta_l)?;
    let det = eta_b_flag("--eta-b", eta_b)?;
    let mu2 = mu2_threshold(ch, det).map_err(|_| domain("--eta-l", eta_l, "> 0"))?;
    let mus = mu_axis(range, (0.0, mu2, 201))?;
    let root = f_root(ch, det, mu2 * 1e-6, mu2, 1e-12)?;
    let mut doc = Document::new("fscan", &["mu", "f", "small_etab_f"]);
    doc.meta("eta_l", ch.eta_l())
        .meta("eta_b", det.eta_b())
        .meta("mu2", mu2)
        .meta("f_root", root);
    for m in mus {
        doc.push(vec![
            m.get().into(),
            f_criterion(m, ch, det).into(),
            small_etab_f(m, ch, det).into(),
        ]);
    }
    Ok(doc)
}

fn beamsplit(mu: Option<f64>, eta: f64, range: &SweepArgs) -> CmdResult {
    let eta = unit_flag("--eta", eta)?;
    let mus = match mu {
        Some(m) => vec![mu_flag("--mu", m)?],
        None => mu_axis(range, (0.0, 10.0, 201))?,
    };
    let (p02, p11, p20) = two_photon_split(eta)?;
    let mut doc = Document::new(
        "beamsplit",
        &["mu", "eta", "p_exp", "p_split", "g_bs", "p02", "p11", "p20"],
    );
    for m in mus {
        let r = beamsplit_report(m, eta)?;
        doc.push(vec![
            m.get().into(),
            eta.into(),
            r.p_exp.into(),
            r.p_split.into(),
            r.g_bs.into(),
            p02.into(),
            p11.into(),
            p20.into(),
        ]);
    }
    Ok(doc)
}

fn compare(mu: f64, eta_l: f64, eta_b: f64) -> CmdResult {
    let mu = mu_flag("--mu", mu)?;
    let ch = eta_l_flag("--eta-l", eta_l)?;
    let det = eta_b_flag("--eta-b", eta_b)?;
    let c = compare_attacks(mu, ch, det)?;
    let mut doc = Document::new(
        "compare",
        &[
            "mu",
            "eta_l",
            "eta_b",
            "eta_total",
            "p_exp",
            "p_split",
            "g_bs",
            "p_d",
            "verdict",
            "crossover_eta_l",
        ],
    );
    doc.push(vec![
        mu.get().into(),
        ch.eta_l().into(),
        det.eta_b().into(),
        (ch.eta_l() * det.eta_b()).into(),
        c.beamsplit.p_exp.into(),
        c.beamsplit.p_split.into(),
        c.beamsplit.g_bs.into(),
        c.usd_p_d.get().into(),
        c.usd_verdict.verdict.as_str().into(),
        c.crossover_eta.into(),
    ]);
    Ok(doc)
}

fn parse_weights(text: &str) -> Result<Vec<(u32, f64)>, CliError> {
    text.split(',')
        .map(|pair| {
            let (n, w) = pair
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("--resend-weights: expected N:weight, got `{pair}`")))?;
            let n = n
                .trim()
                .parse::<u32>()
                .map_err(|_| CliError::Usage(format!("--resend-weights: bad photon number `{n}`")))?;
            let w = w
                .trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("--resend-weights: bad weight `{w}`")))?;
            Ok((n, w))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    mu: f64,
    eta_l: f64,
    eta_b: f64,
    trials: u64,
    seed: u64,
    resend: Option<u32>,
    resend_weights: Option<&str>,
    attack_fraction: Option<f64>,
) -> CmdResult {
    let mu = mu_flag("--mu", mu)?;
    let ch = eta_l_flag("--eta-l", eta_l)?;
    let det = eta_b_flag("--eta-b", eta_b)?;
    if trials == 0 {
        return Err(domain("--trials", trials, ">= 1"));
    }
    let law = match (resend, resend_weights) {
        (Some(n), _) => Some((ResendDistribution::point_mass(n), n.to_string())),
        (None, Some(text)) => {
            let dist = ResendDistribution::new(parse_weights(text)?)
                .map_err(|e| CliError::Domain(format!("--resend-weights: {e}")))?;
            Some((dist, text.to_owned()))
        }
        (None, None) => None,
    };
    let (eve, resend_label) = match (law, attack_fraction) {
        (None, Some(f)) if f > 0.0 => {
            return Err(CliError::Usage(
                "--attack-fraction needs --resend or --resend-weights".into(),
            ))
        }
        (None, _) => (EveStrategy::None, "none".to_owned()),
        (Some((dist, label)), f) => {
            let f = unit_flag("--attack-fraction", f.unwrap_or(1.0))?;
            (EveStrategy::usd(dist, f)?, label)
        }
    };
    let config = SimConfig {
        mu,
        ch,
        det,
        eve,
        trials,
        seed,
    };
    let r = run_simulation(&config)?;
    let t = r.counts;
    let mut doc = Document::new(
        "simulate",
        &[
            "trials",
            "seed",
            "n_same_basis",
            "n_diff_basis",
            "single_clicks_same_basis",
            "double_clicks_same_basis",
            "single_clicks_diff_basis",
            "double_clicks_diff_basis",
            "usd_attempts",
            "usd_successes",
            "p_single_est",
            "p_double_est",
            "ci95_single",
            "ci95_double",
            "p_single_pred",
            "p_double_pred",
            "z_single",
            "z_double",
        ],
    );
    doc.meta("mu", mu.get())
        .meta("eta_l", ch.eta_l())
        .meta("eta_b", det.eta_b())
        .meta("attack_fraction", config.eve.attack_fraction())
        .meta("resend", resend_label);
    doc.push(vec![
        r.trials.into(),
        r.seed.into(),
        t.n_same_basis.into(),
        t.n_diff_basis.into(),
        t.single_clicks_same_basis.into(),
        t.double_clicks_same_basis.into(),
        t.single_clicks_diff_basis.into(),
        t.double_clicks_diff_basis.into(),
        t.usd_attempts.into(),
        t.usd_successes.into(),
        r.est.p_single.into(),
        r.est.p_double.into(),
        r.ci95.p_single.into(),
        r.ci95.p_double.into(),
        r.predicted.point.p_single.into(),
        r.predicted.point.p_double.into(),
        r.z_scores.p_single.into(),
        r.z_scores.p_double.into(),
    ]);
    Ok(doc)
}
