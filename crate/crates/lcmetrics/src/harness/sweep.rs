//! The experiment runner: instantiate the suite, compute every requested
//! metric and bound per pair, fit constants over the whole sweep, and
//! collect per-distribution checks.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{ExperimentConfig, PairMode, PQ_PAIRS};
use crate::bounds::{self, BoundCheck, BoundId, CheckOptions, PairIngredients};
use crate::dist::LogConcaveDensity;
use crate::error::{Error, Result};
use crate::metrics::{self, MetricResult};

pub const SMOOTHING_T_GRID: [f64; 4] = [0.4, 0.2, 0.1, 0.05];
pub const TAIL_R_OVER_SQRT_N: [f64; 3] = [3.0, 4.0, 5.0];
pub const MOMENT_P_GRID: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct MetricValue {
    pub value: f64,
    pub abs_error: f64,
}

impl From<&MetricResult> for MetricValue {
    fn from(r: &MetricResult) -> Self {
        MetricValue {
            value: r.value,
            abs_error: r.abs_error,
        }
    }
}

/// One sweep point: a pair of distributions at one interpolation value.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ExperimentRecord {
    pub pair_id: String,
    pub n: usize,
    pub t: Option<f64>,
    /// Requested metric id -> value; `None` when the metric does not apply
    /// (e.g. Kolmogorov in n >= 2).
    pub metrics: BTreeMap<String, Option<MetricValue>>,
    /// Expanded bound column id -> outcome; `None` when not applicable.
    pub bounds: BTreeMap<String, Option<BoundCheck>>,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SweepOutput {
    pub config: ExperimentConfig,
    pub records: Vec<ExperimentRecord>,
    /// Fitted constant per bound id (expanded for wq-wp); `None` marks an
    /// all-vacuous fit.
    pub fitted_constants: BTreeMap<String, Option<f64>>,
    /// Per-distribution and global checks (smoothing, tails, moments,
    /// log-density variance, entropy cap, isotropic constant, min-lemma).
    pub member_checks: Vec<BoundCheck>,
}

impl SweepOutput {
    pub fn any_failure(&self) -> bool {
        let record_fail = self.records.iter().any(|r| {
            r.bounds
                .values()
                .flatten()
                .any(|c| !c.holds && !c.vacuous)
        });
        record_fail || self.member_checks.iter().any(|c| !c.holds && !c.vacuous)
    }
}

struct PairData {
    pair_id: String,
    n: usize,
    t: Option<f64>,
    mu_is_isotropic: bool,
    nu_is_gaussian: bool,
    ing: PairIngredients,
    entropy: MetricResult,
    wall_time_ms: f64,
}

fn is_standard_gaussian(d: &LogConcaveDensity) -> bool {
    d.components()
        .iter()
        .all(|c| matches!(c, crate::dist::Component::Gaussian { mean: 0.0, sd } if *sd == 1.0))
}

/// Run the full sweep described by the config.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepOutput> {
    config.validate()?;
    let opts = config.check_options();

    // instantiate the suite
    let mut instances: Vec<(Option<f64>, LogConcaveDensity)> = Vec::new();
    for spec in &config.suite {
        instances.extend(spec.instantiate()?);
    }

    // form pairs
    let pairs: Vec<(Option<f64>, LogConcaveDensity, LogConcaveDensity)> = match &config.pairs {
        PairMode::Named(mode) => {
            let all = mode == "all-pairs";
            if all {
                let mut v = Vec::new();
                for i in 0..instances.len() {
                    for j in (i + 1)..instances.len() {
                        if instances[i].1.dimension() == instances[j].1.dimension() {
                            v.push((
                                instances[i].0.or(instances[j].0),
                                instances[i].1.clone(),
                                instances[j].1.clone(),
                            ));
                        }
                    }
                }
                v
            } else {
                instances
                    .iter()
                    .map(|(t, d)| {
                        Ok((
                            *t,
                            d.clone(),
                            LogConcaveDensity::standard_gaussian(d.dimension())?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        }
        PairMode::Explicit(idx) => {
            let mut v = Vec::new();
            for &[i, j] in idx {
                let a = instances.get(i).ok_or_else(|| {
                    Error::InvalidConfig(format!("pair index {i} out of range"))
                })?;
                let b = instances.get(j).ok_or_else(|| {
                    Error::InvalidConfig(format!("pair index {j} out of range"))
                })?;
                if a.1.dimension() != b.1.dimension() {
                    return Err(Error::InvalidConfig(format!(
                        "pair ({i}, {j}) mixes dimensions"
                    )));
                }
                v.push((a.0.or(b.0), a.1.clone(), b.1.clone()));
            }
            v
        }
    };

    // per-pair distances (parallel; deterministic because every Monte-Carlo
    // substream is keyed by (seed, operation id))
    let mut pair_data: Vec<PairData> = pairs
        .par_iter()
        .map(|(t, mu, nu)| -> Result<PairData> {
            let start = Instant::now();
            let ing = PairIngredients::compute(mu, nu, &opts)?;
            let entropy = metrics::differential_entropy(mu)?;
            Ok(PairData {
                pair_id: format!("{}|{}", mu.label(), nu.label()),
                n: mu.dimension(),
                t: *t,
                mu_is_isotropic: mu.is_isotropic(),
                nu_is_gaussian: is_standard_gaussian(nu),
                ing,
                entropy,
                wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    pair_data.sort_by(|a, b| {
        a.pair_id
            .cmp(&b.pair_id)
            .then(a.t.partial_cmp(&b.t).unwrap_or(std::cmp::Ordering::Equal))
    });

    let bound_ids: Vec<BoundId> = config
        .bounds
        .iter()
        .map(|b| BoundId::parse(b))
        .collect::<Result<Vec<_>>>()?;

    // fit the reversed-bound constants over the whole sweep
    let mut fitted: BTreeMap<String, Option<f64>> = BTreeMap::new();
    let provisional = |d: &PairData, id: BoundId| -> Option<BoundCheck> {
        pair_bound_check(d, id, None, 1.0, &opts, (1.0, 2.0))
    };
    for id in [BoundId::TvBl, BoundId::Bhvv, BoundId::W1Bl, BoundId::HTv, BoundId::HTvBoundedLf] {
        if !bound_ids.contains(&id) {
            continue;
        }
        let inst: Vec<BoundCheck> = pair_data.iter().filter_map(|d| provisional(d, id)).collect();
        fitted.insert(id.as_str().to_string(), bounds::fit_constant(&inst).ok());
    }

    // the inner constant of the moment comparison comes from the norm-moment
    // fit over the suite members, fitted first
    let members = dedup_members(&instances);
    let inner_c = if bound_ids.contains(&BoundId::WqWp) || bound_ids.contains(&BoundId::PaourisMoment)
    {
        fit_moment_constant(&members, &opts)?
    } else {
        1.0
    };
    if bound_ids.contains(&BoundId::WqWp) {
        for (p, q) in PQ_PAIRS {
            let inst: Vec<BoundCheck> = pair_data
                .iter()
                .filter_map(|d| wq_wp_check(d, p, q, inner_c, None, &opts))
                .collect();
            fitted.insert(
                format!("wq-wp-p{p}-q{q}"),
                bounds::fit_constant(&inst).ok(),
            );
        }
    }

    // final per-pair records at the fitted constants
    let records: Vec<ExperimentRecord> = pair_data
        .iter()
        .map(|d| build_record(d, config, &bound_ids, &fitted, inner_c, &opts))
        .collect();

    // per-distribution and global checks
    let member_checks = member_checks(&members, &bound_ids, inner_c, &opts, &mut fitted)?;

    Ok(SweepOutput {
        config: config.clone(),
        records,
        fitted_constants: fitted,
        member_checks,
    })
}

fn dedup_members(instances: &[(Option<f64>, LogConcaveDensity)]) -> Vec<LogConcaveDensity> {
    let mut seen = std::collections::BTreeSet::new();
    let mut v = Vec::new();
    for (_, d) in instances {
        if seen.insert(d.label().to_string()) {
            v.push(d.clone());
        }
    }
    v
}

/// A single pair-level bound check at a given constant. Returns `None`
/// when the bound does not apply to this pair.
fn pair_bound_check(
    d: &PairData,
    id: BoundId,
    c: Option<f64>,
    inner_c: f64,
    opts: &CheckOptions,
    pq: (f64, f64),
) -> Option<BoundCheck> {
    let ing = &d.ing;
    let tol = |errs: &[f64]| opts.tolerance + errs.iter().sum::<f64>();
    match id {
        BoundId::ClassicalBlTv => Some(bounds::eval_classical_bl_tv(
            ing.bl.value,
            ing.tv.value,
            tol(&[ing.bl.abs_error, ing.tv.abs_error]),
            &ing.inputs,
        )),
        BoundId::ClassicalBlW1 => Some(bounds::eval_classical_bl_w1(
            ing.bl.value,
            ing.w1.value,
            tol(&[ing.bl.abs_error, ing.w1.abs_error]),
            &ing.inputs,
        )),
        BoundId::Pinsker => {
            let h = ing.relative_entropy.value;
            Some(bounds::eval_pinsker(
                ing.tv.value,
                h,
                tol(&[ing.tv.abs_error, ing.relative_entropy.abs_error]),
                &ing.inputs,
            ))
        }
        BoundId::TvBl => {
            if !d.mu_is_isotropic {
                return None;
            }
            Some(bounds::eval_tv_bl(
                d.n,
                ing.tv.value,
                ing.bl.value,
                c,
                tol(&[ing.tv.abs_error, ing.bl.abs_error]),
                &ing.inputs,
            ))
        }
        BoundId::Bhvv => {
            if d.n != 1 || !d.nu_is_gaussian {
                return None;
            }
            let dk = ing.kolmogorov.as_ref()?;
            Some(bounds::eval_bhvv(
                ing.tv.value,
                dk.value,
                c,
                tol(&[ing.tv.abs_error, dk.abs_error]),
                &ing.inputs,
            ))
        }
        BoundId::W1Bl => {
            if !d.mu_is_isotropic {
                return None;
            }
            Some(bounds::eval_w1_bl(
                d.n,
                ing.w1.value,
                ing.bl.value,
                c,
                tol(&[ing.w1.abs_error, ing.bl.abs_error]),
                &ing.inputs,
            ))
        }
        BoundId::WqWp => wq_wp_check(d, pq.0, pq.1, inner_c, c, opts),
        BoundId::HTv | BoundId::HTvBoundedLf => {
            if !d.nu_is_gaussian || !d.mu_is_isotropic {
                return None;
            }
            let h = ing.relative_entropy.value;
            let t = tol(&[ing.relative_entropy.abs_error, ing.tv.abs_error]);
            Some(if id == BoundId::HTv {
                bounds::eval_h_tv(d.n, h, ing.tv.value, c, t, &ing.inputs)
            } else {
                bounds::eval_h_tv_bounded_lf(d.n, h, ing.tv.value, c, t, &ing.inputs)
            })
        }
        BoundId::WpMonotone => None, // expanded separately per (p, q)
        _ => None,                   // distribution-level ids
    }
}

fn wq_wp_check(
    d: &PairData,
    p: f64,
    q: f64,
    inner_c: f64,
    c: Option<f64>,
    opts: &CheckOptions,
) -> Option<BoundCheck> {
    // exact quantile values are only available in 1-D; the coordinatewise
    // upper bound on the left side would not be conservative
    if d.n != 1 || !d.mu_is_isotropic {
        return None;
    }
    let (wp, wq) = match (p, q) {
        (1.0, 2.0) => (&d.ing.w1, &d.ing.w2),
        (1.0, 4.0) => (&d.ing.w1, &d.ing.w4),
        (2.0, 4.0) => (&d.ing.w2, &d.ing.w4),
        _ => return None,
    };
    Some(bounds::eval_wq_wp(
        d.n,
        wp.value,
        wq.value,
        p,
        q,
        inner_c,
        c,
        opts.tolerance + wp.abs_error + wq.abs_error,
        &d.ing.inputs,
    ))
}

fn wp_monotone_check(d: &PairData, p: f64, q: f64, opts: &CheckOptions) -> Option<BoundCheck> {
    let get = |o: f64| -> Option<&MetricResult> {
        match o {
            1.0 => Some(&d.ing.w1),
            2.0 => Some(&d.ing.w2),
            4.0 => Some(&d.ing.w4),
            _ => None,
        }
    };
    let wp = get(p)?;
    let wq = get(q)?;
    Some(bounds::eval_wp_monotone(
        wp.value,
        wq.value,
        p,
        q,
        opts.tolerance + wp.abs_error + wq.abs_error,
        &d.ing.inputs,
    ))
}

fn build_record(
    d: &PairData,
    config: &ExperimentConfig,
    bound_ids: &[BoundId],
    fitted: &BTreeMap<String, Option<f64>>,
    inner_c: f64,
    opts: &CheckOptions,
) -> ExperimentRecord {
    let mut metric_map: BTreeMap<String, Option<MetricValue>> = BTreeMap::new();
    for m in &config.metrics {
        let value = match m.as_str() {
            "tv" => Some((&d.ing.tv).into()),
            "kolmogorov" => d.ing.kolmogorov.as_ref().map(|k| k.into()),
            "bl" => Some((&d.ing.bl).into()),
            "w1" => Some((&d.ing.w1).into()),
            "w2" => Some((&d.ing.w2).into()),
            "w4" => Some((&d.ing.w4).into()),
            "kl" => Some((&d.ing.relative_entropy).into()),
            "entropy" => Some((&d.entropy).into()),
            _ => None,
        };
        metric_map.insert(m.clone(), value);
    }

    let mut bound_map: BTreeMap<String, Option<BoundCheck>> = BTreeMap::new();
    for &id in bound_ids {
        match id {
            BoundId::WpMonotone => {
                for (p, q) in PQ_PAIRS {
                    bound_map.insert(
                        format!("wp-monotone-p{p}-q{q}"),
                        wp_monotone_check(d, p, q, opts),
                    );
                }
            }
            BoundId::WqWp => {
                for (p, q) in PQ_PAIRS {
                    let key = format!("wq-wp-p{p}-q{q}");
                    let c = fitted.get(&key).copied().flatten();
                    bound_map.insert(key, wq_wp_check(d, p, q, inner_c, c, opts));
                }
            }
            BoundId::EldanKlartag
            | BoundId::PaourisTail
            | BoundId::PaourisMoment
            | BoundId::BobkovMadiman
            | BoundId::MaxEntropy
            | BoundId::IsotropicConstant
            | BoundId::MinLemma => {
                // distribution-level; reported via member checks
            }
            _ => {
                let c = fitted.get(id.as_str()).copied().flatten();
                bound_map.insert(
                    id.as_str().to_string(),
                    pair_bound_check(d, id, c, inner_c, opts, (1.0, 2.0)),
                );
            }
        }
    }

    ExperimentRecord {
        pair_id: d.pair_id.clone(),
        n: d.n,
        t: d.t,
        metrics: metric_map,
        bounds: bound_map,
        wall_time_ms: d.wall_time_ms,
    }
}

fn fit_moment_constant(members: &[LogConcaveDensity], opts: &CheckOptions) -> Result<f64> {
    let mut checks = Vec::new();
    for m in members {
        for p in MOMENT_P_GRID {
            let (val, band) = bounds::paouris_moment(m, p, opts.mc_samples, opts.seed)?;
            checks.push(bounds::eval_paouris_moment(
                m.dimension(),
                p,
                val,
                None,
                opts.tolerance + band,
                m.label(),
            ));
        }
    }
    bounds::fit_constant(&checks)
}

fn member_checks(
    members: &[LogConcaveDensity],
    bound_ids: &[BoundId],
    moment_c: f64,
    opts: &CheckOptions,
    fitted: &mut BTreeMap<String, Option<f64>>,
) -> Result<Vec<BoundCheck>> {
    let mut out = Vec::new();

    if bound_ids.contains(&BoundId::EldanKlartag) {
        let mut checks = Vec::new();
        for m in members.iter().filter(|m| m.dimension() == 1) {
            for t in SMOOTHING_T_GRID {
                let gap = bounds::deconvolution_gap_1d(m, t)?;
                checks.push(bounds::eval_eldan_klartag(
                    1,
                    gap.value,
                    t,
                    None,
                    opts.tolerance + gap.abs_error,
                    m.label(),
                ));
            }
        }
        let c = bounds::fit_constant(&checks).ok();
        fitted.insert(BoundId::EldanKlartag.as_str().to_string(), c);
        for check in &mut checks {
            apply_constant(check, c);
        }
        out.extend(checks);
    }

    if bound_ids.contains(&BoundId::PaourisMoment) {
        let mut checks = Vec::new();
        for m in members {
            for p in MOMENT_P_GRID {
                let (val, band) = bounds::paouris_moment(m, p, opts.mc_samples, opts.seed)?;
                checks.push(bounds::eval_paouris_moment(
                    m.dimension(),
                    p,
                    val,
                    Some(moment_c),
                    opts.tolerance + band,
                    m.label(),
                ));
            }
        }
        fitted.insert(BoundId::PaourisMoment.as_str().to_string(), Some(moment_c));
        out.extend(checks);
    }

    if bound_ids.contains(&BoundId::PaourisTail) {
        let mut raw = Vec::new();
        for m in members {
            let sqrt_n = (m.dimension() as f64).sqrt();
            for r_scale in TAIL_R_OVER_SQRT_N {
                let r = r_scale * sqrt_n;
                let (prob, band) = bounds::paouris_tail(m, r, opts.mc_samples, opts.seed)?;
                raw.push((m.label().to_string(), r, prob, band));
            }
        }
        let rate = bounds::fit_tail_rate(
            &raw.iter().map(|(_, r, p, _)| (*p, *r)).collect::<Vec<_>>(),
        )?;
        fitted.insert(BoundId::PaourisTail.as_str().to_string(), Some(rate));
        for (label, r, prob, band) in raw {
            out.push(bounds::eval_paouris_tail(
                prob,
                r,
                rate,
                opts.tolerance + band,
                &label,
            ));
        }
    }

    if bound_ids.contains(&BoundId::BobkovMadiman) {
        let mut checks = Vec::new();
        for m in members {
            let (var, band) = bounds::bobkov_madiman_variance(m, opts.mc_samples, opts.seed)?;
            checks.push(bounds::eval_bobkov_madiman(
                m.dimension(),
                var,
                None,
                opts.tolerance + band,
                m.label(),
            ));
        }
        let c = bounds::fit_constant(&checks).ok();
        fitted.insert(BoundId::BobkovMadiman.as_str().to_string(), c);
        for check in &mut checks {
            apply_constant(check, c);
        }
        out.extend(checks);
    }

    if bound_ids.contains(&BoundId::MaxEntropy) {
        for m in members.iter().filter(|m| m.is_isotropic()) {
            out.push(bounds::check_max_entropy(m, opts.tolerance)?);
        }
    }

    if bound_ids.contains(&BoundId::IsotropicConstant) {
        for m in members {
            out.push(bounds::check_isotropic_constant(m, opts.tolerance));
        }
    }

    if bound_ids.contains(&BoundId::MinLemma) {
        out.push(min_lemma_sweep(opts));
    }

    Ok(out)
}

/// Re-evaluate a ratio-style check at a suite-fitted constant.
fn apply_constant(check: &mut BoundCheck, c: Option<f64>) {
    if let (Some(c), Some(ratio)) = (c, check.ratio) {
        let rhs1 = if ratio > 0.0 { check.lhs / ratio } else { 0.0 };
        check.fitted_constant = Some(c);
        check.rhs = c * rhs1;
        check.slack = check.rhs - check.lhs;
        check.holds = check.vacuous || check.slack >= -check.numerical_tolerance;
    }
}

/// 10^4 random draws of the optimization lemma; one summary check with the
/// worst slack.
fn min_lemma_sweep(opts: &CheckOptions) -> BoundCheck {
    use rand::Rng;
    let mut rng = crate::num::substream(opts.seed, "min-lemma-sweep");
    let mut worst: Option<BoundCheck> = None;
    let draws = 10_000;
    for _ in 0..draws {
        let a = rng.gen_range(0.01..10.0);
        let b = rng.gen_range(0.01..50.0);
        let m = rng.gen_range(0.05..5.0);
        let k = rng.gen_range(0.2..4.0);
        let lemma = bounds::min_lemma_bound(a, b, m, k).expect("positive draws");
        let check = lemma.as_check(1e-12, format!("A={a:.4},B={b:.4},M={m:.4},k={k:.4}"));
        let replace = match &worst {
            None => true,
            Some(w) => check.slack < w.slack,
        };
        if replace {
            worst = Some(check);
        }
    }
    let mut w = worst.expect("nonzero draws");
    w.inputs = format!("{draws} random draws; worst: {}", w.inputs);
    w
}
