//! Comparison inequalities as checkable predicates.
//!
//! Each inequality between the distances has explicit left and right sides
//! and an unspecified positive constant. The constant is treated as a free
//! parameter: `fit_constant` returns the smallest suite-wide value making
//! every instance hold (the max of per-instance ratios), and a `BoundCheck`
//! records both sides, the slack, and the verdict at a given constant.
//! Tail-rate fitting (`fit_tail_rate`) goes the other way: the largest
//! decay rate that every tail estimate still satisfies.
//!
//! The module also houses the supporting checks: the optimization lemma,
//! Gaussian-smoothing L1 gaps, norm tail/moment concentration, the variance
//! of the log-density, the maximum-entropy bound, and the isotropic
//! constant.

mod checks;

pub use checks::*;

use crate::dist::LogConcaveDensity;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::metrics::{self, MetricResult};
use crate::num::{integrate_abs, substream, RunningStats};

use statrs::function::gamma::gamma_ur;

/// Stable identifiers for every checkable inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundId {
    ClassicalBlTv,
    TvBl,
    Bhvv,
    ClassicalBlW1,
    W1Bl,
    WpMonotone,
    WqWp,
    Pinsker,
    HTv,
    HTvBoundedLf,
    EldanKlartag,
    PaourisTail,
    PaourisMoment,
    BobkovMadiman,
    MaxEntropy,
    IsotropicConstant,
    MinLemma,
}

impl BoundId {
    pub const ALL: [BoundId; 17] = [
        BoundId::ClassicalBlTv,
        BoundId::TvBl,
        BoundId::Bhvv,
        BoundId::ClassicalBlW1,
        BoundId::W1Bl,
        BoundId::WpMonotone,
        BoundId::WqWp,
        BoundId::Pinsker,
        BoundId::HTv,
        BoundId::HTvBoundedLf,
        BoundId::EldanKlartag,
        BoundId::PaourisTail,
        BoundId::PaourisMoment,
        BoundId::BobkovMadiman,
        BoundId::MaxEntropy,
        BoundId::IsotropicConstant,
        BoundId::MinLemma,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundId::ClassicalBlTv => "classical-bl-tv",
            BoundId::TvBl => "tv-bl",
            BoundId::Bhvv => "bhvv",
            BoundId::ClassicalBlW1 => "classical-bl-w1",
            BoundId::W1Bl => "w1-bl",
            BoundId::WpMonotone => "wp-monotone",
            BoundId::WqWp => "wq-wp",
            BoundId::Pinsker => "pinsker",
            BoundId::HTv => "h-tv",
            BoundId::HTvBoundedLf => "h-tv-bounded-Lf",
            BoundId::EldanKlartag => "eldan-klartag",
            BoundId::PaourisTail => "paouris-tail",
            BoundId::PaourisMoment => "paouris-moment",
            BoundId::BobkovMadiman => "bobkov-madiman",
            BoundId::MaxEntropy => "max-entropy",
            BoundId::IsotropicConstant => "isotropic-constant",
            BoundId::MinLemma => "min-lemma",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        BoundId::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown bound id: {s}")))
    }
}

impl std::fmt::Display for BoundId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Instances where both sides vanish carry no information about the
/// constant and are excluded from fitting.
pub const VACUOUS_EPS: f64 = 1e-9;

/// One checked inequality instance.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct BoundCheck {
    pub bound_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub fitted_constant: Option<f64>,
    pub slack: f64,
    pub numerical_tolerance: f64,
    pub holds: bool,
    pub vacuous: bool,
    /// lhs / (rhs at C = 1); the quantity whose suite max is the fitted C.
    pub ratio: Option<f64>,
    pub inputs: String,
}

/// Build a check for `lhs <= C * rhs_at_c1`. With `constant = None` the
/// instance's own ratio is used (the smallest constant making it hold).
fn build(
    id: BoundId,
    lhs: f64,
    rhs_at_c1: f64,
    constant: Option<f64>,
    tol: f64,
    inputs: impl Into<String>,
) -> BoundCheck {
    let vacuous = lhs.abs() < VACUOUS_EPS && rhs_at_c1.abs() < VACUOUS_EPS;
    let ratio = if vacuous {
        None
    } else if rhs_at_c1 > 0.0 {
        Some(lhs / rhs_at_c1)
    } else if lhs.abs() < VACUOUS_EPS {
        None
    } else {
        Some(f64::INFINITY)
    };
    let c = constant.or(ratio).unwrap_or(1.0);
    let rhs = c * rhs_at_c1;
    let slack = rhs - lhs;
    BoundCheck {
        bound_id: id.as_str().to_string(),
        lhs,
        rhs,
        fitted_constant: constant,
        slack,
        numerical_tolerance: tol,
        holds: vacuous || slack >= -tol,
        vacuous,
        ratio,
        inputs: inputs.into(),
    }
}

/// Build a check with a fixed constant of 1 (the classical inequalities,
/// which come with no free constant).
fn build_fixed(
    id: BoundId,
    lhs: f64,
    rhs: f64,
    tol: f64,
    inputs: impl Into<String>,
) -> BoundCheck {
    let vacuous = lhs.abs() < VACUOUS_EPS && rhs.abs() < VACUOUS_EPS;
    BoundCheck {
        bound_id: id.as_str().to_string(),
        lhs,
        rhs,
        fitted_constant: None,
        slack: rhs - lhs,
        numerical_tolerance: tol,
        holds: vacuous || rhs - lhs >= -tol,
        vacuous,
        ratio: None,
        inputs: inputs.into(),
    }
}

/// Smallest suite-wide constant making every instance hold: the max of
/// `lhs / rhs_at_c1` over non-vacuous instances.
pub fn fit_constant(instances: &[BoundCheck]) -> Result<f64> {
    let mut best: Option<f64> = None;
    for inst in instances {
        if let Some(r) = inst.ratio {
            best = Some(best.map_or(r, |b: f64| b.max(r)));
        }
    }
    best.ok_or(Error::AllVacuous)
}

/// Largest decay rate `c` with `P[||X|| >= R] <= exp(-c R)` across all
/// instances: the min of `-ln(p)/R` over instances with positive estimates.
/// Zero-count Monte-Carlo estimates are uninformative for a minimum and
/// are skipped.
pub fn fit_tail_rate(instances: &[(f64, f64)]) -> Result<f64> {
    let mut best: Option<f64> = None;
    for &(p, r) in instances {
        if p > 0.0 && r > 0.0 {
            let c = -p.ln() / r;
            best = Some(best.map_or(c, |b: f64| b.min(c)));
        }
    }
    best.ok_or(Error::AllVacuous)
}

/// Output of the optimization lemma: for A, B, M, k > 0, the objective
/// `A t^k + B e^{-t}` evaluated at `t* = max(M, ln(B/A))` is at most
/// `A (1 + t*^k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinLemma {
    pub t_star: f64,
    pub value: f64,
    pub bound: f64,
}

pub fn min_lemma_bound(a: f64, b: f64, m: f64, k: f64) -> Result<MinLemma> {
    for (name, v) in [("A", a), ("B", b), ("M", m), ("k", k)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    let t_star = m.max((b / a).ln());
    let value = a * t_star.powf(k) + b * (-t_star).exp();
    let bound = a * (1.0 + t_star.powf(k));
    Ok(MinLemma {
        t_star,
        value,
        bound,
    })
}

impl MinLemma {
    pub fn as_check(&self, tol: f64, inputs: impl Into<String>) -> BoundCheck {
        build_fixed(BoundId::MinLemma, self.value, self.bound, tol, inputs)
    }
}

/// Tabulate the Gaussian smoothing `f * phi_t` of a 1-D law on a grid
/// (2^14 nodes over the padded effective support).
pub fn smooth_density_1d(f: &LogConcaveDensity, t: f64) -> Result<GridFunction> {
    let comp = f.component_1d()?;
    let smoothed = comp.smoothed(t)?;
    let (lo, hi) = comp.effective_interval(1e-12);
    let (lo, hi) = (lo - 8.0 * t, hi + 8.0 * t);
    GridFunction::tabulate(|x| smoothed.pdf(x), lo, hi, 1 << 14, 0.0)
}

/// `||f - f * phi_t||_1` by quadrature with crossing bracketing; the
/// smoothed density is evaluated exactly (collapsed Gaussian kernel), not
/// off the tabulation grid.
pub fn deconvolution_gap_1d(f: &LogConcaveDensity, t: f64) -> Result<MetricResult> {
    let comp = f.component_1d()?;
    let smoothed = comp.smoothed(t)?;
    let (lo, hi) = comp.effective_interval(1e-12);
    let (slo, shi) = smoothed.effective_interval(1e-12);
    let (lo, hi) = (lo.min(slo), hi.max(shi));
    let kinks = comp.breakpoints();
    let q = integrate_abs(|x| comp.pdf(x) - smoothed.pdf(x), lo, hi, &kinks, 1e-10);
    Ok(MetricResult {
        value: q.value,
        abs_error: q.abs_error + 4e-12,
        method: metrics::Method::Quadrature,
        detail: format!("smoothing gap at t={t}"),
    })
}

/// `P[||X|| >= r]`: exact chi-square tail for the standard Gaussian,
/// Monte Carlo with a 95% band otherwise.
pub fn paouris_tail(
    mu: &LogConcaveDensity,
    r: f64,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    if is_standard_gaussian(mu) {
        let n = mu.dimension() as f64;
        return Ok((gamma_ur(n / 2.0, r * r / 2.0), 0.0));
    }
    Ok(metrics::norm_tail_mc(mu, r, samples, seed))
}

/// `(E ||X||^p)^{1/p}` by Monte Carlo; p > 10 is rejected (the estimator
/// variance disqualifies the estimate).
pub fn paouris_moment(
    mu: &LogConcaveDensity,
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if p > 10.0 {
        return Err(Error::InvalidParameter(format!(
            "norm moments above p=10 are not estimated reliably, got {p}"
        )));
    }
    metrics::norm_moment_mc(mu, p, samples, seed)
}

fn is_standard_gaussian(mu: &LogConcaveDensity) -> bool {
    mu.components()
        .iter()
        .all(|c| matches!(c, crate::dist::Component::Gaussian { mean, sd } if *mean == 0.0 && *sd == 1.0))
}

/// Monte-Carlo `Var(log f(Y))`, `Y ~ mu`, with a 95% band on the variance.
pub fn bobkov_madiman_variance(
    mu: &LogConcaveDensity,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let mut rng = substream(seed, "bobkov-madiman");
    let mut stats = RunningStats::default();
    for _ in 0..samples {
        let x: Vec<f64> = mu.components().iter().map(|c| c.sample(&mut rng)).collect();
        stats.push(mu.log_pdf(&x)?);
    }
    Ok((stats.variance(), stats.variance_half_width()))
}

/// Isotropic constant `L_f = ||f||_inf^{1/n}`.
pub fn isotropic_constant(mu: &LogConcaveDensity) -> f64 {
    mu.max_density().powf(1.0 / mu.dimension() as f64)
}

/// Check `L_f <= 2^8 sqrt(n)` (the rough density bound for isotropic
/// log-concave measures).
pub fn check_isotropic_constant(mu: &LogConcaveDensity, tol: f64) -> BoundCheck {
    let n = mu.dimension() as f64;
    build_fixed(
        BoundId::IsotropicConstant,
        isotropic_constant(mu),
        256.0 * n.sqrt(),
        tol,
        mu.label(),
    )
}

/// Check `h(mu) <= n log sqrt(2 pi e)` (the Gaussian maximizes entropy
/// under an identity covariance).
pub fn check_max_entropy(mu: &LogConcaveDensity, tol: f64) -> Result<BoundCheck> {
    let n = mu.dimension() as f64;
    let h = metrics::differential_entropy(mu)?;
    let cap = n * (2.0 * std::f64::consts::PI * std::f64::consts::E).sqrt().ln();
    Ok(build_fixed(
        BoundId::MaxEntropy,
        h.value,
        cap,
        tol + h.abs_error,
        mu.label(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::LogConcaveDensity as D;
    use rand::Rng;

    #[test]
    fn bound_ids_round_trip() {
        for id in BoundId::ALL {
            assert_eq!(BoundId::parse(id.as_str()).unwrap(), id);
        }
        assert!(BoundId::parse("nope").is_err());
    }

    #[test]
    fn min_lemma_equality_case() {
        // A=1, B=e^2, M=1, k=2: t*=2, value = 4 + 1 = 5 = bound
        let r = min_lemma_bound(1.0, std::f64::consts::E.powi(2), 1.0, 2.0).unwrap();
        assert!((r.t_star - 2.0).abs() < 1e-12);
        assert!((r.value - 5.0).abs() < 1e-12);
        assert!((r.bound - 5.0).abs() < 1e-12);
    }

    #[test]
    fn min_lemma_boundary_case() {
        // A=B=1, M=3, k=1: t*=3, value = 3 + e^-3, bound = 4
        let r = min_lemma_bound(1.0, 1.0, 3.0, 1.0).unwrap();
        assert!((r.t_star - 3.0).abs() < 1e-12);
        assert!((r.value - (3.0 + (-3.0f64).exp())).abs() < 1e-12);
        assert!((r.bound - 4.0).abs() < 1e-12);
        assert!(r.value <= r.bound);
    }

    #[test]
    fn min_lemma_rejects_nonpositive() {
        assert!(min_lemma_bound(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(min_lemma_bound(1.0, -1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn min_lemma_random_value_le_bound_and_grid_inf() {
        let mut rng = substream(17, "min-lemma-random");
        for _ in 0..10_000 {
            let a = rng.gen_range(0.01..10.0);
            let b = rng.gen_range(0.01..50.0);
            let m = rng.gen_range(0.05..5.0);
            let k = rng.gen_range(0.2..4.0);
            let r = min_lemma_bound(a, b, m, k).unwrap();
            assert!(r.value <= r.bound + 1e-12, "{a} {b} {m} {k}");
            assert!(r.t_star >= m);
            // the objective's dense-grid infimum over t >= M never exceeds
            // the evaluated value, and the lemma bounds the infimum too
            let inf = dense_grid_inf(a, b, m, k);
            assert!(r.value >= inf - 1e-9);
            assert!(inf <= r.bound + 1e-9);
        }
    }

    fn dense_grid_inf(a: f64, b: f64, m: f64, k: f64) -> f64 {
        let hi = (m + (b / a).ln().abs() + 10.0) * 2.0;
        let mut inf = f64::INFINITY;
        for i in 0..=20_000 {
            let t = m + (hi - m) * i as f64 / 20_000.0;
            inf = inf.min(a * t.powf(k) + b * (-t).exp());
        }
        inf
    }

    #[test]
    fn min_lemma_k1_interior_attains_infimum() {
        // for k = 1 with t* interior, t* is the exact minimizer of the
        // objective, so the evaluated value matches the dense-grid infimum
        let mut rng = substream(18, "min-lemma-k1");
        let mut interior = 0;
        for _ in 0..500 {
            let a: f64 = rng.gen_range(0.01..2.0);
            let b: f64 = rng.gen_range(1.0..80.0);
            let m: f64 = rng.gen_range(0.05..1.0);
            if (b / a).ln() <= m {
                continue;
            }
            interior += 1;
            let r = min_lemma_bound(a, b, m, 1.0).unwrap();
            let inf = dense_grid_inf(a, b, m, 1.0);
            assert!((r.value - inf).abs() < 1e-6 * (1.0 + inf.abs()), "{a} {b} {m}");
        }
        assert!(interior > 100);
    }

    #[test]
    fn fit_constant_single_instance() {
        let inst = build(BoundId::TvBl, 2.0, 1.0, None, 1e-9, "x");
        assert_eq!(fit_constant(&[inst]).unwrap(), 2.0);
    }

    #[test]
    fn fit_constant_all_vacuous_errors() {
        let inst = build(BoundId::TvBl, 0.0, 0.0, None, 1e-9, "x");
        assert!(inst.vacuous);
        assert!(matches!(fit_constant(&[inst]), Err(Error::AllVacuous)));
    }

    #[test]
    fn fitted_constant_is_tight() {
        let a = build(BoundId::TvBl, 2.0, 1.0, None, 1e-12, "a");
        let b = build(BoundId::TvBl, 1.0, 1.0, None, 1e-12, "b");
        let c = fit_constant(&[a, b]).unwrap();
        let at_c: Vec<BoundCheck> = [(2.0, 1.0), (1.0, 1.0)]
            .iter()
            .map(|&(l, r)| build(BoundId::TvBl, l, r, Some(c), 1e-12, ""))
            .collect();
        assert!(at_c.iter().all(|k| k.holds));
        let shrunk: Vec<BoundCheck> = [(2.0, 1.0), (1.0, 1.0)]
            .iter()
            .map(|&(l, r)| build(BoundId::TvBl, l, r, Some(0.99 * c), 1e-12, ""))
            .collect();
        assert!(shrunk.iter().any(|k| !k.holds));
    }

    #[test]
    fn tail_rate_ignores_zero_counts() {
        let c = fit_tail_rate(&[(0.0, 10.0), (1e-3, 5.0)]).unwrap();
        assert!((c - (-(1e-3f64).ln()) / 5.0).abs() < 1e-12);
        assert!(fit_tail_rate(&[(0.0, 10.0)]).is_err());
    }

    #[test]
    fn gaussian_tail_is_exact_chi() {
        let g4 = D::standard_gaussian(4).unwrap();
        let (p, band) = paouris_tail(&g4, 6.0, 0, 0).unwrap();
        assert_eq!(band, 0.0);
        // 19 e^{-18}, the chi-square survival at R^2 = 36 with 4 dof
        assert!((p - 19.0 * (-18.0f64).exp()).abs() < 1e-18, "{p}");
    }

    #[test]
    fn laplace_tail_mc_within_band_of_truth() {
        let l = D::isotropic_laplace(1).unwrap();
        // P[|X| >= 3] = exp(-3 sqrt(2))
        let truth = (-3.0 * 2f64.sqrt()).exp();
        let (p, band) = paouris_tail(&l, 3.0, 400_000, 33).unwrap();
        assert!((p - truth).abs() < band, "{p} vs {truth} +- {band}");
    }

    #[test]
    fn moment_p_cap_enforced() {
        let g = D::standard_gaussian(2).unwrap();
        assert!(paouris_moment(&g, 12.0, 10, 0).is_err());
    }

    #[test]
    fn boma_gaussian_matches_half_n() {
        for n in [1usize, 4] {
            let g = D::standard_gaussian(n).unwrap();
            let (v, band) = bobkov_madiman_variance(&g, 300_000, 5).unwrap();
            assert!(
                (v - n as f64 / 2.0).abs() < 2.0 * band,
                "n={n}: {v} +- {band}"
            );
        }
    }

    #[test]
    fn boma_uniform_is_exactly_zero() {
        let u = D::isotropic_uniform(3).unwrap();
        let (v, _) = bobkov_madiman_variance(&u, 50_000, 5).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn boma_laplace_is_one() {
        // log f = const - sqrt(2)|x|; Var = 2 Var(|X|) = 2 b^2 = 1
        let l = D::isotropic_laplace(1).unwrap();
        let (v, band) = bobkov_madiman_variance(&l, 400_000, 6).unwrap();
        assert!((v - 1.0).abs() < 2.0 * band, "{v} +- {band}");
    }

    #[test]
    fn isotropic_constants_closed_form() {
        let g = D::standard_gaussian(1).unwrap();
        assert!((isotropic_constant(&g) - 0.3989422804014327).abs() < 1e-12);
        let u = D::isotropic_uniform(1).unwrap();
        assert!((isotropic_constant(&u) - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-12);
        let l4 = D::isotropic_laplace(4).unwrap();
        assert!((isotropic_constant(&l4) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(check_isotropic_constant(&l4, 1e-9).holds);
    }

    #[test]
    fn max_entropy_holds_on_catalog() {
        for d in [
            D::standard_gaussian(1).unwrap(),
            D::isotropic_uniform(2).unwrap(),
            D::isotropic_laplace(3).unwrap(),
        ] {
            let check = check_max_entropy(&d, 1e-7).unwrap();
            assert!(check.holds, "{}: slack {}", d.label(), check.slack);
        }
        // the Gaussian attains the cap
        let g = check_max_entropy(&D::standard_gaussian(2).unwrap(), 1e-7).unwrap();
        assert!(g.slack.abs() < 1e-7);
    }

    #[test]
    fn smoothing_gap_gaussian_matches_analytic() {
        // f * phi_t for standard Gaussian f is N(0, 1+t^2); the L1 gap has
        // a closed form via the density crossing +-x*.
        let g = D::standard_gaussian(1).unwrap();
        for (t, frozen) in [
            (0.4, 0.0717936488312638),
            (0.2, 0.0189799205087509),
            (0.1, 0.00481536759889156),
            (0.05, 0.00120834366443567),
        ] {
            let gap = deconvolution_gap_1d(&g, t).unwrap();
            assert!(
                (gap.value - frozen).abs() < 1e-9,
                "t={t}: {} vs {frozen}",
                gap.value
            );
        }
    }

    #[test]
    fn smoothing_gap_decreases_in_t() {
        let u = D::isotropic_uniform(1).unwrap();
        let mut prev = f64::INFINITY;
        for t in [0.4, 0.2, 0.1, 0.05] {
            let gap = deconvolution_gap_1d(&u, t).unwrap().value;
            assert!(gap < prev, "t={t}: {gap} !< {prev}");
            prev = gap;
        }
    }

    #[test]
    fn smoothing_rejects_bad_t() {
        let u = D::isotropic_uniform(1).unwrap();
        assert!(deconvolution_gap_1d(&u, 0.0).is_err());
        assert!(smooth_density_1d(&u, -0.5).is_err());
    }

    #[test]
    fn smooth_density_grid_integrates_to_one() {
        let u = D::isotropic_uniform(1).unwrap();
        let g = smooth_density_1d(&u, 0.2).unwrap();
        assert!((g.integral() - 1.0).abs() < 1e-6, "{}", g.integral());
    }
}
