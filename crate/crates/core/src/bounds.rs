//! Capacity and storage-bandwidth tradeoff mathematics for concurrent
//! multi-node repair, plus the single-repair, cooperative, MFR and
//! minimum-storage reference bounds it generalizes or compares against.
//!
//! All quantities are exact rationals. The piecewise regime boundaries are
//! exact fractions (e.g. 7/3 of beta) and floating point would misclassify
//! points sitting on a breakpoint.
//!
//! The brute-force capacity enumerates every recovery scenario (integer
//! composition of k with parts in [1, t]) and is the oracle for the closed
//! forms.

use itertools::Itertools;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational used for every bound and tradeoff quantity.
pub type Frac = Ratio<i128>;

pub fn frac(num: i128, den: i128) -> Frac {
    Frac::new(num, den)
}

pub fn frac_int(v: i128) -> Frac {
    Frac::from_integer(v)
}

/// Render a fraction as `num/den`, omitting `/1` for integers.
pub fn fmt_frac(v: &Frac) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("invalid code parameters: {0}")]
    InvalidParams(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("gamma {gamma} is infeasible: below the minimum-bandwidth threshold {threshold}")]
    InfeasibleGamma { gamma: String, threshold: String },
}

/// The (B, n, k, d, t) tuple every bound consumes, with derived group count
/// g = ceil(k/t).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeParams {
    pub b: Frac,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub t: usize,
}

impl CodeParams {
    pub fn new(b: Frac, n: usize, k: usize, d: usize, t: usize) -> Result<Self, BoundsError> {
        if !b.is_positive() {
            return Err(BoundsError::InvalidParams(format!(
                "file size B must be positive, got {}",
                fmt_frac(&b)
            )));
        }
        if !(1 <= k && k < n) {
            return Err(BoundsError::InvalidParams(format!(
                "need 1 <= k < n, got k={k}, n={n}"
            )));
        }
        if !(1 <= t && t <= k) {
            return Err(BoundsError::InvalidParams(format!(
                "need 1 <= t <= k, got t={t}, k={k}"
            )));
        }
        if !(k <= d && d + t <= n) {
            return Err(BoundsError::InvalidParams(format!(
                "need k <= d <= n - t, got k={k}, d={d}, n={n}, t={t}"
            )));
        }
        Ok(CodeParams { b, n, k, d, t })
    }

    /// Number of repair groups on the tradeoff curve, ceil(k/t).
    pub fn groups(&self) -> usize {
        self.k.div_ceil(self.t)
    }
}

/// A recovery scenario: an ordered composition u of k with parts in [1, t].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>, k: usize, t: usize) -> Result<Self, BoundsError> {
        if parts.iter().sum::<usize>() != k || parts.iter().any(|&u| u < 1 || u > t) {
            return Err(BoundsError::InvalidArgument(format!(
                "{parts:?} is not a composition of {k} with parts in [1, {t}]"
            )));
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn groups(&self) -> usize {
        self.parts.len()
    }
}

impl std::fmt::Display for Composition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}]", self.parts.iter().join(","))
    }
}

/// Regime tag for a point on (or compared against) the tradeoff curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regime {
    /// Minimum-storage extreme point.
    MinStorage,
    /// Minimum-bandwidth extreme point.
    MinBandwidth,
    /// Interior segment with index i (1..g-1).
    Interior(usize),
    /// A named reference bound (MSR, MBR, MSCR, MBCR, ...).
    Reference(&'static str),
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::MinStorage => write!(f, "MS"),
            Regime::MinBandwidth => write!(f, "MB"),
            Regime::Interior(i) => write!(f, "interior-{i}"),
            Regime::Reference(name) => write!(f, "{name}"),
        }
    }
}

/// An (alpha, gamma) pair on a storage-bandwidth curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradeoffPoint {
    pub alpha: Frac,
    pub gamma: Frac,
    pub regime: Regime,
}

/// Cooperative-repair parameters: per-helper first-phase bandwidth and
/// newcomer exchange bandwidth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoopParams {
    pub params: CodeParams,
    pub beta1: Frac,
    pub beta2: Frac,
}

/// All ordered compositions of k with parts in [1, t], lexicographic order.
pub fn enumerate_compositions(k: usize, t: usize) -> Result<Vec<Composition>, BoundsError> {
    if k < 1 || t < 1 {
        return Err(BoundsError::InvalidArgument(format!(
            "need k >= 1 and t >= 1, got k={k}, t={t}"
        )));
    }
    let mut out = Vec::new();
    let mut stack = Vec::new();
    recurse(k, t, &mut stack, &mut out);
    return Ok(out);

    fn recurse(rem: usize, t: usize, prefix: &mut Vec<usize>, out: &mut Vec<Composition>) {
        if rem == 0 {
            out.push(Composition {
                parts: prefix.clone(),
            });
            return;
        }
        for part in 1..=t.min(rem) {
            prefix.push(part);
            recurse(rem - part, t, prefix, out);
            prefix.pop();
        }
    }
}

/// Cut value along one recovery scenario:
/// sum_i min(u_i * alpha, (d - sum_{j<i} u_j) * beta).
pub fn composition_cut(u: &Composition, d: usize, alpha: Frac, beta: Frac) -> Frac {
    let mut taken = 0usize;
    let mut total = Frac::zero();
    for &ui in u.parts() {
        let storage = frac_int(ui as i128) * alpha;
        let bandwidth = frac_int((d - taken) as i128) * beta;
        total += storage.min(bandwidth);
        taken += ui;
    }
    total
}

fn check_alpha_beta(alpha: Frac, beta: Frac) -> Result<(), BoundsError> {
    if !alpha.is_positive() || !beta.is_positive() {
        return Err(BoundsError::InvalidArgument(format!(
            "alpha and beta must be positive, got alpha={}, beta={}",
            fmt_frac(&alpha),
            fmt_frac(&beta)
        )));
    }
    Ok(())
}

/// Brute-force capacity: minimum cut value over every recovery scenario.
pub fn capacity_bruteforce(
    params: &CodeParams,
    alpha: Frac,
    beta: Frac,
) -> Result<Frac, BoundsError> {
    check_alpha_beta(alpha, beta)?;
    let compositions = enumerate_compositions(params.k, params.t)?;
    Ok(compositions
        .iter()
        .map(|u| composition_cut(u, params.d, alpha, beta))
        .min()
        .expect("composition set is nonempty"))
}

/// Brute-force capacity together with the full argmin scenario set.
pub fn bruteforce_argmin(
    params: &CodeParams,
    alpha: Frac,
    beta: Frac,
) -> Result<(Frac, Vec<Composition>), BoundsError> {
    check_alpha_beta(alpha, beta)?;
    let compositions = enumerate_compositions(params.k, params.t)?;
    let cuts: Vec<Frac> = compositions
        .iter()
        .map(|u| composition_cut(u, params.d, alpha, beta))
        .collect();
    let min = cuts.iter().min().expect("nonempty").clone();
    let argmin = compositions
        .into_iter()
        .zip(cuts)
        .filter(|(_, c)| *c == min)
        .map(|(u, _)| u)
        .collect();
    Ok((min, argmin))
}

/// The cost-minimizing composition of k: [t, ..., t] when t divides k,
/// otherwise the remainder part first, [r, t, ..., t].
pub fn optimal_composition(k: usize, t: usize) -> Result<Composition, BoundsError> {
    if k < 1 || t < 1 || t > k {
        return Err(BoundsError::InvalidArgument(format!(
            "need 1 <= t <= k, got k={k}, t={t}"
        )));
    }
    let g = k.div_ceil(t);
    let r = k - (g - 1) * t;
    let mut parts = Vec::with_capacity(g);
    if r < t {
        parts.push(r);
    } else {
        parts.push(t);
    }
    parts.extend(std::iter::repeat(t).take(g - 1));
    Ok(Composition { parts })
}

/// Candidate scenarios for the closed form: all placements of the remainder
/// part within [t, ..., t]. When t divides k there is a single candidate.
/// The placement that wins depends on the alpha/beta regime (remainder first
/// in the storage-limited regimes, remainder last in the bandwidth plateau),
/// so the closed form minimizes over all g placements; the brute-force
/// oracle confirms this multiset is always the global argmin.
fn closed_form_candidates(k: usize, t: usize) -> Vec<Composition> {
    let g = k.div_ceil(t);
    let r = k - (g - 1) * t;
    if r == t {
        return vec![Composition {
            parts: vec![t; g],
        }];
    }
    (0..g)
        .map(|pos| {
            let mut parts = vec![t; g - 1];
            parts.insert(pos, r);
            Composition { parts }
        })
        .collect()
}

/// Closed-form capacity: the cut value along the optimal composition
/// multiset {r, t, ..., t}. Agrees exactly with `capacity_bruteforce`.
pub fn capacity_closed_form(
    params: &CodeParams,
    alpha: Frac,
    beta: Frac,
) -> Result<Frac, BoundsError> {
    check_alpha_beta(alpha, beta)?;
    Ok(closed_form_candidates(params.k, params.t)
        .iter()
        .map(|u| composition_cut(u, params.d, alpha, beta))
        .min()
        .expect("candidate set is nonempty"))
}

/// Closed-form capacity plus the minimizing candidate scenario.
pub fn capacity_closed_form_with_argmin(
    params: &CodeParams,
    alpha: Frac,
    beta: Frac,
) -> Result<(Frac, Composition), BoundsError> {
    check_alpha_beta(alpha, beta)?;
    closed_form_candidates(params.k, params.t)
        .into_iter()
        .map(|u| (composition_cut(&u, params.d, alpha, beta), u))
        .min_by(|a, b| a.0.cmp(&b.0))
        .map(|(c, u)| (c, u))
        .ok_or_else(|| BoundsError::InvalidArgument("empty candidate set".into()))
}

/// p(i) = [2d - (2g - i - 1) t] * i / (2d): bandwidth fraction of the last i
/// cut terms along the optimal scenario.
pub fn p_coeff(params: &CodeParams, i: usize) -> Frac {
    let (d, t, g) = (params.d as i128, params.t as i128, params.groups() as i128);
    let i = i as i128;
    frac((2 * d - (2 * g - i - 1) * t) * i, 2 * d)
}

/// q(i) = [2k(d - (g - i) t) - i (i - 1) t^2] / (2 t d): the breakpoint
/// coefficients of the tradeoff, with B/q(i) the regime boundaries.
pub fn q_coeff(params: &CodeParams, i: usize) -> Frac {
    let (k, d, t, g) = (
        params.k as i128,
        params.d as i128,
        params.t as i128,
        params.groups() as i128,
    );
    let i = i as i128;
    frac(2 * k * (d - (g - i) * t) - i * (i - 1) * t * t, 2 * t * d)
}

/// D_i = k(d + t(i+1) - k) - i(i+1) t^2 / 2: the cooperative tradeoff
/// denominator; for t | k it satisfies q(i) = D_{i-1} / (t d).
pub fn coop_denominator(params: &CodeParams, i: usize) -> Frac {
    let (k, d, t) = (params.k as i128, params.d as i128, params.t as i128);
    let i = i as i128;
    frac_int(k * (d + t * (i + 1) - k)) - frac(i * (i + 1) * t * t, 2)
}

/// Minimal storage alpha*(gamma) on the tradeoff. Breakpoints are
/// right-closed on the storage-limited side: gamma = B/q(i) belongs to the
/// regime with index i - 1, and alpha = B/k whenever gamma >= B/q(1).
pub fn tradeoff_alpha(params: &CodeParams, gamma: Frac) -> Result<TradeoffPoint, BoundsError> {
    let g = params.groups();
    let b = params.b.clone();
    let threshold_mb = &b / q_coeff(params, g);
    if gamma < threshold_mb {
        return Err(BoundsError::InfeasibleGamma {
            gamma: fmt_frac(&gamma),
            threshold: fmt_frac(&threshold_mb),
        });
    }
    if gamma >= &b / q_coeff(params, 1) {
        return Ok(TradeoffPoint {
            alpha: &b / frac_int(params.k as i128),
            gamma,
            regime: Regime::MinStorage,
        });
    }
    for i in 1..g {
        let upper = &b / q_coeff(params, i); // exclusive
        let lower = &b / q_coeff(params, i + 1); // inclusive
        if gamma >= lower && gamma < upper {
            let alpha = (&b - p_coeff(params, i) * &gamma)
                / frac_int((params.k - i * params.t) as i128);
            let regime = if gamma == threshold_mb {
                Regime::MinBandwidth
            } else {
                Regime::Interior(i)
            };
            return Ok(TradeoffPoint { alpha, gamma, regime });
        }
    }
    unreachable!("gamma >= MB threshold always falls in some regime");
}

/// Minimum-storage point: (B/k, B t d / (k (d - k + t))).
pub fn ms_point(params: &CodeParams) -> TradeoffPoint {
    let (k, d, t) = (params.k as i128, params.d as i128, params.t as i128);
    TradeoffPoint {
        alpha: &params.b / frac_int(k),
        gamma: &params.b * frac(t * d, k * (d - k + t)),
        regime: Regime::MinStorage,
    }
}

/// Minimum-bandwidth point: (2Bd, 2Btd) / (k (2d - k + t)).
pub fn mb_point(params: &CodeParams) -> TradeoffPoint {
    let (k, d, t) = (params.k as i128, params.d as i128, params.t as i128);
    TradeoffPoint {
        alpha: &params.b * frac(2 * d, k * (2 * d - k + t)),
        gamma: &params.b * frac(2 * t * d, k * (2 * d - k + t)),
        regime: Regime::MinBandwidth,
    }
}

/// Single-repair cut-set capacity: sum_{i=0}^{min(d,k)-1} min((d-i) beta, alpha).
pub fn single_repair_capacity(k: usize, d: usize, alpha: Frac, beta: Frac) -> Frac {
    (0..d.min(k))
        .map(|i| (frac_int((d - i) as i128) * &beta).min(alpha.clone()))
        .sum()
}

/// Cooperative multi-repair capacity: minimum over recovery scenarios of
/// sum_i u_i * min(alpha, (d - sum_{j<i} u_j) beta1 + (t - u_i) beta2).
pub fn cooperative_capacity(coop: &CoopParams, alpha: Frac) -> Result<Frac, BoundsError> {
    if coop.beta1.is_negative() || coop.beta2.is_negative() {
        return Err(BoundsError::InvalidArgument(
            "beta1 and beta2 must be nonnegative".into(),
        ));
    }
    let p = &coop.params;
    let compositions = enumerate_compositions(p.k, p.t)?;
    Ok(compositions
        .iter()
        .map(|u| {
            let mut taken = 0usize;
            let mut total = Frac::zero();
            for &ui in u.parts() {
                let inflow = frac_int((p.d - taken) as i128) * &coop.beta1
                    + frac_int((p.t - ui) as i128) * &coop.beta2;
                total += frac_int(ui as i128) * alpha.clone().min(inflow);
                taken += ui;
            }
            total
        })
        .min()
        .expect("composition set is nonempty"))
}

/// The cooperative extreme points (MSCR, MBCR).
pub fn cooperative_points(params: &CodeParams) -> (TradeoffPoint, TradeoffPoint) {
    let (k, d, t) = (params.k as i128, params.d as i128, params.t as i128);
    let mscr = TradeoffPoint {
        alpha: &params.b / frac_int(k),
        gamma: &params.b * frac(t * (d + t - 1), k * (d - k + t)),
        regime: Regime::Reference("MSCR"),
    };
    let mbcr = TradeoffPoint {
        alpha: &params.b * frac(2 * d + t - 1, k * (2 * d + t - k)),
        gamma: &params.b * frac(t * (2 * d + t - 1), k * (2 * d + t - k)),
        regime: Regime::Reference("MBCR"),
    };
    (mscr, mbcr)
}

/// Multi-loss flexible recovery bound: sum_i B d_i / (k (d_i - k + 1)).
pub fn mfr_bound(b: Frac, k: usize, d_list: &[usize]) -> Result<Frac, BoundsError> {
    let mut total = Frac::zero();
    for &di in d_list {
        if di < k {
            return Err(BoundsError::InvalidArgument(format!(
                "MFR requires every d_i >= k, got d_i={di}, k={k}"
            )));
        }
        total += &b * frac(di as i128, (k * (di - k + 1)) as i128);
    }
    Ok(total)
}

/// Minimum-storage concurrent repair bound: B t d / (k (d + t - k)) for
/// t < k, otherwise the whole file B.
pub fn core_ms_bound(b: Frac, k: usize, d: usize, t: usize) -> Frac {
    if t >= k {
        b
    } else {
        &b * frac((t * d) as i128, (k * (d + t - k)) as i128)
    }
}

/// Sample the tradeoff curve from the minimum-storage point down to the
/// minimum-bandwidth point, endpoints exact, gamma linearly spaced.
pub fn tradeoff_curve(
    params: &CodeParams,
    num_points: usize,
) -> Result<Vec<TradeoffPoint>, BoundsError> {
    if num_points < 2 {
        return Err(BoundsError::InvalidArgument(format!(
            "need at least 2 curve points, got {num_points}"
        )));
    }
    let ms = ms_point(params);
    let mb = mb_point(params);
    let mut out = Vec::with_capacity(num_points);
    out.push(ms.clone());
    let span = &ms.gamma - &mb.gamma;
    for idx in 1..num_points - 1 {
        let gamma =
            &ms.gamma - &span * frac(idx as i128, (num_points - 1) as i128);
        out.push(tradeoff_alpha(params, gamma)?);
    }
    out.push(mb);
    Ok(out)
}
