//! The degree-sparsification pipeline: parameter derivation, copy
//! amplification, randomized edge subsampling, and one-shot high-degree
//! trimming.
//!
//! Natural logarithms throughout. The default constants are
//! `c_delta = 10^6` (multiplier in `Δ = c_delta · 2·ln(2|Σ|)/√γ`),
//! `c_p = 10^-4` (multiplier in `p = c_p · Δ/D`), and a `D ≥ 10^4·Δ`
//! degree guard. All three can be scaled down to make desk-size
//! experiments feasible while keeping the pipeline's structure intact.

use serde::Serialize;
use thiserror::Error;

use crate::instance::{degree_profile, Edge, Instance};
use crate::seed::{rng_for, Stream};
use rand::Rng;

/// Overridable multipliers; defaults reproduce the reference formulas
/// exactly.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReductionConstants {
    pub c_delta: f64,
    pub c_p: f64,
    /// sparsify requires D ≥ guard_ratio · Δ.
    pub guard_ratio: f64,
}

impl Default for ReductionConstants {
    fn default() -> Self {
        ReductionConstants { c_delta: 1e6, c_p: 1e-4, guard_ratio: 1e4 }
    }
}

impl ReductionConstants {
    /// A `c_delta` that makes `compute_params` land on `target_delta` for
    /// the given `(sigma, gamma)`. Aims half a unit below the target so
    /// the ceiling is robust to rounding.
    pub fn c_delta_for_target(target_delta: usize, sigma: usize, gamma: f64) -> f64 {
        let base = 2.0 * (2.0 * sigma as f64).ln() / gamma.sqrt();
        (target_delta as f64 - 0.5) / base
    }
}

/// Derived sparsification parameters. `p` is bound per-instance (it
/// depends on the degree D), so it is `None` until `sparsify` fills it.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SparsifyParams {
    pub delta: usize,
    pub p: Option<f64>,
    pub gamma: f64,
    pub c_delta: f64,
    pub c_p: f64,
    pub guard_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ReduceError {
    #[error("gamma {0} out of range (0, 1)")]
    GammaOutOfRange(f64),
    #[error("sigma must be at least 1")]
    EmptyAlphabet,
    #[error("constants must be positive and finite")]
    BadConstants,
    #[error("degree bound overflowed: {0}")]
    DeltaOverflow(f64),
    #[error("copy count must be at least 1")]
    ZeroCopies,
    #[error("amplification overflows: t^2 * |E| does not fit")]
    AmplifyOverflow,
    #[error("probability {0} out of range [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("instance is not biregular with a single degree")]
    NotBiregular,
    #[error("instance has no edges, no degree D to derive p from")]
    NoEdges,
    #[error("degree guard violated: D = {d} but D >= {required} is required (guard_ratio {guard_ratio} x delta {delta})")]
    DegreeGuard { d: usize, required: usize, guard_ratio: f64, delta: usize },
    #[error("derived p = {p} out of (0, 1]; c_p {c_p} incompatible with delta {delta}, D {d}")]
    DerivedPOutOfRange { p: f64, c_p: f64, delta: usize, d: usize },
    #[error("gap must be an integer greater than 1")]
    GapTooSmall,
    #[error("q^2 overflows u64 for q = {0}")]
    AlphabetOverflow(u64),
}

/// Δ = ⌈c_delta · 2·ln(2σ)/√γ⌉. The probability `p` is derived later,
/// per instance, as `c_p · Δ/D`.
pub fn compute_params(
    sigma: usize,
    gamma: f64,
    consts: &ReductionConstants,
) -> Result<SparsifyParams, ReduceError> {
    if sigma == 0 {
        return Err(ReduceError::EmptyAlphabet);
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(ReduceError::GammaOutOfRange(gamma));
    }
    if !(consts.c_delta > 0.0 && consts.c_p > 0.0 && consts.guard_ratio > 0.0)
        || !consts.c_delta.is_finite()
        || !consts.c_p.is_finite()
        || !consts.guard_ratio.is_finite()
    {
        return Err(ReduceError::BadConstants);
    }
    let raw = consts.c_delta * (2.0 * (2.0 * sigma as f64).ln()) / gamma.sqrt();
    if !raw.is_finite() || raw >= u64::MAX as f64 / 4.0 {
        return Err(ReduceError::DeltaOverflow(raw));
    }
    let delta = (raw.ceil() as usize).max(1);
    Ok(SparsifyParams {
        delta,
        p: None,
        gamma,
        c_delta: consts.c_delta,
        c_p: consts.c_p,
        guard_ratio: consts.guard_ratio,
    })
}

/// Replace each side by `t` copies and each edge by its `t^2` combinations,
/// all carrying the original table. Vertex `(v, i)` becomes index `v*t + i`.
/// Degree multiplies by `t`; the instance value is unchanged.
pub fn amplify_copies(inst: &Instance, t: usize) -> Result<Instance, ReduceError> {
    if t == 0 {
        return Err(ReduceError::ZeroCopies);
    }
    if t == 1 {
        return Ok(inst.clone());
    }
    let t2 = t.checked_mul(t).ok_or(ReduceError::AmplifyOverflow)?;
    t2.checked_mul(inst.num_edges()).ok_or(ReduceError::AmplifyOverflow)?;
    inst.n_a().checked_mul(t).ok_or(ReduceError::AmplifyOverflow)?;
    inst.n_b().checked_mul(t).ok_or(ReduceError::AmplifyOverflow)?;

    // emit in canonical order: walk new a-indices, then each source edge of
    // the underlying vertex in b order, then b copies
    let mut by_a: Vec<Vec<&Edge>> = vec![Vec::new(); inst.n_a()];
    for e in inst.edges() {
        by_a[e.a].push(e);
    }
    let mut edges = Vec::with_capacity(t2 * inst.num_edges());
    for (a, incident) in by_a.iter().enumerate() {
        for i in 0..t {
            let new_a = a * t + i;
            for e in incident {
                for j in 0..t {
                    edges.push(Edge::new(new_a, e.b * t + j, e.table.clone()));
                }
            }
        }
    }
    Ok(Instance::from_sorted_unchecked(
        inst.n_a() * t,
        inst.n_b() * t,
        inst.sigma(),
        edges,
    ))
}

/// Keep each edge independently with probability `p`, decided by one
/// uniform draw per edge in canonical order thresholded against `p`. The
/// same seed therefore gives monotone coupling: the kept set for p1 ≤ p2
/// is a subset of the kept set for p2. Vertex sets are unchanged.
pub fn subsample(inst: &Instance, p: f64, seed: u64) -> Result<Instance, ReduceError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ReduceError::ProbabilityOutOfRange(p));
    }
    let mut rng = rng_for(seed, Stream::Subsample, 0);
    let edges = inst
        .edges()
        .iter()
        .filter(|_| rng.random::<f64>() < p)
        .cloned()
        .collect();
    Ok(Instance::from_sorted_unchecked(inst.n_a(), inst.n_b(), inst.sigma(), edges))
}

/// Result of one trim pass.
#[derive(Clone, Debug)]
pub struct TrimOutput {
    pub instance: Instance,
    pub removed_edges: usize,
    pub trimmed_vertices_a: usize,
    pub trimmed_vertices_b: usize,
}

/// Remove every edge with an endpoint of degree greater than `delta`,
/// degrees measured once on the input (no iteration). The output's maximum
/// degree is at most `delta`.
pub fn trim(inst: &Instance, delta: usize) -> TrimOutput {
    let (da, db) = inst.degrees();
    let keep_a: Vec<bool> = da.iter().map(|&d| d <= delta).collect();
    let keep_b: Vec<bool> = db.iter().map(|&d| d <= delta).collect();
    let edges: Vec<Edge> = inst
        .edges()
        .iter()
        .filter(|e| keep_a[e.a] && keep_b[e.b])
        .cloned()
        .collect();
    let removed_edges = inst.num_edges() - edges.len();
    TrimOutput {
        instance: Instance::from_sorted_unchecked(inst.n_a(), inst.n_b(), inst.sigma(), edges),
        removed_edges,
        trimmed_vertices_a: keep_a.iter().filter(|k| !**k).count(),
        trimmed_vertices_b: keep_b.iter().filter(|k| !**k).count(),
    }
}

/// Full sparsification output: the subsampled instance, the trimmed
/// instance, the parameters used, and removal statistics.
#[derive(Clone, Debug)]
pub struct SparsifyOutput {
    pub intermediate: Instance,
    pub trimmed: Instance,
    pub params: SparsifyParams,
    /// |E_intermediate \ E_trimmed|.
    pub removed_edges: usize,
    pub trimmed_vertices_a: usize,
    pub trimmed_vertices_b: usize,
}

/// Bind `p = c_p·Δ/D` for a concrete instance degree and check the guards.
pub(crate) fn bind_probability(
    params: &mut SparsifyParams,
    d: usize,
) -> Result<f64, ReduceError> {
    if d == 0 {
        return Err(ReduceError::NoEdges);
    }
    let required = (params.guard_ratio * params.delta as f64).ceil() as usize;
    if d < required {
        return Err(ReduceError::DegreeGuard {
            d,
            required,
            guard_ratio: params.guard_ratio,
            delta: params.delta,
        });
    }
    let p = params.c_p * params.delta as f64 / d as f64;
    if !(p > 0.0 && p <= 1.0) {
        return Err(ReduceError::DerivedPOutOfRange {
            p,
            c_p: params.c_p,
            delta: params.delta,
            d,
        });
    }
    params.p = Some(p);
    Ok(p)
}

/// The two-step reduction: derive `(Δ, p)`, subsample, trim. Requires a
/// biregular input of uniform degree D with D ≥ guard_ratio·Δ.
pub fn sparsify(
    inst: &Instance,
    gamma: f64,
    seed: u64,
    consts: &ReductionConstants,
) -> Result<SparsifyOutput, ReduceError> {
    let profile = degree_profile(inst);
    let d = profile.uniform_degree().ok_or(ReduceError::NotBiregular)?;
    let mut params = compute_params(inst.sigma(), gamma, consts)?;
    let p = bind_probability(&mut params, d)?;
    let intermediate = subsample(inst, p, seed)?;
    let trimmed = trim(&intermediate, params.delta);
    Ok(SparsifyOutput {
        intermediate,
        trimmed: trimmed.instance,
        params,
        removed_edges: trimmed.removed_edges,
        trimmed_vertices_a: trimmed.trimmed_vertices_a,
        trimmed_vertices_b: trimmed.trimmed_vertices_b,
    })
}

/// Parameters instantiating a target inapproximability gap `g`: the
/// smallest prime power `q` with `q/ln q > 10^5·C·g^2`, the soundness
/// threshold `γ = 2C·ln q/q`, the alphabet `q^2`, the degree bound Δ for
/// that alphabet at default constants, and `ε = 1/Δ`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GapParams {
    pub g: u64,
    pub big_c: f64,
    pub q: u64,
    /// q^2.
    pub sigma: u64,
    pub gamma: f64,
    pub delta: usize,
    pub eps: f64,
    /// min(ε, C·ln q/q); recorded for completeness, nothing derives from it.
    pub delta_slack: f64,
}

/// Ascending search for the smallest prime power above the threshold.
pub fn instantiate_gap_params(g: u64, big_c: f64) -> Result<GapParams, ReduceError> {
    if g < 2 {
        return Err(ReduceError::GapTooSmall);
    }
    if big_c <= 0.0 || !big_c.is_finite() {
        return Err(ReduceError::BadConstants);
    }
    let threshold = 1e5 * big_c * (g * g) as f64;
    let q = smallest_prime_power_above(threshold);
    let sigma = q.checked_mul(q).ok_or(ReduceError::AlphabetOverflow(q))?;
    let gamma = 2.0 * big_c * (q as f64).ln() / q as f64;
    let params = compute_params(sigma as usize, gamma, &ReductionConstants::default())?;
    let eps = 1.0 / params.delta as f64;
    // loose upper guard on the q = Theta(g^2 log g) band
    let band = 1e7 * big_c * (g * g) as f64 * ((g * g + 2) as f64).ln();
    assert!(
        (q as f64) <= band,
        "prime power search escaped the expected band: q = {q}, band = {band}"
    );
    Ok(GapParams {
        g,
        big_c,
        q,
        sigma,
        gamma,
        delta: params.delta,
        eps,
        delta_slack: eps.min(big_c * (q as f64).ln() / q as f64),
    })
}

/// Smallest prime power q (q = p^k, k ≥ 1) with q/ln q strictly above the
/// threshold. q/ln q is not monotone below e, so every candidate is tested.
fn smallest_prime_power_above(threshold: f64) -> u64 {
    let mut bound = if threshold <= 3.0 {
        16
    } else {
        (2.0 * threshold * threshold.ln().max(1.0)) as u64 + 16
    };
    loop {
        for q in prime_powers_upto(bound) {
            if q as f64 / (q as f64).ln() > threshold {
                return q;
            }
        }
        bound *= 2;
    }
}

fn primes_upto(bound: u64) -> Vec<u64> {
    let n = bound as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &is_p)| is_p.then_some(i as u64))
        .collect()
}

fn prime_powers_upto(bound: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for p in primes_upto(bound) {
        let mut q = p;
        while q <= bound {
            out.push(q);
            match q.checked_mul(p) {
                Some(next) => q = next,
                None => break,
            }
        }
    }
    out.sort_unstable();
    out
}
