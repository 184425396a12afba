//! Monte Carlo experiments that check each probabilistic property of the
//! sparsification pipeline against an exact oracle (binomial means and
//! tails, pair-counting expectations, log-space counting bounds).
//!
//! Trial `i` draws every random decision from `mix(seed, Trial, i)`, so a
//! report is a pure function of its config and identical whether trials
//! run on one thread or many (rayon only reorders the work, the fold is
//! sequential in trial order). Thresholds are always computed from run
//! parameters; when scaled-down constants cannot support a reference
//! probability claim, the record reports the frequency without asserting
//! it (`pass = null`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::generate::{generate, GenError, GenSpec};
use crate::instance::{
    degree_profile, eval_labeling, eval_multilabeling, Instance, Multilabeling, Side,
};
use crate::reduce::{
    amplify_copies, compute_params, sparsify, ReduceError, ReductionConstants,
};
use crate::report::{StatRecord, TrialReport};
use crate::seed::{mix, Stream};
use crate::solve::{maxrep_exact, minrep_exact, repair_multilabeling};
use crate::stats::{binomial_tail_ge, binomial_tail_lt, ln_choose};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum HarnessError {
    #[error("generation failed: {0}")]
    Gen(#[from] GenError),
    #[error("reduction failed: {0}")]
    Reduce(#[from] ReduceError),
    #[error("evaluation failed: {0}")]
    Eval(#[from] crate::instance::EvalError),
    #[error("instance is not biregular with one degree; the thresholds need D")]
    NotBiregular,
    #[error("supplied multilabeling has value {satisfied}/{total} >= 1/2")]
    ValueTooHigh { satisfied: usize, total: usize },
    #[error("counting bound needs sigma > 1/gamma (got sigma {sigma}, gamma {gamma})")]
    SigmaGamma { sigma: usize, gamma: f64 },
    #[error("completeness trials need a planted or corrupted spec")]
    NeedsPlantedKind,
    #[error("gamma {0} out of range (0, 1)")]
    GammaOutOfRange(f64),
}

/// Configuration for the trim-statistics experiment.
#[derive(Clone, Debug)]
pub struct TrimTrialConfig {
    pub spec: GenSpec,
    /// Copy-amplification factor applied before sparsifying; the effective
    /// degree is `spec.deg * amplify`.
    pub amplify: usize,
    pub gamma: f64,
    pub consts: ReductionConstants,
    pub trials: u64,
    pub seed: u64,
}

/// Removal statistics of subsample+trim versus the exact per-edge oracle
///
/// ```text
/// E[removed] = |E| · p · (2q − q²),  q = P[Binomial(D−1, p) ≥ Δ]
/// ```
///
/// (conditioned on an edge being kept, each endpoint exceeds Δ exactly
/// when its other D−1 edges keep at least Δ; the two endpoints are
/// independent). The 0.99-probability bound `removed ≤ 0.1·p·D·n` is
/// asserted only when `1/Δ + pD/Δ ≤ 0.0002`, the slack the Markov
/// argument needs.
pub fn trial_trim(cfg: &TrimTrialConfig) -> Result<TrialReport, HarnessError> {
    let (base, _) = generate(&cfg.spec)?;
    let inst = amplify_copies(&base, cfg.amplify)?;
    let profile = degree_profile(&inst);
    let d = profile.uniform_degree().ok_or(HarnessError::NotBiregular)?;
    let mut params = compute_params(inst.sigma(), cfg.gamma, &cfg.consts)?;
    let p = crate::reduce::bind_probability(&mut params, d)?;
    let delta = params.delta;
    let n = inst.n_a();

    let threshold = 0.1 * p * d as f64 * n as f64;
    let q = binomial_tail_ge(d as u64 - 1, p, delta as u64);
    let oracle_removed = (n * d) as f64 * p * (2.0 * q - q * q);
    let guard_ok = 1.0 / delta as f64 + p * d as f64 / delta as f64 <= 0.0002;

    let outcomes: Result<Vec<(f64, bool)>, ReduceError> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let out = sparsify(&inst, cfg.gamma, mix(cfg.seed, Stream::Trial, i), &cfg.consts)?;
            let prof = degree_profile(&out.trimmed);
            let degree_ok = prof.max_deg_a <= delta && prof.max_deg_b <= delta;
            Ok((out.removed_edges as f64, degree_ok))
        })
        .collect();
    let outcomes = outcomes?;

    let removed: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    let within = removed.iter().filter(|&&r| r <= threshold).count() as u64;
    let degree_ok = outcomes.iter().filter(|o| o.1).count() as u64;

    Ok(TrialReport {
        experiment: "trim".into(),
        trials: cfg.trials,
        discarded: 0,
        guard_ok,
        records: vec![
            StatRecord::mean_vs_oracle("removed_edges", &removed, oracle_removed),
            StatRecord::frequency_vs_claim(
                "removed_within_bound",
                &removed,
                within,
                cfg.trials,
                threshold,
                0.99,
                guard_ok,
            ),
            StatRecord::invariant(
                "trimmed_max_degree_le_delta",
                degree_ok,
                cfg.trials,
                Some(delta as f64),
            ),
        ],
    })
}

/// Configuration for the completeness experiment (corrupted-planted spec).
#[derive(Clone, Debug)]
pub struct CompletenessTrialConfig {
    pub spec: GenSpec,
    pub gamma: f64,
    pub consts: ReductionConstants,
    pub trials: u64,
    pub seed: u64,
}

/// Completeness chain: sparsify a corrupted-planted instance, repair the
/// planted labeling on the trimmed instance, and track
///
/// * `|E_unsat ∩ E_interm|` against its exact mean `p·⌈ε|E|⌉` and the
///   Markov threshold `0.5·ε·Δ·N`,
/// * the repair cost against the `(1 + εΔ)N` bound (asserted only when the
///   Markov bound is at most 0.1) and the per-trial bound
///   `N + 2·|E_unsat ∩ E'|`, which always holds.
///
/// Repair costs are taken after clearing labels on vertices isolated in
/// the trimmed instance; they contribute nothing to the value.
pub fn trial_completeness(cfg: &CompletenessTrialConfig) -> Result<TrialReport, HarnessError> {
    let (inst, phi) = generate(&cfg.spec)?;
    let phi = phi.ok_or(HarnessError::NeedsPlantedKind)?;
    let m = inst.num_edges();
    let k = m - eval_labeling(&inst, &phi)?.satisfied;

    let profile = degree_profile(&inst);
    let d = profile.uniform_degree().ok_or(HarnessError::NotBiregular)?;
    let mut params = compute_params(inst.sigma(), cfg.gamma, &cfg.consts)?;
    let p = crate::reduce::bind_probability(&mut params, d)?;
    let delta = params.delta;
    let n_total = inst.total_vertices();
    let eps = cfg.spec.eps;

    let markov_threshold = 0.5 * eps * delta as f64 * n_total as f64;
    let markov_bound = if k == 0 {
        0.0
    } else {
        (p * k as f64 / markov_threshold).min(1.0)
    };
    let eps_delta_threshold = (1.0 + eps * delta as f64) * n_total as f64;
    let eps_delta_claimed = markov_bound <= 0.1;

    struct Trial {
        unsat_interm: f64,
        cost: f64,
        local_ok: bool,
        satisfies: bool,
        eps0_ok: bool,
    }
    let outcomes: Result<Vec<Trial>, HarnessError> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let out = sparsify(&inst, cfg.gamma, mix(cfg.seed, Stream::Trial, i), &cfg.consts)?;
            let unsat_interm =
                out.intermediate.num_edges() - eval_labeling(&out.intermediate, &phi)?.satisfied;
            let unsat_trimmed =
                out.trimmed.num_edges() - eval_labeling(&out.trimmed, &phi)?.satisfied;
            let mut repaired = repair_multilabeling(&out.trimmed, &phi);
            repaired.strip_isolated(&out.trimmed);
            let rep = eval_multilabeling(&out.trimmed, &repaired)?;
            let cost = repaired.cost();
            Ok(Trial {
                unsat_interm: unsat_interm as f64,
                cost: cost as f64,
                local_ok: cost <= n_total + 2 * unsat_trimmed,
                satisfies: rep.is_fully_satisfied(),
                eps0_ok: cost == out.trimmed.non_isolated_count(),
            })
        })
        .collect();
    let outcomes = outcomes?;

    let unsat: Vec<f64> = outcomes.iter().map(|t| t.unsat_interm).collect();
    let costs: Vec<f64> = outcomes.iter().map(|t| t.cost).collect();
    let within_markov = unsat.iter().filter(|&&x| x <= markov_threshold).count() as u64;
    let within_eps_delta = costs.iter().filter(|&&c| c <= eps_delta_threshold).count() as u64;
    let local_ok = outcomes.iter().filter(|t| t.local_ok).count() as u64;
    let satisfies = outcomes.iter().filter(|t| t.satisfies).count() as u64;

    let mut records = vec![
        StatRecord::mean_vs_oracle("unsat_in_intermediate", &unsat, p * k as f64),
        StatRecord::frequency_vs_claim(
            "unsat_within_markov_bound",
            &unsat,
            within_markov,
            cfg.trials,
            markov_threshold,
            1.0 - markov_bound,
            true,
        ),
        StatRecord::frequency_vs_claim(
            "repair_cost_within_eps_delta_bound",
            &costs,
            within_eps_delta,
            cfg.trials,
            eps_delta_threshold,
            0.9,
            eps_delta_claimed,
        ),
        StatRecord::invariant("repair_cost_le_local_bound", local_ok, cfg.trials, None),
        StatRecord::invariant("repair_fully_satisfies", satisfies, cfg.trials, None),
    ];
    if k == 0 {
        let eps0 = outcomes.iter().filter(|t| t.eps0_ok).count() as u64;
        records.push(StatRecord::invariant(
            "repair_cost_equals_non_isolated",
            eps0,
            cfg.trials,
            Some(n_total as f64),
        ));
    }

    Ok(TrialReport {
        experiment: "completeness".into(),
        trials: cfg.trials,
        discarded: 0,
        guard_ok: eps_delta_claimed,
        records,
    })
}

/// Configuration for the paired soundness experiment.
#[derive(Clone, Debug)]
pub struct SoundnessTrialConfig {
    pub n: usize,
    pub deg: usize,
    pub sigma: usize,
    pub gamma: f64,
    pub consts: ReductionConstants,
    pub trials: u64,
    pub seed: u64,
    /// Node budget for each exact solve; exhausted trials are discarded
    /// and counted.
    pub budget: u64,
}

/// Paired soundness trend at desk scale: per trial, draw a random and a
/// planted instance on the same graph, sparsify both with the same
/// randomness, and solve Min-Rep exactly on both. Tracks the pair success
/// `minrep(random') ≥ minrep(planted')` (regression floor 0.9), the
/// planted-arm identity `minrep(planted') = #non-isolated`, and the value
/// of the random arm measured by `maxrep_exact`.
pub fn trial_soundness_small(cfg: &SoundnessTrialConfig) -> Result<TrialReport, HarnessError> {
    struct Pair {
        val_random: f64,
        minrep_random: f64,
        minrep_planted: f64,
        pair_ok: bool,
        planted_ok: bool,
    }
    let outcomes: Result<Vec<Option<Pair>>, HarnessError> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let seed_i = mix(cfg.seed, Stream::Trial, i);
            let random_spec = GenSpec {
                n: cfg.n,
                deg: cfg.deg,
                sigma: cfg.sigma,
                kind: crate::generate::GenKind::Random,
                eps: 0.0,
                seed: seed_i,
            };
            let planted_spec =
                GenSpec { kind: crate::generate::GenKind::Planted, ..random_spec };
            let random = crate::generate::gen_random(&random_spec)?;
            let (planted, _) = crate::generate::gen_planted(&planted_spec)?;

            let val = maxrep_exact(&random, cfg.budget);
            if !val.proved_optimal {
                return Ok(None);
            }
            let sp_r = sparsify(&random, cfg.gamma, seed_i, &cfg.consts)?;
            let sp_p = sparsify(&planted, cfg.gamma, seed_i, &cfg.consts)?;
            let mr = minrep_exact(&sp_r.trimmed, cfg.budget);
            let mp = minrep_exact(&sp_p.trimmed, cfg.budget);
            if !mr.proved_optimal || !mp.proved_optimal {
                return Ok(None);
            }
            let n_total = random.total_vertices() as f64;
            Ok(Some(Pair {
                val_random: *val.value().numer() as f64 / *val.value().denom() as f64,
                minrep_random: mr.cost as f64 / n_total,
                minrep_planted: mp.cost as f64 / n_total,
                pair_ok: mr.cost >= mp.cost,
                planted_ok: mp.cost == sp_p.trimmed.non_isolated_count(),
            }))
        })
        .collect();
    let outcomes = outcomes?;

    let discarded = outcomes.iter().filter(|o| o.is_none()).count() as u64;
    let pairs: Vec<Pair> = outcomes.into_iter().flatten().collect();
    let kept = pairs.len() as u64;
    let pair_ok = pairs.iter().filter(|p| p.pair_ok).count() as u64;
    let planted_ok = pairs.iter().filter(|p| p.planted_ok).count() as u64;
    let vals: Vec<f64> = pairs.iter().map(|p| p.val_random).collect();
    let mr: Vec<f64> = pairs.iter().map(|p| p.minrep_random).collect();
    let mp: Vec<f64> = pairs.iter().map(|p| p.minrep_planted).collect();

    Ok(TrialReport {
        experiment: "soundness".into(),
        trials: cfg.trials,
        discarded,
        guard_ok: true,
        records: vec![
            StatRecord::frequency_floor("paired_random_ge_planted", pair_ok, kept, 0.9),
            StatRecord::invariant("planted_minrep_equals_non_isolated", planted_ok, kept, None),
            StatRecord::informational("random_value", &vals),
            StatRecord::informational("random_minrep_over_n", &mr),
            StatRecord::informational("planted_minrep_over_n", &mp),
        ],
    })
}

/// Repeated subsampling of a fixed instance under a multilabeling of value
/// < 1/2; tracks the number of unsatisfied edges surviving into the
/// intermediate instance against the exact `Binomial(|E_unsat|, p)` mean
/// and left tail at `0.2·p·D·n`, and checks that the exact tail is
/// dominated by `exp(−0.36·0.5·p·D·n)`.
pub fn trial_unsat_tail(
    inst: &Instance,
    psi: &Multilabeling,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<TrialReport, HarnessError> {
    let profile = degree_profile(inst);
    let d = profile.uniform_degree().ok_or(HarnessError::NotBiregular)?;
    let n = inst.n_a();
    let rep = eval_multilabeling(inst, psi)?;
    if 2 * rep.satisfied >= rep.total {
        return Err(HarnessError::ValueTooHigh { satisfied: rep.satisfied, total: rep.total });
    }
    let m = (rep.total - rep.satisfied) as u64;

    let threshold = 0.2 * p * d as f64 * n as f64;
    let oracle_mean = p * m as f64;
    let oracle_tail = binomial_tail_lt(m, p, threshold);
    let chernoff = (-0.36 * 0.5 * p * d as f64 * n as f64).exp();

    let counts: Result<Vec<f64>, HarnessError> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let interm = crate::reduce::subsample(inst, p, mix(seed, Stream::Trial, i))?;
            let kept_unsat =
                interm.num_edges() - eval_multilabeling(&interm, psi)?.satisfied;
            Ok(kept_unsat as f64)
        })
        .collect();
    let counts = counts?;
    let below = counts.iter().filter(|&&c| c < threshold).count() as u64;

    Ok(TrialReport {
        experiment: "unsat-tail".into(),
        trials,
        discarded: 0,
        guard_ok: true,
        records: vec![
            StatRecord::mean_vs_oracle("unsat_in_intermediate", &counts, oracle_mean),
            StatRecord::frequency_vs_oracle(
                "unsat_below_threshold",
                below,
                trials,
                threshold,
                oracle_tail,
            ),
            StatRecord::bound_holds("exact_tail_le_chernoff", oracle_tail, chernoff),
        ],
    })
}

/// The union-bound counting comparison at one parameter point.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct CountingRecord {
    pub n_total: usize,
    pub sigma: usize,
    pub gamma: f64,
    /// ⌊0.06·N/√γ⌋, the multilabeling cost being counted.
    pub t: u64,
    pub ln_binomial: f64,
    pub ln_bound: f64,
    pub holds: bool,
}

/// ln C(N·σ, ⌊0.06N/√γ⌋) against (0.5N/√γ)·ln(2σ). Requires σ > 1/γ
/// (otherwise the cost bound exceeds the total label budget and the
/// correspondence breaks down).
pub fn counting_bound(
    n_total: usize,
    sigma: usize,
    gamma: f64,
) -> Result<CountingRecord, HarnessError> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(HarnessError::GammaOutOfRange(gamma));
    }
    if (sigma as f64) <= 1.0 / gamma {
        return Err(HarnessError::SigmaGamma { sigma, gamma });
    }
    let t = (0.06 * n_total as f64 / gamma.sqrt()).floor() as u64;
    let ln_binomial = ln_choose((n_total * sigma) as u64, t);
    let ln_bound = 0.5 * n_total as f64 / gamma.sqrt() * (2.0 * sigma as f64).ln();
    Ok(CountingRecord {
        n_total,
        sigma,
        gamma,
        t,
        ln_binomial,
        ln_bound,
        holds: ln_binomial <= ln_bound,
    })
}

/// Exact expected value of `round_multilabeling`: per edge, the number of
/// satisfying pairs in ψ(a) × ψ(b) over |ψ(a)|·|ψ(b)|, averaged over
/// edges. Empty sets behave as the deterministic default symbol 0,
/// mirroring the rounding. Returned as an exact rational.
pub fn rounding_expectation(inst: &Instance, psi: &Multilabeling) -> BigRational {
    if inst.num_edges() == 0 {
        return BigRational::one();
    }
    let default = [0usize];
    let mut total = BigRational::zero();
    for e in inst.edges() {
        let sa = psi.set(Side::A, e.a);
        let sa: &[usize] = if sa.is_empty() { &default } else { sa };
        let sb = psi.set(Side::B, e.b);
        let sb: &[usize] = if sb.is_empty() { &default } else { sb };
        let pairs = sa
            .iter()
            .map(|&x| sb.iter().filter(|&&y| e.project(x) == y).count())
            .sum::<usize>();
        total += BigRational::new(
            BigInt::from(pairs),
            BigInt::from(sa.len() * sb.len()),
        );
    }
    total / BigRational::new(BigInt::from(inst.num_edges()), BigInt::one())
}

/// f64 view of [`rounding_expectation`], for report thresholds.
pub fn rounding_expectation_f64(inst: &Instance, psi: &Multilabeling) -> f64 {
    use num_traits::ToPrimitive;
    rounding_expectation(inst, psi).to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::GenKind;
    use crate::instance::fixtures::{tiny1, tiny2};
    use crate::instance::Labeling;
    use crate::reduce::ReductionConstants;

    fn desk_consts(delta: usize, sigma: usize, gamma: f64, p: f64, d: usize) -> ReductionConstants {
        ReductionConstants {
            c_delta: ReductionConstants::c_delta_for_target(delta, sigma, gamma),
            c_p: p * d as f64 / delta as f64,
            guard_ratio: 1.0,
        }
    }

    #[test]
    fn trim_p_zero_removes_nothing() {
        // p -> 0 via tiny c_p is not representable as exactly zero, so use
        // delta >= D instead: no vertex can exceed the bound.
        let cfg = TrimTrialConfig {
            spec: GenSpec { n: 6, deg: 3, sigma: 2, kind: GenKind::Random, eps: 0.0, seed: 1 },
            amplify: 1,
            gamma: 0.25,
            consts: desk_consts(3, 2, 0.25, 0.5, 3),
            trials: 50,
            seed: 2,
        };
        let report = trial_trim(&cfg).unwrap();
        // delta = D = 3: a kept degree can never exceed delta
        let rec = report.record("removed_edges").unwrap();
        assert_eq!(rec.mean, 0.0);
        assert_eq!(rec.oracle_value, Some(0.0));
        assert!(report.record("trimmed_max_degree_le_delta").unwrap().pass == Some(true));
    }

    #[test]
    fn trim_mean_matches_oracle_at_desk_point() {
        // D=16, delta=4, p=0.25: real trimming happens
        let cfg = TrimTrialConfig {
            spec: GenSpec { n: 8, deg: 4, sigma: 2, kind: GenKind::Random, eps: 0.0, seed: 3 },
            amplify: 4,
            gamma: 0.25,
            consts: desk_consts(4, 2, 0.25, 0.25, 16),
            trials: 600,
            seed: 4,
        };
        let report = trial_trim(&cfg).unwrap();
        assert!(!report.guard_ok); // desk constants cannot claim the 0.99 bound
        let rec = report.record("removed_edges").unwrap();
        assert_eq!(rec.pass, Some(true), "mean {} oracle {:?}", rec.mean, rec.oracle_value);
        assert!(rec.oracle_value.unwrap() > 1.0);
        assert_eq!(report.record("removed_within_bound").unwrap().pass, None);
    }

    #[test]
    fn trim_report_is_deterministic_across_workers() {
        let cfg = TrimTrialConfig {
            spec: GenSpec { n: 6, deg: 3, sigma: 2, kind: GenKind::Random, eps: 0.0, seed: 9 },
            amplify: 2,
            gamma: 0.25,
            consts: desk_consts(3, 2, 0.25, 0.4, 6),
            trials: 64,
            seed: 10,
        };
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| trial_trim(&cfg).unwrap());
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| trial_trim(&cfg).unwrap());
        assert_eq!(one.to_jsonl(), four.to_jsonl());
        assert_eq!(one.to_csv(), four.to_csv());
    }

    #[test]
    fn completeness_eps_zero_invariants() {
        let cfg = CompletenessTrialConfig {
            spec: GenSpec {
                n: 10,
                deg: 4,
                sigma: 3,
                kind: GenKind::Corrupted,
                eps: 0.0,
                seed: 5,
            },
            gamma: 0.25,
            consts: desk_consts(2, 3, 0.25, 0.5, 4),
            trials: 200,
            seed: 6,
        };
        let report = trial_completeness(&cfg).unwrap();
        assert_eq!(report.record("repair_cost_equals_non_isolated").unwrap().pass, Some(true));
        assert_eq!(report.record("repair_cost_le_local_bound").unwrap().pass, Some(true));
        assert_eq!(report.record("repair_fully_satisfies").unwrap().pass, Some(true));
        let unsat = report.record("unsat_in_intermediate").unwrap();
        assert_eq!(unsat.mean, 0.0);
        assert_eq!(unsat.oracle_value, Some(0.0));
    }

    #[test]
    fn completeness_mean_matches_exact_expectation() {
        let cfg = CompletenessTrialConfig {
            spec: GenSpec {
                n: 10,
                deg: 4,
                sigma: 3,
                kind: GenKind::Corrupted,
                eps: 0.1,
                seed: 7,
            },
            gamma: 0.25,
            consts: desk_consts(2, 3, 0.25, 0.5, 4),
            trials: 800,
            seed: 8,
        };
        let report = trial_completeness(&cfg).unwrap();
        // |E| = 40, k = 4, p = 0.5 -> oracle 2.0
        let rec = report.record("unsat_in_intermediate").unwrap();
        assert_eq!(rec.oracle_value, Some(2.0));
        assert_eq!(rec.pass, Some(true), "mean {}", rec.mean);
        assert_eq!(report.record("repair_cost_le_local_bound").unwrap().pass, Some(true));
    }

    #[test]
    fn completeness_p_one_no_trim_bound_is_deterministic() {
        // p = 1 and delta >= D: E' = E, so cost <= N + 2*ceil(eps|E|) always
        let cfg = CompletenessTrialConfig {
            spec: GenSpec {
                n: 8,
                deg: 3,
                sigma: 3,
                kind: GenKind::Corrupted,
                eps: 0.25,
                seed: 11,
            },
            gamma: 0.25,
            consts: desk_consts(3, 3, 0.25, 1.0, 3),
            trials: 50,
            seed: 12,
        };
        let report = trial_completeness(&cfg).unwrap();
        let costs = report.record("repair_cost_within_eps_delta_bound").unwrap();
        // every repair cost is at most N + 2k = 16 + 12
        assert!(costs.mean <= (16 + 12) as f64);
        assert_eq!(report.record("repair_cost_le_local_bound").unwrap().pass, Some(true));
    }

    #[test]
    fn soundness_small_paired_trend() {
        let cfg = SoundnessTrialConfig {
            n: 4,
            deg: 3,
            sigma: 4,
            gamma: 0.25,
            consts: desk_consts(2, 4, 0.25, 0.5, 3),
            trials: 40,
            seed: 13,
            budget: 2_000_000,
        };
        let report = trial_soundness_small(&cfg).unwrap();
        assert_eq!(report.record("paired_random_ge_planted").unwrap().pass, Some(true));
        assert_eq!(
            report.record("planted_minrep_equals_non_isolated").unwrap().pass,
            Some(true)
        );
        assert!(report.discarded < cfg.trials);
    }

    #[test]
    fn soundness_sigma_one_degenerates_to_planted() {
        let cfg = SoundnessTrialConfig {
            n: 4,
            deg: 2,
            sigma: 1,
            gamma: 0.25,
            consts: desk_consts(2, 1, 0.25, 0.5, 2),
            trials: 30,
            seed: 77,
            budget: 1_000_000,
        };
        let report = trial_soundness_small(&cfg).unwrap();
        assert_eq!(report.discarded, 0);
        // with one symbol the random arm is satisfiable, so the two arms
        // produce identical costs
        let vals = report.record("random_value").unwrap();
        assert_eq!(vals.mean, 1.0);
        let r = report.record("random_minrep_over_n").unwrap();
        let p = report.record("planted_minrep_over_n").unwrap();
        assert_eq!(r.mean, p.mean);
        assert_eq!(report.record("paired_random_ge_planted").unwrap().pass, Some(true));
    }

    #[test]
    fn unsat_tail_p_one_is_deterministic() {
        let inst = amplify_copies(&tiny1(), 4).unwrap();
        let psi = Multilabeling::empty(inst.n_a(), inst.n_b());
        let report = trial_unsat_tail(&inst, &psi, 1.0, 50, 14).unwrap();
        // every edge survives and every edge is unsatisfied: count = |E|
        let rec = report.record("unsat_in_intermediate").unwrap();
        assert_eq!(rec.mean, inst.num_edges() as f64);
        let freq = report.record("unsat_below_threshold").unwrap();
        assert_eq!(freq.success_count, Some(0));
        assert_eq!(freq.oracle_value, Some(0.0));
        assert_eq!(freq.pass, Some(true));
    }

    #[test]
    fn unsat_tail_rejects_high_value() {
        let inst = tiny2();
        let phi = Labeling::new(vec![0, 0], vec![0, 0]);
        let psi = phi.singleton_lift(); // value 3/4
        assert!(matches!(
            trial_unsat_tail(&inst, &psi, 0.5, 10, 0),
            Err(HarnessError::ValueTooHigh { .. })
        ));
    }

    #[test]
    fn unsat_tail_matches_exact_binomial() {
        // empty psi: every edge unsatisfied, m = |E| = 32, threshold 0.64
        let inst = amplify_copies(&tiny1(), 4).unwrap(); // n=8, D=8? no: t=4 -> n=8, D=8
        let psi = Multilabeling::empty(inst.n_a(), inst.n_b());
        let p = 0.1;
        let report = trial_unsat_tail(&inst, &psi, p, 3000, 15).unwrap();
        let rec = report.record("unsat_in_intermediate").unwrap();
        assert_eq!(rec.pass, Some(true), "mean {} vs {:?}", rec.mean, rec.oracle_value);
        let freq = report.record("unsat_below_threshold").unwrap();
        assert_eq!(freq.pass, Some(true), "freq {:?} vs {:?}", freq.frequency(), freq.oracle_value);
        assert_eq!(report.record("exact_tail_le_chernoff").unwrap().pass, Some(true));
    }

    #[test]
    fn counting_bound_reference_point() {
        let rec = counting_bound(20, 4, 0.36).unwrap();
        assert_eq!(rec.t, 2);
        assert!((rec.ln_binomial - 3160f64.ln()).abs() < 1e-9);
        assert!((rec.ln_bound - 0.5 * 20.0 / 0.6 * 8f64.ln()).abs() < 1e-9);
        assert!(rec.holds);

        // t = 0 always holds
        let rec = counting_bound(10, 64, 0.49).unwrap();
        assert_eq!(rec.t, 0);
        assert_eq!(rec.ln_binomial, 0.0);
        assert!(rec.holds);

        assert!(matches!(
            counting_bound(20, 2, 0.36),
            Err(HarnessError::SigmaGamma { .. })
        ));
    }

    #[test]
    fn rounding_expectation_examples() {
        use num_traits::ToPrimitive;
        // all-singleton: equals the induced labeling's value
        let inst = tiny2();
        let phi = Labeling::new(vec![0, 1], vec![0, 1]);
        let psi = phi.singleton_lift();
        let exact = rounding_expectation(&inst, &psi);
        let direct = eval_labeling(&inst, &phi).unwrap();
        assert_eq!(
            exact.to_f64().unwrap(),
            direct.satisfied as f64 / direct.total as f64
        );

        // the cost-5 witness: (1/2 + 1/2 + 1 + 1)/4 = 3/4
        let psi = Multilabeling::from_sets(vec![vec![0], vec![0]], vec![vec![0, 1], vec![0]]);
        let expect = rounding_expectation(&inst, &psi);
        assert_eq!(expect, BigRational::new(BigInt::from(3), BigInt::from(4)));

        // full sets: exactly 1/sigma on any projection instance
        let full = Multilabeling::full(&inst);
        assert_eq!(
            rounding_expectation(&inst, &full),
            BigRational::new(BigInt::from(1), BigInt::from(2))
        );
    }

    #[test]
    fn rounding_expectation_matches_monte_carlo() {
        let inst = tiny2();
        let psi = Multilabeling::from_sets(vec![vec![0], vec![0]], vec![vec![0, 1], vec![0]]);
        let exact = rounding_expectation_f64(&inst, &psi);
        let trials = 10_000u64;
        let mut sum = 0.0;
        for i in 0..trials {
            let phi = crate::solve::round_multilabeling(&inst, &psi, mix(77, Stream::Trial, i));
            let rep = eval_labeling(&inst, &phi).unwrap();
            sum += rep.satisfied as f64 / rep.total as f64;
        }
        let mean = sum / trials as f64;
        let radius = 3.0 * 0.5 / (trials as f64).sqrt();
        assert!((mean - exact).abs() < radius, "mean {mean} exact {exact}");
    }
}
