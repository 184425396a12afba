//! Seeded instance generators: regular bipartite graphs, planted (perfectly
//! satisfiable) instances, ε-corrupted instances, and uniformly random
//! instances. Same spec, same bytes — every draw goes through the pinned
//! seed streams.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::instance::{Edge, Instance, Labeling, Symbol};
use crate::seed::{rng_for, Stream};

/// How the projection tables are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    /// Tables consistent with a hidden labeling; value is exactly 1.
    Planted,
    /// Planted, then exactly ⌈ε|E|⌉ edges redirected away from the plant.
    Corrupted,
    /// Every table entry independently uniform.
    Random,
}

impl GenKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GenKind::Planted => "planted",
            GenKind::Corrupted => "corrupted",
            GenKind::Random => "random",
        }
    }
}

/// Parameters for one generated instance: `n` vertices per side, regular
/// degree `deg`, alphabet size `sigma`.
#[derive(Clone, Copy, Debug)]
pub struct GenSpec {
    pub n: usize,
    pub deg: usize,
    pub sigma: usize,
    pub kind: GenKind,
    /// Corruption fraction; only meaningful for `Corrupted`.
    pub eps: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum GenError {
    #[error("degree {deg} exceeds side size {n} (simple graph impossible)")]
    DegreeExceedsSide { deg: usize, n: usize },
    #[error("n and deg must be at least 1 and sigma at least 1")]
    DegenerateSpec,
    #[error("matching construction failed after {restarts} restarts of {retries} retries each")]
    RetryBudgetExhausted { restarts: u64, retries: usize },
    #[error("eps {0} out of range [0, 1]")]
    EpsOutOfRange(f64),
    #[error("cannot corrupt with sigma < 2")]
    AlphabetTooSmall,
    #[error("labeling does not perfectly satisfy the instance ({satisfied}/{total})")]
    NotPerfectlySatisfying { satisfied: usize, total: usize },
    #[error("evaluation failed: {0}")]
    Eval(#[from] crate::instance::EvalError),
}

const MATCHING_RETRIES: usize = 200;
const RESTART_BUDGET: u64 = 200;

/// A `deg`-regular simple bipartite graph on `n + n` vertices, built as the
/// union of `deg` random perfect matchings. A matching that collides with
/// already-placed edges is resampled up to a retry budget; exhausting it
/// restarts the whole construction from a derived seed.
pub fn gen_regular_bipartite(
    n: usize,
    deg: usize,
    seed: u64,
) -> Result<Vec<(usize, usize)>, GenError> {
    if n == 0 || deg == 0 {
        return Err(GenError::DegenerateSpec);
    }
    if deg > n {
        return Err(GenError::DegreeExceedsSide { deg, n });
    }
    if deg == n {
        // the union of n disjoint matchings on n+n vertices is forced
        let mut edges = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                edges.push((a, b));
            }
        }
        return Ok(edges);
    }
    for restart in 0..RESTART_BUDGET {
        let mut rng = rng_for(seed, Stream::Graph, restart);
        let mut used = vec![false; n * n];
        let mut perm: Vec<usize> = (0..n).collect();
        let mut complete = true;
        'matchings: for _ in 0..deg {
            for _ in 0..MATCHING_RETRIES {
                perm.shuffle(&mut rng);
                if perm.iter().enumerate().all(|(a, &b)| !used[a * n + b]) {
                    for (a, &b) in perm.iter().enumerate() {
                        used[a * n + b] = true;
                    }
                    continue 'matchings;
                }
            }
            complete = false;
            break;
        }
        if complete {
            let mut edges = Vec::with_capacity(n * deg);
            for a in 0..n {
                for b in 0..n {
                    if used[a * n + b] {
                        edges.push((a, b));
                    }
                }
            }
            return Ok(edges);
        }
    }
    Err(GenError::RetryBudgetExhausted { restarts: RESTART_BUDGET, retries: MATCHING_RETRIES })
}

fn uniform_labeling(n_a: usize, n_b: usize, sigma: usize, rng: &mut impl Rng) -> Labeling {
    let labels_a = (0..n_a).map(|_| rng.random_range(0..sigma)).collect();
    let labels_b = (0..n_b).map(|_| rng.random_range(0..sigma)).collect();
    Labeling::new(labels_a, labels_b)
}

/// Planted instance: uniform hidden labeling φ*, then per edge a uniform
/// table overridden at `φ*(a)` to map to `φ*(b)`. `eval_labeling(inst, φ*)`
/// is exactly 1.
pub fn gen_planted(spec: &GenSpec) -> Result<(Instance, Labeling), GenError> {
    let graph = gen_regular_bipartite(spec.n, spec.deg, spec.seed)?;
    if spec.sigma == 0 {
        return Err(GenError::DegenerateSpec);
    }
    let mut label_rng = rng_for(spec.seed, Stream::PlantedLabeling, 0);
    let phi = uniform_labeling(spec.n, spec.n, spec.sigma, &mut label_rng);
    let mut table_rng = rng_for(spec.seed, Stream::Tables, 0);
    let edges = graph
        .into_iter()
        .map(|(a, b)| {
            let mut table: Vec<Symbol> =
                (0..spec.sigma).map(|_| table_rng.random_range(0..spec.sigma)).collect();
            table[phi.labels_a[a]] = phi.labels_b[b];
            Edge::new(a, b, table)
        })
        .collect();
    let inst = Instance::from_sorted_unchecked(spec.n, spec.n, spec.sigma, edges);
    Ok((inst, phi))
}

/// Uniformly random instance: every table entry independent uniform.
pub fn gen_random(spec: &GenSpec) -> Result<Instance, GenError> {
    let graph = gen_regular_bipartite(spec.n, spec.deg, spec.seed)?;
    if spec.sigma == 0 {
        return Err(GenError::DegenerateSpec);
    }
    let mut table_rng = rng_for(spec.seed, Stream::Tables, 0);
    let edges = graph
        .into_iter()
        .map(|(a, b)| {
            let table =
                (0..spec.sigma).map(|_| table_rng.random_range(0..spec.sigma)).collect();
            Edge::new(a, b, table)
        })
        .collect();
    Ok(Instance::from_sorted_unchecked(spec.n, spec.n, spec.sigma, edges))
}

/// Number of edges corrupted for a given fraction: ⌈eps · m⌉, with a snap
/// to the nearest integer when floating-point noise puts `eps·m` within
/// 1e-9 of one.
pub fn corruption_count(eps: f64, num_edges: usize) -> usize {
    let x = eps * num_edges as f64;
    let nearest = x.round();
    if (x - nearest).abs() < 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        x.ceil() as usize
    }
}

/// Redirect exactly ⌈eps·|E|⌉ edges, chosen uniformly without replacement,
/// so that `φ*` no longer satisfies them: the table entry at `φ*(a)` moves
/// to a uniform symbol ≠ `φ*(b)`. The rest of the instance is untouched, so
/// `eval_labeling(result, φ*) = 1 − ⌈eps·|E|⌉/|E|` exactly.
pub fn corrupt(
    inst: &Instance,
    phi_star: &Labeling,
    eps: f64,
    seed: u64,
) -> Result<Instance, GenError> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(GenError::EpsOutOfRange(eps));
    }
    let rep = crate::instance::eval_labeling(inst, phi_star)?;
    if !rep.is_fully_satisfied() {
        return Err(GenError::NotPerfectlySatisfying { satisfied: rep.satisfied, total: rep.total });
    }
    let m = inst.num_edges();
    let k = corruption_count(eps, m);
    if k == 0 {
        return Ok(inst.clone());
    }
    if inst.sigma() < 2 {
        return Err(GenError::AlphabetTooSmall);
    }
    let mut rng = rng_for(seed, Stream::Corrupt, 0);
    // partial Fisher-Yates: first k entries are a uniform k-subset
    let mut idx: Vec<usize> = (0..m).collect();
    for i in 0..k {
        let j = rng.random_range(i..m);
        idx.swap(i, j);
    }
    let mut chosen: Vec<usize> = idx[..k].to_vec();
    chosen.sort_unstable();

    let mut edges = inst.edges().to_vec();
    for &ei in &chosen {
        let e = &mut edges[ei];
        let target = phi_star.labels_b[e.b];
        let mut wrong = rng.random_range(0..inst.sigma() - 1);
        if wrong >= target {
            wrong += 1;
        }
        e.table[phi_star.labels_a[e.a]] = wrong;
    }
    Ok(Instance::from_sorted_unchecked(inst.n_a(), inst.n_b(), inst.sigma(), edges))
}

/// Dispatch on `spec.kind`. Returns the planted labeling when one exists.
pub fn generate(spec: &GenSpec) -> Result<(Instance, Option<Labeling>), GenError> {
    match spec.kind {
        GenKind::Planted => {
            let (inst, phi) = gen_planted(spec)?;
            Ok((inst, Some(phi)))
        }
        GenKind::Random => Ok((gen_random(spec)?, None)),
        GenKind::Corrupted => {
            let (inst, phi) = gen_planted(spec)?;
            let corrupted = corrupt(&inst, &phi, spec.eps, spec.seed)?;
            Ok((corrupted, Some(phi)))
        }
    }
}
