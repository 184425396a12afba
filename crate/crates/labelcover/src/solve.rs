//! Exact oracles for tiny instances, the trivial Δ-approximation, rounding,
//! and the repair construction.
//!
//! `maxrep_exact` enumerates only the A side: constraints are projections
//! A → B, so for a fixed left assignment each right vertex independently
//! takes the plurality of its incoming projected symbols. This cuts the
//! search from |Σ|^N to |Σ|^|A| and is cross-checked against direct
//! enumeration in the tests.
//!
//! `minrep_exact` is branch and bound over per-vertex label sets in
//! descending-degree order, pruning on (a) an unsatisfiable edge between
//! two finalized vertices and (b) assigned cost plus one per untouched
//! non-isolated vertex reaching the incumbent.

use num_rational::Ratio;
use rand::Rng;

use crate::instance::{Instance, Labeling, Multilabeling, Side, Symbol};
use crate::seed::{rng_for, Stream};

/// Max-Rep search result. The witness always re-evaluates to exactly
/// `satisfied/total`.
#[derive(Clone, Debug)]
pub struct MaxRepResult {
    pub satisfied: usize,
    pub total: usize,
    pub witness: Labeling,
    pub nodes_explored: u64,
    pub proved_optimal: bool,
}

impl MaxRepResult {
    pub fn value(&self) -> Ratio<u64> {
        if self.total == 0 {
            Ratio::from_integer(1)
        } else {
            Ratio::new(self.satisfied as u64, self.total as u64)
        }
    }
}

/// Min-Rep search result; the witness has value exactly 1.
#[derive(Clone, Debug)]
pub struct MinRepResult {
    pub cost: usize,
    pub witness: Multilabeling,
    pub nodes_explored: u64,
    pub proved_optimal: bool,
}

/// Exhaustive Max-Rep with the B-side plurality response. One node per
/// examined A-assignment; stops (flagged) when `budget` nodes are spent.
pub fn maxrep_exact(inst: &Instance, budget: u64) -> MaxRepResult {
    let (n_a, sigma) = (inst.n_a(), inst.sigma());
    // incoming (a, table) lists per b
    let mut incoming: Vec<Vec<(usize, &[Symbol])>> = vec![Vec::new(); inst.n_b()];
    for e in inst.edges() {
        incoming[e.b].push((e.a, &e.table));
    }

    let mut best_sat = 0usize;
    let mut best_a = vec![0 as Symbol; n_a];
    let mut best_b = vec![0 as Symbol; inst.n_b()];
    let mut have_best = false;

    let mut assign = vec![0 as Symbol; n_a];
    let mut counts = vec![0usize; sigma];
    let mut nodes = 0u64;
    let mut exhausted_all = inst.num_edges() == 0;

    if !exhausted_all {
        'outer: loop {
            if nodes >= budget {
                break;
            }
            nodes += 1;

            let mut sat = 0usize;
            let mut response = vec![0 as Symbol; inst.n_b()];
            for (b, inc) in incoming.iter().enumerate() {
                if inc.is_empty() {
                    continue;
                }
                counts.iter_mut().for_each(|c| *c = 0);
                for &(a, table) in inc {
                    counts[table[assign[a]]] += 1;
                }
                let (sym, cnt) = counts
                    .iter()
                    .enumerate()
                    .max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(&x.0)))
                    .unwrap();
                response[b] = sym;
                sat += cnt;
            }
            if !have_best || sat > best_sat {
                have_best = true;
                best_sat = sat;
                best_a.copy_from_slice(&assign);
                best_b = response;
            }

            // lexicographic odometer, rightmost digit fastest
            let mut pos = n_a;
            loop {
                if pos == 0 {
                    exhausted_all = true;
                    break 'outer;
                }
                pos -= 1;
                assign[pos] += 1;
                if assign[pos] < sigma {
                    break;
                }
                assign[pos] = 0;
            }
        }
    }

    let witness = Labeling::new(best_a, best_b);
    let satisfied = crate::instance::eval_labeling(inst, &witness)
        .expect("witness conforms by construction")
        .satisfied;
    MaxRepResult {
        satisfied,
        total: inst.num_edges(),
        witness,
        nodes_explored: nodes,
        proved_optimal: exhausted_all,
    }
}

/// The per-edge greedy: for every edge in canonical order, add label 0 to
/// the left endpoint and π(0) to the right endpoint. Always value 1; cost
/// at most Σ_v min(deg(v), |Σ|), hence a Δ(G)-approximation for Min-Rep.
pub fn trivial_minrep(inst: &Instance) -> Multilabeling {
    let mut psi = Multilabeling::empty(inst.n_a(), inst.n_b());
    for e in inst.edges() {
        psi.insert(Side::A, e.a, 0);
        psi.insert(Side::B, e.b, e.project(0));
    }
    psi
}

/// Order vertices by descending degree (ties: side A before B, then index).
fn branch_order(inst: &Instance) -> Vec<(Side, usize, usize)> {
    let (da, db) = inst.degrees();
    let mut verts: Vec<(Side, usize, usize)> = da
        .iter()
        .enumerate()
        .map(|(i, &d)| (Side::A, i, d))
        .chain(db.iter().enumerate().map(|(i, &d)| (Side::B, i, d)))
        .filter(|&(_, _, d)| d > 0)
        .collect();
    verts.sort_by(|x, y| y.2.cmp(&x.2).then(x.0.cmp(&y.0)).then(x.1.cmp(&y.1)));
    verts
}

/// Nonempty subsets of 0..sigma as bitmasks, ordered by size then
/// lexicographically on the sorted element list ({0} before {1}, {0,3}
/// before {1,2}).
fn subsets_by_size(sigma: usize) -> Vec<u64> {
    let mut masks: Vec<u64> = (1..(1u64 << sigma)).collect();
    masks.sort_by_key(|m| (m.count_ones(), std::cmp::Reverse(m.reverse_bits())));
    masks
}

/// Branch-and-bound Min-Rep for tiny instances (guideline N·|Σ| ≤ ~64).
/// Starts from the trivial greedy as the incumbent; on budget exhaustion
/// returns the best solution found with `proved_optimal = false`.
pub fn minrep_exact(inst: &Instance, budget: u64) -> MinRepResult {
    let trivial = trivial_minrep(inst);
    let trivial_cost = trivial.cost();
    let sigma = inst.sigma();

    if inst.num_edges() == 0 {
        return MinRepResult {
            cost: 0,
            witness: Multilabeling::empty(inst.n_a(), inst.n_b()),
            nodes_explored: 0,
            proved_optimal: true,
        };
    }
    if sigma > 20 {
        // mask table would be too large; fall back to the greedy incumbent
        return MinRepResult {
            cost: trivial_cost,
            witness: trivial,
            nodes_explored: 0,
            proved_optimal: false,
        };
    }

    let order = branch_order(inst);
    let mut pos_a = vec![usize::MAX; inst.n_a()];
    let mut pos_b = vec![usize::MAX; inst.n_b()];
    for (pos, &(side, idx, _)) in order.iter().enumerate() {
        match side {
            Side::A => pos_a[idx] = pos,
            Side::B => pos_b[idx] = pos,
        }
    }
    // edges from each position back to already-assigned positions
    let mut back_edges: Vec<Vec<(usize, bool)>> = vec![Vec::new(); order.len()];
    for (ei, e) in inst.edges().iter().enumerate() {
        let (pa, pb) = (pos_a[e.a], pos_b[e.b]);
        if pa > pb {
            back_edges[pa].push((ei, true));
        } else {
            back_edges[pb].push((ei, false));
        }
    }

    let mut search = Search {
        inst,
        back_edges,
        pos_a,
        pos_b,
        masks: subsets_by_size(sigma),
        assigned: vec![0u64; order.len()],
        n_positions: order.len(),
        best_cost: trivial_cost,
        best: None,
        nodes: 0,
        budget,
        exhausted: false,
    };
    search.dfs(0, 0);

    let (cost, witness) = match search.best {
        Some(masks) => {
            let mut psi = Multilabeling::empty(inst.n_a(), inst.n_b());
            for (pos, &(side, idx, _)) in order.iter().enumerate() {
                let mut rest = masks[pos];
                while rest != 0 {
                    let s = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    psi.insert(side, idx, s);
                }
            }
            (psi.cost(), psi)
        }
        None => (trivial_cost, trivial),
    };
    debug_assert!(crate::instance::eval_multilabeling(inst, &witness)
        .is_ok_and(|r| r.is_fully_satisfied()));
    MinRepResult {
        cost,
        witness,
        nodes_explored: search.nodes,
        proved_optimal: !search.exhausted,
    }
}

struct Search<'a> {
    inst: &'a Instance,
    back_edges: Vec<Vec<(usize, bool)>>,
    pos_a: Vec<usize>,
    pos_b: Vec<usize>,
    masks: Vec<u64>,
    assigned: Vec<u64>,
    n_positions: usize,
    best_cost: usize,
    best: Option<Vec<u64>>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl<'a> Search<'a> {
    fn edge_ok(&self, edge: usize, mask_a: u64, mask_b: u64) -> bool {
        let table = &self.inst.edges()[edge].table;
        let mut rest = mask_a;
        while rest != 0 {
            let s = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if mask_b & (1u64 << table[s]) != 0 {
                return true;
            }
        }
        false
    }

    fn dfs(&mut self, pos: usize, cost: usize) {
        if self.exhausted {
            return;
        }
        if pos == self.n_positions {
            // strict improvement keeps the first witness found, which makes
            // the result deterministic; ties leave the greedy incumbent
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best = Some(self.assigned.clone());
            }
            return;
        }
        for mi in 0..self.masks.len() {
            let mask = self.masks[mi];
            let size = mask.count_ones() as usize;
            // remaining untouched vertices each need >= 1 label
            if cost + size + (self.n_positions - pos - 1) >= self.best_cost {
                // masks are ordered by size; all later ones are at least as
                // expensive
                break;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                self.exhausted = true;
                return;
            }
            let ok = self.back_edges[pos].iter().all(|&(edge, this_is_a)| {
                let e = &self.inst.edges()[edge];
                if this_is_a {
                    let other_mask = self.assigned[self.pos_b[e.b]];
                    self.edge_ok(edge, mask, other_mask)
                } else {
                    let other_mask = self.assigned[self.pos_a[e.a]];
                    self.edge_ok(edge, other_mask, mask)
                }
            });
            if !ok {
                continue;
            }
            self.assigned[pos] = mask;
            self.dfs(pos + 1, cost + size);
            if self.exhausted {
                return;
            }
        }
    }
}

/// Uniform independent label per vertex (A side first, then B, ascending).
pub fn random_labeling(inst: &Instance, seed: u64) -> Labeling {
    let mut rng = rng_for(seed, Stream::RandomLabeling, 0);
    let labels_a = (0..inst.n_a()).map(|_| rng.random_range(0..inst.sigma())).collect();
    let labels_b = (0..inst.n_b()).map(|_| rng.random_range(0..inst.sigma())).collect();
    Labeling::new(labels_a, labels_b)
}

/// Pick a uniform member of each vertex's set; empty sets fall back to
/// symbol 0. Draw order: A side then B side, ascending index.
pub fn round_multilabeling(inst: &Instance, psi: &Multilabeling, seed: u64) -> Labeling {
    let mut rng = rng_for(seed, Stream::Rounding, 0);
    let mut pick = |set: &[Symbol]| -> Symbol {
        if set.is_empty() {
            0
        } else {
            set[rng.random_range(0..set.len())]
        }
    };
    let labels_a = (0..inst.n_a()).map(|i| pick(psi.set(Side::A, i))).collect();
    let labels_b = (0..inst.n_b()).map(|i| pick(psi.set(Side::B, i))).collect();
    Labeling::new(labels_a, labels_b)
}

/// Repair a labeling into a fully satisfying multilabeling: start from the
/// singleton lift, then for every edge unsatisfied by `phi` (canonical
/// order) add 0 to ψ(a) and π(0) to ψ(b). Cost ≤ N + 2·#unsatisfied.
pub fn repair_multilabeling(inst: &Instance, phi: &Labeling) -> Multilabeling {
    let mut psi = phi.singleton_lift();
    for e in inst.edges() {
        if e.project(phi.labels_a[e.a]) != phi.labels_b[e.b] {
            psi.insert(Side::A, e.a, 0);
            psi.insert(Side::B, e.b, e.project(0));
        }
    }
    psi
}
