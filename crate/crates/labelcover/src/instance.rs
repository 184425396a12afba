//! Instance, labeling, and multilabeling data model plus the evaluators
//! that define every objective value used in the crate.
//!
//! Instances are immutable after construction and hold their edges in
//! canonical order (sorted by `(a, b)`), so equal instances serialize to
//! identical bytes. Symbols are dense integers `0..sigma`; projection
//! tables are dense length-`sigma` arrays.

use std::collections::BTreeMap;

use num_rational::Ratio;
use thiserror::Error;

/// An alphabet symbol, always `< sigma` of the instance it belongs to.
pub type Symbol = usize;

/// Which side of the bipartition a vertex lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn as_char(self) -> char {
        match self {
            Side::A => 'a',
            Side::B => 'b',
        }
    }
}

/// One constraint: edge `(a, b)` with projection table `table`, where the
/// edge is satisfied by `(σ_a, σ_b)` iff `table[σ_a] == σ_b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub table: Vec<Symbol>,
}

impl Edge {
    pub fn new(a: usize, b: usize, table: Vec<Symbol>) -> Self {
        Edge { a, b, table }
    }

    #[inline]
    pub fn project(&self, s: Symbol) -> Symbol {
        self.table[s]
    }
}

/// A violation found while validating raw instance data. Every violation
/// is reported, not just the first.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("n_a must be at least 1")]
    EmptyLeftSide,
    #[error("n_b must be at least 1")]
    EmptyRightSide,
    #[error("sigma must be at least 1")]
    EmptyAlphabet,
    #[error("edge {index}: a index {a} out of range (n_a = {n_a})")]
    AOutOfRange { index: usize, a: usize, n_a: usize },
    #[error("edge {index}: b index {b} out of range (n_b = {n_b})")]
    BOutOfRange { index: usize, b: usize, n_b: usize },
    #[error("edge {index}: table length {got} != sigma {sigma}")]
    TableLength { index: usize, got: usize, sigma: usize },
    #[error("edge {index}: table entry {entry} at position {pos} out of range (sigma = {sigma})")]
    TableEntry { index: usize, pos: usize, entry: usize, sigma: usize },
    #[error("duplicate edge ({a}, {b})")]
    DuplicateEdge { a: usize, b: usize },
}

/// A Label Cover instance: bipartite constraint graph over a shared
/// alphabet, one projection table per edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    n_a: usize,
    n_b: usize,
    sigma: usize,
    edges: Vec<Edge>,
}

impl Instance {
    /// Validate raw data and return the canonicalized instance. All
    /// invariant violations are collected; edge indices in errors refer to
    /// the input order.
    pub fn new(
        n_a: usize,
        n_b: usize,
        sigma: usize,
        edges: Vec<Edge>,
    ) -> Result<Self, Vec<InstanceError>> {
        let mut errors = Vec::new();
        if n_a == 0 {
            errors.push(InstanceError::EmptyLeftSide);
        }
        if n_b == 0 {
            errors.push(InstanceError::EmptyRightSide);
        }
        if sigma == 0 {
            errors.push(InstanceError::EmptyAlphabet);
        }
        for (index, e) in edges.iter().enumerate() {
            if e.a >= n_a {
                errors.push(InstanceError::AOutOfRange { index, a: e.a, n_a });
            }
            if e.b >= n_b {
                errors.push(InstanceError::BOutOfRange { index, b: e.b, n_b });
            }
            if e.table.len() != sigma {
                errors.push(InstanceError::TableLength { index, got: e.table.len(), sigma });
            } else {
                for (pos, &entry) in e.table.iter().enumerate() {
                    if entry >= sigma {
                        errors.push(InstanceError::TableEntry { index, pos, entry, sigma });
                    }
                }
            }
        }
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for e in &edges {
            if !seen.insert((e.a, e.b)) {
                errors.push(InstanceError::DuplicateEdge { a: e.a, b: e.b });
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        let mut edges = edges;
        edges.sort_by_key(|e| (e.a, e.b));
        Ok(Instance { n_a, n_b, sigma, edges })
    }

    /// Construct from edges already known to be valid and sorted. Used by
    /// the reduction pipeline where the invariants hold by construction.
    pub(crate) fn from_sorted_unchecked(
        n_a: usize,
        n_b: usize,
        sigma: usize,
        edges: Vec<Edge>,
    ) -> Self {
        debug_assert!(edges.windows(2).all(|w| (w[0].a, w[0].b) < (w[1].a, w[1].b)));
        debug_assert!(edges
            .iter()
            .all(|e| e.a < n_a && e.b < n_b && e.table.len() == sigma));
        Instance { n_a, n_b, sigma, edges }
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    /// N = n_a + n_b.
    pub fn total_vertices(&self) -> usize {
        self.n_a + self.n_b
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Per-vertex degrees, left side and right side.
    pub fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        let mut da = vec![0usize; self.n_a];
        let mut db = vec![0usize; self.n_b];
        for e in &self.edges {
            da[e.a] += 1;
            db[e.b] += 1;
        }
        (da, db)
    }

    /// Count of vertices with degree ≥ 1.
    pub fn non_isolated_count(&self) -> usize {
        let (da, db) = self.degrees();
        da.iter().filter(|&&d| d > 0).count() + db.iter().filter(|&&d| d > 0).count()
    }
}

/// One symbol per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    pub labels_a: Vec<Symbol>,
    pub labels_b: Vec<Symbol>,
}

impl Labeling {
    pub fn new(labels_a: Vec<Symbol>, labels_b: Vec<Symbol>) -> Self {
        Labeling { labels_a, labels_b }
    }

    pub fn get(&self, side: Side, index: usize) -> Symbol {
        match side {
            Side::A => self.labels_a[index],
            Side::B => self.labels_b[index],
        }
    }

    /// Lift to the multilabeling assigning `{φ(v)}` everywhere.
    pub fn singleton_lift(&self) -> Multilabeling {
        Multilabeling {
            sets_a: self.labels_a.iter().map(|&s| vec![s]).collect(),
            sets_b: self.labels_b.iter().map(|&s| vec![s]).collect(),
        }
    }

    fn check_against(&self, inst: &Instance) -> Result<(), EvalError> {
        if self.labels_a.len() != inst.n_a || self.labels_b.len() != inst.n_b {
            return Err(EvalError::DimensionMismatch {
                got_a: self.labels_a.len(),
                got_b: self.labels_b.len(),
                n_a: inst.n_a,
                n_b: inst.n_b,
            });
        }
        for (&s, side) in self
            .labels_a
            .iter()
            .map(|s| (s, Side::A))
            .chain(self.labels_b.iter().map(|s| (s, Side::B)))
        {
            if s >= inst.sigma {
                return Err(EvalError::SymbolOutOfRange { side, symbol: s, sigma: inst.sigma });
            }
        }
        Ok(())
    }
}

/// A set of symbols per vertex; sets may be empty. Stored sorted and
/// deduplicated so equal multilabelings compare and serialize identically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multilabeling {
    sets_a: Vec<Vec<Symbol>>,
    sets_b: Vec<Vec<Symbol>>,
}

impl Multilabeling {
    /// All-empty multilabeling for the given dimensions.
    pub fn empty(n_a: usize, n_b: usize) -> Self {
        Multilabeling { sets_a: vec![Vec::new(); n_a], sets_b: vec![Vec::new(); n_b] }
    }

    /// Assigns the full alphabet to every vertex.
    pub fn full(inst: &Instance) -> Self {
        let all: Vec<Symbol> = (0..inst.sigma).collect();
        Multilabeling {
            sets_a: vec![all.clone(); inst.n_a],
            sets_b: vec![all; inst.n_b],
        }
    }

    /// Build from explicit sets; each set is sorted and deduplicated.
    pub fn from_sets(mut sets_a: Vec<Vec<Symbol>>, mut sets_b: Vec<Vec<Symbol>>) -> Self {
        for s in sets_a.iter_mut().chain(sets_b.iter_mut()) {
            s.sort_unstable();
            s.dedup();
        }
        Multilabeling { sets_a, sets_b }
    }

    pub fn set(&self, side: Side, index: usize) -> &[Symbol] {
        match side {
            Side::A => &self.sets_a[index],
            Side::B => &self.sets_b[index],
        }
    }

    pub fn sets(&self, side: Side) -> &[Vec<Symbol>] {
        match side {
            Side::A => &self.sets_a,
            Side::B => &self.sets_b,
        }
    }

    /// Insert a symbol; returns true if it was not already present.
    pub fn insert(&mut self, side: Side, index: usize, symbol: Symbol) -> bool {
        let set = match side {
            Side::A => &mut self.sets_a[index],
            Side::B => &mut self.sets_b[index],
        };
        match set.binary_search(&symbol) {
            Ok(_) => false,
            Err(pos) => {
                set.insert(pos, symbol);
                true
            }
        }
    }

    pub fn contains(&self, side: Side, index: usize, symbol: Symbol) -> bool {
        self.set(side, index).binary_search(&symbol).is_ok()
    }

    /// Total label count Σ_v |ψ(v)|.
    pub fn cost(&self) -> usize {
        self.sets_a.iter().map(Vec::len).sum::<usize>()
            + self.sets_b.iter().map(Vec::len).sum::<usize>()
    }

    /// Clear the sets of vertices isolated in `inst`. Isolated vertices
    /// never affect the value, so dropping their labels only lowers cost.
    pub fn strip_isolated(&mut self, inst: &Instance) {
        let (da, db) = inst.degrees();
        for (set, &d) in self.sets_a.iter_mut().zip(&da) {
            if d == 0 {
                set.clear();
            }
        }
        for (set, &d) in self.sets_b.iter_mut().zip(&db) {
            if d == 0 {
                set.clear();
            }
        }
    }

    fn check_against(&self, inst: &Instance) -> Result<(), EvalError> {
        if self.sets_a.len() != inst.n_a || self.sets_b.len() != inst.n_b {
            return Err(EvalError::DimensionMismatch {
                got_a: self.sets_a.len(),
                got_b: self.sets_b.len(),
                n_a: inst.n_a,
                n_b: inst.n_b,
            });
        }
        for (sets, side) in [(&self.sets_a, Side::A), (&self.sets_b, Side::B)] {
            for set in sets.iter() {
                for &s in set {
                    if s >= inst.sigma {
                        return Err(EvalError::SymbolOutOfRange {
                            side,
                            symbol: s,
                            sigma: inst.sigma,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("labeling has {got_a}+{got_b} vertices, instance has {n_a}+{n_b}")]
    DimensionMismatch { got_a: usize, got_b: usize, n_a: usize, n_b: usize },
    #[error("symbol {symbol} on side {} out of range (sigma = {sigma})", side.as_char())]
    SymbolOutOfRange { side: Side, symbol: Symbol, sigma: usize },
}

/// Result of evaluating a labeling or multilabeling.
///
/// `value()` is exact rational `satisfied / total`; an instance with no
/// edges evaluates to 1 (every constraint vacuously satisfied), which keeps
/// `minrep` of an edgeless instance well-defined at cost 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalReport {
    pub satisfied: usize,
    pub total: usize,
    /// Total label count; present only for multilabeling evaluations.
    pub cost: Option<usize>,
}

impl EvalReport {
    pub fn value(&self) -> Ratio<u64> {
        if self.total == 0 {
            Ratio::from_integer(1)
        } else {
            Ratio::new(self.satisfied as u64, self.total as u64)
        }
    }

    pub fn is_fully_satisfied(&self) -> bool {
        self.satisfied == self.total
    }
}

/// Fraction of edges with `π(φ(a)) = φ(b)`.
pub fn eval_labeling(inst: &Instance, phi: &Labeling) -> Result<EvalReport, EvalError> {
    phi.check_against(inst)?;
    let satisfied = inst
        .edges
        .iter()
        .filter(|e| e.project(phi.labels_a[e.a]) == phi.labels_b[e.b])
        .count();
    Ok(EvalReport { satisfied, total: inst.edges.len(), cost: None })
}

/// Fraction of edges with `π(ψ(a)) ∩ ψ(b) ≠ ∅`, plus the cost Σ|ψ(v)|.
/// An edge touching an empty set is unsatisfied.
pub fn eval_multilabeling(inst: &Instance, psi: &Multilabeling) -> Result<EvalReport, EvalError> {
    psi.check_against(inst)?;
    let satisfied = inst
        .edges
        .iter()
        .filter(|e| {
            psi.sets_a[e.a]
                .iter()
                .any(|&sa| psi.sets_b[e.b].binary_search(&e.project(sa)).is_ok())
        })
        .count();
    Ok(EvalReport { satisfied, total: inst.edges.len(), cost: Some(psi.cost()) })
}

/// Degree statistics of the constraint graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    pub max_deg_a: usize,
    pub max_deg_b: usize,
    pub min_deg: usize,
    /// All left degrees equal and all right degrees equal.
    pub is_biregular: bool,
    /// degree -> vertex count, over both sides.
    pub histogram: BTreeMap<usize, usize>,
}

impl DegreeProfile {
    /// The common degree D when every vertex on both sides has the same
    /// degree (the regularity the sparsification pipeline requires).
    pub fn uniform_degree(&self) -> Option<usize> {
        if self.is_biregular && self.max_deg_a == self.max_deg_b {
            Some(self.max_deg_a)
        } else {
            None
        }
    }
}

pub fn degree_profile(inst: &Instance) -> DegreeProfile {
    let (da, db) = inst.degrees();
    let max_deg_a = da.iter().copied().max().unwrap_or(0);
    let max_deg_b = db.iter().copied().max().unwrap_or(0);
    let min_a = da.iter().copied().min().unwrap_or(0);
    let min_b = db.iter().copied().min().unwrap_or(0);
    let is_biregular = max_deg_a == min_a && max_deg_b == min_b;
    let mut histogram = BTreeMap::new();
    for d in da.iter().chain(db.iter()) {
        *histogram.entry(*d).or_insert(0) += 1;
    }
    DegreeProfile {
        max_deg_a,
        max_deg_b,
        min_deg: min_a.min(min_b),
        is_biregular,
        histogram,
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::{tiny1, tiny2};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tiny1_validates_canonical() {
        let inst = tiny1();
        assert_eq!(inst.num_edges(), 4);
        let keys: Vec<_> = inst.edges().iter().map(|e| (e.a, e.b)).collect();
        assert_eq!(keys, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn validation_reports_each_violation() {
        // table of length 3 with sigma=2
        let err = Instance::new(1, 1, 2, vec![Edge::new(0, 0, vec![0, 1, 0])]).unwrap_err();
        assert!(matches!(err[0], InstanceError::TableLength { got: 3, sigma: 2, .. }));

        // duplicate edge (0,0)
        let err = Instance::new(
            1,
            1,
            2,
            vec![Edge::new(0, 0, vec![0, 1]), Edge::new(0, 0, vec![1, 0])],
        )
        .unwrap_err();
        assert!(err.contains(&InstanceError::DuplicateEdge { a: 0, b: 0 }));

        // several violations at once, all reported
        let err = Instance::new(
            1,
            1,
            0,
            vec![Edge::new(2, 3, vec![0])],
        )
        .unwrap_err();
        assert!(err.len() >= 3, "{err:?}");
    }

    #[test]
    fn eval_tiny1_examples() {
        let inst = tiny1();
        let zeros = Labeling::new(vec![0, 0], vec![0, 0]);
        let rep = eval_labeling(&inst, &zeros).unwrap();
        assert_eq!((rep.satisfied, rep.total), (3, 4));
        assert_eq!(rep.value(), Ratio::new(3, 4));

        let opt = Labeling::new(vec![1, 0], vec![1, 0]);
        assert_eq!(eval_labeling(&inst, &opt).unwrap().value(), Ratio::from_integer(1));

        let single = Instance::new(1, 1, 2, vec![Edge::new(0, 0, vec![0, 1])]).unwrap();
        let phi = Labeling::new(vec![1], vec![1]);
        assert_eq!(eval_labeling(&single, &phi).unwrap().value(), Ratio::from_integer(1));
    }

    // Exhaustive check over all 16 labelings: the optimum of TINY1 is 1.
    #[test]
    fn tiny1_optimum_by_enumeration() {
        let inst = tiny1();
        let mut best = Ratio::new(0, 1);
        for bits in 0..16u32 {
            let phi = Labeling::new(
                vec![(bits & 1) as usize, ((bits >> 1) & 1) as usize],
                vec![((bits >> 2) & 1) as usize, ((bits >> 3) & 1) as usize],
            );
            best = best.max(eval_labeling(&inst, &phi).unwrap().value());
        }
        assert_eq!(best, Ratio::from_integer(1));
    }

    #[test]
    fn eval_multilabeling_tiny2_examples() {
        let inst = tiny2();
        let psi = Multilabeling::from_sets(
            vec![vec![0], vec![0]],
            vec![vec![0, 1], vec![0]],
        );
        let rep = eval_multilabeling(&inst, &psi).unwrap();
        assert_eq!(rep.value(), Ratio::from_integer(1));
        assert_eq!(rep.cost, Some(5));

        let empty = Multilabeling::empty(2, 2);
        let rep = eval_multilabeling(&inst, &empty).unwrap();
        assert_eq!(rep.value(), Ratio::new(0, 1));
        assert_eq!(rep.cost, Some(0));

        let full = Multilabeling::full(&inst);
        let rep = eval_multilabeling(&inst, &full).unwrap();
        assert_eq!(rep.value(), Ratio::from_integer(1));
        assert_eq!(rep.cost, Some(inst.total_vertices() * inst.sigma()));
    }

    #[test]
    fn degree_profile_examples() {
        let p = degree_profile(&tiny1());
        assert_eq!((p.max_deg_a, p.max_deg_b, p.min_deg, p.is_biregular), (2, 2, 2, true));
        assert_eq!(p.uniform_degree(), Some(2));

        let minus = Instance::new(
            2,
            2,
            2,
            vec![
                Edge::new(0, 0, vec![0, 1]),
                Edge::new(0, 1, vec![0, 0]),
                Edge::new(1, 0, vec![1, 0]),
            ],
        )
        .unwrap();
        let p = degree_profile(&minus);
        assert_eq!((p.max_deg_a, p.max_deg_b, p.min_deg, p.is_biregular), (2, 2, 1, false));
        assert_eq!(p.uniform_degree(), None);

        let empty = Instance::new(3, 2, 2, vec![]).unwrap();
        let p = degree_profile(&empty);
        assert_eq!((p.max_deg_a, p.max_deg_b, p.min_deg, p.is_biregular), (0, 0, 0, true));
        assert_eq!(p.histogram.get(&0), Some(&5));
    }

    #[test]
    fn eval_checks_dimensions_and_alphabet() {
        let inst = tiny1();
        let short = Labeling::new(vec![0], vec![0, 0]);
        assert!(matches!(
            eval_labeling(&inst, &short),
            Err(EvalError::DimensionMismatch { .. })
        ));
        let big = Labeling::new(vec![0, 2], vec![0, 0]);
        assert!(matches!(
            eval_labeling(&inst, &big),
            Err(EvalError::SymbolOutOfRange { symbol: 2, .. })
        ));
    }

    /// Strategy: a small random instance together with a conforming labeling.
    fn inst_and_labeling() -> impl Strategy<Value = (Instance, Labeling)> {
        (1usize..=4, 1usize..=4, 1usize..=3).prop_flat_map(|(n_a, n_b, sigma)| {
            let edge = (0..n_a, 0..n_b, proptest::collection::vec(0..sigma, sigma));
            let edges = proptest::collection::vec(edge, 0..=(n_a * n_b).min(8));
            let la = proptest::collection::vec(0..sigma, n_a);
            let lb = proptest::collection::vec(0..sigma, n_b);
            (edges, la, lb).prop_map(move |(raw, la, lb)| {
                let mut seen = std::collections::HashSet::new();
                let edges: Vec<Edge> = raw
                    .into_iter()
                    .filter(|(a, b, _)| seen.insert((*a, *b)))
                    .map(|(a, b, t)| Edge::new(a, b, t))
                    .collect();
                (Instance::new(n_a, n_b, sigma, edges).unwrap(), Labeling::new(la, lb))
            })
        })
    }

    proptest! {
        // singleton lift agrees with plain labeling evaluation
        #[test]
        fn lift_matches_labeling((inst, phi) in inst_and_labeling()) {
            let direct = eval_labeling(&inst, &phi).unwrap();
            let lifted = eval_multilabeling(&inst, &phi.singleton_lift()).unwrap();
            prop_assert_eq!(direct.satisfied, lifted.satisfied);
            prop_assert_eq!(lifted.cost, Some(inst.total_vertices()));
        }

        // adding a symbol never decreases the value and costs exactly 1
        #[test]
        fn adding_symbol_is_monotone(
            (inst, phi) in inst_and_labeling(),
            pick in any::<proptest::sample::Index>(),
            sym in any::<proptest::sample::Index>(),
        ) {
            let mut psi = phi.singleton_lift();
            let before = eval_multilabeling(&inst, &psi).unwrap();
            let n = inst.total_vertices();
            let v = pick.index(n);
            let (side, idx) = if v < inst.n_a() { (Side::A, v) } else { (Side::B, v - inst.n_a()) };
            let s = sym.index(inst.sigma());
            let added = psi.insert(side, idx, s);
            let after = eval_multilabeling(&inst, &psi).unwrap();
            prop_assert!(after.satisfied >= before.satisfied);
            let expected = before.cost.unwrap() + usize::from(added);
            prop_assert_eq!(after.cost, Some(expected));
        }

        // evaluation is invariant under permuting the raw edge list
        #[test]
        fn eval_invariant_under_edge_permutation(
            (inst, phi) in inst_and_labeling(),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            let mut edges = inst.edges().to_vec();
            let mut rng = crate::seed::rng_for(seed, crate::seed::Stream::Trial, 0);
            edges.shuffle(&mut rng);
            let shuffled = Instance::new(inst.n_a(), inst.n_b(), inst.sigma(), edges).unwrap();
            prop_assert_eq!(&shuffled, &inst);
            let a = eval_labeling(&inst, &phi).unwrap();
            let b = eval_labeling(&shuffled, &phi).unwrap();
            prop_assert_eq!(a.satisfied, b.satisfied);
        }

        // any fully satisfying multilabeling pays >= 1 label per non-isolated vertex
        #[test]
        fn full_value_costs_at_least_non_isolated((inst, phi) in inst_and_labeling()) {
            let mut psi = phi.singleton_lift();
            // make it fully satisfying by brute-force augmentation
            for e in inst.edges() {
                for s in 0..inst.sigma() {
                    psi.insert(Side::A, e.a, s);
                    psi.insert(Side::B, e.b, e.project(s));
                }
            }
            let rep = eval_multilabeling(&inst, &psi).unwrap();
            prop_assert!(rep.is_fully_satisfied());
            prop_assert!(rep.cost.unwrap() >= inst.non_isolated_count());
        }
    }
}
