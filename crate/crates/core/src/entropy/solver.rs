//! Maximum separated sets (independent sets of the closeness graph) and
//! minimum spanning sets (dominating sets by closed neighborhoods).

use serde::{Deserialize, Serialize};

use super::bits::Bits;
use super::relation::ClosenessRelation;

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// solved by reductions and bounds without branching
    Exhaustive,
    BranchAndBound,
    GreedyLower,
    GreedyUpper,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exhaustive => "exhaustive",
            Method::BranchAndBound => "branch_and_bound",
            Method::GreedyLower => "greedy_lower",
            Method::GreedyUpper => "greedy_upper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    Exact,
    Greedy,
}

/// A count with the set realizing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountResult {
    pub value: usize,
    pub exact: bool,
    pub method: Method,
    /// indices into the relation's point list, ascending
    pub witness: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CountResult {
    fn new(mut witness: Vec<usize>, exact: bool, method: Method, note: Option<String>) -> Self {
        witness.sort_unstable();
        CountResult {
            value: witness.len(),
            exact,
            method,
            witness,
            note,
        }
    }
}

fn alive_all(rel: &ClosenessRelation) -> Bits {
    Bits::full(rel.len())
}

/// Min-degree greedy independent set; ties go to the lower index.
pub fn greedy_independent(rel: &ClosenessRelation) -> Vec<usize> {
    let n = rel.len();
    let mut alive = alive_all(rel);
    let mut degree: Vec<usize> = (0..n).map(|i| rel.degree(i)).collect();
    let mut chosen = Vec::new();
    while let Some(v) = alive.iter().min_by_key(|&v| (degree[v], v)) {
        chosen.push(v);
        let mut removed = rel.row(v).and(&alive);
        removed.insert(v);
        alive.and_not_assign(&removed);
        for w in removed.iter() {
            for u in rel.row(w).iter() {
                if alive.contains(u) {
                    degree[u] -= 1;
                }
            }
        }
    }
    chosen
}

struct MisSearch<'a> {
    rel: &'a ClosenessRelation,
    budget: u64,
    nodes: u64,
    best: Vec<usize>,
    branched: bool,
    aborted: bool,
}

impl MisSearch<'_> {
    fn is_clique(&self, set: &Bits) -> bool {
        set.iter().all(|u| set.subset_of_with(self.rel.row(u), u))
    }

    fn clique_cover(&self, alive: &Bits) -> usize {
        let mut remaining = alive.clone();
        let mut count = 0;
        while let Some(v) = remaining.first() {
            remaining.remove(v);
            let mut cand = self.rel.row(v).and(&remaining);
            while let Some(u) = cand.first() {
                remaining.remove(u);
                cand.remove(u);
                cand.and_assign(self.rel.row(u));
            }
            count += 1;
        }
        count
    }

    fn search(&mut self, mut alive: Bits, mut chosen: Vec<usize>) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        // isolated and simplicial vertices belong to some maximum solution
        loop {
            let mut changed = false;
            let order: Vec<usize> = alive.iter().collect();
            for v in order {
                if !alive.contains(v) {
                    continue;
                }
                let nv = self.rel.row(v).and(&alive);
                if nv.is_empty() || self.is_clique(&nv) {
                    chosen.push(v);
                    alive.and_not_assign(&nv);
                    alive.remove(v);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if alive.is_empty() {
            if chosen.len() > self.best.len() {
                self.best = chosen;
            }
            return;
        }
        if chosen.len() + self.clique_cover(&alive) <= self.best.len() {
            return;
        }
        self.branched = true;
        let v = alive
            .iter()
            .max_by_key(|&v| (self.rel.row(v).and_count(&alive), std::cmp::Reverse(v)))
            .expect("alive is nonempty");
        let mut with_v = alive.clone();
        with_v.and_not_assign(self.rel.row(v));
        with_v.remove(v);
        let mut chosen_v = chosen.clone();
        chosen_v.push(v);
        self.search(with_v, chosen_v);
        if self.aborted {
            return;
        }
        alive.remove(v);
        self.search(alive, chosen);
    }
}

/// Largest `(n, U)`-separated subset of the relation's points.
pub fn max_separated(rel: &ClosenessRelation, mode: SolveMode, budget: u64) -> CountResult {
    let greedy = greedy_independent(rel);
    if mode == SolveMode::Greedy {
        return CountResult::new(greedy, false, Method::GreedyLower, None);
    }
    let mut s = MisSearch {
        rel,
        budget,
        nodes: 0,
        best: greedy.clone(),
        branched: false,
        aborted: false,
    };
    s.search(alive_all(rel), Vec::new());
    if s.aborted {
        let note = format!("node budget {budget} exhausted; value is a lower bound");
        let best = if s.best.len() > greedy.len() { s.best } else { greedy };
        return CountResult::new(best, false, Method::GreedyLower, Some(note));
    }
    let method = if s.branched {
        Method::BranchAndBound
    } else {
        Method::Exhaustive
    };
    CountResult::new(s.best, true, method, None)
}

fn closed_rows(rel: &ClosenessRelation) -> Vec<Bits> {
    (0..rel.len())
        .map(|i| {
            let mut r = rel.row(i).clone();
            r.insert(i);
            r
        })
        .collect()
}

fn greedy_cover(closed: &[Bits], n: usize) -> Vec<usize> {
    let mut undominated = Bits::full(n);
    let mut chosen = Vec::new();
    while !undominated.is_empty() {
        let w = (0..n)
            .max_by_key(|&w| (closed[w].and_count(&undominated), std::cmp::Reverse(w)))
            .expect("nonempty graph");
        chosen.push(w);
        undominated.and_not_assign(&closed[w]);
    }
    chosen
}

/// Greedy set-cover dominating set; ties go to the lower index.
pub fn greedy_dominating(rel: &ClosenessRelation) -> Vec<usize> {
    greedy_cover(&closed_rows(rel), rel.len())
}

struct MdsSearch {
    closed: Vec<Bits>,
    n: usize,
    budget: u64,
    nodes: u64,
    best: Vec<usize>,
    branched: bool,
    aborted: bool,
}

impl MdsSearch {
    fn lower_bound(&self, undominated: &Bits) -> usize {
        let size = undominated.count();
        let max_cover = self
            .closed
            .iter()
            .map(|r| r.and_count(undominated))
            .max()
            .unwrap_or(1)
            .max(1);
        let by_cover = size.div_ceil(max_cover);
        // undominated vertices with pairwise disjoint closed neighborhoods
        // need distinct dominators
        let mut used = Bits::new(self.n);
        let mut packing = 0;
        for u in undominated.iter() {
            if self.closed[u].and_count(&used) == 0 {
                packing += 1;
                used.or_assign(&self.closed[u]);
            }
        }
        by_cover.max(packing)
    }

    fn search(&mut self, dominated: Bits, chosen: Vec<usize>) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        let mut undominated = Bits::full(self.n);
        undominated.and_not_assign(&dominated);
        if undominated.is_empty() {
            if chosen.len() < self.best.len() {
                self.best = chosen;
            }
            return;
        }
        if chosen.len() + self.lower_bound(&undominated) >= self.best.len() {
            return;
        }
        let u = undominated
            .iter()
            .min_by_key(|&u| (self.closed[u].count(), u))
            .expect("nonempty");
        let mut options: Vec<(usize, usize)> = self.closed[u]
            .iter()
            .map(|w| (self.closed[w].and_count(&undominated), w))
            .collect();
        options.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        if options.len() > 1 {
            self.branched = true;
        }
        for (_, w) in options {
            let mut d = dominated.clone();
            d.or_assign(&self.closed[w]);
            let mut c = chosen.clone();
            c.push(w);
            self.search(d, c);
            if self.aborted {
                return;
            }
        }
    }
}

/// Smallest `(n, U)`-spanning subset of the relation's points.
pub fn min_spanning(rel: &ClosenessRelation, mode: SolveMode, budget: u64) -> CountResult {
    let closed = closed_rows(rel);
    let greedy = greedy_cover(&closed, rel.len());
    if mode == SolveMode::Greedy {
        return CountResult::new(greedy, false, Method::GreedyUpper, None);
    }
    let mut s = MdsSearch {
        closed,
        n: rel.len(),
        budget,
        nodes: 0,
        best: greedy.clone(),
        branched: false,
        aborted: false,
    };
    s.search(Bits::new(rel.len()), Vec::new());
    if s.aborted {
        let note = format!("node budget {budget} exhausted; value is an upper bound");
        return CountResult::new(s.best, false, Method::GreedyUpper, Some(note));
    }
    let method = if s.branched {
        Method::BranchAndBound
    } else {
        Method::Exhaustive
    };
    CountResult::new(s.best, true, method, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q_int;
    use crate::space::Point;
    use rand::{Rng, SeedableRng};

    fn graph(n: usize, edges: &[(usize, usize)]) -> ClosenessRelation {
        let mut m = vec![vec![false; n]; n];
        for &(a, b) in edges {
            m[a][b] = true;
            m[b][a] = true;
        }
        ClosenessRelation::from_matrix((0..n).map(Point::Index).collect(), 0, q_int(1), &m).unwrap()
    }

    fn brute(rel: &ClosenessRelation) -> (usize, usize) {
        let n = rel.len();
        let mut mis = 0;
        let mut mds = n;
        for mask in 0u32..(1 << n) {
            let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            if rel.is_separated(&set) {
                mis = mis.max(set.len());
            }
            if rel.is_spanning(&set) {
                mds = mds.min(set.len());
            }
        }
        (mis, mds)
    }

    #[test]
    fn path_of_three() {
        let rel = graph(3, &[(0, 1), (1, 2)]);
        let s = max_separated(&rel, SolveMode::Exact, DEFAULT_NODE_BUDGET);
        assert_eq!((s.value, s.witness.clone()), (2, vec![0, 2]));
        let r = min_spanning(&rel, SolveMode::Exact, DEFAULT_NODE_BUDGET);
        assert_eq!((r.value, r.witness.clone()), (1, vec![1]));
        assert!(s.exact && r.exact);
    }

    #[test]
    fn single_point_and_complete_graph() {
        let one = graph(1, &[]);
        assert_eq!(max_separated(&one, SolveMode::Exact, 10).value, 1);
        assert_eq!(min_spanning(&one, SolveMode::Exact, 10).value, 1);
        let k5: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
        let g = graph(5, &k5);
        assert_eq!(min_spanning(&g, SolveMode::Exact, 10).value, 1);
        assert_eq!(max_separated(&g, SolveMode::Exact, 10).value, 1);
    }

    #[test]
    fn random_graphs_match_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..150 {
            let n = rng.gen_range(1..=11);
            let p = rng.gen_range(0.1..0.8);
            let edges: Vec<(usize, usize)> = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .filter(|_| rng.gen_bool(p))
                .collect();
            let rel = graph(n, &edges);
            let (mis, mds) = brute(&rel);
            let s = max_separated(&rel, SolveMode::Exact, DEFAULT_NODE_BUDGET);
            let r = min_spanning(&rel, SolveMode::Exact, DEFAULT_NODE_BUDGET);
            assert_eq!(s.value, mis);
            assert_eq!(r.value, mds);
            assert!(rel.is_separated(&s.witness) && rel.is_spanning(&r.witness));
            let gl = max_separated(&rel, SolveMode::Greedy, 0);
            let gu = min_spanning(&rel, SolveMode::Greedy, 0);
            assert!(gl.value <= mis && gu.value >= mds);
        }
    }

    #[test]
    fn budget_exhaustion_degrades_to_flagged_bounds() {
        // a zero budget stops before the root node
        let edges: Vec<(usize, usize)> = (0..30)
            .map(|i| (i, (i + 1) % 30))
            .chain((0..30).map(|i| (i, (i + 7) % 30)))
            .collect();
        let rel = graph(30, &edges);
        let s = max_separated(&rel, SolveMode::Exact, 0);
        assert!(!s.exact);
        assert_eq!(s.method, Method::GreedyLower);
        assert!(s.note.is_some());
        assert!(rel.is_separated(&s.witness));
        let r = min_spanning(&rel, SolveMode::Exact, 0);
        assert!(!r.exact);
        assert!(rel.is_spanning(&r.witness));
    }
}
