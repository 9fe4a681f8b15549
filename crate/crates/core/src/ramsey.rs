//! Monochromatic-subset search in coloured complete k-uniform hypergraphs.
//!
//! The search is an exact branch-and-bound over vertex subsets in
//! lexicographic order: a partial clique is extended one vertex at a time,
//! candidates are filtered against the committed colour, and branches are
//! pruned by remaining-candidate counts. The first witness found is the
//! lexicographically smallest one, independent of memoization state or
//! thread count.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

use crate::codes::Label;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum RamseyError {
    #[error("target {target} is smaller than the uniformity {k}")]
    TargetTooSmall { target: usize, k: usize },
    #[error("witness limit must be at least 1")]
    ZeroLimit,
}

/// A complete k-uniform hypergraph on an ordered vertex list, coloured by a
/// total function on k-subsets. Colours are evaluated lazily and memoized;
/// the evaluation count is observable for performance measurements.
pub struct ColoredHypergraph<C, F>
where
    F: Fn(&[Label]) -> C,
{
    vertices: Vec<Label>,
    k: usize,
    colour_fn: F,
    memo: RefCell<HashMap<Vec<Label>, C>>,
    evals: Cell<u64>,
}

impl<C, F> ColoredHypergraph<C, F>
where
    C: Clone + Eq + Hash,
    F: Fn(&[Label]) -> C,
{
    /// `vertices` are sorted and deduplicated; `k` must be at least 1.
    pub fn new(mut vertices: Vec<Label>, k: usize, colour_fn: F) -> Self {
        assert!(k >= 1, "uniformity must be at least 1");
        vertices.sort_unstable();
        vertices.dedup();
        ColoredHypergraph {
            vertices,
            k,
            colour_fn,
            memo: RefCell::new(HashMap::new()),
            evals: Cell::new(0),
        }
    }

    pub fn vertices(&self) -> &[Label] {
        &self.vertices
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Colour of a k-subset (given in ascending order).
    pub fn colour(&self, subset: &[Label]) -> C {
        debug_assert_eq!(subset.len(), self.k);
        debug_assert!(subset.windows(2).all(|w| w[0] < w[1]));
        if let Some(c) = self.memo.borrow().get(subset) {
            return c.clone();
        }
        self.evals.set(self.evals.get() + 1);
        let c = (self.colour_fn)(subset);
        self.memo
            .borrow_mut()
            .insert(subset.to_vec(), c.clone());
        c
    }

    /// Number of colour-function evaluations so far (memo hits excluded).
    pub fn evaluations(&self) -> u64 {
        self.evals.get()
    }

    /// Evaluates every k-subset up front. With `threads > 1` the evaluation
    /// is split across scoped threads; results are merged in subset order, so
    /// downstream searches see identical state regardless of thread count.
    pub fn precompute(&self, threads: usize)
    where
        F: Sync,
        C: Send,
    {
        let subsets = combinations(&self.vertices, self.k);
        let fresh: Vec<Vec<Label>> = {
            let memo = self.memo.borrow();
            subsets
                .into_iter()
                .filter(|s| !memo.contains_key(s))
                .collect()
        };
        if fresh.is_empty() {
            return;
        }
        if threads <= 1 {
            for s in fresh {
                self.colour(&s);
            }
            return;
        }
        let chunk = fresh.len().div_ceil(threads);
        let colour_fn = &self.colour_fn;
        let results: Vec<(Vec<Label>, C)> = std::thread::scope(|scope| {
            let handles: Vec<_> = fresh
                .chunks(chunk)
                .map(|part| {
                    scope.spawn(move || {
                        part.iter()
                            .map(|s| (s.clone(), colour_fn(s)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("colour worker panicked"))
                .collect()
        });
        self.evals.set(self.evals.get() + results.len() as u64);
        let mut memo = self.memo.borrow_mut();
        for (s, c) in results {
            memo.insert(s, c);
        }
    }
}

/// Result of a budgeted search: exhaustion of the node budget is reported
/// separately from a definitive negative.
#[derive(Debug, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    NotFound,
    BudgetExceeded,
}

/// First (lexicographically smallest) vertex subset of the given size all of
/// whose k-subsets share one colour, or `None` when no such subset exists.
pub fn find_monochromatic<C, F>(
    h: &ColoredHypergraph<C, F>,
    target: usize,
) -> Result<Option<(Vec<Label>, C)>, RamseyError>
where
    C: Clone + Eq + Hash,
    F: Fn(&[Label]) -> C,
{
    match search(h, target, 1, &mut None)? {
        SearchOutcome::Found(mut v) => Ok(v.pop()),
        SearchOutcome::NotFound => Ok(None),
        SearchOutcome::BudgetExceeded => unreachable!("unbudgeted search cannot exhaust"),
    }
}

/// Up to `limit` distinct witnesses in lexicographic order.
pub fn find_all_monochromatic<C, F>(
    h: &ColoredHypergraph<C, F>,
    target: usize,
    limit: usize,
) -> Result<Vec<(Vec<Label>, C)>, RamseyError>
where
    C: Clone + Eq + Hash,
    F: Fn(&[Label]) -> C,
{
    if limit == 0 {
        return Err(RamseyError::ZeroLimit);
    }
    match search(h, target, limit, &mut None)? {
        SearchOutcome::Found(v) => Ok(v),
        SearchOutcome::NotFound => Ok(Vec::new()),
        SearchOutcome::BudgetExceeded => unreachable!("unbudgeted search cannot exhaust"),
    }
}

/// Budgeted variant: `budget`, when present, is decremented per search node
/// and the search stops with `BudgetExceeded` when it runs out. A truncated
/// search never reports a definitive negative.
pub fn search<C, F>(
    h: &ColoredHypergraph<C, F>,
    target: usize,
    limit: usize,
    budget: &mut Option<u64>,
) -> Result<SearchOutcome<Vec<(Vec<Label>, C)>>, RamseyError>
where
    C: Clone + Eq + Hash,
    F: Fn(&[Label]) -> C,
{
    if target < h.k() {
        return Err(RamseyError::TargetTooSmall {
            target,
            k: h.k(),
        });
    }
    let mut state = Search {
        h,
        target,
        limit,
        budget,
        exceeded: false,
        found: Vec::new(),
    };
    let cands = h.vertices().to_vec();
    let mut prefix = Vec::new();
    state.extend(&mut prefix, &cands, None);
    if state.exceeded && state.found.len() < limit {
        // partial results under a blown budget are not trustworthy negatives
        if state.found.is_empty() {
            return Ok(SearchOutcome::BudgetExceeded);
        }
    }
    if state.found.is_empty() {
        Ok(SearchOutcome::NotFound)
    } else {
        Ok(SearchOutcome::Found(state.found))
    }
}

struct Search<'h, 'b, C, F>
where
    F: Fn(&[Label]) -> C,
{
    h: &'h ColoredHypergraph<C, F>,
    target: usize,
    limit: usize,
    budget: &'b mut Option<u64>,
    exceeded: bool,
    found: Vec<(Vec<Label>, C)>,
}

impl<C, F> Search<'_, '_, C, F>
where
    C: Clone + Eq + Hash,
    F: Fn(&[Label]) -> C,
{
    /// Returns true when the search should stop.
    fn extend(&mut self, prefix: &mut Vec<Label>, cands: &[Label], colour: Option<C>) -> bool {
        if prefix.len() >= self.target {
            let c = colour.expect("target >= k guarantees a committed colour");
            self.found.push((prefix.clone(), c));
            return self.found.len() >= self.limit;
        }
        let k = self.h.k();
        for (i, &v) in cands.iter().enumerate() {
            if let Some(b) = self.budget.as_mut() {
                if *b == 0 {
                    self.exceeded = true;
                    return true;
                }
                *b -= 1;
            }
            let remaining = cands.len() - i - 1;
            if prefix.len() + 1 + remaining < self.target {
                break; // candidates are in ascending order: no later branch can reach the target
            }
            let mut new_colour = colour.clone();
            if prefix.len() + 1 >= k && !check_extension(self.h, prefix, v, &mut new_colour) {
                continue;
            }
            let next_cands: Vec<Label> = if let Some(cc) = &new_colour {
                prefix.push(v);
                let filtered = cands[i + 1..]
                    .iter()
                    .copied()
                    .filter(|&w| {
                        let mut col = Some(cc.clone());
                        check_extension(self.h, prefix, w, &mut col)
                    })
                    .collect();
                prefix.pop();
                filtered
            } else {
                cands[i + 1..].to_vec()
            };
            prefix.push(v);
            let stop = self.extend(prefix, &next_cands, new_colour);
            prefix.pop();
            if stop {
                return true;
            }
        }
        false
    }
}

/// Checks every k-subset formed by `v` together with k-1 members of `prefix`
/// against the committed colour, committing it on first evaluation.
fn check_extension<C, F>(
    h: &ColoredHypergraph<C, F>,
    prefix: &[Label],
    v: Label,
    colour: &mut Option<C>,
) -> bool
where
    C: Clone + Eq + Hash,
    F: Fn(&[Label]) -> C,
{
    let k = h.k();
    if prefix.len() + 1 < k {
        return true;
    }
    for mut q in combinations(prefix, k - 1) {
        q.push(v);
        q.sort_unstable();
        let c = h.colour(&q);
        match colour {
            Some(cc) => {
                if c != *cc {
                    return false;
                }
            }
            None => *colour = Some(c),
        }
    }
    true
}

/// All r-subsets of `items`, in lexicographic order.
pub(crate) fn combinations(items: &[Label], r: usize) -> Vec<Vec<Label>> {
    let mut out = Vec::new();
    if r > items.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // advance the index vector
        let mut pos = r;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] + 1 <= items.len() - (r - pos) {
                idx[pos] += 1;
                for j in pos + 1..r {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labels(v: &[u32]) -> Vec<Label> {
        v.iter().map(|&x| Label(x)).collect()
    }

    #[test]
    fn all_one_colour_returns_full_prefix() {
        let h = ColoredHypergraph::new(labels(&[1, 2, 3, 4, 5]), 3, |_| 0u8);
        let (subset, colour) = find_monochromatic(&h, 5).unwrap().unwrap();
        assert_eq!(subset, labels(&[1, 2, 3, 4, 5]));
        assert_eq!(colour, 0);
    }

    #[test]
    fn ramsey_of_three_three_is_six() {
        // any 2-colouring of pairs on 6 vertices has a monochromatic triangle
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let table: std::collections::HashMap<(u32, u32), bool> = (1..=6u32)
                .flat_map(|a| ((a + 1)..=6).map(move |b| (a, b)))
                .map(|p| (p, rng.gen_bool(0.5)))
                .collect();
            let h = ColoredHypergraph::new(labels(&[1, 2, 3, 4, 5, 6]), 2, move |s| {
                table[&(s[0].0, s[1].0)]
            });
            assert!(find_monochromatic(&h, 3).unwrap().is_some());
        }
    }

    #[test]
    fn witnesses_verify_and_come_in_lex_order() {
        let h = ColoredHypergraph::new(labels(&[1, 2, 3, 4, 5, 6]), 2, |s| {
            (s[0].0 + s[1].0) % 2
        });
        let all = find_all_monochromatic(&h, 3, 10).unwrap();
        assert!(!all.is_empty());
        for (subset, colour) in &all {
            for pair in combinations(subset, 2) {
                assert_eq!(h.colour(&pair), *colour);
            }
        }
        let mut sorted = all.clone();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(all, sorted);
    }

    #[test]
    fn first_witness_is_lexicographically_smallest() {
        let h = ColoredHypergraph::new(labels(&[1, 2, 3, 4]), 3, |_| 7u8);
        let found = find_all_monochromatic(&h, 3, 2).unwrap();
        assert_eq!(found[0].0, labels(&[1, 2, 3]));
        assert_eq!(found[1].0, labels(&[1, 2, 4]));
    }

    #[test]
    fn target_below_uniformity_errors() {
        let h = ColoredHypergraph::new(labels(&[1, 2, 3]), 3, |_| 0u8);
        assert_eq!(
            find_monochromatic(&h, 2).unwrap_err(),
            RamseyError::TargetTooSmall { target: 2, k: 3 }
        );
    }

    #[test]
    fn budget_exhaustion_is_not_a_negative() {
        let h = ColoredHypergraph::new(labels(&(1..=12).collect::<Vec<_>>()), 3, |s| {
            (s[0].0 + s[1].0 + s[2].0) % 3
        });
        let mut budget = Some(1);
        let outcome = search(&h, 6, 1, &mut budget).unwrap();
        assert_eq!(outcome, SearchOutcome::BudgetExceeded);
    }

    #[test]
    fn deterministic_across_runs_and_precompute() {
        let colour = |s: &[Label]| (s[0].0 * 7 + s[1].0 * 3 + s[2].0) % 4;
        let h1 = ColoredHypergraph::new(labels(&(1..=15).collect::<Vec<_>>()), 3, colour);
        let h2 = ColoredHypergraph::new(labels(&(1..=15).collect::<Vec<_>>()), 3, colour);
        h2.precompute(4);
        let r1 = find_monochromatic(&h1, 4).unwrap();
        let r2 = find_monochromatic(&h2, 4).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn exhaustive_cross_validation_against_subset_scan() {
        // desk-scale completeness: agree with a brute-force scan on existence
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for case in 0..6 {
            let n = 18 + case;
            let verts = labels(&(1..=n).collect::<Vec<_>>());
            let table: std::collections::HashMap<Vec<Label>, u8> = combinations(&verts, 3)
                .into_iter()
                .map(|s| (s, rng.gen_range(0..2)))
                .collect();
            let h = ColoredHypergraph::new(verts.clone(), 3, move |s| table[s]);
            for target in 4..=6 {
                let found = find_monochromatic(&h, target).unwrap();
                let brute = combinations(&verts, target).into_iter().any(|subset| {
                    let triples = combinations(&subset, 3);
                    let first = h.colour(&triples[0]);
                    triples.iter().all(|t| h.colour(t) == first)
                });
                assert_eq!(found.is_some(), brute, "n={} target={}", n, target);
                if let Some((subset, colour)) = found {
                    for t in combinations(&subset, 3) {
                        assert_eq!(h.colour(&t), colour);
                    }
                }
            }
        }
    }

    #[test]
    fn evaluation_count_is_reported_and_memoized() {
        let h = ColoredHypergraph::new(labels(&[1, 2, 3, 4]), 2, |s| s[0].0 + s[1].0);
        let _ = h.colour(&labels(&[1, 2]));
        let _ = h.colour(&labels(&[1, 2]));
        assert_eq!(h.evaluations(), 1);
    }
}
