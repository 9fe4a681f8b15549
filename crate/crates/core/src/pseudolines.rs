//! Wiring diagrams of simple pseudoline arrangements, cyclic arrangements,
//! and the doubling construction that turns a wiring diagram into an
//! arrangement of great pseudocircles (and back).
//!
//! Wires are numbered 1..n by their initial top-to-bottom position. A swap
//! at position p exchanges the wires currently at positions p and p+1
//! (1-based). In a simple diagram every unordered wire pair swaps exactly
//! once, so there are n(n-1)/2 swaps in total.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::codes::{Arrangement, Event, Label, Sign, SignedCode};
use crate::ramsey::{self, ColoredHypergraph};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum PseudolinesError {
    #[error("swap position {position} out of range for {n} wires")]
    SwapOutOfRange { position: usize, n: usize },
    #[error("wire pair ({a}, {b}) swaps {count} times (expected exactly once)")]
    PairSwapCount { a: usize, b: usize, count: usize },
    #[error("labeling is not a permutation of 1..={0}")]
    BadLabeling(usize),
    #[error("wire subset is empty")]
    EmptySubset,
    #[error("wire {0} out of range")]
    UnknownWire(usize),
    #[error("size must be at least 1")]
    BadSize,
    #[error("arrangement is not valid: {0}")]
    InvalidArrangement(String),
    #[error("circle {0} admits no antipodal start rotation (not an arrangement of great pseudocircles)")]
    NotAntipodal(Label),
    #[error("codes do not assemble into a wiring diagram (not an arrangement of great pseudocircles)")]
    NoDiagram,
    #[error("wiring text is malformed: {0}")]
    BadText(String),
}

/// A simple pseudoline arrangement in wiring-diagram normal form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WiringDiagram {
    pub n: usize,
    pub swaps: Vec<usize>,
}

impl WiringDiagram {
    pub fn new(n: usize, swaps: Vec<usize>) -> Result<WiringDiagram, PseudolinesError> {
        let d = WiringDiagram { n, swaps };
        d.validate()?;
        Ok(d)
    }

    /// Checks the simple-arrangement invariant: every swap position is in
    /// range and every wire pair swaps exactly once.
    pub fn validate(&self) -> Result<(), PseudolinesError> {
        let mut order: Vec<usize> = (1..=self.n).collect();
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &p in &self.swaps {
            if p == 0 || p >= self.n {
                return Err(PseudolinesError::SwapOutOfRange {
                    position: p,
                    n: self.n,
                });
            }
            let (a, b) = (order[p - 1], order[p]);
            let key = (a.min(b), a.max(b));
            *counts.entry(key).or_insert(0) += 1;
            order.swap(p - 1, p);
        }
        for a in 1..=self.n {
            for b in a + 1..=self.n {
                let count = counts.get(&(a, b)).copied().unwrap_or(0);
                if count != 1 {
                    return Err(PseudolinesError::PairSwapCount { a, b, count });
                }
            }
        }
        Ok(())
    }

    /// For each wire, the ordered list of wires it meets along the diagram.
    pub fn meet_order(&self) -> Vec<Vec<usize>> {
        let mut order: Vec<usize> = (1..=self.n).collect();
        let mut meets: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for &p in &self.swaps {
            let (a, b) = (order[p - 1], order[p]);
            meets[a - 1].push(b);
            meets[b - 1].push(a);
            order.swap(p - 1, p);
        }
        meets
    }

    /// Subdiagram on a wire subset: swaps between retained wires are kept in
    /// order with positions recompacted. Retained wires are renumbered
    /// 1..m in increasing order of their original numbers.
    pub fn restrict(&self, subset: &BTreeSet<usize>) -> Result<WiringDiagram, PseudolinesError> {
        if subset.is_empty() {
            return Err(PseudolinesError::EmptySubset);
        }
        for &w in subset {
            if w == 0 || w > self.n {
                return Err(PseudolinesError::UnknownWire(w));
            }
        }
        let mut order: Vec<usize> = (1..=self.n).collect();
        let mut sub_order: Vec<usize> = order
            .iter()
            .copied()
            .filter(|w| subset.contains(w))
            .collect();
        let mut swaps = Vec::new();
        for &p in &self.swaps {
            let (a, b) = (order[p - 1], order[p]);
            if subset.contains(&a) && subset.contains(&b) {
                let pos = sub_order
                    .iter()
                    .position(|&w| w == a)
                    .expect("retained wire present");
                debug_assert_eq!(sub_order[pos + 1], b);
                swaps.push(pos + 1);
                sub_order.swap(pos, pos + 1);
            }
            order.swap(p - 1, p);
        }
        Ok(WiringDiagram {
            n: subset.len(),
            swaps,
        })
    }
}

/// Wiring text format: first line the wire count, second line the
/// space-separated swap positions.
pub fn emit_wiring(w: &WiringDiagram) -> String {
    let swaps: Vec<String> = w.swaps.iter().map(|p| p.to_string()).collect();
    format!("{}\n{}\n", w.n, swaps.join(" "))
}

pub fn parse_wiring(input: &str) -> Result<WiringDiagram, PseudolinesError> {
    let mut lines = input.lines();
    let n: usize = lines
        .next()
        .ok_or_else(|| PseudolinesError::BadText("missing wire count line".into()))?
        .trim()
        .parse()
        .map_err(|_| PseudolinesError::BadText("wire count is not an integer".into()))?;
    let swaps = match lines.next() {
        None => Vec::new(),
        Some(line) => line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| PseudolinesError::BadText(format!("bad swap position `{}`", t)))
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    WiringDiagram::new(n, swaps)
}

/// Deterministic sampler of simple wiring diagrams: repeatedly applies a
/// random admissible adjacent swap (one whose wire pair has not crossed yet)
/// until every pair has swapped once.
pub fn sample_diagram(n: usize, seed: u64) -> WiringDiagram {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (1..=n).collect();
    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut swaps = Vec::new();
    let total = n * (n - 1) / 2;
    while swaps.len() < total {
        let mut ready: Vec<usize> = (0..n.saturating_sub(1))
            .filter(|&p| {
                let (a, b) = (order[p], order[p + 1]);
                !done.contains(&(a.min(b), a.max(b)))
            })
            .collect();
        ready.shuffle(&mut rng);
        let p = ready[0];
        let (a, b) = (order[p], order[p + 1]);
        done.insert((a.min(b), a.max(b)));
        swaps.push(p + 1);
        order.swap(p, p + 1);
    }
    WiringDiagram { n, swaps }
}

/// The cyclic arrangement on m wires: wire i meets the others in increasing
/// order. Built from the line family y = 2ix - i^2, whose pairwise crossings
/// at abscissa (i+j)/2 are processed in sorted order (ties broken by the
/// smaller index; tied pairs are disjoint, so the order is immaterial).
pub fn gen_cyclic(m: usize) -> Result<WiringDiagram, PseudolinesError> {
    if m < 1 {
        return Err(PseudolinesError::BadSize);
    }
    let mut pairs: Vec<(usize, usize)> = (1..=m)
        .flat_map(|i| ((i + 1)..=m).map(move |j| (i, j)))
        .collect();
    pairs.sort_by_key(|&(i, j)| (i + j, i));
    simulate(m, &pairs)
}

/// Builds a diagram from an explicit crossing sequence; each crossing must
/// be between wires adjacent at its turn.
fn simulate(n: usize, crossings: &[(usize, usize)]) -> Result<WiringDiagram, PseudolinesError> {
    let mut order: Vec<usize> = (1..=n).collect();
    let mut swaps = Vec::with_capacity(crossings.len());
    for &(a, b) in crossings {
        let pa = order.iter().position(|&w| w == a).ok_or(PseudolinesError::UnknownWire(a))?;
        let pb = order.iter().position(|&w| w == b).ok_or(PseudolinesError::UnknownWire(b))?;
        let (hi, lo) = (pa.min(pb), pa.max(pb));
        if lo != hi + 1 {
            return Err(PseudolinesError::NoDiagram);
        }
        swaps.push(hi + 1);
        order.swap(hi, lo);
    }
    Ok(WiringDiagram { n, swaps })
}

/// True when, under the given labeling (labeling[i] is the label of wire
/// i+1), every wire meets the others in strictly increasing label order.
pub fn is_cyclic(w: &WiringDiagram, labeling: &[usize]) -> Result<bool, PseudolinesError> {
    if labeling.len() != w.n {
        return Err(PseudolinesError::BadLabeling(w.n));
    }
    let mut seen = vec![false; w.n + 1];
    for &l in labeling {
        if l == 0 || l > w.n || seen[l] {
            return Err(PseudolinesError::BadLabeling(w.n));
        }
        seen[l] = true;
    }
    let meets = w.meet_order();
    for row in &meets {
        let labels: Vec<usize> = row.iter().map(|&other| labeling[other - 1]).collect();
        if labels.windows(2).any(|p| p[0] >= p[1]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Finds a wire subset of size m plus a labeling under which the restricted
/// diagram is cyclic. The Ramsey step 2-colours each wire triple a<b<c by
/// whether the middle wire b meets a before c; a monochromatic subset is
/// relabeled ascending or descending accordingly and verified with
/// `is_cyclic`. On verification failure an exhaustive subset search runs.
pub fn find_cyclic_subarrangement(
    w: &WiringDiagram,
    m: usize,
) -> Option<(Vec<usize>, Vec<usize>)> {
    if m < 1 || m > w.n {
        return None;
    }
    if m <= 2 {
        let wires: Vec<usize> = (1..=m).collect();
        let labeling: Vec<usize> = (1..=m).collect();
        return Some((wires, labeling));
    }
    let meets = w.meet_order();
    let meet_pos = |wire: usize, other: usize| -> usize {
        meets[wire - 1]
            .iter()
            .position(|&x| x == other)
            .expect("every pair meets once")
    };
    let verts: Vec<Label> = (1..=w.n).map(|i| Label(i as u32)).collect();
    let h = ColoredHypergraph::new(verts, 3, |s: &[Label]| {
        let (a, b, c) = (s[0].0 as usize, s[1].0 as usize, s[2].0 as usize);
        meet_pos(b, a) < meet_pos(b, c)
    });
    if let Ok(Some((subset, smaller_first))) = ramsey::find_monochromatic(&h, m) {
        let wires: Vec<usize> = subset.iter().map(|l| l.0 as usize).collect();
        let labeling: Vec<usize> = if smaller_first {
            (1..=m).collect()
        } else {
            (1..=m).rev().collect()
        };
        let sub: BTreeSet<usize> = wires.iter().copied().collect();
        if let Ok(restricted) = w.restrict(&sub) {
            if is_cyclic(&restricted, &labeling) == Ok(true) {
                return Some((wires, labeling));
            }
        }
    }
    // exhaustive fallback: derive the labeling from each choice of the wire
    // labeled 1 (its meet order determines all other labels)
    let all: Vec<Label> = (1..=w.n).map(|i| Label(i as u32)).collect();
    for subset in ramsey::combinations(&all, m) {
        let wires: Vec<usize> = subset.iter().map(|l| l.0 as usize).collect();
        let sub: BTreeSet<usize> = wires.iter().copied().collect();
        let restricted = match w.restrict(&sub) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let rows = restricted.meet_order();
        for first in 1..=m {
            let mut labeling = vec![0usize; m];
            labeling[first - 1] = 1;
            let mut next = 2;
            let mut ok = true;
            for &other in &rows[first - 1] {
                if labeling[other - 1] != 0 {
                    ok = false;
                    break;
                }
                labeling[other - 1] = next;
                next += 1;
            }
            if ok && is_cyclic(&restricted, &labeling) == Ok(true) {
                return Some((wires, labeling));
            }
        }
    }
    None
}

/// Doubles a wiring diagram into an arrangement of great pseudocircles:
/// circle i's code is wire i's crossing sequence through one copy of the
/// diagram followed by the same sequence with all signs flipped. At a
/// crossing the wire passing from below to above records a plus event, the
/// other a minus event. The output is valid and Krupp-packed.
pub fn double_wiring(w: &WiringDiagram) -> Result<Arrangement, PseudolinesError> {
    w.validate()?;
    let mut order: Vec<usize> = (1..=w.n).collect();
    let mut half: Vec<Vec<Event>> = vec![Vec::new(); w.n];
    for &p in &w.swaps {
        let (upper, lower) = (order[p - 1], order[p]);
        half[lower - 1].push((Label(upper as u32), Sign::Plus));
        half[upper - 1].push((Label(lower as u32), Sign::Minus));
        order.swap(p - 1, p);
    }
    let codes = half.into_iter().enumerate().map(|(i, first)| {
        let mut events = first.clone();
        events.extend(first.iter().map(|&(l, s)| (l, s.flipped())));
        SignedCode::new(Label((i + 1) as u32), events)
    });
    Arrangement::new(codes.collect::<Vec<_>>()).map_err(|e| {
        PseudolinesError::InvalidArrangement(e.to_string())
    })
}

/// Inverse of the doubling: recovers a wiring diagram from an arrangement of
/// great pseudocircles. Wire i corresponds to the i-th smallest label.
///
/// Each circle of such an arrangement has an antipodally periodic code
/// (the event half a revolution after any event is the same label with the
/// opposite sign), so every start rotation yields an antipodal form; the
/// work is in choosing one cut per circle so that the unsigned half-codes
/// assemble into a single affine diagram. Wire 1's cut is fixed at its
/// stored start (any cut of one wire extends to a full assembly when the
/// input really is an arrangement of great pseudocircles) and the cuts and
/// reading directions of the remaining wires are searched with triple-order
/// consistency pruning. The contract is that `double_wiring(antipodal_cut(a))`
/// is isomorphic to `a`.
pub fn antipodal_cut(arr: &Arrangement) -> Result<WiringDiagram, PseudolinesError> {
    antipodal_cut_with_map(arr).map(|(d, _)| d)
}

/// As `antipodal_cut`, but also returns which circle each wire of the
/// reconstructed diagram carries: entry i is the label riding wire i+1.
pub fn antipodal_cut_with_map(
    arr: &Arrangement,
) -> Result<(WiringDiagram, Vec<Label>), PseudolinesError> {
    let report = arr.validate();
    if !report.is_pass() {
        return Err(PseudolinesError::InvalidArrangement(report.to_string()));
    }
    let labels = arr.labels();
    let n = labels.len();
    if n == 1 {
        return Ok((WiringDiagram { n: 1, swaps: vec![] }, labels));
    }
    let k = n - 1;
    // index-antipodality check; fails e.g. for any NonKrupp triple
    for &l in &labels {
        let code = arr.code(l).expect("label enumerated");
        for t in 0..k {
            let (la, sa) = code.events[t];
            let (lb, sb) = code.events[t + k];
            if la != lb || sa != sb.flipped() {
                return Err(PseudolinesError::NotAntipodal(l));
            }
        }
    }
    if n == 2 {
        return Ok((WiringDiagram { n: 2, swaps: vec![1] }, labels));
    }
    let wire_of: BTreeMap<Label, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, i + 1))
        .collect();
    // candidate affine rows per wire: every cut of the cyclic half-code, in
    // both reading directions, expressed in provisional wire numbers
    let mut candidates: Vec<Vec<Vec<usize>>> = Vec::with_capacity(n);
    for &l in &labels {
        let code = arr.code(l).expect("label enumerated");
        let cyc: Vec<usize> = code.events[..].iter().map(|&(el, _)| wire_of[&el]).collect();
        let mut rows = Vec::new();
        for cut in 0..k {
            let fwd: Vec<usize> = (0..k).map(|t| cyc[(cut + t) % (2 * k)]).collect();
            let rev: Vec<usize> = (0..k).map(|t| cyc[(cut + 2 * k - t) % (2 * k)]).collect();
            rows.push(fwd);
            rows.push(rev);
        }
        rows.dedup();
        candidates.push(rows);
    }
    // circle 1 keeps its stored cut and reading direction: if the input is an
    // arrangement of great pseudocircles at all, some affine cut of it puts
    // this circle's projective cut in the gap before its stored start, and
    // the sweep orientation can be chosen to read it forward
    candidates[0] = vec![candidates[0][0].clone()];
    let mut chosen: Vec<Vec<usize>> = vec![Vec::new(); n];
    chosen[0] = candidates[0][0].clone();
    match assemble(&candidates, &mut chosen, 1) {
        Some((diagram, positions)) => {
            // positions[w-1] is the diagram wire carrying provisional wire w
            let mut wire_labels = vec![Label(0); n];
            for (idx, &l) in labels.iter().enumerate() {
                wire_labels[positions[idx] - 1] = l;
            }
            Ok((diagram, wire_labels))
        }
        None => Err(PseudolinesError::NoDiagram),
    }
}

/// Depth-first choice of one row per wire, pruning by triple-order
/// consistency; on a full assignment the diagram is built and verified.
fn assemble(
    candidates: &[Vec<Vec<usize>>],
    chosen: &mut Vec<Vec<usize>>,
    depth: usize,
) -> Option<(WiringDiagram, Vec<usize>)> {
    let n = candidates.len();
    if depth == n {
        return build_from_rows(n, chosen);
    }
    'cand: for row in &candidates[depth] {
        chosen[depth] = row.clone();
        let c = depth + 1; // wire number being placed
        for a in 1..depth {
            for b in (a + 1)..=depth {
                if !triple_consistent(chosen, a, b, c) {
                    continue 'cand;
                }
            }
        }
        if let Some(found) = assemble(candidates, chosen, depth + 1) {
            return Some(found);
        }
    }
    chosen[depth] = Vec::new();
    None
}

/// The three pairwise crossing-order bits of a wire triple must admit a
/// total order on its three crossings (no directed 3-cycle).
fn triple_consistent(rows: &[Vec<usize>], a: usize, b: usize, c: usize) -> bool {
    let pos = |wire: usize, other: usize| -> usize {
        rows[wire - 1].iter().position(|&x| x == other).expect("pair meets")
    };
    // relations among crossings ab, ac, bc
    let ab_before_ac = pos(a, b) < pos(a, c);
    let ab_before_bc = pos(b, a) < pos(b, c);
    let ac_before_bc = pos(c, a) < pos(c, b);
    // the only cyclic patterns are ab<ac, ac<bc, bc<ab and its reverse
    !((ab_before_ac && ac_before_bc && !ab_before_bc)
        || (!ab_before_ac && !ac_before_bc && ab_before_bc))
}

/// Builds a wiring diagram realizing `rows` (the meet order of provisional
/// wire w+1 is rows[w]) and verifies it. Returns the diagram together with
/// the initial position of each provisional wire; in the diagram, wires are
/// numbered by initial position.
fn build_from_rows(n: usize, rows: &[Vec<usize>]) -> Option<(WiringDiagram, Vec<usize>)> {
    // topological order of crossings: each wire's row is a chain
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for a in 1..=n {
        for b in (a + 1)..=n {
            pairs.push((a, b));
        }
    }
    let index: BTreeMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut after: Vec<Vec<usize>> = vec![Vec::new(); pairs.len()];
    let mut indeg = vec![0usize; pairs.len()];
    for (w, row) in rows.iter().enumerate() {
        let wire = w + 1;
        for t in 1..row.len() {
            let prev = crossing_key(wire, *row.get(t - 1)?);
            let next = crossing_key(wire, *row.get(t)?);
            after[*index.get(&prev)?].push(*index.get(&next)?);
            indeg[*index.get(&next)?] += 1;
        }
    }
    let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = indeg
        .iter()
        .enumerate()
        .filter(|(_, &d)| d == 0)
        .map(|(i, _)| std::cmp::Reverse(i))
        .collect();
    let mut topo = Vec::with_capacity(pairs.len());
    while let Some(std::cmp::Reverse(i)) = ready.pop() {
        topo.push(pairs[i]);
        for &j in &after[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.push(std::cmp::Reverse(j));
            }
        }
    }
    if topo.len() != pairs.len() {
        return None; // cyclic crossing order
    }
    // initial top-to-bottom order from triple betweenness
    let initial = initial_order(n, rows)?;
    let mut positions = vec![0usize; n];
    for (pos, &w) in initial.iter().enumerate() {
        positions[w - 1] = pos + 1;
    }
    // simulate with wires placed by the derived initial order
    let mut order: Vec<usize> = initial;
    let mut swaps = Vec::with_capacity(topo.len());
    for &(a, b) in &topo {
        let pa = order.iter().position(|&x| x == a)?;
        let pb = order.iter().position(|&x| x == b)?;
        let (hi, lo) = (pa.min(pb), pa.max(pb));
        if lo != hi + 1 {
            return None;
        }
        swaps.push(hi + 1);
        order.swap(hi, lo);
    }
    let d = WiringDiagram { n, swaps };
    if d.validate().is_err() {
        return None;
    }
    // verify: the diagram's wires are numbered by initial position
    let meets = d.meet_order();
    for (w, row) in rows.iter().enumerate() {
        let got = &meets[positions[w] - 1];
        let want: Vec<usize> = row.iter().map(|&x| positions[x - 1]).collect();
        if *got != want {
            return None;
        }
    }
    Some((d, positions))
}

fn crossing_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Initial top-to-bottom wire order, reconstructed from triple betweenness:
/// in every wire triple the crossing of the initially outer pair is the
/// middle one in sweep order, so the initially middle wire is the one not
/// involved in that crossing.
fn initial_order(n: usize, rows: &[Vec<usize>]) -> Option<Vec<usize>> {
    if n == 1 {
        return Some(vec![1]);
    }
    if n == 2 {
        return Some(vec![1, 2]);
    }
    let pos = |wire: usize, other: usize| -> Option<usize> {
        rows[wire - 1].iter().position(|&x| x == other)
    };
    let middle_wire = |a: usize, b: usize, c: usize| -> Option<usize> {
        // order the three crossings ab, ac, bc by the row chains
        let ab_ac = pos(a, b)? < pos(a, c)?;
        let ab_bc = pos(b, a)? < pos(b, c)?;
        let ac_bc = pos(c, a)? < pos(c, b)?;
        let rank = |x: bool, y: bool| (!x as usize) + (!y as usize);
        let rank_ab = rank(ab_ac, ab_bc);
        let rank_ac = rank(!ab_ac, ac_bc);
        let rank_bc = rank(!ab_bc, !ac_bc);
        // middle crossing has rank 1; the middle wire is the one it omits
        if rank_ab == 1 {
            Some(c)
        } else if rank_ac == 1 {
            Some(b)
        } else if rank_bc == 1 {
            Some(a)
        } else {
            None
        }
    };
    let mut middles = vec![0usize; n + 1];
    let mut middle_of: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for a in 1..=n {
        for b in (a + 1)..=n {
            for c in (b + 1)..=n {
                let m = middle_wire(a, b, c)?;
                middles[m] += 1;
                middle_of.insert((a, b, c), m);
            }
        }
    }
    let extremes: Vec<usize> = (1..=n).filter(|&w| middles[w] == 0).collect();
    if extremes.len() != 2 {
        return None;
    }
    let top = extremes[0];
    let mut rest: Vec<usize> = (1..=n).filter(|&w| w != top).collect();
    rest.sort_by(|&u, &v| {
        let mut t = [top, u, v];
        t.sort_unstable();
        match middle_of.get(&(t[0], t[1], t[2])) {
            Some(&m) if m == u => std::cmp::Ordering::Less,
            Some(&m) if m == v => std::cmp::Ordering::Greater,
            _ => std::cmp::Ordering::Equal,
        }
    });
    let mut order = vec![top];
    order.extend(rest);
    Some(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::classify_triple_in;
    use crate::families::TripleClass;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_diagram(n: usize, rng: &mut ChaCha8Rng) -> WiringDiagram {
        use rand::Rng;
        sample_diagram(n, rng.gen())
    }

    #[test]
    fn gen_cyclic_three_matches_example() {
        let w = gen_cyclic(3).unwrap();
        assert_eq!(w.meet_order(), vec![vec![2, 3], vec![1, 3], vec![1, 2]]);
        assert_eq!(w.swaps, vec![1, 2, 1]);
    }

    #[test]
    fn gen_cyclic_is_cyclic_under_identity() {
        for m in 1..=8 {
            let w = gen_cyclic(m).unwrap();
            w.validate().unwrap();
            let identity: Vec<usize> = (1..=m).collect();
            assert!(is_cyclic(&w, &identity).unwrap());
        }
    }

    #[test]
    fn reversed_labeling_is_not_cyclic() {
        let w = gen_cyclic(5).unwrap();
        let reversed: Vec<usize> = (1..=5).rev().collect();
        assert!(!is_cyclic(&w, &reversed).unwrap());
        // two wires: vacuously cyclic under any labeling
        let w2 = gen_cyclic(2).unwrap();
        assert!(is_cyclic(&w2, &[2, 1]).unwrap());
    }

    #[test]
    fn empty_diagram_for_single_wire() {
        let w = gen_cyclic(1).unwrap();
        assert!(w.swaps.is_empty());
    }

    #[test]
    fn bad_labeling_errors() {
        let w = gen_cyclic(3).unwrap();
        assert!(is_cyclic(&w, &[1, 1, 2]).is_err());
        assert!(is_cyclic(&w, &[1, 2]).is_err());
    }

    #[test]
    fn restrict_full_and_singleton() {
        let w = gen_cyclic(5).unwrap();
        let all: BTreeSet<usize> = (1..=5).collect();
        assert_eq!(w.restrict(&all).unwrap(), w);
        let single: BTreeSet<usize> = [3].into();
        assert!(w.restrict(&single).unwrap().swaps.is_empty());
    }

    #[test]
    fn restrict_of_cyclic_is_cyclic() {
        let w = gen_cyclic(5).unwrap();
        let sub: BTreeSet<usize> = [1, 3, 5].into();
        let r = w.restrict(&sub).unwrap();
        r.validate().unwrap();
        assert!(is_cyclic(&r, &[1, 2, 3]).unwrap());
    }

    #[test]
    fn restrict_preserves_one_swap_per_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let w = random_diagram(7, &mut rng);
            let sub: BTreeSet<usize> = [2, 3, 5, 7].into();
            w.restrict(&sub).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn double_wiring_two_wires() {
        let w = gen_cyclic(2).unwrap();
        let a = double_wiring(&w).unwrap();
        assert_eq!(format!("{}", a.code(Label(1)).unwrap()), "1: 2- 2+");
        assert_eq!(format!("{}", a.code(Label(2)).unwrap()), "2: 1+ 1-");
    }

    #[test]
    fn double_wiring_is_valid_and_krupp_packed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 3..=9 {
            for _ in 0..6 {
                let w = random_diagram(n, &mut rng);
                let a = double_wiring(&w).unwrap();
                assert!(a.validate().is_pass());
                let labels = a.labels();
                for t in ramsey::combinations(&labels, 3) {
                    assert_eq!(
                        classify_triple_in(&a, t[0], t[1], t[2]).unwrap(),
                        TripleClass::Krupp
                    );
                }
            }
        }
    }

    #[test]
    fn antipodal_cut_roundtrip_preserves_meet_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 2..=8 {
            for _ in 0..8 {
                let w = random_diagram(n, &mut rng);
                let a = double_wiring(&w).unwrap();
                let back = antipodal_cut(&a).unwrap();
                assert_eq!(back.meet_order(), w.meet_order());
            }
        }
    }

    #[test]
    fn antipodal_cut_of_cyclic_doubles() {
        for m in 1..=7 {
            let w = gen_cyclic(m).unwrap();
            let a = double_wiring(&w).unwrap();
            let back = antipodal_cut(&a).unwrap();
            assert_eq!(back.meet_order(), w.meet_order());
        }
    }

    #[test]
    fn antipodal_cut_rejects_nonkrupp_input() {
        let a = crate::families::gen_c2(4).unwrap();
        assert!(matches!(
            antipodal_cut(&a),
            Err(PseudolinesError::NotAntipodal(_))
        ));
    }

    #[test]
    fn antipodal_cut_survives_start_rotations_and_flips() {
        // scramble starts and orientations of a doubled diagram; the cut must
        // still assemble some diagram whose double is isomorphic back
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for n in 3..=7 {
            for _ in 0..5 {
                let w = random_diagram(n, &mut rng);
                let mut a = double_wiring(&w).unwrap();
                for l in a.labels() {
                    use rand::Rng;
                    let off = rng.gen_range(0..(2 * (n - 1))) as i64;
                    a = a.rotate_start(l, off).unwrap();
                    if rng.gen_bool(0.5) {
                        a = a.reorient(l).unwrap();
                    }
                }
                let back = antipodal_cut(&a).expect("scrambled double still cuts");
                let redoubled = double_wiring(&back).unwrap();
                assert!(redoubled.validate().is_pass());
                assert!(crate::isomorphism::is_isomorphic(&redoubled, &a)
                    .unwrap()
                    .is_some());
            }
        }
    }

    #[test]
    fn find_cyclic_subarrangement_in_cyclic() {
        let w = gen_cyclic(7).unwrap();
        let (wires, labeling) = find_cyclic_subarrangement(&w, 5).unwrap();
        assert_eq!(wires.len(), 5);
        let sub: BTreeSet<usize> = wires.iter().copied().collect();
        let r = w.restrict(&sub).unwrap();
        assert!(is_cyclic(&r, &labeling).unwrap());
    }

    #[test]
    fn find_cyclic_subarrangement_small_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = random_diagram(6, &mut rng);
        let (wires, labeling) = find_cyclic_subarrangement(&w, 2).unwrap();
        assert_eq!(wires.len(), 2);
        assert_eq!(labeling.len(), 2);
    }

    #[test]
    fn find_cyclic_subarrangement_random_diagrams() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let w = random_diagram(15, &mut rng);
            let (wires, labeling) =
                find_cyclic_subarrangement(&w, 4).expect("15 wires always contain a cyclic 4");
            let sub: BTreeSet<usize> = wires.iter().copied().collect();
            let r = w.restrict(&sub).unwrap();
            assert!(is_cyclic(&r, &labeling).unwrap());
        }
    }

    #[test]
    fn wiring_text_round_trip() {
        let w = gen_cyclic(5).unwrap();
        let text = emit_wiring(&w);
        assert_eq!(parse_wiring(&text).unwrap(), w);
        let w1 = gen_cyclic(1).unwrap();
        assert_eq!(parse_wiring(&emit_wiring(&w1)).unwrap(), w1);
    }

    #[test]
    fn validate_rejects_double_swap() {
        let w = WiringDiagram { n: 2, swaps: vec![1, 1] };
        assert!(w.validate().is_err());
    }
}
