//! Arrangement isomorphism by code matching: two arrangements are
//! operationally isomorphic when some relabeling, per-circle reorientations,
//! per-circle start rotations and an optional global reflection make their
//! codes equal verbatim. Mirror images are identified.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{Arrangement, CodesError, Event, Label, Sign};
use crate::format;
use crate::ramsey::combinations;

/// Largest size for which exact matching and canonicalization are supported.
pub const MAX_EXACT_SIZE: usize = 10;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum IsoError {
    #[error("arrangement is not valid: {0}")]
    Invalid(String),
    #[error("arrangement of size {0} exceeds the exact-search bound {MAX_EXACT_SIZE}")]
    TooLarge(usize),
    #[error("transform is malformed: {0}")]
    BadTransform(String),
    #[error("{0}")]
    Codes(#[from] CodesError),
}

/// The matching data that makes codes equal: a label bijection, the set of
/// circles whose orientation is reversed, per-circle start rotations, and an
/// optional global reflection (every code reversed with all signs flipped,
/// modelling a mirror of the sphere).
///
/// `apply` uses a fixed order: relabel by `pi`, then reflect, then reorient
/// the circles in `flips`, then rotate starts. `flips` and `rotations` are
/// keyed by post-relabeling (target) labels.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Transform {
    pub pi: BTreeMap<Label, Label>,
    pub flips: BTreeSet<Label>,
    pub rotations: BTreeMap<Label, usize>,
    pub reflect: bool,
}

impl Transform {
    pub fn identity(arr: &Arrangement) -> Transform {
        Transform {
            pi: arr.labels().into_iter().map(|l| (l, l)).collect(),
            flips: BTreeSet::new(),
            rotations: BTreeMap::new(),
            reflect: false,
        }
    }

    /// Applies the transform; output codes stay valid.
    pub fn apply(&self, arr: &Arrangement) -> Result<Arrangement, IsoError> {
        let mut out = arr.relabel(&self.pi)?;
        if self.reflect {
            out = out.mirrored();
        }
        for &c in &self.flips {
            out = out.reorient(c)?;
        }
        for (&c, &r) in &self.rotations {
            let len = out
                .code(c)
                .ok_or(CodesError::UnknownLabel(c))?
                .len();
            if r >= len.max(1) {
                return Err(IsoError::BadTransform(format!(
                    "rotation {} out of bounds for circle {}",
                    r, c
                )));
            }
            out = out.rotate_start(c, r as i64)?;
        }
        Ok(out)
    }
}

/// A checkable witness that a subarrangement matches a target arrangement:
/// applying the transform to the restriction of the source must reproduce
/// the target's codes verbatim.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Certificate {
    pub transform: Transform,
    pub source_subset: BTreeSet<Label>,
    pub target: Arrangement,
}

impl Certificate {
    /// Structured-tree serialization with explicit transform fields.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "transform": {
                "pi": self.transform.pi.iter().map(|(k, v)| (k.to_string(), v.0)).collect::<BTreeMap<String, u32>>(),
                "flips": self.transform.flips.iter().map(|l| l.0).collect::<Vec<u32>>(),
                "rotations": self.transform.rotations.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<String, usize>>(),
                "reflect": self.transform.reflect,
            },
            "source_subset": self.source_subset.iter().map(|l| l.0).collect::<Vec<u32>>(),
            "target": serde_json::from_str::<serde_json::Value>(&format::emit_json(&self.target)).expect("target serializes"),
        })
    }
}

/// True iff applying the certificate's transform to the restriction of
/// `source` yields the target codes verbatim. Never errors: any defect in
/// the certificate makes it false.
pub fn check_certificate(cert: &Certificate, source: &Arrangement) -> bool {
    let restricted = match source.restrict(&cert.source_subset) {
        Ok(r) => r,
        Err(_) => return false,
    };
    let image = match cert.transform.apply(&restricted) {
        Ok(a) => a,
        Err(_) => return false,
    };
    image == cert.target
}

/// Decides isomorphism and returns a witness transform when one exists.
///
/// The search enumerates label bijections in lexicographic order with
/// backtracking, pruning candidates by cyclic code-pattern signatures and by
/// unsigned restricted-code compatibility; for each complete bijection the
/// flips, rotations and reflection are solved by sign propagation from the
/// smallest circle. The first witness found is returned.
pub fn is_isomorphic(a: &Arrangement, b: &Arrangement) -> Result<Option<Transform>, IsoError> {
    let ra = a.validate();
    if !ra.is_pass() {
        return Err(IsoError::Invalid(ra.to_string()));
    }
    let rb = b.validate();
    if !rb.is_pass() {
        return Err(IsoError::Invalid(rb.to_string()));
    }
    if a.size() != b.size() {
        return Ok(None);
    }
    if a.size() > MAX_EXACT_SIZE {
        return Err(IsoError::TooLarge(a.size()));
    }
    let source_labels = a.labels();
    let target_labels = b.labels();
    let shapes_a: Vec<Vec<u8>> = source_labels
        .iter()
        .map(|&l| shape(&a.code(l).expect("own label").unsigned()))
        .collect();
    let shapes_b: Vec<Vec<u8>> = target_labels
        .iter()
        .map(|&l| shape(&b.code(l).expect("own label").unsigned()))
        .collect();
    let mut assignment: Vec<usize> = Vec::new(); // assignment[i] = index into target_labels
    let mut used = vec![false; target_labels.len()];
    backtrack(
        a,
        b,
        &source_labels,
        &target_labels,
        &shapes_a,
        &shapes_b,
        &mut assignment,
        &mut used,
    )
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    a: &Arrangement,
    b: &Arrangement,
    source_labels: &[Label],
    target_labels: &[Label],
    shapes_a: &[Vec<u8>],
    shapes_b: &[Vec<u8>],
    assignment: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> Result<Option<Transform>, IsoError> {
    let depth = assignment.len();
    if depth == source_labels.len() {
        let pi: BTreeMap<Label, Label> = assignment
            .iter()
            .enumerate()
            .map(|(i, &j)| (source_labels[i], target_labels[j]))
            .collect();
        for reflect in [false, true] {
            if let Some(t) = solve_given_bijection(a, b, &pi, reflect) {
                return Ok(Some(t));
            }
        }
        return Ok(None);
    }
    for j in 0..target_labels.len() {
        if used[j] || shapes_a[depth] != shapes_b[j] {
            continue;
        }
        if !partial_compatible(a, b, source_labels, target_labels, assignment, depth, j) {
            continue;
        }
        assignment.push(j);
        used[j] = true;
        let found = backtrack(
            a,
            b,
            source_labels,
            target_labels,
            shapes_a,
            shapes_b,
            assignment,
            used,
        )?;
        assignment.pop();
        used[j] = false;
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// Necessary condition for extending a partial bijection with
/// source_labels[depth] -> target_labels[j]: the unsigned codes restricted to
/// the assigned labels must agree as cyclic words up to rotation and
/// reversal (rotation from the free start, reversal from the free
/// orientation).
fn partial_compatible(
    a: &Arrangement,
    b: &Arrangement,
    source_labels: &[Label],
    target_labels: &[Label],
    assignment: &[usize],
    depth: usize,
    j: usize,
) -> bool {
    if assignment.is_empty() {
        return true;
    }
    let map: BTreeMap<Label, Label> = assignment
        .iter()
        .enumerate()
        .map(|(i, &t)| (source_labels[i], target_labels[t]))
        .collect();
    let au = a.code(source_labels[depth]).expect("own label");
    let bv = b.code(target_labels[j]).expect("own label");
    let wa: Vec<Label> = au
        .events
        .iter()
        .filter_map(|&(l, _)| map.get(&l).copied())
        .collect();
    let assigned_targets: BTreeSet<Label> = map.values().copied().collect();
    let wb: Vec<Label> = bv
        .events
        .iter()
        .map(|&(l, _)| l)
        .filter(|l| assigned_targets.contains(l))
        .collect();
    cyclic_equal_upto_reversal(&wa, &wb)
}

fn cyclic_equal_upto_reversal(x: &[Label], y: &[Label]) -> bool {
    if x.len() != y.len() {
        return false;
    }
    let len = x.len();
    if len == 0 {
        return true;
    }
    let rev: Vec<Label> = x.iter().rev().copied().collect();
    for cand in [x, rev.as_slice()] {
        for r in 0..len {
            if (0..len).all(|t| cand[(r + t) % len] == y[t]) {
                return true;
            }
        }
    }
    false
}

/// Canonical cyclic pattern of an unsigned code: minimal first-appearance
/// abstraction over all rotations and the reversal. Circles can only map to
/// circles with equal shapes.
fn shape(word: &[Label]) -> Vec<u8> {
    let len = word.len();
    if len == 0 {
        return Vec::new();
    }
    let rev: Vec<Label> = word.iter().rev().copied().collect();
    let mut best: Option<Vec<u8>> = None;
    for cand in [word, rev.as_slice()] {
        for r in 0..len {
            let mut ids: BTreeMap<Label, u8> = BTreeMap::new();
            let mut pat = Vec::with_capacity(len);
            for t in 0..len {
                let l = cand[(r + t) % len];
                let next = ids.len() as u8;
                let id = *ids.entry(l).or_insert(next);
                pat.push(id);
            }
            if best.as_ref().is_none_or(|b| pat < *b) {
                best = Some(pat);
            }
        }
    }
    best.expect("nonempty word")
}

/// Given a fixed label bijection and reflection flag, finds flips and
/// rotations making the codes equal, by propagating sign constraints from
/// the smallest target circle. Returns the full transform on success.
pub(crate) fn solve_given_bijection(
    a: &Arrangement,
    b: &Arrangement,
    pi: &BTreeMap<Label, Label>,
    reflect: bool,
) -> Option<Transform> {
    let relabeled = a.relabel(pi).ok()?;
    let base = if reflect { relabeled.mirrored() } else { relabeled };
    if base.labels() != b.labels() {
        return None;
    }
    let labels = b.labels();
    let c0 = labels[0];
    let code_a0 = base.code(c0).expect("own label");
    let code_b0 = b.code(c0).expect("own label");
    let len = code_a0.len();
    if len == 0 {
        // single circle: nothing to match
        return Some(Transform {
            pi: pi.clone(),
            flips: BTreeSet::new(),
            rotations: BTreeMap::new(),
            reflect,
        });
    }
    for f0 in [false, true] {
        let oriented = if f0 {
            code_a0.reversed_flipped()
        } else {
            code_a0.clone()
        };
        for r0 in 0..len {
            let rotated = oriented.rotated(r0);
            if rotated.unsigned() != code_b0.unsigned() {
                continue;
            }
            // derive the flip set from the sign differences
            let mut flips: BTreeSet<Label> = BTreeSet::new();
            if f0 {
                flips.insert(c0);
            }
            let mut decided: BTreeMap<Label, bool> = BTreeMap::new();
            let mut consistent = true;
            for t in 0..len {
                let (l, sa) = rotated.events[t];
                let (_, sb) = code_b0.events[t];
                let need = sa != sb;
                match decided.get(&l) {
                    Some(&prev) if prev != need => {
                        consistent = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        decided.insert(l, need);
                        if need {
                            flips.insert(l);
                        }
                    }
                }
            }
            if !consistent {
                continue;
            }
            // verify every other circle and pick its rotation
            let mut rotations: BTreeMap<Label, usize> = BTreeMap::new();
            rotations.insert(c0, r0);
            let mut all_ok = true;
            for &c in &labels[1..] {
                let code = base.code(c).expect("own label");
                let own_flipped = flips.contains(&c);
                let oriented = if own_flipped {
                    code.reversed_flipped()
                } else {
                    code.clone()
                };
                let adjusted: Vec<Event> = oriented
                    .events
                    .iter()
                    .map(|&(l, s)| {
                        if flips.contains(&l) {
                            (l, s.flipped())
                        } else {
                            (l, s)
                        }
                    })
                    .collect();
                let want = &b.code(c).expect("own label").events;
                let m = adjusted.len();
                let found = (0..m).find(|&r| (0..m).all(|t| adjusted[(r + t) % m] == want[t]));
                match found {
                    Some(r) => {
                        rotations.insert(c, r);
                    }
                    None => {
                        all_ok = false;
                        break;
                    }
                }
            }
            if all_ok {
                return Some(Transform {
                    pi: pi.clone(),
                    flips,
                    rotations,
                    reflect,
                });
            }
        }
    }
    None
}

/// Canonical byte string: the minimal serialized code system over all
/// transforms (relabelings, reorientations, start rotations, reflection).
/// Equal canonical forms characterize isomorphism. Serialized as the text
/// format with labels renamed 1..n.
pub fn canonical_form(arr: &Arrangement) -> Result<Vec<u8>, IsoError> {
    let report = arr.validate();
    if !report.is_pass() {
        return Err(IsoError::Invalid(report.to_string()));
    }
    let n = arr.size();
    if n > MAX_EXACT_SIZE {
        return Err(IsoError::TooLarge(n));
    }
    let labels = arr.labels();
    if n == 1 {
        let single = Arrangement::new([crate::codes::SignedCode::new(Label(1), vec![])])
            .expect("single circle");
        return Ok(format::emit_text(&single).into_bytes());
    }
    // Search space: reflection x traversal-base circle x its orientation x
    // its rotation. Everything else is forced: other circles are labeled by
    // first appearance along the base circle, their orientations by the rule
    // that their first crossing with the base is entered from the left
    // (plus), and their own starts by the minimal rotation of the resulting
    // code. Each greedy step is the lexicographic minimum available, so the
    // overall minimum over this space is the minimum over all transforms.
    let mut best: Option<Vec<Vec<(u32, u8)>>> = None;
    for reflect in [false, true] {
        let base = if reflect { arr.mirrored() } else { arr.clone() };
        for &s in &labels {
            let code_s = base.code(s).expect("own label");
            let len = code_s.len();
            for f_s in [false, true] {
                let oriented = if f_s {
                    code_s.reversed_flipped()
                } else {
                    code_s.clone()
                };
                for r in 0..len {
                    let rotated = oriented.rotated(r);
                    // first-appearance relabeling and forced flips
                    let mut pi: BTreeMap<Label, u32> = BTreeMap::new();
                    pi.insert(s, 1);
                    let mut flips: BTreeSet<Label> = BTreeSet::new();
                    if f_s {
                        flips.insert(s);
                    }
                    let mut circle1: Vec<(u32, u8)> = Vec::with_capacity(len);
                    for &(l, sgn) in &rotated.events {
                        let next = (pi.len() + 1) as u32;
                        let id = *pi.entry(l).or_insert(next);
                        let first_time = circle1.iter().all(|&(x, _)| x != id);
                        if first_time {
                            if sgn == Sign::Minus {
                                flips.insert(l);
                            }
                            circle1.push((id, 0)); // plus
                        } else {
                            circle1.push((id, 1)); // minus, forced by validity
                        }
                        let _ = sgn;
                    }
                    // build the remaining circles in target order
                    let mut candidate: Vec<Vec<(u32, u8)>> = vec![circle1];
                    let mut order: Vec<(u32, Label)> =
                        pi.iter().map(|(&l, &id)| (id, l)).collect();
                    order.sort_unstable();
                    for &(_, l) in order.iter().skip(1) {
                        let code = base.code(l).expect("own label");
                        let oriented = if flips.contains(&l) {
                            code.reversed_flipped()
                        } else {
                            code.clone()
                        };
                        let adjusted: Vec<(u32, u8)> = oriented
                            .events
                            .iter()
                            .map(|&(el, es)| {
                                let s2 = if flips.contains(&el) { es.flipped() } else { es };
                                (pi[&el], if s2 == Sign::Plus { 0 } else { 1 })
                            })
                            .collect();
                        candidate.push(min_rotation(&adjusted));
                    }
                    if best.as_ref().is_none_or(|b| candidate < *b) {
                        best = Some(candidate);
                    }
                }
            }
        }
    }
    let best = best.expect("n >= 2 has candidates");
    let codes = best.into_iter().enumerate().map(|(i, events)| {
        let events: Vec<Event> = events
            .into_iter()
            .map(|(l, s)| {
                (
                    Label(l),
                    if s == 0 { Sign::Plus } else { Sign::Minus },
                )
            })
            .collect();
        crate::codes::SignedCode::new(Label((i + 1) as u32), events)
    });
    let canon = Arrangement::new(codes.collect::<Vec<_>>()).expect("canonical labels distinct");
    Ok(format::emit_text(&canon).into_bytes())
}

fn min_rotation(events: &[(u32, u8)]) -> Vec<(u32, u8)> {
    let len = events.len();
    if len == 0 {
        return Vec::new();
    }
    let mut best_r = 0;
    for r in 1..len {
        for t in 0..len {
            let x = events[(r + t) % len];
            let y = events[(best_r + t) % len];
            match x.cmp(&y) {
                std::cmp::Ordering::Less => {
                    best_r = r;
                    break;
                }
                std::cmp::Ordering::Greater => break,
                std::cmp::Ordering::Equal => {}
            }
        }
    }
    (0..len).map(|t| events[(best_r + t) % len]).collect()
}

/// Searches all label subsets of the target's size in lexicographic order,
/// returning the first certificate found, if any.
pub fn exhaustive_find(
    source: &Arrangement,
    target: &Arrangement,
) -> Result<Option<Certificate>, IsoError> {
    exhaustive_find_budgeted(source, target, &mut None)
}

/// Budget-aware variant used by the extraction fallback: each subset tested
/// costs one budget unit; on exhaustion, gives up with Ok(None) after
/// setting the flag.
pub(crate) fn exhaustive_find_budgeted(
    source: &Arrangement,
    target: &Arrangement,
    budget: &mut Option<u64>,
) -> Result<Option<Certificate>, IsoError> {
    let m = target.size();
    if m > source.size() {
        return Ok(None);
    }
    let labels = source.labels();
    for subset in combinations(&labels, m) {
        if let Some(b) = budget.as_mut() {
            if *b == 0 {
                return Ok(None);
            }
            *b -= 1;
        }
        let set: BTreeSet<Label> = subset.iter().copied().collect();
        let restricted = source.restrict(&set)?;
        if let Some(t) = is_isomorphic(&restricted, target)? {
            return Ok(Some(Certificate {
                transform: t,
                source_subset: set,
                target: target.clone(),
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gen_c1, gen_c2, gen_c3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_transform(arr: &Arrangement, rng: &mut ChaCha8Rng) -> Transform {
        let labels = arr.labels();
        let mut targets = labels.clone();
        use rand::seq::SliceRandom;
        targets.shuffle(rng);
        let pi: BTreeMap<Label, Label> = labels.iter().copied().zip(targets).collect();
        let flips: BTreeSet<Label> = pi
            .values()
            .filter(|_| rng.gen_bool(0.5))
            .copied()
            .collect();
        let len = 2 * (labels.len().max(1) - 1);
        let rotations: BTreeMap<Label, usize> = pi
            .values()
            .map(|&l| (l, if len == 0 { 0 } else { rng.gen_range(0..len) }))
            .collect();
        Transform {
            pi,
            flips,
            rotations,
            reflect: rng.gen_bool(0.5),
        }
    }

    #[test]
    fn identity_and_involution() {
        let a = gen_c2(4).unwrap();
        let id = Transform::identity(&a);
        assert_eq!(id.apply(&a).unwrap(), a);
        let mut flip = Transform::identity(&a);
        flip.flips.insert(Label(2));
        let twice = flip.apply(&flip.apply(&a).unwrap()).unwrap();
        assert_eq!(twice, a);
    }

    #[test]
    fn nonkrupp_triples_are_isomorphic() {
        let t = is_isomorphic(&gen_c2(3).unwrap(), &gen_c3(3).unwrap())
            .unwrap()
            .expect("C2_3 and C3_3 are the NonKrupp arrangement");
        let image = t.apply(&gen_c2(3).unwrap()).unwrap();
        assert_eq!(image, gen_c3(3).unwrap());
    }

    #[test]
    fn krupp_differs_from_nonkrupp() {
        assert!(is_isomorphic(&gen_c1(3).unwrap(), &gen_c2(3).unwrap())
            .unwrap()
            .is_none());
    }

    #[test]
    fn random_transforms_are_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for m in [1u32, 2, 3, 5, 6] {
            for gen in [gen_c1, gen_c2, gen_c3] {
                let a = gen(m).unwrap();
                let t = random_transform(&a, &mut rng);
                let b = t.apply(&a).unwrap();
                assert!(b.validate().is_pass());
                let w = is_isomorphic(&a, &b).unwrap().expect("transform image");
                assert_eq!(w.apply(&a).unwrap(), b);
            }
        }
    }

    #[test]
    fn size_mismatch_is_none() {
        assert!(is_isomorphic(&gen_c2(3).unwrap(), &gen_c2(4).unwrap())
            .unwrap()
            .is_none());
    }

    #[test]
    fn canonical_form_matches_isomorphism_on_triples() {
        let c2 = canonical_form(&gen_c2(3).unwrap()).unwrap();
        let c3 = canonical_form(&gen_c3(3).unwrap()).unwrap();
        let c1 = canonical_form(&gen_c1(3).unwrap()).unwrap();
        assert_eq!(c2, c3);
        assert_ne!(c1, c2);
    }

    #[test]
    fn canonical_form_invariant_under_random_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for m in [2u32, 3, 4, 5] {
            for gen in [gen_c1, gen_c2, gen_c3] {
                let a = gen(m).unwrap();
                let base = canonical_form(&a).unwrap();
                for _ in 0..4 {
                    let t = random_transform(&a, &mut rng);
                    let b = t.apply(&a).unwrap();
                    assert_eq!(canonical_form(&b).unwrap(), base);
                }
            }
        }
    }

    #[test]
    fn canonical_form_separates_families_at_size_four() {
        let forms = [
            canonical_form(&gen_c1(4).unwrap()).unwrap(),
            canonical_form(&gen_c2(4).unwrap()).unwrap(),
            canonical_form(&gen_c3(4).unwrap()).unwrap(),
        ];
        assert_ne!(forms[0], forms[1]);
        assert_ne!(forms[0], forms[2]);
        assert_ne!(forms[1], forms[2]);
        // confirmed against the pairwise search oracle
        assert!(is_isomorphic(&gen_c1(4).unwrap(), &gen_c2(4).unwrap()).unwrap().is_none());
        assert!(is_isomorphic(&gen_c1(4).unwrap(), &gen_c3(4).unwrap()).unwrap().is_none());
        assert!(is_isomorphic(&gen_c2(4).unwrap(), &gen_c3(4).unwrap()).unwrap().is_none());
    }

    #[test]
    fn mirror_closure() {
        for m in [3u32, 4, 5] {
            for gen in [gen_c1, gen_c2, gen_c3] {
                let a = gen(m).unwrap();
                assert_eq!(
                    canonical_form(&a).unwrap(),
                    canonical_form(&a.mirrored()).unwrap()
                );
            }
        }
    }

    #[test]
    fn canonical_agrees_with_search_on_small_corpus() {
        // dual-route check: the canonical form and the backtracking search
        // must induce the same equivalence on a mixed corpus
        let mut corpus: Vec<Arrangement> = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for m in 3..=5u32 {
            for gen in [gen_c1, gen_c2, gen_c3] {
                let a = gen(m).unwrap();
                let t = random_transform(&a, &mut rng);
                corpus.push(t.apply(&a).unwrap());
                corpus.push(a);
            }
        }
        corpus.push(crate::families::gen_x4());
        for x in &corpus {
            for y in &corpus {
                if x.size() != y.size() {
                    continue;
                }
                let same_form = canonical_form(x).unwrap() == canonical_form(y).unwrap();
                let found = is_isomorphic(x, y).unwrap().is_some();
                assert_eq!(same_form, found);
            }
        }
    }

    #[test]
    fn equivalence_relation_spot_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let a = gen_c2(4).unwrap();
        let t = random_transform(&a, &mut rng);
        let b = t.apply(&a).unwrap();
        let c = random_transform(&b, &mut rng).apply(&b).unwrap();
        // reflexive, symmetric, transitive on the sample
        assert!(is_isomorphic(&a, &a).unwrap().is_some());
        assert!(is_isomorphic(&b, &a).unwrap().is_some());
        assert!(is_isomorphic(&a, &c).unwrap().is_some());
    }

    #[test]
    fn certificates_check_and_break() {
        let source = gen_c2(6).unwrap();
        let target = gen_c2(4).unwrap();
        let cert = exhaustive_find(&source, &target).unwrap().expect("heredity");
        assert_eq!(
            cert.source_subset,
            [Label(1), Label(2), Label(3), Label(4)].into_iter().collect()
        );
        assert!(check_certificate(&cert, &source));
        // perturb one rotation
        let mut broken = cert.clone();
        let (&c, &r) = broken.transform.rotations.iter().next().unwrap();
        let len = broken.target.code(c).unwrap().len();
        broken.transform.rotations.insert(c, (r + 1) % len.max(1));
        assert!(!check_certificate(&broken, &source));
    }

    #[test]
    fn identity_certificate() {
        let a = gen_c3(5).unwrap();
        let cert = Certificate {
            transform: Transform::identity(&a),
            source_subset: a.labels().into_iter().collect(),
            target: a.clone(),
        };
        assert!(check_certificate(&cert, &a));
    }

    #[test]
    fn krupp_packed_has_no_nonkrupp_triple() {
        let source = gen_c1(5).unwrap();
        let target = gen_c2(3).unwrap();
        assert!(exhaustive_find(&source, &target).unwrap().is_none());
    }

    #[test]
    fn target_equal_source_gives_identity_like_certificate() {
        let a = gen_c2(4).unwrap();
        let cert = exhaustive_find(&a, &a).unwrap().expect("self");
        assert!(check_certificate(&cert, &a));
        assert_eq!(cert.source_subset.len(), 4);
    }

    #[test]
    fn apply_can_realize_sub_restriction() {
        let big = gen_c2(6).unwrap();
        let sub: BTreeSet<Label> = [Label(2), Label(3), Label(5)].into_iter().collect();
        let restricted = big.restrict(&sub).unwrap();
        let t = is_isomorphic(&restricted, &gen_c2(3).unwrap())
            .unwrap()
            .expect("heredity of C2");
        assert_eq!(t.apply(&restricted).unwrap(), gen_c2(3).unwrap());
    }

    #[test]
    fn too_large_inputs_are_refused() {
        let a = gen_c2(11).unwrap();
        assert!(matches!(canonical_form(&a), Err(IsoError::TooLarge(11))));
        assert!(matches!(
            is_isomorphic(&a, &gen_c2(11).unwrap()),
            Err(IsoError::TooLarge(11))
        ));
    }
}
