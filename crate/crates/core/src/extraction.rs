//! The certified extraction pipeline: given any valid arrangement and a
//! target size m, find a subarrangement isomorphic to one of the three
//! unavoidable families, with a checkable certificate and a trace of the
//! stages taken.
//!
//! The pipeline colours triples by their class and finds a large
//! monochromatic subset. A Krupp-packed subset is cut into a wiring diagram,
//! a cyclic subdiagram is located and its doubling certified against C1. A
//! NonKrupp-packed subset goes through the rainbow stages: four-colouring of
//! triples, pair-side colouring, normalization, north/south colouring and
//! pattern colouring, ending in a certificate against C2 or C3. Every Ramsey
//! step searches adaptively for the largest monochromatic subset available
//! instead of using worst-case thresholds; correctness rests on the
//! certificates, which are verified before a result is returned. When a
//! stage fails, an exhaustive search against all three generators decides
//! the instance.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::codes::{Arrangement, Label, SideTag, Sign};
use crate::families::{self, Family, FamilyId, TripleClass};
use crate::isomorphism::{self, Certificate};
use crate::pseudolines;
use crate::ramsey::{self, ColoredHypergraph, SearchOutcome};

/// Unsigned pattern of the smallest circle's code in a NonKrupp triple,
/// written over k (middle label) and l (largest label).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum FourColour {
    Kkll,
    Llkk,
    Kllk,
    Lkkl,
}

impl fmt::Display for FourColour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FourColour::Kkll => write!(f, "kkll"),
            FourColour::Llkk => write!(f, "llkk"),
            FourColour::Kllk => write!(f, "kllk"),
            FourColour::Lkkl => write!(f, "lkkl"),
        }
    }
}

/// Side of the middle circle containing the outer pair's crossings, in a
/// normalized rainbow arrangement (N is the side of the anchor's first-half
/// exit, computed as the Left arc tag).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum NsColour {
    N,
    S,
}

/// The middle circle's signed code pattern in a triple of a normalized
/// rainbow arrangement.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum PatternColour {
    P1,
    P2,
    P3,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "stage", rename_all = "kebab-case")]
pub enum TraceEvent {
    DirectSmall {
        m: u32,
        class: Option<TripleClass>,
    },
    TripleColouring {
        colour: TripleClass,
        subset: Vec<Label>,
    },
    AntipodalCut {
        wires: usize,
    },
    CyclicSubarrangement {
        wires: Vec<usize>,
        labels: Vec<Label>,
    },
    FourColourStage {
        colour: FourColour,
        subset: Vec<Label>,
    },
    PairSideStage {
        side: SideTag,
        subset: Vec<Label>,
    },
    RainbowFound {
        anchor: Label,
        size: usize,
    },
    NsStage {
        colour: NsColour,
        subset: Vec<Label>,
    },
    PoleSwap,
    PatternStage {
        colour: PatternColour,
        subset: Vec<Label>,
    },
    Certified {
        family: FamilyId,
    },
    StageFailed {
        name: String,
        reason: String,
    },
    Fallback,
}

/// Which route produced the result.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Branch {
    Direct,
    Krupp,
    NonKrupp,
    Fallback,
}

/// A certified extraction: the family found, the labels of the witnessing
/// subarrangement in the source, the certificate, and the stage trace.
#[derive(Clone, Debug)]
pub struct ExtractionResult {
    pub family: FamilyId,
    pub subset: BTreeSet<Label>,
    pub certificate: Certificate,
    pub trace: Vec<TraceEvent>,
}

impl ExtractionResult {
    pub fn branch(&self) -> Branch {
        let mut branch = Branch::Direct;
        for event in &self.trace {
            match event {
                TraceEvent::Fallback => return Branch::Fallback,
                TraceEvent::CyclicSubarrangement { .. } => branch = Branch::Krupp,
                TraceEvent::PatternStage { .. } => branch = Branch::NonKrupp,
                _ => {}
            }
        }
        branch
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "family": self.family.family.to_string(),
            "size": self.family.size,
            "subset": self.subset.iter().map(|l| l.0).collect::<Vec<u32>>(),
            "certificate": self.certificate.to_json(),
            "trace": serde_json::to_value(&self.trace).expect("trace serializes"),
        })
    }
}

#[derive(Error, Debug)]
pub enum ExtractionError {
    #[error("arrangement is not valid: {0}")]
    Invalid(String),
    #[error("target size must be at least 1")]
    BadTarget,
    #[error("no unavoidable subarrangement of size {size} exists (exhaustive search completed)")]
    NoSubarrangement { size: u32 },
    #[error("search budget exhausted before a result was certified")]
    BudgetExhausted,
    #[error("arrangement is not rainbow with anchor {0}")]
    NotRainbow(Label),
    #[error("arrangement is not NonKrupp-packed")]
    NotNonKruppPacked,
    #[error("input violates realizability constraints: {0}")]
    InvalidInput(String),
    #[error("arrangement of size {available} cannot host a rainbow subarrangement of size {needed}")]
    SizeInsufficient { needed: usize, available: usize },
    #[error("pipeline stage failed: {0}")]
    StageFailed(String),
}

/// Knobs for `find_unavoidable`: an optional node budget shared by all
/// search stages, and a thread count for up-front triple colouring.
#[derive(Clone, Debug, Default)]
pub struct ExtractOptions {
    pub budget: Option<u64>,
    pub threads: usize,
}

/// Maximum number of monochromatic witnesses examined per subset size.
const WITNESS_LIMIT: usize = 8;

/// Finds a subarrangement of `arr` isomorphic to C1_m, C2_m or C3_m and
/// certifies it. For m <= 3 any prefix subset certifies directly; larger
/// targets run the staged pipeline with the exhaustive fallback.
pub fn find_unavoidable(
    arr: &Arrangement,
    m: u32,
    opts: &ExtractOptions,
) -> Result<ExtractionResult, ExtractionError> {
    let report = arr.validate();
    if !report.is_pass() {
        return Err(ExtractionError::Invalid(report.to_string()));
    }
    if m < 1 {
        return Err(ExtractionError::BadTarget);
    }
    let n = arr.size();
    if (m as usize) > n {
        return Err(ExtractionError::NoSubarrangement { size: m });
    }
    let mut trace = Vec::new();
    let mut budget = opts.budget;

    if m <= 3 {
        return direct_small(arr, m, trace);
    }

    let labels = arr.labels();
    let h = ColoredHypergraph::new(labels, 3, |t: &[Label]| {
        families::classify_triple_in(arr, t[0], t[1], t[2])
            .expect("triples of a valid arrangement classify")
    });
    if opts.threads > 1 {
        h.precompute(opts.threads);
    }
    let mut budget_hit = false;
    's_loop: for s in (m as usize..=n).rev() {
        let witnesses = match ramsey::search(&h, s, WITNESS_LIMIT, &mut budget) {
            Ok(SearchOutcome::Found(w)) => w,
            Ok(SearchOutcome::NotFound) => continue,
            Ok(SearchOutcome::BudgetExceeded) => {
                budget_hit = true;
                break 's_loop;
            }
            Err(_) => continue,
        };
        for (subset, colour) in witnesses {
            trace.push(TraceEvent::TripleColouring {
                colour,
                subset: subset.clone(),
            });
            let attempt = match colour {
                TripleClass::Krupp => krupp_branch(arr, &subset, m, &mut trace, &mut budget),
                TripleClass::NonKrupp => {
                    nonkrupp_branch(arr, &subset, m, &mut trace, &mut budget)
                }
            };
            match attempt {
                Ok(result) => return Ok(result),
                Err(ExtractionError::BudgetExhausted) => {
                    budget_hit = true;
                    break 's_loop;
                }
                Err(e) => {
                    trace.push(TraceEvent::StageFailed {
                        name: "branch".into(),
                        reason: e.to_string(),
                    });
                }
            }
        }
    }

    // exhaustive fallback against the three generators
    trace.push(TraceEvent::Fallback);
    for family in [Family::C1, Family::C2, Family::C3] {
        let id = FamilyId { family, size: m };
        let target = families::generate(id).expect("m >= 1");
        match isomorphism::exhaustive_find_budgeted(arr, &target, &mut budget) {
            Ok(Some(certificate)) => {
                debug_assert!(isomorphism::check_certificate(&certificate, arr));
                trace.push(TraceEvent::Certified { family: id });
                return Ok(ExtractionResult {
                    family: id,
                    subset: certificate.source_subset.clone(),
                    certificate,
                    trace,
                });
            }
            Ok(None) => {
                if budget == Some(0) {
                    return Err(ExtractionError::BudgetExhausted);
                }
            }
            Err(e) => {
                return Err(ExtractionError::StageFailed(format!(
                    "fallback isomorphism search failed: {}",
                    e
                )))
            }
        }
    }
    if budget_hit || budget == Some(0) {
        return Err(ExtractionError::BudgetExhausted);
    }
    Err(ExtractionError::NoSubarrangement { size: m })
}

/// For m <= 3 the witness is immediate: sizes 1 and 2 have a single
/// arrangement up to isomorphism (the three families coincide), and a size-3
/// subset certifies against C1 or C2 according to its class.
fn direct_small(
    arr: &Arrangement,
    m: u32,
    mut trace: Vec<TraceEvent>,
) -> Result<ExtractionResult, ExtractionError> {
    let subset: BTreeSet<Label> = arr.labels().into_iter().take(m as usize).collect();
    let (family, class) = if m == 3 {
        let v: Vec<Label> = subset.iter().copied().collect();
        let class = families::classify_triple_in(arr, v[0], v[1], v[2])
            .map_err(|e| ExtractionError::StageFailed(e.to_string()))?;
        match class {
            TripleClass::Krupp => (Family::C1, Some(class)),
            TripleClass::NonKrupp => (Family::C2, Some(class)),
        }
    } else {
        (Family::C1, None)
    };
    trace.push(TraceEvent::DirectSmall { m, class });
    certify(arr, &subset, None, family, m, trace)
}

/// Krupp branch: cut the monochromatic subset into a wiring diagram, find a
/// cyclic subdiagram of size m, and certify its circles against C1_m.
fn krupp_branch(
    arr: &Arrangement,
    subset: &[Label],
    m: u32,
    trace: &mut Vec<TraceEvent>,
    _budget: &mut Option<u64>,
) -> Result<ExtractionResult, ExtractionError> {
    let set: BTreeSet<Label> = subset.iter().copied().collect();
    let restricted = arr
        .restrict(&set)
        .map_err(|e| ExtractionError::StageFailed(e.to_string()))?;
    let (diagram, wire_labels) = pseudolines::antipodal_cut_with_map(&restricted)
        .map_err(|e| ExtractionError::StageFailed(format!("antipodal cut: {}", e)))?;
    trace.push(TraceEvent::AntipodalCut { wires: diagram.n });
    let (wires, labeling) = pseudolines::find_cyclic_subarrangement(&diagram, m as usize)
        .ok_or_else(|| {
            ExtractionError::StageFailed(format!("no cyclic subdiagram of size {}", m))
        })?;
    let chosen: Vec<Label> = wires.iter().map(|&w| wire_labels[w - 1]).collect();
    trace.push(TraceEvent::CyclicSubarrangement {
        wires: wires.clone(),
        labels: chosen.clone(),
    });
    let pi_hint: BTreeMap<Label, Label> = wires
        .iter()
        .zip(&labeling)
        .map(|(&w, &lab)| (wire_labels[w - 1], Label(lab as u32)))
        .collect();
    let chosen_set: BTreeSet<Label> = chosen.into_iter().collect();
    certify(
        arr,
        &chosen_set,
        Some(&pi_hint),
        Family::C1,
        m,
        std::mem::take(trace),
    )
}

/// NonKrupp branch: extract a rainbow subarrangement, normalize it, and run
/// the north/south and pattern stages down to a certificate against C2 or
/// C3.
fn nonkrupp_branch(
    arr: &Arrangement,
    subset: &[Label],
    m: u32,
    trace: &mut Vec<TraceEvent>,
    budget: &mut Option<u64>,
) -> Result<ExtractionResult, ExtractionError> {
    if subset.len() < m as usize + 1 {
        return Err(ExtractionError::SizeInsufficient {
            needed: m as usize + 1,
            available: subset.len(),
        });
    }
    let set: BTreeSet<Label> = subset.iter().copied().collect();
    let restricted = arr
        .restrict(&set)
        .map_err(|e| ExtractionError::StageFailed(e.to_string()))?;
    let mut last_err = ExtractionError::StageFailed("rainbow extraction not attempted".into());
    for n_target in (m as usize..subset.len()).rev() {
        match rainbow_extract_inner(&restricted, n_target, trace, budget) {
            Ok((rainbow, back)) => {
                match rainbow_to_family_inner(arr, &rainbow, &back, m, trace, budget) {
                    Ok(result) => return Ok(result),
                    Err(ExtractionError::BudgetExhausted) => {
                        return Err(ExtractionError::BudgetExhausted)
                    }
                    Err(e) => {
                        trace.push(TraceEvent::StageFailed {
                            name: "rainbow-to-family".into(),
                            reason: e.to_string(),
                        });
                        last_err = e;
                    }
                }
            }
            Err(ExtractionError::BudgetExhausted) => {
                return Err(ExtractionError::BudgetExhausted)
            }
            Err(e) => {
                trace.push(TraceEvent::StageFailed {
                    name: "rainbow-extract".into(),
                    reason: e.to_string(),
                });
                last_err = e;
            }
        }
    }
    Err(last_err)
}

/// Four-colour classification of a NonKrupp triple: the unsigned pattern of
/// the smallest circle's code restricted to the other two.
fn four_colour(arr: &Arrangement, j: Label, k: Label, l: Label) -> Option<FourColour> {
    let code = arr.code(j)?;
    let word: Vec<Label> = code
        .events
        .iter()
        .filter(|&&(el, _)| el == k || el == l)
        .map(|&(el, _)| el)
        .collect();
    if word.len() != 4 {
        return None;
    }
    match (word[0] == k, word[1] == k, word[2] == k, word[3] == k) {
        (true, true, false, false) => Some(FourColour::Kkll),
        (false, false, true, true) => Some(FourColour::Llkk),
        (true, false, false, true) => Some(FourColour::Kllk),
        (false, true, true, false) => Some(FourColour::Lkkl),
        _ => None, // alternating: not a NonKrupp triple
    }
}

/// Rainbow extraction from a NonKrupp-packed arrangement: four-colour the
/// triples, find a monochromatic subset, reduce colour lkkl to kllk by
/// reversing the label order, then 2-colour pairs by the side of the
/// smallest circle holding their crossings and keep a monochromatic
/// pair-subset. Returns the relabeled rainbow arrangement (anchor 0,
/// others 1..n in nesting order) and the map back to input labels.
fn rainbow_extract_inner(
    arr: &Arrangement,
    n_target: usize,
    trace: &mut Vec<TraceEvent>,
    budget: &mut Option<u64>,
) -> Result<(Arrangement, BTreeMap<Label, Label>), ExtractionError> {
    let labels = arr.labels();
    if labels.len() < n_target + 1 {
        return Err(ExtractionError::SizeInsufficient {
            needed: n_target + 1,
            available: labels.len(),
        });
    }
    let h4 = ColoredHypergraph::new(labels.clone(), 3, |t: &[Label]| {
        four_colour(arr, t[0], t[1], t[2])
    });
    let mut saw_unusable_large_witness = false;
    for p in (n_target + 1..=labels.len()).rev() {
        let witnesses = match ramsey::search(&h4, p, WITNESS_LIMIT, budget) {
            Ok(SearchOutcome::Found(w)) => w,
            Ok(SearchOutcome::NotFound) => continue,
            Ok(SearchOutcome::BudgetExceeded) => return Err(ExtractionError::BudgetExhausted),
            Err(_) => continue,
        };
        let exhaustive = witnesses.len() < WITNESS_LIMIT;
        let mut all_bad_colours = true;
        for (subset, colour) in &witnesses {
            let colour = colour.ok_or_else(|| {
                ExtractionError::InvalidInput(
                    "triple with an alternating pattern inside a NonKrupp stage".into(),
                )
            })?;
            trace.push(TraceEvent::FourColourStage {
                colour,
                subset: subset.clone(),
            });
            match colour {
                FourColour::Kkll | FourColour::Llkk => {
                    // a bad-patterned subset: unusable for the rainbow route;
                    // sizes >= 5 cannot occur in realizable inputs
                    if p >= 5 {
                        saw_unusable_large_witness = true;
                    }
                    continue;
                }
                FourColour::Kllk => {
                    all_bad_colours = false;
                    match pair_side_stage(arr, subset, n_target, false, trace, budget) {
                        Ok(found) => return Ok(found),
                        Err(ExtractionError::BudgetExhausted) => {
                            return Err(ExtractionError::BudgetExhausted)
                        }
                        Err(e) => {
                            trace.push(TraceEvent::StageFailed {
                                name: "pair-side".into(),
                                reason: e.to_string(),
                            });
                        }
                    }
                }
                FourColour::Lkkl => {
                    all_bad_colours = false;
                    // reversing the label order turns lkkl into kllk
                    match pair_side_stage(arr, subset, n_target, true, trace, budget) {
                        Ok(found) => return Ok(found),
                        Err(ExtractionError::BudgetExhausted) => {
                            return Err(ExtractionError::BudgetExhausted)
                        }
                        Err(e) => {
                            trace.push(TraceEvent::StageFailed {
                                name: "pair-side".into(),
                                reason: e.to_string(),
                            });
                        }
                    }
                }
            }
        }
        if p >= 5 && all_bad_colours && exhaustive && !witnesses.is_empty() {
            return Err(ExtractionError::InvalidInput(format!(
                "every monochromatic subset of size {} carries a bad pattern; \
                 no realizable arrangement does this",
                p
            )));
        }
    }
    if saw_unusable_large_witness {
        // other colours may simply be absent at every size
        return Err(ExtractionError::InvalidInput(
            "only bad-patterned monochromatic subsets of size >= 5 were found".into(),
        ));
    }
    Err(ExtractionError::StageFailed(format!(
        "no rainbow subarrangement of size {} found",
        n_target
    )))
}

/// Pair-side stage of the rainbow extraction: within a kllk-monochromatic
/// subset (or an lkkl one processed in reversed label order), the smallest
/// circle is the anchor; pairs of the rest are coloured by the tag of the
/// anchor-relative arc holding their mutual crossings, and a monochromatic
/// pair-subset of size n yields the rainbow subarrangement.
fn pair_side_stage(
    arr: &Arrangement,
    subset: &[Label],
    n_target: usize,
    reversed: bool,
    trace: &mut Vec<TraceEvent>,
    budget: &mut Option<u64>,
) -> Result<(Arrangement, BTreeMap<Label, Label>), ExtractionError> {
    let mut ordered = subset.to_vec();
    ordered.sort_unstable();
    if reversed {
        ordered.reverse();
    }
    let anchor = ordered[0];
    let rest: Vec<Label> = ordered[1..].to_vec();
    let h2 = ColoredHypergraph::new(rest, 2, |pair: &[Label]| {
        pair_side(arr, anchor, pair[0], pair[1])
    });
    let found = match ramsey::search(&h2, n_target, 1, budget) {
        Ok(SearchOutcome::Found(mut w)) => w.pop().expect("found is nonempty"),
        Ok(SearchOutcome::NotFound) => {
            return Err(ExtractionError::StageFailed(format!(
                "no one-sided pair subset of size {}",
                n_target
            )))
        }
        Ok(SearchOutcome::BudgetExceeded) => return Err(ExtractionError::BudgetExhausted),
        Err(e) => return Err(ExtractionError::StageFailed(e.to_string())),
    };
    let (chosen, side) = found;
    let side = side.ok_or_else(|| {
        ExtractionError::InvalidInput(
            "pair crossings split or inconsistent relative to the anchor".into(),
        )
    })?;
    trace.push(TraceEvent::PairSideStage {
        side,
        subset: chosen.clone(),
    });
    // nesting order along the anchor is the label order of the stage (the
    // reversed order when reducing from colour lkkl)
    let mut nested: Vec<Label> = chosen.clone();
    nested.sort_unstable();
    if reversed {
        nested.reverse();
    }
    let mut rainbow_set: BTreeSet<Label> = chosen.iter().copied().collect();
    rainbow_set.insert(anchor);
    let restricted = arr
        .restrict(&rainbow_set)
        .map_err(|e| ExtractionError::StageFailed(e.to_string()))?;
    let mut pi: BTreeMap<Label, Label> = BTreeMap::new();
    pi.insert(anchor, Label(0));
    for (i, &l) in nested.iter().enumerate() {
        pi.insert(l, Label(i as u32 + 1));
    }
    let relabeled = restricted
        .relabel(&pi)
        .map_err(|e| ExtractionError::StageFailed(e.to_string()))?;
    if families::is_rainbow(&relabeled, Label(0))
        .map_err(|e| ExtractionError::StageFailed(e.to_string()))?
        != true
    {
        return Err(ExtractionError::StageFailed(
            "candidate subset is not rainbow".into(),
        ));
    }
    trace.push(TraceEvent::RainbowFound {
        anchor,
        size: n_target,
    });
    let back: BTreeMap<Label, Label> = pi.into_iter().map(|(old, new)| (new, old)).collect();
    Ok((relabeled, back))
}

/// Side tag of the anchor-relative arc of `a` holding both crossings with
/// `b`, checked symmetrically from both circles. `None` encodes a split or
/// inconsistent pair.
fn pair_side(arr: &Arrangement, anchor: Label, a: Label, b: Label) -> Option<SideTag> {
    let va = arr.arcs(a, anchor).ok()?;
    let arc_a = va.arc_holding_pair(b)?;
    let vb = arr.arcs(b, anchor).ok()?;
    let arc_b = vb.arc_holding_pair(a)?;
    if arc_a.side != arc_b.side {
        return None;
    }
    Some(arc_a.side)
}

/// Brings a rainbow arrangement to the pinned normal form and returns the
/// relabeling used (old label -> new label).
///
/// Convention: the anchor becomes 0 with signed code 1- 2- .. n- n+ .. 1+
/// (non-anchor circles are renamed 1..n in nesting order and reoriented so
/// their first crossing with the anchor is a minus event there); every
/// non-anchor's start is rotated to the event right after the anchor
/// crossing that opens its intersection-bearing arc. Deterministic and
/// idempotent.
fn normalize_rainbow_with_map(
    arr: &Arrangement,
    anchor: Label,
) -> Result<(Arrangement, BTreeMap<Label, Label>), ExtractionError> {
    if !families::is_rainbow(arr, anchor)
        .map_err(|e| ExtractionError::StageFailed(e.to_string()))?
    {
        return Err(ExtractionError::NotRainbow(anchor));
    }
    let n = arr.size() - 1;
    let code = arr.code(anchor).expect("anchor exists");
    let mut pi: BTreeMap<Label, Label> = BTreeMap::new();
    pi.insert(anchor, Label(0));
    if n == 0 {
        let out = arr.relabel(&pi).expect("bijection");
        return Ok((out, pi));
    }
    let cut = families::rainbow_cut(code).expect("rainbow anchor admits a cut");
    let order = families::rainbow_order(code, cut);
    for (i, &l) in order.iter().enumerate() {
        pi.insert(l, Label(i as u32 + 1));
    }
    let mut out = arr.relabel(&pi).expect("bijection");
    if cut.0 {
        out = out.reorient(Label(0)).expect("anchor exists");
    }
    out = out
        .rotate_start(Label(0), cut.1 as i64)
        .expect("anchor exists");
    // orient non-anchors: first-half anchor events must be minus
    for i in 1..=n {
        let sign = out.code(Label(0)).expect("anchor").events[i - 1].1;
        if sign == Sign::Plus {
            out = out.reorient(Label(i as u32)).expect("label exists");
        }
    }
    // rotate each non-anchor start to just after the anchor crossing that
    // opens its intersection-bearing arc
    for i in 1..=n {
        let l = Label(i as u32);
        let c = out.code(l).expect("label exists").clone();
        let occ = c.occurrences(Label(0));
        if occ.len() != 2 {
            return Err(ExtractionError::StageFailed(format!(
                "circle {} does not cross the anchor twice",
                l
            )));
        }
        let (p, q) = (occ[0], occ[1]);
        let offset = if n == 1 {
            // no non-anchor events; start at the plus crossing
            if c.events[p].1 == Sign::Plus {
                p
            } else {
                q
            }
        } else if q - p - 1 > 0 {
            p
        } else {
            q
        };
        out = out
            .rotate_start(l, (offset + 1) as i64)
            .expect("label exists");
    }
    debug_assert!(families::is_rainbow(&out, Label(0)).unwrap_or(false));
    Ok((out, pi))
}

/// Public form of the normalization; see `normalize_rainbow_with_map` for
/// the pinned convention.
pub fn normalize_rainbow(
    arr: &Arrangement,
    anchor: Label,
) -> Result<Arrangement, ExtractionError> {
    normalize_rainbow_with_map(arr, anchor).map(|(a, _)| a)
}

/// North/south colour of a triple j<k<l of non-anchor circles in a
/// normalized rainbow arrangement: N when the crossings of j and l lie on
/// the Left (north) side of k, checked from both outer circles. `None`
/// encodes a split or inconsistent triple.
fn ns_colour(arr: &Arrangement, j: Label, k: Label, l: Label) -> Option<NsColour> {
    let vj = arr.arcs(j, k).ok()?;
    let arc_j = vj.arc_holding_pair(l)?;
    let vl = arr.arcs(l, k).ok()?;
    let arc_l = vl.arc_holding_pair(j)?;
    if arc_j.side != arc_l.side {
        return None;
    }
    Some(match arc_j.side {
        SideTag::Left => NsColour::N,
        SideTag::Right => NsColour::S,
    })
}

/// Signed pattern of the middle circle's code in a triple j<k<l of a
/// normalized rainbow arrangement.
fn pattern_colour(arr: &Arrangement, j: Label, k: Label, l: Label) -> Option<PatternColour> {
    let code = arr.code(k)?;
    let events: Vec<(Label, Sign)> = code
        .events
        .iter()
        .filter(|&&(el, _)| el == j || el == l)
        .copied()
        .collect();
    if events.len() != 4 {
        return None;
    }
    let p = |t: usize| events[t];
    use Sign::{Minus, Plus};
    if p(0) == (j, Plus) && p(1) == (l, Minus) && p(2) == (l, Plus) && p(3) == (j, Minus) {
        Some(PatternColour::P1)
    } else if p(0) == (j, Plus) && p(1) == (j, Minus) && p(2) == (l, Minus) && p(3) == (l, Plus) {
        Some(PatternColour::P2)
    } else if p(0) == (l, Minus) && p(1) == (l, Plus) && p(2) == (j, Plus) && p(3) == (j, Minus) {
        Some(PatternColour::P3)
    } else {
        None
    }
}

/// The staged reduction from a normalized rainbow arrangement to a
/// certificate against C2 or C3, certifying against `source` through the
/// `back` map (new label -> source label).
fn rainbow_to_family_inner(
    source: &Arrangement,
    rainbow: &Arrangement,
    back: &BTreeMap<Label, Label>,
    m: u32,
    trace: &mut Vec<TraceEvent>,
    budget: &mut Option<u64>,
) -> Result<ExtractionResult, ExtractionError> {
    let (normalized, pi_norm) = normalize_rainbow_with_map(rainbow, Label(0))?;
    let back = compose_back(back, &pi_norm);
    let non_anchors: Vec<Label> = normalized
        .labels()
        .into_iter()
        .filter(|l| *l != Label(0))
        .collect();
    if non_anchors.len() < m as usize {
        return Err(ExtractionError::SizeInsufficient {
            needed: m as usize,
            available: non_anchors.len(),
        });
    }
    let h_ns = ColoredHypergraph::new(non_anchors.clone(), 3, |t: &[Label]| {
        ns_colour(&normalized, t[0], t[1], t[2])
    });
    for s in (m as usize..=non_anchors.len()).rev() {
        let witnesses = match ramsey::search(&h_ns, s, WITNESS_LIMIT, budget) {
            Ok(SearchOutcome::Found(w)) => w,
            Ok(SearchOutcome::NotFound) => continue,
            Ok(SearchOutcome::BudgetExceeded) => return Err(ExtractionError::BudgetExhausted),
            Err(_) => continue,
        };
        for (subset, colour) in witnesses {
            let colour = colour.ok_or_else(|| {
                ExtractionError::InvalidInput(
                    "triple crossings split or inconsistent around the middle circle".into(),
                )
            })?;
            trace.push(TraceEvent::NsStage {
                colour,
                subset: subset.clone(),
            });
            match pattern_stage(
                source,
                &normalized,
                &back,
                &subset,
                colour,
                m,
                trace,
                budget,
            ) {
                Ok(result) => return Ok(result),
                Err(ExtractionError::BudgetExhausted) => {
                    return Err(ExtractionError::BudgetExhausted)
                }
                Err(e) => {
                    trace.push(TraceEvent::StageFailed {
                        name: "pattern".into(),
                        reason: e.to_string(),
                    });
                }
            }
        }
    }
    Err(ExtractionError::StageFailed(
        "north/south stage found no usable subset".into(),
    ))
}

/// Pattern stage: restrict to the one-sided subset (pole-swapping first when
/// the common side is S), renormalize, colour triples by signed pattern and
/// certify a monochromatic subset of size m against C2 (pattern P1) or C3
/// (patterns P2 and P3; P3 is the mirror image of P2, and the reflection is
/// recovered in the certificate transform).
#[allow(clippy::too_many_arguments)]
fn pattern_stage(
    source: &Arrangement,
    normalized: &Arrangement,
    back: &BTreeMap<Label, Label>,
    subset: &[Label],
    colour: NsColour,
    m: u32,
    trace: &mut Vec<TraceEvent>,
    budget: &mut Option<u64>,
) -> Result<ExtractionResult, ExtractionError> {
    let mut keep: BTreeSet<Label> = subset.iter().copied().collect();
    keep.insert(Label(0));
    let restricted = normalized
        .restrict(&keep)
        .map_err(|e| ExtractionError::StageFailed(e.to_string()))?;
    let mut back = prune_back(back, &keep);
    let working = if colour == NsColour::S {
        // pole swap: reversing the non-anchor label order exchanges the
        // hemispheres, turning colour S into N
        trace.push(TraceEvent::PoleSwap);
        let mut sorted: Vec<Label> = subset.to_vec();
        sorted.sort_unstable();
        let mut pi: BTreeMap<Label, Label> = BTreeMap::new();
        pi.insert(Label(0), Label(0));
        let len = sorted.len();
        for (i, &l) in sorted.iter().enumerate() {
            pi.insert(l, sorted[len - 1 - i]);
        }
        back = compose_back(&back, &pi);
        restricted
            .relabel(&pi)
            .map_err(|e| ExtractionError::StageFailed(e.to_string()))?
    } else {
        restricted
    };
    let (renormalized, pi2) = normalize_rainbow_with_map(&working, Label(0))?;
    let back = compose_back(&back, &pi2);
    let members: Vec<Label> = renormalized
        .labels()
        .into_iter()
        .filter(|l| *l != Label(0))
        .collect();
    // consistency: after a pole swap every triple must now be colour N
    for t in ramsey::combinations(&members, 3) {
        match ns_colour(&renormalized, t[0], t[1], t[2]) {
            Some(NsColour::N) => {}
            other => {
                return Err(ExtractionError::StageFailed(format!(
                    "triple {:?} is {:?} after pole normalization",
                    t, other
                )))
            }
        }
    }
    let h_p = ColoredHypergraph::new(members, 3, |t: &[Label]| {
        pattern_colour(&renormalized, t[0], t[1], t[2])
    });
    let witnesses = match ramsey::search(&h_p, m as usize, WITNESS_LIMIT, budget) {
        Ok(SearchOutcome::Found(w)) => w,
        Ok(SearchOutcome::NotFound) => {
            return Err(ExtractionError::StageFailed(format!(
                "no pattern-monochromatic subset of size {}",
                m
            )))
        }
        Ok(SearchOutcome::BudgetExceeded) => return Err(ExtractionError::BudgetExhausted),
        Err(e) => return Err(ExtractionError::StageFailed(e.to_string())),
    };
    let mut last_err = ExtractionError::StageFailed("no pattern witness".into());
    for (chosen, pcolour) in witnesses {
        let pcolour = pcolour.ok_or_else(|| {
            ExtractionError::InvalidInput(
                "middle-circle code pattern outside the three normalized shapes".into(),
            )
        })?;
        trace.push(TraceEvent::PatternStage {
            colour: pcolour,
            subset: chosen.clone(),
        });
        let family = match pcolour {
            PatternColour::P1 => Family::C2,
            PatternColour::P2 | PatternColour::P3 => Family::C3,
        };
        let orig: BTreeSet<Label> = chosen.iter().map(|l| back[l]).collect();
        let pi_hint: BTreeMap<Label, Label> = chosen
            .iter()
            .enumerate()
            .map(|(i, l)| (back[l], Label(i as u32 + 1)))
            .collect();
        match certify(
            source,
            &orig,
            Some(&pi_hint),
            family,
            m,
            std::mem::take(trace),
        ) {
            Ok(result) => return Ok(result),
            Err(e) => {
                last_err = e;
            }
        }
    }
    Err(last_err)
}

fn compose_back(
    back: &BTreeMap<Label, Label>,
    pi: &BTreeMap<Label, Label>,
) -> BTreeMap<Label, Label> {
    pi.iter()
        .filter_map(|(old, new)| back.get(old).map(|orig| (*new, *orig)))
        .collect()
}

fn prune_back(back: &BTreeMap<Label, Label>, keep: &BTreeSet<Label>) -> BTreeMap<Label, Label> {
    back.iter()
        .filter(|(l, _)| keep.contains(l))
        .map(|(l, o)| (*l, *o))
        .collect()
}

/// Builds and verifies the certificate for `restrict(source, subset)`
/// against the named family generator. A supplied bijection hint is tried
/// first (with both reflection values); the full isomorphism search is the
/// fallback. Certificates are always re-checked before being returned.
fn certify(
    source: &Arrangement,
    subset: &BTreeSet<Label>,
    pi_hint: Option<&BTreeMap<Label, Label>>,
    family: Family,
    m: u32,
    mut trace: Vec<TraceEvent>,
) -> Result<ExtractionResult, ExtractionError> {
    let id = FamilyId { family, size: m };
    let target = families::generate(id).map_err(|e| ExtractionError::StageFailed(e.to_string()))?;
    let restricted = source
        .restrict(subset)
        .map_err(|e| ExtractionError::StageFailed(e.to_string()))?;
    let mut transform = None;
    if let Some(hint) = pi_hint {
        for reflect in [false, true] {
            if let Some(t) = isomorphism::solve_given_bijection(&restricted, &target, hint, reflect)
            {
                transform = Some(t);
                break;
            }
        }
    }
    if transform.is_none() {
        transform = isomorphism::is_isomorphic(&restricted, &target)
            .map_err(|e| ExtractionError::StageFailed(e.to_string()))?;
    }
    let Some(transform) = transform else {
        return Err(ExtractionError::StageFailed(format!(
            "chosen subset is not isomorphic to {}",
            id
        )));
    };
    let certificate = Certificate {
        transform,
        source_subset: subset.clone(),
        target,
    };
    if !isomorphism::check_certificate(&certificate, source) {
        return Err(ExtractionError::StageFailed(
            "constructed certificate failed verification".into(),
        ));
    }
    trace.push(TraceEvent::Certified { family: id });
    Ok(ExtractionResult {
        family: id,
        subset: subset.clone(),
        certificate,
        trace,
    })
}

/// Public rainbow extraction per the staged reduction; validates that the
/// input is NonKrupp-packed first. Returns the relabeled rainbow
/// subarrangement and its anchor label (always 0).
pub fn rainbow_extract(
    arr: &Arrangement,
    n: usize,
) -> Result<(Arrangement, Label), ExtractionError> {
    let report = arr.validate();
    if !report.is_pass() {
        return Err(ExtractionError::Invalid(report.to_string()));
    }
    let labels = arr.labels();
    for t in ramsey::combinations(&labels, 3) {
        match families::classify_triple_in(arr, t[0], t[1], t[2]) {
            Ok(TripleClass::NonKrupp) => {}
            _ => return Err(ExtractionError::NotNonKruppPacked),
        }
    }
    let mut trace = Vec::new();
    let mut budget = None;
    rainbow_extract_inner(arr, n, &mut trace, &mut budget).map(|(a, _)| (a, Label(0)))
}

/// Public pattern reduction: expects a normalized NonKrupp-packed rainbow
/// arrangement (anchor 0) and certifies a size-m subarrangement against C2
/// or C3, with the certificate drawn on the input arrangement itself.
pub fn rainbow_to_family(arr: &Arrangement, m: u32) -> Result<ExtractionResult, ExtractionError> {
    let report = arr.validate();
    if !report.is_pass() {
        return Err(ExtractionError::Invalid(report.to_string()));
    }
    let identity: BTreeMap<Label, Label> = arr.labels().into_iter().map(|l| (l, l)).collect();
    let mut trace = Vec::new();
    let mut budget = None;
    rainbow_to_family_inner(arr, arr, &identity, m, &mut trace, &mut budget)
}
