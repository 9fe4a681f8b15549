//! The canonical arrangement families and the classifying predicates:
//! triple classification (Krupp vs NonKrupp), bad arrangements, the frozen
//! size-4 witness, and the rainbow test.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::codes::{Arrangement, CodesError, Label, Sign, SignedCode};
use crate::pseudolines::{self, PseudolinesError};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum FamiliesError {
    #[error("size must be at least 1")]
    BadSize,
    #[error("operation requires an arrangement of size 3 (got {0})")]
    WrongSize(usize),
    #[error("labeling is not a permutation of the arrangement's labels")]
    NotAPermutation,
    #[error("{0}")]
    Codes(#[from] CodesError),
    #[error("{0}")]
    Pseudolines(#[from] PseudolinesError),
}

/// The two isomorphism types of size-3 arrangements.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum TripleClass {
    Krupp,
    NonKrupp,
}

impl fmt::Display for TripleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TripleClass::Krupp => write!(f, "Krupp"),
            TripleClass::NonKrupp => write!(f, "NonKrupp"),
        }
    }
}

/// One of the three unavoidable families.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum Family {
    C1,
    C2,
    C3,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::C1 => write!(f, "C1"),
            Family::C2 => write!(f, "C2"),
            Family::C3 => write!(f, "C3"),
        }
    }
}

/// A family member: which of the three families, at which size.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct FamilyId {
    pub family: Family,
    pub size: u32,
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.family, self.size)
    }
}

/// Generates the named family member.
pub fn generate(id: FamilyId) -> Result<Arrangement, FamiliesError> {
    match id.family {
        Family::C1 => gen_c1(id.size),
        Family::C2 => gen_c2(id.size),
        Family::C3 => gen_c3(id.size),
    }
}

fn run_plus(range: impl Iterator<Item = u32>) -> impl Iterator<Item = (Label, Sign)> {
    range.map(|j| (Label(j), Sign::Plus))
}

fn run_minus(range: impl Iterator<Item = u32>) -> impl Iterator<Item = (Label, Sign)> {
    range.map(|j| (Label(j), Sign::Minus))
}

/// The arrangement whose circles sit in a row, each overlapping all the
/// others. With counterclockwise orientations and leftmost starting points,
/// circle i's code is the ascending plus-run below i, the ascending minus-run
/// above i, then both runs reversed.
pub fn gen_c2(m: u32) -> Result<Arrangement, FamiliesError> {
    if m < 1 {
        return Err(FamiliesError::BadSize);
    }
    let codes = (1..=m).map(|i| {
        let mut events: Vec<(Label, Sign)> = Vec::with_capacity(2 * (m as usize - 1));
        events.extend(run_plus(1..i));
        events.extend(run_minus(i + 1..=m));
        events.extend(run_plus((i + 1..=m).rev()));
        events.extend(run_minus((1..i).rev()));
        SignedCode::new(Label(i), events)
    });
    Ok(Arrangement::new(codes.collect::<Vec<_>>())?)
}

/// The nested-chain arrangement. With clockwise orientations and bottom-right
/// starting points, circle i's code interleaves the smaller circles as
/// adjacent +- pairs and closes with the larger ones.
pub fn gen_c3(m: u32) -> Result<Arrangement, FamiliesError> {
    if m < 1 {
        return Err(FamiliesError::BadSize);
    }
    let codes = (1..=m).map(|i| {
        let mut events: Vec<(Label, Sign)> = Vec::with_capacity(2 * (m as usize - 1));
        for j in 1..i {
            events.push((Label(j), Sign::Plus));
            events.push((Label(j), Sign::Minus));
        }
        events.extend(run_minus(i + 1..=m));
        events.extend(run_plus((i + 1..=m).rev()));
        SignedCode::new(Label(i), events)
    });
    Ok(Arrangement::new(codes.collect::<Vec<_>>())?)
}

/// The arrangement of great pseudocircles obtained by doubling the cyclic
/// wiring diagram; there is no closed code formula, the construction is the
/// definition.
pub fn gen_c1(m: u32) -> Result<Arrangement, FamiliesError> {
    if m < 1 {
        return Err(FamiliesError::BadSize);
    }
    let w = pseudolines::gen_cyclic(m as usize)?;
    Ok(pseudolines::double_wiring(&w)?)
}

/// Classifies a size-3 arrangement: Krupp when the unsigned code of the
/// smallest circle restricted to the other two alternates (pattern xyxy),
/// NonKrupp otherwise. In every valid arrangement the answer is the same
/// from any of the three circles.
pub fn classify_triple(arr: &Arrangement) -> Result<TripleClass, FamiliesError> {
    let labels = arr.labels();
    if labels.len() != 3 {
        return Err(FamiliesError::WrongSize(labels.len()));
    }
    classify_triple_in(arr, labels[0], labels[1], labels[2])
}

/// Classifies the triple {a, b, c} inside a larger arrangement without
/// materializing the restriction: scans the smallest circle's code for the
/// four events of the other two and tests alternation cyclically.
pub fn classify_triple_in(
    arr: &Arrangement,
    a: Label,
    b: Label,
    c: Label,
) -> Result<TripleClass, FamiliesError> {
    let mut t = [a, b, c];
    t.sort_unstable();
    let (lo, mid, hi) = (t[0], t[1], t[2]);
    if lo == mid || mid == hi {
        return Err(FamiliesError::Codes(CodesError::SameLabels(mid)));
    }
    let code = arr
        .code(lo)
        .ok_or(FamiliesError::Codes(CodesError::UnknownLabel(lo)))?;
    if !arr.contains(mid) {
        return Err(FamiliesError::Codes(CodesError::UnknownLabel(mid)));
    }
    if !arr.contains(hi) {
        return Err(FamiliesError::Codes(CodesError::UnknownLabel(hi)));
    }
    let word: Vec<Label> = code
        .events
        .iter()
        .filter(|&&(l, _)| l == mid || l == hi)
        .map(|&(l, _)| l)
        .collect();
    if word.len() != 4 {
        return Err(FamiliesError::Codes(CodesError::MalformedCode(lo)));
    }
    let alternating = (0..4).all(|i| word[i] != word[(i + 1) % 4]);
    Ok(if alternating {
        TripleClass::Krupp
    } else {
        TripleClass::NonKrupp
    })
}

/// True when, under the given label order, each circle's unsigned code in the
/// subarrangement it starts is the paired ascending word of the later
/// circles, up to rotation of its start.
pub fn is_bad(arr: &Arrangement, labeling: &[Label]) -> Result<bool, FamiliesError> {
    let labels: BTreeSet<Label> = arr.labels().into_iter().collect();
    let given: BTreeSet<Label> = labeling.iter().copied().collect();
    if given.len() != labeling.len() || given != labels {
        return Err(FamiliesError::NotAPermutation);
    }
    let n = labeling.len();
    for i in 0..n.saturating_sub(2) {
        let tail: BTreeSet<Label> = labeling[i..].iter().copied().collect();
        let code = arr.code(labeling[i]).expect("labeling checked");
        let word: Vec<Label> = code
            .events
            .iter()
            .filter(|&&(l, _)| tail.contains(&l))
            .map(|&(l, _)| l)
            .collect();
        let mut expected = Vec::with_capacity(word.len());
        for &l in &labeling[i + 1..] {
            expected.push(l);
            expected.push(l);
        }
        if !cyclic_rotation_of(&word, &expected) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn cyclic_rotation_of(word: &[Label], target: &[Label]) -> bool {
    if word.len() != target.len() {
        return false;
    }
    if word.is_empty() {
        return true;
    }
    (0..word.len()).any(|r| (0..word.len()).all(|t| word[(r + t) % word.len()] == target[t]))
}

/// A bad NonKrupp-packed arrangement of size 4, frozen as explicit codes.
/// The codes were produced by the seeded randomized search over geometric
/// circle quadruples in the `regenerate_x4` test, which reproduces them
/// verbatim; the witness circles are
///
/// ```text
/// (-0.36866, -0.48437) r 3.00442
/// ( 1.21308,  0.07699) r 3.33660
/// (-0.07292,  0.82255) r 1.90991
/// (-1.25725, -0.92280) r 2.03630
/// ```
///
/// relabeled so that the native order 1,2,3,4 witnesses badness.
pub fn gen_x4() -> Arrangement {
    crate::format::parse_text(
        "1: 4+ 2+ 2- 3- 3+ 4-\n\
         2: 4- 4+ 1- 3- 3+ 1+\n\
         3: 4+ 2+ 2- 1+ 1- 4-\n\
         4: 2+ 2- 1- 3- 3+ 1+\n",
    )
    .expect("frozen codes are well-formed")
}

/// True when the arrangement is rainbow with the given anchor: the anchor's
/// unsigned code is a nested word over the other circles (some relabeling
/// makes it 12..nn..21, up to rotation and reversal), and every crossing
/// between non-anchor circles lies on one common side of the anchor.
pub fn is_rainbow(arr: &Arrangement, anchor: Label) -> Result<bool, FamiliesError> {
    let code = arr
        .code(anchor)
        .ok_or(FamiliesError::Codes(CodesError::UnknownLabel(anchor)))?;
    let n = arr.size() - 1;
    if n == 0 {
        return Ok(true);
    }
    // (II): nested anchor word
    if rainbow_cut(code).is_none() {
        return Ok(false);
    }
    if n == 1 {
        return Ok(true);
    }
    // (I): for each non-anchor circle, all events of other non-anchor circles
    // lie in a single arc relative to the anchor, and the side tags agree
    let mut common_side = None;
    for l in arr.labels() {
        if l == anchor {
            continue;
        }
        let view = arr.arcs(l, anchor)?;
        let (full, empty) = (&view.arcs[0], &view.arcs[1]);
        let bearing = if empty.events.is_empty() {
            full
        } else if full.events.is_empty() {
            empty
        } else {
            return Ok(false);
        };
        match common_side {
            None => common_side = Some(bearing.side),
            Some(s) => {
                if s != bearing.side {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Finds a cut of the anchor's cyclic code exposing the nested rainbow word:
/// returns (reversed, rotation) such that after optionally reversing the
/// traversal and rotating the start, the unsigned code reads x1..xn xn..x1
/// with distinct xi. Rotation applies after reversal; the smallest rotation
/// without reversal is preferred.
pub(crate) fn rainbow_cut(code: &SignedCode) -> Option<(bool, usize)> {
    let len = code.len();
    if len == 0 || len % 2 != 0 {
        return None;
    }
    let n = len / 2;
    let fwd: Vec<Label> = code.unsigned();
    let rev: Vec<Label> = fwd.iter().rev().copied().collect();
    for (reversed, word) in [(false, &fwd), (true, &rev)] {
        for r in 0..len {
            let at = |t: usize| word[(r + t) % len];
            let mut seen = BTreeSet::new();
            let distinct = (0..n).all(|t| seen.insert(at(t)));
            if !distinct {
                continue;
            }
            let mirrored = (0..n).all(|t| at(n + t) == at(n - 1 - t));
            if mirrored {
                return Some((reversed, r));
            }
        }
    }
    None
}

/// The non-anchor labels in nesting order along the anchor's rainbow word.
pub(crate) fn rainbow_order(code: &SignedCode, cut: (bool, usize)) -> Vec<Label> {
    let len = code.len();
    let word: Vec<Label> = if cut.0 {
        code.unsigned().into_iter().rev().collect()
    } else {
        code.unsigned()
    };
    (0..len / 2).map(|t| word[(cut.1 + t) % len]).collect()
}
