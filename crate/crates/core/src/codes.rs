//! Signed intersection codes: the core data model for arrangements of
//! pseudocircles, plus the elementary algebra on codes (restriction,
//! relabeling, reorientation, start rotation, arc decomposition).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of one pseudocircle. Zero is allowed (it is used for the
/// anchor circle of rainbow arrangements); labels must be unique within
/// an arrangement.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label(pub u32);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Side from which a crossing is entered: `Plus` records a crossing that
/// comes from the left side of the crossed circle, `Minus` from the right.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn from_char(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A single crossing event: which circle was crossed and from which side.
pub type Event = (Label, Sign);

/// The code of one pseudocircle: the crossing events met while traversing
/// the circle once from its distinguished start point. Events are stored
/// start-first, so index 0 is the traversal origin.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SignedCode {
    pub owner: Label,
    pub events: Vec<Event>,
}

impl SignedCode {
    pub fn new(owner: Label, events: Vec<Event>) -> SignedCode {
        SignedCode { owner, events }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Event labels with signs erased.
    pub fn unsigned(&self) -> Vec<Label> {
        self.events.iter().map(|&(l, _)| l).collect()
    }

    /// Code as seen when traversing in the opposite direction from the same
    /// start point: events reversed and every sign flipped.
    pub fn reversed_flipped(&self) -> SignedCode {
        let mut events: Vec<Event> = self
            .events
            .iter()
            .rev()
            .map(|&(l, s)| (l, s.flipped()))
            .collect();
        events.shrink_to_fit();
        SignedCode {
            owner: self.owner,
            events,
        }
    }

    /// Start advanced by `offset` events (cyclically).
    pub fn rotated(&self, offset: usize) -> SignedCode {
        if self.events.is_empty() {
            return self.clone();
        }
        let k = offset % self.events.len();
        let mut events = Vec::with_capacity(self.events.len());
        events.extend_from_slice(&self.events[k..]);
        events.extend_from_slice(&self.events[..k]);
        SignedCode {
            owner: self.owner,
            events,
        }
    }

    /// Indices of the two occurrences of `label`, in storage order.
    pub fn occurrences(&self, label: Label) -> Vec<usize> {
        self.events
            .iter()
            .enumerate()
            .filter(|(_, &(l, _))| l == label)
            .map(|(i, _)| i)
            .collect()
    }
}

impl fmt::Display for SignedCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.owner)?;
        for &(l, s) in &self.events {
            write!(f, " {}{}", l, s)?;
        }
        Ok(())
    }
}

/// Which side of the reference circle an arc of the owner lies on.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum SideTag {
    Left,
    Right,
}

impl SideTag {
    pub fn opposite(self) -> SideTag {
        match self {
            SideTag::Left => SideTag::Right,
            SideTag::Right => SideTag::Left,
        }
    }
}

impl fmt::Display for SideTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SideTag::Left => write!(f, "Left"),
            SideTag::Right => write!(f, "Right"),
        }
    }
}

/// One of the two arcs obtained by cutting a circle at its crossings with a
/// reference circle, together with the side of the reference it lies on.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Arc {
    pub side: SideTag,
    pub events: Vec<Event>,
}

impl Arc {
    /// True when both occurrences of `label` lie on this arc.
    pub fn holds_pair(&self, label: Label) -> bool {
        self.events.iter().filter(|&&(l, _)| l == label).count() == 2
    }
}

/// Decomposition of the owner's code by the two crossings with a reference
/// circle. `arcs[0]` follows the first occurrence of the reference in the
/// owner's stored code, `arcs[1]` the second. A crossing entered from the
/// reference's left (`Plus`) moves the owner to the reference's right side,
/// so the arc after a plus event is tagged `Right`.
#[derive(Clone, Debug)]
pub struct ArcView {
    pub owner: Label,
    pub reference: Label,
    pub arcs: [Arc; 2],
}

impl ArcView {
    /// The arc holding both occurrences of `label`, if the pair is unsplit.
    pub fn arc_holding_pair(&self, label: Label) -> Option<&Arc> {
        self.arcs.iter().find(|a| a.holds_pair(label))
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CodesError {
    #[error("label {0} is not a circle of the arrangement")]
    UnknownLabel(Label),
    #[error("restriction subset is empty")]
    EmptySubset,
    #[error("relabeling is not a bijection on the arrangement's labels")]
    NotABijection,
    #[error("duplicate circle label {0}")]
    DuplicateLabel(Label),
    #[error("owner and reference labels must differ (got {0})")]
    SameLabels(Label),
    #[error("code of circle {0} is malformed for this operation")]
    MalformedCode(Label),
}

/// A structural violation found by `Arrangement::validate`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Event list length differs from 2(n-1).
    WrongEventCount {
        circle: Label,
        expected: usize,
        found: usize,
    },
    /// A circle's own label occurs in its code.
    OwnerInOwnCode { circle: Label },
    /// An event names a label that is not a circle of the arrangement.
    UnknownEventLabel { circle: Label, label: Label },
    /// A foreign label occurs a number of times different from two.
    WrongOccurrenceCount {
        circle: Label,
        label: Label,
        count: usize,
    },
    /// The two occurrences of a label carry equal signs.
    EqualSigns { circle: Label, label: Label },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WrongEventCount {
                circle,
                expected,
                found,
            } => write!(
                f,
                "circle {}: expected {} events, found {}",
                circle, expected, found
            ),
            Violation::OwnerInOwnCode { circle } => {
                write!(f, "circle {}: its own label occurs in its code", circle)
            }
            Violation::UnknownEventLabel { circle, label } => write!(
                f,
                "circle {}: event label {} is not in the arrangement",
                circle, label
            ),
            Violation::WrongOccurrenceCount {
                circle,
                label,
                count,
            } => write!(
                f,
                "circle {}: label {} occurs {} times (expected 2)",
                circle, label, count
            ),
            Violation::EqualSigns { circle, label } => write!(
                f,
                "circle {}: the two occurrences of {} have equal signs",
                circle, label
            ),
        }
    }
}

/// Report-style output of validation: empty means pass.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pass() {
            write!(f, "pass")
        } else {
            for (i, v) in self.violations.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "{}", v)?;
            }
            Ok(())
        }
    }
}

/// A labelled family of signed codes, one per pseudocircle. Arrangements are
/// immutable values: every operation returns a new arrangement.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Arrangement {
    circles: BTreeMap<Label, SignedCode>,
}

impl Arrangement {
    pub fn new(codes: impl IntoIterator<Item = SignedCode>) -> Result<Arrangement, CodesError> {
        let mut circles = BTreeMap::new();
        for code in codes {
            let owner = code.owner;
            if circles.insert(owner, code).is_some() {
                return Err(CodesError::DuplicateLabel(owner));
            }
        }
        Ok(Arrangement { circles })
    }

    pub fn size(&self) -> usize {
        self.circles.len()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.circles.keys().copied().collect()
    }

    pub fn contains(&self, label: Label) -> bool {
        self.circles.contains_key(&label)
    }

    pub fn code(&self, label: Label) -> Option<&SignedCode> {
        self.circles.get(&label)
    }

    pub fn codes(&self) -> impl Iterator<Item = &SignedCode> {
        self.circles.values()
    }

    /// Checks every local invariant of the code model and reports all
    /// violations found (an empty report is a pass).
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.size();
        for (label, code) in &self.circles {
            let expected = 2 * (n - 1);
            if code.len() != expected {
                violations.push(Violation::WrongEventCount {
                    circle: *label,
                    expected,
                    found: code.len(),
                });
            }
            let mut seen: BTreeMap<Label, Vec<Sign>> = BTreeMap::new();
            for &(l, s) in &code.events {
                seen.entry(l).or_default().push(s);
            }
            if seen.contains_key(label) {
                violations.push(Violation::OwnerInOwnCode { circle: *label });
            }
            for (l, signs) in &seen {
                if *l == *label {
                    continue;
                }
                if !self.circles.contains_key(l) {
                    violations.push(Violation::UnknownEventLabel {
                        circle: *label,
                        label: *l,
                    });
                    continue;
                }
                if signs.len() != 2 {
                    violations.push(Violation::WrongOccurrenceCount {
                        circle: *label,
                        label: *l,
                        count: signs.len(),
                    });
                } else if signs[0] == signs[1] {
                    violations.push(Violation::EqualSigns {
                        circle: *label,
                        label: *l,
                    });
                }
            }
            // Missing labels show up as a wrong event count together with the
            // occurrence counts above; make them explicit anyway.
            for other in self.circles.keys() {
                if other != label && !seen.contains_key(other) {
                    violations.push(Violation::WrongOccurrenceCount {
                        circle: *label,
                        label: *other,
                        count: 0,
                    });
                }
            }
        }
        ValidationReport { violations }
    }

    /// Subarrangement on `subset`: retained circles keep their codes with all
    /// events of dropped labels deleted, order preserved. If the start event
    /// is deleted the start moves to the next surviving event.
    pub fn restrict(&self, subset: &BTreeSet<Label>) -> Result<Arrangement, CodesError> {
        if subset.is_empty() {
            return Err(CodesError::EmptySubset);
        }
        for l in subset {
            if !self.circles.contains_key(l) {
                return Err(CodesError::UnknownLabel(*l));
            }
        }
        let circles = self
            .circles
            .iter()
            .filter(|(l, _)| subset.contains(l))
            .map(|(l, code)| {
                let events = code
                    .events
                    .iter()
                    .filter(|(el, _)| subset.contains(el))
                    .copied()
                    .collect();
                (*l, SignedCode::new(*l, events))
            })
            .collect();
        Ok(Arrangement { circles })
    }

    /// Renames labels in keys and in every event; orders, signs and starts
    /// are untouched. `pi` must be a total bijection on the labels.
    pub fn relabel(&self, pi: &BTreeMap<Label, Label>) -> Result<Arrangement, CodesError> {
        let mut image = BTreeSet::new();
        for l in self.circles.keys() {
            match pi.get(l) {
                Some(t) => {
                    if !image.insert(*t) {
                        return Err(CodesError::NotABijection);
                    }
                }
                None => return Err(CodesError::NotABijection),
            }
        }
        let circles = self
            .circles
            .iter()
            .map(|(l, code)| {
                let owner = pi[l];
                let events = code.events.iter().map(|&(el, s)| (pi[&el], s)).collect();
                (owner, SignedCode::new(owner, events))
            })
            .collect();
        Ok(Arrangement { circles })
    }

    /// Reverses the orientation of circle `c`: its own event list is reversed
    /// with every sign flipped, and both occurrences of `c` in every other
    /// code flip sign.
    pub fn reorient(&self, c: Label) -> Result<Arrangement, CodesError> {
        if !self.circles.contains_key(&c) {
            return Err(CodesError::UnknownLabel(c));
        }
        let circles = self
            .circles
            .iter()
            .map(|(l, code)| {
                let new_code = if *l == c {
                    code.reversed_flipped()
                } else {
                    let events = code
                        .events
                        .iter()
                        .map(|&(el, s)| if el == c { (el, s.flipped()) } else { (el, s) })
                        .collect();
                    SignedCode::new(*l, events)
                };
                (*l, new_code)
            })
            .collect();
        Ok(Arrangement { circles })
    }

    /// Advances the start of circle `c` by `offset` events, cyclically.
    pub fn rotate_start(&self, c: Label, offset: i64) -> Result<Arrangement, CodesError> {
        let code = self
            .circles
            .get(&c)
            .ok_or(CodesError::UnknownLabel(c))?;
        let len = code.len() as i64;
        let k = if len == 0 { 0 } else { offset.rem_euclid(len) as usize };
        let mut circles = self.circles.clone();
        circles.insert(c, code.rotated(k));
        Ok(Arrangement { circles })
    }

    /// Cuts the owner's cyclic code at its two crossings with `reference`.
    pub fn arcs(&self, owner: Label, reference: Label) -> Result<ArcView, CodesError> {
        if owner == reference {
            return Err(CodesError::SameLabels(owner));
        }
        let code = self
            .circles
            .get(&owner)
            .ok_or(CodesError::UnknownLabel(owner))?;
        if !self.circles.contains_key(&reference) {
            return Err(CodesError::UnknownLabel(reference));
        }
        let occ = code.occurrences(reference);
        if occ.len() != 2 {
            return Err(CodesError::MalformedCode(owner));
        }
        let (p, q) = (occ[0], occ[1]);
        let side_after = |sign: Sign| match sign {
            Sign::Plus => SideTag::Right,
            Sign::Minus => SideTag::Left,
        };
        let first = Arc {
            side: side_after(code.events[p].1),
            events: code.events[p + 1..q].to_vec(),
        };
        let mut wrap = code.events[q + 1..].to_vec();
        wrap.extend_from_slice(&code.events[..p]);
        let second = Arc {
            side: side_after(code.events[q].1),
            events: wrap,
        };
        Ok(ArcView {
            owner,
            reference,
            arcs: [first, second],
        })
    }

    /// Image under an orientation-reversing homeomorphism of the sphere:
    /// every code reversed and every sign flipped. Involution.
    pub fn mirrored(&self) -> Arrangement {
        let circles = self
            .circles
            .iter()
            .map(|(l, code)| {
                let events = code
                    .events
                    .iter()
                    .rev()
                    .map(|&(el, s)| (el, s.flipped()))
                    .collect();
                (*l, SignedCode::new(*l, events))
            })
            .collect();
        Arrangement { circles }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{gen_c1, gen_c2, gen_c3};
    use crate::format;

    fn arr(text: &str) -> Arrangement {
        format::parse_text(text).unwrap()
    }

    fn set(labels: &[u32]) -> BTreeSet<Label> {
        labels.iter().map(|&l| Label(l)).collect()
    }

    #[test]
    fn validate_accepts_generated_families() {
        for m in 1..=9 {
            assert!(gen_c1(m).unwrap().validate().is_pass(), "C1_{}", m);
            assert!(gen_c2(m).unwrap().validate().is_pass(), "C2_{}", m);
            assert!(gen_c3(m).unwrap().validate().is_pass(), "C3_{}", m);
        }
    }

    #[test]
    fn validate_accepts_single_circle() {
        let a = Arrangement::new([SignedCode::new(Label(1), vec![])]).unwrap();
        assert!(a.validate().is_pass());
    }

    #[test]
    fn validate_rejects_broken_sign_rule() {
        let mut codes: Vec<SignedCode> = gen_c2(5).unwrap().codes().cloned().collect();
        // flip one sign of circle 3's first event, breaking the opposite-sign rule
        for code in &mut codes {
            if code.owner == Label(3) {
                code.events[0].1 = code.events[0].1.flipped();
            }
        }
        let broken = Arrangement::new(codes).unwrap();
        let report = broken.validate();
        assert!(!report.is_pass());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::EqualSigns { circle: Label(3), label: Label(1) })));
    }

    #[test]
    fn restrict_prefix_of_c2_is_smaller_c2_verbatim() {
        let big = gen_c2(5).unwrap();
        let small = gen_c2(3).unwrap();
        let restricted = big.restrict(&set(&[1, 2, 3])).unwrap();
        assert_eq!(restricted, small);
    }

    #[test]
    fn restrict_full_set_is_identity() {
        let a = gen_c3(4).unwrap();
        let all: BTreeSet<Label> = a.labels().into_iter().collect();
        assert_eq!(a.restrict(&all).unwrap(), a);
    }

    #[test]
    fn restrict_to_singleton_gives_empty_code() {
        let a = gen_c3(5).unwrap();
        let r = a.restrict(&set(&[3])).unwrap();
        assert_eq!(r.size(), 1);
        assert!(r.code(Label(3)).unwrap().is_empty());
    }

    #[test]
    fn restrict_unknown_label_errors() {
        let a = gen_c2(3).unwrap();
        assert_eq!(
            a.restrict(&set(&[1, 7])),
            Err(CodesError::UnknownLabel(Label(7)))
        );
    }

    #[test]
    fn relabel_identity_is_identity() {
        let a = gen_c2(4).unwrap();
        let pi: BTreeMap<Label, Label> = a.labels().into_iter().map(|l| (l, l)).collect();
        assert_eq!(a.relabel(&pi).unwrap(), a);
    }

    #[test]
    fn relabel_swap_renames_events() {
        let a = arr("1: 2+ 2-\n2: 1- 1+\n");
        let pi: BTreeMap<Label, Label> =
            [(Label(1), Label(2)), (Label(2), Label(1))].into_iter().collect();
        let b = a.relabel(&pi).unwrap();
        assert_eq!(b.code(Label(2)).unwrap().events, vec![(Label(1), Sign::Plus), (Label(1), Sign::Minus)]);
        assert_eq!(b.code(Label(1)).unwrap().events, vec![(Label(2), Sign::Minus), (Label(2), Sign::Plus)]);
    }

    #[test]
    fn relabel_non_bijective_errors() {
        let a = gen_c2(3).unwrap();
        let pi: BTreeMap<Label, Label> = [
            (Label(1), Label(1)),
            (Label(2), Label(1)),
            (Label(3), Label(3)),
        ]
        .into_iter()
        .collect();
        assert_eq!(a.relabel(&pi), Err(CodesError::NotABijection));
    }

    #[test]
    fn reorient_twice_is_identity() {
        let a = gen_c3(5).unwrap();
        let b = a.reorient(Label(2)).unwrap().reorient(Label(2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reorient_worked_example() {
        // circle 1 of C2_3 is 2-3-3+2+; reversing it gives 2+3+3-2- which
        // flips back to 2-3-3+2+, while the other circles flip their 1-events.
        let a = gen_c2(3).unwrap();
        let b = a.reorient(Label(1)).unwrap();
        assert_eq!(format!("{}", b.code(Label(1)).unwrap()), "1: 2- 3- 3+ 2+");
        assert_eq!(format!("{}", b.code(Label(2)).unwrap()), "2: 1- 3- 3+ 1+");
        assert_eq!(format!("{}", b.code(Label(3)).unwrap()), "3: 1- 2+ 2- 1+");
        assert!(b.validate().is_pass());
    }

    #[test]
    fn rotate_start_examples() {
        let a = gen_c2(5).unwrap();
        assert_eq!(a.rotate_start(Label(3), 0).unwrap(), a);
        assert_eq!(a.rotate_start(Label(3), 8).unwrap(), a);
        let rotated = a.rotate_start(Label(3), 2).unwrap();
        assert_eq!(
            format!("{}", rotated.code(Label(3)).unwrap()),
            "3: 4- 5- 5+ 4+ 2- 1- 1+ 2+"
        );
        // negative offsets rotate backwards
        let back = rotated.rotate_start(Label(3), -2).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn arcs_worked_example() {
        let a = gen_c2(5).unwrap();
        let view = a.arcs(Label(3), Label(1)).unwrap();
        assert_eq!(view.arcs[0].side, SideTag::Right);
        assert_eq!(view.arcs[1].side, SideTag::Left);
        let unsigned: Vec<u32> = view.arcs[0].events.iter().map(|&(l, _)| l.0).collect();
        assert_eq!(unsigned, vec![2, 4, 5, 5, 4, 2]);
        let signs: Vec<char> = view.arcs[0].events.iter().map(|&(_, s)| s.as_char()).collect();
        assert_eq!(signs, vec!['+', '-', '-', '+', '+', '-']);
        assert!(view.arcs[1].events.is_empty());
    }

    #[test]
    fn arcs_two_circles_gives_empty_arcs() {
        let a = arr("1: 2+ 2-\n2: 1- 1+\n");
        let view = a.arcs(Label(1), Label(2)).unwrap();
        assert!(view.arcs[0].events.is_empty());
        assert!(view.arcs[1].events.is_empty());
        assert_ne!(view.arcs[0].side, view.arcs[1].side);
    }

    #[test]
    fn arcs_side_tag_symmetry_brute_force() {
        // for any pair i,j and reference r: when both pairs of events are
        // unsplit, the tag of i's arc holding the j-events matches the tag of
        // j's arc holding the i-events
        for a in [gen_c2(6).unwrap(), gen_c3(6).unwrap(), gen_c1(6).unwrap()] {
            let labels = a.labels();
            for &r in &labels {
                for &i in &labels {
                    for &j in &labels {
                        if i == j || i == r || j == r {
                            continue;
                        }
                        let vi = a.arcs(i, r).unwrap();
                        let vj = a.arcs(j, r).unwrap();
                        if let (Some(ai), Some(aj)) =
                            (vi.arc_holding_pair(j), vj.arc_holding_pair(i))
                        {
                            assert_eq!(ai.side, aj.side, "i={} j={} r={}", i, j, r);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mirror_is_involution() {
        let a = gen_c2(5).unwrap();
        assert_eq!(a.mirrored().mirrored(), a);
        assert!(a.mirrored().validate().is_pass());
    }
}
