//! Geometric ingestion: real plane circles to exact intersection codes, and
//! real line families to wiring diagrams. These are the oracles the
//! combinatorial modules are tested against.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::codes::{Arrangement, Label, Sign, SignedCode};
use crate::pseudolines::WiringDiagram;

/// A concrete circle in the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneCircle {
    pub label: Label,
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl PlaneCircle {
    pub fn new(label: u32, cx: f64, cy: f64, r: f64) -> PlaneCircle {
        PlaneCircle {
            label: Label(label),
            cx,
            cy,
            r,
        }
    }

    fn center_distance(&self, other: &PlaneCircle) -> f64 {
        ((self.cx - other.cx).powi(2) + (self.cy - other.cy).powi(2)).sqrt()
    }

    /// The two proper intersection points with another circle, if the pair
    /// crosses twice.
    pub fn intersections(&self, other: &PlaneCircle) -> Option<[(f64, f64); 2]> {
        let d = self.center_distance(other);
        if d >= self.r + other.r || d <= (self.r - other.r).abs() || d == 0.0 {
            return None;
        }
        let a = (d * d + self.r * self.r - other.r * other.r) / (2.0 * d);
        let h2 = self.r * self.r - a * a;
        if h2 <= 0.0 {
            return None;
        }
        let h = h2.sqrt();
        let ux = (other.cx - self.cx) / d;
        let uy = (other.cy - self.cy) / d;
        let bx = self.cx + a * ux;
        let by = self.cy + a * uy;
        Some([
            (bx + h * -uy, by + h * ux),
            (bx - h * -uy, by - h * ux),
        ])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GpViolation {
    /// Centers and radii agree within eps.
    Coincident { a: Label, b: Label },
    /// Center distance within eps of a tangency configuration.
    Tangency { a: Label, b: Label, margin: f64 },
    /// Disjoint or nested pair: the circles do not cross twice.
    NotTwiceCrossing { a: Label, b: Label, margin: f64 },
    /// Intersection points of two distinct pairs within eps of each other.
    TriplePoint {
        first: (Label, Label),
        second: (Label, Label),
        distance: f64,
    },
}

impl std::fmt::Display for GpViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GpViolation::Coincident { a, b } => write!(f, "circles {} and {} coincide", a, b),
            GpViolation::Tangency { a, b, margin } => {
                write!(f, "circles {} and {} are tangent within {:.3e}", a, b, margin)
            }
            GpViolation::NotTwiceCrossing { a, b, margin } => write!(
                f,
                "circles {} and {} do not cross twice (margin {:.3e})",
                a, b, margin
            ),
            GpViolation::TriplePoint {
                first,
                second,
                distance,
            } => write!(
                f,
                "near-common point of pairs ({},{}) and ({},{}) at distance {:.3e}",
                first.0, first.1, second.0, second.1, distance
            ),
        }
    }
}

/// Violations found by the general-position check; ingestion requires an
/// empty report.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GeneralPositionReport {
    pub violations: Vec<GpViolation>,
}

impl GeneralPositionReport {
    pub fn is_pass(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for GeneralPositionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_pass() {
            return write!(f, "pass");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", v)?;
        }
        Ok(())
    }
}

#[derive(Error, Debug)]
pub enum GeometryError {
    #[error("duplicate circle label {0}")]
    DuplicateLabel(Label),
    #[error("input is not in general position:\n{0}")]
    GeneralPosition(GeneralPositionReport),
    #[error("lines {0} and {1} have equal slopes within eps")]
    ParallelLines(usize, usize),
    #[error("crossings too close in abscissa around x = {0}")]
    NearCoincidentCrossings(f64),
    #[error("circle input is malformed: {0}")]
    BadInput(String),
}

/// Flags tangencies, non-crossing pairs and near-triple points, with the
/// given tolerance on distances.
pub fn check_general_position(
    circles: &[PlaneCircle],
    eps: f64,
) -> Result<GeneralPositionReport, GeometryError> {
    let mut seen = BTreeMap::new();
    for c in circles {
        if seen.insert(c.label, ()).is_some() {
            return Err(GeometryError::DuplicateLabel(c.label));
        }
    }
    let mut violations = Vec::new();
    for (i, a) in circles.iter().enumerate() {
        for b in &circles[i + 1..] {
            let d = a.center_distance(b);
            let sum = a.r + b.r;
            let diff = (a.r - b.r).abs();
            if d <= eps && diff <= eps {
                violations.push(GpViolation::Coincident { a: a.label, b: b.label });
                continue;
            }
            let margin = (d - diff).abs().min((d - sum).abs());
            if margin <= eps {
                violations.push(GpViolation::Tangency {
                    a: a.label,
                    b: b.label,
                    margin,
                });
            } else if d >= sum || d <= diff {
                violations.push(GpViolation::NotTwiceCrossing {
                    a: a.label,
                    b: b.label,
                    margin,
                });
            }
        }
    }
    // near-common points of distinct pairs
    let mut points: Vec<((Label, Label), (f64, f64))> = Vec::new();
    for (i, a) in circles.iter().enumerate() {
        for b in &circles[i + 1..] {
            if let Some(ps) = a.intersections(b) {
                for p in ps {
                    points.push(((a.label, b.label), p));
                }
            }
        }
    }
    for (i, (pair_a, pa)) in points.iter().enumerate() {
        for (pair_b, pb) in &points[i + 1..] {
            if pair_a == pair_b {
                continue;
            }
            let dist = ((pa.0 - pb.0).powi(2) + (pa.1 - pb.1).powi(2)).sqrt();
            if dist <= eps {
                violations.push(GpViolation::TriplePoint {
                    first: *pair_a,
                    second: *pair_b,
                    distance: dist,
                });
            }
        }
    }
    Ok(GeneralPositionReport { violations })
}

/// Ingests plane circles into an arrangement of signed codes. Every circle
/// is traversed counterclockwise from its leftmost point; an event is plus
/// exactly when the traversal crosses the other circle coming from its
/// interior side (counterclockwise interior-is-left).
pub fn circles_to_arrangement(
    circles: &[PlaneCircle],
    eps: f64,
) -> Result<Arrangement, GeometryError> {
    let report = check_general_position(circles, eps)?;
    if !report.is_pass() {
        return Err(GeometryError::GeneralPosition(report));
    }
    let codes: Vec<SignedCode> = circles
        .iter()
        .map(|c| SignedCode::new(c.label, circle_events(c, circles)))
        .collect();
    let arr = Arrangement::new(codes)
        .map_err(|e| GeometryError::BadInput(e.to_string()))?;
    debug_assert!(arr.validate().is_pass());
    Ok(arr)
}

/// Events of one circle, sorted by counterclockwise angle from the leftmost
/// point. Angle comparison uses half-plane splitting and cross-product signs
/// on coordinate differences; under the general-position margins no
/// comparison is close to a tie.
fn circle_events(c: &PlaneCircle, circles: &[PlaneCircle]) -> Vec<(Label, Sign)> {
    struct Ev {
        key_half: u8,
        w: (f64, f64),
        label: Label,
        sign: Sign,
    }
    let mut events: Vec<Ev> = Vec::new();
    for other in circles {
        if other.label == c.label {
            continue;
        }
        let Some(points) = c.intersections(other) else {
            continue;
        };
        for p in points {
            let v = (p.0 - c.cx, p.1 - c.cy);
            // ccw angle measured from the leftmost point's direction (-1, 0):
            // equivalently the standard angle of -v from (+1, 0)
            let w = (-v.0, -v.1);
            let key_half = if w.1 > 0.0 || (w.1 == 0.0 && w.0 > 0.0) {
                0
            } else {
                1
            };
            // tangent of the ccw traversal at p
            let t = (-v.1, v.0);
            let outward = t.0 * (p.0 - other.cx) + t.1 * (p.1 - other.cy);
            let sign = if outward > 0.0 { Sign::Plus } else { Sign::Minus };
            events.push(Ev {
                key_half,
                w,
                label: other.label,
                sign,
            });
        }
    }
    events.sort_by(|a, b| {
        a.key_half.cmp(&b.key_half).then_with(|| {
            let cross = a.w.0 * b.w.1 - a.w.1 * b.w.0;
            if cross > 0.0 {
                std::cmp::Ordering::Less
            } else if cross < 0.0 {
                std::cmp::Ordering::Greater
            } else {
                a.label.cmp(&b.label)
            }
        })
    });
    events.into_iter().map(|e| (e.label, e.sign)).collect()
}

/// Wiring diagram of the line family y = a x + b. Wires are numbered by
/// ascending slope (the top line at x -> -inf is the one with the smallest
/// slope); swaps are ordered by crossing abscissa.
pub fn lines_to_wiring(
    lines: &[(f64, f64)],
    eps: f64,
) -> Result<WiringDiagram, GeometryError> {
    let n = lines.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| lines[i].0.total_cmp(&lines[j].0));
    for w in order.windows(2) {
        if (lines[w[0]].0 - lines[w[1]].0).abs() <= eps {
            return Err(GeometryError::ParallelLines(w[0] + 1, w[1] + 1));
        }
    }
    // wire w = w-th line by ascending slope
    let rank: BTreeMap<usize, usize> = order.iter().enumerate().map(|(r, &i)| (i, r + 1)).collect();
    let mut crossings: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (ai, bi) = lines[i];
            let (aj, bj) = lines[j];
            let x = -(bi - bj) / (ai - aj);
            let (wi, wj) = (rank[&i], rank[&j]);
            crossings.push((x, wi.min(wj), wi.max(wj)));
        }
    }
    crossings.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    // concurrent lines show up as close crossings sharing a wire
    for w in crossings.windows(2) {
        let (x1, a1, b1) = w[0];
        let (x2, a2, b2) = w[1];
        if (x2 - x1).abs() <= eps && (a1 == a2 || a1 == b2 || b1 == a2 || b1 == b2) {
            return Err(GeometryError::NearCoincidentCrossings(x1));
        }
    }
    let mut current: Vec<usize> = (1..=n).collect();
    let mut swaps = Vec::with_capacity(crossings.len());
    for &(x, a, b) in &crossings {
        let pa = current.iter().position(|&w| w == a).expect("wire present");
        let pb = current.iter().position(|&w| w == b).expect("wire present");
        let (hi, lo) = (pa.min(pb), pa.max(pb));
        if lo != hi + 1 {
            return Err(GeometryError::NearCoincidentCrossings(x));
        }
        swaps.push(hi + 1);
        current.swap(hi, lo);
    }
    Ok(WiringDiagram { n, swaps })
}

/// Circle input format: one circle per line, `label cx cy r`.
pub fn parse_circles(input: &str) -> Result<Vec<PlaneCircle>, GeometryError> {
    let mut out = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(GeometryError::BadInput(format!(
                "line {}: expected `label cx cy r`",
                idx + 1
            )));
        }
        let label: u32 = fields[0]
            .parse()
            .map_err(|_| GeometryError::BadInput(format!("line {}: bad label", idx + 1)))?;
        let nums: Vec<f64> = fields[1..]
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| GeometryError::BadInput(format!("line {}: bad number", idx + 1)))?;
        if nums[2] <= 0.0 {
            return Err(GeometryError::BadInput(format!(
                "line {}: radius must be positive",
                idx + 1
            )));
        }
        out.push(PlaneCircle::new(label, nums[0], nums[1], nums[2]));
    }
    if out.is_empty() {
        return Err(GeometryError::BadInput("no circles found".into()));
    }
    Ok(out)
}

pub fn emit_circles(circles: &[PlaneCircle]) -> String {
    let mut out = String::new();
    for c in circles {
        out.push_str(&format!("{} {} {} {}\n", c.label, c.cx, c.cy, c.r));
    }
    out
}

/// Point/arc lists for external plotting: per circle its geometry and its
/// angle-ordered crossing points.
pub fn plot_data(circles: &[PlaneCircle]) -> serde_json::Value {
    let entries: Vec<serde_json::Value> = circles
        .iter()
        .map(|c| {
            let mut points: Vec<serde_json::Value> = Vec::new();
            for other in circles {
                if other.label == c.label {
                    continue;
                }
                if let Some(ps) = c.intersections(other) {
                    for p in ps {
                        points.push(serde_json::json!({
                            "with": other.label.0,
                            "x": p.0,
                            "y": p.1,
                        }));
                    }
                }
            }
            serde_json::json!({
                "label": c.label.0,
                "cx": c.cx,
                "cy": c.cy,
                "r": c.r,
                "crossings": points,
            })
        })
        .collect();
    serde_json::json!({ "circles": entries })
}

/// Margin used by the samplers so that sampled configurations stay far from
/// the general-position boundary.
const SAMPLE_MARGIN: f64 = 1e-3;

/// Deterministic sampler of pairwise-crossing circle sets in general
/// position: circles are added one at a time with rejection, restarting the
/// set when a circle cannot be placed. Labels run 1..=n.
pub fn sample_arrangement(n: usize, seed: u64) -> Vec<PlaneCircle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'restart: loop {
        let mut placed: Vec<PlaneCircle> = Vec::with_capacity(n);
        for label in 1..=n {
            let mut attempts = 0;
            loop {
                attempts += 1;
                if attempts > 400 {
                    continue 'restart;
                }
                let cand = PlaneCircle::new(
                    label as u32,
                    rng.gen_range(0.0..1.0),
                    rng.gen_range(0.0..1.0),
                    rng.gen_range(1.25..1.55),
                );
                if compatible(&cand, &placed) {
                    placed.push(cand);
                    break;
                }
            }
        }
        return placed;
    }
}

/// As `sample_arrangement` but with loose parameters suited to size-3
/// samples, so that both triple classes occur.
pub fn sample_triple(seed: u64) -> Vec<PlaneCircle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'restart: loop {
        let mut placed: Vec<PlaneCircle> = Vec::with_capacity(3);
        for label in 1..=3u32 {
            let mut attempts = 0;
            loop {
                attempts += 1;
                if attempts > 400 {
                    continue 'restart;
                }
                let cand = PlaneCircle::new(
                    label,
                    rng.gen_range(0.0..1.2),
                    rng.gen_range(0.0..1.2),
                    rng.gen_range(0.7..1.3),
                );
                if compatible(&cand, &placed) {
                    placed.push(cand);
                    break;
                }
            }
        }
        return placed;
    }
}

fn compatible(cand: &PlaneCircle, placed: &[PlaneCircle]) -> bool {
    for c in placed {
        let d = cand.center_distance(c);
        let sum = cand.r + c.r;
        let diff = (cand.r - c.r).abs();
        if d <= diff + SAMPLE_MARGIN || d >= sum - SAMPLE_MARGIN {
            return false;
        }
    }
    // keep new intersection points clear of existing ones
    let mut new_points = Vec::new();
    for c in placed {
        if let Some(ps) = cand.intersections(c) {
            new_points.extend(ps);
        }
    }
    let mut old_points = Vec::new();
    for (i, a) in placed.iter().enumerate() {
        for b in &placed[i + 1..] {
            if let Some(ps) = a.intersections(b) {
                old_points.extend(ps);
            }
        }
    }
    for (i, p) in new_points.iter().enumerate() {
        for q in new_points[i + 1..].iter().chain(old_points.iter()) {
            let d2 = (p.0 - q.0).powi(2) + (p.1 - q.1).powi(2);
            if d2 <= SAMPLE_MARGIN * SAMPLE_MARGIN {
                return false;
            }
        }
    }
    true
}

/// Random arrangements of great circles, brought to the plane by
/// stereographic projection: the great circle with unit normal (a,b,c)
/// projects to the circle with center (-a/c, -b/c) and radius 1/|c|.
/// All triples of the result classify Krupp.
pub fn sample_great_circles(n: usize, seed: u64) -> Vec<PlaneCircle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut circles = Vec::with_capacity(n);
        for label in 1..=n {
            loop {
                let x: f64 = rng.gen_range(-1.0..1.0);
                let y: f64 = rng.gen_range(-1.0..1.0);
                let z: f64 = rng.gen_range(-1.0..1.0);
                let norm = (x * x + y * y + z * z).sqrt();
                if norm < 1e-3 || norm > 1.0 {
                    continue;
                }
                let (a, b, c) = (x / norm, y / norm, z / norm);
                if c.abs() < 0.25 {
                    continue;
                }
                circles.push(PlaneCircle::new(label as u32, -a / c, -b / c, 1.0 / c.abs()));
                break;
            }
        }
        if check_general_position(&circles, SAMPLE_MARGIN * 1e-3)
            .map(|r| r.is_pass())
            .unwrap_or(false)
        {
            return circles;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{classify_triple, gen_c1, gen_c2, gen_c3, TripleClass};
    use crate::isomorphism::is_isomorphic;
    use crate::pseudolines::gen_cyclic;

    fn collinear_congruent(n: usize) -> Vec<PlaneCircle> {
        (1..=n)
            .map(|i| PlaneCircle::new(i as u32, 0.3 * i as f64, 0.0, 1.0))
            .collect()
    }

    #[test]
    fn general_position_examples() {
        let ok = [
            PlaneCircle::new(1, 0.0, 0.0, 1.0),
            PlaneCircle::new(2, 1.0, 0.0, 1.0),
        ];
        assert!(check_general_position(&ok, 1e-9).unwrap().is_pass());

        let tangent = [
            PlaneCircle::new(1, 0.0, 0.0, 1.0),
            PlaneCircle::new(2, 2.0, 0.0, 1.0),
        ];
        let report = check_general_position(&tangent, 1e-9).unwrap();
        assert!(matches!(report.violations[0], GpViolation::Tangency { .. }));

        let disjoint = [
            PlaneCircle::new(1, 0.0, 0.0, 1.0),
            PlaneCircle::new(2, 3.0, 0.0, 1.0),
        ];
        let report = check_general_position(&disjoint, 1e-9).unwrap();
        assert!(matches!(
            report.violations[0],
            GpViolation::NotTwiceCrossing { .. }
        ));
    }

    #[test]
    fn duplicate_labels_error() {
        let dup = [
            PlaneCircle::new(1, 0.0, 0.0, 1.0),
            PlaneCircle::new(1, 1.0, 0.0, 1.0),
        ];
        assert!(matches!(
            check_general_position(&dup, 1e-9),
            Err(GeometryError::DuplicateLabel(Label(1)))
        ));
    }

    #[test]
    fn worked_example_reproduced_end_to_end() {
        let arr = circles_to_arrangement(&collinear_congruent(5), 1e-9).unwrap();
        assert!(arr.validate().is_pass());
        assert_eq!(
            format!("{}", arr.code(Label(3)).unwrap()),
            "3: 1+ 2+ 4- 5- 5+ 4+ 2- 1-"
        );
        // the whole ingestion is the row arrangement, codes verbatim
        assert_eq!(arr, gen_c2(5).unwrap());
    }

    #[test]
    fn two_circle_first_event_sign() {
        // leftmost point of circle 1 lies outside circle 2, so the first
        // crossing comes from outside: a minus event
        let arr = circles_to_arrangement(
            &[
                PlaneCircle::new(1, 0.0, 0.0, 1.0),
                PlaneCircle::new(2, 1.0, 0.0, 1.0),
            ],
            1e-9,
        )
        .unwrap();
        assert_eq!(arr.code(Label(1)).unwrap().events[0], (Label(2), Sign::Minus));
    }

    /// The standard C3 realization: disks hanging below the line y = 1 with
    /// geometrically growing radii and tips at distinct abscissas, so each
    /// circle pokes up through all larger ones at its own spot.
    pub(crate) fn nested_offset_chain(n: usize) -> Vec<PlaneCircle> {
        (1..=n)
            .map(|k| {
                let r = 8f64.powi(k as i32);
                PlaneCircle::new(k as u32, k as f64, 1.0 - r, r)
            })
            .collect()
    }

    #[test]
    fn nested_offset_chain_is_c3() {
        let arr = circles_to_arrangement(&nested_offset_chain(5), 1e-9).unwrap();
        assert!(is_isomorphic(&arr, &gen_c3(5).unwrap()).unwrap().is_some());
        // a near-concentric growing chain is inversively the row and comes
        // out as C2, not C3
        let concentric: Vec<PlaneCircle> = (1..=5)
            .map(|i| PlaneCircle::new(i as u32, i as f64, 0.0, 0.9 * i as f64 + 10.0))
            .collect();
        let arr2 = circles_to_arrangement(&concentric, 1e-9).unwrap();
        assert!(is_isomorphic(&arr2, &gen_c2(5).unwrap()).unwrap().is_some());
    }

    #[test]
    fn venn_triple_is_krupp() {
        let circles: Vec<PlaneCircle> = (0..3)
            .map(|i| {
                let angle = 2.0 * std::f64::consts::PI * i as f64 / 3.0;
                PlaneCircle::new(i as u32 + 1, 0.6 * angle.cos(), 0.6 * angle.sin(), 1.0)
            })
            .collect();
        let arr = circles_to_arrangement(&circles, 1e-9).unwrap();
        assert_eq!(classify_triple(&arr).unwrap(), TripleClass::Krupp);
        assert!(is_isomorphic(&arr, &gen_c1(3).unwrap()).unwrap().is_some());
    }

    #[test]
    fn perturbation_stability() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let base = collinear_congruent(5);
        let reference = circles_to_arrangement(&base, 1e-9).unwrap();
        for _ in 0..5 {
            let jittered: Vec<PlaneCircle> = base
                .iter()
                .map(|c| PlaneCircle {
                    label: c.label,
                    cx: c.cx + rng.gen_range(-1e-6..1e-6),
                    cy: c.cy + rng.gen_range(-1e-6..1e-6),
                    r: c.r,
                })
                .collect();
            let arr = circles_to_arrangement(&jittered, 1e-9).unwrap();
            assert_eq!(arr, reference);
        }
    }

    #[test]
    fn line_family_matches_cyclic() {
        for m in 2..=7usize {
            let lines: Vec<(f64, f64)> = (1..=m)
                .map(|i| (2.0 * i as f64, -((i * i) as f64)))
                .collect();
            let w = lines_to_wiring(&lines, 1e-9).unwrap();
            assert_eq!(w.meet_order(), gen_cyclic(m).unwrap().meet_order());
        }
    }

    #[test]
    fn two_lines_single_swap() {
        let w = lines_to_wiring(&[(0.0, 0.0), (1.0, -1.0)], 1e-9).unwrap();
        assert_eq!(w.swaps, vec![1]);
    }

    #[test]
    fn equal_slopes_error() {
        assert!(matches!(
            lines_to_wiring(&[(1.0, 0.0), (1.0, 5.0)], 1e-9),
            Err(GeometryError::ParallelLines(_, _))
        ));
    }

    #[test]
    fn concurrent_lines_error() {
        // three lines through the origin
        let lines = [(1.0, 0.0), (2.0, 0.0), (3.0, 0.0)];
        assert!(matches!(
            lines_to_wiring(&lines, 1e-9),
            Err(GeometryError::NearCoincidentCrossings(_))
        ));
    }

    #[test]
    fn sampled_arrangements_ingest_cleanly() {
        for seed in 0..10 {
            let circles = sample_arrangement(6, seed);
            let arr = circles_to_arrangement(&circles, 1e-9).unwrap();
            assert!(arr.validate().is_pass());
            assert_eq!(arr.size(), 6);
        }
    }

    #[test]
    fn sampled_triples_cover_both_classes() {
        let mut krupp = 0;
        let mut nonkrupp = 0;
        for seed in 0..60 {
            let arr = circles_to_arrangement(&sample_triple(seed), 1e-9).unwrap();
            match classify_triple(&arr).unwrap() {
                TripleClass::Krupp => krupp += 1,
                TripleClass::NonKrupp => nonkrupp += 1,
            }
        }
        assert!(krupp > 0, "no Krupp triples sampled");
        assert!(nonkrupp > 0, "no NonKrupp triples sampled");
    }

    #[test]
    fn great_circle_samples_are_krupp_packed_and_double_back() {
        use crate::ramsey::combinations;
        for seed in 0..5 {
            let circles = sample_great_circles(5, seed);
            let arr = circles_to_arrangement(&circles, 1e-12).unwrap();
            for t in combinations(&arr.labels(), 3) {
                assert_eq!(
                    crate::families::classify_triple_in(&arr, t[0], t[1], t[2]).unwrap(),
                    TripleClass::Krupp
                );
            }
        }
    }

    #[test]
    fn great_circle_realization_of_cyclic_matches_c1() {
        // stereographic images of the doubled cyclic family: realize the
        // cyclic line family on the sphere via normals n_i = (sin t_i, 0,
        // cos t_i)-style fans and check the ingested arrangement against the
        // doubling construction
        let n = 5;
        let circles: Vec<PlaneCircle> = (1..=n)
            .map(|i| {
                // tilt angles chosen increasing; any generic monotone fan of
                // planes through a common-ish axis realizes the cyclic order
                let t = 0.35 + 0.22 * i as f64;
                let (a, b, c) = (t.sin(), 0.08 * i as f64, t.cos());
                let norm = (a * a + b * b + c * c).sqrt();
                let (a, b, c) = (a / norm, b / norm, c / norm);
                PlaneCircle::new(i as u32, -a / c, -b / c, 1.0 / c.abs())
            })
            .collect();
        let arr = circles_to_arrangement(&circles, 1e-12).unwrap();
        assert!(is_isomorphic(&arr, &gen_c1(n as u32).unwrap())
            .unwrap()
            .is_some());
    }

    #[test]
    fn circle_text_round_trip() {
        let circles = collinear_congruent(3);
        let text = emit_circles(&circles);
        let parsed = parse_circles(&text).unwrap();
        assert_eq!(parsed, circles);
        assert!(parse_circles("1 0 0 -1\n").is_err());
    }
}
