use pseudocircles::codes::{Label, Sign, SignedCode, Arrangement};
use pseudocircles::format;
use pseudocircles::geometry::*;

// independent code computation: collect crossing angles, then walk arc
// midpoints and derive events from interior-membership flips
fn codes_by_membership(circles: &[PlaneCircle]) -> Arrangement {
    let mut out = Vec::new();
    for c in circles {
        let mut crossings: Vec<(f64, Label)> = Vec::new();
        for other in circles {
            if other.label == c.label { continue; }
            if let Some(ps) = c.intersections(other) {
                for p in ps {
                    let ang = (p.1 - c.cy).atan2(p.0 - c.cx);
                    // ccw angle from the leftmost point (angle pi)
                    let key = (ang - std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI);
                    crossings.push((key, other.label));
                }
            }
        }
        crossings.sort_by(|a, b| a.0.total_cmp(&b.0));
        let inside = |key: f64, j: &PlaneCircle| -> bool {
            let ang = key + std::f64::consts::PI;
            let p = (c.cx + c.r * ang.cos(), c.cy + c.r * ang.sin());
            ((p.0 - j.cx).powi(2) + (p.1 - j.cy).powi(2)).sqrt() < j.r
        };
        let mut events = Vec::new();
        let m = crossings.len();
        for t in 0..m {
            let (key, label) = crossings[t];
            let prev_key = if t == 0 {
                (crossings[m - 1].0 + key) / 2.0 - std::f64::consts::PI
            } else {
                (crossings[t - 1].0 + key) / 2.0
            };
            let j = circles.iter().find(|x| x.label == label).unwrap();
            // sign: plus iff immediately before the crossing we are inside j
            let sign = if inside(prev_key, j) { Sign::Plus } else { Sign::Minus };
            events.push((label, sign));
        }
        out.push(SignedCode::new(c.label, events));
    }
    Arrangement::new(out).unwrap()
}

fn main() {
    let first = [
        PlaneCircle::new(1, -0.4825650993470698, -0.006740642404539754, 0.6894296375839002),
        PlaneCircle::new(2, 1.1021629326631635, -0.11715672836578594, 1.117637314106865),
        PlaneCircle::new(3, 0.147829940521653, 1.2084143337282618, 0.7656499169406568),
        PlaneCircle::new(4, 0.9512872560628449, 0.5977014669603373, 1.5881369362467606),
    ];
    let second = [
        PlaneCircle::new(1, -0.3686588932410719, -0.48436923645399066, 3.004417733096792),
        PlaneCircle::new(2, 1.2130799988666396, 0.07698508050206843, 3.3366005855347054),
        PlaneCircle::new(3, -0.07291717171642342, 0.8225524750456041, 1.9099145108484041),
        PlaneCircle::new(4, -1.257253600444421, -0.9227957838337641, 2.0363048899638603),
    ];
    for (name, circles) in [("first", &first), ("second", &second)] {
        let ingested = circles_to_arrangement(circles, 1e-9).unwrap();
        let checked = codes_by_membership(circles);
        println!("{}: ingestion agrees with membership walk: {}", name, ingested == checked);
        println!("{}", format::emit_text(&ingested));
    }
}
