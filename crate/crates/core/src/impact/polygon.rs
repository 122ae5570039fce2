use crate::ingest::MobilityRegion;

fn on_edge(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> bool {
    let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
    cross == 0.0
        && p.0 >= a.0.min(b.0)
        && p.0 <= a.0.max(b.0)
        && p.1 >= a.1.min(b.1)
        && p.1 <= a.1.max(b.1)
}

/// Even-odd ray casting on an implicitly closed ring. Points on an edge or
/// vertex count as inside. Coordinates are treated as planar.
pub fn point_in_polygon(point: (f64, f64), ring: &[(f64, f64)]) -> bool {
    let n = ring.len();
    if n < 3 {
        return false;
    }
    let (py, px) = point;
    let mut inside = false;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if on_edge(point, a, b) {
            return true;
        }
        let (ay, ax) = a;
        let (by, bx) = b;
        if (ay > py) != (by > py) {
            let x_cross = ax + (py - ay) * (bx - ax) / (by - ay);
            if px < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

/// First region in input order containing `(lat, lon)`.
pub fn point_in_region(point: (f64, f64), regions: &[MobilityRegion]) -> Option<&str> {
    regions
        .iter()
        .find(|r| point_in_polygon(point, &r.polygon))
        .map(|r| r.region_id.as_str())
}
