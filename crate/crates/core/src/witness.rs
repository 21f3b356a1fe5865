//! Numeric witnesses: explicit planar configurations realizing cell labels.
//!
//! The combinatorial side never consumes floats; this module closes the
//! loop in the other direction. A label is realized by merging each part
//! into one pseudo-edge, building the convex cyclic polygon on those
//! pseudo-edges (vertices on a common circle), splitting the pseudo-edges
//! back into collinear runs, and reordering the edge vectors to index
//! order. The label of a configuration is read off by sorting edges by
//! direction and grouping ties.

use std::f64::consts::PI;

use thiserror::Error;

use crate::linkage::{Linkage, LinkageError};
use crate::partition::{CyclicPartition, PartitionError};

/// Relative bisection tolerance for the circumradius solve.
pub const SOLVER_REL_TOL: f64 = 1e-12;
/// Angular tolerance for grouping parallel edges, one order above what the
/// solver can smear.
pub const SLOPE_GROUP_TOL: f64 = 1e-7;
/// Maximum closure residual relative to the perimeter.
pub const CLOSURE_REL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum WitnessError {
    #[error("need at least 3 lengths, got {0}")]
    TooFewLengths(usize),

    #[error("length {index} ({value}) is not positive and finite")]
    BadLength { index: usize, value: f64 },

    #[error("length {index} ({value}) is at least half the perimeter")]
    LengthTooLong { index: usize, value: f64 },

    #[error("circumradius bisection failed to bracket a root")]
    SolverFailed,

    #[error("configuration does not match the linkage: edge {index} has length {found}, expected {expected}")]
    ConfigurationMismatch {
        index: usize,
        found: f64,
        expected: f64,
    },

    #[error("edges {0} and {1} are anti-parallel within tolerance; refusing to group")]
    AntiparallelGroup(usize, usize),

    #[error("label {0} is not admissible for the linkage")]
    NotAdmissible(String),

    #[error(transparent)]
    Partition(#[from] PartitionError),

    #[error(transparent)]
    Linkage(#[from] LinkageError),
}

/// A closed planar polygon, one point per joint.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarConfiguration {
    points: Vec<[f64; 2]>,
}

impl PlanarConfiguration {
    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Edge vector from joint `i` to joint `i+1` (1-based, cyclic).
    pub fn edge_vector(&self, i: usize) -> [f64; 2] {
        let a = self.points[i - 1];
        let b = self.points[i % self.points.len()];
        [b[0] - a[0], b[1] - a[1]]
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        let [x, y] = self.edge_vector(i);
        x.hypot(y)
    }

    /// Residual of the closing edge constraint, summed over all edges the
    /// polygon is exactly closed by construction, so this measures how far
    /// the edge vectors drift from the requested lengths.
    pub fn max_length_error(&self, lengths: &[f64]) -> f64 {
        (1..=self.points.len())
            .map(|i| (self.edge_length(i) - lengths[i - 1]).abs() / lengths[i - 1])
            .fold(0.0, f64::max)
    }

    /// Minimal SVG rendering of the polygon outline, for figures only.
    pub fn to_svg(&self) -> String {
        let xs: Vec<f64> = self.points.iter().map(|p| p[0]).collect();
        let ys: Vec<f64> = self.points.iter().map(|p| p[1]).collect();
        let (min_x, max_x) = bounds(&xs);
        let (min_y, max_y) = bounds(&ys);
        let w = (max_x - min_x).max(1e-9);
        let h = (max_y - min_y).max(1e-9);
        let margin = 0.05 * w.max(h);
        let pts: Vec<String> = self
            .points
            .iter()
            .map(|p| format!("{:.6},{:.6}", p[0], max_y - p[1] + min_y))
            .collect();
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">\n  <polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{:.6}\"/>\n</svg>\n",
            min_x - margin,
            min_y - margin,
            w + 2.0 * margin,
            h + 2.0 * margin,
            pts.join(" "),
            0.01 * w.max(h),
        )
    }
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

fn half_angle(l: f64, r: f64) -> f64 {
    (l / (2.0 * r)).min(1.0).asin()
}

/// Convex polygon with the given edge lengths in the given cyclic order,
/// counterclockwise, all vertices on a common circle. The circumradius is
/// found by monotone bisection; if the full angle sum at `R = l_max/2`
/// reaches `2*pi` the center lies inside and `sum 2*asin(l_i/2R) = 2*pi`
/// is solved, otherwise the center is outside (beyond the longest edge)
/// and `sum_{i != max} asin(l_i/2R) = asin(l_max/2R)` is solved instead.
pub fn convex_polygon(lengths: &[f64]) -> Result<PlanarConfiguration, WitnessError> {
    let n = lengths.len();
    if n < 3 {
        return Err(WitnessError::TooFewLengths(n));
    }
    let mut perimeter = 0.0;
    for (i, &l) in lengths.iter().enumerate() {
        if !(l.is_finite() && l > 0.0) {
            return Err(WitnessError::BadLength {
                index: i + 1,
                value: l,
            });
        }
        perimeter += l;
    }
    let (max_idx, &max_len) = lengths
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("n >= 3");
    for (i, &l) in lengths.iter().enumerate() {
        if 2.0 * l >= perimeter {
            return Err(WitnessError::LengthTooLong {
                index: i + 1,
                value: l,
            });
        }
    }

    let r0 = max_len / 2.0;
    let full_turn = |r: f64| -> f64 { lengths.iter().map(|&l| 2.0 * half_angle(l, r)).sum() };
    let center_inside = full_turn(r0) >= 2.0 * PI;

    // Both objectives are monotone in R on [r0, inf) with a sign change.
    let objective = |r: f64| -> f64 {
        if center_inside {
            full_turn(r) - 2.0 * PI
        } else {
            lengths
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != max_idx)
                .map(|(_, &l)| half_angle(l, r))
                .sum::<f64>()
                - half_angle(max_len, r)
        }
    };

    let mut lo = r0;
    let mut hi = r0.max(perimeter);
    let rising = objective(lo) < 0.0;
    for _ in 0..2048 {
        let sign = objective(hi);
        if (rising && sign > 0.0) || (!rising && sign < 0.0) {
            break;
        }
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(WitnessError::SolverFailed);
        }
    }
    for _ in 0..2048 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) / mid < SOLVER_REL_TOL {
            break;
        }
        let v = objective(mid);
        if (v < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);

    // Central angles; the longest edge takes the remainder so the polygon
    // closes exactly (reflex for the center-outside case).
    let mut deltas: Vec<f64> = lengths.iter().map(|&l| 2.0 * half_angle(l, r)).collect();
    let others: f64 = deltas
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != max_idx)
        .map(|(_, &d)| d)
        .sum();
    deltas[max_idx] = 2.0 * PI - others;

    let mut points = Vec::with_capacity(n);
    let mut theta = 0.0f64;
    for &d in &deltas {
        points.push([r * theta.cos(), r * theta.sin()]);
        theta += d;
    }
    Ok(PlanarConfiguration { points })
}

/// Circumradius implied by a configuration on a common circle (distance of
/// the first point from the centroid of the circle is not stored; this
/// recomputes from three points). Test helper exposed for the oracle side.
pub fn circumradius_of_triangle(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    let la = (b[0] - c[0]).hypot(b[1] - c[1]);
    let lb = (a[0] - c[0]).hypot(a[1] - c[1]);
    let lc = (a[0] - b[0]).hypot(a[1] - b[1]);
    let cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    la * lb * lc / (2.0 * cross.abs())
}

/// The label of a configuration: edge indices sorted by direction angle,
/// ties (parallel codirected edges) grouped into one part, read as a
/// cyclic partition.
pub fn label_of(
    config: &PlanarConfiguration,
    linkage: &Linkage,
) -> Result<CyclicPartition, WitnessError> {
    let n = linkage.n();
    let lengths = linkage.lengths_f64();
    if config.n() != n {
        return Err(WitnessError::ConfigurationMismatch {
            index: 0,
            found: config.n() as f64,
            expected: n as f64,
        });
    }
    for i in 1..=n {
        let found = config.edge_length(i);
        let expected = lengths[i - 1];
        if (found - expected).abs() / expected > 1e-6 {
            return Err(WitnessError::ConfigurationMismatch {
                index: i,
                found,
                expected,
            });
        }
    }

    let mut order: Vec<(f64, usize)> = (1..=n)
        .map(|i| {
            let [x, y] = config.edge_vector(i);
            (y.atan2(x), i)
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    // Group consecutive edges with nearly equal angles.
    let mut groups: Vec<Vec<(f64, usize)>> = Vec::new();
    for &(angle, idx) in &order {
        match groups.last_mut() {
            Some(last) if angle - last.last().unwrap().0 <= SLOPE_GROUP_TOL => {
                last.push((angle, idx));
            }
            _ => groups.push(vec![(angle, idx)]),
        }
    }
    // The angle axis is circular: the first and last group may be one.
    if groups.len() > 1 {
        let first_start = groups.first().unwrap().first().unwrap().0;
        let last_end = groups.last().unwrap().last().unwrap().0;
        if first_start + 2.0 * PI - last_end <= SLOPE_GROUP_TOL {
            let first = groups.remove(0);
            groups.last_mut().unwrap().extend(first);
        }
    }
    // Guard: grouped edges must be codirected.
    for group in &groups {
        for (pos, &(_, i)) in group.iter().enumerate() {
            for &(_, j) in &group[pos + 1..] {
                let a = config.edge_vector(i);
                let b = config.edge_vector(j);
                if a[0] * b[0] + a[1] * b[1] < 0.0 {
                    return Err(WitnessError::AntiparallelGroup(i, j));
                }
            }
        }
    }
    let parts: Vec<Vec<usize>> = groups
        .iter()
        .map(|g| g.iter().map(|&(_, i)| i).collect())
        .collect();
    Ok(CyclicPartition::new(parts, n)?)
}

/// A configuration realizing an admissible label: pseudo-edges from the
/// parts, the convex cyclic polygon on them, each pseudo-edge split into
/// its member edges collinearly (member order by index), edge vectors
/// restored to index order and integrated from the origin.
pub fn witness_of(
    label: &CyclicPartition,
    linkage: &Linkage,
) -> Result<PlanarConfiguration, WitnessError> {
    if !linkage.is_admissible(label)? {
        return Err(WitnessError::NotAdmissible(label.to_string()));
    }
    let n = linkage.n();
    let lengths = linkage.lengths_f64();
    let pseudo: Vec<f64> = label
        .parts()
        .iter()
        .map(|part| part.iter().map(|&i| lengths[i - 1]).sum())
        .collect();
    let support = convex_polygon(&pseudo)?;

    let mut vectors = vec![[0.0f64; 2]; n];
    for (k, part) in label.parts().iter().enumerate() {
        let [vx, vy] = support.edge_vector(k + 1);
        let norm = vx.hypot(vy);
        let (ux, uy) = (vx / norm, vy / norm);
        for &i in part {
            vectors[i - 1] = [lengths[i - 1] * ux, lengths[i - 1] * uy];
        }
    }
    let mut points = Vec::with_capacity(n);
    let mut here = [0.0f64; 2];
    for v in &vectors {
        points.push(here);
        here = [here[0] + v[0], here[1] + v[1]];
    }
    Ok(PlanarConfiguration { points })
}
