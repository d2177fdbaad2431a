//! Discrete superlevel arcs on the `J`-point grid and distances between
//! closed subsets of the unit circle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::kernels::GridEvaluation;

/// `Arc[2πj1/J, 2πj2/J]` with `0 ≤ j1 < J` and `j1 ≤ j2 < j1 + J`; an arc
/// crossing `θ = 0` has `j2 ≥ J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiscreteArc {
    pub j1: usize,
    pub j2: usize,
    #[serde(rename = "J")]
    pub grid: usize,
    pub full_circle: bool,
}

impl DiscreteArc {
    pub fn new(j1: usize, j2: usize, grid: usize) -> Self {
        debug_assert!(j1 < grid && j2 >= j1 && j2 - j1 < grid);
        DiscreteArc {
            j1,
            j2,
            grid,
            full_circle: false,
        }
    }

    pub fn full(grid: usize) -> Self {
        DiscreteArc {
            j1: 0,
            j2: grid - 1,
            grid,
            full_circle: true,
        }
    }

    /// Number of grid points on the arc.
    pub fn len(&self) -> usize {
        self.j2 - self.j1 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid indices on the arc, reduced modulo `J`, in arc order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        (self.j1..=self.j2).map(move |j| j % self.grid)
    }

    pub fn contains_index(&self, j: usize) -> bool {
        if self.full_circle {
            return true;
        }
        let j = j % self.grid;
        let offset = (j + self.grid - self.j1) % self.grid;
        offset <= self.j2 - self.j1
    }

    pub fn theta1(&self) -> f64 {
        TAU * self.j1 as f64 / self.grid as f64
    }

    pub fn theta2(&self) -> f64 {
        TAU * self.j2 as f64 / self.grid as f64
    }

    /// Angular length of the arc (`2π` for the full circle).
    pub fn angular_length(&self) -> f64 {
        if self.full_circle {
            TAU
        } else {
            TAU * (self.j2 - self.j1) as f64 / self.grid as f64
        }
    }

    /// Whether `e^{iθ}` lies on the (closed) arc.
    pub fn contains_angle(&self, theta: f64) -> bool {
        if self.full_circle {
            return true;
        }
        let offset = (theta - self.theta1()).rem_euclid(TAU);
        let len = self.angular_length();
        offset <= len + 1e-12 || offset >= TAU - 1e-12
    }

    /// `exp(2πi (j1 + j2) / (2J))`.
    pub fn midpoint(&self) -> Complex64 {
        Complex64::from_polar(1.0, PI * (self.j1 + self.j2) as f64 / self.grid as f64)
    }

    /// The same arc with every index moved by `k` (mod `J`).
    pub fn shifted(&self, k: i64) -> Self {
        if self.full_circle {
            return *self;
        }
        let g = self.grid as i64;
        let j1 = (self.j1 as i64 + k).rem_euclid(g) as usize;
        DiscreteArc::new(j1, j1 + (self.j2 - self.j1), self.grid)
    }
}

/// Disjoint maximal arcs at one level, sorted by `j1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcFamily {
    pub arcs: Vec<DiscreteArc>,
    pub level: f64,
    pub grid: usize,
}

impl ArcFamily {
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full_circle(&self) -> bool {
        self.arcs.iter().any(|a| a.full_circle)
    }

    pub fn contains_index(&self, j: usize) -> bool {
        self.arcs.iter().any(|a| a.contains_index(j))
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        self.arcs.iter().any(|a| a.contains_angle(theta))
    }

    pub fn to_circle_set(&self) -> CircleSet {
        CircleSet::from_discrete_arcs(&self.arcs)
    }
}

/// Outcome of counting two-threshold arcs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelOrder {
    Count(usize),
    /// The detection level is cleared on the whole grid and the single arc
    /// also reaches the confirmation level; it has no endpoints to report.
    FullCircle,
}

impl ModelOrder {
    pub fn count(&self) -> Option<usize> {
        match *self {
            ModelOrder::Count(n) => Some(n),
            ModelOrder::FullCircle => None,
        }
    }
}

/// All maximal cyclic runs of indices with `magnitudes[j] ≥ h`.
pub fn superlevel_arcs(magnitudes: &[f64], h: f64) -> ArcFamily {
    let grid = magnitudes.len();
    let above: Vec<bool> = magnitudes.iter().map(|&v| v >= h).collect();
    let mut arcs = Vec::new();
    if grid > 0 {
        match above.iter().position(|&a| !a) {
            None => arcs.push(DiscreteArc::full(grid)),
            Some(start) => {
                // scan one full turn beginning right after a point below the level
                let mut run: Option<usize> = None;
                for k in 1..=grid {
                    let pos = start + k;
                    if above[pos % grid] {
                        run.get_or_insert(pos);
                    } else if let Some(first) = run.take() {
                        let j1 = first % grid;
                        arcs.push(DiscreteArc::new(j1, j1 + (pos - first) - 1, grid));
                    }
                }
                arcs.sort_by_key(|a| a.j1);
            }
        }
    }
    ArcFamily {
        arcs,
        level: h,
        grid,
    }
}

/// Maximal `h`-arcs that contain a grid point with magnitude `≥ h'`, and their count.
pub fn two_threshold_family(
    magnitudes: &[f64],
    h: f64,
    h_prime: f64,
) -> Result<(ArcFamily, ModelOrder)> {
    if h > h_prime {
        return Err(Error::LevelOrder { h, h_prime });
    }
    let mut family = superlevel_arcs(magnitudes, h);
    family
        .arcs
        .retain(|arc| arc.indices().any(|j| magnitudes[j] >= h_prime));
    let order = if family.is_full_circle() {
        ModelOrder::FullCircle
    } else {
        ModelOrder::Count(family.len())
    };
    Ok((family, order))
}

/// `L̂`: union of maximal `h`-arcs of `|S|` on the grid. With `h = h'_m` this is `L̂'`.
pub fn localization_set(eval: &GridEvaluation, h: f64) -> ArcFamily {
    superlevel_arcs(&eval.magnitudes(), h)
}

/// The `h'`-arcs lying inside the arcs of `family` (i.e. `L̂' ∩ ⋃ family`).
pub fn refined_arcs(magnitudes: &[f64], family: &ArcFamily, h_prime: f64) -> ArcFamily {
    let mut fine = superlevel_arcs(magnitudes, h_prime);
    fine.arcs.retain(|a| family.contains_index(a.j1));
    fine
}

/// Closed subset of the unit circle: a finite union of closed arcs
/// (points are arcs of zero length).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CircleSet {
    /// `(start angle, angular length)`, length in `[0, 2π]`.
    pub arcs: Vec<(f64, f64)>,
}

impl CircleSet {
    pub fn empty() -> Self {
        CircleSet::default()
    }

    pub fn from_points(angles: &[f64]) -> Self {
        CircleSet {
            arcs: angles.iter().map(|&a| (a, 0.0)).collect(),
        }
    }

    /// Arcs `[θ1, θ2]` traversed counter-clockwise; requires `θ1 ≤ θ2`.
    pub fn from_arcs(arcs: &[(f64, f64)]) -> Result<Self> {
        let mut out = Vec::with_capacity(arcs.len());
        for &(a, b) in arcs {
            if !(a <= b) || !b.is_finite() {
                return Err(Error::param("arc", format!("need theta1 <= theta2, got [{a}, {b}]")));
            }
            out.push((a, (b - a).min(TAU)));
        }
        Ok(CircleSet { arcs: out })
    }

    pub fn from_discrete_arcs(arcs: &[DiscreteArc]) -> Self {
        CircleSet {
            arcs: arcs
                .iter()
                .map(|a| (a.theta1(), a.angular_length()))
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn union(&self, other: &CircleSet) -> CircleSet {
        let mut arcs = self.arcs.clone();
        arcs.extend_from_slice(&other.arcs);
        CircleSet { arcs }
    }

    /// Merged, sorted arcs as `(start, end)` with `start ∈ [0, 2π)`, `end ≥ start`;
    /// `None` if the set covers the whole circle.
    fn normalized(&self) -> Option<Vec<(f64, f64)>> {
        let mut arcs: Vec<(f64, f64)> = Vec::with_capacity(self.arcs.len());
        for &(s, len) in &self.arcs {
            if len >= TAU {
                return None;
            }
            let s = s.rem_euclid(TAU);
            arcs.push((s, s + len));
        }
        arcs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(arcs.len());
        for (s, e) in arcs {
            match merged.last_mut() {
                Some(last) if s <= last.1 => last.1 = last.1.max(e),
                _ => merged.push((s, e)),
            }
        }
        while merged.len() > 1 {
            let first = merged[0];
            let last = merged.last_mut().expect("non-empty");
            if last.1 >= first.0 + TAU {
                last.1 = last.1.max(first.1 + TAU);
                merged.remove(0);
            } else {
                break;
            }
        }
        if let Some(&(s, e)) = merged.first() {
            if merged.len() == 1 && e - s >= TAU {
                return None;
            }
        }
        Some(merged)
    }

    /// Angular (geodesic) distance from `e^{iθ}` to the set; `+∞` if empty.
    pub fn angular_distance(&self, theta: f64) -> f64 {
        self.arcs
            .iter()
            .map(|&(s, len)| angular_distance_to_arc(theta, s, len))
            .fold(f64::INFINITY, f64::min)
    }
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn angular_distance_to_arc(theta: f64, start: f64, len: f64) -> f64 {
    if len >= TAU {
        return 0.0;
    }
    let offset = (theta - start).rem_euclid(TAU);
    if offset <= len {
        0.0
    } else {
        circular_gap(theta, start).min(circular_gap(theta, start + len))
    }
}

/// `sup_{z ∈ a} dist(z, b)` in angle (`0` if `a` is empty, `+∞` if only `b` is).
pub fn directed_angular_distance(a: &CircleSet, b: &CircleSet) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let Some(b_norm) = b.normalized() else {
        return 0.0;
    };
    if b_norm.is_empty() {
        return f64::INFINITY;
    }
    // peaks of dist(·, b) sit at midpoints of the gaps between b's arcs
    let gap_mids: Vec<f64> = (0..b_norm.len())
        .map(|i| {
            let end = b_norm[i].1;
            let next = if i + 1 < b_norm.len() {
                b_norm[i + 1].0
            } else {
                b_norm[0].0 + TAU
            };
            0.5 * (end + next)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for &(s, len) in &a.arcs {
        if len >= TAU {
            for &g in &gap_mids {
                worst = worst.max(b.angular_distance(g));
            }
            continue;
        }
        worst = worst.max(b.angular_distance(s));
        worst = worst.max(b.angular_distance(s + len));
        for &g in &gap_mids {
            if angular_distance_to_arc(g, s, len) == 0.0 {
                worst = worst.max(b.angular_distance(g));
            }
        }
    }
    worst
}

/// Chord length `|e^{iα} - e^{iβ}|` for angular separation `Δ`.
pub fn chord(delta: f64) -> f64 {
    2.0 * (0.5 * delta.min(PI)).sin()
}

/// Pompeiu–Hausdorff distance in `ℂ` between two closed subsets of the unit
/// circle. Both empty gives `0`; exactly one empty gives `+∞`.
pub fn hausdorff_distance(a: &CircleSet, b: &CircleSet) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        (false, false) => chord(directed_angular_distance(a, b).max(directed_angular_distance(b, a))),
    }
}
