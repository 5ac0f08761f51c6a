//! Torus diagrams: 4-valent crossings, N-points and wrap-labelled arcs on the 2-torus.
//!
//! A diagram produced by this crate always carries a layout: exact PL strands in the unit
//! square with a mark at every vertex that is a crossing pass or an N-point. The
//! combinatorial data (crossings, N-points, components, free loops) is derived from it.

pub mod code;
pub mod layout;
pub mod moves;

use crate::error::{Error, Result};
use crate::exact::*;
use crate::lattice::Hnf2;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub use code::canonical_code;
pub use moves::{apply_move, apply_move_with_inverse, find_moves, Anchor, MoveDir, MoveKind, MoveSite};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "y")]
    Y,
    #[serde(rename = "z")]
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn name(self) -> &'static str {
        ["x", "y", "z"][self.index()]
    }

    pub fn parse(s: &str) -> Option<Axis> {
        match s {
            "x" | "X" => Some(Axis::X),
            "y" | "Y" => Some(Axis::Y),
            "z" | "Z" => Some(Axis::Z),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orient {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Orient {
    pub fn sign(self) -> i64 {
        match self {
            Orient::Plus => 1,
            Orient::Minus => -1,
        }
    }

    pub fn flip(self) -> Orient {
        match self {
            Orient::Plus => Orient::Minus,
            Orient::Minus => Orient::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Orient::Plus => "+",
            Orient::Minus => "-",
        }
    }

    pub fn parse(s: &str) -> Option<Orient> {
        match s {
            "+" | "plus" => Some(Orient::Plus),
            "-" | "minus" => Some(Orient::Minus),
            _ => None,
        }
    }
}

/// Integer frame taking cell coordinates to `(u, v, h)`: `h` is the height along the
/// projection direction, `(u, v)` the coordinates in the diagram square. Right-handed.
pub fn frame(axis: Axis, orient: Orient) -> [[i64; 3]; 3] {
    let s = orient.sign();
    match axis {
        Axis::Z => [[s, 0, 0], [0, 1, 0], [0, 0, s]],
        Axis::X => [[0, s, 0], [0, 0, 1], [s, 0, 0]],
        Axis::Y => [[0, 0, s], [1, 0, 0], [0, s, 0]],
    }
}

/// Inverse of [`frame`] (it is orthogonal, so the transpose).
pub fn frame_inverse(axis: Axis, orient: Orient) -> [[i64; 3]; 3] {
    let f = frame(axis, orient);
    std::array::from_fn(|i| std::array::from_fn(|j| f[j][i]))
}

pub fn apply_frame_i(f: &[[i64; 3]; 3], v: [i64; 3]) -> [i64; 3] {
    std::array::from_fn(|i| (0..3).map(|k| f[i][k] * v[k]).sum())
}

pub fn apply_frame_q(f: &[[i64; 3]; 3], v: &Q3) -> Q3 {
    std::array::from_fn(|i| (0..3).map(|k| qi(f[i][k]) * &v[k]).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mark {
    #[serde(rename = "plain")]
    Plain,
    #[serde(rename = "over")]
    Over,
    #[serde(rename = "under")]
    Under,
    /// N-point where the strand ascends: leaves through the front face, re-enters at the back.
    #[serde(rename = "up")]
    Up,
    #[serde(rename = "down")]
    Down,
}

impl Mark {
    pub fn is_pass(self) -> bool {
        matches!(self, Mark::Over | Mark::Under)
    }

    pub fn is_n(self) -> bool {
        matches!(self, Mark::Up | Mark::Down)
    }

    pub fn is_event(self) -> bool {
        self != Mark::Plain
    }

    pub fn flipped(self) -> Mark {
        match self {
            Mark::Plain => Mark::Plain,
            Mark::Over => Mark::Under,
            Mark::Under => Mark::Over,
            Mark::Up => Mark::Down,
            Mark::Down => Mark::Up,
        }
    }
}

/// Closed PL curve in the 2-torus; segment `i` runs from `pts[i]` to `pts[i+1] + wraps[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Strand {
    pub pts: Vec<Q2>,
    pub wraps: Vec<[i64; 2]>,
    pub marks: Vec<Mark>,
}

impl Strand {
    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    /// A projected axial rod: a single N-point and no extent in the square.
    pub fn is_point(&self) -> bool {
        self.pts.len() == 1 && self.wraps[0] == [0, 0]
    }

    pub fn homology2(&self) -> [i64; 2] {
        self.wraps.iter().fold([0, 0], |a, w| [a[0] + w[0], a[1] + w[1]])
    }

    pub fn lifted(&self) -> Vec<Q2> {
        let mut out = Vec::with_capacity(self.len() + 1);
        let mut off = [0i64; 2];
        for i in 0..=self.len() {
            out.push(wrap2(&self.pts[i % self.len()], off));
            if i < self.len() {
                off = [off[0] + self.wraps[i][0], off[1] + self.wraps[i][1]];
            }
        }
        out
    }

    /// Builds a strand from a closed lifted polyline (`pts.len() == marks.len() + 1`).
    pub fn from_lifted(pts: &[Q2], marks: Vec<Mark>) -> Strand {
        let n = pts.len() - 1;
        assert_eq!(n, marks.len());
        let fl: Vec<[i64; 2]> = pts.iter().map(floor2).collect();
        Strand {
            pts: pts[..n].iter().map(frac2).collect(),
            wraps: (0..n).map(|i| [fl[i + 1][0] - fl[i][0], fl[i + 1][1] - fl[i][1]]).collect(),
            marks,
        }
    }

    pub fn segment(&self, i: usize) -> (Q2, Q2) {
        let n = self.len();
        (self.pts[i].clone(), wrap2(&self.pts[(i + 1) % n], self.wraps[i]))
    }

    pub fn event_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.marks[i].is_event()).collect()
    }

    pub fn has_events(&self) -> bool {
        self.marks.iter().any(|m| m.is_event())
    }

    /// Rotates the vertex list so that vertex `k` comes first.
    pub fn rotated(&self, k: usize) -> Strand {
        let l = self.lifted();
        let n = self.len();
        let h = self.homology2();
        let pts: Vec<Q2> = (0..=n)
            .map(|i| if k + i <= n { l[k + i].clone() } else { wrap2(&l[k + i - n], h) })
            .collect();
        let marks = (0..n).map(|i| self.marks[(k + i) % n]).collect();
        Strand::from_lifted(&pts, marks)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    /// Slot (0 or 1) of the pass that goes over.
    pub over: u8,
    /// Whether the slot-1 pass crosses the slot-0 pass from right to left.
    pub ccw: bool,
    /// `(component, event index)` of the slot-0 and slot-1 passes.
    pub passes: [(usize, usize); 2],
    pub pos: Option<Q2>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NPoint {
    pub ascending: bool,
    pub at: (usize, usize),
    pub pos: Option<Q2>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Event {
    Pass { c: usize, slot: u8 },
    N { n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub events: Vec<Event>,
    /// `wraps[i]` labels the arc from event `i` to event `i+1` (cyclically).
    pub wraps: Vec<[i64; 2]>,
    /// Layout strand and the vertex index of every event, when a layout exists.
    pub strand: Option<usize>,
    pub vertex_of_event: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeLoop {
    pub homology: [i64; 2],
    pub strand: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub strands: Vec<Strand>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusDiagram {
    pub axis: Axis,
    pub orient: Orient,
    pub crossings: Vec<Crossing>,
    pub npoints: Vec<NPoint>,
    pub components: Vec<Component>,
    pub free_loops: Vec<FreeLoop>,
    pub layout: Option<Layout>,
}

impl TorusDiagram {
    pub fn empty(axis: Axis, orient: Orient) -> Self {
        TorusDiagram {
            axis,
            orient,
            crossings: vec![],
            npoints: vec![],
            components: vec![],
            free_loops: vec![],
            layout: Some(Layout { strands: vec![] }),
        }
    }

    /// Derives the combinatorial structure from a layout. Geometry is not checked here;
    /// see [`layout::layout_issues`].
    pub fn from_layout(axis: Axis, orient: Orient, strands: Vec<Strand>) -> Result<TorusDiagram> {
        let mut crossings: Vec<Crossing> = Vec::new();
        let mut npoints: Vec<NPoint> = Vec::new();
        let mut components: Vec<Component> = Vec::new();
        let mut free_loops = Vec::new();
        let mut by_pos: BTreeMap<Q2, usize> = BTreeMap::new();
        let mut pass_marks: Vec<[Option<Mark>; 2]> = Vec::new();
        let mut pass_dirs: Vec<[Option<Q2>; 2]> = Vec::new();
        for (si, s) in strands.iter().enumerate() {
            if s.pts.len() != s.wraps.len() || s.pts.len() != s.marks.len() || s.is_empty() {
                return Err(Error::MalformedDiagram(format!("strand {si} has inconsistent lengths")));
            }
            if !s.has_events() {
                free_loops.push(FreeLoop { homology: s.homology2(), strand: Some(si) });
                continue;
            }
            let ci = components.len();
            let evs = s.event_vertices();
            let mut events = Vec::new();
            for (ei, &v) in evs.iter().enumerate() {
                let m = s.marks[v];
                if m.is_pass() {
                    let (a, b) = s.segment(v);
                    let dir = sub2(&b, &a);
                    let id = *by_pos.entry(s.pts[v].clone()).or_insert_with(|| {
                        crossings.push(Crossing {
                            over: 0,
                            ccw: false,
                            passes: [(usize::MAX, 0); 2],
                            pos: Some(s.pts[v].clone()),
                        });
                        pass_marks.push([None, None]);
                        pass_dirs.push([None, None]);
                        crossings.len() - 1
                    });
                    let slot = if crossings[id].passes[0].0 == usize::MAX {
                        0
                    } else if crossings[id].passes[1].0 == usize::MAX {
                        1
                    } else {
                        return Err(Error::MalformedDiagram("more than two passes at one point".into()));
                    };
                    crossings[id].passes[slot] = (ci, ei);
                    pass_marks[id][slot] = Some(m);
                    pass_dirs[id][slot] = Some(dir);
                    events.push(Event::Pass { c: id, slot: slot as u8 });
                } else {
                    npoints.push(NPoint { ascending: m == Mark::Up, at: (ci, ei), pos: Some(s.pts[v].clone()) });
                    events.push(Event::N { n: npoints.len() - 1 });
                }
            }
            let mut wraps = Vec::new();
            for ei in 0..evs.len() {
                let a = evs[ei];
                let b = if ei + 1 < evs.len() { evs[ei + 1] } else { evs[0] + s.len() };
                let mut w = [0i64; 2];
                for k in a..b {
                    let sw = s.wraps[k % s.len()];
                    w = [w[0] + sw[0], w[1] + sw[1]];
                }
                wraps.push(w);
            }
            components.push(Component { events, wraps, strand: Some(si), vertex_of_event: evs });
        }
        for (id, c) in crossings.iter_mut().enumerate() {
            let [m0, m1] = pass_marks[id];
            let (Some(m0), Some(m1)) = (m0, m1) else {
                return Err(Error::MalformedDiagram(format!("crossing {id} has a single pass")));
            };
            c.over = match (m0, m1) {
                (Mark::Over, Mark::Under) => 0,
                (Mark::Under, Mark::Over) => 1,
                _ => return Err(Error::MalformedDiagram(format!("crossing {id} needs one over and one under pass"))),
            };
            let d0 = pass_dirs[id][0].clone().unwrap();
            let d1 = pass_dirs[id][1].clone().unwrap();
            let cr = cross2(&d0, &d1);
            if cr.is_zero() {
                return Err(Error::MalformedDiagram(format!("crossing {id} is not transverse")));
            }
            c.ccw = cr.is_positive();
        }
        Ok(TorusDiagram { axis, orient, crossings, npoints, components, free_loops, layout: Some(Layout { strands }) })
    }

    pub fn strands(&self) -> Result<&[Strand]> {
        self.layout.as_ref().map(|l| l.strands.as_slice()).ok_or(Error::LayoutMissing)
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn n_count(&self) -> usize {
        self.npoints.len()
    }

    pub fn component_count(&self) -> usize {
        self.components.len() + self.free_loops.len()
    }

    /// Per-component homology in diagram coordinates `(u, v, signed N count)`,
    /// vertex components first, then free loops.
    pub fn homologies(&self) -> Vec<[i64; 3]> {
        let mut out = Vec::new();
        for c in &self.components {
            let w = c.wraps.iter().fold([0, 0], |a, w| [a[0] + w[0], a[1] + w[1]]);
            let h: i64 = c
                .events
                .iter()
                .map(|e| match e {
                    Event::N { n } => {
                        if self.npoints[*n].ascending {
                            1
                        } else {
                            -1
                        }
                    }
                    _ => 0,
                })
                .sum();
            out.push([w[0], w[1], h]);
        }
        for f in &self.free_loops {
            out.push([f.homology[0], f.homology[1], 0]);
        }
        out
    }

    /// Homologies mapped back to cell coordinates.
    pub fn cell_homologies(&self) -> Vec<[i64; 3]> {
        let fi = frame_inverse(self.axis, self.orient);
        self.homologies().into_iter().map(|h| apply_frame_i(&fi, h)).collect()
    }

    pub fn sorted_homologies(&self) -> Vec<[i64; 3]> {
        let mut h = self.homologies();
        h.sort();
        h
    }

    /// Over/under slot data for the pass at `(component, event)`.
    pub fn is_over(&self, c: usize, slot: u8) -> bool {
        self.crossings[c].over == slot
    }

    pub fn with_strands(&self, strands: Vec<Strand>) -> Result<TorusDiagram> {
        TorusDiagram::from_layout(self.axis, self.orient, strands)
    }
}

fn mirror(p: &Q2) -> Q2 {
    frac2(&[-p[0].clone(), p[1].clone()])
}

/// Reverses the projection direction: mirror `u -> -u`, swap over/under, swap N directions.
pub fn v_flip(d: &TorusDiagram) -> TorusDiagram {
    match &d.layout {
        Some(l) => {
            let strands = l
                .strands
                .iter()
                .map(|s| {
                    let pts: Vec<Q2> = s.lifted().iter().map(|p| [-p[0].clone(), p[1].clone()]).collect();
                    Strand::from_lifted(&pts, s.marks.iter().map(|m| m.flipped()).collect())
                })
                .collect();
            TorusDiagram::from_layout(d.axis, d.orient.flip(), strands).expect("flip keeps a valid layout")
        }
        None => {
            let mut out = d.clone();
            out.orient = d.orient.flip();
            for c in &mut out.crossings {
                c.over = 1 - c.over;
                c.ccw = !c.ccw;
                c.pos = c.pos.as_ref().map(mirror);
            }
            for n in &mut out.npoints {
                n.ascending = !n.ascending;
                n.pos = n.pos.as_ref().map(mirror);
            }
            for c in &mut out.components {
                for w in &mut c.wraps {
                    w[0] = -w[0];
                }
            }
            for f in &mut out.free_loops {
                f.homology[0] = -f.homology[0];
            }
            out
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Twist2 {
    /// `(x, y) -> (x + y, y)`
    Psi1,
    /// `(x, y) -> (x, x + y)`
    Psi2,
}

impl Twist2 {
    pub fn matrix(self, sign: i64) -> [[i64; 2]; 2] {
        match self {
            Twist2::Psi1 => [[1, sign], [0, 1]],
            Twist2::Psi2 => [[1, 0], [sign, 1]],
        }
    }
}

fn map2(m: &[[i64; 2]; 2], p: &Q2) -> Q2 {
    [qi(m[0][0]) * &p[0] + qi(m[0][1]) * &p[1], qi(m[1][0]) * &p[0] + qi(m[1][1]) * &p[1]]
}

/// 2-torus twist applied to the layout; over/under data and N-points are carried along.
pub fn twist2(d: &TorusDiagram, k: Twist2, sign: i64) -> Result<TorusDiagram> {
    let strands = d.strands()?;
    let m = k.matrix(sign.signum());
    let mapped: Vec<Strand> = strands
        .iter()
        .map(|s| {
            let pts: Vec<Q2> = s.lifted().iter().map(|p| map2(&m, p)).collect();
            Strand::from_lifted(&pts, s.marks.clone())
        })
        .collect();
    let mapped = layout::renormalize(mapped)?;
    TorusDiagram::from_layout(d.axis, d.orient, mapped)
}

/// Preimage of the diagram under the covering of the 2-torus with exponent matrix `h`.
pub fn cover2(d: &TorusDiagram, h: &Hnf2) -> Result<TorusDiagram> {
    let h = Hnf2::new(h.h11, h.h21, h.h22)?;
    let strands = d.strands()?;
    // sublattice columns (h11, h21) and (0, h22); new coordinates x' = H^-1 x
    let det = qi(h.h11 * h.h22);
    let inv = |p: &Q2| -> Q2 {
        [&p[0] * qi(h.h22) / &det, (qi(h.h11) * &p[1] - qi(h.h21) * &p[0]) / &det]
    };
    let reduce = |g: [i64; 2]| -> [i64; 2] {
        let q0 = g[0].div_euclid(h.h11);
        let g = [g[0] - q0 * h.h11, g[1] - q0 * h.h21];
        let q1 = g[1].div_euclid(h.h22);
        [g[0], g[1] - q1 * h.h22]
    };
    let reps: Vec<[i64; 2]> = (0..h.h11).flat_map(|a| (0..h.h22).map(move |b| [a, b])).collect();
    let mut out = Vec::new();
    for s in strands {
        let hom = s.homology2();
        let lifted = s.lifted();
        let mut used = vec![false; reps.len()];
        for start in 0..reps.len() {
            if used[start] {
                continue;
            }
            let mut g = reps[start];
            let mut off = [qi(g[0]), qi(g[1])];
            let mut pts = Vec::new();
            let mut marks = Vec::new();
            loop {
                let idx = reps.iter().position(|r| *r == g).unwrap();
                if used[idx] {
                    break;
                }
                used[idx] = true;
                pts.extend(lifted[..s.len()].iter().map(|p| add2(p, &off)));
                marks.extend(s.marks.iter().copied());
                off = [&off[0] + qi(hom[0]), &off[1] + qi(hom[1])];
                g = reduce([g[0] + hom[0], g[1] + hom[1]]);
            }
            pts.push(add2(&lifted[0], &off));
            let mapped: Vec<Q2> = pts.iter().map(&inv).collect();
            out.push(Strand::from_lifted(&mapped, marks));
        }
    }
    let out = layout::renormalize(out)?;
    TorusDiagram::from_layout(d.axis, d.orient, out)
}

#[cfg(test)]
mod tests;
