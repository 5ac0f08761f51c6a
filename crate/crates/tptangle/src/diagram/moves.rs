//! R-moves on laid-out torus diagrams.
//!
//! Every move is carried out on the layout: the affected strand piece is re-drawn with
//! exact coordinates, crossings are re-detected, and the result is checked for regularity
//! before the combinatorial data is derived again. Moves that would need a larger local
//! picture than the layout provides are reported as inapplicable.

use super::layout::{is_valid, layout_issues_after, nudges, translate};
use super::{Mark, Strand, TorusDiagram};
use crate::error::{Error, Result};
use crate::exact::*;
use crate::geom::{intersect2, on_segment2, point_in_polygon, Hit};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveKind {
    R1a,
    R1b,
    R2,
    R3,
    R4,
    R5a,
    R5b,
    R6,
    R7a,
    R7b,
    R8,
    R9,
}

impl MoveKind {
    pub const ALL: [MoveKind; 12] = [
        MoveKind::R1a,
        MoveKind::R1b,
        MoveKind::R2,
        MoveKind::R3,
        MoveKind::R4,
        MoveKind::R5a,
        MoveKind::R5b,
        MoveKind::R6,
        MoveKind::R7a,
        MoveKind::R7b,
        MoveKind::R8,
        MoveKind::R9,
    ];

    /// Expected change in crossing count when applied in the given direction.
    pub fn crossing_delta(self, dir: MoveDir) -> i64 {
        let s = if dir == MoveDir::Apply { 1 } else { -1 };
        match self {
            MoveKind::R1a | MoveKind::R1b => s,
            MoveKind::R2 => 2 * s,
            _ => 0,
        }
    }

    pub fn is_shift(self) -> bool {
        matches!(self, MoveKind::R6 | MoveKind::R7a | MoveKind::R7b | MoveKind::R8 | MoveKind::R9)
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// `Apply` adds crossings or N-points (R1, R2, R5) or shifts forward (R6-R9); R3 and R4
/// are their own inverses and always use `Apply`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveDir {
    Apply,
    Inverse,
}

/// `(strand, event index)` naming the arc that starts at that event; free loops use event 0.
pub type ArcRef = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anchor {
    /// New kink on an arc, looping to the left or right of the strand.
    Curl { arc: ArcRef, left: bool },
    /// Kink whose loop is the arc starting at this event.
    Kink { arc: ArcRef },
    /// Finger pushed from a point of one segment across a point of another.
    Finger {
        a: (usize, usize),
        #[serde(with = "crate::exact::serde_q")]
        ta: Q,
        b: (usize, usize),
        #[serde(with = "crate::exact::serde_q")]
        tb: Q,
        over: bool,
    },
    /// Bigon bounded by two arcs; arc `b` is redrawn.
    Bigon { a: ArcRef, b: ArcRef },
    /// Triangle with the given arc as the side that moves across the opposite crossing;
    /// `left` says on which side of the arc the triangle lies.
    Triangle { mover: ArcRef, left: bool },
    /// N-point at this event slides past the next (or previous) crossing on its strand.
    Slide { strand: usize, event: usize, forward: bool },
    /// Adjacent pair of opposite N-points starting at this event.
    NPair { strand: usize, event: usize },
    /// New pair of opposite N-points on an arc.
    NInsert { arc: ArcRef },
    /// Translation of the whole layout.
    Shift {
        #[serde(with = "crate::exact::serde_q::pair")]
        by: Q2,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveSite {
    pub kind: MoveKind,
    pub dir: MoveDir,
    pub anchor: Anchor,
}

impl fmt::Display for MoveSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = if self.dir == MoveDir::Apply { "+" } else { "-" };
        write!(f, "{}{} ", self.kind, d)?;
        match &self.anchor {
            Anchor::Curl { arc, left } => write!(f, "curl s{}e{} {}", arc.0, arc.1, if *left { "left" } else { "right" }),
            Anchor::Kink { arc } => write!(f, "kink s{}e{}", arc.0, arc.1),
            Anchor::Finger { a, ta, b, tb, over } => write!(
                f,
                "finger s{}g{}@{} s{}g{}@{} {}",
                a.0,
                a.1,
                fmt_q(ta),
                b.0,
                b.1,
                fmt_q(tb),
                if *over { "over" } else { "under" }
            ),
            Anchor::Bigon { a, b } => write!(f, "bigon s{}e{} s{}e{}", a.0, a.1, b.0, b.1),
            Anchor::Triangle { mover, left } => {
                write!(f, "triangle s{}e{} {}", mover.0, mover.1, if *left { "left" } else { "right" })
            }
            Anchor::Slide { strand, event, forward } => {
                write!(f, "slide s{strand}e{event} {}", if *forward { "forward" } else { "backward" })
            }
            Anchor::NPair { strand, event } => write!(f, "npair s{strand}e{event}"),
            Anchor::NInsert { arc } => write!(f, "ninsert s{}e{}", arc.0, arc.1),
            Anchor::Shift { by } => write!(f, "shift {},{}", fmt_q(&by[0]), fmt_q(&by[1])),
        }
    }
}

fn inapplicable(msg: impl Into<String>) -> Error {
    Error::InapplicableMove(msg.into())
}

// ---------------------------------------------------------------------------------------
// strand helpers

/// First vertex of the arc and its number of segments.
fn arc_span(s: &Strand, e: usize) -> (usize, usize) {
    let evs = s.event_vertices();
    if evs.is_empty() {
        return (0, s.len());
    }
    let a = evs[e % evs.len()];
    if evs.len() == 1 {
        return (a, s.len());
    }
    let b = evs[(e + 1) % evs.len()];
    (a, (b + s.len() - a) % s.len())
}

/// Lifted route of an arc, in the frame where its first vertex sits in the unit square.
fn arc_points(s: &Strand, e: usize) -> Vec<Q2> {
    let (a, len) = arc_span(s, e);
    let l = s.rotated(a).lifted();
    l[..=len].to_vec()
}

fn arcs(strands: &[Strand]) -> Vec<ArcRef> {
    let mut out = Vec::new();
    for (si, s) in strands.iter().enumerate() {
        if s.is_point() {
            continue;
        }
        let m = s.event_vertices().len();
        for e in 0..m.max(1) {
            out.push((si, e));
        }
    }
    out
}

fn event_count(s: &Strand) -> usize {
    s.marks.iter().filter(|m| m.is_event()).count()
}

fn mid(a: &Q2, b: &Q2) -> Q2 {
    [(&a[0] + &b[0]) / qi(2), (&a[1] + &b[1]) / qi(2)]
}

fn lerp(a: &Q2, b: &Q2, t: &Q) -> Q2 {
    add2(a, &scale2(&sub2(b, a), t))
}

fn perp(d: &Q2) -> Q2 {
    [-d[1].clone(), d[0].clone()]
}

fn sign_of(x: &Q) -> Q {
    if x.is_positive() {
        one()
    } else {
        -one()
    }
}

fn on_edge(p: &Q2) -> bool {
    let f = frac2(p);
    f[0].is_zero() || f[1].is_zero()
}

fn signed_area2(poly: &[Q2]) -> Q {
    let n = poly.len();
    (0..n).map(|i| cross2(&poly[i], &poly[(i + 1) % n])).sum()
}

/// Sample point on every arc, free loop and axial point, tagged with its arc.
fn samples(strands: &[Strand]) -> Vec<(ArcRef, Q2)> {
    let mut out = Vec::new();
    for (si, s) in strands.iter().enumerate() {
        if s.is_point() {
            out.push(((si, 0), s.pts[0].clone()));
            continue;
        }
        let m = s.event_vertices().len();
        for e in 0..m.max(1) {
            let (a, _) = arc_span(s, e);
            let (p, q) = s.segment(a);
            out.push(((si, e), frac2(&mid(&p, &q))));
        }
    }
    out
}

/// Whether no part of the diagram other than the given arcs lies inside the polygon.
fn region_empty(strands: &[Strand], poly: &[Q2], exclude: &[ArcRef]) -> bool {
    let lo = [0, 1].map(|k| poly.iter().map(|p| to_f64(&p[k])).fold(f64::INFINITY, f64::min));
    let hi = [0, 1].map(|k| poly.iter().map(|p| to_f64(&p[k])).fold(f64::NEG_INFINITY, f64::max));
    for (arc, x) in samples(strands) {
        if exclude.contains(&arc) && !strands[arc.0].is_point() {
            continue;
        }
        let fx = [to_f64(&x[0]), to_f64(&x[1])];
        for kx in ((lo[0] - fx[0]).floor() as i64)..=((hi[0] - fx[0]).ceil() as i64) {
            for ky in ((lo[1] - fx[1]).floor() as i64)..=((hi[1] - fx[1]).ceil() as i64) {
                if point_in_polygon(&wrap2(&x, [kx, ky]), poly) {
                    return false;
                }
            }
        }
    }
    true
}

/// Replaces vertices `from..=to` (cyclically) of strand `si` by `path`, given in the frame
/// where vertex `from` sits in the unit square. The strand is rotated so `path` comes first.
fn reroute(strands: &[Strand], si: usize, from: usize, to: usize, path: Vec<(Q2, Mark)>) -> Vec<Strand> {
    let s = &strands[si];
    let n = s.len();
    let t = (to + n - from) % n;
    let r = s.rotated(from);
    let l = r.lifted();
    let h = r.homology2();
    let mut pts: Vec<Q2> = path.iter().map(|(p, _)| p.clone()).collect();
    let mut marks: Vec<Mark> = path.iter().map(|(_, m)| *m).collect();
    pts.extend(l[t + 1..n].iter().cloned());
    marks.extend(r.marks[t + 1..n].iter().copied());
    pts.push(wrap2(&pts[0], h));
    let mut out = strands.to_vec();
    out[si] = Strand::from_lifted(&pts, marks);
    out
}

/// Pass marks whose partner vanished become plain vertices.
fn fix_orphans(strands: &mut [Strand]) {
    let mut count: BTreeMap<Q2, usize> = BTreeMap::new();
    for s in strands.iter() {
        for (v, m) in s.marks.iter().enumerate() {
            if m.is_pass() {
                *count.entry(s.pts[v].clone()).or_default() += 1;
            }
        }
    }
    for s in strands.iter_mut() {
        for v in 0..s.len() {
            if s.marks[v].is_pass() && count[&s.pts[v]] == 1 {
                s.marks[v] = Mark::Plain;
            }
        }
    }
}

fn insert_points(s: &Strand, mut ins: Vec<(usize, Q, Mark)>) -> Result<Strand> {
    ins.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    for w in ins.windows(2) {
        if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
            return Err(inapplicable("two crossings at one point"));
        }
    }
    let l = s.lifted();
    let mut pts = Vec::new();
    let mut marks = Vec::new();
    let mut k = 0;
    for i in 0..s.len() {
        pts.push(l[i].clone());
        marks.push(s.marks[i]);
        while k < ins.len() && ins[k].0 == i {
            pts.push(lerp(&l[i], &l[i + 1], &ins[k].1));
            marks.push(ins[k].2);
            k += 1;
        }
    }
    pts.push(l[s.len()].clone());
    Ok(Strand::from_lifted(&pts, marks))
}

/// Marks every transverse intersection of segments `segs` of strand `si` with the rest of
/// the layout as a crossing; the new segments pass over when `over`. Returns the positions.
fn add_crossings(strands: &mut Vec<Strand>, si: usize, segs: std::ops::Range<usize>, over: bool) -> Result<Vec<Q2>> {
    let (m_new, m_old) = if over { (Mark::Over, Mark::Under) } else { (Mark::Under, Mark::Over) };
    let mut ins: BTreeMap<usize, Vec<(usize, Q, Mark)>> = BTreeMap::new();
    let mut found = Vec::new();
    for i in segs.clone() {
        let (a0, a1) = strands[si].segment(i);
        let alo = [to_f64(&a0[0]).min(to_f64(&a1[0])), to_f64(&a0[1]).min(to_f64(&a1[1]))];
        let ahi = [to_f64(&a0[0]).max(to_f64(&a1[0])), to_f64(&a0[1]).max(to_f64(&a1[1]))];
        for (ti, t) in strands.iter().enumerate() {
            if t.is_point() {
                continue;
            }
            for j in 0..t.len() {
                let both_new = ti == si && segs.contains(&j);
                if both_new && j < i {
                    continue;
                }
                let (b0, b1) = t.segment(j);
                let blo = [to_f64(&b0[0]).min(to_f64(&b1[0])), to_f64(&b0[1]).min(to_f64(&b1[1]))];
                let bhi = [to_f64(&b0[0]).max(to_f64(&b1[0])), to_f64(&b0[1]).max(to_f64(&b1[1]))];
                let r = |k: usize| ((alo[k] - bhi[k] - 1e-9).ceil() as i64)..=((ahi[k] - blo[k] + 1e-9).floor() as i64);
                for kx in r(0) {
                    for ky in r(1) {
                        if ti == si && j == i && (kx, ky) <= (0, 0) {
                            continue;
                        }
                        let c0 = wrap2(&b0, [kx, ky]);
                        let c1 = wrap2(&b1, [kx, ky]);
                        match intersect2(&a0, &a1, &c0, &c1) {
                            Hit::None => {}
                            Hit::Overlap => return Err(inapplicable("collinear overlap")),
                            Hit::Point { a, b, at } => {
                                let interior = |x: &Q| x.is_positive() && *x < one();
                                if interior(&a) && interior(&b) {
                                    let (ma, mb) = if both_new { (m_new, m_new.flipped()) } else { (m_new, m_old) };
                                    ins.entry(si).or_default().push((i, a, ma));
                                    ins.entry(ti).or_default().push((j, b, mb));
                                    found.push(frac2(&at));
                                } else if interior(&a) || interior(&b) {
                                    return Err(inapplicable("path touches a vertex"));
                                } else {
                                    let va = if a.is_zero() { i } else { (i + 1) % strands[si].len() };
                                    let vb = if b.is_zero() { j } else { (j + 1) % t.len() };
                                    let joint = ti == si && va == vb;
                                    let pass = strands[si].marks[va].is_pass() && t.marks[vb].is_pass();
                                    if !joint && !pass {
                                        return Err(inapplicable("path meets a vertex"));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    for (s, list) in ins {
        strands[s] = insert_points(&strands[s], list)?;
    }
    Ok(found)
}

fn finish(d: &TorusDiagram, strands: Vec<Strand>, delta: i64) -> Result<TorusDiagram> {
    if !layout_issues_after(d.strands()?, &strands).is_empty() {
        return Err(inapplicable("result is not regular"));
    }
    let out = d.with_strands(strands)?;
    if out.crossing_count() as i64 != d.crossing_count() as i64 + delta {
        return Err(inapplicable("unexpected crossing count"));
    }
    Ok(out)
}

/// Halving schedule shared by the geometric constructions.
fn attempts() -> impl Iterator<Item = Q> {
    (0..24).map(|j| q(1, 1 << j))
}

/// `(strand, segment, parameter)` of a point of the layout.
fn locate(strands: &[Strand], x: &Q2, only: Option<usize>) -> Option<(usize, usize, Q)> {
    for (si, s) in strands.iter().enumerate() {
        if only.is_some_and(|o| o != si) || s.is_point() {
            continue;
        }
        for i in 0..s.len() {
            let (a, b) = s.segment(i);
            let lo = [to_f64(&a[0]).min(to_f64(&b[0])), to_f64(&a[1]).min(to_f64(&b[1]))];
            let hi = [to_f64(&a[0]).max(to_f64(&b[0])), to_f64(&a[1]).max(to_f64(&b[1]))];
            let fx = [to_f64(&x[0]), to_f64(&x[1])];
            for kx in ((lo[0] - fx[0] - 1e-9).ceil() as i64)..=((hi[0] - fx[0] + 1e-9).floor() as i64) {
                for ky in ((lo[1] - fx[1] - 1e-9).ceil() as i64)..=((hi[1] - fx[1] + 1e-9).floor() as i64) {
                    let y = wrap2(x, [kx, ky]);
                    if on_segment2(&y, &a, &b) {
                        let d = sub2(&b, &a);
                        return Some((si, i, dot2(&sub2(&y, &a), &d) / dot2(&d, &d)));
                    }
                }
            }
        }
    }
    None
}

/// Arc of strand `si` from an event at `p0` to the next event at `p1`, optionally required
/// to run through a vertex at `via`.
fn find_arc(strands: &[Strand], si: usize, p0: &Q2, p1: &Q2, via: Option<&Q2>) -> Option<usize> {
    find_arcs(strands, si, p0, p1, via).into_iter().next()
}

fn find_arcs(strands: &[Strand], si: usize, p0: &Q2, p1: &Q2, via: Option<&Q2>) -> Vec<usize> {
    let s = &strands[si];
    let evs = s.event_vertices();
    let m = evs.len();
    (0..m).filter(|&e| {
        s.pts[evs[e]] == *p0
            && s.pts[evs[(e + 1) % m]] == *p1
            && via.map_or(true, |v| {
                let (a, len) = arc_span(s, e);
                (1..len).any(|k| s.pts[(a + k) % s.len()] == *v)
            })
    })
    .collect()
}

fn event_at(s: &Strand, p: &Q2, want: impl Fn(Mark) -> bool) -> Option<usize> {
    s.event_vertices().iter().position(|&v| s.pts[v] == *p && want(s.marks[v]))
}

// ---------------------------------------------------------------------------------------
// R1

struct KinkData {
    from: usize,
    to: usize,
    x: Q2,
    first_over: bool,
    left: bool,
}

fn kink_data(strands: &[Strand], (si, e): ArcRef) -> Option<KinkData> {
    let s = strands.get(si)?;
    let evs = s.event_vertices();
    let m = evs.len();
    if m < 2 || e >= m {
        return None;
    }
    let (v0, v1) = (evs[e], evs[(e + 1) % m]);
    if !s.marks[v0].is_pass() || !s.marks[v1].is_pass() || s.pts[v0] != s.pts[v1] {
        return None;
    }
    let pts = arc_points(s, e);
    if pts[0] != *pts.last().unwrap() {
        return None;
    }
    let poly = &pts[..pts.len() - 1];
    if !region_empty(strands, poly, &[(si, e)]) {
        return None;
    }
    Some(KinkData {
        from: v0,
        to: v1,
        x: pts[0].clone(),
        first_over: s.marks[v0] == Mark::Over,
        left: signed_area2(poly).is_positive(),
    })
}

fn r1_create(d: &TorusDiagram, arc: ArcRef, left: bool, first_over: bool) -> Result<(TorusDiagram, MoveSite)> {
    let strands = d.strands()?;
    let s = strands.get(arc.0).ok_or_else(|| inapplicable("no such strand"))?;
    if s.is_point() {
        return Err(inapplicable("axial point has no arc"));
    }
    let (a, len) = arc_span(s, arc.1);
    let seg = (a + len / 2) % s.len();
    let l = s.rotated(seg).lifted();
    let dv = sub2(&l[1], &l[0]);
    let nv = if left { perp(&dv) } else { scale2(&perp(&dv), &-one()) };
    let p = mid(&l[0], &l[1]);
    for delta in attempts().map(|t| t / qi(8)) {
        let at = |x: i64, y: i64| add2(&p, &add2(&scale2(&dv, &(qi(x) * &delta)), &scale2(&nv, &(qi(y) * &delta))));
        let path = vec![
            (l[0].clone(), s.marks[seg]),
            (at(-2, 0), Mark::Plain),
            (at(1, 2), Mark::Plain),
            (at(-1, 2), Mark::Plain),
            (at(2, 0), Mark::Plain),
        ];
        let apex = frac2(&at(1, 2));
        let mut st = reroute(strands, arc.0, seg, seg, path);
        let Ok(found) = add_crossings(&mut st, arc.0, 1..4, first_over) else { continue };
        if found.len() != 1 {
            continue;
        }
        let Ok(out) = finish(d, st, 1) else { continue };
        let ns = &out.strands()?[arc.0];
        let x = &found[0];
        if let Some(e) = find_arc(out.strands()?, arc.0, x, x, Some(&apex)) {
            let _ = ns;
            let kind = if first_over { MoveKind::R1a } else { MoveKind::R1b };
            return Ok((out, MoveSite { kind, dir: MoveDir::Inverse, anchor: Anchor::Kink { arc: (arc.0, e) } }));
        }
    }
    Err(inapplicable("no room for a kink"))
}

fn r1_reduce(d: &TorusDiagram, arc: ArcRef) -> Result<(TorusDiagram, MoveSite)> {
    let strands = d.strands()?;
    let k = kink_data(strands, arc).ok_or_else(|| inapplicable("not a removable kink"))?;
    let path = vec![(frac2(&k.x), Mark::Plain)];
    let st = reroute(strands, arc.0, k.from, k.to, path);
    let out = finish(d, st, -1)?;
    let ns = &out.strands()?[arc.0];
    let m = event_count(ns);
    let kind = if k.first_over { MoveKind::R1a } else { MoveKind::R1b };
    let back = MoveSite {
        kind,
        dir: MoveDir::Apply,
        anchor: Anchor::Curl { arc: (arc.0, m.max(1) - 1), left: k.left },
    };
    Ok((out, back))
}

// ---------------------------------------------------------------------------------------
// R2

struct BigonData {
    /// Route of arc `a` moved into the frame of arc `b`, oriented like `b`.
    alpha: Vec<Q2>,
    /// Lifted route of strand `b` rotated to start at the bigon.
    lb: Vec<Q2>,
    len_b: usize,
    from: usize,
    to: usize,
    b_over: bool,
}

fn bigon_data(strands: &[Strand], a: ArcRef, b: ArcRef) -> Option<BigonData> {
    if a == b {
        return None;
    }
    let sa = strands.get(a.0)?;
    let sb = strands.get(b.0)?;
    let ea = sa.event_vertices();
    let eb = sb.event_vertices();
    if ea.len() < 2 || eb.len() < 2 || a.1 >= ea.len() || b.1 >= eb.len() {
        return None;
    }
    let (a0, a1) = (ea[a.1], ea[(a.1 + 1) % ea.len()]);
    let (b0, b1) = (eb[b.1], eb[(b.1 + 1) % eb.len()]);
    if ![a0, a1].iter().all(|&v| sa.marks[v].is_pass()) || ![b0, b1].iter().all(|&v| sb.marks[v].is_pass()) {
        return None;
    }
    if sa.marks[a0] != sa.marks[a1] || sa.pts[a0] == sa.pts[a1] {
        return None;
    }
    let same = sb.pts[b0] == sa.pts[a0] && sb.pts[b1] == sa.pts[a1];
    if !same && !(sb.pts[b0] == sa.pts[a1] && sb.pts[b1] == sa.pts[a0]) {
        return None;
    }
    let la = arc_points(sa, a.1);
    let (_, len_b) = arc_span(sb, b.1);
    let lb = sb.rotated(b0).lifted();
    let mut alpha = if same { la } else { la.into_iter().rev().collect() };
    let shift = floor2(&sub2(&lb[0], &alpha[0]));
    if sub2(&lb[0], &alpha[0]) != [qi(shift[0]), qi(shift[1])] {
        return None;
    }
    alpha = alpha.iter().map(|p| wrap2(p, shift)).collect();
    if *alpha.last().unwrap() != lb[len_b] {
        return None;
    }
    let mut poly: Vec<Q2> = lb[..=len_b].to_vec();
    poly.extend(alpha[1..alpha.len() - 1].iter().rev().cloned());
    if !region_empty(strands, &poly, &[a, b]) {
        return None;
    }
    Some(BigonData { alpha, lb, len_b, from: b0, to: b1, b_over: sb.marks[b0] == Mark::Over })
}

fn norm_inf(d: &Q2) -> Q {
    d[0].abs().max(d[1].abs())
}

/// Quarter of the shortest segment of the routes, measured in the max norm.
fn offset_scale(routes: &[&[Q2]]) -> Q {
    routes
        .iter()
        .flat_map(|r| r.windows(2).map(|w| norm_inf(&sub2(&w[1], &w[0]))))
        .min()
        .unwrap_or_else(one)
        / qi(4)
}

/// Rational approximation of the unit vector along `d`.
fn unit_approx(d: &Q2) -> Q2 {
    const DEN: i64 = 1 << 30;
    let (x, y) = (to_f64(&d[0]), to_f64(&d[1]));
    let n = x.hypot(y);
    [q((x / n * DEN as f64).round() as i64, DEN), q((y / n * DEN as f64).round() as i64, DEN)]
}

/// Direction at an interior vertex pointing strictly to the `side` of both adjacent segments.
fn corner_normal(d_in: &Q2, d_out: &Q2, side: &Q) -> Option<Q2> {
    let (ui, uo) = (unit_approx(d_in), unit_approx(d_out));
    let candidates = [add2(&perp(&ui), &perp(&uo)), perp(&uo), perp(&ui)];
    candidates.into_iter().map(|n| scale2(&n, side)).find(|n| {
        (dot2(n, &perp(d_in)) * side).is_positive() && (dot2(n, &perp(d_out)) * side).is_positive()
    })
}

/// Interior vertices of `route` pushed a distance of order `eps` to its `side` (+1 left).
fn offset_points(route: &[Q2], side: &Q, eps: &Q) -> Option<Vec<Q2>> {
    (1..route.len() - 1)
        .map(|i| {
            let n = corner_normal(&sub2(&route[i], &route[i - 1]), &sub2(&route[i + 1], &route[i]), side)?;
            Some(add2(&route[i], &scale2(&n, eps)))
        })
        .collect()
}

fn r2_reduce(d: &TorusDiagram, a: ArcRef, b: ArcRef) -> Result<(TorusDiagram, MoveSite)> {
    let strands = d.strands()?;
    let bd = bigon_data(strands, a, b).ok_or_else(|| inapplicable("not a removable bigon"))?;
    let sb = &strands[b.0];
    let n = sb.len();
    let hb = sb.homology2();
    let before = sub2(&bd.lb[n - 1], &[qi(hb[0]), qi(hb[1])]);
    let after = bd.lb[bd.len_b + 1].clone();
    let (x1, x2) = (&bd.alpha[0], bd.alpha.last().unwrap());
    let side = sign_of(&cross2(&sub2(&bd.alpha[1], x1), &sub2(&before, x1)));
    let scale = offset_scale(&[&bd.alpha]);
    for t in attempts() {
        let eps = &t * &scale;
        let delta = &t / qi(4);
        let mut path = vec![(lerp(x1, &before, &delta), Mark::Plain)];
        let Some(off) = offset_points(&bd.alpha, &side, &eps) else { break };
        path.extend(off.into_iter().map(|p| (p, Mark::Plain)));
        path.push((lerp(x2, &after, &delta), Mark::Plain));
        let np = path.len();
        let mut st = reroute(strands, b.0, bd.from, bd.to, path.clone());
        fix_orphans(&mut st);
        let Ok(out) = finish(d, st, -2) else { continue };
        // inverse: finger from the middle of the new route back across the old side
        let seg = (np - 1) / 2;
        let ns = &out.strands()?[b.0];
        let (p0, p1) = ns.segment(seg);
        let pm = mid(&p0, &p1);
        let shift = floor2(&sub2(&pm, &mid(&path[seg].0, &path[seg + 1].0)));
        let qpt = wrap2(&mid(&bd.alpha[seg], &bd.alpha[seg + 1]), shift);
        let Some((qs, qseg, qt)) = locate(out.strands()?, &frac2(&qpt), None) else { continue };
        let back = MoveSite {
            kind: MoveKind::R2,
            dir: MoveDir::Apply,
            anchor: Anchor::Finger { a: (b.0, seg), ta: q(1, 2), b: (qs, qseg), tb: qt, over: bd.b_over },
        };
        return Ok((out, back));
    }
    Err(inapplicable("bigon could not be cleared"))
}

fn r2_create(
    d: &TorusDiagram,
    a: (usize, usize),
    ta: &Q,
    b: (usize, usize),
    tb: &Q,
    over: bool,
) -> Result<(TorusDiagram, MoveSite)> {
    let strands = d.strands()?;
    let (sa, sb) = match (strands.get(a.0), strands.get(b.0)) {
        (Some(x), Some(y)) if !x.is_point() && !y.is_point() && a.1 < x.len() && b.1 < y.len() => (x, y),
        _ => return Err(inapplicable("no such segment")),
    };
    if !ta.is_positive() || *ta >= one() || !tb.is_positive() || *tb >= one() {
        return Err(inapplicable("finger must start inside a segment"));
    }
    if a == b {
        return Err(inapplicable("finger needs two segments"));
    }
    let la = sa.rotated(a.1).lifted();
    let p = lerp(&la[0], &la[1], ta);
    let (b0, b1) = sb.segment(b.1);
    let q0 = lerp(&b0, &b1, tb);
    let mut best: Option<(Q, Q2)> = None;
    for kx in -1..=1 {
        for ky in -1..=1 {
            let c = wrap2(&q0, [kx, ky]);
            let e = sub2(&c, &p);
            let dist = dot2(&e, &e);
            if best.as_ref().map_or(true, |(b, _)| dist < *b) {
                best = Some((dist, c));
            }
        }
    }
    let qp = best.unwrap().1;
    let v = sub2(&qp, &p);
    let dv = sub2(&la[1], &la[0]);
    let room = ta.clone().min(one() - ta) / qi(2);
    for t in attempts() {
        let delta = &room * &t * &t;
        let mu = &t / qi(4);
        let f1 = sub2(&p, &scale2(&dv, &delta));
        let f2 = add2(&p, &scale2(&dv, &delta));
        let reach = one() + &mu;
        let g1 = add2(&f1, &scale2(&v, &reach));
        let g2 = add2(&f2, &scale2(&v, &reach));
        let tip = frac2(&g1);
        let path = vec![
            (la[0].clone(), sa.marks[a.1]),
            (f1, Mark::Plain),
            (g1, Mark::Plain),
            (g2, Mark::Plain),
            (f2, Mark::Plain),
        ];
        let mut st = reroute(strands, a.0, a.1, a.1, path);
        // the other segment index moves when both lie on the same strand
        let Ok(found) = add_crossings(&mut st, a.0, 1..4, over) else { continue };
        if found.len() != 2 {
            continue;
        }
        let Ok(out) = finish(d, st, 2) else { continue };
        let ns = out.strands()?;
        let fa = find_arc(ns, a.0, &found[0], &found[1], Some(&tip)).map(|e| (a.0, e)).or_else(|| {
            find_arc(ns, a.0, &found[1], &found[0], Some(&tip)).map(|e| (a.0, e))
        });
        let other = (0..ns.len()).find_map(|si| {
            [(0, 1), (1, 0)].iter().find_map(|&(i, k)| {
                find_arcs(ns, si, &found[i], &found[k], None)
                    .into_iter()
                    .find(|&e| Some((si, e)) != fa)
                    .map(|e| (si, e))
            })
        });
        if let (Some(fa), Some(ob)) = (fa, other) {
            let back = MoveSite { kind: MoveKind::R2, dir: MoveDir::Inverse, anchor: Anchor::Bigon { a: ob, b: fa } };
            return Ok((out, back));
        }
    }
    Err(inapplicable("finger could not be drawn"))
}

// ---------------------------------------------------------------------------------------
// R3

struct TriangleData {
    /// Side along the first partner strand, from the first crossing to the far corner.
    p_arc: Vec<Q2>,
    /// Side along the second partner strand, from the far corner to the second crossing.
    q_arc: Vec<Q2>,
    lm: Vec<Q2>,
    len_m: usize,
    from: usize,
    to: usize,
    over: bool,
}

/// Route between two consecutive events of strand `si` given as event indices `e` and
/// `e±1`, starting at the first; returned in the strand's own lifted frame.
fn route_between(s: &Strand, e: usize, forward: bool) -> Vec<Q2> {
    let m = s.event_vertices().len();
    if forward {
        arc_points(s, e)
    } else {
        let mut r = arc_points(s, (e + m - 1) % m);
        r.reverse();
        r
    }
}

fn shift_to(route: &[Q2], anchor: &Q2, at_start: bool) -> Option<Vec<Q2>> {
    let p = if at_start { &route[0] } else { route.last().unwrap() };
    let d = sub2(anchor, p);
    if !is_int(&d[0]) || !is_int(&d[1]) {
        return None;
    }
    let w = floor2(&d);
    Some(route.iter().map(|x| wrap2(x, w)).collect())
}

fn triangle_data(strands: &[Strand], mover: ArcRef, left: bool) -> Option<TriangleData> {
    let sm = strands.get(mover.0)?;
    let evs = sm.event_vertices();
    let m = evs.len();
    if m < 2 || mover.1 >= m {
        return None;
    }
    let (v1, v2) = (evs[mover.1], evs[(mover.1 + 1) % m]);
    if !sm.marks[v1].is_pass() || sm.marks[v1] != sm.marks[v2] || sm.pts[v1] == sm.pts[v2] {
        return None;
    }
    let over = sm.marks[v1] == Mark::Over;
    let lm = sm.rotated(v1).lifted();
    let (_, len_m) = arc_span(sm, mover.1);
    let (c1, c2) = (lm[0].clone(), lm[len_m].clone());
    // partner passes at the two crossings
    let partner = |pos: &Q2, skip: (usize, usize)| -> Option<(usize, usize)> {
        strands.iter().enumerate().find_map(|(si, s)| {
            let ev = s.event_vertices();
            ev.iter()
                .position(|&v| s.pts[v] == frac2(pos) && s.marks[v].is_pass() && (si, v) != skip)
                .map(|e| (si, e))
        })
    };
    let p = partner(&c1, (mover.0, v1))?;
    let qq = partner(&c2, (mover.0, v2))?;
    for pf in [true, false] {
        let sp = &strands[p.0];
        let mp = sp.event_vertices().len();
        if mp < 2 {
            return None;
        }
        let p_arc = shift_to(&route_between(sp, p.1, pf), &c1, true)?;
        let c3 = p_arc.last().unwrap().clone();
        let p_far = if pf { sp.event_vertices()[(p.1 + 1) % mp] } else { sp.event_vertices()[(p.1 + mp - 1) % mp] };
        if !sp.marks[p_far].is_pass() || frac2(&c3) == frac2(&c1) || frac2(&c3) == frac2(&c2) {
            continue;
        }
        for qf in [true, false] {
            let sq = &strands[qq.0];
            let mq = sq.event_vertices().len();
            if mq < 2 {
                continue;
            }
            let Some(q_rev) = shift_to(&route_between(sq, qq.1, qf), &c2, true) else { continue };
            let q_far = if qf { sq.event_vertices()[(qq.1 + 1) % mq] } else { sq.event_vertices()[(qq.1 + mq - 1) % mq] };
            if *q_rev.last().unwrap() != c3 || (qq.0, q_far) == (p.0, p_far) || !sq.marks[q_far].is_pass() {
                continue;
            }
            let q_arc: Vec<Q2> = q_rev.into_iter().rev().collect();
            let mut poly: Vec<Q2> = lm[..len_m].to_vec();
            poly.extend(q_arc.iter().rev().take(q_arc.len() - 1).cloned());
            poly.extend(p_arc.iter().rev().take(p_arc.len() - 1).cloned());
            if signed_area2(&poly).is_positive() != left {
                continue;
            }
            let p_ref = (p.0, if pf { p.1 } else { (p.1 + mp - 1) % mp });
            let q_ref = (qq.0, if qf { qq.1 } else { (qq.1 + mq - 1) % mq });
            if !region_empty(strands, &poly, &[mover, p_ref, q_ref]) {
                continue;
            }
            return Some(TriangleData { p_arc, q_arc, lm, len_m, from: v1, to: v2, over });
        }
    }
    None
}

fn r3(d: &TorusDiagram, mover: ArcRef, left: bool) -> Result<(TorusDiagram, MoveSite)> {
    let strands = d.strands()?;
    let td = triangle_data(strands, mover, left).ok_or_else(|| inapplicable("not a movable triangle"))?;
    let sm = &strands[mover.0];
    let n = sm.len();
    let h = sm.homology2();
    let before = sub2(&td.lm[n - 1], &[qi(h[0]), qi(h[1])]);
    let after = td.lm[td.len_m + 1].clone();
    let c1 = &td.p_arc[0];
    let c2 = td.q_arc.last().unwrap();
    let c3 = td.q_arc[0].clone();
    let side_p = sign_of(&cross2(&sub2(&td.p_arc[1], c1), &sub2(&before, c1)));
    let lq = td.q_arc.len();
    let side_q = sign_of(&cross2(&sub2(c2, &td.q_arc[lq - 2]), &sub2(&after, c2)));
    let a = sub2(&td.p_arc[td.p_arc.len() - 2], &c3);
    let b = sub2(&td.q_arc[1], &c3);
    let scale = offset_scale(&[&td.p_arc, &td.q_arc]);
    let (ua, ub) = (unit_approx(&a), unit_approx(&b));
    for t in attempts() {
        let eps = &t * &scale;
        let delta = &t / qi(4);
        let (Some(off_p), Some(off_q)) = (offset_points(&td.p_arc, &side_p, &eps), offset_points(&td.q_arc, &side_q, &eps))
        else {
            break;
        };
        let mut path = vec![(lerp(c1, &before, &delta), Mark::Plain)];
        path.extend(off_p.into_iter().map(|p| (p, Mark::Plain)));
        path.push((sub2(&c3, &scale2(&add2(&ua, &ub), &eps)), Mark::Plain));
        path.extend(off_q.into_iter().map(|p| (p, Mark::Plain)));
        path.push((lerp(c2, &after, &delta), Mark::Plain));
        let np = path.len();
        let mut st = reroute(strands, mover.0, td.from, td.to, path);
        fix_orphans(&mut st);
        let Ok(found) = add_crossings(&mut st, mover.0, 0..np - 1, td.over) else { continue };
        if found.len() != 2 {
            continue;
        }
        let Ok(out) = finish(d, st, 0) else { continue };
        let ns = out.strands()?;
        let e = find_arc(ns, mover.0, &found[0], &found[1], None)
            .or_else(|| find_arc(ns, mover.0, &found[1], &found[0], None));
        // the crossed triangle ends up on the other side of the moved arc
        if let Some(e) = e.filter(|&e| triangle_data(ns, (mover.0, e), !left).is_some()) {
            let anchor = Anchor::Triangle { mover: (mover.0, e), left: !left };
            return Ok((out, MoveSite { kind: MoveKind::R3, dir: MoveDir::Apply, anchor }));
        }
    }
    Err(inapplicable("triangle could not be crossed"))
}

// ---------------------------------------------------------------------------------------
// R4, R5

fn param_choices() -> [Q; 5] {
    [q(1, 2), q(1, 3), q(2, 3), q(1, 5), q(4, 5)]
}

fn r4(d: &TorusDiagram, si: usize, e: usize, forward: bool) -> Result<(TorusDiagram, MoveSite)> {
    let strands = d.strands()?;
    let s = strands.get(si).ok_or_else(|| inapplicable("no such strand"))?;
    let evs = s.event_vertices();
    let m = evs.len();
    if e >= m || !s.marks[evs[e]].is_n() || m < 2 {
        return Err(inapplicable("no N-point next to a crossing"));
    }
    let vn = evs[e];
    let vx = if forward { evs[(e + 1) % m] } else { evs[(e + m - 1) % m] };
    if !s.marks[vx].is_pass() {
        return Err(inapplicable("neighbouring event is not a crossing"));
    }
    let xpos = s.pts[vx].clone();
    let nmark = s.marks[vn];
    let seg = if forward { vx } else { (vx + s.len() - 1) % s.len() };
    let (a, b) = s.segment(seg);
    let t = param_choices()
        .into_iter()
        .find(|t| !on_edge(&lerp(&a, &b, t)))
        .ok_or_else(|| inapplicable("no room for the N-point"))?;
    let npos = frac2(&lerp(&a, &b, &t));
    let mut st = strands.to_vec();
    st[si].marks[vn] = Mark::Plain;
    for x in st.iter_mut() {
        for v in 0..x.len() {
            if x.marks[v].is_pass() && x.pts[v] == xpos {
                x.marks[v] = x.marks[v].flipped();
            }
        }
    }
    st[si] = insert_points(&st[si], vec![(seg, t, nmark)])?;
    let out = finish(d, st, 0)?;
    let ne = event_at(&out.strands()?[si], &npos, |m| m.is_n()).ok_or_else(|| inapplicable("lost N-point"))?;
    let back = MoveSite { kind: MoveKind::R4, dir: MoveDir::Apply, anchor: Anchor::Slide { strand: si, event: ne, forward: !forward } };
    Ok((out, back))
}

fn r5_create(d: &TorusDiagram, arc: ArcRef, up_first: bool) -> Result<(TorusDiagram, MoveSite)> {
    let strands = d.strands()?;
    let s = strands.get(arc.0).ok_or_else(|| inapplicable("no such strand"))?;
    if s.is_point() {
        return Err(inapplicable("axial point has no arc"));
    }
    let (a0, len) = arc_span(s, arc.1);
    let seg = (a0 + len / 2) % s.len();
    let (a, b) = s.segment(seg);
    let (m1, m2) = if up_first { (Mark::Up, Mark::Down) } else { (Mark::Down, Mark::Up) };
    for (t1, t2) in [(q(1, 3), q(2, 3)), (q(1, 4), q(1, 2)), (q(2, 5), q(3, 5)), (q(1, 5), q(4, 5))] {
        if on_edge(&lerp(&a, &b, &t1)) || on_edge(&lerp(&a, &b, &t2)) {
            continue;
        }
        let first = frac2(&lerp(&a, &b, &t1));
        let mut st = strands.to_vec();
        st[arc.0] = insert_points(s, vec![(seg, t1, m1), (seg, t2, m2)])?;
        let out = finish(d, st, 0)?;
        let ne = event_at(&out.strands()?[arc.0], &first, |m| m.is_n()).ok_or_else(|| inapplicable("lost N-point"))?;
        let kind = if up_first { MoveKind::R5a } else { MoveKind::R5b };
        return Ok((out, MoveSite { kind, dir: MoveDir::Inverse, anchor: Anchor::NPair { strand: arc.0, event: ne } }));
    }
    Err(inapplicable("no room for an N-pair"))
}

fn npair(s: &Strand, e: usize) -> Option<(usize, usize)> {
    let evs = s.event_vertices();
    let m = evs.len();
    if m < 2 || e >= m {
        return None;
    }
    let (v1, v2) = (evs[e], evs[(e + 1) % m]);
    let ok = s.marks[v1].is_n() && s.marks[v2] == s.marks[v1].flipped();
    ok.then_some((v1, v2))
}

fn r5_reduce(d: &TorusDiagram, si: usize, e: usize) -> Result<(TorusDiagram, MoveSite)> {
    let strands = d.strands()?;
    let s = strands.get(si).ok_or_else(|| inapplicable("no such strand"))?;
    let (v1, v2) = npair(s, e).ok_or_else(|| inapplicable("no adjacent opposite N-points"))?;
    let up_first = s.marks[v1] == Mark::Up;
    let mut st = strands.to_vec();
    st[si].marks[v1] = Mark::Plain;
    st[si].marks[v2] = Mark::Plain;
    let out = finish(d, st, 0)?;
    let ns = &out.strands()?[si];
    // the arc that now runs through the old position
    let evs = ns.event_vertices();
    let arc_e = if evs.is_empty() { 0 } else { evs.iter().rposition(|&v| v < v1).unwrap_or(evs.len() - 1) };
    let kind = if up_first { MoveKind::R5a } else { MoveKind::R5b };
    Ok((out, MoveSite { kind, dir: MoveDir::Apply, anchor: Anchor::NInsert { arc: (si, arc_e) } }))
}

// ---------------------------------------------------------------------------------------
// R6-R9

fn shift(d: &TorusDiagram, kind: MoveKind, dir: MoveDir, by: &Q2) -> Result<(TorusDiagram, MoveSite)> {
    let strands = d.strands()?;
    let st = translate(strands, by);
    let out = finish(d, st, 0)?;
    let back_dir = if dir == MoveDir::Apply { MoveDir::Inverse } else { MoveDir::Apply };
    let neg = [-by[0].clone(), -by[1].clone()];
    Ok((out, MoveSite { kind, dir: back_dir, anchor: Anchor::Shift { by: neg } }))
}

/// Translation taking `x` just across the nearest edge in direction `k` (0: across
/// `u = 0`, 1: across `v = 0`, 2: through the corner).
fn shift_across(strands: &[Strand], x: &Q2, k: usize) -> Option<Q2> {
    let step = |c: &Q| -> Q { if *c < q(1, 2) { -c.clone() } else { one() - c } };
    for eps in nudges() {
        let by = match k {
            0 => [step(&x[0]) + &eps[0] * sign_of(&step(&x[0])), zero()],
            1 => [zero(), step(&x[1]) + &eps[1] * sign_of(&step(&x[1]))],
            _ => [
                step(&x[0]) + &eps[0] * sign_of(&step(&x[0])),
                step(&x[1]) + &eps[1] * sign_of(&step(&x[1])),
            ],
        };
        if is_valid(&translate(strands, &by)) {
            return Some(by);
        }
    }
    None
}

// ---------------------------------------------------------------------------------------
// enumeration and dispatch

/// Which families of sites to enumerate.
#[derive(Clone, Copy, Debug)]
pub struct SiteFilter {
    pub creates: bool,
    pub shifts: bool,
}

impl SiteFilter {
    pub const ALL: SiteFilter = SiteFilter { creates: true, shifts: true };
    /// Moves that never add crossings and change the code: the search neighbourhood.
    pub const SEARCH: SiteFilter = SiteFilter { creates: false, shifts: false };
}

/// All applicable sites; crossing-reducing sites come first.
pub fn find_moves(d: &TorusDiagram) -> Vec<MoveSite> {
    find_moves_filtered(d, SiteFilter::ALL)
}

pub fn find_moves_filtered(d: &TorusDiagram, filter: SiteFilter) -> Vec<MoveSite> {
    let Ok(strands) = d.strands() else { return vec![] };
    let mut out = Vec::new();
    let all_arcs = arcs(strands);
    // R1 reduce
    for &arc in &all_arcs {
        if let Some(k) = kink_data(strands, arc) {
            let kind = if k.first_over { MoveKind::R1a } else { MoveKind::R1b };
            out.push(MoveSite { kind, dir: MoveDir::Inverse, anchor: Anchor::Kink { arc } });
        }
    }
    // R2 reduce
    for (i, &a) in all_arcs.iter().enumerate() {
        for &b in &all_arcs[i + 1..] {
            if bigon_data(strands, a, b).is_some() {
                out.push(MoveSite { kind: MoveKind::R2, dir: MoveDir::Inverse, anchor: Anchor::Bigon { a, b } });
            }
        }
    }
    // R3
    for &arc in &all_arcs {
        for left in [true, false] {
            if triangle_data(strands, arc, left).is_some() {
                out.push(MoveSite { kind: MoveKind::R3, dir: MoveDir::Apply, anchor: Anchor::Triangle { mover: arc, left } });
            }
        }
    }
    // R4
    for (si, s) in strands.iter().enumerate() {
        let evs = s.event_vertices();
        let m = evs.len();
        if m < 2 {
            continue;
        }
        for e in 0..m {
            if !s.marks[evs[e]].is_n() {
                continue;
            }
            for forward in [true, false] {
                let nb = if forward { evs[(e + 1) % m] } else { evs[(e + m - 1) % m] };
                if s.marks[nb].is_pass() {
                    out.push(MoveSite { kind: MoveKind::R4, dir: MoveDir::Apply, anchor: Anchor::Slide { strand: si, event: e, forward } });
                }
            }
        }
    }
    // R5 reduce
    for (si, s) in strands.iter().enumerate() {
        let m = s.event_vertices().len();
        for e in 0..m {
            if let Some((v1, _)) = npair(s, e) {
                let kind = if s.marks[v1] == Mark::Up { MoveKind::R5a } else { MoveKind::R5b };
                out.push(MoveSite { kind, dir: MoveDir::Inverse, anchor: Anchor::NPair { strand: si, event: e } });
            }
        }
    }
    if filter.shifts {
        for c in &d.crossings {
            if let Some(x) = &c.pos {
                for (k, kind) in [(0, MoveKind::R7a), (1, MoveKind::R7b)] {
                    if let Some(by) = shift_across(strands, x, k) {
                        out.push(MoveSite { kind, dir: MoveDir::Apply, anchor: Anchor::Shift { by } });
                    }
                }
            }
        }
        for n in &d.npoints {
            if let Some(x) = &n.pos {
                for k in 0..2 {
                    if let Some(by) = shift_across(strands, x, k) {
                        out.push(MoveSite { kind: MoveKind::R9, dir: MoveDir::Apply, anchor: Anchor::Shift { by } });
                    }
                }
            }
        }
        for (arc, x) in samples(strands) {
            if strands[arc.0].is_point() {
                continue;
            }
            if let Some(by) = shift_across(strands, &x, 0) {
                out.push(MoveSite { kind: MoveKind::R6, dir: MoveDir::Apply, anchor: Anchor::Shift { by } });
            }
            if let Some(by) = shift_across(strands, &x, 2) {
                out.push(MoveSite { kind: MoveKind::R8, dir: MoveDir::Apply, anchor: Anchor::Shift { by } });
            }
        }
    }
    if filter.creates {
        for &arc in &all_arcs {
            for up_first in [true, false] {
                let kind = if up_first { MoveKind::R5a } else { MoveKind::R5b };
                out.push(MoveSite { kind, dir: MoveDir::Apply, anchor: Anchor::NInsert { arc } });
            }
        }
        for &arc in &all_arcs {
            for kind in [MoveKind::R1a, MoveKind::R1b] {
                for left in [true, false] {
                    out.push(MoveSite { kind, dir: MoveDir::Apply, anchor: Anchor::Curl { arc, left } });
                }
            }
        }
        for (a, b) in finger_candidates(strands) {
            for over in [true, false] {
                out.push(MoveSite {
                    kind: MoveKind::R2,
                    dir: MoveDir::Apply,
                    anchor: Anchor::Finger { a, ta: q(1, 2), b, tb: q(1, 2), over },
                });
            }
        }
    }
    out
}

/// Pairs of arc-middle segments joined by a straight path that meets nothing else.
fn finger_candidates(strands: &[Strand]) -> Vec<((usize, usize), (usize, usize))> {
    let mids: Vec<(usize, usize)> = arcs(strands)
        .into_iter()
        .map(|(si, e)| {
            let s = &strands[si];
            let (a, len) = arc_span(s, e);
            (si, (a + len / 2) % s.len())
        })
        .collect();
    let mut out = Vec::new();
    for &a in &mids {
        for &b in &mids {
            if a == b {
                continue;
            }
            let (a0, a1) = strands[a.0].segment(a.1);
            let (b0, b1) = strands[b.0].segment(b.1);
            let p = mid(&a0, &a1);
            let q0 = mid(&b0, &b1);
            let qp = (-1..=1)
                .flat_map(|kx| (-1..=1).map(move |ky| [kx, ky]))
                .map(|k| wrap2(&q0, k))
                .min_by(|x, y| {
                    let dx = sub2(x, &p);
                    let dy = sub2(y, &p);
                    dot2(&dx, &dx).cmp(&dot2(&dy, &dy))
                })
                .unwrap();
            if path_clear(strands, &p, &qp, a, b) {
                out.push((a, b));
            }
        }
    }
    out
}

fn path_clear(strands: &[Strand], p: &Q2, qp: &Q2, a: (usize, usize), b: (usize, usize)) -> bool {
    let lo = [to_f64(&p[0]).min(to_f64(&qp[0])), to_f64(&p[1]).min(to_f64(&qp[1]))];
    let hi = [to_f64(&p[0]).max(to_f64(&qp[0])), to_f64(&p[1]).max(to_f64(&qp[1]))];
    for (si, s) in strands.iter().enumerate() {
        if s.is_point() {
            let x = &s.pts[0];
            for kx in ((lo[0] - to_f64(&x[0])).floor() as i64)..=((hi[0] - to_f64(&x[0])).ceil() as i64) {
                for ky in ((lo[1] - to_f64(&x[1])).floor() as i64)..=((hi[1] - to_f64(&x[1])).ceil() as i64) {
                    if on_segment2(&wrap2(x, [kx, ky]), p, qp) {
                        return false;
                    }
                }
            }
            continue;
        }
        for j in 0..s.len() {
            let (c0, c1) = s.segment(j);
            let blo = [to_f64(&c0[0]).min(to_f64(&c1[0])), to_f64(&c0[1]).min(to_f64(&c1[1]))];
            let bhi = [to_f64(&c0[0]).max(to_f64(&c1[0])), to_f64(&c0[1]).max(to_f64(&c1[1]))];
            let r = |k: usize| ((lo[k] - bhi[k] - 1e-9).ceil() as i64)..=((hi[k] - blo[k] + 1e-9).floor() as i64);
            for kx in r(0) {
                for ky in r(1) {
                    let d0 = wrap2(&c0, [kx, ky]);
                    let d1 = wrap2(&c1, [kx, ky]);
                    match intersect2(p, qp, &d0, &d1) {
                        Hit::None => {}
                        Hit::Overlap => return false,
                        Hit::Point { a: ta, .. } => {
                            let own = (si, j) == a && ta.is_zero();
                            let target = (si, j) == b && ta == one();
                            if !own && !target {
                                return false;
                            }
                        }
                    }
                }
            }
        }
    }
    true
}

pub fn apply_move(d: &TorusDiagram, site: &MoveSite) -> Result<TorusDiagram> {
    apply_move_with_inverse(d, site).map(|(d, _)| d)
}

/// Applies a move and returns a site in the new diagram that undoes it.
pub fn apply_move_with_inverse(d: &TorusDiagram, site: &MoveSite) -> Result<(TorusDiagram, MoveSite)> {
    use MoveKind::*;
    let r = match (&site.anchor, site.kind, site.dir) {
        (Anchor::Curl { arc, left }, R1a | R1b, MoveDir::Apply) => r1_create(d, *arc, *left, site.kind == R1a),
        (Anchor::Kink { arc }, R1a | R1b, MoveDir::Inverse) => {
            let k = kink_data(d.strands()?, *arc).ok_or_else(|| inapplicable("not a removable kink"))?;
            if k.first_over != (site.kind == R1a) {
                return Err(inapplicable("kink has the other over/under type"));
            }
            r1_reduce(d, *arc)
        }
        (Anchor::Finger { a, ta, b, tb, over }, R2, MoveDir::Apply) => r2_create(d, *a, ta, *b, tb, *over),
        (Anchor::Bigon { a, b }, R2, MoveDir::Inverse) => r2_reduce(d, *a, *b),
        (Anchor::Triangle { mover, left }, R3, _) => r3(d, *mover, *left),
        (Anchor::Slide { strand, event, forward }, R4, _) => r4(d, *strand, *event, *forward),
        (Anchor::NInsert { arc }, R5a | R5b, MoveDir::Apply) => r5_create(d, *arc, site.kind == R5a),
        (Anchor::NPair { strand, event }, R5a | R5b, MoveDir::Inverse) => {
            let s = d.strands()?.get(*strand).ok_or_else(|| inapplicable("no such strand"))?;
            let (v1, _) = npair(s, *event).ok_or_else(|| inapplicable("no adjacent opposite N-points"))?;
            if (s.marks[v1] == Mark::Up) != (site.kind == R5a) {
                return Err(inapplicable("N-pair has the other order"));
            }
            r5_reduce(d, *strand, *event)
        }
        (Anchor::Shift { by }, k, dir) if k.is_shift() => shift(d, k, dir, by),
        _ => Err(inapplicable(format!("anchor does not fit {}", site.kind))),
    }?;
    Ok(r)
}
