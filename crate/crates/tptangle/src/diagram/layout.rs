//! Geometric validity of diagram layouts.

use super::{Mark, Strand};
use crate::error::{Error, Result};
use crate::exact::*;
use crate::geom::{intersect2, on_segment2, Hit};
use num_traits::{Signed, Zero};
use std::collections::HashSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Issue {
    /// Vertex lying on one of the two boundary circles.
    VertexOnEdge { strand: usize, vertex: usize },
    /// Segment passing through the corner point of the square.
    ThroughCorner { strand: usize, segment: usize },
    ZeroLength { strand: usize, segment: usize },
    /// Crossing pass or N-point where the strand does not continue straight.
    BentEvent { strand: usize, vertex: usize },
    /// Intersection that is not a marked crossing, or a collinear overlap.
    StrayIntersection { a: (usize, usize), b: (usize, usize) },
    /// Axial point lying on another strand.
    PointOnStrand { point: usize, strand: usize },
}

impl Issue {
    /// Issues that a small translation of the whole layout can remove.
    pub fn is_edge_issue(&self) -> bool {
        matches!(self, Issue::VertexOnEdge { .. } | Issue::ThroughCorner { .. })
    }
}

struct Seg {
    strand: usize,
    index: usize,
    a: Q2,
    b: Q2,
    lo: [f64; 2],
    hi: [f64; 2],
}

fn segments(strands: &[Strand]) -> Vec<Seg> {
    let mut out = Vec::new();
    for (si, s) in strands.iter().enumerate() {
        if s.is_point() {
            continue;
        }
        for i in 0..s.len() {
            let (a, b) = s.segment(i);
            let (fa, fb) = ([to_f64(&a[0]), to_f64(&a[1])], [to_f64(&b[0]), to_f64(&b[1])]);
            out.push(Seg {
                strand: si,
                index: i,
                lo: [fa[0].min(fb[0]), fa[1].min(fb[1])],
                hi: [fa[0].max(fb[0]), fa[1].max(fb[1])],
                a,
                b,
            });
        }
    }
    out
}

fn krange(alo: f64, ahi: f64, blo: f64, bhi: f64) -> std::ops::RangeInclusive<i64> {
    let eps = 1e-9;
    ((alo - bhi - eps).ceil() as i64)..=((ahi - blo + eps).floor() as i64)
}

pub fn passes_through_corner(a: &Q2, b: &Q2) -> bool {
    let d = sub2(b, a);
    if d[0].is_zero() {
        return false; // vertical segment; endpoints are checked separately
    }
    let (lo, hi) = if a[0] <= b[0] { (&a[0], &b[0]) } else { (&b[0], &a[0]) };
    let mut u = -floor_q(&-lo.clone());
    let top = floor_q(hi);
    while u <= top {
        let t = (Q::from(u.clone()) - &a[0]) / &d[0];
        let v = &a[1] + &d[1] * t;
        if is_int(&v) {
            return true;
        }
        u += 1;
    }
    false
}

/// Segment identity for incremental checks: exact endpoints and the marks at both ends.
/// Segment identity by raw numerators and denominators. Rationals are kept reduced, so
/// this is exact, and much cheaper to hash than the rationals themselves.
type SegKey = ([num_bigint::BigInt; 8], Mark, Mark);

fn seg_key(s: &Strand, i: usize) -> SegKey {
    let (a, b) = s.segment(i);
    let raw = |x: &Q| (x.numer().clone(), x.denom().clone());
    let parts = [raw(&a[0]), raw(&a[1]), raw(&b[0]), raw(&b[1])];
    let key = std::array::from_fn(|k| if k % 2 == 0 { parts[k / 2].0.clone() } else { parts[k / 2].1.clone() });
    (key, s.marks[i], s.marks[(i + 1) % s.len()])
}

fn seg_keys(strands: &[Strand]) -> HashSet<SegKey> {
    strands.iter().flat_map(|s| (0..s.len()).map(move |i| seg_key(s, i))).collect()
}

/// All geometric problems of a layout. Ties count as problems.
pub fn layout_issues(strands: &[Strand]) -> Vec<Issue> {
    issues_where(strands, None)
}

/// Problems of `strands` given that `prev` is a valid layout: pairs of segments that
/// both occur unchanged in `prev` are not re-examined.
pub fn layout_issues_after(prev: &[Strand], strands: &[Strand]) -> Vec<Issue> {
    issues_where(strands, Some(&seg_keys(prev)))
}

fn issues_where(strands: &[Strand], known: Option<&HashSet<SegKey>>) -> Vec<Issue> {
    let fresh = |s: &Strand, i: usize| -> bool {
        known.is_none_or(|k| !k.contains(&seg_key(s, i)))
    };
    let mut issues = Vec::new();
    for (si, s) in strands.iter().enumerate() {
        for v in 0..s.len() {
            if s.pts[v][0].is_zero() || s.pts[v][1].is_zero() {
                issues.push(Issue::VertexOnEdge { strand: si, vertex: v });
            }
        }
        if s.is_point() {
            if !s.marks[0].is_n() {
                issues.push(Issue::BentEvent { strand: si, vertex: 0 });
            }
            continue;
        }
        for i in 0..s.len() {
            if !fresh(s, i) {
                continue;
            }
            let (a, b) = s.segment(i);
            if a == b {
                issues.push(Issue::ZeroLength { strand: si, segment: i });
            } else if passes_through_corner(&a, &b) {
                issues.push(Issue::ThroughCorner { strand: si, segment: i });
            }
        }
        for v in 0..s.len() {
            if s.marks[v].is_event() {
                let prev = (v + s.len() - 1) % s.len();
                let (p0, p1) = s.segment(prev);
                let (n0, n1) = s.segment(v);
                let din = sub2(&p1, &p0);
                let dout = sub2(&n1, &n0);
                if !cross2(&din, &dout).is_zero() || !dot2(&din, &dout).is_positive() {
                    issues.push(Issue::BentEvent { strand: si, vertex: v });
                }
            }
        }
    }
    let segs = segments(strands);
    let is_fresh: Vec<bool> = segs.iter().map(|g| fresh(&strands[g.strand], g.index)).collect();
    for i in 0..segs.len() {
        for j in i..segs.len() {
            if !is_fresh[i] && !is_fresh[j] {
                continue;
            }
            let (s, t) = (&segs[i], &segs[j]);
            for kx in krange(s.lo[0], s.hi[0], t.lo[0], t.hi[0]) {
                for ky in krange(s.lo[1], s.hi[1], t.lo[1], t.hi[1]) {
                    if i == j && (kx, ky) <= (0, 0) {
                        continue;
                    }
                    let c = wrap2(&t.a, [kx, ky]);
                    let d = wrap2(&t.b, [kx, ky]);
                    match intersect2(&s.a, &s.b, &c, &d) {
                        Hit::None => {}
                        Hit::Overlap => issues.push(Issue::StrayIntersection {
                            a: (s.strand, s.index),
                            b: (t.strand, t.index),
                        }),
                        Hit::Point { a, b, .. } => {
                            if !legal_touch(strands, s, &a, t, &b) {
                                issues.push(Issue::StrayIntersection {
                                    a: (s.strand, s.index),
                                    b: (t.strand, t.index),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    for (pi, p) in strands.iter().enumerate() {
        if !p.is_point() {
            continue;
        }
        let x = &p.pts[0];
        let fx = [to_f64(&x[0]), to_f64(&x[1])];
        let point_fresh = fresh(p, 0);
        for (s, _) in segs.iter().zip(&is_fresh).filter(|(_, f)| point_fresh || **f) {
            for kx in krange(fx[0], fx[0], s.lo[0], s.hi[0]) {
                for ky in krange(fx[1], fx[1], s.lo[1], s.hi[1]) {
                    if on_segment2(x, &wrap2(&s.a, [kx, ky]), &wrap2(&s.b, [kx, ky])) {
                        issues.push(Issue::PointOnStrand { point: pi, strand: s.strand });
                    }
                }
            }
        }
        for (qi_, other) in strands.iter().enumerate().skip(pi + 1) {
            if other.is_point() && other.pts[0] == *x {
                issues.push(Issue::PointOnStrand { point: pi, strand: qi_ });
            }
        }
    }
    issues
}

/// An intersection at parameters `a`, `b` is legal when it is the shared vertex of two
/// consecutive segments, or the meeting point of two distinct pass vertices.
fn legal_touch(strands: &[Strand], s: &Seg, a: &Q, t: &Seg, b: &Q) -> bool {
    let end = |x: &Q, seg: &Seg| -> Option<usize> {
        let n = strands[seg.strand].len();
        if x.is_zero() {
            Some(seg.index)
        } else if *x == one() {
            Some((seg.index + 1) % n)
        } else {
            None
        }
    };
    let (Some(va), Some(vb)) = (end(a, s), end(b, t)) else {
        return false;
    };
    if s.strand == t.strand && va == vb {
        return true;
    }
    strands[s.strand].marks[va].is_pass() && strands[t.strand].marks[vb].is_pass()
}

pub fn is_valid(strands: &[Strand]) -> bool {
    layout_issues(strands).is_empty()
}

pub fn translate(strands: &[Strand], tau: &Q2) -> Vec<Strand> {
    strands
        .iter()
        .map(|s| {
            let pts: Vec<Q2> = s.lifted().iter().map(|p| add2(p, tau)).collect();
            Strand::from_lifted(&pts, s.marks.clone())
        })
        .collect()
}

/// Translation offsets tried, in order, when a layout touches the square's edges.
pub fn nudges() -> impl Iterator<Item = Q2> {
    (1..64i64).map(|j| [q(j * 7 % 61, 61 * 64), q(j * 11 % 59, 59 * 64)])
}

/// Returns the layout unchanged if valid, otherwise a small translate of it that keeps
/// clear of the square's edges. Fails if the problems are not edge problems.
pub fn renormalize(strands: Vec<Strand>) -> Result<Vec<Strand>> {
    let issues = layout_issues(&strands);
    if issues.is_empty() {
        return Ok(strands);
    }
    if !issues.iter().all(Issue::is_edge_issue) {
        return Err(Error::MalformedDiagram(format!("layout is not regular: {:?}", issues[0])));
    }
    for tau in nudges() {
        let moved = translate(&strands, &tau);
        if is_valid(&moved) {
            return Ok(moved);
        }
    }
    Err(Error::MalformedDiagram("no translate of the layout avoids the square's edges".into()))
}

/// Convenience for tests: whether any vertex carries an event mark.
pub fn event_count(strands: &[Strand]) -> usize {
    strands.iter().map(|s| s.marks.iter().filter(|m| **m != Mark::Plain).count()).sum()
}
