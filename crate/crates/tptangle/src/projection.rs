//! Regular projections of unit cells onto the 2-torus, tridiagrams, and lifting back.

use crate::diagram::layout::passes_through_corner;
use crate::diagram::{apply_frame_q, frame, frame_inverse, Axis, Mark, Orient, Strand, TorusDiagram};
use crate::error::{Error, Result};
use crate::exact::*;
use crate::geom::{intersect2, on_segment2, Hit};
use crate::unit_cell::{min_distance2, refit_separation, PLCurve, UnitCell};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionSpec {
    pub axis: Axis,
    pub orient: Orient,
    /// Face offset used only when drawing front/back faces; classification uses N-point directions.
    pub epsilon: Q,
    pub jitter_seed: u64,
    /// Defaults to an eighth of the cell's minimal separation.
    pub jitter_magnitude: Option<Q>,
    pub max_retries: u32,
}

impl ProjectionSpec {
    pub fn new(axis: Axis, orient: Orient) -> Self {
        ProjectionSpec { axis, orient, epsilon: q(1, 8), jitter_seed: 0, jitter_magnitude: None, max_retries: 32 }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.jitter_seed = seed;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Condition number 1..=8 of the regular-projection definition.
    pub condition: u8,
    pub description: String,
    /// Offending point in diagram coordinates, when there is one.
    pub locus: Option<Q2>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RegularityReport {
    pub violations: Vec<Violation>,
}

impl RegularityReport {
    pub fn is_regular(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, condition: u8, description: impl Into<String>, locus: Option<Q2>) {
        self.violations.push(Violation { condition, description: description.into(), locus });
    }
}

/// Components in diagram-frame coordinates `(u, v, h)`.
fn framed(cell: &UnitCell, axis: Axis, orient: Orient) -> Vec<PLCurve> {
    let f = frame(axis, orient);
    cell.components
        .iter()
        .map(|c| PLCurve::from_lifted(&c.lifted().iter().map(|p| apply_frame_q(&f, p)).collect::<Vec<_>>()))
        .collect()
}

fn uv(p: &Q3) -> Q2 {
    [p[0].clone(), p[1].clone()]
}

fn is_vertical(c: &PLCurve) -> bool {
    (0..c.len()).all(|i| {
        let (a, b) = c.segment(i);
        a[0] == b[0] && a[1] == b[1]
    })
}

struct Seg {
    comp: usize,
    index: usize,
    a: Q3,
    b: Q3,
    lo: [f64; 2],
    hi: [f64; 2],
}

/// A transverse double point of the projection.
#[derive(Clone, Debug)]
struct DoublePoint {
    pos: Q2,
    s: (usize, usize),
    ta: Q,
    t: (usize, usize),
    tb: Q,
    s_over: bool,
}

struct Analysis {
    report: RegularityReport,
    doubles: Vec<DoublePoint>,
}

fn analyse(curves: &[PLCurve]) -> Analysis {
    let mut report = RegularityReport::default();
    let mut doubles = Vec::new();
    let mut segs = Vec::new();
    let vertical: Vec<bool> = curves.iter().map(is_vertical).collect();
    for (ci, c) in curves.iter().enumerate() {
        for (vi, v) in c.vertices.iter().enumerate() {
            if !vertical[ci] && v[2].is_zero() {
                report.push(4, format!("vertex {vi} of component {ci} lies in the N-face"), Some(uv(v)));
            }
            if !vertical[ci] && (v[0].is_zero() || v[1].is_zero()) {
                report.push(5, format!("vertex {vi} of component {ci} projects onto an edge"), Some(uv(v)));
            }
        }
        if vertical[ci] {
            let p = uv(&c.vertices[0]);
            if p[0].is_zero() || p[1].is_zero() {
                report.push(8, format!("axial component {ci} meets the N-face over an edge"), Some(p));
            }
            continue;
        }
        for i in 0..c.len() {
            let (a, b) = c.segment(i);
            if a[0] == b[0] && a[1] == b[1] {
                report.push(1, format!("segment {i} of component {ci} projects to a point"), Some(frac2(&uv(&a))));
                continue;
            }
            if passes_through_corner(&uv(&a), &uv(&b)) {
                report.push(7, format!("segment {i} of component {ci} passes over the corner"), None);
            }
            // N-face crossings
            let (h0, h1) = (&a[2], &b[2]);
            let (lo, hi) = if h0 < h1 { (h0, h1) } else { (h1, h0) };
            let mut n: num_bigint::BigInt = floor_q(lo) + 1;
            while Q::from(n.clone()) < *hi {
                let t = (Q::from(n.clone()) - h0) / (h1 - h0);
                let p = frac2(&lerp2(&uv(&a), &uv(&b), &t));
                if p[0].is_zero() || p[1].is_zero() {
                    report.push(8, format!("N-point of component {ci} lies over an edge"), Some(p));
                }
                n += 1;
            }
            let fa = [to_f64(&a[0]), to_f64(&a[1])];
            let fb = [to_f64(&b[0]), to_f64(&b[1])];
            segs.push(Seg {
                comp: ci,
                index: i,
                lo: [fa[0].min(fb[0]), fa[1].min(fb[1])],
                hi: [fa[0].max(fb[0]), fa[1].max(fb[1])],
                a,
                b,
            });
        }
    }
    for i in 0..segs.len() {
        for j in i..segs.len() {
            let (s, t) = (&segs[i], &segs[j]);
            let r = |k: usize| ((s.lo[k] - t.hi[k] - 1e-9).ceil() as i64)..=((s.hi[k] - t.lo[k] + 1e-9).floor() as i64);
            for kx in r(0) {
                for ky in r(1) {
                    if i == j && (kx, ky) <= (0, 0) {
                        continue;
                    }
                    let k = [kx, ky];
                    let c0 = wrap2(&uv(&t.a), k);
                    let c1 = wrap2(&uv(&t.b), k);
                    match intersect2(&uv(&s.a), &uv(&s.b), &c0, &c1) {
                        Hit::None => {}
                        Hit::Overlap => report.push(
                            2,
                            format!("segments {:?} and {:?} overlap in projection", (s.comp, s.index), (t.comp, t.index)),
                            Some(frac2(&uv(&s.a))),
                        ),
                        Hit::Point { a, b, at } => {
                            let end = |x: &Q, seg: &Seg| -> Option<usize> {
                                if x.is_zero() {
                                    Some(seg.index)
                                } else if *x == one() {
                                    Some((seg.index + 1) % curves[seg.comp].len())
                                } else {
                                    None
                                }
                            };
                            match (end(&a, s), end(&b, t)) {
                                (Some(va), Some(vb)) if s.comp == t.comp && va == vb => continue,
                                (None, None) => {}
                                _ => {
                                    report.push(2, "double point at a vertex", Some(frac2(&at)));
                                    continue;
                                }
                            }
                            let ha = &s.a[2] + (&s.b[2] - &s.a[2]) * &a;
                            let hb = &t.a[2] + (&t.b[2] - &t.a[2]) * &b;
                            let (fa, fb) = (frac(&ha), frac(&hb));
                            let pos = frac2(&at);
                            if fa == fb {
                                report.push(1, "curves meet at equal height", Some(pos.clone()));
                            } else if fa.is_zero() || fb.is_zero() {
                                report.push(3, "N-face point over a double point", Some(pos.clone()));
                            }
                            if pos[0].is_zero() || pos[1].is_zero() {
                                report.push(6, "double point on an edge", Some(pos.clone()));
                            }
                            doubles.push(DoublePoint {
                                pos,
                                s: (s.comp, s.index),
                                ta: a,
                                t: (t.comp, t.index),
                                tb: b,
                                s_over: fa > fb,
                            });
                        }
                    }
                }
            }
        }
    }
    let mut seen: BTreeMap<Q2, usize> = BTreeMap::new();
    for d in &doubles {
        *seen.entry(d.pos.clone()).or_default() += 1;
    }
    for (p, n) in &seen {
        if *n > 1 {
            report.push(1, format!("{n} double points coincide"), Some(p.clone()));
        }
    }
    // axial components against everything else
    for (ci, c) in curves.iter().enumerate() {
        if !vertical[ci] {
            continue;
        }
        let p = frac2(&uv(&c.vertices[0]));
        for s in &segs {
            let fp = [to_f64(&p[0]), to_f64(&p[1])];
            for kx in ((s.lo[0] - fp[0] - 1e-9).ceil() as i64)..=((s.hi[0] - fp[0] + 1e-9).floor() as i64) {
                for ky in ((s.lo[1] - fp[1] - 1e-9).ceil() as i64)..=((s.hi[1] - fp[1] + 1e-9).floor() as i64) {
                    if on_segment2(&wrap2(&p, [kx, ky]), &uv(&s.a), &uv(&s.b)) {
                        report.push(1, format!("axial component {ci} lies over another strand"), Some(p.clone()));
                    }
                }
            }
        }
        for (cj, d) in curves.iter().enumerate().skip(ci + 1) {
            if vertical[cj] && frac2(&uv(&d.vertices[0])) == p {
                report.push(1, "two axial components coincide", Some(p.clone()));
            }
        }
    }
    Analysis { report, doubles }
}

fn lerp2(a: &Q2, b: &Q2, t: &Q) -> Q2 {
    add2(a, &scale2(&sub2(b, a), t))
}

pub fn check_regular(cell: &UnitCell, spec: &ProjectionSpec) -> RegularityReport {
    analyse(&framed(cell, spec.axis, spec.orient)).report
}

fn jitter(cell: &UnitCell, rng: &mut ChaCha8Rng, mag: &Q, subdivide: bool) -> UnitCell {
    const STEPS: i64 = 1 << 12;
    let comps = cell
        .components
        .iter()
        .map(|c| {
            let mut pts = c.lifted();
            if subdivide {
                let mut finer = Vec::with_capacity(2 * pts.len());
                for w in pts.windows(2) {
                    finer.push(w[0].clone());
                    finer.push(std::array::from_fn(|k| (&w[0][k] + &w[1][k]) / qi(2)));
                }
                finer.push(pts.last().unwrap().clone());
                pts = finer;
            }
            let n = pts.len() - 1;
            let deltas: Vec<Q3> =
                (0..n).map(|_| std::array::from_fn(|_| mag * q(rng.gen_range(-STEPS..=STEPS), STEPS))).collect();
            let moved: Vec<Q3> = (0..=n).map(|i| add3(&pts[i], &deltas[i % n])).collect();
            PLCurve::from_lifted(&moved)
        })
        .collect();
    refit_separation(UnitCell { basis: cell.basis.clone(), components: comps, min_separation: cell.min_separation.clone() })
}

/// Returns the cell unchanged if regular, otherwise a seeded small perturbation of it.
pub fn make_regular(cell: &UnitCell, spec: &ProjectionSpec) -> Result<UnitCell> {
    if check_regular(cell, spec).is_regular() {
        return Ok(cell.clone());
    }
    let mag = spec.jitter_magnitude.clone().unwrap_or_else(|| &cell.min_separation / qi(8));
    let mut rng = ChaCha8Rng::seed_from_u64(spec.jitter_seed);
    for attempt in 0..spec.max_retries {
        // halfway through, subdivide so straight rods get interior vertices to move
        let subdivide = attempt >= spec.max_retries / 2 && attempt == spec.max_retries / 2;
        let base = if attempt > spec.max_retries / 2 { subdivided(cell) } else { cell.clone() };
        let candidate = jitter(&base, &mut rng, &mag, subdivide);
        if crate::unit_cell::validate(&candidate).is_valid() && check_regular(&candidate, spec).is_regular() {
            return Ok(candidate);
        }
    }
    Err(Error::PerturbationFailed(spec.max_retries))
}

fn subdivided(cell: &UnitCell) -> UnitCell {
    let comps = cell
        .components
        .iter()
        .map(|c| {
            let pts = c.lifted();
            let mut finer = Vec::with_capacity(2 * pts.len());
            for w in pts.windows(2) {
                finer.push(w[0].clone());
                finer.push(std::array::from_fn(|k| (&w[0][k] + &w[1][k]) / qi(2)));
            }
            finer.push(pts.last().unwrap().clone());
            PLCurve::from_lifted(&finer)
        })
        .collect();
    UnitCell { basis: cell.basis.clone(), components: comps, min_separation: cell.min_separation.clone() }
}

/// Projects a regular cell to a laid-out torus diagram.
pub fn project(cell: &UnitCell, spec: &ProjectionSpec) -> Result<TorusDiagram> {
    let curves = framed(cell, spec.axis, spec.orient);
    let an = analyse(&curves);
    if let Some(v) = an.report.violations.first() {
        return Err(Error::NotRegular(format!("condition {}: {}", v.condition, v.description)));
    }
    // events per (component, segment): (parameter, mark)
    let mut events: BTreeMap<(usize, usize), Vec<(Q, Mark)>> = BTreeMap::new();
    for d in &an.doubles {
        let (ms, mt) = if d.s_over { (Mark::Over, Mark::Under) } else { (Mark::Under, Mark::Over) };
        events.entry(d.s).or_default().push((d.ta.clone(), ms));
        events.entry(d.t).or_default().push((d.tb.clone(), mt));
    }
    let mut strands = Vec::new();
    for (ci, c) in curves.iter().enumerate() {
        if is_vertical(c) {
            let p = frac2(&uv(&c.vertices[0]));
            let up = c.homology()[2] > 0;
            strands.push(Strand { pts: vec![p], wraps: vec![[0, 0]], marks: vec![if up { Mark::Up } else { Mark::Down }] });
            continue;
        }
        let l = c.lifted();
        let mut pts = Vec::new();
        let mut marks = Vec::new();
        for i in 0..c.len() {
            let (a, b) = (&l[i], &l[i + 1]);
            pts.push(uv(a));
            marks.push(Mark::Plain);
            let mut evs = events.remove(&(ci, i)).unwrap_or_default();
            let (lo, hi) = if a[2] < b[2] { (&a[2], &b[2]) } else { (&b[2], &a[2]) };
            let mut n: num_bigint::BigInt = floor_q(lo) + 1;
            while Q::from(n.clone()) < *hi {
                let t = (Q::from(n.clone()) - &a[2]) / (&b[2] - &a[2]);
                evs.push((t, if b[2] > a[2] { Mark::Up } else { Mark::Down }));
                n += 1;
            }
            evs.sort_by(|x, y| x.0.cmp(&y.0));
            for (t, m) in evs {
                pts.push(lerp2(&uv(a), &uv(b), &t));
                marks.push(m);
            }
        }
        pts.push(uv(&l[c.len()]));
        strands.push(Strand::from_lifted(&pts, marks));
    }
    TorusDiagram::from_layout(spec.axis, spec.orient, strands)
}

/// The three views of a cell, in the order front, top, right.
#[derive(Clone, Debug)]
pub struct Tridiagram {
    pub diagrams: [TorusDiagram; 3],
    /// The (possibly perturbed) cell each view was projected from.
    pub cells: [UnitCell; 3],
}

/// Front looks along `+y`, top along `-z`, right along `+x`.
pub const TRIDIAGRAM_VIEWS: [(&str, Axis, Orient); 3] =
    [("front", Axis::Y, Orient::Plus), ("top", Axis::Z, Orient::Minus), ("right", Axis::X, Orient::Plus)];

impl Tridiagram {
    pub fn crossing_triplet(&self) -> [usize; 3] {
        std::array::from_fn(|i| self.diagrams[i].crossing_count())
    }

    pub fn n_triplet(&self) -> [usize; 3] {
        std::array::from_fn(|i| self.diagrams[i].n_count())
    }
}

/// Projects along the three views, each made regular with its own derived seed.
pub fn tridiagram(cell: &UnitCell, base: &ProjectionSpec) -> Result<Tridiagram> {
    let mut diagrams = Vec::new();
    let mut cells = Vec::new();
    for (i, (_, axis, orient)) in TRIDIAGRAM_VIEWS.iter().enumerate() {
        let spec = ProjectionSpec { axis: *axis, orient: *orient, jitter_seed: base.jitter_seed.wrapping_add(i as u64), ..base.clone() };
        let c = make_regular(cell, &spec)?;
        diagrams.push(project(&c, &spec)?);
        cells.push(c);
    }
    Ok(Tridiagram {
        diagrams: diagrams.try_into().unwrap_or_else(|_| unreachable!()),
        cells: cells.try_into().unwrap_or_else(|_| unreachable!()),
    })
}

/// Largest power of 1/2 (at most 1/4) strictly below the cell's minimal distance.
pub fn fit_separation(cell: &mut UnitCell) {
    let mut s = q(1, 4);
    if let Some((d2, _, _)) = min_distance2(cell, &s) {
        while &s * &s >= d2 && !d2.is_zero() {
            s /= qi(2);
        }
    }
    cell.min_separation = s;
}

/// A cell whose projection along the diagram's view reproduces the diagram.
///
/// Arcs sit at height 1/2 inside their band, passes at 5/8 (over) or 3/8 (under), and a
/// strand crosses the N-face in a single straight segment through each N-point.
pub fn lift(d: &TorusDiagram) -> Result<UnitCell> {
    let strands = d.strands().map_err(|_| Error::MalformedDiagram("diagram has no layout".into()))?;
    let finv = frame_inverse(d.axis, d.orient);
    let mut comps = Vec::new();
    for s in strands {
        let framed = lift_strand(s)?;
        let cell_pts: Vec<Q3> = framed.iter().map(|p| apply_frame_q(&finv, p)).collect();
        comps.push(PLCurve::from_lifted(&cell_pts));
    }
    let mut cell = UnitCell::new(comps, q(1, 4));
    fit_separation(&mut cell);
    Ok(cell)
}

fn on_edge(p: &Q2) -> bool {
    let f = frac2(p);
    f[0].is_zero() || f[1].is_zero()
}

/// A point of segment `x y` near its middle, off the square's edges.
fn off_edge(x: &Q2, y: &Q2) -> Result<Q2> {
    [q(1, 2), q(2, 5), q(3, 7), q(1, 3)]
        .iter()
        .map(|t| lerp2(x, y, t))
        .find(|p| !on_edge(p))
        .ok_or_else(|| Error::MalformedDiagram("arc hugs the square's edge".into()))
}

fn with_h(p: &Q2, h: Q) -> Q3 {
    [p[0].clone(), p[1].clone(), h]
}

fn lift_strand(s: &Strand) -> Result<Vec<Q3>> {
    let half = q(1, 2);
    if s.is_point() {
        let p = &s.pts[0];
        let top = if s.marks[0] == Mark::Up { q(3, 2) } else { q(-1, 2) };
        return Ok(vec![with_h(p, half), with_h(p, top)]);
    }
    if !s.has_events() {
        return Ok(s.lifted().iter().map(|p| with_h(p, half.clone())).collect());
    }
    let r = s.rotated(s.event_vertices()[0]);
    let l = r.lifted();
    let n = r.len();
    let evs = r.event_vertices();
    let m = evs.len();
    let hom = r.homology2();
    // (a, interior, b) points per arc
    let mut arcs: Vec<(Q2, Vec<Q2>, Q2)> = Vec::new();
    for j in 0..m {
        let (e0, e1) = (evs[j], if j + 1 < m { evs[j + 1] } else { n });
        if e1 - e0 == 1 {
            let (x, y) = (&l[e0], &l[e1]);
            let trio = [(q(1, 4), q(1, 2), q(3, 4)), (q(1, 5), q(2, 5), q(3, 5)), (q(2, 7), q(3, 7), q(5, 7))]
                .into_iter()
                .map(|(t0, t1, t2)| (lerp2(x, y, &t0), lerp2(x, y, &t1), lerp2(x, y, &t2)))
                .find(|(p0, p1, p2)| !on_edge(p0) && !on_edge(p1) && !on_edge(p2))
                .ok_or_else(|| Error::MalformedDiagram("arc hugs the square's edge".into()))?;
            arcs.push((trio.0, vec![trio.1], trio.2));
        } else {
            arcs.push((off_edge(&l[e0], &l[e0 + 1])?, l[e0 + 1..e1].to_vec(), off_edge(&l[e1], &l[e1 - 1])?));
        }
    }
    let step = |mk: Mark| -> i64 {
        match mk {
            Mark::Up => 1,
            Mark::Down => -1,
            _ => 0,
        }
    };
    let mut band = vec![0i64; m];
    for j in 1..m {
        band[j] = band[j - 1] + step(r.marks[evs[j]]);
    }
    let total: i64 = evs.iter().map(|&v| step(r.marks[v])).sum();
    // heights entering and leaving event j, relative to the band of arc j
    let heights = |j: usize| -> Result<(Q, Q)> {
        let e = &l[evs[j]];
        let prev_b = if j == 0 { sub2(&arcs[m - 1].2, &[qi(hom[0]), qi(hom[1])]) } else { arcs[j - 1].2.clone() };
        let next_a = &arcs[j].0;
        let k = qi(band[j]);
        Ok(match r.marks[evs[j]] {
            Mark::Over => (&k + q(5, 8), &k + q(5, 8)),
            Mark::Under => (&k + q(3, 8), &k + q(3, 8)),
            mk => {
                let dir = sub2(next_a, &prev_b);
                let t = dot2(&sub2(e, &prev_b), &dir) / dot2(&dir, &dir);
                if !t.is_positive() || t >= one() {
                    return Err(Error::MalformedDiagram("N-point is not inside its segment".into()));
                }
                if mk == Mark::Up {
                    (&k - &t, &k + one() - &t)
                } else {
                    (&k + one() + &t, &k + &t)
                }
            }
        })
    };
    let mut out = Vec::new();
    for j in 0..m {
        let (_, h_out) = heights(j)?;
        let h_in_next = if j + 1 < m { heights(j + 1)?.0 } else { heights(0)?.0 + qi(total) };
        let (a, mid, b) = &arcs[j];
        out.push(with_h(a, h_out));
        for p in mid {
            out.push(with_h(p, qi(band[j]) + &half));
        }
        out.push(with_h(b, h_in_next));
    }
    let (a0, _, _) = &arcs[0];
    let (_, h0) = heights(0)?;
    out.push(with_h(&wrap2(a0, hom), h0 + qi(total)));
    Ok(out)
}
