//! Exact segment predicates in the plane and in space.

use crate::exact::*;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Result of intersecting two closed plane segments.
#[derive(Clone, Debug, PartialEq)]
pub enum Hit {
    None,
    /// Single point, with parameters along each segment in `[0, 1]`.
    Point { a: Q, b: Q, at: Q2 },
    /// Collinear with a shared piece of positive length, or touching collinearly.
    Overlap,
}

/// Coordinates over a common denominator when everything fits comfortably in `i128`
/// (numerators below 2^60, so cross products of differences cannot overflow).
fn common_scale(pts: [&Q2; 4]) -> Option<[[i128; 2]; 4]> {
    use num_traits::ToPrimitive;
    const LIMIT: i128 = 1 << 60;
    let mut l: i128 = 1;
    for p in pts {
        for x in p {
            let d = x.denom().to_i128()?;
            l = l.checked_div(gcd_i128(l, d))?.checked_mul(d)?;
            if l > LIMIT {
                return None;
            }
        }
    }
    let mut out = [[0i128; 2]; 4];
    for (k, p) in pts.iter().enumerate() {
        for j in 0..2 {
            let n = p[j].numer().to_i128()?.checked_mul(l / p[j].denom().to_i128()?)?;
            if n.abs() > LIMIT {
                return None;
            }
            out[k][j] = n;
        }
    }
    Some(out)
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

fn q128(n: i128, d: i128) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// The transverse case of [`intersect2`] in machine integers; `None` when the segments
/// are parallel and the exact path has to decide.
fn intersect2_small(p0: &Q2, p1: &Q2, q0: &Q2, q1: &Q2) -> Option<Hit> {
    let [a0, a1, b0, b1] = common_scale([p0, p1, q0, q1])?;
    let sub = |x: [i128; 2], y: [i128; 2]| [x[0] - y[0], x[1] - y[1]];
    let cross = |x: [i128; 2], y: [i128; 2]| x[0] * y[1] - x[1] * y[0];
    let (r, s, qp) = (sub(a1, a0), sub(b1, b0), sub(b0, a0));
    let mut den = cross(r, s);
    if den == 0 {
        return None;
    }
    let mut na = cross(qp, s);
    let mut nb = cross(qp, r);
    if den < 0 {
        (den, na, nb) = (-den, -na, -nb);
    }
    if na < 0 || nb < 0 || na > den || nb > den {
        return Some(Hit::None);
    }
    let a = q128(na, den);
    let b = q128(nb, den);
    let at = add2(p0, &scale2(&sub2(p1, p0), &a));
    Some(Hit::Point { a, b, at })
}

pub fn intersect2(p0: &Q2, p1: &Q2, q0: &Q2, q1: &Q2) -> Hit {
    intersect2_small(p0, p1, q0, q1).unwrap_or_else(|| intersect2_exact(p0, p1, q0, q1))
}

fn intersect2_exact(p0: &Q2, p1: &Q2, q0: &Q2, q1: &Q2) -> Hit {
    let r = sub2(p1, p0);
    let s = sub2(q1, q0);
    let qp = sub2(q0, p0);
    let den = cross2(&r, &s);
    if den.is_zero() {
        if !cross2(&qp, &r).is_zero() {
            return Hit::None;
        }
        // collinear: project on r (or s if r degenerate)
        let dir = if r[0].is_zero() && r[1].is_zero() { s.clone() } else { r.clone() };
        if dir[0].is_zero() && dir[1].is_zero() {
            return if p0 == q0 { Hit::Overlap } else { Hit::None };
        }
        let t = |x: &Q2| dot2(&sub2(x, p0), &dir);
        let (a0, a1) = minmax(t(p0), t(p1));
        let (b0, b1) = minmax(t(q0), t(q1));
        if a1 < b0 || b1 < a0 {
            return Hit::None;
        }
        if a1 == b0 || b1 == a0 {
            // touching at a single shared endpoint
            let pa = |x: &Q2| if x == p0 { Some(zero()) } else if x == p1 { Some(one()) } else { None };
            let pb = |x: &Q2| if x == q0 { Some(zero()) } else if x == q1 { Some(one()) } else { None };
            for x in [p0, p1] {
                if let (Some(a), Some(b)) = (pa(x), pb(x)) {
                    return Hit::Point { a, b, at: x.clone() };
                }
            }
        }
        return Hit::Overlap;
    }
    let a = cross2(&qp, &s) / &den;
    let b = cross2(&qp, &r) / &den;
    if a.is_negative() || b.is_negative() || a > one() || b > one() {
        return Hit::None;
    }
    let at = add2(p0, &scale2(&r, &a));
    Hit::Point { a, b, at }
}

fn minmax(x: Q, y: Q) -> (Q, Q) {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

/// Whether point `x` lies on the closed segment `p0 p1`.
pub fn on_segment2(x: &Q2, p0: &Q2, p1: &Q2) -> bool {
    let r = sub2(p1, p0);
    let d = sub2(x, p0);
    if !cross2(&r, &d).is_zero() {
        return false;
    }
    let t = dot2(&d, &r);
    !t.is_negative() && t <= dot2(&r, &r)
}

/// Integer range of translations `k` such that `[amin, amax]` and `[bmin + k, bmax + k]`
/// come within `margin` of each other.
pub fn shift_range(amin: &Q, amax: &Q, bmin: &Q, bmax: &Q, margin: &Q) -> std::ops::RangeInclusive<i64> {
    let lo = amin - bmax - margin;
    let hi = amax - bmin + margin;
    let lo_i = -floor_i64(&-lo); // ceil
    let hi_i = floor_i64(&hi);
    lo_i..=hi_i
}

pub fn bbox2(p0: &Q2, p1: &Q2) -> (Q2, Q2) {
    let lo = [p0[0].clone().min(p1[0].clone()), p0[1].clone().min(p1[1].clone())];
    let hi = [p0[0].clone().max(p1[0].clone()), p0[1].clone().max(p1[1].clone())];
    (lo, hi)
}

/// Point in polygon by ray casting; the point must not lie on the boundary.
pub fn point_in_polygon(x: &Q2, poly: &[Q2]) -> bool {
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        if (a[1] > x[1]) != (b[1] > x[1]) {
            // x-coordinate of the edge at height x[1]
            let t = (&x[1] - &a[1]) / (&b[1] - &a[1]);
            let xe = &a[0] + (&b[0] - &a[0]) * t;
            if x[0] < xe {
                inside = !inside;
            }
        }
    }
    inside
}

/// Squared distance from point `x` to segment `a b` in space.
pub fn point_seg_dist2(x: &Q3, a: &Q3, b: &Q3) -> Q {
    let d = sub3(b, a);
    let dd = dot3(&d, &d);
    let t = if dd.is_zero() {
        zero()
    } else {
        let t = dot3(&sub3(x, a), &d) / &dd;
        t.clamp(zero(), one())
    };
    let p = [&a[0] + &d[0] * &t, &a[1] + &d[1] * &t, &a[2] + &d[2] * &t];
    let v = sub3(x, &p);
    dot3(&v, &v)
}

/// Exact squared distance between two closed segments in space.
pub fn seg_seg_dist2(p0: &Q3, p1: &Q3, q0: &Q3, q1: &Q3) -> Q {
    let u = sub3(p1, p0);
    let v = sub3(q1, q0);
    let w = sub3(p0, q0);
    let a = dot3(&u, &u);
    let b = dot3(&u, &v);
    let c = dot3(&v, &v);
    let d = dot3(&u, &w);
    let e = dot3(&v, &w);
    let den = &a * &c - &b * &b;
    let mut best: Option<Q> = None;
    let mut take = |x: Q| {
        if best.as_ref().map_or(true, |b| x < *b) {
            best = Some(x);
        }
    };
    if !den.is_zero() {
        let s = (&b * &e - &c * &d) / &den;
        let t = (&a * &e - &b * &d) / &den;
        if !s.is_negative() && s <= one() && !t.is_negative() && t <= one() {
            let pa = [&p0[0] + &u[0] * &s, &p0[1] + &u[1] * &s, &p0[2] + &u[2] * &s];
            let pb = [&q0[0] + &v[0] * &t, &q0[1] + &v[1] * &t, &q0[2] + &v[2] * &t];
            let diff = sub3(&pa, &pb);
            take(dot3(&diff, &diff));
        }
    }
    take(point_seg_dist2(p0, q0, q1));
    take(point_seg_dist2(p1, q0, q1));
    take(point_seg_dist2(q0, p0, p1));
    take(point_seg_dist2(q1, p0, p1));
    best.unwrap()
}

pub fn big_to_i64(x: &BigInt) -> i64 {
    use num_traits::ToPrimitive;
    x.to_i64().expect("integer out of range")
}
