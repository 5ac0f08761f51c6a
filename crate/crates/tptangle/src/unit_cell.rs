//! Piecewise-linear links in the 3-torus, stored in fractional coordinates of a unit cell.

use crate::error::{Error, Result};
use crate::exact::*;
use crate::geom::{seg_seg_dist2, shift_range};
use crate::lattice::{hnf_of_columns, HermiteData, IntMatrix3, RationalBasis3};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Closed PL curve; segment `i` runs from `vertices[i]` to `vertices[i+1] + wraps[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLCurve {
    pub vertices: Vec<Q3>,
    pub wraps: Vec<[i64; 3]>,
}

impl PLCurve {
    pub fn new(vertices: Vec<Q3>, wraps: Vec<[i64; 3]>) -> Self {
        PLCurve { vertices, wraps }
    }

    /// Straight closed rod through `p` with direction `dir` (a primitive integer vector).
    pub fn rod(p: Q3, dir: [i64; 3]) -> Self {
        PLCurve { vertices: vec![frac3(&p)], wraps: vec![dir] }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn homology(&self) -> [i64; 3] {
        self.wraps.iter().fold([0; 3], |acc, w| [acc[0] + w[0], acc[1] + w[1], acc[2] + w[2]])
    }

    /// Lifted endpoints of segment `i`.
    pub fn segment(&self, i: usize) -> (Q3, Q3) {
        let n = self.vertices.len();
        let a = self.vertices[i].clone();
        let b = wrap3(&self.vertices[(i + 1) % n], self.wraps[i]);
        (a, b)
    }

    /// Continuous lift of the vertex sequence starting at `vertices[0]`; has `len()+1` points.
    pub fn lifted(&self) -> Vec<Q3> {
        let mut out = Vec::with_capacity(self.len() + 1);
        let mut off = [0i64; 3];
        for i in 0..=self.len() {
            let v = &self.vertices[i % self.len()];
            out.push(wrap3(v, off));
            if i < self.len() {
                let w = self.wraps[i];
                off = [off[0] + w[0], off[1] + w[1], off[2] + w[2]];
            }
        }
        out
    }

    /// Rebuilds a curve from a continuous lifted polyline whose last point closes the loop.
    pub fn from_lifted(pts: &[Q3]) -> Self {
        let n = pts.len() - 1;
        let floors: Vec<[i64; 3]> = pts.iter().map(floor3).collect();
        let vertices = pts[..n].iter().map(frac3).collect();
        let wraps = (0..n)
            .map(|i| {
                let a = floors[i];
                let b = floors[i + 1];
                [b[0] - a[0], b[1] - a[1], b[2] - a[2]]
            })
            .collect();
        PLCurve { vertices, wraps }
    }

    /// Same curve with the vertex list rotated to its lexicographically smallest start.
    pub fn normalized(&self) -> PLCurve {
        let n = self.len();
        let key = |s: usize| -> Vec<(&Q3, &[i64; 3])> {
            (0..n).map(|k| (&self.vertices[(s + k) % n], &self.wraps[(s + k) % n])).collect()
        };
        let best = (0..n).min_by(|&a, &b| key(a).cmp(&key(b))).unwrap_or(0);
        PLCurve {
            vertices: (0..n).map(|k| self.vertices[(best + k) % n].clone()).collect(),
            wraps: (0..n).map(|k| self.wraps[(best + k) % n]).collect(),
        }
    }

    fn map_affine(&self, f: impl Fn(&Q3) -> Q3) -> PLCurve {
        let lifted: Vec<Q3> = self.lifted().iter().map(f).collect();
        PLCurve::from_lifted(&lifted)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitCell {
    /// Lattice basis, metadata only.
    pub basis: RationalBasis3,
    pub components: Vec<PLCurve>,
    pub min_separation: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyComponent { component: usize },
    VertexOutsideCell { component: usize, vertex: usize },
    WrapCountMismatch { component: usize },
    ZeroLengthSegment { component: usize, segment: usize },
    TooClose { a: (usize, usize), b: (usize, usize), dist2: Q },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl UnitCell {
    pub fn new(components: Vec<PLCurve>, min_separation: Q) -> Self {
        UnitCell { basis: RationalBasis3::standard(), components, min_separation }
    }

    pub fn segment_count(&self) -> usize {
        self.components.iter().map(|c| c.len()).sum()
    }

    pub fn homologies(&self) -> Vec<[i64; 3]> {
        self.components.iter().map(|c| c.homology()).collect()
    }

    /// Components as a sorted list of normalized curves, for set comparison.
    pub fn normalized_components(&self) -> Vec<PLCurve> {
        let mut v: Vec<PLCurve> = self.components.iter().map(|c| c.normalized()).collect();
        v.sort_by(|a, b| (&a.vertices, &a.wraps).cmp(&(&b.vertices, &b.wraps)));
        v
    }

    /// The same cell with components in normalized form and order.
    pub fn normalized(&self) -> UnitCell {
        UnitCell { components: self.normalized_components(), ..self.clone() }
    }
}

pub fn homology(c: &PLCurve) -> [i64; 3] {
    c.homology()
}

/// Squared minimal distance between non-incident segment pairs, over all lattice translates.
pub fn min_distance2(cell: &UnitCell, cutoff: &Q) -> Option<(Q, (usize, usize), (usize, usize))> {
    let segs: Vec<((usize, usize), Q3, Q3)> = cell
        .components
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| (0..c.len()).map(move |si| ((ci, si), c.segment(si).0, c.segment(si).1)))
        .collect();
    let mut best: Option<(Q, (usize, usize), (usize, usize))> = None;
    for (i, (ia, a0, a1)) in segs.iter().enumerate() {
        for (ib, b0, b1) in segs.iter().skip(i) {
            let ranges: Vec<std::ops::RangeInclusive<i64>> = (0..3)
                .map(|k| {
                    let (amin, amax) = (a0[k].clone().min(a1[k].clone()), a0[k].clone().max(a1[k].clone()));
                    let (bmin, bmax) = (b0[k].clone().min(b1[k].clone()), b0[k].clone().max(b1[k].clone()));
                    shift_range(&amin, &amax, &bmin, &bmax, cutoff)
                })
                .collect();
            for kx in ranges[0].clone() {
                for ky in ranges[1].clone() {
                    for kz in ranges[2].clone() {
                        let k = [kx, ky, kz];
                        if skip_pair(cell, *ia, *ib, k) {
                            continue;
                        }
                        let d = seg_seg_dist2(a0, a1, &wrap3(b0, k), &wrap3(b1, k));
                        if best.as_ref().map_or(true, |b| d < b.0) {
                            best = Some((d, *ia, *ib));
                        }
                    }
                }
            }
        }
    }
    best
}

/// Pairs that legitimately touch: a segment with itself, and consecutive segments at their joint.
fn skip_pair(cell: &UnitCell, a: (usize, usize), b: (usize, usize), k: [i64; 3]) -> bool {
    if a.0 != b.0 {
        return false;
    }
    let c = &cell.components[a.0];
    let n = c.len();
    if a.1 == b.1 && k == [0, 0, 0] {
        return true;
    }
    // b follows a: b's start equals a's end when b is shifted by wraps[a]
    if (a.1 + 1) % n == b.1 && k == c.wraps[a.1] {
        return true;
    }
    if (b.1 + 1) % n == a.1 {
        let w = c.wraps[b.1];
        if k == [-w[0], -w[1], -w[2]] {
            return true;
        }
    }
    false
}

pub fn validate(cell: &UnitCell) -> ValidationReport {
    let mut violations = Vec::new();
    for (ci, c) in cell.components.iter().enumerate() {
        if c.is_empty() {
            violations.push(Violation::EmptyComponent { component: ci });
            continue;
        }
        if c.wraps.len() != c.vertices.len() {
            violations.push(Violation::WrapCountMismatch { component: ci });
            continue;
        }
        for (vi, v) in c.vertices.iter().enumerate() {
            if v.iter().any(|x| x.is_negative() || *x >= one()) {
                violations.push(Violation::VertexOutsideCell { component: ci, vertex: vi });
            }
        }
        for si in 0..c.len() {
            let (a, b) = c.segment(si);
            if a == b {
                violations.push(Violation::ZeroLengthSegment { component: ci, segment: si });
            }
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }
    let sep2 = &cell.min_separation * &cell.min_separation;
    let segs: Vec<(usize, usize)> =
        cell.components.iter().enumerate().flat_map(|(ci, c)| (0..c.len()).map(move |si| (ci, si))).collect();
    for (i, &ia) in segs.iter().enumerate() {
        for &ib in segs.iter().skip(i) {
            let (a0, a1) = cell.components[ia.0].segment(ia.1);
            let (b0, b1) = cell.components[ib.0].segment(ib.1);
            let r: Vec<_> = (0..3)
                .map(|k| {
                    shift_range(
                        &a0[k].clone().min(a1[k].clone()),
                        &a0[k].clone().max(a1[k].clone()),
                        &b0[k].clone().min(b1[k].clone()),
                        &b0[k].clone().max(b1[k].clone()),
                        &cell.min_separation,
                    )
                })
                .collect();
            for kx in r[0].clone() {
                for ky in r[1].clone() {
                    for kz in r[2].clone() {
                        let k = [kx, ky, kz];
                        if skip_pair(cell, ia, ib, k) {
                            continue;
                        }
                        let d = seg_seg_dist2(&a0, &a1, &wrap3(&b0, k), &wrap3(&b1, k));
                        if d < sep2 {
                            violations.push(Violation::TooClose { a: ia, b: ib, dist2: d });
                        }
                    }
                }
            }
        }
    }
    ValidationReport { violations }
}

pub fn translate(cell: &UnitCell, t: &Q3) -> UnitCell {
    UnitCell {
        basis: cell.basis.clone(),
        components: cell.components.iter().map(|c| c.map_affine(|p| add3(p, t))).collect(),
        min_separation: cell.min_separation.clone(),
    }
}

fn mat_q(m: &IntMatrix3) -> [[Q; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| qb(&m.0[i][j])))
}

fn apply_q(m: &[[Q; 3]; 3], v: &Q3) -> Q3 {
    std::array::from_fn(|i| (0..3).map(|k| &m[i][k] * &v[k]).sum())
}

fn inverse_q(m: &[[Q; 3]; 3]) -> Option<[[Q; 3]; 3]> {
    let b = RationalBasis3 { columns: std::array::from_fn(|j| std::array::from_fn(|i| m[i][j].clone())) };
    let d = b.det();
    if d.is_zero() {
        return None;
    }
    let e: [Q3; 3] = std::array::from_fn(|j| std::array::from_fn(|i| if i == j { one() } else { zero() }));
    let cols: Vec<Q3> = e.iter().map(|v| b.coordinates_of(v).unwrap()).collect();
    Some(std::array::from_fn(|i| std::array::from_fn(|j| cols[j][i].clone())))
}

/// Keeps the declared separation when it still holds, otherwise shrinks it to a power of 1/2 that does.
pub(crate) fn refit_separation(mut cell: UnitCell) -> UnitCell {
    if validate(&cell).is_valid() {
        return cell;
    }
    if let Some((d2, _, _)) = min_distance2(&cell, &cell.min_separation) {
        let mut s = cell.min_separation.clone();
        while &s * &s > d2 && !d2.is_zero() {
            s /= qi(2);
        }
        cell.min_separation = s;
    }
    cell
}

/// Changes the lattice basis by `m` (det 1): coordinates map by `m^-1`.
pub fn apply_twist(cell: &UnitCell, m: &IntMatrix3) -> Result<UnitCell> {
    if !m.det().is_one() {
        return Err(Error::NotUnimodular);
    }
    let inv = mat_q(&m.inverse_unimodular()?);
    let out = UnitCell {
        basis: cell.basis.times(m),
        components: cell.components.iter().map(|c| c.map_affine(|p| apply_q(&inv, p))).collect(),
        min_separation: cell.min_separation.clone(),
    };
    Ok(refit_separation(out))
}

/// Coset representative of `v` modulo the column lattice of the lower-triangular `h`.
fn reduce_mod_hnf(h: &IntMatrix3, v: &[BigInt; 3]) -> [BigInt; 3] {
    use num_integer::Integer;
    let mut v = v.clone();
    for i in 0..3 {
        let qt = v[i].div_floor(&h.0[i][i]);
        for r in 0..3 {
            let s = &qt * &h.0[r][i];
            v[r] -= s;
        }
    }
    v
}

/// Lifts the cell through the covering of the sublattice spanned by the columns of `h.h`.
pub fn cover(cell: &UnitCell, hd: &HermiteData) -> UnitCell {
    let h = &hd.h;
    let hinv = inverse_q(&mat_q(h)).expect("HNF is nonsingular");
    let diag: Vec<i64> = (0..3).map(|i| crate::geom::big_to_i64(&h.0[i][i])).collect();
    let (d1, d2) = (diag[1], diag[2]);
    let reps: Vec<[BigInt; 3]> = (0..diag[0])
        .flat_map(|a| (0..d1).flat_map(move |b| (0..d2).map(move |c| [a, b, c].map(BigInt::from))))
        .collect();
    let mut components = Vec::new();
    for c in &cell.components {
        let hom = c.homology().map(BigInt::from);
        let mut used = vec![false; reps.len()];
        for start in 0..reps.len() {
            if used[start] {
                continue;
            }
            let lifted = c.lifted();
            let mut g = reps[start].clone();
            let mut off: Q3 = g.clone().map(|x| qb(&x));
            let mut pts: Vec<Q3> = Vec::new();
            loop {
                let idx = reps.iter().position(|r| *r == g).expect("coset representative");
                if used[idx] {
                    break;
                }
                used[idx] = true;
                pts.extend(lifted[..c.len()].iter().map(|p| add3(p, &off)));
                off = add3(&off, &hom.clone().map(|x| qb(&x)));
                let next: [BigInt; 3] = std::array::from_fn(|i| &g[i] + &hom[i]);
                g = reduce_mod_hnf(h, &next);
            }
            pts.push(add3(&lifted[0], &off));
            let mapped: Vec<Q3> = pts.iter().map(|p| apply_q(&hinv, p)).collect();
            components.push(PLCurve::from_lifted(&mapped));
        }
    }
    let out = UnitCell { basis: cell.basis.times(h), components, min_separation: cell.min_separation.clone() };
    refit_separation(out)
}

/// Quotient by the translation `t` (with `n t` integral), if the cell is invariant under it.
pub fn quotient(cell: &UnitCell, t: &Q3, n: u32) -> Result<UnitCell> {
    let nq = qi(n as i64);
    if !t.iter().all(|x| is_int(&(x * &nq))) {
        return Err(Error::InvalidCell(format!("translation is not in (1/{n})Z^3")));
    }
    if t.iter().all(is_int) {
        return Ok(cell.clone());
    }
    if translate(cell, t).normalized_components() != cell.normalized_components() {
        return Err(Error::NotSymmetric);
    }
    // basis of Z^3 + Z t, as integer columns scaled by n
    let mut cols: Vec<[BigInt; 3]> = (0..3)
        .map(|j| std::array::from_fn(|i| if i == j { BigInt::from(n) } else { BigInt::zero() }))
        .collect();
    cols.push(std::array::from_fn(|i| (&t[i] * &nq).to_integer()));
    let hq = hnf_of_columns(&cols).expect("full rank");
    let bq: [[Q; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| qb(&hq.0[i][j]) / &nq));
    let binv = inverse_q(&bq).expect("nonsingular");
    let mut seen: Vec<PLCurve> = Vec::new();
    let mut components = Vec::new();
    for c in &cell.components {
        let lifted = c.lifted();
        let mapped: Vec<Q3> = lifted.iter().map(|p| apply_q(&binv, p)).collect();
        let full = PLCurve::from_lifted(&mapped);
        let reduced = minimal_period(&full);
        let key = reduced.normalized();
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        components.push(reduced);
    }
    let basis = RationalBasis3 {
        columns: std::array::from_fn(|j| {
            std::array::from_fn(|i| (0..3).map(|k| &cell.basis.columns[k][i] * &bq[k][j]).sum())
        }),
    };
    Ok(refit_separation(UnitCell { basis, components, min_separation: cell.min_separation.clone() }))
}

/// Shortest prefix that repeats to give the whole curve (a curve covering its image several times).
fn minimal_period(c: &PLCurve) -> PLCurve {
    let n = c.len();
    for s in 1..n {
        if n % s != 0 {
            continue;
        }
        let periodic = (0..n).all(|j| c.vertices[j] == c.vertices[(j + s) % n] && c.wraps[j] == c.wraps[(j + s) % n]);
        if periodic {
            return PLCurve { vertices: c.vertices[..s].to_vec(), wraps: c.wraps[..s].to_vec() };
        }
    }
    c.clone()
}

/// Cell with every component made of straight rods, as `(point, direction)` pairs.
pub fn rod_cell(rods: &[(Q3, [i64; 3])], min_separation: Q) -> UnitCell {
    UnitCell::new(rods.iter().map(|(p, d)| PLCurve::rod(p.clone(), *d)).collect(), min_separation)
}

impl UnitCell {
    pub fn is_identity_basis(&self) -> bool {
        self.basis == RationalBasis3::standard()
    }
}

pub fn total_homology(cell: &UnitCell) -> [i64; 3] {
    cell.homologies().iter().fold([0; 3], |a, h| [a[0] + h[0], a[1] + h[1], a[2] + h[2]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::hnf;

    fn p3(a: Q, b: Q, c: Q) -> Q3 {
        [a, b, c]
    }

    fn z_line() -> UnitCell {
        rod_cell(&[(p3(q(1, 4), q(1, 4), q(1, 2)), [0, 0, 1])], q(1, 8))
    }

    #[test]
    fn z_line_valid_and_homology() {
        let c = z_line();
        assert!(validate(&c).is_valid());
        assert_eq!(c.components[0].homology(), [0, 0, 1]);
    }

    #[test]
    fn coincident_copies_too_close() {
        let mut c = z_line();
        c.components.push(c.components[0].clone());
        assert!(validate(&c).violations.iter().any(|v| matches!(v, Violation::TooClose { .. })));
    }

    #[test]
    fn null_homotopic_square() {
        let sq = PLCurve::new(
            vec![
                p3(q(1, 4), q(1, 4), q(1, 2)),
                p3(q(3, 4), q(1, 4), q(1, 2)),
                p3(q(3, 4), q(3, 4), q(1, 2)),
                p3(q(1, 4), q(3, 4), q(1, 2)),
            ],
            vec![[0; 3]; 4],
        );
        assert_eq!(sq.homology(), [0, 0, 0]);
        assert!(validate(&UnitCell::new(vec![sq], q(1, 8))).is_valid());
    }

    #[test]
    fn translate_shifts_mod_one() {
        let t = translate(&z_line(), &p3(q(1, 2), zero(), zero()));
        assert_eq!(t.components[0].vertices[0], p3(q(3, 4), q(1, 4), q(1, 2)));
        assert_eq!(t.components[0].homology(), [0, 0, 1]);
        let t = translate(&z_line(), &p3(q(7, 8), zero(), zero()));
        assert_eq!(t.components[0].vertices[0][0], q(1, 8));
        assert_eq!(translate(&z_line(), &p3(zero(), zero(), zero())), z_line());
    }

    #[test]
    fn twist_transforms_homology() {
        let c = rod_cell(&[(p3(q(1, 4), q(1, 8), q(1, 4)), [0, 1, 0])], q(1, 8));
        let t = apply_twist(&c, &IntMatrix3::shear(1, 1)).unwrap();
        assert_eq!(t.components[0].homology(), [-1, 1, 0]);
        let back = apply_twist(&t, &IntMatrix3::shear(1, -1)).unwrap();
        assert_eq!(back.components, c.components);
        assert_eq!(apply_twist(&c, &IntMatrix3::identity()).unwrap(), c);
        assert_eq!(apply_twist(&c, &IntMatrix3::diag(2, 1, 1)), Err(Error::NotUnimodular));
    }

    #[test]
    fn cover_doubles_z_line() {
        let hd = hnf(&IntMatrix3::diag(2, 1, 1)).unwrap();
        let cov = cover(&z_line(), &hd);
        assert_eq!(cov.components.len(), 2);
        assert_eq!(cov.segment_count(), 2);
        let xs: Vec<Q> = cov.components.iter().map(|c| c.vertices[0][0].clone()).collect();
        assert_eq!(xs, vec![q(1, 8), q(5, 8)]);
        assert!(validate(&cov).is_valid());
    }

    #[test]
    fn cover_along_thread_merges() {
        let hd = hnf(&IntMatrix3::diag(1, 1, 3)).unwrap();
        let cov = cover(&z_line(), &hd);
        assert_eq!(cov.components.len(), 1);
        assert_eq!(cov.segment_count(), 3);
        assert_eq!(cov.components[0].homology(), [0, 0, 1]);
    }

    #[test]
    fn cover_then_quotient_round_trip() {
        let hd = hnf(&IntMatrix3::diag(2, 1, 1)).unwrap();
        let cov = cover(&z_line(), &hd);
        let back = quotient(&cov, &p3(q(1, 2), zero(), zero()), 2).unwrap();
        assert_eq!(back.normalized_components(), z_line().normalized_components());
        let hd = hnf(&IntMatrix3::diag(1, 1, 2)).unwrap();
        let cov = cover(&z_line(), &hd);
        let back = quotient(&cov, &p3(zero(), zero(), q(1, 2)), 2).unwrap();
        assert_eq!(back.normalized_components(), z_line().normalized_components());
    }

    #[test]
    fn asymmetric_quotient_fails() {
        assert_eq!(quotient(&z_line(), &p3(q(1, 2), zero(), zero()), 2), Err(Error::NotSymmetric));
    }
}
