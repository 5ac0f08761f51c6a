//! Integer and rational lattice algebra in dimension 3: Hermite normal form,
//! decomposition of SL(3,Z) into shear generators, lattice joins and covering data.

use crate::error::{Error, Result};
use crate::exact::{fmt_q, parse_q, qb, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix3(pub [[BigInt; 3]; 3]);

/// Position of the single off-diagonal 1 in each shear generator, 0-based (row, col).
pub const SHEAR_POSITIONS: [(usize, usize); 6] = [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)];

impl IntMatrix3 {
    pub fn from_i64(rows: [[i64; 3]; 3]) -> Self {
        IntMatrix3(rows.map(|r| r.map(BigInt::from)))
    }

    pub fn identity() -> Self {
        Self::diag(1, 1, 1)
    }

    pub fn diag(a: i64, b: i64, c: i64) -> Self {
        Self::from_i64([[a, 0, 0], [0, b, 0], [0, 0, c]])
    }

    /// Shear generator `M_g^e` for g in 1..=6.
    pub fn shear(g: u8, e: i64) -> Self {
        assert!((1..=6).contains(&g), "shear generator index must be 1..=6");
        let mut m = Self::identity();
        let (r, c) = SHEAR_POSITIONS[(g - 1) as usize];
        m.0[r][c] = BigInt::from(e);
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.0[r][c]
    }

    pub fn det(&self) -> BigInt {
        let m = &self.0;
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    pub fn mul(&self, o: &IntMatrix3) -> IntMatrix3 {
        let mut out = IntMatrix3::from_i64([[0; 3]; 3]);
        for i in 0..3 {
            for j in 0..3 {
                let mut s = BigInt::zero();
                for k in 0..3 {
                    s += &self.0[i][k] * &o.0[k][j];
                }
                out.0[i][j] = s;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt; 3]) -> [BigInt; 3] {
        std::array::from_fn(|i| (0..3).map(|k| &self.0[i][k] * &v[k]).sum())
    }

    pub fn col(&self, j: usize) -> [BigInt; 3] {
        [self.0[0][j].clone(), self.0[1][j].clone(), self.0[2][j].clone()]
    }

    /// Adjugate, so that `m * adj(m) = det(m) * I`.
    pub fn adjugate(&self) -> IntMatrix3 {
        let m = &self.0;
        let c = |r0: usize, r1: usize, c0: usize, c1: usize| &m[r0][c0] * &m[r1][c1] - &m[r0][c1] * &m[r1][c0];
        let cof = [
            [c(1, 2, 1, 2), -c(1, 2, 0, 2), c(1, 2, 0, 1)],
            [-c(0, 2, 1, 2), c(0, 2, 0, 2), -c(0, 2, 0, 1)],
            [c(0, 1, 1, 2), -c(0, 1, 0, 2), c(0, 1, 0, 1)],
        ];
        IntMatrix3(std::array::from_fn(|i| std::array::from_fn(|j| cof[j][i].clone())))
    }

    /// Exact inverse of a matrix with determinant ±1.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix3> {
        let d = self.det();
        if d.is_one() {
            Ok(self.adjugate())
        } else if d == -BigInt::one() {
            Ok(self.adjugate().neg())
        } else {
            Err(Error::NotUnimodular)
        }
    }

    pub fn neg(&self) -> IntMatrix3 {
        IntMatrix3(self.0.clone().map(|r| r.map(|x| -x)))
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.0[0][1].is_zero() && self.0[0][2].is_zero() && self.0[1][2].is_zero()
    }

    /// Row-major text form `a,b,c;d,e,f;g,h,i`.
    pub fn to_text(&self) -> String {
        self.0
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn parse(text: &str) -> Result<IntMatrix3> {
        let rows = parse_matrix_text(text)?;
        let mut out = IntMatrix3::identity();
        for (i, row) in rows.iter().enumerate() {
            for (j, (v, col)) in row.iter().enumerate() {
                if !v.is_integer() {
                    return Err(Error::parse(1, *col, "expected an integer entry"));
                }
                out.0[i][j] = v.to_integer();
            }
        }
        Ok(out)
    }

    pub fn to_rows_i64(&self) -> Option<[[i64; 3]; 3]> {
        use num_traits::ToPrimitive;
        let mut out = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = self.0[i][j].to_i64()?;
            }
        }
        Some(out)
    }
}

impl fmt::Display for IntMatrix3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses `a,b,c;d,e,f;g,h,i` with rational entries, keeping the column of each entry for errors.
pub fn parse_matrix_text(text: &str) -> Result<Vec<Vec<(Q, usize)>>> {
    let text = text.trim_end_matches(['\n', '\r']);
    if text.contains('\n') {
        return Err(Error::parse(2, 1, "matrix must be on a single line"));
    }
    let mut rows = Vec::new();
    let mut col = 1usize;
    for row in text.split(';') {
        let mut entries = Vec::new();
        for entry in row.split(',') {
            let lead = entry.len() - entry.trim_start().len();
            let v = parse_q(entry)
                .ok_or_else(|| Error::parse(1, col + lead, format!("cannot parse entry {:?}", entry.trim())))?;
            entries.push((v, col + lead));
            col += entry.len() + 1;
        }
        if entries.len() != 3 {
            return Err(Error::parse(1, col.saturating_sub(row.len() + 1).max(1), "each row needs 3 entries"));
        }
        rows.push(entries);
    }
    if rows.len() != 3 {
        return Err(Error::parse(1, col.max(1), "expected 3 rows separated by ';'"));
    }
    Ok(rows)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HermiteData {
    pub h: IntMatrix3,
    pub u: IntMatrix3,
    pub sheets: BigInt,
}

impl HermiteData {
    /// Exponents `(h11, h21, h31, h22, h32, h33)` of the covering map.
    pub fn exponents(&self) -> [BigInt; 6] {
        let h = &self.h.0;
        [
            h[0][0].clone(),
            h[1][0].clone(),
            h[2][0].clone(),
            h[1][1].clone(),
            h[2][1].clone(),
            h[2][2].clone(),
        ]
    }

    /// Human-readable covering map, e.g. `(z1,z2,z3) -> (z1^2,z2,z3)`.
    pub fn covering_map_text(&self) -> String {
        let h = &self.h.0;
        let term = |var: &str, e: &BigInt| -> Option<String> {
            if e.is_zero() {
                None
            } else if e.is_one() {
                Some(var.to_string())
            } else {
                Some(format!("{var}^{e}"))
            }
        };
        let comp = |parts: Vec<Option<String>>| {
            let p: Vec<String> = parts.into_iter().flatten().collect();
            if p.is_empty() {
                "1".to_string()
            } else {
                p.join("*")
            }
        };
        format!(
            "(z1,z2,z3) -> ({},{},{})",
            comp(vec![term("z1", &h[0][0]), term("z2", &h[1][0]), term("z3", &h[2][0])]),
            comp(vec![term("z2", &h[1][1]), term("z3", &h[2][1])]),
            comp(vec![term("z3", &h[2][2])]),
        )
    }
}

/// Column-style HNF: `a * u = h`, `h` lower triangular with positive diagonal and
/// `0 <= h[i][j] < h[i][i]` for `j < i`.
pub fn hnf(a: &IntMatrix3) -> Result<HermiteData> {
    let det = a.det();
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let mut h = a.clone();
    let mut u = IntMatrix3::identity();
    for i in 0..3 {
        for j in (i + 1)..3 {
            if h.0[i][j].is_zero() {
                continue;
            }
            let ext = h.0[i][i].extended_gcd(&h.0[i][j]);
            let (g, x, y) = (ext.gcd, ext.x, ext.y);
            let p = &h.0[i][i] / &g;
            let r = &h.0[i][j] / &g;
            // [col_i, col_j] <- [x col_i + y col_j, -r col_i + p col_j]; determinant +1
            combine_cols(&mut h, i, j, &x, &y, &(-&r), &p);
            combine_cols(&mut u, i, j, &x, &y, &(-&r), &p);
        }
        if h.0[i][i].is_negative() {
            negate_col(&mut h, i);
            negate_col(&mut u, i);
        }
    }
    // normalize entries left of the diagonal, row by row from the top
    for i in 1..3 {
        for j in 0..i {
            let qt = h.0[i][j].div_floor(&h.0[i][i]);
            if !qt.is_zero() {
                add_col_multiple(&mut h, j, i, &(-&qt));
                add_col_multiple(&mut u, j, i, &(-&qt));
            }
        }
    }
    let sheets = &h.0[0][0] * &h.0[1][1] * &h.0[2][2];
    debug_assert_eq!(sheets, det.abs());
    Ok(HermiteData { h, u, sheets })
}

fn combine_cols(m: &mut IntMatrix3, i: usize, j: usize, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) {
    for r in 0..3 {
        let ci = m.0[r][i].clone();
        let cj = m.0[r][j].clone();
        m.0[r][i] = a * &ci + b * &cj;
        m.0[r][j] = c * &ci + d * &cj;
    }
}

fn negate_col(m: &mut IntMatrix3, j: usize) {
    for r in 0..3 {
        m.0[r][j] = -m.0[r][j].clone();
    }
}

/// col_dst += k * col_src
fn add_col_multiple(m: &mut IntMatrix3, dst: usize, src: usize, k: &BigInt) {
    for r in 0..3 {
        let s = k * &m.0[r][src];
        m.0[r][dst] += s;
    }
}

/// HNF basis of the lattice spanned by arbitrarily many integer columns in Z^3.
/// Returns `None` when the columns do not span a rank-3 lattice.
pub fn hnf_of_columns(cols: &[[BigInt; 3]]) -> Option<IntMatrix3> {
    let mut cols: Vec<[BigInt; 3]> = cols.to_vec();
    let mut basis: Vec<[BigInt; 3]> = Vec::new();
    for row in 0..3 {
        // gather every column with a nonzero entry in this row into one pivot
        let mut pivot: Option<[BigInt; 3]> = None;
        let mut rest = Vec::new();
        for c in cols.drain(..) {
            if c[row].is_zero() {
                rest.push(c);
                continue;
            }
            match pivot.take() {
                None => pivot = Some(c),
                Some(p) => {
                    let ext = p[row].extended_gcd(&c[row]);
                    let pr = &p[row] / &ext.gcd;
                    let cr = &c[row] / &ext.gcd;
                    let np: [BigInt; 3] = std::array::from_fn(|k| &ext.x * &p[k] + &ext.y * &c[k]);
                    let nc: [BigInt; 3] = std::array::from_fn(|k| &pr * &c[k] - &cr * &p[k]);
                    pivot = Some(np);
                    rest.push(nc);
                }
            }
        }
        let mut p = pivot?;
        if p[row].is_negative() {
            p = p.map(|x| -x);
        }
        basis.push(p);
        cols = rest;
    }
    let mut m = IntMatrix3::identity();
    for (j, c) in basis.iter().enumerate() {
        for r in 0..3 {
            m.0[r][j] = c[r].clone();
        }
    }
    for i in 1..3 {
        for j in 0..i {
            let qt = m.0[i][j].div_floor(&m.0[i][i]);
            if !qt.is_zero() {
                add_col_multiple(&mut m, j, i, &(-&qt));
            }
        }
    }
    Some(m)
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct ShearWord {
    /// `(generator in 1..=6, nonzero exponent)`
    pub letters: Vec<(u8, i64)>,
}

impl ShearWord {
    pub fn new(letters: Vec<(u8, i64)>) -> Self {
        ShearWord { letters }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> ShearWord {
        ShearWord { letters: self.letters.iter().rev().map(|&(g, e)| (g, -e)).collect() }
    }

    /// Text form such as `1,-3,4^2`: generator index, sign for the inverse, optional power.
    pub fn to_text(&self) -> String {
        self.letters
            .iter()
            .map(|&(g, e)| {
                let sign = if e < 0 { "-" } else { "" };
                if e.abs() == 1 {
                    format!("{sign}{g}")
                } else {
                    format!("{sign}{g}^{}", e.abs())
                }
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse(text: &str) -> Result<ShearWord> {
        let mut letters = Vec::new();
        let t = text.trim();
        if t.is_empty() {
            return Ok(ShearWord::default());
        }
        let mut col = 1;
        for tok in t.split(',') {
            let s = tok.trim();
            let (neg, body) = match s.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, s.strip_prefix('+').unwrap_or(s)),
            };
            let (g, p) = match body.split_once('^') {
                Some((g, p)) => (g, p.parse::<i64>().ok()),
                None => (body, Some(1)),
            };
            let g: u8 = g.parse().map_err(|_| Error::parse(1, col, format!("bad generator {s:?}")))?;
            let p = p.filter(|p| *p > 0).ok_or_else(|| Error::parse(1, col, format!("bad power in {s:?}")))?;
            if !(1..=6).contains(&g) {
                return Err(Error::parse(1, col, "generator index must be 1..6"));
            }
            letters.push((g, if neg { -p } else { p }));
            col += tok.len() + 1;
        }
        Ok(ShearWord { letters })
    }

    fn push(&mut self, g: u8, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.letters.last_mut() {
            if last.0 == g {
                last.1 += e;
                if last.1 == 0 {
                    self.letters.pop();
                }
                return;
            }
        }
        self.letters.push((g, e));
    }
}

pub fn recompose(w: &ShearWord) -> IntMatrix3 {
    w.letters.iter().fold(IntMatrix3::identity(), |acc, &(g, e)| acc.mul(&IntMatrix3::shear(g, e)))
}

fn generator_at(r: usize, c: usize) -> u8 {
    SHEAR_POSITIONS.iter().position(|&p| p == (r, c)).expect("off-diagonal position") as u8 + 1
}

/// Writes `m` as a product of shear generator powers by Euclidean row reduction.
/// The word is not minimal.
pub fn decompose_sl3(m: &IntMatrix3) -> Result<ShearWord> {
    if !m.det().is_one() {
        return Err(Error::NotUnimodular);
    }
    use num_traits::ToPrimitive;
    let mut a = m.clone();
    // row ops applied to `a` on the left, in order
    let mut ops: Vec<(u8, i64)> = Vec::new();
    let mut row_op = |a: &mut IntMatrix3, dst: usize, src: usize, k: BigInt| {
        if k.is_zero() {
            return;
        }
        let ki = k.to_i64().expect("shear exponent exceeds i64");
        for c in 0..3 {
            let s = &k * &a.0[src][c];
            a.0[dst][c] += s;
        }
        ops.push((generator_at(dst, src), ki));
    };
    for p in 0..2 {
        // Euclid on column p over rows p..3
        loop {
            let nz: Vec<usize> = (p..3).filter(|&r| !a.0[r][p].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&r| a.0[r][p].abs()).unwrap();
            for &r in &nz {
                if r != piv {
                    let qt = &a.0[r][p] / &a.0[piv][p];
                    row_op(&mut a, r, piv, -qt);
                }
            }
        }
        let r = (p..3).find(|&r| !a.0[r][p].is_zero()).ok_or(Error::NotUnimodular)?;
        if r != p {
            // bring the unit entry to the diagonal: row_p += row_r, then clear row_r
            row_op(&mut a, p, r, BigInt::one());
            let k = -(&a.0[r][p] * &a.0[p][p]);
            row_op(&mut a, r, p, k);
        }
        if a.0[p][p].is_negative() {
            // (row_p, row_q) -> (-row_p, -row_q) via the square of a quarter turn
            let qr = p + 1;
            for _ in 0..2 {
                row_op(&mut a, p, qr, BigInt::one());
                row_op(&mut a, qr, p, -BigInt::one());
                row_op(&mut a, p, qr, BigInt::one());
            }
        }
        for r in (p + 1)..3 {
            let k = -a.0[r][p].clone();
            row_op(&mut a, r, p, k);
        }
    }
    // now upper unitriangular
    let k = -a.0[1][2].clone();
    row_op(&mut a, 1, 2, k);
    let k = -a.0[0][1].clone();
    row_op(&mut a, 0, 1, k);
    let k = -a.0[0][2].clone();
    row_op(&mut a, 0, 2, k);
    debug_assert_eq!(a, IntMatrix3::identity());
    // E_k ... E_1 m = I  =>  m = E_1^-1 ... E_k^-1
    let mut w = ShearWord::default();
    for (g, e) in ops {
        w.push(g, -e);
    }
    Ok(w)
}

/// Three rational column vectors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalBasis3 {
    pub columns: [[Q; 3]; 3],
}

impl RationalBasis3 {
    pub fn standard() -> Self {
        Self::from_int(&IntMatrix3::identity())
    }

    pub fn from_int(m: &IntMatrix3) -> Self {
        RationalBasis3 { columns: std::array::from_fn(|j| std::array::from_fn(|i| qb(&m.0[i][j]))) }
    }

    pub fn det(&self) -> Q {
        let c = &self.columns;
        let e = |i: usize, j: usize| &c[j][i];
        e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
    }

    /// Sign of the determinant.
    pub fn orientation(&self) -> i32 {
        let d = self.det();
        if d.is_positive() {
            1
        } else if d.is_negative() {
            -1
        } else {
            0
        }
    }

    /// Rows as text `a,b,c;...` where column j is the j-th basis vector.
    pub fn to_rows(&self) -> [[String; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| fmt_q(&self.columns[j][i])))
    }

    /// `self * m` where `m` is an integer change of basis.
    pub fn times(&self, m: &IntMatrix3) -> RationalBasis3 {
        RationalBasis3 {
            columns: std::array::from_fn(|j| {
                std::array::from_fn(|i| (0..3).map(|k| &self.columns[k][i] * qb(&m.0[k][j])).sum())
            }),
        }
    }

    /// Expresses a column vector in this basis.
    pub fn coordinates_of(&self, v: &[Q; 3]) -> Option<[Q; 3]> {
        let d = self.det();
        if d.is_zero() {
            return None;
        }
        // Cramer's rule
        let mut out: [Q; 3] = std::array::from_fn(|_| Q::zero());
        for (k, o) in out.iter_mut().enumerate() {
            let mut b = self.clone();
            b.columns[k] = v.clone();
            *o = b.det() / &d;
        }
        Some(out)
    }
}

/// Basis of the Z-module generated by the columns of both bases.
pub fn lattice_join(b1: &RationalBasis3, b2: &RationalBasis3) -> Result<RationalBasis3> {
    use num_traits::Zero;
    for b in [b1, b2] {
        if b.orientation() <= 0 {
            return Err(Error::DegenerateBasis);
        }
    }
    let mut den = BigInt::one();
    for b in [b1, b2] {
        for c in &b.columns {
            for x in c {
                den = den.lcm(x.denom());
            }
        }
    }
    let dq = qb(&den);
    let cols: Vec<[BigInt; 3]> = [b1, b2]
        .iter()
        .flat_map(|b| b.columns.iter())
        .map(|c| std::array::from_fn(|i| (&c[i] * &dq).to_integer()))
        .collect();
    let h = hnf_of_columns(&cols).ok_or(Error::DegenerateBasis)?;
    let mut out = RationalBasis3::from_int(&h);
    for c in out.columns.iter_mut() {
        for x in c.iter_mut() {
            *x = &*x / &dq;
        }
    }
    debug_assert!(!out.det().is_zero());
    Ok(out)
}

/// Covering data for a sublattice given by integer coordinates in the superlattice.
pub fn covering_data(sub_in_super: &[[Q; 3]; 3]) -> Result<HermiteData> {
    let mut m = IntMatrix3::identity();
    for i in 0..3 {
        for j in 0..3 {
            let x = &sub_in_super[i][j];
            if !x.is_integer() {
                return Err(Error::NotSublattice(format!("entry ({},{}) = {} is not an integer", i + 1, j + 1, fmt_q(x))));
            }
            m.0[i][j] = x.to_integer();
        }
    }
    covering_data_int(&m)
}

pub fn covering_data_int(m: &IntMatrix3) -> Result<HermiteData> {
    let d = m.det();
    if d.is_zero() {
        return Err(Error::SingularMatrix);
    }
    if d.is_negative() {
        return Err(Error::NotSublattice("negatively oriented sublattice basis".into()));
    }
    hnf(m)
}

/// 2x2 lower-triangular HNF `[[h11, 0], [h21, h22]]` used by diagram covers.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Hnf2 {
    pub h11: i64,
    pub h21: i64,
    pub h22: i64,
}

impl Hnf2 {
    pub fn new(h11: i64, h21: i64, h22: i64) -> Result<Self> {
        if h11 <= 0 || h22 <= 0 {
            return Err(Error::InvalidHnf("diagonal entries must be positive".into()));
        }
        if h21 < 0 || h21 >= h22 {
            return Err(Error::InvalidHnf(format!("need 0 <= h21 < h22, got h21={h21}, h22={h22}")));
        }
        Ok(Hnf2 { h11, h21, h22 })
    }

    pub fn sheets(&self) -> i64 {
        self.h11 * self.h22
    }
}
