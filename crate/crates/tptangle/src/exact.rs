//! Exact scalar helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;

pub type Q = BigRational;
pub type Q2 = [Q; 2];
pub type Q3 = [Q; 3];

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qb(n: &BigInt) -> Q {
    BigRational::from_integer(n.clone())
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.125"`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = ip.starts_with('-');
        let ipv = if ip == "-" || ip.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(ip).ok()?
        };
        let scale = BigInt::from(10u32).pow(fp.len() as u32);
        let frac = BigInt::from_str(fp).ok()?;
        let mag = ipv.abs() * &scale + frac;
        let n = if neg { -mag } else { mag };
        return Some(BigRational::new(n, scale));
    }
    BigInt::from_str(s).ok().map(BigRational::from_integer)
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn floor_q(x: &Q) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn floor_i64(x: &Q) -> i64 {
    floor_q(x).to_i64().expect("coordinate out of i64 range")
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Q) -> Q {
    x - qb(&floor_q(x))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn is_int(x: &Q) -> bool {
    x.denom().is_one()
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

pub fn sub2(a: &Q2, b: &Q2) -> Q2 {
    [&a[0] - &b[0], &a[1] - &b[1]]
}

pub fn add2(a: &Q2, b: &Q2) -> Q2 {
    [&a[0] + &b[0], &a[1] + &b[1]]
}

pub fn scale2(a: &Q2, s: &Q) -> Q2 {
    [&a[0] * s, &a[1] * s]
}

pub fn cross2(a: &Q2, b: &Q2) -> Q {
    &a[0] * &b[1] - &a[1] * &b[0]
}

pub fn dot2(a: &Q2, b: &Q2) -> Q {
    &a[0] * &b[0] + &a[1] * &b[1]
}

/// `x + k`; shifting by an integer keeps the fraction reduced.
pub fn add_int(x: &Q, k: i64) -> Q {
    if k == 0 {
        return x.clone();
    }
    BigRational::new_raw(x.numer() + x.denom() * k, x.denom().clone())
}

pub fn wrap2(a: &Q2, w: [i64; 2]) -> Q2 {
    [add_int(&a[0], w[0]), add_int(&a[1], w[1])]
}

pub fn frac2(a: &Q2) -> Q2 {
    [frac(&a[0]), frac(&a[1])]
}

pub fn floor2(a: &Q2) -> [i64; 2] {
    [floor_i64(&a[0]), floor_i64(&a[1])]
}

pub fn sub3(a: &Q3, b: &Q3) -> Q3 {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

pub fn add3(a: &Q3, b: &Q3) -> Q3 {
    [&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2]]
}

pub fn dot3(a: &Q3, b: &Q3) -> Q {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

pub fn frac3(a: &Q3) -> Q3 {
    [frac(&a[0]), frac(&a[1]), frac(&a[2])]
}

pub fn floor3(a: &Q3) -> [i64; 3] {
    [floor_i64(&a[0]), floor_i64(&a[1]), floor_i64(&a[2])]
}

pub fn wrap3(a: &Q3, w: [i64; 3]) -> Q3 {
    [add_int(&a[0], w[0]), add_int(&a[1], w[1]), add_int(&a[2], w[2])]
}

/// Serde adapters writing rationals as `"p/q"` strings.
pub mod serde_q {
    use super::{fmt_q, parse_q, Q};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let text = String::deserialize(d)?;
        parse_q(&text).ok_or_else(|| D::Error::custom(format!("not a rational number: {text:?}")))
    }

    pub mod pair {
        use super::super::{fmt_q, parse_q, Q2};
        use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(x: &Q2, s: S) -> Result<S::Ok, S::Error> {
            [fmt_q(&x[0]), fmt_q(&x[1])].serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q2, D::Error> {
            let [a, b] = <[String; 2]>::deserialize(d)?;
            let p = |t: &str| parse_q(t).ok_or_else(|| D::Error::custom(format!("not a rational number: {t:?}")));
            Ok([p(&a)?, p(&b)?])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("3/4"), Some(q(3, 4)));
        assert_eq!(parse_q("-2"), Some(qi(-2)));
        assert_eq!(parse_q("0.125"), Some(q(1, 8)));
        assert_eq!(parse_q("-0.5"), Some(q(-1, 2)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(parse_q("x"), None);
    }

    #[test]
    fn floor_and_frac_negative() {
        assert_eq!(floor_q(&q(-1, 4)), BigInt::from(-1));
        assert_eq!(frac(&q(-1, 4)), q(3, 4));
        assert_eq!(frac(&qi(2)), zero());
        assert_eq!(fmt_q(&q(6, 8)), "3/4");
        assert_eq!(add_int(&q(-7, 4), 2), q(1, 4));
        assert_eq!(add_int(&q(3, 1), -3), zero());
    }
}
