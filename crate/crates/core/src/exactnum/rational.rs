//! Exact rational scalars and their `"p/q"` text form.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Exact rational vector.
pub type QVec = Vec<Rational>;

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

pub fn qvec(values: &[i64]) -> QVec {
    values.iter().map(|&v| int(v)).collect()
}

/// Formats as `"p/q"`, including `/1` for integers.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"`, `"p"`, or a finite decimal such as `"-0.25"`. Accepts the
/// Unicode minus sign.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let cleaned: String = text.trim().replace('\u{2212}', "-");
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((p, q)) = cleaned.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = cleaned.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let digits = format!("{}{}", whole.trim().trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let mut numer = BigInt::from_str(&digits).map_err(|_| bad())?;
        if negative {
            numer = -numer;
        }
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(numer, denom));
    }
    BigInt::from_str(&cleaned).map(Rational::from_integer).map_err(|_| bad())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a scaled division when the parts overflow f64.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn vec_to_f64(v: &[Rational]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

/// Closest rational with denominator at most `max_denom` (continued fractions).
pub fn from_f64_approx(x: f64, max_denom: u64) -> Rational {
    if !x.is_finite() {
        return Rational::zero();
    }
    let negative = x < 0.0;
    let mut value = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    for _ in 0..64 {
        let a = value.floor();
        let a_int = a as u128;
        let p2 = a_int.saturating_mul(p1).saturating_add(p0);
        let q2 = a_int.saturating_mul(q1).saturating_add(q0);
        if q2 > max_denom as u128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = value - a;
        if frac < 1e-15 {
            break;
        }
        value = 1.0 / frac;
    }
    if q1 == 0 {
        return Rational::zero();
    }
    let r = Rational::new(BigInt::from(p1), BigInt::from(q1));
    if negative {
        -r
    } else {
        r
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Scales a nonzero vector by a positive factor so that its entries are
/// coprime integers. Two vectors span the same ray iff their primitive forms
/// are equal.
pub fn primitive(v: &[Rational]) -> QVec {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter().map(|x| Rational::from_integer(x / &g)).collect()
}

/// True when `a = c·b` for some rational `c > 0`.
pub fn same_ray(a: &[Rational], b: &[Rational]) -> bool {
    a.len() == b.len() && primitive(a) == primitive(b)
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

/// Smallest rational `q` (of the form k/2^bits) with `q ≥ 0` and `q² ≥ value`.
pub fn sqrt_upper(value: &Rational, bits: u32) -> Rational {
    if !value.is_positive() {
        return Rational::zero();
    }
    let scale = Rational::from_integer(num_traits::pow(BigInt::from(2), bits as usize));
    let guess = to_f64(value).sqrt();
    let mut q = (Rational::from_integer(BigInt::from((guess * 2f64.powi(bits as i32)).floor() as i64)) / &scale).max(Rational::zero());
    let step = Rational::one() / &scale;
    while &q * &q < *value {
        q += &step;
    }
    q
}

pub mod serde_rational {
    //! Serde adapters writing rationals as `"p/q"` strings.
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format_rational(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
            let texts = Vec::<String>::deserialize(d)?;
            texts.iter().map(|t| parse_rational(t).map_err(serde::de::Error::custom)).collect()
        }
    }

    pub mod vecvec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
            let texts: Vec<Vec<String>> = v.iter().map(|row| row.iter().map(format_rational).collect()).collect();
            serde::Serialize::serialize(&texts, s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
            let texts = Vec::<Vec<String>>::deserialize(d)?;
            texts
                .iter()
                .map(|row| row.iter().map(|t| parse_rational(t).map_err(serde::de::Error::custom)).collect())
                .collect()
        }
    }
}

impl crate::exactnum::mat::Scalar for Rational {
    fn zero_elem() -> Self {
        Zero::zero()
    }
    fn one_elem() -> Self {
        One::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("\u{2212}1/1").unwrap(), int(-1));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("1/-2").unwrap(), rat(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn format_keeps_denominator() {
        assert_eq!(format_rational(&int(-1)), "-1/1");
        assert_eq!(format_rational(&rat(4, 6)), "2/3");
    }

    #[test]
    fn primitive_normalizes_rays() {
        let v = vec![rat(1, 2), rat(3, 4), int(0)];
        assert_eq!(primitive(&v), qvec(&[2, 3, 0]));
        assert!(same_ray(&qvec(&[2, 4]), &qvec(&[1, 2])));
        assert!(!same_ray(&qvec(&[-2, -4]), &qvec(&[1, 2])));
    }

    #[test]
    fn sqrt_upper_bounds() {
        let two = int(2);
        let s = sqrt_upper(&two, 20);
        assert!(&s * &s >= two);
        assert!((to_f64(&s) - 2f64.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn approx_from_float() {
        assert_eq!(from_f64_approx(0.75, 1000), rat(3, 4));
        assert_eq!(from_f64_approx(-1.5, 1000), rat(-3, 2));
    }
}
