//! Exact arithmetic in cyclotomic fields Q(ζ_n).
//!
//! Elements are stored in the power basis 1, ζ, …, ζ^{φ(n)-1} with rational
//! coefficients and reduced modulo the n-th cyclotomic polynomial after every
//! product, so equality is plain coefficient equality.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Cyclotomic order used when nothing else is requested; √2 lives in Q(ζ_8).
pub const DEFAULT_ORDER: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cyclotomic order mismatch: {0} vs {1} (embed into a common order first)")]
    OrderMismatch(u32, u32),
    #[error("cannot embed Q(zeta_{from}) into Q(zeta_{to})")]
    NotEmbeddable { from: u32, to: u32 },
    #[error("{0} has no square root in Q(zeta_{1}) handled here")]
    NoSquareRoot(String, u32),
    #[error("invalid cyclotomic order {0}")]
    InvalidOrder(u32),
    #[error("malformed scalar: {0}")]
    Malformed(String),
}

struct Field {
    phi: usize,
    /// `reduce[k]` holds x^k mod Φ_n for k < 2φ - 1.
    reduce: Vec<Vec<BigRational>>,
}

fn cyclotomic_poly(n: u32) -> Vec<i64> {
    // x^n - 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            num = poly_div_exact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    debug_assert_eq!(den[dn], 1);
    let qlen = rem.len() - dn;
    let mut q = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        q[i] = c;
        if c != 0 {
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    q
}

fn field(order: u32) -> Arc<Field> {
    static FIELDS: OnceLock<Mutex<HashMap<u32, Arc<Field>>>> = OnceLock::new();
    let cache = FIELDS.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().unwrap().get(&order) {
        return f.clone();
    }
    let poly = cyclotomic_poly(order);
    let phi = poly.len() - 1;
    let mut reduce: Vec<Vec<BigRational>> = Vec::new();
    let mut cur = vec![BigRational::zero(); phi];
    cur[0] = BigRational::one();
    for _ in 0..(2 * phi).max(1) {
        reduce.push(cur.clone());
        // multiply by x, folding the overflow term back with x^φ = -Σ p_i x^i
        let top = cur[phi - 1].clone();
        for i in (1..phi).rev() {
            cur[i] = cur[i - 1].clone();
        }
        cur[0] = BigRational::zero();
        if !top.is_zero() {
            for (i, c) in cur.iter_mut().enumerate() {
                *c -= &top * BigRational::from_integer(BigInt::from(poly[i]));
            }
        }
    }
    let f = Arc::new(Field { phi, reduce });
    cache.lock().unwrap().insert(order, f.clone());
    f
}

/// Euler's totient of `n`, the dimension of Q(ζ_n) over Q.
pub fn totient(n: u32) -> usize {
    field(n).phi
}

/// Least common multiple, handy for choosing a common cyclotomic order.
pub fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    order: u32,
    coeffs: Vec<BigRational>,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Scalar {
    fn check_order(order: u32) -> Result<(), ScalarError> {
        if order == 0 || order > 4096 {
            return Err(ScalarError::InvalidOrder(order));
        }
        Ok(())
    }

    pub fn zero(order: u32) -> Scalar {
        Self::check_order(order).expect("invalid cyclotomic order");
        Scalar { order, coeffs: vec![BigRational::zero(); field(order).phi] }
    }

    pub fn one(order: u32) -> Scalar {
        Self::from_rational(BigRational::one(), order)
    }

    pub fn from_int(v: i64, order: u32) -> Scalar {
        Self::from_rational(q(v), order)
    }

    pub fn from_ratio(num: i64, den: i64, order: u32) -> Scalar {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)), order)
    }

    pub fn from_rational(r: BigRational, order: u32) -> Scalar {
        let mut s = Self::zero(order);
        s.coeffs[0] = r;
        s
    }

    /// Build from power-basis coordinates; `coeffs.len()` must equal φ(order).
    pub fn from_coeffs(order: u32, coeffs: Vec<BigRational>) -> Result<Scalar, ScalarError> {
        Self::check_order(order)?;
        let phi = field(order).phi;
        if coeffs.len() != phi {
            return Err(ScalarError::Malformed(format!(
                "expected {phi} coefficients for order {order}, got {}",
                coeffs.len()
            )));
        }
        Ok(Scalar { order, coeffs })
    }

    /// ζ_n^k for any integer k.
    pub fn zeta_pow(order: u32, k: i64) -> Scalar {
        let f = field(order);
        let e = k.rem_euclid(order as i64) as usize;
        // x^e with e < n; fold down through repeated multiplication by x.
        let mut s = Self::one(order);
        let x = if f.phi > 1 {
            let mut c = vec![BigRational::zero(); f.phi];
            c[1] = BigRational::one();
            Scalar { order, coeffs: c }
        } else {
            // Q(ζ_1) = Q(ζ_2) = Q, ζ = ±1
            Self::from_int(if order == 2 { -1 } else { 1 }, order)
        };
        for _ in 0..e {
            s = &s * &x;
        }
        s
    }

    /// exp(2πi·num/den); `den` must divide the order.
    pub fn root_of_unity(order: u32, num: i64, den: u32) -> Result<Scalar, ScalarError> {
        if den == 0 || order % den != 0 {
            return Err(ScalarError::NotEmbeddable { from: den, to: order });
        }
        Ok(Self::zeta_pow(order, num * (order / den) as i64))
    }

    /// √2 = ζ_8 + ζ_8^{-1}; needs 8 | order.
    pub fn sqrt2(order: u32) -> Result<Scalar, ScalarError> {
        let a = Self::root_of_unity(order, 1, 8)?;
        let b = Self::root_of_unity(order, -1, 8)?;
        Ok(&a + &b)
    }

    /// (-1)^e as a scalar.
    pub fn sign(e: i64, order: u32) -> Scalar {
        Self::from_int(if e.rem_euclid(2) == 0 { 1 } else { -1 }, order)
    }

    /// Positive square root of a non-negative rational, available when the
    /// rational is a square or twice a square (the latter needs 8 | order).
    pub fn sqrt_rational(r: &BigRational, order: u32) -> Result<Scalar, ScalarError> {
        if r.is_negative() {
            return Err(ScalarError::NoSquareRoot(r.to_string(), order));
        }
        if let Some(s) = rational_sqrt(r) {
            return Ok(Self::from_rational(s, order));
        }
        let half = r / q(2);
        if let Some(s) = rational_sqrt(&half) {
            let root2 = Self::sqrt2(order)
                .map_err(|_| ScalarError::NoSquareRoot(r.to_string(), order))?;
            return Ok(&Self::from_rational(s, order) * &root2);
        }
        Err(ScalarError::NoSquareRoot(r.to_string(), order))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The value as a rational, if it lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Re-express in Q(ζ_m) for a multiple m of the current order.
    pub fn embed(&self, new_order: u32) -> Result<Scalar, ScalarError> {
        Self::check_order(new_order)?;
        if new_order % self.order != 0 {
            return Err(ScalarError::NotEmbeddable { from: self.order, to: new_order });
        }
        if new_order == self.order {
            return Ok(self.clone());
        }
        let step = (new_order / self.order) as i64;
        let mut out = Self::zero(new_order);
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out += &(&Self::zeta_pow(new_order, k as i64 * step) * &Self::from_rational(c.clone(), new_order));
            }
        }
        Ok(out)
    }

    pub fn conj(&self) -> Scalar {
        let mut out = Self::zero(self.order);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k == 0 {
                out.coeffs[0] += c;
            } else {
                let z = Self::zeta_pow(self.order, -(k as i64));
                for (o, zc) in out.coeffs.iter_mut().zip(z.coeffs.iter()) {
                    *o += c * zc;
                }
            }
        }
        out
    }

    /// |a|², as a field element (real, non-negative).
    pub fn abs_squared(&self) -> Scalar {
        self * &self.conj()
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_order(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Scalar { order: self.order, coeffs })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_order(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Scalar { order: self.order, coeffs })
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_order(other)?;
        // Rational fast path: most F-symbol traffic is ±1.
        if let Some(r) = self.as_rational() {
            return Ok(Scalar { order: self.order, coeffs: other.coeffs.iter().map(|c| c * &r).collect() });
        }
        if let Some(r) = other.as_rational() {
            return Ok(Scalar { order: self.order, coeffs: self.coeffs.iter().map(|c| c * &r).collect() });
        }
        let f = field(self.order);
        let phi = f.phi;
        let mut conv = vec![BigRational::zero(); 2 * phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    conv[i + j] += a * b;
                }
            }
        }
        let mut coeffs: Vec<BigRational> = conv[..phi].to_vec();
        for (k, c) in conv.iter().enumerate().skip(phi) {
            if c.is_zero() {
                continue;
            }
            for (o, r) in coeffs.iter_mut().zip(&f.reduce[k]) {
                if !r.is_zero() {
                    *o += c * r;
                }
            }
        }
        Ok(Scalar { order: self.order, coeffs })
    }

    pub fn try_inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(r.recip(), self.order));
        }
        // Solve (multiplication-by-self) · v = 1 in the power basis.
        let phi = field(self.order).phi;
        let mut cols = Vec::with_capacity(phi);
        for j in 0..phi {
            cols.push(&Self::zeta_pow(self.order, j as i64) * self);
        }
        let mut m: Vec<Vec<BigRational>> = (0..phi)
            .map(|i| {
                let mut row: Vec<BigRational> = cols.iter().map(|c| c.coeffs[i].clone()).collect();
                row.push(if i == 0 { BigRational::one() } else { BigRational::zero() });
                row
            })
            .collect();
        for col in 0..phi {
            let piv = (col..phi).find(|&r| !m[r][col].is_zero()).ok_or(ScalarError::DivisionByZero)?;
            m.swap(col, piv);
            let p = m[col][col].clone();
            for v in m[col].iter_mut() {
                *v /= &p;
            }
            let prow = m[col].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != col && !row[col].is_zero() {
                    let f = row[col].clone();
                    for (v, pv) in row.iter_mut().zip(&prow) {
                        *v -= &f * pv;
                    }
                }
            }
        }
        let coeffs = m.into_iter().map(|row| row[phi].clone()).collect();
        Ok(Scalar { order: self.order, coeffs })
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_order(other)?;
        self.try_mul(&other.try_inv()?)
    }

    fn same_order(&self, other: &Scalar) -> Result<(), ScalarError> {
        if self.order != other.order {
            Err(ScalarError::OrderMismatch(self.order, other.order))
        } else {
            Ok(())
        }
    }

    /// Image under the embedding ζ_n ↦ exp(2πi/n).
    pub fn to_float(&self) -> Complex64 {
        let n = self.order as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = rational_to_f64(c);
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / n;
            acc += Complex64::new(v * theta.cos(), v * theta.sin());
        }
        if self.conj() == *self {
            acc.im = 0.0;
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut out = Self::one(self.order);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => r.to_f64().unwrap_or(f64::NAN),
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// The field operations exposed for scripting and the FFI layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Mul,
    Div,
    Conj,
    Neg,
}

/// Apply `op`; unary operations ignore `b`.
pub fn field_arith(a: &Scalar, b: &Scalar, op: FieldOp) -> Result<Scalar, ScalarError> {
    match op {
        FieldOp::Add => a.try_add(b),
        FieldOp::Mul => a.try_mul(b),
        FieldOp::Div => a.try_div(b),
        FieldOp::Conj => Ok(a.conj()),
        FieldOp::Neg => Ok(-a),
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$f(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$f(&rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$f(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);
binop!(Div, div, try_div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        assert_eq!(self.order, rhs.order, "cyclotomic order mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        assert_eq!(self.order, rhs.order, "cyclotomic order mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            terms.push(match k {
                0 => c.to_string(),
                1 => format!("({c})*z{}", self.order),
                _ => format!("({c})*z{}^{k}", self.order),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.to_float();
        write!(f, "Scalar[{self} ≈ {}{:+}i]", z.re, z.im)
    }
}

// JSON form: { "order": n, "coeffs": [[num, den], ...] }. Integers that do not
// fit in an i64 are written as decimal strings.

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Small(i64),
    Big(String),
}

impl IntRepr {
    fn of(v: &BigInt) -> IntRepr {
        match v.to_i64() {
            Some(x) => IntRepr::Small(x),
            None => IntRepr::Big(v.to_string()),
        }
    }

    fn value(&self) -> Result<BigInt, String> {
        match self {
            IntRepr::Small(x) => Ok(BigInt::from(*x)),
            IntRepr::Big(s) => s.parse().map_err(|_| format!("bad integer {s:?}")),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScalarRepr {
    order: u32,
    coeffs: Vec<(IntRepr, IntRepr)>,
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ScalarRepr {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| (IntRepr::of(c.numer()), IntRepr::of(c.denom()))).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let r = ScalarRepr::deserialize(d)?;
        let mut coeffs = Vec::with_capacity(r.coeffs.len());
        for (n, den) in &r.coeffs {
            let n = n.value().map_err(D::Error::custom)?;
            let den = den.value().map_err(D::Error::custom)?;
            if den.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            coeffs.push(BigRational::new(n, den));
        }
        Scalar::from_coeffs(r.order, coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(totient(24), 8);
        assert_eq!(totient(40), 16);
    }

    #[test]
    fn sqrt2_squares_to_two() {
        let r = Scalar::sqrt2(8).unwrap();
        assert_eq!(&r * &r, Scalar::from_int(2, 8));
        let h = Scalar::one(8) / r;
        assert_eq!(&h * &h, Scalar::from_ratio(1, 2, 8));
    }

    #[test]
    fn conj_of_real_is_identity() {
        let v = Scalar::sign(1, 8) / Scalar::sqrt2(8).unwrap();
        assert_eq!(v.conj(), v);
        let z = Scalar::zeta_pow(8, 1);
        assert_eq!(&z * &z.conj(), Scalar::one(8));
    }

    #[test]
    fn float_values() {
        let s = Scalar::sqrt2(8).unwrap().to_float();
        assert!((s.re - std::f64::consts::SQRT_2).abs() < 1e-15 && s.im.abs() < 1e-15);
        assert_eq!(Scalar::zero(8).to_float(), Complex64::new(0.0, 0.0));
        let f11 = (Scalar::sign(1, 8) / Scalar::sqrt2(8).unwrap()).to_float();
        assert!((f11.re + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn errors_are_explicit() {
        assert_eq!(Scalar::one(8).try_div(&Scalar::zero(8)), Err(ScalarError::DivisionByZero));
        assert_eq!(Scalar::one(8).try_add(&Scalar::one(24)), Err(ScalarError::OrderMismatch(8, 24)));
        assert!(Scalar::one(8).embed(12).is_err());
    }

    #[test]
    fn embedding_preserves_value() {
        let w = Scalar::root_of_unity(3, 1, 3).unwrap();
        let e = w.embed(24).unwrap();
        assert!((w.to_float() - e.to_float()).norm() < 1e-14);
        assert_eq!(e.pow(3), Scalar::one(24));
        let r = Scalar::sqrt2(8).unwrap().embed(40).unwrap();
        assert_eq!(&r * &r, Scalar::from_int(2, 40));
    }

    #[test]
    fn square_roots() {
        let half = BigRational::new(1.into(), 2.into());
        let s = Scalar::sqrt_rational(&half, 8).unwrap();
        assert_eq!(&s * &s, Scalar::from_ratio(1, 2, 8));
        assert!(s.to_float().re > 0.0);
        assert!(Scalar::sqrt_rational(&q(3), 8).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let v = Scalar::from_ratio(-3, 4, 8) + Scalar::sqrt2(8).unwrap();
        let txt = serde_json::to_string(&v).unwrap();
        assert_eq!(txt, r#"{"order":8,"coeffs":[[-3,4],[1,1],[0,1],[-1,1]]}"#);
        let back: Scalar = serde_json::from_str(&txt).unwrap();
        assert_eq!(back, v);
    }
}
