//! Exact field arithmetic: finite fields GF(p^ℓ) in a polynomial basis, and
//! the rationals.
//!
//! Elements of GF(p^ℓ) are stored as the integer `c0 + c1·p + … + c(ℓ-1)·p^(ℓ-1)`
//! where `c0 + c1·ω + …` is the residue class modulo the field's modulus.
//! The integer is never exposed as arithmetic; it is only an encoding.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// Fields up to this order get full addition and multiplication tables.
const TABLE_LIMIT: u32 = 256;

/// Largest field order we are willing to encode in a `u32`.
const MAX_ORDER: u64 = 1 << 24;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Writes `q` as `p^ell` when it is a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut ell = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        ell += 1;
    }
    (rest == 1).then_some((p as u32, ell))
}

/// Remainder of `a` modulo the monic polynomial `m`, coefficients ascending.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let p64 = p as u64;
    while r.len() > dm {
        let lead = r.pop().unwrap() % p64;
        if lead != 0 {
            let off = r.len() - dm;
            for (i, &mc) in m[..dm].iter().enumerate() {
                let sub = lead * mc as u64 % p64;
                r[off + i] = (r[off + i] + p64 - sub) % p64;
            }
        }
    }
    r.into_iter().map(|c| (c % p64) as u32).collect()
}

fn poly_is_zero(a: &[u32]) -> bool {
    a.iter().all(|&c| c == 0)
}

/// Irreducibility by trial division against every monic polynomial of
/// degree at most `deg/2`.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut g = digits(idx, p, d);
            g.push(1);
            if poly_is_zero(&poly_rem(f, &g, p)) {
                return false;
            }
        }
    }
    true
}

/// Base-`p` digits of `x`, least significant first, exactly `len` of them.
fn digits(mut x: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((x % p as u64) as u32);
        x /= p as u64;
    }
    out
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0u32, |acc, &d| acc * p + d)
}

/// GF(p^ℓ) with an explicit monic irreducible modulus.
pub struct GaloisField {
    p: u32,
    ell: u32,
    q: u32,
    modulus: Vec<u32>,
    add_table: Vec<u32>,
    mul_table: Vec<u32>,
    neg_table: Vec<u32>,
    inv_table: Vec<u32>,
}

impl GaloisField {
    fn new(p: u32, modulus: Vec<u32>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if p >= 1 << 16 {
            return Err(Error::InvalidField(format!("characteristic {p} too large")));
        }
        if modulus.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree at least 1".into()));
        }
        let ell = (modulus.len() - 1) as u32;
        let q = (p as u64)
            .checked_pow(ell)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or_else(|| Error::InvalidField(format!("GF({p}^{ell}) is too large")))?
            as u32;
        let monic = *modulus.last().unwrap() == 1 && modulus.iter().all(|&c| c < p);
        if !monic || !is_irreducible(&modulus, p) {
            return Err(Error::BadModulus(format!("{modulus:?}")));
        }
        let mut gf = GaloisField {
            p,
            ell,
            q,
            modulus,
            add_table: Vec::new(),
            mul_table: Vec::new(),
            neg_table: Vec::new(),
            inv_table: Vec::new(),
        };
        if q <= TABLE_LIMIT {
            let n = q as usize;
            let mut add = vec![0; n * n];
            let mut mul = vec![0; n * n];
            for a in 0..q {
                for b in 0..q {
                    add[a as usize * n + b as usize] = gf.add_slow(a, b);
                    mul[a as usize * n + b as usize] = gf.mul_slow(a, b);
                }
            }
            let neg = (0..q).map(|a| gf.neg_slow(a)).collect();
            let mut inv = vec![0; n];
            for a in 1..q {
                inv[a as usize] = (1..q).find(|&b| mul[a as usize * n + b as usize] == 1).unwrap();
            }
            gf.add_table = add;
            gf.mul_table = mul;
            gf.neg_table = neg;
            gf.inv_table = inv;
        }
        // Spot check: the multiplicative group has order q - 1.
        let probe = if ell > 1 { p } else { p - 1 };
        if gf.pow_raw(probe, q as u64 - 1) != 1 {
            return Err(Error::BadModulus(format!("{:?}", gf.modulus)));
        }
        Ok(gf)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients, constant term first; the last entry is 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.coords(a), self.coords(b));
        let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        undigits(&s, self.p)
    }

    fn neg_slow(&self, a: u32) -> u32 {
        let s: Vec<u32> = self
            .coords(a)
            .iter()
            .map(|&x| (self.p - x) % self.p)
            .collect();
        undigits(&s, self.p)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.coords(a), self.coords(b));
        let mut prod = vec![0u32; 2 * self.ell as usize - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % self.p as u64) as u32;
            }
        }
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.ell as usize, 0);
        undigits(&r, self.p)
    }

    pub(crate) fn coords(&self, a: u32) -> Vec<u32> {
        digits(a as u64, self.p, self.ell as usize)
    }

    #[inline]
    pub(crate) fn add_raw(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            a ^ b
        } else if self.add_table.is_empty() {
            self.add_slow(a, b)
        } else {
            self.add_table[(a * self.q + b) as usize]
        }
    }

    #[inline]
    pub(crate) fn neg_raw(&self, a: u32) -> u32 {
        if self.p == 2 {
            a
        } else if self.neg_table.is_empty() {
            self.neg_slow(a)
        } else {
            self.neg_table[a as usize]
        }
    }

    #[inline]
    pub(crate) fn mul_raw(&self, a: u32, b: u32) -> u32 {
        if self.mul_table.is_empty() {
            self.mul_slow(a, b)
        } else {
            self.mul_table[(a * self.q + b) as usize]
        }
    }

    pub(crate) fn inv_raw(&self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else if self.inv_table.is_empty() {
            Some(self.pow_raw(a, self.q as u64 - 2))
        } else {
            Some(self.inv_table[a as usize])
        }
    }

    pub(crate) fn pow_raw(&self, mut base: u32, mut e: u64) -> u32 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            e >>= 1;
        }
        acc
    }
}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}; {:?})", self.p, self.ell, self.modulus)
    }
}

/// A field: a finite field GF(p^ℓ), or ℚ.
#[derive(Clone, Debug)]
pub enum Field {
    Finite(Arc<GaloisField>),
    Rational,
}

/// An element of some [`Field`]; canonical, so `==` is field equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldValue {
    Finite(u32),
    Rational(BigRational),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
    Inv,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Field::Finite(a), Field::Finite(b)) => {
                Arc::ptr_eq(a, b) || (a.p == b.p && a.modulus == b.modulus)
            }
            (Field::Rational, Field::Rational) => true,
            _ => false,
        }
    }
}

impl Eq for Field {}

impl Hash for Field {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Field::Finite(gf) => {
                gf.p.hash(state);
                gf.modulus.hash(state);
            }
            Field::Rational => 0u8.hash(state),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Finite(gf) if gf.ell == 1 => write!(f, "GF({})", gf.p),
            Field::Finite(gf) => write!(f, "GF({}^{})", gf.p, gf.ell),
            Field::Rational => write!(f, "Q"),
        }
    }
}

impl Field {
    /// GF(p^ℓ) whose modulus is the lexicographically smallest monic
    /// irreducible of degree ℓ, comparing coefficients from the constant
    /// term upward.
    pub fn galois(p: u32, ell: u32) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if ell == 0 {
            return Err(Error::InvalidField("degree must be positive".into()));
        }
        (p as u64)
            .checked_pow(ell)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or_else(|| Error::InvalidField(format!("GF({p}^{ell}) is too large")))?;
        let count = (p as u64).pow(ell);
        for idx in 0..count {
            // c0 is the most significant digit of the enumeration order
            let mut m: Vec<u32> = digits(idx, p, ell as usize);
            m.reverse();
            m.push(1);
            if is_irreducible(&m, p) {
                return Ok(Field::Finite(Arc::new(GaloisField::new(p, m)?)));
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// GF(p^ℓ) with a caller-chosen modulus (ascending coefficients, monic).
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Field> {
        Ok(Field::Finite(Arc::new(GaloisField::new(p, modulus)?)))
    }

    /// The field of order `q`, which must be a prime power.
    pub fn of_order(q: u64) -> Result<Field> {
        let (p, ell) =
            prime_power(q).ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        Field::galois(p, ell)
    }

    pub fn rational() -> Field {
        Field::Rational
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Field::Finite(_))
    }

    pub fn galois_field(&self) -> Option<&GaloisField> {
        match self {
            Field::Finite(gf) => Some(gf),
            Field::Rational => None,
        }
    }

    /// 0 for ℚ.
    pub fn characteristic(&self) -> u32 {
        match self {
            Field::Finite(gf) => gf.p,
            Field::Rational => 0,
        }
    }

    pub fn order(&self) -> Option<u64> {
        self.galois_field().map(|gf| gf.q as u64)
    }

    /// Dimension over the prime field, when finite.
    pub fn degree(&self) -> Option<u32> {
        self.galois_field().map(|gf| gf.ell)
    }

    /// The prime field F₀ of this field.
    pub fn prime_field(&self) -> Field {
        match self {
            Field::Finite(gf) if gf.ell == 1 => self.clone(),
            Field::Finite(gf) => Field::galois(gf.p, 1).expect("prime field"),
            Field::Rational => Field::Rational,
        }
    }

    pub fn zero(&self) -> FieldValue {
        match self {
            Field::Finite(_) => FieldValue::Finite(0),
            Field::Rational => FieldValue::Rational(BigRational::zero()),
        }
    }

    pub fn one(&self) -> FieldValue {
        match self {
            Field::Finite(_) => FieldValue::Finite(1),
            Field::Rational => FieldValue::Rational(BigRational::one()),
        }
    }

    /// Image of an integer under the canonical ring map ℤ → F.
    pub fn from_int(&self, n: i64) -> FieldValue {
        match self {
            Field::Finite(gf) => FieldValue::Finite(n.rem_euclid(gf.p as i64) as u32),
            Field::Rational => FieldValue::Rational(BigRational::from_integer(n.into())),
        }
    }

    /// `num/den` as an element; panics on a zero denominator.
    pub fn from_ratio(&self, num: i64, den: i64) -> FieldValue {
        let d = self.from_int(den);
        self.div(&self.from_int(num), &d).expect("nonzero denominator")
    }

    /// Element with the given encoding (finite fields only).
    pub fn element(&self, code: u32) -> FieldValue {
        match self {
            Field::Finite(gf) => {
                assert!(code < gf.q, "code {code} out of range for {self}");
                FieldValue::Finite(code)
            }
            Field::Rational => panic!("rationals have no element encoding"),
        }
    }

    /// The class ω of x modulo the field's modulus. For ℓ = 1 this is the
    /// root of the linear modulus.
    pub fn omega(&self) -> FieldValue {
        match self {
            Field::Finite(gf) if gf.ell > 1 => FieldValue::Finite(gf.p),
            Field::Finite(gf) => {
                // root of x + c0
                FieldValue::Finite((gf.p - gf.modulus[0]) % gf.p)
            }
            Field::Rational => panic!("rationals have no polynomial basis"),
        }
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> Result<Vec<FieldValue>> {
        match self {
            Field::Finite(gf) => Ok((0..gf.q).map(FieldValue::Finite).collect()),
            Field::Rational => Err(Error::RationalUnsupported("enumerating elements")),
        }
    }

    /// All vectors of length `len` in lexicographic order, first coordinate
    /// most significant.
    pub fn vectors(&self, len: usize) -> Result<impl Iterator<Item = Vec<FieldValue>>> {
        let q = self
            .order()
            .ok_or(Error::RationalUnsupported("enumerating vectors"))?;
        let total = q
            .checked_pow(len as u32)
            .ok_or_else(|| Error::Unsupported(format!("{q}^{len} vectors")))?;
        let field = self.clone();
        Ok((0..total).map(move |idx| field.vector_at(idx, len)))
    }

    /// The `idx`-th vector of [`Field::vectors`].
    pub fn vector_at(&self, idx: u64, len: usize) -> Vec<FieldValue> {
        let q = self.order().expect("finite field");
        let mut v = vec![FieldValue::Finite(0); len];
        let mut rest = idx;
        for slot in v.iter_mut().rev() {
            *slot = FieldValue::Finite((rest % q) as u32);
            rest /= q;
        }
        v
    }

    /// Position of `v` in [`Field::vectors`].
    pub fn vector_index(&self, v: &[FieldValue]) -> u64 {
        let q = self.order().expect("finite field");
        v.iter()
            .fold(0, |acc, x| acc * q + x.code().expect("finite element") as u64)
    }

    pub fn contains(&self, x: &FieldValue) -> bool {
        match (self, x) {
            (Field::Finite(gf), FieldValue::Finite(c)) => *c < gf.q,
            (Field::Rational, FieldValue::Rational(_)) => true,
            _ => false,
        }
    }

    fn check(&self, x: &FieldValue) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else if matches!(
            (self, x),
            (Field::Finite(_), FieldValue::Finite(_)) | (Field::Rational, FieldValue::Rational(_))
        ) {
            Err(Error::NotInField(format!("{x:?}"), self.to_string()))
        } else {
            Err(Error::FieldMismatch)
        }
    }

    /// Membership-checked arithmetic.
    pub fn arith(&self, op: ArithOp, x: &FieldValue, y: Option<&FieldValue>) -> Result<FieldValue> {
        self.check(x)?;
        if let Some(y) = y {
            self.check(y)?;
        }
        let need = || Error::Dimension(format!("{op:?} needs two operands"));
        match op {
            ArithOp::Add => Ok(self.add(x, y.ok_or_else(need)?)),
            ArithOp::Mul => Ok(self.mul(x, y.ok_or_else(need)?)),
            ArithOp::Neg => Ok(self.neg(x)),
            ArithOp::Inv => self.inv(x),
        }
    }

    #[inline]
    pub fn add(&self, x: &FieldValue, y: &FieldValue) -> FieldValue {
        match (self, x, y) {
            (Field::Finite(gf), FieldValue::Finite(a), FieldValue::Finite(b)) => {
                FieldValue::Finite(gf.add_raw(*a, *b))
            }
            (Field::Rational, FieldValue::Rational(a), FieldValue::Rational(b)) => {
                FieldValue::Rational(a + b)
            }
            _ => panic!("mixed-field operands"),
        }
    }

    #[inline]
    pub fn neg(&self, x: &FieldValue) -> FieldValue {
        match (self, x) {
            (Field::Finite(gf), FieldValue::Finite(a)) => FieldValue::Finite(gf.neg_raw(*a)),
            (Field::Rational, FieldValue::Rational(a)) => FieldValue::Rational(-a),
            _ => panic!("mixed-field operands"),
        }
    }

    #[inline]
    pub fn sub(&self, x: &FieldValue, y: &FieldValue) -> FieldValue {
        self.add(x, &self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: &FieldValue, y: &FieldValue) -> FieldValue {
        match (self, x, y) {
            (Field::Finite(gf), FieldValue::Finite(a), FieldValue::Finite(b)) => {
                FieldValue::Finite(gf.mul_raw(*a, *b))
            }
            (Field::Rational, FieldValue::Rational(a), FieldValue::Rational(b)) => {
                FieldValue::Rational(a * b)
            }
            _ => panic!("mixed-field operands"),
        }
    }

    pub fn inv(&self, x: &FieldValue) -> Result<FieldValue> {
        match (self, x) {
            (Field::Finite(gf), FieldValue::Finite(a)) => gf
                .inv_raw(*a)
                .map(FieldValue::Finite)
                .ok_or(Error::DivisionByZero),
            (Field::Rational, FieldValue::Rational(a)) => {
                if a.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(FieldValue::Rational(a.recip()))
                }
            }
            _ => Err(Error::FieldMismatch),
        }
    }

    pub fn div(&self, x: &FieldValue, y: &FieldValue) -> Result<FieldValue> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    pub fn pow(&self, x: &FieldValue, e: u64) -> FieldValue {
        match (self, x) {
            (Field::Finite(gf), FieldValue::Finite(a)) => FieldValue::Finite(gf.pow_raw(*a, e)),
            _ => {
                let mut acc = self.one();
                let mut base = x.clone();
                let mut e = e;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = self.mul(&acc, &base);
                    }
                    base = self.mul(&base, &base);
                    e >>= 1;
                }
                acc
            }
        }
    }

    pub fn is_zero(&self, x: &FieldValue) -> bool {
        match x {
            FieldValue::Finite(a) => *a == 0,
            FieldValue::Rational(a) => a.is_zero(),
        }
    }

    /// Coordinates over the prime field in the basis {1, ω, …, ω^(ℓ-1)}.
    pub fn prime_coords(&self, x: &FieldValue) -> Result<Vec<u32>> {
        match (self, x) {
            (Field::Finite(gf), FieldValue::Finite(a)) if *a < gf.q => Ok(gf.coords(*a)),
            (Field::Finite(_), FieldValue::Finite(_)) => Err(self.check(x).unwrap_err()),
            (Field::Finite(_), _) => Err(Error::FieldMismatch),
            (Field::Rational, _) => Err(Error::RationalUnsupported("prime-field coordinates")),
        }
    }

    /// Inverse of [`Field::prime_coords`].
    pub fn from_prime_coords(&self, coords: &[u32]) -> Result<FieldValue> {
        let gf = self
            .galois_field()
            .ok_or(Error::RationalUnsupported("prime-field coordinates"))?;
        if coords.len() != gf.ell as usize || coords.iter().any(|&c| c >= gf.p) {
            return Err(Error::Dimension(format!(
                "expected {} residues mod {}, got {coords:?}",
                gf.ell, gf.p
            )));
        }
        Ok(FieldValue::Finite(undigits(coords, gf.p)))
    }

    /// Uniform element for finite fields; a small random fraction for ℚ.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldValue {
        match self {
            Field::Finite(gf) => FieldValue::Finite(rng.gen_range(0..gf.q)),
            Field::Rational => {
                let num: i64 = rng.gen_range(-12..=12);
                let den: i64 = rng.gen_range(1..=7);
                FieldValue::Rational(BigRational::new(num.into(), den.into()))
            }
        }
    }

    /// Text encoding: `c0.c1.….c(ℓ-1)` or `num/den`.
    pub fn format(&self, x: &FieldValue) -> String {
        match (self, x) {
            (Field::Finite(gf), FieldValue::Finite(a)) => gf
                .coords(*a)
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join("."),
            (_, FieldValue::Rational(r)) => format!("{}/{}", r.numer(), r.denom()),
            _ => panic!("mixed-field operands"),
        }
    }

    pub fn parse(&self, s: &str) -> Result<FieldValue> {
        let s = s.trim();
        let bad = || Error::NotInField(s.to_string(), self.to_string());
        match self {
            Field::Finite(gf) => {
                let parts: Vec<&str> = s.split('.').collect();
                if parts.len() != gf.ell as usize {
                    return Err(bad());
                }
                let coords = parts
                    .iter()
                    .map(|t| t.parse::<u32>().ok().filter(|&c| c < gf.p))
                    .collect::<Option<Vec<u32>>>()
                    .ok_or_else(bad)?;
                Ok(FieldValue::Finite(undigits(&coords, gf.p)))
            }
            Field::Rational => {
                let (n, d) = match s.split_once('/') {
                    Some((n, d)) => (n, d),
                    None => (s, "1"),
                };
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(FieldValue::Rational(BigRational::new(n, d)))
            }
        }
    }

    /// `FIELD p ell c0,…,cell` or `FIELD Q`.
    pub fn header(&self) -> String {
        match self {
            Field::Finite(gf) => format!(
                "FIELD {} {} {}",
                gf.p,
                gf.ell,
                gf.modulus
                    .iter()
                    .map(u32::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            Field::Rational => "FIELD Q".to_string(),
        }
    }

    pub fn parse_header(line: &str) -> Result<Field> {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = |m: &str| Error::InvalidField(format!("{m}: `{line}`"));
        match toks.as_slice() {
            ["FIELD", "Q"] => Ok(Field::Rational),
            ["FIELD", p, ell, modulus] => {
                let p: u32 = p.parse().map_err(|_| bad("bad prime"))?;
                let ell: u32 = ell.parse().map_err(|_| bad("bad degree"))?;
                let m = modulus
                    .split(',')
                    .map(|c| c.parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad("bad modulus"))?;
                if m.len() != ell as usize + 1 {
                    return Err(bad("modulus length does not match degree"));
                }
                Field::with_modulus(p, m)
            }
            _ => Err(bad("expected `FIELD p ell c0,...` or `FIELD Q`")),
        }
    }
}

impl FieldValue {
    /// The rational value, if this is one.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldValue::Rational(r) => Some(r),
            FieldValue::Finite(_) => None,
        }
    }

    /// Encoding of a finite-field element.
    pub fn code(&self) -> Option<u32> {
        match self {
            FieldValue::Finite(c) => Some(*c),
            FieldValue::Rational(_) => None,
        }
    }
}
