//! Exact scalar fields.
//!
//! Three families are shipped: the rationals, prime fields `GF(p)` for any
//! 64-bit prime, and a handful of small extension fields `GF(p^k)` with fixed
//! primitive moduli. Extension elements are stored as discrete logarithms with
//! respect to the root of the modulus, so multiplication is an addition of
//! exponents and addition goes through a Zech logarithm table.
//!
//! Elements do not carry their field; every operation goes through the field
//! value, which is cheap to clone.

use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};

/// Large prime used as the stand-in for characteristic zero: `2^31 - 1`.
pub const SURROGATE_PRIME: u64 = 2_147_483_647;

/// Shipped extension moduli, coefficients listed from the constant term up.
/// Each one is primitive, which the table construction re-checks.
const MODULI: &[(u64, u32, &[u32], &str)] = &[
    (2, 8, &[1, 0, 1, 1, 1, 0, 0, 0, 1], "x^8 + x^4 + x^3 + x^2 + 1"),
    (
        2,
        16,
        &[1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 1],
        "x^16 + x^12 + x^3 + x + 1",
    ),
    (3, 5, &[1, 2, 0, 0, 0, 1], "x^5 + 2x + 1"),
    (3, 10, &[2, 1, 0, 1, 0, 0, 0, 0, 0, 0, 1], "x^10 + x^3 + x + 2"),
];

/// Description of a field: characteristic 0 means the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub characteristic: u64,
    pub extension_degree: u32,
}

impl FieldSpec {
    pub fn rationals() -> Self {
        FieldSpec { characteristic: 0, extension_degree: 1 }
    }

    pub fn surrogate() -> Self {
        FieldSpec { characteristic: SURROGATE_PRIME, extension_degree: 1 }
    }

    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return usage(format!("{p} is not prime"));
        }
        Ok(FieldSpec { characteristic: p, extension_degree: 1 })
    }

    pub fn extension(p: u64, k: u32) -> Result<Self> {
        if k == 1 {
            return Self::prime(p);
        }
        if MODULI.iter().any(|&(mp, mk, _, _)| mp == p && mk == k) {
            Ok(FieldSpec { characteristic: p, extension_degree: k })
        } else {
            usage(format!("no shipped modulus for GF({p}^{k})"))
        }
    }

    /// The defaults used by the verification runs: `GF(2^16)` for 2,
    /// `GF(3^10)` for 3, the surrogate prime for 0.
    pub fn sampling_default(characteristic: u64) -> Result<Self> {
        match characteristic {
            0 => Ok(Self::surrogate()),
            2 => Self::extension(2, 16),
            3 => Self::extension(3, 10),
            p => Self::prime(p),
        }
    }

    pub fn is_rationals(&self) -> bool {
        self.characteristic == 0
    }

    /// Number of elements, `None` for the rationals.
    pub fn order(&self) -> Option<u128> {
        if self.characteristic == 0 {
            None
        } else {
            Some((self.characteristic as u128).pow(self.extension_degree))
        }
    }

    pub fn modulus_id(&self) -> Option<&'static str> {
        MODULI
            .iter()
            .find(|&&(p, k, _, _)| p == self.characteristic && k == self.extension_degree)
            .map(|&(_, _, _, id)| id)
    }

    /// The characteristic used to pick generators and parameters: the surrogate
    /// prime counts as characteristic zero.
    pub fn effective_characteristic(&self) -> u64 {
        if self.characteristic == SURROGATE_PRIME {
            0
        } else {
            self.characteristic
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.characteristic, self.extension_degree) {
            (0, _) => write!(f, "Q"),
            (p, 1) => write!(f, "GF({p})"),
            (p, k) => write!(f, "GF({p}^{k}) mod {}", self.modulus_id().unwrap_or("?")),
        }
    }
}

/// Commutative ring operations shared by scalars and polynomials.
pub trait Ring: Clone + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + Hash + fmt::Debug + Send + Sync + 'static;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

/// Exact field arithmetic on top of [`Ring`].
pub trait Field: Ring {
    fn spec(&self) -> FieldSpec;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Uniform element (for the rationals: a bounded random integer).
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;
    /// Short human-readable form; integers print in the symmetric range.
    fn format(&self, a: &Self::Elem) -> String;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem {
        loop {
            let x = self.random(rng);
            if !self.is_zero(&x) {
                return x;
            }
        }
    }

    /// Rank of a row-major matrix.
    fn rank(&self, rows: Vec<Vec<Self::Elem>>) -> usize {
        crate::linalg::gauss_rank(self, rows)
    }

    fn characteristic(&self) -> u64 {
        self.spec().characteristic
    }
}

/// Alias used in signatures where the spec talks about scalars.
pub type Scalar<F> = <F as Ring>::Elem;

// ---------------------------------------------------------------------------
// Rationals

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Rationals;

const RATIONAL_SAMPLE_BOUND: i64 = 1 << 16;

impl Ring for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

impl Field for Rationals {
    fn spec(&self) -> FieldSpec {
        FieldSpec::rationals()
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        self.from_i64(rng.gen_range(-RATIONAL_SAMPLE_BOUND..=RATIONAL_SAMPLE_BOUND))
    }
    fn rank(&self, rows: Vec<Vec<BigRational>>) -> usize {
        crate::linalg::bareiss_rank(rows)
    }
    fn format(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else if a.is_negative() {
            format!("-{}/{}", a.numer().abs(), a.denom())
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
}

// ---------------------------------------------------------------------------
// Prime fields

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return usage(format!("{p} is not prime"));
        }
        Ok(PrimeField { p })
    }

    pub fn surrogate() -> Self {
        PrimeField { p: SURROGATE_PRIME }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }
}

impl Ring for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.p as i128) as u64
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = *a as u128 + *b as u128;
        (s % self.p as u128) as u64
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

impl Field for PrimeField {
    fn spec(&self) -> FieldSpec {
        FieldSpec { characteristic: self.p, extension_degree: 1 }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            None
        } else {
            Some(self.pow(a, self.p - 2))
        }
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
    fn format(&self, a: &u64) -> String {
        if *a > self.p / 2 {
            format!("-{}", self.p - a)
        } else {
            a.to_string()
        }
    }
}

// ---------------------------------------------------------------------------
// Extension fields via Zech logarithms

#[derive(Debug)]
struct ExtTables {
    p: u64,
    k: u32,
    /// `q - 1`, the order of the multiplicative group; also the log of zero.
    group_order: u32,
    /// exp[i] = digits of g^i packed base p.
    exp: Vec<u32>,
    /// log[packed] for nonzero packed values.
    log: Vec<u32>,
    /// zech[n] = log(1 + g^n), or `group_order` when that sum is zero.
    zech: Vec<u32>,
    neg_one: u32,
}

/// `GF(p^k)` with one of the shipped moduli.
#[derive(Clone, Debug)]
pub struct ExtField {
    tables: Arc<ExtTables>,
}

impl PartialEq for ExtField {
    fn eq(&self, other: &Self) -> bool {
        self.tables.p == other.tables.p && self.tables.k == other.tables.k
    }
}

impl ExtField {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        let &(_, _, modulus, _) = MODULI
            .iter()
            .find(|&&(mp, mk, _, _)| mp == p && mk == k)
            .ok_or_else(|| Error::Usage(format!("no shipped modulus for GF({p}^{k})")))?;
        Ok(ExtField { tables: Arc::new(build_tables(p as u32, k, modulus)?) })
    }

    /// Packed base-p digits of an element (constant term in the lowest digit).
    pub fn to_packed(&self, a: &u32) -> u32 {
        if *a == self.tables.group_order {
            0
        } else {
            self.tables.exp[*a as usize]
        }
    }

    pub fn from_packed(&self, v: u32) -> u32 {
        if v == 0 {
            self.tables.group_order
        } else {
            self.tables.log[v as usize]
        }
    }

    /// The root of the modulus (the generator `z`).
    pub fn generator(&self) -> u32 {
        1 % self.tables.group_order
    }
}

fn build_tables(p: u32, k: u32, modulus: &[u32]) -> Result<ExtTables> {
    let q = (p as u64).pow(k);
    if q > (1 << 24) {
        return usage("extension field too large for log tables");
    }
    let q = q as u32;
    let group_order = q - 1;
    let pack = |digits: &[u32]| digits.iter().rev().fold(0u32, |acc, &d| acc * p + d);
    let mut exp = Vec::with_capacity(group_order as usize);
    let mut log = vec![u32::MAX; q as usize];
    let mut cur = vec![0u32; k as usize];
    cur[0] = 1;
    for i in 0..group_order {
        let packed = pack(&cur);
        if log[packed as usize] != u32::MAX {
            return Err(Error::Internal(format!("modulus for GF({p}^{k}) is not primitive")));
        }
        log[packed as usize] = i;
        exp.push(packed);
        // multiply by z, then reduce z^k = -(m_0 + ... + m_{k-1} z^{k-1})
        let top = cur[k as usize - 1];
        for j in (1..k as usize).rev() {
            cur[j] = cur[j - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for (j, c) in cur.iter_mut().enumerate() {
                *c = (*c + (p - (top * modulus[j]) % p)) % p;
            }
        }
    }
    let mut zech = Vec::with_capacity(group_order as usize);
    for n in 0..group_order {
        let v = exp[n as usize];
        let low = v % p;
        let bumped = v - low + (low + 1) % p;
        zech.push(if bumped == 0 { group_order } else { log[bumped as usize] });
    }
    let neg_one = if p == 2 { 0 } else { group_order / 2 };
    Ok(ExtTables { p: p as u64, k, group_order, exp, log, zech, neg_one })
}

impl Ring for ExtField {
    type Elem = u32;

    fn zero(&self) -> u32 {
        self.tables.group_order
    }
    fn one(&self) -> u32 {
        0
    }
    fn from_i64(&self, v: i64) -> u32 {
        let c = v.rem_euclid(self.tables.p as i64) as u32;
        self.from_packed(c)
    }
    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let t = &*self.tables;
        let z = t.group_order;
        if *a == z {
            return *b;
        }
        if *b == z {
            return *a;
        }
        let n = if b >= a { b - a } else { b + z - a };
        let s = t.zech[n as usize];
        if s == z {
            z
        } else {
            let r = a + s;
            if r >= z {
                r - z
            } else {
                r
            }
        }
    }
    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        let t = &*self.tables;
        if *a == t.group_order {
            *a
        } else {
            (a + t.neg_one) % t.group_order
        }
    }
    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        let z = self.tables.group_order;
        if *a == z || *b == z {
            return z;
        }
        let r = a + b;
        if r >= z {
            r - z
        } else {
            r
        }
    }
    #[inline]
    fn is_zero(&self, a: &u32) -> bool {
        *a == self.tables.group_order
    }
}

impl Field for ExtField {
    fn spec(&self) -> FieldSpec {
        FieldSpec { characteristic: self.tables.p, extension_degree: self.tables.k }
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        let z = self.tables.group_order;
        if *a == z {
            None
        } else {
            Some((z - a) % z)
        }
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..=self.tables.group_order)
    }
    fn format(&self, a: &u32) -> String {
        let p = self.tables.p as u32;
        let mut v = self.to_packed(a);
        if v < p {
            return PrimeField { p: p as u64 }.format(&(v as u64));
        }
        let mut digits = Vec::new();
        while v > 0 {
            digits.push(v % p);
            v /= p;
        }
        let mut parts = Vec::new();
        for (i, &c) in digits.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coeff = if c == 1 && i > 0 { String::new() } else { c.to_string() };
            parts.push(match i {
                0 => coeff,
                1 => format!("{coeff}z"),
                _ => format!("{coeff}z^{i}"),
            });
        }
        format!("({})", parts.join("+"))
    }
}

// ---------------------------------------------------------------------------

/// Runtime choice among the concrete field types.
#[derive(Clone, Debug)]
pub enum AnyField {
    Rational(Rationals),
    Prime(PrimeField),
    Ext(ExtField),
}

impl AnyField {
    pub fn from_spec(spec: FieldSpec) -> Result<Self> {
        match (spec.characteristic, spec.extension_degree) {
            (0, _) => Ok(AnyField::Rational(Rationals)),
            (p, 1) => Ok(AnyField::Prime(PrimeField::new(p)?)),
            (p, k) => Ok(AnyField::Ext(ExtField::new(p, k)?)),
        }
    }
}

/// Runs `$body` with `$f` bound to the concrete field described by `$spec`.
#[macro_export]
macro_rules! with_field {
    ($spec:expr, |$f:ident| $body:expr) => {
        match $crate::field::AnyField::from_spec($spec)? {
            $crate::field::AnyField::Rational($f) => $body,
            $crate::field::AnyField::Prime($f) => $body,
            $crate::field::AnyField::Ext($f) => $body,
        }
    };
}

/// Deterministic Miller-Rabin, valid for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
