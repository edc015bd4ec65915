//! Exact arithmetic in F_p and in explicit extensions F_{p^k} = F_p[μ]/(m(μ)).
//!
//! An element is stored as its coordinate vector (c_0, …, c_{k-1}) in the
//! basis 1, μ, …, μ^{k-1}, packed into a single integer code
//! `c_0 + c_1 p + … + c_{k-1} p^{k-1}`.  The code is canonical, so equality
//! of elements is equality of codes, and the natural order on codes is the
//! enumeration order used throughout the crate (for F_4: 0, 1, μ, 1+μ).
//!
//! Elements are plain `Copy` values ([`Fe`]); the arithmetic lives on the
//! [`Field`] handle, which owns the modulus and, for fields of moderate
//! size, exponential/logarithm/Zech tables that make every operation a few
//! table lookups.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on `p^k` for operations that enumerate the field.
pub const DEFAULT_ENUM_BOUND: u64 = 1_000_000;

/// Fields up to this order get log/exp/Zech tables.
const TABLE_LIMIT: u64 = 1 << 22;

/// Hard cap on the field order (codes must fit in a `u32`).
const MAX_ORDER: u64 = 1 << 31;

const NONE: u32 = u32::MAX;

/// Description of a finite field: a prime `p`, a degree `k`, and (for
/// `k > 1`) a monic irreducible modulus given low-degree-first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u32,
    k: u32,
    modulus: Vec<u32>,
}

impl FieldSpec {
    /// Validates and builds a spec.  For `k = 1` the modulus may be empty.
    pub fn new(p: u32, k: u32, modulus: Vec<u32>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NonPrime(p as u64));
        }
        if k == 0 {
            return Err(Error::MalformedSpec("extension degree must be at least 1".into()));
        }
        let q = (p as u64).checked_pow(k).filter(|&q| q <= MAX_ORDER);
        let Some(q) = q else {
            return Err(Error::FieldTooLarge {
                size: u64::MAX,
                bound: MAX_ORDER,
            });
        };
        let _ = q;
        if k == 1 && modulus.is_empty() {
            return Ok(FieldSpec {
                p,
                k,
                modulus: Vec::new(),
            });
        }
        if modulus.len() != k as usize + 1 {
            return Err(Error::NonMonicModulus);
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::MalformedSpec(format!(
                "modulus coefficients must lie in [0, {p})"
            )));
        }
        if modulus[k as usize] != 1 {
            return Err(Error::NonMonicModulus);
        }
        if !fp_is_irreducible(p, &modulus) {
            return Err(Error::ReducibleModulus);
        }
        Ok(FieldSpec { p, k, modulus })
    }

    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, Vec::new())
    }

    /// F_{p^k} with the first monic irreducible modulus (in enumeration
    /// order of its lower coefficients) for which μ generates the
    /// multiplicative group.
    pub fn with_default_modulus(p: u32, k: u32) -> Result<Self> {
        if k == 1 {
            return Self::prime(p);
        }
        if !is_prime(p as u64) {
            return Err(Error::NonPrime(p as u64));
        }
        let q = (p as u64).checked_pow(k).unwrap_or(u64::MAX);
        if q > MAX_ORDER {
            return Err(Error::FieldTooLarge {
                size: q,
                bound: MAX_ORDER,
            });
        }
        let count = (p as u64).pow(k);
        let factors = prime_factors(q - 1);
        for code in 0..count {
            let mut m = digits(code, p, k as usize);
            m.push(1);
            if m[0] == 0 || !fp_is_irreducible(p, &m) {
                continue;
            }
            let spec = FieldSpec {
                p,
                k,
                modulus: m,
            };
            let slow = Arith::new(&spec);
            let mu = p;
            if factors
                .iter()
                .all(|&r| slow.pow(mu, (q - 1) / r) != 1)
            {
                return Ok(spec);
            }
        }
        Err(Error::internal("no primitive modulus found"))
    }

    /// Parses `p`, `p^k/m0,m1,...,mk` (low-degree-first modulus) or `p^k`
    /// (default modulus).
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::MalformedSpec(text.to_string());
        let (head, tail) = match text.split_once('/') {
            Some((h, t)) => (h, Some(t)),
            None => (text, None),
        };
        let (p, k) = match head.split_once('^') {
            Some((p, k)) => (
                p.trim().parse::<u32>().map_err(|_| bad())?,
                k.trim().parse::<u32>().map_err(|_| bad())?,
            ),
            None => (head.trim().parse::<u32>().map_err(|_| bad())?, 1),
        };
        match tail {
            None if k == 1 => Self::prime(p),
            None => Self::with_default_modulus(p, k),
            Some(t) => {
                let modulus = t
                    .split(',')
                    .map(|s| s.trim().parse::<u32>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                Self::new(p, k, modulus)
            }
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Modulus coefficients, low-degree-first (empty for a prime field).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Number of elements `p^k`.
    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.k)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "{}", self.p)
        } else {
            let m: Vec<String> = self.modulus.iter().map(|c| c.to_string()).collect();
            write!(f, "{}^{}/{}", self.p, self.k, m.join(","))
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// A field element, stored as its packed coordinate code.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fe(pub(crate) u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    /// The packed coordinate code (position in enumeration order).
    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Slow-path arithmetic straight from the modulus; used to build tables and
/// for fields too large to tabulate.
#[derive(Debug)]
struct Arith {
    p: u32,
    k: usize,
    modulus: Vec<u32>,
    pw: Vec<u64>,
}

impl Arith {
    fn new(spec: &FieldSpec) -> Self {
        let k = spec.k as usize;
        let mut pw = Vec::with_capacity(k + 1);
        let mut acc = 1u64;
        for _ in 0..=k {
            pw.push(acc);
            acc *= spec.p as u64;
        }
        let modulus = if k == 1 && spec.modulus.is_empty() {
            vec![0, 1]
        } else {
            spec.modulus.clone()
        };
        Arith {
            p: spec.p,
            k,
            modulus,
            pw,
        }
    }

    fn decode(&self, x: u32) -> Vec<u32> {
        digits(x as u64, self.p, self.k)
    }

    fn encode(&self, d: &[u32]) -> u32 {
        let mut c = 0u64;
        for (i, &v) in d.iter().enumerate().take(self.k) {
            c += v as u64 * self.pw[i];
        }
        c as u32
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let p = self.p;
        let mut out = 0u64;
        for i in 0..self.k {
            let s = (a % p + b % p) % p;
            out += s as u64 * self.pw[i];
            a /= p;
            b /= p;
        }
        out as u32
    }

    fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let p = self.p;
        let mut a = a;
        let mut out = 0u64;
        for i in 0..self.k {
            let s = (p - a % p) % p;
            out += s as u64 * self.pw[i];
            a /= p;
        }
        out as u32
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let p = self.p as u64;
        let k = self.k;
        let da = self.decode(a);
        let db = self.decode(b);
        let mut r = vec![0u64; 2 * k - 1];
        for i in 0..k {
            if da[i] == 0 {
                continue;
            }
            for j in 0..k {
                r[i + j] = (r[i + j] + da[i] as u64 * db[j] as u64) % p;
            }
        }
        for i in (k..2 * k - 1).rev() {
            let c = r[i] % p;
            if c == 0 {
                continue;
            }
            r[i] = 0;
            for j in 0..k {
                let sub = c * self.modulus[j] as u64 % p;
                r[i - k + j] = (r[i - k + j] + p - sub) % p;
            }
        }
        let d: Vec<u32> = r[..k].iter().map(|&v| v as u32).collect();
        self.encode(&d)
    }

    fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

#[derive(Debug)]
struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
    generator: u32,
}

#[derive(Debug)]
struct Inner {
    spec: FieldSpec,
    q: u64,
    arith: Arith,
    tables: Option<Tables>,
    mu_primitive: bool,
}

/// A handle on a concrete finite field; cheap to clone and safe to share
/// between threads.
#[derive(Clone, Debug)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Field {}

impl Field {
    /// Builds the field (and its tables when small enough).
    pub fn new(spec: FieldSpec) -> Result<Self> {
        let q = spec.order();
        let arith = Arith::new(&spec);
        let mut mu_primitive = false;
        let tables = if q <= TABLE_LIMIT {
            let t = build_tables(&spec, &arith, q);
            mu_primitive = spec.k > 1 && t.generator == spec.p;
            Some(t)
        } else {
            None
        };
        if tables.is_none() && spec.k > 1 {
            let factors = prime_factors(q - 1);
            mu_primitive = factors
                .iter()
                .all(|&r| arith.pow(spec.p, (q - 1) / r) != 1);
        }
        Ok(Field(Arc::new(Inner {
            spec,
            q,
            arith,
            tables,
            mu_primitive,
        })))
    }

    /// Parses a field spec string and builds the field.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(FieldSpec::parse(text)?)
    }

    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(FieldSpec::prime(p)?)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    pub fn p(&self) -> u32 {
        self.0.spec.p
    }

    pub fn k(&self) -> u32 {
        self.0.spec.k
    }

    /// Number of elements.
    pub fn order(&self) -> u64 {
        self.0.q
    }

    pub fn zero(&self) -> Fe {
        Fe::ZERO
    }

    pub fn one(&self) -> Fe {
        Fe::ONE
    }

    /// The class of μ, or `None` for a prime field.
    pub fn mu(&self) -> Option<Fe> {
        (self.k() > 1).then_some(Fe(self.p()))
    }

    /// True when μ generates the multiplicative group.
    pub fn mu_is_primitive(&self) -> bool {
        self.0.mu_primitive
    }

    /// Image of an integer in the prime field.
    pub fn from_i64(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p() as i64) as u32)
    }

    /// Element with the given coordinates (each reduced mod p); at most `k`
    /// coordinates.
    pub fn from_coords(&self, coords: &[i64]) -> Result<Fe> {
        if coords.len() > self.k() as usize {
            return Err(Error::MalformedInput(format!(
                "{} coordinates for a degree-{} field",
                coords.len(),
                self.k()
            )));
        }
        let p = self.p() as i64;
        let d: Vec<u32> = coords.iter().map(|&c| c.rem_euclid(p) as u32).collect();
        Ok(Fe(self.0.arith.encode(&d)))
    }

    /// Element from a raw code; fails if the code is out of range.
    pub fn from_code(&self, code: u32) -> Result<Fe> {
        if (code as u64) < self.0.q {
            Ok(Fe(code))
        } else {
            Err(Error::SpecMismatch)
        }
    }

    /// Coordinate vector (length `k`).
    pub fn coords(&self, x: Fe) -> Vec<u32> {
        self.0.arith.decode(x.0)
    }

    /// The residue in `[0, p)` if `x` lies in the prime field.
    pub fn to_prime(&self, x: Fe) -> Option<u32> {
        (x.0 < self.p()).then_some(x.0)
    }

    /// Signed representative in `(-p/2, p/2]` if `x` lies in the prime field.
    pub fn to_signed(&self, x: Fe) -> Option<i64> {
        self.to_prime(x).map(|r| {
            let p = self.p() as i64;
            let r = r as i64;
            if r > p / 2 {
                r - p
            } else {
                r
            }
        })
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p() == 2 {
            return Fe(a.0 ^ b.0);
        }
        match &self.0.tables {
            Some(t) => {
                if a.0 == 0 {
                    return b;
                }
                if b.0 == 0 {
                    return a;
                }
                let m = (self.0.q - 1) as u32;
                let la = t.log[a.0 as usize];
                let lb = t.log[b.0 as usize];
                let d = if lb >= la { lb - la } else { lb + m - la };
                let z = t.zech[d as usize];
                if z == NONE {
                    Fe(0)
                } else {
                    let s = la as u64 + z as u64;
                    Fe(t.exp[(s % m as u64) as usize])
                }
            }
            None => Fe(self.0.arith.add(a.0, b.0)),
        }
    }

    pub fn neg(&self, a: Fe) -> Fe {
        if self.p() == 2 || a.0 == 0 {
            return a;
        }
        match &self.0.tables {
            Some(t) => {
                let m = self.0.q - 1;
                let l = t.log[a.0 as usize] as u64 + m / 2;
                Fe(t.exp[(l % m) as usize])
            }
            None => Fe(self.0.arith.neg(a.0)),
        }
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe(0);
        }
        match &self.0.tables {
            Some(t) => {
                let m = (self.0.q - 1) as u32;
                let s = t.log[a.0 as usize] + t.log[b.0 as usize];
                Fe(t.exp[(if s >= m { s - m } else { s }) as usize])
            }
            None => Fe(self.0.arith.mul(a.0, b.0)),
        }
    }

    /// Multiplicative inverse.
    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::DivideByZero);
        }
        Ok(match &self.0.tables {
            Some(t) => {
                let m = (self.0.q - 1) as u32;
                let l = t.log[a.0 as usize];
                Fe(t.exp[((m - l) % m) as usize])
            }
            None => Fe(self.0.arith.pow(a.0, self.0.q - 2)),
        })
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` for any integer exponent (negative exponents need `a != 0`).
    pub fn pow(&self, a: Fe, e: i64) -> Result<Fe> {
        if a.0 == 0 {
            return match e.cmp(&0) {
                std::cmp::Ordering::Greater => Ok(Fe(0)),
                std::cmp::Ordering::Equal => Ok(Fe(1)),
                std::cmp::Ordering::Less => Err(Error::DivideByZero),
            };
        }
        let m = (self.0.q - 1) as i128;
        let e = (e as i128).rem_euclid(m) as u64;
        Ok(self.pow_u(a, e))
    }

    /// `a^e` for a non-negative exponent (`0^0 = 1`).
    pub fn pow_u(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return Fe(1);
        }
        if a.0 == 0 {
            return Fe(0);
        }
        match &self.0.tables {
            Some(t) => {
                let m = self.0.q - 1;
                let l = (t.log[a.0 as usize] as u128 * (e % m) as u128) % m as u128;
                Fe(t.exp[l as usize])
            }
            None => Fe(self.0.arith.pow(a.0, e % (self.0.q - 1))),
        }
    }

    /// `x^{p^iterate}`.
    pub fn frob(&self, x: Fe, iterate: u32) -> Fe {
        let it = iterate % self.k();
        if it == 0 || x.0 < self.p() {
            return x;
        }
        let e = (self.p() as u64).pow(it);
        self.pow_u(x, e)
    }

    /// Inverse Frobenius `x^{1/p}`.
    pub fn inv_frob(&self, x: Fe) -> Fe {
        self.frob(x, self.k() - 1)
    }

    /// `x^{p^{-iterate}}`.
    pub fn inv_frob_iter(&self, x: Fe, iterate: u32) -> Fe {
        let k = self.k();
        self.frob(x, (k - iterate % k) % k)
    }

    /// Iterator over all elements in enumeration order (no size check).
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.0.q as u32).map(Fe)
    }

    /// All elements in enumeration order, refusing fields above the default
    /// bound.
    pub fn enumerate(&self) -> Result<Vec<Fe>> {
        self.enumerate_bounded(DEFAULT_ENUM_BOUND)
    }

    /// All elements in enumeration order, refusing fields above `bound`.
    pub fn enumerate_bounded(&self, bound: u64) -> Result<Vec<Fe>> {
        self.check_enumerable(bound)?;
        Ok(self.elements().collect())
    }

    pub(crate) fn check_enumerable(&self, bound: u64) -> Result<()> {
        if self.0.q > bound {
            Err(Error::FieldTooLarge {
                size: self.0.q,
                bound,
            })
        } else {
            Ok(())
        }
    }

    /// Some `y` with `y^n = x`, the first one in enumeration order, or `None`.
    pub fn nth_root(&self, x: Fe, n: u64) -> Option<Fe> {
        if x.0 == 0 {
            return Some(x);
        }
        if n == 0 {
            return (x.0 == 1).then_some(Fe(0));
        }
        match &self.0.tables {
            Some(t) => {
                let m = self.0.q - 1;
                let l = t.log[x.0 as usize] as u64;
                let g = gcd_u64(n % m, m);
                let g = if g == 0 { m } else { g };
                if l % g != 0 {
                    return None;
                }
                // Solve n·s ≡ l (mod m): s0 = (l/g)·(n/g)^{-1} mod (m/g).
                let mg = m / g;
                let s0 = if mg == 1 {
                    0
                } else {
                    ((l / g) as u128 * modinv((n / g) % mg, mg) as u128 % mg as u128) as u64
                };
                (0..g)
                    .map(|j| Fe(t.exp[(s0 + j * mg) as usize]))
                    .min()
            }
            None => self.elements().find(|&y| self.pow_u(y, n) == x),
        }
    }

    /// Uniformly random element.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..self.0.q) as u32)
    }

    /// Uniformly random nonzero element.
    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(1..self.0.q) as u32)
    }

    /// Elements of the subfield F_{p^m} (requires `m | k`), in enumeration
    /// order.
    pub fn subfield_elements(&self, m: u32) -> Result<Vec<Fe>> {
        if m == 0 || self.k() % m != 0 {
            return Err(Error::MalformedInput(format!(
                "F_{{p^{m}}} is not a subfield of a degree-{} field",
                self.k()
            )));
        }
        self.check_enumerable(DEFAULT_ENUM_BOUND)?;
        Ok(self.elements().filter(|&x| self.frob(x, m) == x).collect())
    }

    /// True if `x` lies in the subfield F_{p^m}.
    pub fn in_subfield(&self, x: Fe, m: u32) -> bool {
        self.frob(x, m) == x
    }

    /// Multiplicative order of a nonzero element.
    pub fn order_of(&self, x: Fe) -> Result<u64> {
        if x.0 == 0 {
            return Err(Error::DivideByZero);
        }
        let mut ord = self.0.q - 1;
        for r in prime_factors(ord) {
            while ord % r == 0 && self.pow_u(x, ord / r) == Fe(1) {
                ord /= r;
            }
        }
        Ok(ord)
    }

    /// Exponent `e` with `μ^e = x` when μ is primitive and `x != 0`.
    pub fn mu_log(&self, x: Fe) -> Option<u64> {
        if !self.0.mu_primitive || x.0 == 0 {
            return None;
        }
        match &self.0.tables {
            Some(t) => Some(t.log[x.0 as usize] as u64),
            None => None,
        }
    }

    /// Renders `x` as a polynomial in μ, e.g. `2+μ^2` (or an integer in a
    /// prime field).
    pub fn fmt_elem(&self, x: Fe) -> String {
        let c = self.coords(x);
        let mut terms = Vec::new();
        for (i, &ci) in c.iter().enumerate() {
            if ci == 0 {
                continue;
            }
            let coef = if ci == 1 && i > 0 {
                String::new()
            } else {
                ci.to_string()
            };
            let var = match i {
                0 => String::new(),
                1 => "μ".to_string(),
                _ => format!("μ^{i}"),
            };
            terms.push(format!("{coef}{var}"));
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }

    /// Renders `x` as `0` or `μ^e` when μ is primitive, else as
    /// [`Field::fmt_elem`].
    pub fn fmt_power(&self, x: Fe) -> String {
        if x.0 == 0 {
            return "0".into();
        }
        match self.mu_log(x) {
            Some(0) => "1".into(),
            Some(1) => "μ".into(),
            Some(e) => format!("μ^{e}"),
            None => self.fmt_elem(x),
        }
    }

    /// Parses an element written as a sum of terms `c`, `cμ`, `cμ^e`,
    /// `μ^e` (μ may also be spelled `mu`, `u` or `m`; coefficients are
    /// integers, possibly signed; exponents are non-negative integers).
    /// A bracketed list `[c0,c1,…]` is read as coordinates.
    pub fn parse_elem(&self, text: &str) -> Result<Fe> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::MalformedInput(format!("cannot parse field element `{text}`"));
        if s.is_empty() {
            return Err(bad());
        }
        if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            if inner.is_empty() {
                return Ok(Fe(0));
            }
            let c = inner
                .split(',')
                .map(|t| t.parse::<i64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            return self.from_coords(&c);
        }
        let s = s.replace("mu", "μ").replace(['u', 'm'], "μ");
        let mut acc = Fe(0);
        let chars: Vec<char> = s.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let mut sign = 1i64;
            while i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                if chars[i] == '-' {
                    sign = -sign;
                }
                i += 1;
            }
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let coef: i64 = if i > start {
                chars[start..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| bad())?
            } else {
                1
            };
            if i < chars.len() && chars[i] == '*' {
                i += 1;
            }
            let mut term = self.from_i64(sign * coef);
            if i < chars.len() && chars[i] == 'μ' {
                if i == start && coef != 1 {
                    return Err(bad());
                }
                i += 1;
                let mut e = 1u64;
                if i < chars.len() && chars[i] == '^' {
                    i += 1;
                    let es = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    if es == i {
                        return Err(bad());
                    }
                    e = chars[es..i]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| bad())?;
                }
                let mu = self.mu().unwrap_or(Fe(0));
                if self.k() == 1 {
                    return Err(bad());
                }
                term = self.mul(term, self.pow_u(mu, e));
            } else if i == start {
                return Err(bad());
            }
            acc = self.add(acc, term);
            if i < chars.len() && chars[i] != '+' && chars[i] != '-' {
                return Err(bad());
            }
        }
        Ok(acc)
    }

    /// Embedding of `self` into a field `target` of the same characteristic
    /// whose degree is a multiple of `self.k()`: μ is sent to the first root
    /// (in enumeration order) of the modulus inside `target`.
    pub fn embedding_into(&self, target: &Field) -> Result<Embedding> {
        if target.p() != self.p() || target.k() % self.k() != 0 {
            return Err(Error::FieldTooSmall(format!(
                "{} does not contain {}",
                target.spec(),
                self.spec()
            )));
        }
        let image_of_mu = if self.k() == 1 {
            Fe(0)
        } else {
            target.check_enumerable(DEFAULT_ENUM_BOUND)?;
            let m: Vec<Fe> = self
                .spec()
                .modulus()
                .iter()
                .map(|&c| target.from_i64(c as i64))
                .collect();
            target
                .elements()
                .find(|&r| {
                    let mut acc = Fe(0);
                    for &c in m.iter().rev() {
                        acc = target.add(target.mul(acc, r), c);
                    }
                    acc.is_zero()
                })
                .ok_or_else(|| Error::internal("modulus has no root in an extension"))?
        };
        Ok(Embedding {
            src: self.clone(),
            dst: target.clone(),
            image_of_mu,
        })
    }
}

/// A field embedding F_{p^k} → F_{p^{k'}} determined by the image of μ.
#[derive(Clone, Debug)]
pub struct Embedding {
    src: Field,
    dst: Field,
    image_of_mu: Fe,
}

impl Embedding {
    pub fn source(&self) -> &Field {
        &self.src
    }

    pub fn target(&self) -> &Field {
        &self.dst
    }

    /// Image of an element of the source field.
    pub fn map(&self, x: Fe) -> Fe {
        let c = self.src.coords(x);
        let mut acc = Fe(0);
        for &ci in c.iter().rev() {
            acc = self.dst.add(
                self.dst.mul(acc, self.image_of_mu),
                self.dst.from_i64(ci as i64),
            );
        }
        acc
    }
}

fn build_tables(spec: &FieldSpec, arith: &Arith, q: u64) -> Tables {
    let m = q - 1;
    let factors = prime_factors(m);
    let is_gen = |g: u32| factors.iter().all(|&r| arith.pow(g, m / r) != 1);
    let mut candidates: Vec<u32> = Vec::new();
    if spec.k > 1 {
        candidates.push(spec.p);
    }
    let generator = candidates
        .into_iter()
        .chain(1..q as u32)
        .find(|&g| g != 0 && is_gen(g))
        .expect("finite field has a primitive element");
    let mut exp = vec![0u32; m as usize];
    let mut log = vec![NONE; q as usize];
    let mut cur = 1u32;
    let mul_by_g: Box<dyn Fn(u32) -> u32> = if spec.k > 1 && generator == spec.p {
        // Multiplication by μ is a shift followed by one reduction step.
        let p = spec.p as u64;
        let k = spec.k as usize;
        let top = arith.pw[k - 1];
        let modulus = arith.modulus.clone();
        let pw = arith.pw.clone();
        Box::new(move |x: u32| {
            let x = x as u64;
            let lead = x / top;
            let mut shifted = (x % top) * p;
            if lead != 0 {
                for j in 0..k {
                    let cur = (shifted / pw[j]) % p;
                    let sub = lead * modulus[j] as u64 % p;
                    let new = (cur + p - sub) % p;
                    shifted = shifted - cur * pw[j] + new * pw[j];
                }
            }
            shifted as u32
        })
    } else {
        Box::new(move |x: u32| arith.mul(x, generator))
    };
    for (i, slot) in exp.iter_mut().enumerate() {
        *slot = cur;
        log[cur as usize] = i as u32;
        cur = mul_by_g(cur);
    }
    debug_assert_eq!(cur, 1);
    let mut zech = vec![NONE; m as usize];
    for (d, z) in zech.iter_mut().enumerate() {
        let v = arith.add(1, exp[d]);
        if v != 0 {
            *z = log[v as usize];
        }
    }
    Tables {
        exp,
        log,
        zech,
        generator,
    }
}

fn digits(mut x: u64, p: u32, k: usize) -> Vec<u32> {
    let mut d = Vec::with_capacity(k);
    for _ in 0..k {
        d.push((x % p as u64) as u32);
        x /= p as u64;
    }
    d
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

fn modinv(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    old_s.rem_euclid(m as i128) as u64
}

/// Remainder of `a` modulo monic `b`, both F_p polynomials low-first.
fn fp_rem(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let db = b.len() - 1;
    let p = p as u64;
    while r.len() > db {
        let c = r[r.len() - 1] % p;
        let shift = r.len() - 1 - db;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[shift + j] = (r[shift + j] + p * p - c * bj as u64) % p;
            }
        }
        r.pop();
    }
    r.iter().map(|&c| (c % p) as u32).collect()
}

/// Irreducibility of a monic F_p polynomial by trial division against every
/// monic polynomial of degree at most half its degree.
fn fp_is_irreducible(p: u32, m: &[u32]) -> bool {
    let k = m.len() - 1;
    if k <= 1 {
        return k == 1;
    }
    for d in 1..=k / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut f = digits(code, p, d);
            f.push(1);
            if fp_rem(p, m, &f).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let f = Field::prime(3).unwrap();
        assert_eq!(f.add(Fe(2), Fe(2)), Fe(1));
        assert_eq!(f.neg(Fe(1)), Fe(2));
        assert_eq!(f.inv(Fe(2)).unwrap(), Fe(2));
    }

    #[test]
    fn f4_multiplication_reduces() {
        let f = Field::parse("2^2/1,1,1").unwrap();
        let mu = f.mu().unwrap();
        assert_eq!(f.mul(mu, mu), f.add(mu, Fe(1)));
    }

    #[test]
    fn irreducibility_by_trial_division() {
        assert!(fp_is_irreducible(3, &[1, 2, 0, 1]));
        assert!(!fp_is_irreducible(2, &[1, 0, 1]));
        assert!(fp_is_irreducible(2, &[1, 1, 1]));
    }

    #[test]
    fn slow_and_table_paths_agree() {
        let spec = FieldSpec::parse("3^3/1,2,0,1").unwrap();
        let f = Field::new(spec.clone()).unwrap();
        let a = Arith::new(&spec);
        for x in 0..27u32 {
            for y in 0..27u32 {
                assert_eq!(f.mul(Fe(x), Fe(y)).0, a.mul(x, y));
                assert_eq!(f.add(Fe(x), Fe(y)).0, a.add(x, y));
            }
        }
    }

    #[test]
    fn element_parser_handles_mu_terms() {
        let f = Field::parse("3^3/1,2,0,1").unwrap();
        let mu = f.mu().unwrap();
        let e = f.parse_elem("mu^2 - mu - 1").unwrap();
        let expect = f.sub(f.sub(f.mul(mu, mu), mu), Fe(1));
        assert_eq!(e, expect);
        assert_eq!(f.parse_elem("-1").unwrap(), Fe(2));
        assert_eq!(f.parse_elem("[0,1]").unwrap(), mu);
    }

    #[test]
    fn modinv_small() {
        assert_eq!(modinv(3, 7), 5);
    }
}
