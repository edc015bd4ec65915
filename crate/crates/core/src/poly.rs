//! Dense univariate polynomials and reduced rational functions over a
//! [`Field`].
//!
//! Coefficients are stored low-degree-first with trailing zeros trimmed, so
//! the zero polynomial is the empty vector and structural equality is
//! mathematical equality.  Operator overloads (`&a + &b`, `&a * &b`, …)
//! panic when the operands live in different fields; the `try_*` methods and
//! every fallible operation report [`Error::SpecMismatch`] instead.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ff::{Fe, Field, FieldSpec};
use crate::linalg;

/// A polynomial over a finite field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    c: Vec<Fe>,
}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.c.hash(state);
    }
}

/// Roots of a polynomial inside the working field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Roots {
    /// Distinct roots in enumeration order, with multiplicities.
    pub roots: Vec<(Fe, usize)>,
    /// True iff the multiplicities add up to the degree.
    pub split: bool,
}

impl Roots {
    /// The distinct roots, in enumeration order.
    pub fn distinct(&self) -> Vec<Fe> {
        self.roots.iter().map(|&(x, _)| x).collect()
    }

    /// True when every root is simple.
    pub fn all_simple(&self) -> bool {
        self.roots.iter().all(|&(_, m)| m == 1)
    }
}

impl Poly {
    /// Builds a polynomial from low-degree-first coefficients.
    pub fn new(field: &Field, mut c: Vec<Fe>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly {
            field: field.clone(),
            c,
        }
    }

    pub fn zero(field: &Field) -> Self {
        Self::new(field, Vec::new())
    }

    pub fn one(field: &Field) -> Self {
        Self::constant(field, Fe::ONE)
    }

    pub fn constant(field: &Field, c: Fe) -> Self {
        Self::new(field, vec![c])
    }

    /// The indeterminate X.
    pub fn x(field: &Field) -> Self {
        Self::monomial(field, Fe::ONE, 1)
    }

    /// `c·X^e`.
    pub fn monomial(field: &Field, c: Fe, e: usize) -> Self {
        let mut v = vec![Fe::ZERO; e + 1];
        v[e] = c;
        Self::new(field, v)
    }

    /// `X - r`.
    pub fn linear_root(field: &Field, r: Fe) -> Self {
        Self::new(field, vec![field.neg(r), Fe::ONE])
    }

    /// Monic polynomial with the given roots (with repetition).
    pub fn from_roots(field: &Field, roots: &[Fe]) -> Self {
        roots
            .iter()
            .fold(Self::one(field), |acc, &r| &acc * &Self::linear_root(field, r))
    }

    /// Polynomial with prime-field integer coefficients, low-degree-first.
    pub fn from_i64s(field: &Field, c: &[i64]) -> Self {
        Self::new(field, c.iter().map(|&v| field.from_i64(v)).collect())
    }

    /// Uniformly random polynomial of degree exactly `deg`.
    pub fn random<R: Rng + ?Sized>(field: &Field, deg: usize, rng: &mut R) -> Self {
        let mut c: Vec<Fe> = (0..deg).map(|_| field.random(rng)).collect();
        c.push(field.random_nonzero(rng));
        Self::new(field, c)
    }

    /// Uniformly random monic polynomial of degree `deg`.
    pub fn random_monic<R: Rng + ?Sized>(field: &Field, deg: usize, rng: &mut R) -> Self {
        let mut c: Vec<Fe> = (0..deg).map(|_| field.random(rng)).collect();
        c.push(Fe::ONE);
        Self::new(field, c)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Low-degree-first coefficients (no trailing zeros).
    pub fn coeffs(&self) -> &[Fe] {
        &self.c
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the zero polynomial reported as `-1`.
    pub fn degree_signed(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// True for nonzero constants and zero.
    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == Fe::ONE
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn lc(&self) -> Fe {
        self.c.last().copied().unwrap_or(Fe::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == Fe::ONE
    }

    /// Coefficient of `X^i`.
    pub fn coeff(&self, i: usize) -> Fe {
        self.c.get(i).copied().unwrap_or(Fe::ZERO)
    }

    /// Constant value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Fe> {
        match self.c.len() {
            0 => Some(Fe::ZERO),
            1 => Some(self.c[0]),
            _ => None,
        }
    }

    fn same_field(&self, other: &Poly) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        Ok(self.add_unchecked(&other.neg_poly()))
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.same_field(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &Poly) -> Poly {
        let f = &self.field;
        let n = self.c.len().max(other.c.len());
        let c = (0..n)
            .map(|i| f.add(self.coeff(i), other.coeff(i)))
            .collect();
        Poly::new(f, c)
    }

    fn neg_poly(&self) -> Poly {
        let f = &self.field;
        Poly::new(f, self.c.iter().map(|&x| f.neg(x)).collect())
    }

    fn mul_unchecked(&self, other: &Poly) -> Poly {
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Poly::zero(f);
        }
        let mut out = vec![Fe::ZERO; self.c.len() + other.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = f.add(out[i + j], f.mul(a, b));
                }
            }
        }
        Poly::new(f, out)
    }

    /// Multiplies every coefficient by `s`.
    pub fn scale(&self, s: Fe) -> Poly {
        let f = &self.field;
        Poly::new(f, self.c.iter().map(|&x| f.mul(x, s)).collect())
    }

    /// Multiplies by `X^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![Fe::ZERO; k];
        c.extend_from_slice(&self.c);
        Poly::new(&self.field, c)
    }

    /// The monic associate (zero stays zero).
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(self.lc()).expect("nonzero leading coefficient");
        self.scale(inv)
    }

    /// `self^e`.
    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self^(p^iterate)`, computed as the coefficient Frobenius spread over
    /// exponents multiplied by `p^iterate`.
    pub fn pow_p_iter(&self, iterate: u32) -> Poly {
        if iterate == 0 || self.is_zero() {
            return self.clone();
        }
        let f = &self.field;
        let step = (f.p() as usize).pow(iterate);
        let mut c = vec![Fe::ZERO; (self.c.len() - 1) * step + 1];
        for (i, &x) in self.c.iter().enumerate() {
            c[i * step] = f.frob(x, iterate);
        }
        Poly::new(f, c)
    }

    /// Euclidean division `(q, r)` with `self = q·b + r`, `deg r < deg b`.
    pub fn divrem(&self, b: &Poly) -> Result<(Poly, Poly)> {
        self.same_field(b)?;
        if b.is_zero() {
            return Err(Error::DivideByZero);
        }
        let f = &self.field;
        let db = b.c.len() - 1;
        if self.c.len() <= db {
            return Ok((Poly::zero(f), self.clone()));
        }
        let inv = f.inv(b.lc())?;
        let mut r = self.c.clone();
        let mut q = vec![Fe::ZERO; r.len() - db];
        for i in (0..q.len()).rev() {
            let coef = f.mul(r[i + db], inv);
            q[i] = coef;
            if coef.is_zero() {
                continue;
            }
            let nc = f.neg(coef);
            for (j, &bj) in b.c.iter().enumerate() {
                if !bj.is_zero() {
                    r[i + j] = f.add(r[i + j], f.mul(nc, bj));
                }
            }
        }
        r.truncate(db);
        Ok((Poly::new(f, q), Poly::new(f, r)))
    }

    /// Remainder modulo `b`.
    pub fn rem(&self, b: &Poly) -> Result<Poly> {
        Ok(self.divrem(b)?.1)
    }

    /// Exact quotient; fails with [`Error::InexactDivision`] on a nonzero
    /// remainder.
    pub fn div_exact(&self, b: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(b)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::InexactDivision(format!(
                "remainder of degree {} when dividing degree {} by degree {}",
                r.degree_signed(),
                self.degree_signed(),
                b.degree_signed()
            )))
        }
    }

    /// True if `b` divides `self`.
    pub fn divisible_by(&self, b: &Poly) -> Result<bool> {
        Ok(self.rem(b)?.is_zero())
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Poly {
        self.derivative_k(1)
    }

    /// Iterated formal derivative `self^{(k)}` (falling-factorial
    /// coefficients reduced mod p).
    pub fn derivative_k(&self, k: usize) -> Poly {
        let f = &self.field;
        if k == 0 {
            return self.clone();
        }
        if self.c.len() <= k {
            return Poly::zero(f);
        }
        let p = f.p() as u64;
        let c = (k..self.c.len())
            .map(|i| {
                let mut ff = 1u64;
                for t in 0..k as u64 {
                    ff = ff * ((i as u64 - t) % p) % p;
                    if ff == 0 {
                        break;
                    }
                }
                f.mul(self.c[i], f.from_i64(ff as i64))
            })
            .collect();
        Poly::new(f, c)
    }

    /// Value at `x` (Horner).
    pub fn eval(&self, x: Fe) -> Fe {
        let f = &self.field;
        self.c
            .iter()
            .rev()
            .fold(Fe::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// `self(s(X))` by Horner over polynomials.
    pub fn compose(&self, s: &Poly) -> Poly {
        let f = &self.field;
        let mut acc = Poly::zero(f);
        for &c in self.c.iter().rev() {
            acc = &(&acc * s) + &Poly::constant(f, c);
        }
        acc
    }

    /// Applies `x ↦ x^{p^iterate}` to every coefficient.
    pub fn frob_coeffs(&self, iterate: u32) -> Poly {
        let f = &self.field;
        Poly::new(f, self.c.iter().map(|&x| f.frob(x, iterate)).collect())
    }

    /// Applies an arbitrary coefficient map into another field.
    pub fn map_coeffs(&self, target: &Field, g: impl Fn(Fe) -> Fe) -> Poly {
        Poly::new(target, self.c.iter().map(|&x| g(x)).collect())
    }

    /// The unique `(f_0, …, f_{p-1})` with `self = Σ f_i^p X^i`.
    pub fn pth_components(&self) -> Vec<Poly> {
        let f = &self.field;
        let p = f.p() as usize;
        let mut parts = vec![Vec::new(); p];
        for (e, &c) in self.c.iter().enumerate() {
            let (j, i) = (e / p, e % p);
            let v = &mut parts[i];
            if v.len() <= j {
                v.resize(j + 1, Fe::ZERO);
            }
            v[j] = f.inv_frob(c);
        }
        parts.into_iter().map(|v| Poly::new(f, v)).collect()
    }

    /// Monic gcd.
    pub fn gcd(&self, b: &Poly) -> Result<Poly> {
        Ok(self.gcd_ext(b)?.0)
    }

    /// Extended gcd `(g, u, v)` with `self·u + b·v = g`, `g` monic.  The
    /// Bézout pair is the minimal one: `deg u < deg b - deg g` and
    /// `deg v < deg self - deg g` (with `u = 0` when `b/g` is constant).
    pub fn gcd_ext(&self, b: &Poly) -> Result<(Poly, Poly, Poly)> {
        self.same_field(b)?;
        let f = &self.field;
        if self.is_zero() && b.is_zero() {
            return Err(Error::BothZero);
        }
        if b.is_zero() {
            let inv = f.inv(self.lc())?;
            return Ok((self.scale(inv), Poly::constant(f, inv), Poly::zero(f)));
        }
        if self.is_zero() {
            let inv = f.inv(b.lc())?;
            return Ok((b.scale(inv), Poly::zero(f), Poly::constant(f, inv)));
        }
        let (mut r0, mut r1) = (self.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1)?;
            let s = &s0 - &(&q * &s1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        let inv = f.inv(r0.lc())?;
        let g = r0.scale(inv);
        let mut u = s0.scale(inv);
        // Reduce u modulo b/g, then recover v exactly.
        let bg = b.div_exact(&g)?;
        u = u.rem(&bg)?;
        let v = (&g - &(self * &u)).div_exact(b)?;
        Ok((g, u, v))
    }

    /// Resultant via the Sylvester matrix in the actual degrees.
    pub fn resultant(&self, b: &Poly) -> Result<Fe> {
        let da = self.deg().ok_or(Error::ZeroPolynomial)?;
        let db = b.deg().ok_or(Error::ZeroPolynomial)?;
        self.resultant_in_degrees(da, b, db)
    }

    /// Resultant via the Sylvester matrix formed in the stated degrees
    /// `(da, db)`, zero-padding coefficients above the actual degree.
    pub fn resultant_in_degrees(&self, da: usize, b: &Poly, db: usize) -> Result<Fe> {
        self.same_field(b)?;
        if self.c.len() > da + 1 || b.c.len() > db + 1 {
            return Err(Error::DegreeMismatch("stated degree below actual degree".into()));
        }
        let f = &self.field;
        let n = da + db;
        if n == 0 {
            return Ok(Fe::ONE);
        }
        let mut m = vec![vec![Fe::ZERO; n]; n];
        for (i, row) in m.iter_mut().enumerate().take(db) {
            for j in 0..=da {
                row[i + j] = self.coeff(da - j);
            }
        }
        for i in 0..da {
            for j in 0..=db {
                m[db + i][i + j] = b.coeff(db - j);
            }
        }
        Ok(linalg::det(f, m))
    }

    /// Discriminant in the stated degree `d`:
    /// `(-1)^{d(d-1)/2} Res_{d,d-1}(a, a') / coeff(a, d)`.
    pub fn disc_in_degree(&self, d: usize) -> Result<Fe> {
        if d < 1 {
            return Err(Error::DegreeTooSmall);
        }
        let f = &self.field;
        let lead = self.coeff(d);
        if lead.is_zero() || self.c.len() > d + 1 {
            return Err(Error::DegreeTooSmall);
        }
        let r = self.resultant_in_degrees(d, &self.derivative(), d - 1)?;
        let mut v = f.div(r, lead)?;
        if (d * (d - 1) / 2) % 2 == 1 {
            v = f.neg(v);
        }
        Ok(v)
    }

    /// Discriminant in the actual degree.
    pub fn disc(&self) -> Result<Fe> {
        self.disc_in_degree(self.deg().ok_or(Error::DegreeTooSmall)?)
    }

    /// `X^e mod self`.
    pub fn x_pow_mod(&self, e: u128) -> Result<Poly> {
        let f = &self.field;
        let mut acc = Poly::one(f).rem(self)?;
        let mut base = Poly::x(f).rem(self)?;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = (&acc * &base).rem(self)?;
            }
            e >>= 1;
            if e > 0 {
                base = (&base * &base).rem(self)?;
            }
        }
        Ok(acc)
    }

    /// `h(X)^{p} mod self`, i.e. one Frobenius step in `F[X]/(self)`.
    fn frob_mod(&self, h: &Poly) -> Result<Poly> {
        h.pow_p_iter(1).rem(self)
    }

    /// `X^{q^m} mod self` where `q` is the field order.
    fn x_q_pow_mod(&self, m: u32) -> Result<Poly> {
        let k = self.field.k();
        let mut h = Poly::x(&self.field).rem(self)?;
        for _ in 0..(m * k) {
            h = self.frob_mod(&h)?;
        }
        Ok(h)
    }

    /// All roots in the working field with multiplicities.
    pub fn roots_in_field(&self) -> Result<Roots> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let f = &self.field;
        let d = self.deg().unwrap_or(0);
        if d == 0 {
            return Ok(Roots {
                roots: Vec::new(),
                split: true,
            });
        }
        f.check_enumerable(crate::ff::DEFAULT_ENUM_BOUND)?;
        // Restrict the scan to the product of the linear factors.
        let xq = self.x_q_pow_mod(1)?;
        let lin = self.gcd(&(&xq - &Poly::x(f)))?;
        let mut roots = Vec::new();
        let mut total = 0usize;
        if lin.deg().unwrap_or(0) > 0 {
            let want = lin.deg().unwrap();
            for x in f.elements() {
                if lin.eval(x).is_zero() {
                    let lr = Poly::linear_root(f, x);
                    let mut m = 0;
                    let mut cur = self.clone();
                    loop {
                        let (q, r) = cur.divrem(&lr)?;
                        if !r.is_zero() {
                            break;
                        }
                        m += 1;
                        cur = q;
                    }
                    roots.push((x, m));
                    total += m;
                    if roots.len() == want {
                        break;
                    }
                }
            }
        }
        Ok(Roots {
            roots,
            split: total == d,
        })
    }

    /// True when every irreducible factor is linear and simple.
    pub fn splits_simply(&self) -> Result<bool> {
        let r = self.roots_in_field()?;
        Ok(r.split && r.all_simple())
    }

    /// Smallest absolute extension degree `K` (over F_p) such that `self`
    /// splits over F_{p^K}; a multiple of the working field's degree.
    pub fn splitting_degree(&self) -> Result<u32> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let f = &self.field;
        if self.is_constant() {
            return Ok(f.k());
        }
        // Squarefree kernel: remove repeated factors where the derivative
        // allows it; inseparable parts are p-th powers, whose roots lie in
        // the same fields as those of their p-th roots.
        let mut s = self.monic();
        loop {
            let d = s.derivative();
            if d.is_zero() {
                let comps = s.pth_components();
                s = comps[0].monic();
                if s.is_constant() {
                    return Ok(f.k());
                }
                continue;
            }
            let g = s.gcd(&d)?;
            if g.is_constant() {
                break;
            }
            s = s.div_exact(&g)?;
            if s.is_constant() {
                return Ok(f.k());
            }
        }
        // Distinct-degree factorisation: the relative splitting degree is
        // the lcm of the degrees of the irreducible factors.
        let mut rest = s;
        let mut h = Poly::x(f).rem(&rest)?;
        let mut m: u64 = 1;
        let mut i: u64 = 0;
        while rest.deg().unwrap_or(0) > 0 {
            i += 1;
            if 2 * i > rest.deg().unwrap_or(0) as u64 {
                // What remains is irreducible.
                let d = rest.deg().unwrap() as u64;
                m = m / crate::ff::gcd_u64(m, d) * d;
                break;
            }
            for _ in 0..f.k() {
                h = rest.frob_mod(&h)?;
            }
            let g = rest.gcd(&(&h - &Poly::x(f)))?;
            if !g.is_constant() {
                m = m / crate::ff::gcd_u64(m, i) * i;
                rest = rest.div_exact(&g)?;
                h = h.rem(&rest)?;
            }
        }
        u32::try_from(m * f.k() as u64)
            .map_err(|_| Error::internal("splitting degree does not fit in 32 bits"))
    }

    /// Lagrange interpolation through points with distinct abscissae.
    pub fn interpolate(field: &Field, pts: &[(Fe, Fe)]) -> Result<Poly> {
        let f = field;
        let mut acc = Poly::zero(f);
        for (i, &(xi, yi)) in pts.iter().enumerate() {
            let mut basis = Poly::one(f);
            let mut denom = Fe::ONE;
            for (j, &(xj, _)) in pts.iter().enumerate() {
                if i == j {
                    continue;
                }
                let diff = f.sub(xi, xj);
                if diff.is_zero() {
                    return Err(Error::MalformedInput("repeated interpolation node".into()));
                }
                basis = &basis * &Poly::linear_root(f, xj);
                denom = f.mul(denom, diff);
            }
            acc = &acc + &basis.scale(f.div(yi, denom)?);
        }
        Ok(acc)
    }

    /// Solves `γ ≡ r_i (mod m_i)` with pairwise coprime moduli; constant
    /// moduli impose no constraint.  Returns the solution of degree below
    /// `Σ deg m_i`.
    pub fn crt_solve(field: &Field, system: &[(Poly, Poly)]) -> Result<Poly> {
        let f = field;
        let mut gamma = Poly::zero(f);
        let mut modulus = Poly::one(f);
        for (r, m) in system {
            if m.is_zero() {
                return Err(Error::ModuliNotCoprime);
            }
            if m.is_constant() {
                continue;
            }
            let (g, u, _) = modulus.gcd_ext(m)?;
            if !g.is_one() {
                return Err(Error::ModuliNotCoprime);
            }
            // modulus·u ≡ 1 (mod m)
            let diff = (r - &gamma).rem(m)?;
            let t = (&diff * &u).rem(m)?;
            gamma = &gamma + &(&modulus * &t);
            modulus = &modulus * m;
            gamma = gamma.rem(&modulus)?;
        }
        Ok(gamma)
    }

    /// Renders with coefficients formatted by [`Field::fmt_elem`].
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let f = &self.field;
        let mut terms = Vec::new();
        for (i, &c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = f.fmt_elem(c);
            let cs = if cs.contains('+') { format!("({cs})") } else { cs };
            let t = match i {
                0 => cs,
                _ => {
                    let xs = if i == 1 { "X".to_string() } else { format!("X^{i}") };
                    if c == Fe::ONE {
                        xs
                    } else {
                        format!("{cs}*{xs}")
                    }
                }
            };
            terms.push(t);
        }
        terms.join(" + ")
    }

    /// JSON form `{"field": spec, "coeffs": [[coords], …]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "field": self.field.spec().to_string(),
            "coeffs": self.c.iter().map(|&x| elem_to_json(&self.field, x)).collect::<Vec<_>>(),
        })
    }

    /// Parses the JSON form; `field` (if given) must match the document's.
    pub fn from_json(v: &Value, field: Option<&Field>) -> Result<Poly> {
        let bad = |m: &str| Error::MalformedInput(format!("polynomial JSON: {m}"));
        let f = match (v.get("field").and_then(Value::as_str), field) {
            (Some(s), Some(f)) => {
                if FieldSpec::parse(s)? != *f.spec() {
                    return Err(Error::SpecMismatch);
                }
                f.clone()
            }
            (Some(s), None) => Field::parse(s)?,
            (None, Some(f)) => f.clone(),
            (None, None) => return Err(bad("missing field")),
        };
        let coeffs = v
            .get("coeffs")
            .or(Some(v))
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing coeffs"))?;
        let c = coeffs
            .iter()
            .map(|e| elem_from_json(&f, e))
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(&f, c))
    }
}

/// JSON form of an element: its coordinate list.
pub fn elem_to_json(field: &Field, x: Fe) -> Value {
    json!(field.coords(x))
}

/// Reads an element from a coordinate list, an integer, or an element
/// string accepted by [`Field::parse_elem`].
pub fn elem_from_json(field: &Field, v: &Value) -> Result<Fe> {
    match v {
        Value::Array(a) => {
            let c = a
                .iter()
                .map(|x| {
                    x.as_i64()
                        .ok_or_else(|| Error::MalformedInput("coordinate must be an integer".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            field.from_coords(&c)
        }
        Value::Number(n) => n
            .as_i64()
            .map(|i| field.from_i64(i))
            .ok_or_else(|| Error::MalformedInput("element must be an integer".into())),
        Value::String(s) => field.parse_elem(s),
        _ => Err(Error::MalformedInput("unrecognised element".into())),
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

macro_rules! poly_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                assert!(self.field == rhs.field, "polynomials over different fields");
                #[allow(clippy::redundant_closure_call)]
                ($body)(self, rhs)
            }
        }
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                self.$m(&rhs)
            }
        }
    };
}

poly_binop!(Add, add, |a: &Poly, b: &Poly| a.add_unchecked(b));
poly_binop!(Sub, sub, |a: &Poly, b: &Poly| a.add_unchecked(&b.neg_poly()));
poly_binop!(Mul, mul, |a: &Poly, b: &Poly| a.mul_unchecked(b));

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.neg_poly()
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.neg_poly()
    }
}

/// A reduced rational function `num/den` with `den` monic and coprime to
/// `num`.  Zero is `0/1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    /// Builds and reduces `num/den`.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        num.same_field(&den)?;
        if den.is_zero() {
            return Err(Error::DivideByZero);
        }
        let f = num.field().clone();
        if num.is_zero() {
            return Ok(RatFun {
                num,
                den: Poly::one(&f),
            });
        }
        let g = num.gcd(&den)?;
        let (mut n, mut d) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g)?, den.div_exact(&g)?)
        };
        let inv = f.inv(d.lc())?;
        n = n.scale(inv);
        d = d.scale(inv);
        Ok(RatFun { num: n, den: d })
    }

    pub fn from_poly(p: Poly) -> Self {
        let f = p.field().clone();
        RatFun {
            num: p,
            den: Poly::one(&f),
        }
    }

    pub fn zero(field: &Field) -> Self {
        Self::from_poly(Poly::zero(field))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn field(&self) -> &Field {
        self.num.field()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The polynomial if the denominator is 1.
    pub fn as_poly(&self) -> Option<&Poly> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn add(&self, o: &RatFun) -> Result<RatFun> {
        RatFun::new(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }

    pub fn sub(&self, o: &RatFun) -> Result<RatFun> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RatFun {
        RatFun {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &RatFun) -> Result<RatFun> {
        RatFun::new(&self.num * &o.num, &self.den * &o.den)
    }

    pub fn div(&self, o: &RatFun) -> Result<RatFun> {
        if o.is_zero() {
            return Err(Error::DivideByZero);
        }
        RatFun::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn scale(&self, s: Fe) -> RatFun {
        if s.is_zero() {
            return RatFun::zero(self.field());
        }
        RatFun {
            num: self.num.scale(s),
            den: self.den.clone(),
        }
    }

    /// `self^e` for a non-negative exponent.
    pub fn pow(&self, e: u64) -> RatFun {
        RatFun {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// First derivative by the quotient rule.
    pub fn derivative(&self) -> RatFun {
        let n = &self.num;
        let d = &self.den;
        let top = &(&n.derivative() * d) - &(n * &d.derivative());
        RatFun::new(top, d * d).expect("nonzero denominator")
    }

    /// `k`-th derivative.  Since `den^p` is a p-th power its derivative
    /// vanishes, so `(num/den)^{(k)} = (num·den^{p-1})^{(k)} / den^p`.
    pub fn derivative_k(&self, k: usize) -> RatFun {
        let p = self.field().p() as u64;
        let lifted = &self.num * &self.den.pow(p - 1);
        RatFun::new(lifted.derivative_k(k), self.den.pow_p_iter(1)).expect("nonzero denominator")
    }

    /// `k`-th derivative by iterating the quotient rule (reference
    /// implementation).
    pub fn derivative_k_quotient_rule(&self, k: usize) -> RatFun {
        (0..k).fold(self.clone(), |acc, _| acc.derivative())
    }

    /// Value at `x`, or `None` at a pole.
    pub fn eval(&self, x: Fe) -> Option<Fe> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.field().div(self.num.eval(x), d).expect("nonzero"))
    }

    /// Order at infinity of the form `f dX`: `deg den − deg num − 2`.
    pub fn form_order_at_infinity(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.den.degree_signed() - self.num.degree_signed() - 2)
    }

    pub fn to_json(&self) -> Value {
        json!({"num": self.num.to_json(), "den": self.den.to_json()})
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Field {
        Field::prime(3).unwrap()
    }

    #[test]
    fn schoolbook_product() {
        let f = f3();
        let a = Poly::from_i64s(&f, &[1, 0, 1]);
        let b = Poly::from_i64s(&f, &[2, 1]);
        assert_eq!(&a * &b, Poly::from_i64s(&f, &[2, 1, 2, 1]));
    }

    #[test]
    fn second_derivative_of_square() {
        let f = f3();
        let p = Poly::from_i64s(&f, &[0, -1, 0, 1]);
        assert_eq!(p.pow(2).derivative_k(2), Poly::from_i64s(&f, &[2]));
    }

    #[test]
    fn bezout_is_minimal() {
        let f = Field::prime(2).unwrap();
        let (g, u, v) = Poly::from_i64s(&f, &[0, 1])
            .gcd_ext(&Poly::from_i64s(&f, &[1, 1]))
            .unwrap();
        assert!(g.is_one() && u.is_one() && v.is_one());
    }

    #[test]
    fn crt_small() {
        let f = Field::prime(2).unwrap();
        let g = Poly::crt_solve(
            &f,
            &[
                (Poly::one(&f), Poly::x(&f)),
                (Poly::zero(&f), Poly::from_i64s(&f, &[1, 1])),
            ],
        )
        .unwrap();
        assert_eq!(g, Poly::from_i64s(&f, &[1, 1]));
    }

    #[test]
    fn quadratic_discriminant() {
        let f = Field::prime(5).unwrap();
        let p = Poly::from_i64s(&f, &[1, 1, 1]);
        assert_eq!(p.disc().unwrap(), f.from_i64(2));
    }

    #[test]
    fn splitting_degree_of_irreducible_quadratic() {
        let f = f3();
        let p = Poly::from_i64s(&f, &[1, 0, 1]);
        assert_eq!(p.splitting_degree().unwrap(), 2);
    }
}
