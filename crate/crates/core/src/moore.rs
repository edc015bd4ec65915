//! Moore determinants, bordered δ_ε determinants, structural (additive)
//! polynomials of F_p-subspaces, Dickson invariants and the signed-minor map
//! φ.
//!
//! Everything is generic over a [`FrobRing`]: a commutative ring of
//! characteristic p with an explicit Frobenius.  Two instances are provided:
//! the working field itself (elements [`Fe`]) and its polynomial ring
//! ([`PolyRing`], elements [`Poly`]).

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::ff::{Fe, Field};
use crate::poly::Poly;

/// Largest tuple length accepted by the determinant routines.
pub const MAX_TUPLE: usize = 8;

/// A commutative ring of characteristic p with Frobenius `x ↦ x^p`.
pub trait FrobRing {
    type E: Clone + PartialEq + Debug;
    fn p(&self) -> u32;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn from_int(&self, n: i64) -> Self::E;
    fn is_zero(&self, x: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// `x^{p^iterate}`.
    fn frob(&self, x: &Self::E, iterate: u32) -> Self::E;
    /// Exact quotient `a / b` (`b` must divide `a`).
    fn div_exact(&self, a: &Self::E, b: &Self::E) -> Result<Self::E>;

    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E {
        self.add(a, &self.neg(b))
    }

    fn pow(&self, a: &Self::E, mut e: u64) -> Self::E {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}

impl FrobRing for Field {
    type E = Fe;
    fn p(&self) -> u32 {
        Field::p(self)
    }
    fn zero(&self) -> Fe {
        Fe::ZERO
    }
    fn one(&self) -> Fe {
        Fe::ONE
    }
    fn from_int(&self, n: i64) -> Fe {
        self.from_i64(n)
    }
    fn is_zero(&self, x: &Fe) -> bool {
        x.is_zero()
    }
    fn add(&self, a: &Fe, b: &Fe) -> Fe {
        Field::add(self, *a, *b)
    }
    fn neg(&self, a: &Fe) -> Fe {
        Field::neg(self, *a)
    }
    fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        Field::mul(self, *a, *b)
    }
    fn frob(&self, x: &Fe, iterate: u32) -> Fe {
        Field::frob(self, *x, iterate)
    }
    fn div_exact(&self, a: &Fe, b: &Fe) -> Result<Fe> {
        Field::div(self, *a, *b)
    }
    fn pow(&self, a: &Fe, e: u64) -> Fe {
        self.pow_u(*a, e)
    }
}

/// The polynomial ring over a field, as a [`FrobRing`].
#[derive(Clone, Debug)]
pub struct PolyRing {
    field: Field,
}

impl PolyRing {
    pub fn new(field: &Field) -> Self {
        PolyRing {
            field: field.clone(),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
}

impl FrobRing for PolyRing {
    type E = Poly;
    fn p(&self) -> u32 {
        self.field.p()
    }
    fn zero(&self) -> Poly {
        Poly::zero(&self.field)
    }
    fn one(&self) -> Poly {
        Poly::one(&self.field)
    }
    fn from_int(&self, n: i64) -> Poly {
        Poly::constant(&self.field, self.field.from_i64(n))
    }
    fn is_zero(&self, x: &Poly) -> bool {
        x.is_zero()
    }
    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        a + b
    }
    fn neg(&self, a: &Poly) -> Poly {
        -a
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        a * b
    }
    fn frob(&self, x: &Poly, iterate: u32) -> Poly {
        x.pow_p_iter(iterate)
    }
    fn div_exact(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        a.div_exact(b)
    }
}

/// Determinant by fraction-free (Bareiss) elimination with row pivoting.
pub fn det<R: FrobRing>(r: &R, mut m: Vec<Vec<R::E>>) -> Result<R::E> {
    let n = m.len();
    if n == 0 {
        return Ok(r.one());
    }
    let mut sign_neg = false;
    let mut prev = r.one();
    for k in 0..n - 1 {
        if r.is_zero(&m[k][k]) {
            let Some(piv) = (k + 1..n).find(|&i| !r.is_zero(&m[i][k])) else {
                return Ok(r.zero());
            };
            m.swap(k, piv);
            sign_neg = !sign_neg;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = r.sub(&r.mul(&m[k][k], &m[i][j]), &r.mul(&m[i][k], &m[k][j]));
                m[i][j] = r.div_exact(&t, &prev)?;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    Ok(if sign_neg { r.neg(&d) } else { d })
}

fn check_len(n: usize) -> Result<()> {
    if n > MAX_TUPLE + 1 {
        Err(Error::TupleTooLarge(MAX_TUPLE))
    } else {
        Ok(())
    }
}

/// Determinant of the matrix whose row `i` is `(t_1^{p^{e_i}}, …, t_n^{p^{e_i}})`.
pub fn frob_det<R: FrobRing>(r: &R, t: &[R::E], exps: &[u32]) -> Result<R::E> {
    if exps.len() != t.len() {
        return Err(Error::MalformedInput("row count must equal tuple length".into()));
    }
    check_len(t.len())?;
    let m = exps
        .iter()
        .map(|&e| t.iter().map(|x| r.frob(x, e)).collect())
        .collect();
    det(r, m)
}

/// Moore determinant `Δ_n(t) = det(t_j^{p^{i-1}})`; `Δ_0 = 1`.
pub fn moore_det<R: FrobRing>(r: &R, t: &[R::E]) -> Result<R::E> {
    let exps: Vec<u32> = (0..t.len() as u32).collect();
    frob_det(r, t, &exps)
}

/// Moore determinant as the product over triangular ranges:
/// `Π_i Π_{ε_1..ε_{i-1}} (t_i + Σ ε_j t_j)`.
pub fn moore_det_product<R: FrobRing>(r: &R, t: &[R::E]) -> R::E {
    let p = r.p() as i64;
    let mut acc = r.one();
    for i in 0..t.len() {
        for eps in eps_vectors(p as u32, i, true) {
            let mut s = t[i].clone();
            for (j, &e) in eps.iter().enumerate() {
                if e != 0 {
                    s = r.add(&s, &r.mul(&r.from_int(e), &t[j]));
                }
            }
            acc = r.mul(&acc, &s);
        }
    }
    acc
}

/// The tuple with entry `i` removed.
pub fn hat<T: Clone>(t: &[T], i: usize) -> Vec<T> {
    t.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, x)| x.clone())
        .collect()
}

/// Signed minor map `φ(t)_i = (-1)^{i-1} Δ_{n-1}(t̂_i)` (1-based `i`).
pub fn minor_map<R: FrobRing>(r: &R, t: &[R::E]) -> Result<Vec<R::E>> {
    if t.len() < 2 {
        return Err(Error::TupleTooSmall(2));
    }
    (0..t.len())
        .map(|i| {
            let m = moore_det(r, &hat(t, i))?;
            Ok(if i % 2 == 1 { r.neg(&m) } else { m })
        })
        .collect()
}

/// `δ_ε(t) = Σ_i ε_i φ(t)_i`, the determinant of the Moore matrix of size
/// `n-1` bordered by the row ε.
pub fn delta_epsilon<R: FrobRing>(r: &R, eps: &[i64], t: &[R::E]) -> Result<R::E> {
    if eps.len() != t.len() {
        return Err(Error::MalformedInput("ε and tuple lengths differ".into()));
    }
    let p = r.p() as i64;
    if eps.iter().all(|&e| e.rem_euclid(p) == 0) {
        return Err(Error::ZeroEpsilon);
    }
    if t.len() == 1 {
        return Ok(r.from_int(eps[0]));
    }
    let phi = minor_map(r, t)?;
    Ok(fp_combination(r, eps, &phi))
}

/// `Σ ε_i t_i`.
pub fn fp_combination<R: FrobRing>(r: &R, eps: &[i64], t: &[R::E]) -> R::E {
    eps.iter().zip(t).fold(r.zero(), |acc, (&e, x)| {
        if e.rem_euclid(r.p() as i64) == 0 {
            acc
        } else {
            r.add(&acc, &r.mul(&r.from_int(e), x))
        }
    })
}

/// Right action of an integer matrix: `(t·M)_j = Σ_i t_i M_{ij}`.
pub fn apply_matrix<R: FrobRing>(r: &R, t: &[R::E], m: &[Vec<i64>]) -> Vec<R::E> {
    let n = t.len();
    (0..n)
        .map(|j| {
            let col: Vec<i64> = (0..n).map(|i| m[i][j]).collect();
            fp_combination(r, &col, t)
        })
        .collect()
}

/// All vectors in `F_p^n` (entries in `[0,p)`), in code order with the
/// first entry least significant; the zero vector is skipped unless
/// `with_zero`.
pub fn eps_vectors(p: u32, n: usize, with_zero: bool) -> Vec<Vec<i64>> {
    let total = (p as u64).pow(n as u32);
    (0..total)
        .filter(|&c| with_zero || c != 0)
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let d = (c % p as u64) as i64;
                    c /= p as u64;
                    d
                })
                .collect()
        })
        .collect()
}

/// Projective representatives of nonzero vectors: last nonzero entry 1.
pub fn projective_eps(p: u32, n: usize) -> Vec<Vec<i64>> {
    eps_vectors(p, n, false)
        .into_iter()
        .filter(|e| e.iter().rev().find(|&&x| x != 0) == Some(&1))
        .collect()
}

/// The F_p-span of a tuple of field elements, as `(ε, Σ ε_i v_i)` pairs.
pub fn span(f: &Field, basis: &[Fe]) -> Vec<(Vec<i64>, Fe)> {
    eps_vectors(f.p(), basis.len(), true)
        .into_iter()
        .map(|e| {
            let v = fp_combination(f, &e, basis);
            (e, v)
        })
        .collect()
}

/// Structural polynomial `P_V = Π_{v∈V}(X − v)` of the span `V` of an
/// F_p-independent tuple, computed as `Δ_{n+1}(v, X)/Δ_n(v)` and checked
/// against the product over the span when the span is small.
pub fn structural_poly(f: &Field, basis: &[Fe]) -> Result<Poly> {
    let dn = moore_det(f, basis)?;
    if dn.is_zero() {
        return Err(Error::DependentBasis);
    }
    let ring = PolyRing::new(f);
    let mut t: Vec<Poly> = basis.iter().map(|&v| Poly::constant(f, v)).collect();
    t.push(Poly::x(f));
    let num = moore_det(&ring, &t)?;
    let pv = num.scale(f.inv(dn)?);
    if (f.p() as u64).pow(basis.len() as u32) <= 4096 {
        let roots: Vec<Fe> = span(f, basis).into_iter().map(|(_, v)| v).collect();
        if Poly::from_roots(f, &roots) != pv {
            return Err(Error::internal("structural polynomial: determinant and product disagree"));
        }
    }
    Ok(pv)
}

/// Dickson invariants `c_{n,i}(t)` for `i = 0..n-1`, each the quotient of the
/// Frobenius determinant with row `t^{p^i}` omitted by `Δ_n(t)`.
pub fn dickson<R: FrobRing>(r: &R, t: &[R::E]) -> Result<Vec<R::E>> {
    let n = t.len();
    let dn = moore_det(r, t)?;
    if r.is_zero(&dn) {
        return Err(Error::SingularTuple);
    }
    (0..n as u32)
        .map(|i| {
            let exps: Vec<u32> = (0..=n as u32).filter(|&e| e != i).collect();
            let num = frob_det(r, t, &exps)?;
            r.div_exact(&num, &dn)
        })
        .collect()
}

/// Structural polynomial assembled from Dickson values:
/// `T^{p^n} + Σ_i (-1)^{n-i} c_{n,i} T^{p^i}`.
pub fn structural_from_dickson(f: &Field, c: &[Fe]) -> Poly {
    let n = c.len();
    let p = f.p() as usize;
    let mut out = Poly::monomial(f, Fe::ONE, p.pow(n as u32));
    for (i, &ci) in c.iter().enumerate() {
        let v = if (n - i) % 2 == 1 { f.neg(ci) } else { ci };
        out = &out + &Poly::monomial(f, v, p.pow(i as u32));
    }
    out
}

/// True iff the tuple is F_p-independent (nonzero Moore determinant).
pub fn is_independent<R: FrobRing>(r: &R, t: &[R::E]) -> Result<bool> {
    Ok(!r.is_zero(&moore_det(r, t)?))
}

/// `1 + p + … + p^{m}` (zero when `m < 0`).
pub fn geometric(p: u64, m: i64) -> u64 {
    (0..=m).map(|i| p.pow(i as u32)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_moore_of_one_mu() {
        let f = Field::parse("2^2/1,1,1").unwrap();
        let mu = f.mu().unwrap();
        assert_eq!(moore_det(&f, &[Fe::ONE, mu]).unwrap(), Fe::ONE);
    }

    #[test]
    fn structural_poly_of_f4() {
        let f = Field::parse("2^2/1,1,1").unwrap();
        let mu = f.mu().unwrap();
        let pv = structural_poly(&f, &[Fe::ONE, mu]).unwrap();
        assert_eq!(pv, Poly::from_i64s(&f, &[0, 1, 0, 0, 1]));
    }

    #[test]
    fn bareiss_matches_gauss_on_field() {
        let f = Field::parse("3^2/1,0,1").unwrap();
        let m: Vec<Vec<Fe>> = (0..3)
            .map(|i| (0..3).map(|j| Fe((i * 3 + j * 5 + 1) as u32 % 9)).collect())
            .collect();
        assert_eq!(det(&f, m.clone()).unwrap(), crate::linalg::det(&f, m));
    }
}
