//! Constructions of spaces in characteristic 2.
//!
//! In characteristic 2 a tuple `Q` is a prompt exactly when
//! `det(Q', Q, Q^2, …, Q^{2^{n-2}}) = 1`.  Writing `Q_i = U_i^2 + X V_i^2`
//! (the unique even/odd split, so `Q_i' = V_i^2`):
//!
//! * for `n = 2` the condition is the Bézout identity `V_1U_2 + U_1V_2 = 1`;
//! * for any `n`, starting from a tuple `W` whose nonzero F_2-combinations
//!   are pairwise coprime of a common degree `d`, set `V_i = Δ_{n-1}(Ŵ_i)`,
//!   solve `γ ≡ V_{k_W} (mod W)` over the nonzero combinations `W` (where
//!   `k_W` is the last basis index used by `W`), and put
//!   `U_i = (γ/Δ_n(W) + R) V_i + V_i^2/Δ_n(W)` for an arbitrary polynomial
//!   `R`.  The resulting `U_i` are polynomials and `Q` is a prompt.
//!
//! The degree of the result is `λ = 1 + d(2^n - 2)` when `R` is constant and
//! `λ = 2(deg R + d(2^{n-1} - 1))` otherwise.
//!
//! Two parameter sets `(W, R)` and `(W', R')` give the same space iff the
//! spans agree and `R = R'`; they give equivalent spaces iff for some `b`
//! the span of `W'` is that of `W(X + b^2)` and `R' = R(X + b^2) + b`.
//! Pulling back along `X ↦ S(X)` with `S' = 1` corresponds to
//! `(W∘S, R∘S + √(S - X))`.

use std::collections::HashSet;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ff::{Fe, Field};
use crate::lspace::{self, Prompt};
use crate::moore::{self, PolyRing, MAX_TUPLE};
use crate::poly::Poly;

fn require_char2(f: &Field) -> Result<()> {
    if f.p() != 2 {
        return Err(Error::WrongCharacteristic(f.p()));
    }
    Ok(())
}

/// `(U, V)` with `Q = U^2 + X V^2`.
pub fn split_uv(q: &Poly) -> Result<(Poly, Poly)> {
    require_char2(q.field())?;
    let mut parts = q.pth_components();
    let v = parts.pop().expect("two components");
    let u = parts.pop().expect("two components");
    Ok((u, v))
}

/// `U^2 + X V^2`.
pub fn join_uv(u: &Poly, v: &Poly) -> Poly {
    &u.pow(2) + &v.pow(2).shift(1)
}

/// Square root of a polynomial that is a square (all odd coefficients zero).
pub fn poly_sqrt(a: &Poly) -> Result<Poly> {
    let (u, v) = split_uv(a)?;
    if !v.is_zero() {
        return Err(Error::PrecondViolation(format!("{a} is not a square")));
    }
    Ok(u)
}

/// Prompt `(U_1^2 + X V_1^2, U_2^2 + X V_2^2)` from coprime `V_1, V_2` of a
/// common degree (with `V_1 + V_2` of that degree too), where `(U_1, U_2)` is
/// the minimal solution of `V_1U_2 + U_1V_2 = 1` moved by `shift`:
/// `U_i ↦ U_i + shift·V_i`.
pub fn bezout_prompt_n2(v1: &Poly, v2: &Poly, shift: Fe) -> Result<Prompt> {
    require_char2(v1.field())?;
    if v1.is_zero() || v2.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let d = v1.deg();
    if v2.deg() != d || (v1 + v2).deg() != d {
        return Err(Error::DegreeDrop);
    }
    let (g, s, t) = v1.gcd_ext(v2)?;
    if !g.is_one() {
        return Err(Error::NotCoprime);
    }
    // s·V1 + t·V2 = 1, so U2 = s, U1 = t.
    let u1 = &t + &v1.scale(shift);
    let u2 = &s + &v2.scale(shift);
    let q = Prompt::new(vec![join_uv(&u1, v1), join_uv(&u2, v2)])?;
    check_det_one(&q)?;
    Ok(q)
}

/// Even-λ counterpart of [`bezout_prompt_n2`]: coprime `U_1, U_2` of a common
/// degree (with `U_1 + U_2` of that degree) and the minimal `(V_1, V_2)` with
/// `V_1U_2 + U_1V_2 = 1`.
pub fn bezout_prompt_n2_even(u1: &Poly, u2: &Poly) -> Result<Prompt> {
    require_char2(u1.field())?;
    if u1.is_zero() || u2.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let d = u1.deg();
    if u2.deg() != d || (u1 + u2).deg() != d || d == Some(0) {
        return Err(Error::DegreeDrop);
    }
    let (g, s, t) = u2.gcd_ext(u1)?;
    if !g.is_one() {
        return Err(Error::NotCoprime);
    }
    // s·U2 + t·U1 = 1, so V1 = s, V2 = t.
    let q = Prompt::new(vec![join_uv(u1, &s), join_uv(u2, &t)])?;
    check_det_one(&q)?;
    Ok(q)
}

fn check_det_one(q: &Prompt) -> Result<()> {
    let v = lspace::verify_prompt_det(q)?;
    if !v.holds {
        return Err(Error::internal(format!(
            "characteristic-2 determinant is {}, not 1",
            v.value
        )));
    }
    Ok(())
}

/// An n-tuple whose nonzero F_2-combinations are pairwise coprime and all of
/// degree `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WTuple {
    w: Vec<Poly>,
    d: usize,
}

impl WTuple {
    /// Validates by enumerating all `2^n - 1` combinations.
    pub fn new(w: Vec<Poly>) -> Result<Self> {
        let first = w.first().ok_or(Error::TupleTooSmall(2))?;
        if w.len() < 2 {
            return Err(Error::TupleTooSmall(2));
        }
        if w.len() > MAX_TUPLE {
            return Err(Error::TupleTooLarge(MAX_TUPLE));
        }
        let f = first.field().clone();
        require_char2(&f)?;
        if w.iter().any(|x| x.field() != &f) {
            return Err(Error::SpecMismatch);
        }
        let d = first
            .deg()
            .ok_or_else(|| Error::InvalidWTuple("zero entry".into()))?;
        let combos = combinations(&f, &w);
        for (eps, c) in &combos {
            if c.deg() != Some(d) {
                return Err(Error::InvalidWTuple(format!(
                    "combination {eps:?} has degree {} instead of {d}",
                    c.degree_signed()
                )));
            }
        }
        for (i, (ei, a)) in combos.iter().enumerate() {
            for (ej, b) in &combos[i + 1..] {
                if !a.gcd(b)?.is_one() {
                    return Err(Error::InvalidWTuple(format!(
                        "combinations {ei:?} and {ej:?} share a factor"
                    )));
                }
            }
        }
        Ok(WTuple { w, d })
    }

    pub fn w(&self) -> &[Poly] {
        &self.w
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn field(&self) -> &Field {
        self.w[0].field()
    }

    /// The set of nonzero combinations.
    pub fn span_set(&self) -> HashSet<Poly> {
        combinations(self.field(), &self.w)
            .into_iter()
            .map(|(_, c)| c)
            .collect()
    }

    /// `W_i(S)`.
    pub fn compose(&self, s: &Poly) -> Result<WTuple> {
        WTuple::new(self.w.iter().map(|x| x.compose(s)).collect())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "field": self.field().spec().to_string(),
            "d": self.d,
            "W": self.w.iter().map(Poly::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Nonzero F_2-combinations with their coefficient vectors, in code order.
fn combinations(f: &Field, w: &[Poly]) -> Vec<(Vec<i64>, Poly)> {
    let ring = PolyRing::new(f);
    moore::eps_vectors(2, w.len(), false)
        .into_iter()
        .map(|e| {
            let c = moore::fp_combination(&ring, &e, w);
            (e, c)
        })
        .collect()
}

/// Output of [`general_construct`].
#[derive(Clone, Debug)]
pub struct Char2Construction {
    pub prompt: Prompt,
    pub u: Vec<Poly>,
    pub v: Vec<Poly>,
    /// The reduced CRT solution, `deg γ < deg Δ_n(W)`.
    pub gamma: Poly,
    /// `Δ_n(W)`; the rational function `α` is `γ/Δ_n(W)`.
    pub delta: Poly,
    pub r: Poly,
}

impl Char2Construction {
    pub fn lambda(&self) -> usize {
        self.prompt.lambda()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": "lform.char2/1",
            "prompt": self.prompt.to_json(),
            "U": self.u.iter().map(Poly::to_json).collect::<Vec<_>>(),
            "V": self.v.iter().map(Poly::to_json).collect::<Vec<_>>(),
            "gamma": self.gamma.to_json(),
            "delta": self.delta.to_json(),
            "R": self.r.to_json(),
            "lambda": self.lambda(),
        })
    }
}

/// The degree predicted for the construction from `(W, R)`.
pub fn predicted_lambda(n: usize, d: usize, r: &Poly) -> usize {
    let half = d * ((1usize << (n - 1)) - 1);
    match r.deg() {
        Some(k) if k >= 1 => 2 * (k + half),
        _ => 1 + 2 * half,
    }
}

/// Builds the prompt attached to `(W, R)`, asserting that the `U_i` are
/// polynomials, that `Δ_n(V) = Δ_n(W)^{2^{n-1}-1}`, that
/// `det(U, V, U^2, …, U^{2^{n-2}}) = 1` (for `n ≥ 3`), that
/// `det(Q', Q, …, Q^{2^{n-2}}) = 1`, and the degree law.
pub fn general_construct(w: &WTuple, r: &Poly) -> Result<Char2Construction> {
    let f = w.field();
    if r.field() != f {
        return Err(Error::SpecMismatch);
    }
    let ring = PolyRing::new(f);
    let n = w.n();
    let delta = moore::moore_det(&ring, w.w())?;
    let v = moore::minor_map(&ring, w.w())?;

    let system: Vec<(Poly, Poly)> = combinations(f, w.w())
        .into_iter()
        .map(|(eps, m)| {
            let k = eps.iter().rposition(|&e| e != 0).expect("nonzero");
            (v[k].clone(), m)
        })
        .collect();
    let gamma = Poly::crt_solve(f, &system).map_err(|e| match e {
        Error::ModuliNotCoprime => Error::CongruenceInsolvable,
        e => e,
    })?;
    for (res, m) in &system {
        if !(&gamma - res).divisible_by(m)? {
            return Err(Error::CongruenceInsolvable);
        }
    }

    let shifted = &gamma + &(r * &delta);
    let u = v
        .iter()
        .map(|vi| {
            (&(&shifted * vi) + &vi.pow(2))
                .div_exact(&delta)
                .map_err(|_| Error::NonPolynomialU)
        })
        .collect::<Result<Vec<_>>>()?;

    let dv = moore::moore_det(&ring, &v)?;
    if dv != delta.pow((1u64 << (n - 1)) - 1) {
        return Err(Error::internal("Δ_n(V) is not Δ_n(W)^{2^{n-1}-1}"));
    }
    if n >= 3 {
        let mut rows = vec![u.clone(), v.clone()];
        for e in 1..=(n as u32 - 2) {
            rows.push(u.iter().map(|x| x.pow_p_iter(e)).collect());
        }
        if !moore::det(&ring, rows)?.is_one() {
            return Err(Error::internal("det(U, V, U^2, …) is not 1"));
        }
    }

    let q: Vec<Poly> = u.iter().zip(&v).map(|(a, b)| join_uv(a, b)).collect();
    let prompt = Prompt::new(q)?;
    check_det_one(&prompt)?;
    let want = predicted_lambda(n, w.d(), r);
    if prompt.lambda() != want {
        return Err(Error::internal(format!(
            "degree law: predicted λ = {want}, got {}",
            prompt.lambda()
        )));
    }
    Ok(Char2Construction {
        prompt,
        u,
        v,
        gamma,
        delta,
        r: r.clone(),
    })
}

/// For `n = 2`, the Bézout-derived `γ = V_1^2U_2 + V_2^2U_1` solves the same
/// congruences; returns it after checking it agrees with the CRT solution
/// modulo `Δ_2(W)`.
pub fn gamma_from_bezout(c: &Char2Construction) -> Result<Poly> {
    if c.v.len() != 2 {
        return Err(Error::PrecondViolation("n must be 2".into()));
    }
    let g = &(&c.v[0].pow(2) * &c.u[1]) + &(&c.v[1].pow(2) * &c.u[0]);
    if !(&g - &c.gamma).divisible_by(&c.delta)? {
        return Err(Error::internal("Bézout γ differs from the CRT γ"));
    }
    Ok(g)
}

/// Relation between two parameter sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WrRelation {
    Same,
    Equivalent(Fe),
    Distinct,
}

/// Compares `(W, R)` with `(W2, R2)` by the parameter rule, searching `b`
/// over the whole field.  For `n ≥ 3`, when both spaces have their poles in
/// the field the verdict is cross-checked against a pole-set equivalence
/// search.
pub fn wr_equivalence(w: &WTuple, r: &Poly, w2: &WTuple, r2: &Poly) -> Result<WrRelation> {
    let f = w.field();
    if w2.field() != f || w.n() != w2.n() {
        return Err(Error::SpecMismatch);
    }
    f.check_enumerable(crate::ff::DEFAULT_ENUM_BOUND)?;
    let span2 = w2.span_set();
    let rel = if w.span_set() == span2 && r == r2 {
        WrRelation::Same
    } else {
        let mut found = WrRelation::Distinct;
        for b in f.elements() {
            let s = &Poly::x(f) + &Poly::constant(f, f.mul(b, b));
            let moved: HashSet<Poly> = w.span_set().iter().map(|x| x.compose(&s)).collect();
            if moved == span2 && &(&r.compose(&s) + &Poly::constant(f, b)) == r2 {
                found = WrRelation::Equivalent(b);
                break;
            }
        }
        found
    };
    if w.n() >= 3 {
        cross_check_equivalence(w, r, w2, r2, &rel)?;
    }
    Ok(rel)
}

fn cross_check_equivalence(
    w: &WTuple,
    r: &Poly,
    w2: &WTuple,
    r2: &Poly,
    rel: &WrRelation,
) -> Result<()> {
    let build = |w: &WTuple, r: &Poly| -> Result<Option<lspace::LSpace>> {
        let c = general_construct(w, r)?;
        match lspace::build_space(&c.prompt) {
            Ok(s) => Ok(Some(s)),
            Err(Error::PolesOutsideField { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let (Some(s1), Some(s2)) = (build(w, r)?, build(w2, r2)?) else {
        return Ok(());
    };
    let witness = lspace::equivalence_witness(&s1, &s2)?;
    let consistent = match rel {
        WrRelation::Same => s1.poles() == s2.poles(),
        WrRelation::Equivalent(_) => witness.is_some(),
        WrRelation::Distinct => witness.is_none(),
    };
    if !consistent {
        return Err(Error::internal(format!(
            "parameter rule says {rel:?} but the pole-set search found {witness:?}"
        )));
    }
    Ok(())
}

/// Parameters of the étale pullback along `S` (with `S' = 1`):
/// `(W∘S, R∘S + √(S - X))`.
pub fn pullback_parameters(w: &WTuple, r: &Poly, s: &Poly) -> Result<(WTuple, Poly)> {
    let f = w.field();
    if !s.derivative().is_one() {
        return Err(Error::NonEtaleS);
    }
    let t = poly_sqrt(&(s - &Poly::x(f)))?;
    Ok((w.compose(s)?, &r.compose(s) + &t))
}

/// Checks that the construction from the pulled-back parameters equals the
/// pullback of the constructed prompt; returns the new construction.
pub fn pullback_closure(w: &WTuple, r: &Poly, s: &Poly) -> Result<Char2Construction> {
    let base = general_construct(w, r)?;
    let (w2, r2) = pullback_parameters(w, r, s)?;
    let lifted = general_construct(&w2, &r2)?;
    let (pulled, eta) = lspace::pullback_prompt(&base.prompt, s)?;
    if eta != Fe::ONE || pulled != lifted.prompt {
        return Err(Error::internal(
            "construction from pulled-back parameters differs from the pullback",
        ));
    }
    Ok(lifted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_of_linear_term() {
        let f = Field::parse("2^2/1,1,1").unwrap();
        let mu = f.mu().unwrap();
        let q = Poly::new(&f, vec![mu, f.mul(mu, mu)]);
        let (u, v) = split_uv(&q).unwrap();
        assert_eq!(v, Poly::constant(&f, mu));
        assert_eq!(u, Poly::constant(&f, f.mul(mu, mu)));
        assert_eq!(join_uv(&u, &v), q);
    }

    #[test]
    fn constant_w_gives_standard_f4_space() {
        let f = Field::parse("2^2/1,1,1").unwrap();
        let nu = f.mu().unwrap();
        let w = WTuple::new(vec![Poly::one(&f), Poly::constant(&f, nu)]).unwrap();
        let c = general_construct(&w, &Poly::zero(&f)).unwrap();
        let s = lspace::build_space(&c.prompt).unwrap();
        let mut nonzero: Vec<Fe> = f.elements().filter(|x| !x.is_zero()).collect();
        nonzero.sort();
        assert_eq!(s.poles(), nonzero.as_slice());
    }
}
