//! Pencils `P_j = (aP_0 + jP_∞)/(a+j)` attached to a two-dimensional prompt
//! and the residue-weighted power sums `N_j(r) = Σ_i h_{j,i} x_{j,i}^r` over
//! the roots of each member.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ff::{Fe, Field};
use crate::lspace::{gives_rise, Prompt};
use crate::poly::{elem_to_json, Poly};

/// The pencil spanned by two monic polynomials of the same degree λ, with
/// the ratio `a ∉ F_p` and scale `c` of a prompt `(−c·P_∞, a·c·P_0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilData {
    field: Field,
    p0: Poly,
    pinf: Poly,
    a: Fe,
    c: Fe,
    prompt: Option<Prompt>,
}

impl PencilData {
    /// Validates degrees, monicity and `a ∉ F_p`, `c ≠ 0`.
    pub fn new(p0: Poly, pinf: Poly, a: Fe, c: Fe) -> Result<Self> {
        let f = p0.field().clone();
        if pinf.field() != &f {
            return Err(Error::SpecMismatch);
        }
        if !p0.is_monic() || !pinf.is_monic() {
            return Err(Error::PrecondViolation("pencil generators must be monic".into()));
        }
        if p0.deg() != pinf.deg() || p0.deg().unwrap_or(0) == 0 {
            return Err(Error::DegreeMismatch(format!(
                "pencil generators have degrees {} and {}",
                p0.degree_signed(),
                pinf.degree_signed()
            )));
        }
        if f.to_prime(a).is_some() {
            return Err(Error::PrecondViolation("a must lie outside F_p".into()));
        }
        if c.is_zero() {
            return Err(Error::PrecondViolation("c must be nonzero".into()));
        }
        Ok(PencilData {
            field: f,
            p0,
            pinf,
            a,
            c,
            prompt: None,
        })
    }

    /// The pencil of a two-dimensional prompt `(Q_1, Q_2)`:
    /// `c = −lc(Q_1)`, `a = −lc(Q_2)/lc(Q_1)`, `P_∞ = Q_1/lc(Q_1)`,
    /// `P_0 = Q_2/lc(Q_2)`.
    pub fn from_prompt(q: &Prompt) -> Result<Self> {
        if q.n() != 2 {
            return Err(Error::PrecondViolation("two-dimensional prompt required".into()));
        }
        let f = q.field();
        let (q1, q2) = (&q.q()[0], &q.q()[1]);
        let c = f.neg(q1.lc());
        let a = f.neg(f.div(q2.lc(), q1.lc())?);
        let mut d = PencilData::new(q2.monic(), q1.monic(), a, c)?;
        d.prompt = Some(q.clone());
        Ok(d)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn p0(&self) -> &Poly {
        &self.p0
    }

    pub fn pinf(&self) -> &Poly {
        &self.pinf
    }

    pub fn a(&self) -> Fe {
        self.a
    }

    pub fn c(&self) -> Fe {
        self.c
    }

    pub fn lambda(&self) -> usize {
        self.p0.deg().unwrap_or(0)
    }

    pub fn prompt(&self) -> Option<&Prompt> {
        self.prompt.as_ref()
    }

    /// `Θ = P_∞ − P_0`.
    pub fn theta(&self) -> Poly {
        &self.pinf - &self.p0
    }

    /// `(aP_0 + tP_∞)` without normalisation.
    pub fn raw_member(&self, t: Fe) -> Poly {
        &self.p0.scale(self.a) + &self.pinf.scale(t)
    }

    /// `P_t = (aP_0 + tP_∞)/(a+t)` for `t ≠ −a`.
    pub fn member(&self, t: Fe) -> Result<Poly> {
        let f = &self.field;
        Ok(self.raw_member(t).scale(f.inv(f.add(self.a, t))?))
    }

    /// `P_j` for `j = 0, …, p−1`.
    pub fn members(&self) -> Result<Vec<(u32, Poly)>> {
        (0..self.field.p())
            .map(|j| Ok((j, self.member(self.field.from_i64(j as i64))?)))
            .collect()
    }

    /// True when `P_0, …, P_{p−1}, P_∞` are pairwise coprime.
    pub fn pairwise_coprime(&self) -> Result<bool> {
        let mut all: Vec<Poly> = self.members()?.into_iter().map(|(_, m)| m).collect();
        all.push(self.pinf.clone());
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                if !all[i].gcd(&all[j])?.is_one() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// True when all members share the coefficient of `X^{λ−1}`.
    pub fn shared_e1(&self) -> bool {
        let l = self.lambda();
        self.p0.coeff(l - 1) == self.pinf.coeff(l - 1)
    }

    pub fn to_json(&self) -> Value {
        let f = &self.field;
        json!({
            "field": f.spec().to_string(),
            "p0": self.p0.to_json(),
            "pinf": self.pinf.to_json(),
            "a": elem_to_json(f, self.a),
            "c": elem_to_json(f, self.c),
            "lambda": self.lambda(),
        })
    }
}

/// Roots, weights and power sums of one pencil member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberSums {
    pub j: u32,
    pub member: Poly,
    pub roots: Vec<Fe>,
    /// `h_{j,i} = a^{−(p−1)} c^{−p} (a+j)^{p−2} / (P_j'(x) Θ^{p−1}(x))`.
    pub h: Vec<Fe>,
    /// `N_j(0), …, N_j(max_r)`.
    pub sums: Vec<Fe>,
}

/// Output of [`newton_toolkit`]: per-member data and named checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonReport {
    pub max_r: usize,
    pub members: Vec<MemberSums>,
    pub checks: Vec<(String, bool)>,
}

impl NewtonReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn check(&self, name: &str) -> Option<bool> {
        self.checks.iter().find(|(n, _)| n == name).map(|&(_, ok)| ok)
    }

    pub fn to_json(&self, f: &Field) -> Value {
        json!({
            "schema": "lform.newton/1",
            "max_r": self.max_r,
            "all_hold": self.all_hold(),
            "checks": self.checks.iter().map(|(n, ok)| json!({"name": n, "holds": ok})).collect::<Vec<_>>(),
            "members": self.members.iter().map(|m| json!({
                "j": m.j,
                "member": m.member.to_json(),
                "roots": m.roots.iter().map(|&x| elem_to_json(f, x)).collect::<Vec<_>>(),
                "h": m.h.iter().map(|&x| f.to_signed(x).map_or_else(|| elem_to_json(f, x), |v| json!(v))).collect::<Vec<_>>(),
                "sums": m.sums.iter().map(|&x| elem_to_json(f, x)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Default range of power sums: `3λp`.
pub fn default_max_r(d: &PencilData) -> usize {
    3 * d.lambda() * d.field.p() as usize
}

fn power_sum(f: &Field, w: &[Fe], x: &[Fe], k: u64) -> Fe {
    w.iter()
        .zip(x)
        .fold(Fe::ZERO, |acc, (&wi, &xi)| f.add(acc, f.mul(wi, f.pow_u(xi, k))))
}

/// Computes the weights `h_{j,i}` and sums `N_j(r)` for `r ≤ max_r` and
/// checks, for every member `P_j`:
/// * `h_{j,i} ∈ F_p^×`;
/// * `Σ_i h Θ^{p−1} x^k = 0` for `k ≤ λ−2`;
/// * `Σ_i h Θ^{p−1} x^{λ−1} = (a+j)^{p−2}/(a^{p−1}c^p)`;
/// * `Σ_i h Θ(x) = 0`;
/// * `Σ_i 1/(P_j'(x) Θ^{p−2}(x)) = 0`;
/// * the linear recursion with the coefficients of `P_j` annihilates
///   `N_j`, and `N_j(pr) = N_j(r)^p`;
/// * when the pencil came from a prompt, `h_{j,i}` is the residue of
///   `ω_2 = −Q_1/P dX` at `x_{j,i}` and `P` is a constant multiple of
///   `P_∞ Π_j P_j`.
pub fn newton_toolkit(d: &PencilData, max_r: Option<usize>) -> Result<NewtonReport> {
    let f = &d.field;
    let p = f.p() as u64;
    let lambda = d.lambda();
    let max_r = max_r.unwrap_or_else(|| default_max_r(d));
    let theta = d.theta();
    if theta.is_zero() {
        return Err(Error::PrecondViolation("Θ = P_∞ − P_0 vanishes".into()));
    }
    let mut checks: Vec<(String, bool)> = Vec::new();
    let mut ok = std::collections::BTreeMap::<&str, bool>::new();
    let mut note = |name: &'static str, v: bool| {
        let e = ok.entry(name).or_insert(true);
        *e &= v;
    };
    let base = f.mul(
        f.inv(f.pow_u(d.a, p - 1))?,
        f.inv(f.pow_u(d.c, p))?,
    );
    let residue_source = match &d.prompt {
        Some(q) => {
            let rise = gives_rise(q)?;
            Some((rise.p_poly.clone(), rise.p_poly.derivative(), q.q()[0].clone()))
        }
        None => None,
    };
    let mut members = Vec::new();
    for (j, pj) in d.members()? {
        let roots = pj.roots_in_field()?;
        if !roots.all_simple() {
            return Err(Error::RepeatedRoot);
        }
        if !roots.split {
            return Err(Error::NonSplitPencil);
        }
        let xs = roots.distinct();
        let dpj = pj.derivative();
        let aj = f.add(d.a, f.from_i64(j as i64));
        let k_j = f.mul(base, f.pow_u(aj, p - 2));
        let mut h = Vec::with_capacity(xs.len());
        let mut th = Vec::with_capacity(xs.len());
        for &x in &xs {
            let t = theta.eval(x);
            if t.is_zero() {
                return Err(Error::PrecondViolation("Θ vanishes at a root of the pencil".into()));
            }
            th.push(t);
            let den = f.mul(dpj.eval(x), f.pow_u(t, p - 1));
            h.push(f.div(k_j, den)?);
        }
        note("h_in_prime_field", h.iter().all(|&v| !v.is_zero() && f.to_prime(v).is_some()));

        let w1: Vec<Fe> = h.iter().zip(&th).map(|(&hi, &ti)| f.mul(hi, f.pow_u(ti, p - 1))).collect();
        for k in 0..lambda.saturating_sub(1) {
            note("sum_vanishing", power_sum(f, &w1, &xs, k as u64).is_zero());
        }
        note(
            "sum_top",
            power_sum(f, &w1, &xs, lambda as u64 - 1) == f.div(f.pow_u(aj, p - 2), f.mul(f.pow_u(d.a, p - 1), f.pow_u(d.c, p)))?,
        );
        let w3: Vec<Fe> = h.iter().zip(&th).map(|(&hi, &ti)| f.mul(hi, ti)).collect();
        note("sum_theta", power_sum(f, &w3, &xs, 0).is_zero());
        let s4 = xs.iter().zip(&th).try_fold(Fe::ZERO, |acc, (&x, &t)| -> Result<Fe> {
            Ok(f.add(acc, f.inv(f.mul(dpj.eval(x), f.pow_u(t, p - 2)))?))
        })?;
        note("sum_reciprocal", s4.is_zero());

        let sums: Vec<Fe> = (0..=max_r).map(|r| power_sum(f, &h, &xs, r as u64)).collect();
        let rec_ok = (0..=max_r.saturating_sub(lambda)).all(|k| {
            (0..=lambda)
                .fold(Fe::ZERO, |acc, m| f.add(acc, f.mul(pj.coeff(m), sums[k + m])))
                .is_zero()
        });
        note("recursion", rec_ok);
        let frob_ok = (0..=max_r / p as usize).all(|r| sums[r * p as usize] == f.pow_u(sums[r], p));
        note("frobenius_sums", frob_ok);

        if let Some((pp, dpp, q1)) = &residue_source {
            let res_ok = xs.iter().zip(&h).all(|(&x, &hi)| {
                f.div(f.neg(q1.eval(x)), dpp.eval(x)).map_or(false, |r| r == hi)
            });
            note("h_matches_residues", res_ok);
            let _ = pp;
        }
        members.push(MemberSums {
            j,
            member: pj,
            roots: xs,
            h,
            sums,
        });
    }
    if let Some((pp, _, _)) = &residue_source {
        let prod = members
            .iter()
            .fold(d.pinf.clone(), |acc, m| &acc * &m.member);
        let (qt, r) = pp.divrem(&prod)?;
        note("pole_polynomial_factorization", r.is_zero() && qt.is_constant());
    }
    note("shared_e1", d.shared_e1());
    for (name, v) in ok {
        checks.push((name.to_string(), v));
    }
    Ok(NewtonReport {
        max_r,
        members,
        checks,
    })
}

/// Top coefficient of the minimal Bézout cofactor against the residue sum:
/// with `A·U + B·V = 1`, `deg U < deg B` and `B` split with simple roots
/// `x_i`, `u_{b−1} = lc(B)·Σ_i 1/(A(x_i) B'(x_i))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GcdexCheck {
    pub top: Fe,
    pub residue_sum: Fe,
    pub holds: bool,
}

pub fn gcdex_leading_check(a: &Poly, b: &Poly) -> Result<GcdexCheck> {
    let f = a.field();
    let bd = b
        .deg()
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::PrecondViolation("B must have positive degree".into()))?;
    let (g, u, _v) = a.gcd_ext(b)?;
    if !g.is_one() {
        return Err(Error::PrecondViolation("A and B are not coprime".into()));
    }
    let roots = b.roots_in_field()?;
    if !roots.split {
        return Err(Error::PrecondViolation("B does not split in the working field".into()));
    }
    if !roots.all_simple() {
        return Err(Error::RepeatedRoot);
    }
    let db = b.derivative();
    let mut sum = Fe::ZERO;
    for x in roots.distinct() {
        sum = f.add(sum, f.inv(f.mul(a.eval(x), db.eval(x)))?);
    }
    let residue_sum = f.mul(b.lc(), sum);
    let top = u.coeff(bd - 1);
    Ok(GcdexCheck {
        top,
        residue_sum,
        holds: top == residue_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcdex_trivial_case() {
        let f = Field::prime(5).unwrap();
        let c = gcdex_leading_check(&Poly::one(&f), &Poly::x(&f)).unwrap();
        assert!(c.holds);
        assert_eq!(c.top, Fe::ONE);
    }

    #[test]
    fn pencil_rejects_prime_ratio() {
        let f = Field::prime(5).unwrap();
        let x = Poly::x(&f);
        assert!(PencilData::new(x.clone(), x, Fe::ONE, Fe::ONE).is_err());
    }
}
