//! Logarithmic differential forms `f(X) dX` on the projective line:
//! the Jacobson–Cartier test, poles and residues, and the one-dimensional
//! criterion.
//!
//! A form is logarithmic (of the shape `dF/F`) exactly when `f` equals its
//! `(p-1)`-component in the decomposition `f = Σ f_i^p X^i`.  Because the
//! iterated derivative kills every `f_i^p X^i` with `i < p-1` and sends
//! `f_{p-1}^p X^{p-1}` to `(p-1)! f_{p-1}^p = -f_{p-1}^p`, this is the same as
//! `f^{(p-1)} = -f^p`.  That identity needs no roots, so it is the primary
//! test; the residue description (simple poles, residues in F_p, no pole
//! part at infinity) is an independent cross-check whenever the poles lie in
//! the working field.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ff::{Fe, Field};
use crate::poly::{elem_to_json, Poly, RatFun};

/// The differential form `f dX`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffForm {
    f: RatFun,
}

impl DiffForm {
    pub fn new(f: RatFun) -> Self {
        DiffForm { f }
    }

    /// `num/den dX`, reduced.
    pub fn from_parts(num: Poly, den: Poly) -> Result<Self> {
        Ok(DiffForm {
            f: RatFun::new(num, den)?,
        })
    }

    /// `dX / den`.
    pub fn reciprocal(den: &Poly) -> Result<Self> {
        Self::from_parts(Poly::one(den.field()), den.clone())
    }

    /// The logarithmic derivative `dF/F`.
    pub fn dlog(big_f: &Poly) -> Result<Self> {
        Self::from_parts(big_f.derivative(), big_f.clone())
    }

    pub fn f(&self) -> &RatFun {
        &self.f
    }

    pub fn field(&self) -> &Field {
        self.f.field()
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_zero()
    }

    pub fn scale(&self, s: Fe) -> DiffForm {
        DiffForm { f: self.f.scale(s) }
    }

    pub fn add(&self, o: &DiffForm) -> Result<DiffForm> {
        Ok(DiffForm {
            f: self.f.add(&o.f)?,
        })
    }

    /// Order at infinity: `deg den − deg num − 2` (`None` for the zero form).
    pub fn order_at_infinity(&self) -> Option<i64> {
        self.f.form_order_at_infinity()
    }

    pub fn to_json(&self) -> Value {
        self.f.to_json()
    }
}

/// Poles of a form with their residues, in field enumeration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueTable {
    pub entries: Vec<(Fe, Fe)>,
}

impl ResidueTable {
    pub fn poles(&self) -> Vec<Fe> {
        self.entries.iter().map(|&(x, _)| x).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Residue at `x` (zero if `x` is not a pole).
    pub fn residue_at(&self, x: Fe) -> Fe {
        self.entries
            .iter()
            .find(|&&(y, _)| y == x)
            .map_or(Fe::ZERO, |&(_, r)| r)
    }

    /// True when every residue lies in F_p^×.
    pub fn residues_in_prime_field(&self, f: &Field) -> bool {
        self.entries
            .iter()
            .all(|&(_, r)| !r.is_zero() && f.to_prime(r).is_some())
    }

    /// JSON rows `{"pole": coords, "res": int}`; residues outside F_p are
    /// written as coordinate lists.
    pub fn to_json(&self, f: &Field) -> Value {
        Value::Array(
            self.entries
                .iter()
                .map(|&(x, r)| {
                    let res = match f.to_prime(r) {
                        Some(v) => json!(v),
                        None => elem_to_json(f, r),
                    };
                    json!({"pole": elem_to_json(f, x), "res": res})
                })
                .collect(),
        )
    }
}

/// Poles (all required simple and inside the working field) with residues
/// `num(x)/den'(x)`.
pub fn poles_and_residues(w: &DiffForm) -> Result<ResidueTable> {
    let f = w.field();
    let num = w.f.num();
    let den = w.f.den();
    if den.is_constant() {
        return Ok(ResidueTable {
            entries: Vec::new(),
        });
    }
    let roots = den.roots_in_field()?;
    if let Some(&(x, _)) = roots.roots.iter().find(|&&(_, m)| m > 1) {
        return Err(Error::NonSimplePole(f.fmt_elem(x)));
    }
    if !roots.split {
        return Err(Error::PoleOutsideField);
    }
    let dd = den.derivative();
    let entries = roots
        .roots
        .iter()
        .map(|&(x, _)| Ok((x, f.div(num.eval(x), dd.eval(x))?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidueTable { entries })
}

/// Outcome of [`is_logarithmic`]: the verdict and both routes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogVerdict {
    pub logarithmic: bool,
    /// Derivative route `f^{(p-1)} = -f^p`.
    pub derivative_route: bool,
    /// Residue route, when the denominator splits in the working field.
    pub residue_route: Option<bool>,
}

/// The derivative test `f^{(p-1)} = -f^p` alone.
pub fn derivative_test(w: &DiffForm) -> bool {
    let p = w.field().p() as u64;
    let lhs = w.f.derivative_k((p - 1) as usize);
    let rhs = w.f.pow(p).neg();
    lhs == rhs
}

/// The residue test alone; `None` when the poles do not lie in the working
/// field.
pub fn residue_test(w: &DiffForm) -> Result<Option<bool>> {
    let f = w.field();
    let den = w.f.den();
    if den.is_constant() {
        return Ok(Some(false));
    }
    let roots = match den.roots_in_field() {
        Ok(r) => r,
        Err(Error::FieldTooLarge { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    if !roots.split {
        return Ok(None);
    }
    if !roots.all_simple() {
        return Ok(Some(false));
    }
    if w.f.num().degree_signed() > den.degree_signed() - 1 {
        return Ok(Some(false));
    }
    let table = poles_and_residues(w)?;
    Ok(Some(table.residues_in_prime_field(f)))
}

/// Decides logarithmicity by the derivative route and cross-checks with
/// the residue route when available.
pub fn is_logarithmic(w: &DiffForm) -> Result<LogVerdict> {
    if w.is_zero() {
        return Err(Error::ZeroForm);
    }
    let a = derivative_test(w);
    let b = residue_test(w)?;
    if let Some(b) = b {
        if a != b {
            return Err(Error::internal(format!(
                "derivative route says {a}, residue route says {b}"
            )));
        }
    }
    Ok(LogVerdict {
        logarithmic: a,
        derivative_route: a,
        residue_route: b,
    })
}

/// `(P^{p-1})^{(p-1)}`; `dX/P` is logarithmic iff this is the constant −1.
pub fn jc_value(p_poly: &Poly) -> Result<Poly> {
    if p_poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let p = p_poly.field().p() as u64;
    Ok(p_poly.pow(p - 1).derivative_k((p - 1) as usize))
}

/// The constant value of [`jc_value`], or `None` if it is not constant.
pub fn jc_check(p_poly: &Poly) -> Result<Option<Fe>> {
    Ok(jc_value(p_poly)?.as_constant())
}

/// Coefficient test for `dX/P` with `deg P = λ`: the coefficient of
/// `X^{p-1}` in `P^{p-1}` is 1 and those of `X^{μp-1}` vanish for
/// `2 ≤ μ ≤ λ + ⌊(1-λ)/p⌋`.  When `P` splits with simple roots the answer
/// is cross-checked against the residues `1/P'(x)` lying in F_p.
pub fn check_l_lambda_1(p_poly: &Poly, lambda: usize) -> Result<bool> {
    if p_poly.deg() != Some(lambda) || lambda == 0 {
        return Err(Error::DegreeMismatch(format!(
            "expected degree {lambda}, got {}",
            p_poly.degree_signed()
        )));
    }
    let f = p_poly.field();
    let p = f.p() as i64;
    let pw = p_poly.pow((p - 1) as u64);
    let top = lambda as i64 + (1 - lambda as i64).div_euclid(p);
    let mut ok = pw.coeff((p - 1) as usize) == Fe::ONE;
    for mu in 2..=top {
        if !pw.coeff((mu * p - 1) as usize).is_zero() {
            ok = false;
        }
    }
    if let Some(c) = jc_check(p_poly)? {
        if (c == f.neg(Fe::ONE)) != ok {
            return Err(Error::internal("coefficient test disagrees with derivative test"));
        }
    } else if ok {
        return Err(Error::internal("coefficient test passed with non-constant criterion"));
    }
    let roots = p_poly.roots_in_field()?;
    if roots.split && roots.all_simple() {
        let d = p_poly.derivative();
        let residues: Vec<(Fe, Fe)> = roots
            .roots
            .iter()
            .map(|&(x, _)| Ok((x, f.inv(d.eval(x))?)))
            .collect::<Result<_>>()?;
        // Vanishing at infinity to order λ−2: Σ a_i x_i^k = 0 for k ≤ λ−2.
        for k in 0..lambda.saturating_sub(1) {
            let s = residues.iter().fold(Fe::ZERO, |acc, &(x, a)| {
                f.add(acc, f.mul(a, f.pow_u(x, k as u64)))
            });
            if !s.is_zero() {
                return Err(Error::internal("power sums of residues do not vanish"));
            }
        }
        let in_fp = residues.iter().all(|&(_, a)| f.to_prime(a).is_some());
        if in_fp != ok {
            return Err(Error::internal("coefficient test disagrees with residues"));
        }
    }
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dx_over_x_is_logarithmic() {
        let f = Field::prime(5).unwrap();
        let w = DiffForm::reciprocal(&Poly::x(&f)).unwrap();
        assert!(is_logarithmic(&w).unwrap().logarithmic);
    }

    #[test]
    fn dx_is_not_logarithmic() {
        let f = Field::prime(5).unwrap();
        let w = DiffForm::new(RatFun::from_poly(Poly::one(&f)));
        assert!(!is_logarithmic(&w).unwrap().logarithmic);
    }

    #[test]
    fn residues_of_dx_over_x2_minus_1() {
        let f = Field::prime(3).unwrap();
        let w = DiffForm::reciprocal(&Poly::from_i64s(&f, &[-1, 0, 1])).unwrap();
        let t = poles_and_residues(&w).unwrap();
        assert_eq!(t.entries, vec![(Fe(1), Fe(2)), (Fe(2), Fe(1))]);
    }
}
