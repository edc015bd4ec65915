//! Discriminants of linear pencils of polynomials, computed exactly as
//! polynomials in the pencil parameter and cross-checked by interpolation.

use serde_json::{json, Value};

use crate::classify::newton::PencilData;
use crate::error::{Error, Result};
use crate::ff::{Fe, Field};
use crate::moore::{det, PolyRing};
use crate::poly::Poly;

/// Discriminant in degree `d` of `F = Σ_i c_i(Z) X^i`, whose coefficients
/// are polynomials in a parameter `Z`, as a polynomial in `Z`:
/// `(-1)^{d(d-1)/2} Res_{d,d-1}(F, F') / c_d`, the Sylvester determinant
/// being evaluated exactly over `k[Z]`.
pub fn disc_over_parameter(f: &Field, coeffs: &[Poly], d: usize) -> Result<Poly> {
    if d < 1 {
        return Err(Error::DegreeTooSmall);
    }
    if coeffs.len() > d + 1 {
        return Err(Error::DegreeMismatch("stated degree below actual degree".into()));
    }
    let zero = Poly::zero(f);
    let c = |i: usize| coeffs.get(i).cloned().unwrap_or_else(|| zero.clone());
    let dc = |i: usize| c(i + 1).scale(f.from_i64(i as i64 + 1));
    let (da, db) = (d, d - 1);
    let n = da + db;
    let mut m = vec![vec![zero.clone(); n]; n];
    for (i, row) in m.iter_mut().enumerate().take(db) {
        for j in 0..=da {
            row[i + j] = c(da - j);
        }
    }
    for i in 0..da {
        for j in 0..=db {
            m[db + i][i + j] = dc(db - j);
        }
    }
    let res = det(&PolyRing::new(f), m)?;
    let lead = c(d);
    if lead.is_zero() {
        return Err(Error::DegreeTooSmall);
    }
    let mut v = res.div_exact(&lead)?;
    if (d * (d - 1) / 2) % 2 == 1 {
        v = -v;
    }
    Ok(v)
}

/// Number of distinct roots of `q` over the algebraic closure.
pub fn reduced_degree(q: &Poly) -> Result<usize> {
    let d = q.deg().ok_or(Error::ZeroPolynomial)?;
    if d == 0 {
        return Ok(0);
    }
    let dq = q.derivative();
    if dq.is_zero() {
        return Err(Error::PrecondViolation("polynomial is a p-th power".into()));
    }
    Ok(d - q.gcd(&dq)?.deg().unwrap_or(0))
}

fn first_nodes(f: &Field, count: usize, avoid: Option<Fe>) -> Result<Vec<Fe>> {
    let nodes: Vec<Fe> = f
        .elements()
        .filter(|&t| Some(t) != avoid)
        .take(count)
        .collect();
    if nodes.len() < count {
        return Err(Error::InterpolationShortfall);
    }
    Ok(nodes)
}

/// Result of [`pencil_disc`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilDisc {
    /// `D(Z) = Disc_{deg P}(P − ZQ)`.
    pub d: Poly,
    /// `deg P + rdeg Q − 1`.
    pub expected_degree: usize,
    pub degree_ok: bool,
    /// The monic numerator `A = (P∧P')·N_0` of `(P/Q)'` reduced by `Q`.
    pub a_poly: Poly,
    /// Whether `D` equals `lc(D)·Π(Z − P(x)/Q(x))` over the roots `x` of
    /// `A` with multiplicity; `None` when `A` does not split.
    pub roots_check: Option<bool>,
}

impl PencilDisc {
    pub fn to_json(&self) -> Value {
        json!({
            "D": self.d.to_json(),
            "degree": self.d.degree_signed(),
            "expected_degree": self.expected_degree,
            "degree_ok": self.degree_ok,
            "A": self.a_poly.to_json(),
            "roots_check": self.roots_check,
        })
    }
}

/// Discriminant of the pencil `P − ZQ` for coprime `P, Q` with
/// `0 ≤ deg Q < deg P < p`.  The exact determinant is cross-checked against
/// interpolation through `deg P + deg Q + 1` evaluations.
pub fn pencil_disc(p: &Poly, q: &Poly) -> Result<PencilDisc> {
    let f = p.field();
    if q.field() != f {
        return Err(Error::SpecMismatch);
    }
    let dp = p
        .deg()
        .ok_or_else(|| Error::PrecondViolation("P must be nonzero".into()))?;
    let dq = q
        .deg()
        .ok_or_else(|| Error::PrecondViolation("Q must be nonzero".into()))?;
    if !(dq < dp && dp < f.p() as usize) {
        return Err(Error::PrecondViolation(format!(
            "need 0 ≤ deg Q < deg P < p, got deg Q = {dq}, deg P = {dp}"
        )));
    }
    if !p.gcd(q)?.is_one() {
        return Err(Error::PrecondViolation("P and Q are not coprime".into()));
    }
    let coeffs: Vec<Poly> = (0..=dp)
        .map(|i| Poly::new(f, vec![p.coeff(i), f.neg(q.coeff(i))]))
        .collect();
    let d = disc_over_parameter(f, &coeffs, dp)?;

    let nodes = first_nodes(f, dp + dq + 1, None)?;
    let pts = nodes
        .iter()
        .map(|&z| Ok((z, (p - &q.scale(z)).disc_in_degree(dp)?)))
        .collect::<Result<Vec<_>>>()?;
    if Poly::interpolate(f, &pts)? != d {
        return Err(Error::internal("pencil discriminant: determinant and interpolation disagree"));
    }

    let expected_degree = dp + reduced_degree(q)? - 1;
    let degree_ok = d.deg() == Some(expected_degree);

    let n = &(&p.derivative() * q) - &(p * &q.derivative());
    let g1 = p.gcd(&p.derivative())?;
    let g2 = if dq == 0 { Poly::one(f) } else { q.gcd(&q.derivative())? };
    let n0 = n.div_exact(&(&g1 * &g2))?;
    let a_poly = (&g1 * &n0).monic();
    let roots = a_poly.roots_in_field()?;
    let roots_check = if roots.split {
        let mut values = Vec::new();
        for &(x, m) in &roots.roots {
            let v = f.div(p.eval(x), q.eval(x))?;
            values.extend(std::iter::repeat(v).take(m));
        }
        Some(!d.is_zero() && d.monic() == Poly::from_roots(f, &values))
    } else {
        None
    };
    Ok(PencilDisc {
        d,
        expected_degree,
        degree_ok,
        a_poly,
        roots_check,
    })
}

/// Result of [`disc_pencil_pt`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilDiscT {
    /// `R(t) = (a+t)^{2λ−3} Disc(P_t)`, computed exactly.
    pub r: Poly,
    /// `R` interpolated from `2λ−2` samples of `Disc(P_t)`.
    pub r_interpolated: Poly,
    pub bound: usize,
    pub degree_bound_ok: bool,
    pub interpolation_agrees: bool,
    /// Additional samples beyond the interpolation nodes checked against
    /// the exact `R`.
    pub extra_samples_checked: usize,
}

impl PencilDiscT {
    pub fn to_json(&self) -> Value {
        json!({
            "R": self.r.to_json(),
            "degree": self.r.degree_signed(),
            "bound": self.bound,
            "degree_bound_ok": self.degree_bound_ok,
            "R_interpolated": self.r_interpolated.to_json(),
            "interpolation_agrees": self.interpolation_agrees,
            "extra_samples_checked": self.extra_samples_checked,
        })
    }
}

/// `Disc(P_t)·(a+t)^{2λ−3}` for the pencil `P_t = (aP_0 + tP_∞)/(a+t)`:
/// exactly as `Disc_λ(aP_0 + tP_∞)/(a+t)` over `k[t]`, and by
/// interpolation from `2λ−2` sample values `t ≠ −a` taken in field
/// enumeration order.  Up to four further samples, when available, are
/// compared with the exact polynomial.
pub fn disc_pencil_pt(d: &PencilData) -> Result<PencilDiscT> {
    let f = d.field();
    let lambda = d.lambda();
    if lambda < 2 {
        return Err(Error::PrecondViolation("λ ≥ 2 required".into()));
    }
    let coeffs: Vec<Poly> = (0..=lambda)
        .map(|i| Poly::new(f, vec![f.mul(d.a(), d.p0().coeff(i)), d.pinf().coeff(i)]))
        .collect();
    let e = disc_over_parameter(f, &coeffs, lambda)?;
    let at = Poly::new(f, vec![d.a(), Fe::ONE]);
    let r = e.div_exact(&at).map_err(|_| {
        Error::internal("Disc(aP_0 + tP_∞) is not divisible by a + t")
    })?;
    let bound = 2 * lambda - 3;
    let minus_a = f.neg(d.a());
    let count = 2 * lambda - 2;
    let avail: Vec<Fe> = f
        .elements()
        .filter(|&t| t != minus_a)
        .take(count + 4)
        .collect();
    if avail.len() < count {
        return Err(Error::InterpolationShortfall);
    }
    let sample = |t: Fe| -> Result<Fe> {
        let disc = d.member(t)?.disc_in_degree(lambda)?;
        Ok(f.mul(disc, f.pow_u(f.add(d.a(), t), bound as u64)))
    };
    let pts = avail[..count]
        .iter()
        .map(|&t| Ok((t, sample(t)?)))
        .collect::<Result<Vec<_>>>()?;
    let r_interpolated = Poly::interpolate(f, &pts)?;
    let mut extra = 0;
    for &t in &avail[count..] {
        if sample(t)? != r.eval(t) {
            return Err(Error::internal("sampled pencil discriminant disagrees with exact value"));
        }
        extra += 1;
    }
    for &(t, v) in &pts {
        if r.eval(t) != v {
            return Err(Error::internal("sampled pencil discriminant disagrees with exact value"));
        }
    }
    let degree_bound_ok = r.deg().map_or(true, |g| g <= bound);
    Ok(PencilDiscT {
        interpolation_agrees: r_interpolated == r,
        r,
        r_interpolated,
        bound,
        degree_bound_ok,
        extra_samples_checked: extra,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_pencil_over_f5() {
        let f = Field::prime(5).unwrap();
        let p = Poly::from_i64s(&f, &[0, 0, 1]);
        let r = pencil_disc(&p, &Poly::one(&f)).unwrap();
        assert_eq!(r.d.deg(), Some(1));
        assert_eq!(r.d.eval(Fe::ZERO), Fe::ZERO);
        assert_eq!(r.roots_check, Some(true));
    }
}
