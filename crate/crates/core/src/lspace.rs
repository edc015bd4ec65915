//! Spaces of logarithmic differential forms built from prompts.
//!
//! A *prompt* is an n-tuple `Q = (Q_1, …, Q_n)` of polynomials of a common
//! degree λ whose leading coefficients are F_p-independent.  It gives rise
//! to `P = Δ_n(Q)`, the signed minors `P_i = (-1)^{i-1} Δ_{n-1}(Q̂_i)` and the
//! forms `ω_i = P_i/P dX`.  The span of the ω_i is a space of logarithmic
//! forms (with `λ(p^n-1)/(p-1)` simple poles, each nonzero form having a
//! single zero at infinity) exactly when one of them — equivalently
//! `ω_n = dX/(P/P_n)` — is logarithmic.
//!
//! # Scaling
//!
//! Replacing `Q` by `cQ` multiplies `P` by `c^{1+p+…+p^{n-1}}` and `P_n` by
//! `c^{1+p+…+p^{n-2}}`, so `P/P_n` picks up `c^{p^{n-1}}` and the criterion
//! value `d = ((P/P_n)^{p-1})^{(p-1)}` picks up `c^{p^{n-1}(p-1)}`.  A prompt
//! whose criterion value is a nonzero constant `d` therefore becomes a genuine
//! prompt after scaling by any `c` with `c^{p^{n-1}(p-1)} = -1/d`.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde_json::{json, Value};

use crate::cartier::{self, DiffForm, ResidueTable};
use crate::error::{Error, Result};
use crate::ff::{Fe, Field};
use crate::linalg;
use crate::moore::{self, PolyRing, MAX_TUPLE};
use crate::poly::{elem_to_json, Poly, RatFun};

/// JSON schema tag for prompts.
pub const PROMPT_SCHEMA: &str = "lform.prompt/1";
/// JSON schema tag for built spaces.
pub const SPACE_SCHEMA: &str = "lform.space/1";

/// Upper bound on the degree of `Δ_n(P_1, …, P_n)` for which the
/// `Δ_n(P_i) = P^{1+p+…+p^{n-2}}` identity is checked during construction.
const MOORE_P_CHECK_DEGREE: usize = 4000;

/// An n-tuple of degree-λ polynomials with F_p-independent leading
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prompt {
    field: Field,
    q: Vec<Poly>,
    lambda: usize,
}

impl Prompt {
    /// Validates the prompt invariants.
    pub fn new(q: Vec<Poly>) -> Result<Self> {
        let first = q.first().ok_or(Error::TupleTooSmall(1))?;
        if q.len() > MAX_TUPLE {
            return Err(Error::TupleTooLarge(MAX_TUPLE));
        }
        let field = first.field().clone();
        let lambda = first
            .deg()
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::DegreeMismatch("prompt entries must have degree ≥ 1".into()))?;
        for qi in &q {
            if qi.field() != &field {
                return Err(Error::SpecMismatch);
            }
            if qi.deg() != Some(lambda) {
                return Err(Error::DegreeMismatch(format!(
                    "prompt entries have degrees {:?}",
                    q.iter().map(Poly::degree_signed).collect::<Vec<_>>()
                )));
            }
        }
        let lcs: Vec<Fe> = q.iter().map(Poly::lc).collect();
        if moore::moore_det(&field, &lcs)?.is_zero() {
            return Err(Error::DependentLeadingCoeffs);
        }
        Ok(Prompt { field, q, lambda })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> &[Poly] {
        &self.q
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    /// Number of poles of the space: `λ(p^n-1)/(p-1)`.
    pub fn expected_pole_count(&self) -> usize {
        self.lambda * moore::geometric(self.p() as u64, self.n() as i64 - 1) as usize
    }

    /// `cQ`.
    pub fn scale(&self, c: Fe) -> Result<Prompt> {
        Prompt::new(self.q.iter().map(|x| x.scale(c)).collect())
    }

    /// `Q·M` for an invertible matrix over F_p.
    pub fn apply_matrix(&self, m: &[Vec<i64>]) -> Result<Prompt> {
        check_matrix(self.p(), self.n(), m)?;
        Prompt::new(moore::apply_matrix(&PolyRing::new(&self.field), &self.q, m))
    }

    /// Coefficients raised to the p-th power.
    pub fn frobenius(&self) -> Prompt {
        Prompt {
            field: self.field.clone(),
            q: self.q.iter().map(|x| x.frob_coeffs(1)).collect(),
            lambda: self.lambda,
        }
    }

    /// `(ηQ_1(S), …, ηQ_n(S))`.
    pub fn compose(&self, s: &Poly, eta: Fe) -> Result<Prompt> {
        Prompt::new(self.q.iter().map(|x| x.compose(s).scale(eta)).collect())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": PROMPT_SCHEMA,
            "field": self.field.spec().to_string(),
            "n": self.n(),
            "lambda": self.lambda,
            "Q": self.q.iter().map(Poly::to_json).collect::<Vec<_>>(),
        })
    }

    /// Reads `{"Q": [poly, …]}`, a bare array of polynomials, or an array of
    /// coefficient lists (the field must then be supplied).
    pub fn from_json(v: &Value, field: Option<&Field>) -> Result<Prompt> {
        let owned;
        let field = match (field, v.get("field").and_then(Value::as_str)) {
            (Some(f), _) => Some(f),
            (None, Some(s)) => {
                owned = Field::parse(s)?;
                Some(&owned)
            }
            (None, None) => None,
        };
        let arr = v
            .get("Q")
            .unwrap_or(v)
            .as_array()
            .ok_or_else(|| Error::MalformedInput("prompt must be a list of polynomials".into()))?;
        let q = arr
            .iter()
            .map(|e| Poly::from_json(e, field))
            .collect::<Result<Vec<_>>>()?;
        Prompt::new(q)
    }
}

fn check_matrix(p: u32, n: usize, m: &[Vec<i64>]) -> Result<()> {
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::MalformedInput(format!("matrix must be {n}×{n}")));
    }
    if linalg::det_mod_p(p as i64, m) == 0 {
        return Err(Error::SingularMatrix);
    }
    Ok(())
}

/// `P = Δ_n(Q)`, the signed minors `P_i`, and the forms `ω_i = P_i/P dX`.
#[derive(Clone, Debug)]
pub struct Rise {
    pub p_poly: Poly,
    pub pi: Vec<Poly>,
    pub forms: Vec<DiffForm>,
}

/// Computes what a prompt gives rise to, checking
/// `Δ_n(P_1, …, P_n) = P^{1+p+…+p^{n-2}}` when affordable.
pub fn gives_rise(q: &Prompt) -> Result<Rise> {
    let ring = PolyRing::new(q.field());
    let p_poly = moore::moore_det(&ring, q.q())?;
    let pi = if q.n() == 1 {
        vec![Poly::one(q.field())]
    } else {
        moore::minor_map(&ring, q.q())?
    };
    let p = q.p() as u64;
    let n = q.n();
    if n >= 2 {
        let deg_pi = pi[0].deg().unwrap_or(0);
        let deg_check = deg_pi * moore::geometric(p, n as i64 - 1) as usize;
        if deg_check <= MOORE_P_CHECK_DEGREE {
            let lhs = moore::moore_det(&ring, &pi)?;
            let rhs = p_poly.pow(moore::geometric(p, n as i64 - 2));
            if lhs != rhs {
                return Err(Error::internal("Δ_n(P_i) differs from P^{1+…+p^{n-2}}"));
            }
        }
    }
    let forms = pi
        .iter()
        .map(|x| DiffForm::from_parts(x.clone(), p_poly.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Rise { p_poly, pi, forms })
}

/// Outcome of the coefficient criterion.
#[derive(Clone, Debug)]
pub struct CoeffVerdict {
    pub holds: bool,
    /// `P/P_n`.
    pub quotient: Poly,
    /// `((P/P_n)^{p-1})^{(p-1)}`; the criterion holds iff this is −1.
    pub criterion: Poly,
}

/// Coefficient criterion: in `(P/P_n)^{p-1}` the coefficient of `X^{p-1}` is
/// 1 and those of `X^{μp-1}` vanish for every `μ ≥ 2` in range.
pub fn verify_prompt_coeff(q: &Prompt) -> Result<CoeffVerdict> {
    let rise = gives_rise(q)?;
    let pn = rise.pi.last().expect("n ≥ 1");
    let quotient = rise.p_poly.div_exact(pn)?;
    let p = q.p() as usize;
    let r = quotient.pow((p - 1) as u64);
    let deg_r = r.deg().unwrap_or(0);
    let mut holds = r.coeff(p - 1) == Fe::ONE;
    for mu in 2..=(deg_r + 1) / p {
        if !r.coeff(mu * p - 1).is_zero() {
            holds = false;
        }
    }
    let criterion = r.derivative_k(p - 1);
    let minus_one = Poly::constant(q.field(), q.field().neg(Fe::ONE));
    if holds != (criterion == minus_one) {
        return Err(Error::internal("coefficient system disagrees with the derivative"));
    }
    Ok(CoeffVerdict {
        holds,
        quotient,
        criterion,
    })
}

/// Outcome of the determinant criterion.
#[derive(Clone, Debug)]
pub struct DetVerdict {
    pub holds: bool,
    /// `det(Q', Q, Q^p, …, Q^{p^{n-2}})`.
    pub det: Poly,
    /// `(det · P^{p-2})^{(p-2)}`; the criterion holds iff this is 1.
    pub value: Poly,
}

/// Determinant criterion: `(det(Q', Q, …, Q^{p^{n-2}}) · Δ_n(Q)^{p-2})^{(p-2)} = 1`.
pub fn verify_prompt_det(q: &Prompt) -> Result<DetVerdict> {
    let ring = PolyRing::new(q.field());
    let n = q.n();
    let p = q.p() as u64;
    let mut rows: Vec<Vec<Poly>> = vec![q.q().iter().map(Poly::derivative).collect()];
    for e in 0..n.saturating_sub(1) as u32 {
        rows.push(q.q().iter().map(|x| x.pow_p_iter(e)).collect());
    }
    let det = moore::det(&ring, rows)?;
    let big_p = moore::moore_det(&ring, q.q())?;
    let value = (&det * &big_p.pow(p - 2)).derivative_k((p - 2) as usize);
    Ok(DetVerdict {
        holds: value.is_one(),
        det,
        value,
    })
}

/// Both criteria, checked against each other.
#[derive(Clone, Debug)]
pub struct PromptReport {
    pub holds: bool,
    pub coeff: CoeffVerdict,
    pub det: DetVerdict,
}

/// Runs both criteria and fails with an internal inconsistency if they
/// disagree; their criterion polynomials must satisfy `coeff = -det`.
pub fn verify_prompt(q: &Prompt) -> Result<PromptReport> {
    let coeff = verify_prompt_coeff(q)?;
    let det = verify_prompt_det(q)?;
    if coeff.criterion != -&det.value {
        return Err(Error::internal(
            "coefficient criterion polynomial is not the negated determinant criterion",
        ));
    }
    if coeff.holds != det.holds {
        return Err(Error::internal("coefficient and determinant criteria disagree"));
    }
    Ok(PromptReport {
        holds: coeff.holds,
        coeff,
        det,
    })
}

/// A scaling constant and the rescaled prompt.
#[derive(Clone, Debug)]
pub struct Scaling {
    /// The constant criterion value `d` before scaling.
    pub d: Fe,
    pub c: Fe,
    pub prompt: Prompt,
}

/// Solves `c^{p^{n-1}(p-1)} = -1/d` for a prompt whose criterion value `d`
/// is a nonzero constant; the root chosen is the first in enumeration order.
pub fn solve_scaling(q: &Prompt) -> Result<Scaling> {
    let v = verify_prompt_coeff(q)?;
    let d = v.criterion.as_constant().ok_or(Error::NotConstantCriterion)?;
    if d.is_zero() {
        return Err(Error::ZeroCriterion);
    }
    let f = q.field();
    let target = f.neg(f.inv(d)?);
    let p = q.p() as u64;
    let e = p.pow(q.n() as u32 - 1) * (p - 1);
    let c = f.nth_root(target, e).ok_or_else(|| {
        Error::RequiresExtension(format!(
            "no c with c^{e} = {} in {}",
            f.fmt_elem(target),
            f.spec()
        ))
    })?;
    let prompt = q.scale(c)?;
    Ok(Scaling { d, c, prompt })
}

/// A verified space with its poles, residues and audit results.
#[derive(Clone, Debug)]
pub struct LSpace {
    prompt: Prompt,
    p_poly: Poly,
    pi: Vec<Poly>,
    forms: Vec<DiffForm>,
    poles: Vec<Fe>,
    /// `res[k][i]` is the residue of `ω_i` at `poles[k]`, as an integer mod p.
    res: Vec<Vec<u32>>,
}

impl LSpace {
    pub fn prompt(&self) -> &Prompt {
        &self.prompt
    }

    pub fn field(&self) -> &Field {
        self.prompt.field()
    }

    pub fn p(&self) -> u32 {
        self.prompt.p()
    }

    pub fn n(&self) -> usize {
        self.prompt.n()
    }

    pub fn lambda(&self) -> usize {
        self.prompt.lambda()
    }

    /// `P = Δ_n(Q)`.
    pub fn p_poly(&self) -> &Poly {
        &self.p_poly
    }

    /// The signed minors `P_i`.
    pub fn pi(&self) -> &[Poly] {
        &self.pi
    }

    /// The basis forms `ω_i`.
    pub fn forms(&self) -> &[DiffForm] {
        &self.forms
    }

    /// Poles in enumeration order.
    pub fn poles(&self) -> &[Fe] {
        &self.poles
    }

    /// Residue vector `(res_x ω_1, …, res_x ω_n)` of every pole.
    pub fn residue_matrix(&self) -> &[Vec<u32>] {
        &self.res
    }

    /// Residue vector at `x` (`None` if `x` is not a pole).
    pub fn residues_at(&self, x: Fe) -> Option<&[u32]> {
        self.poles
            .iter()
            .position(|&y| y == x)
            .map(|k| self.res[k].as_slice())
    }

    /// Residue table of `ω_i` (0-based `i`).
    pub fn residue_table(&self, i: usize) -> ResidueTable {
        let f = self.field();
        ResidueTable {
            entries: self
                .poles
                .iter()
                .zip(&self.res)
                .filter(|(_, r)| r[i] != 0)
                .map(|(&x, r)| (x, f.from_i64(r[i] as i64)))
                .collect(),
        }
    }

    /// Poles of the form `Σ ε_i ω_i`.
    pub fn poles_of(&self, eps: &[i64]) -> Vec<Fe> {
        let p = self.p() as i64;
        self.poles
            .iter()
            .zip(&self.res)
            .filter(|(_, r)| {
                r.iter()
                    .zip(eps)
                    .map(|(&a, &e)| a as i64 * e)
                    .sum::<i64>()
                    .rem_euclid(p)
                    != 0
            })
            .map(|(&x, _)| x)
            .collect()
    }

    /// The form `Σ ε_i ω_i`.
    pub fn form(&self, eps: &[i64]) -> Result<DiffForm> {
        let ring = PolyRing::new(self.field());
        let num = moore::fp_combination(&ring, eps, &self.pi);
        DiffForm::from_parts(num, self.p_poly.clone())
    }

    /// Fibers of the hyperplane map, keyed by the normalised residue vector
    /// (last nonzero entry scaled to 1).
    pub fn fibers(&self) -> BTreeMap<Vec<u32>, Vec<Fe>> {
        let p = self.p() as i64;
        let mut out: BTreeMap<Vec<u32>, Vec<Fe>> = BTreeMap::new();
        for (&x, r) in self.poles.iter().zip(&self.res) {
            let last = r.iter().rev().find(|&&v| v != 0).copied().unwrap_or(1) as i64;
            let inv = linalg::inv_mod(last, p);
            let key = r.iter().map(|&v| (v as i64 * inv % p) as u32).collect();
            out.entry(key).or_default().push(x);
        }
        out
    }

    /// Text table in the layout `pole | res ω_1 | … | res ω_n`, residues as
    /// signed integers.
    pub fn residue_text(&self) -> String {
        let f = self.field();
        let p = self.p() as i64;
        let mut s = String::new();
        let head: Vec<String> = (1..=self.n()).map(|i| format!("ω{i}")).collect();
        s.push_str(&format!("pole\t{}\n", head.join("\t")));
        for (&x, r) in self.poles.iter().zip(&self.res) {
            let cells: Vec<String> = r
                .iter()
                .map(|&v| {
                    let v = v as i64;
                    if v > p / 2 {
                        (v - p).to_string()
                    } else {
                        v.to_string()
                    }
                })
                .collect();
            s.push_str(&format!("{}\t{}\n", f.fmt_power(x), cells.join("\t")));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let f = self.field();
        json!({
            "schema": SPACE_SCHEMA,
            "field": f.spec().to_string(),
            "p": self.p(),
            "n": self.n(),
            "lambda": self.lambda(),
            "pole_count": self.poles.len(),
            "prompt": self.prompt.to_json(),
            "P": self.p_poly.to_json(),
            "residues": self.poles.iter().zip(&self.res).map(|(&x, r)| json!({
                "pole": elem_to_json(f, x),
                "pole_text": f.fmt_power(x),
                "res": r,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Builds and audits the space of a verified prompt.
pub fn build_space(q: &Prompt) -> Result<LSpace> {
    let v = verify_prompt_coeff(q)?;
    if !v.holds {
        return Err(Error::NotVerified(format!(
            "criterion value is {}",
            v.criterion
        )));
    }
    let rise = gives_rise(q)?;
    let f = q.field();
    let roots = rise.p_poly.roots_in_field()?;
    if !roots.all_simple() {
        return Err(Error::NonSimpleRoot);
    }
    if !roots.split {
        return Err(Error::PolesOutsideField {
            suggested_degree: rise.p_poly.splitting_degree()?,
        });
    }
    let dp = rise.p_poly.derivative();
    let poles = roots.distinct();
    let mut res = Vec::with_capacity(poles.len());
    for &x in &poles {
        let inv = f.inv(dp.eval(x))?;
        let row = rise
            .pi
            .iter()
            .map(|pi| {
                let r = f.mul(pi.eval(x), inv);
                f.to_prime(r).ok_or_else(|| Error::AuditFailure {
                    item: "residues in F_p".into(),
                    expected: "prime-field residue".into(),
                    actual: f.fmt_elem(r),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        res.push(row);
    }
    let space = LSpace {
        prompt: q.clone(),
        p_poly: rise.p_poly,
        pi: rise.pi,
        forms: rise.forms,
        poles,
        res,
    };
    audit_pole_combinatorics(&space)?;
    audit_forms(&space)?;
    Ok(space)
}

fn audit(item: &str, expected: impl ToString, actual: impl ToString) -> Error {
    Error::AuditFailure {
        item: item.into(),
        expected: expected.to_string(),
        actual: actual.to_string(),
    }
}

/// Summary of the combinatorial audits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub pole_count: usize,
    pub fiber_count: usize,
    pub fiber_size: usize,
    /// `(subset, intersection size)` for every nonempty subset of the basis.
    pub intersections: Vec<(Vec<usize>, usize)>,
    pub subspace_checks: usize,
}

/// Checks pole count, fiber sizes, basis intersections and the subspace pole
/// identity.
pub fn audit_pole_combinatorics(s: &LSpace) -> Result<AuditReport> {
    let p = s.p() as usize;
    let n = s.n();
    let lambda = s.lambda();
    let expected = s.prompt.expected_pole_count();
    if s.poles.len() != expected {
        return Err(audit("pole count", expected, s.poles.len()));
    }
    let fibers = s.fibers();
    let expected_fibers = moore::geometric(p as u64, n as i64 - 1) as usize;
    if fibers.len() != expected_fibers {
        return Err(audit("number of fibers", expected_fibers, fibers.len()));
    }
    if let Some((_, bad)) = fibers.iter().find(|(_, v)| v.len() != lambda) {
        return Err(audit("fiber size", lambda, bad.len()));
    }
    let mut intersections = Vec::new();
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let r = subset.len();
        let count = s
            .res
            .iter()
            .filter(|row| subset.iter().all(|&i| row[i] != 0))
            .count();
        let want = lambda * (p - 1).pow(r as u32 - 1) * p.pow((n - r) as u32);
        if count != want {
            return Err(audit(
                &format!("intersection of pole sets {subset:?}"),
                want,
                count,
            ));
        }
        intersections.push((subset, count));
    }
    let f = s.field();
    let mut subspace_checks = 0;
    for t in 1..n {
        let m = n - t;
        let lhs: HashSet<Fe> = s
            .poles
            .iter()
            .zip(&s.res)
            .filter(|(_, r)| r[m..].iter().any(|&v| v != 0))
            .map(|(&x, _)| x)
            .collect();
        let mut rhs = HashSet::new();
        for &x in &s.poles {
            let vals: Vec<Fe> = s.prompt.q()[..m].iter().map(|q| q.eval(x)).collect();
            if !moore::moore_det(f, &vals)?.is_zero() {
                rhs.insert(x);
            }
        }
        if lhs != rhs {
            return Err(audit(
                &format!("subspace pole identity (t = {t})"),
                lhs.len(),
                rhs.len(),
            ));
        }
        subspace_checks += 1;
    }
    Ok(AuditReport {
        pole_count: s.poles.len(),
        fiber_count: fibers.len(),
        fiber_size: lambda,
        intersections,
        subspace_checks,
    })
}

/// Checks that every nonzero form is logarithmic and that every `P_ε`
/// divides `P`.
pub fn audit_forms(s: &LSpace) -> Result<()> {
    let ring = PolyRing::new(s.field());
    for eps in moore::eps_vectors(s.p(), s.n(), false) {
        let pe = moore::fp_combination(&ring, &eps, &s.pi);
        if !s.p_poly.divisible_by(&pe)? {
            return Err(audit(&format!("P_ε | P for ε = {eps:?}"), "divides", "does not"));
        }
        let w = DiffForm::from_parts(pe, s.p_poly.clone())?;
        if !cartier::derivative_test(&w) {
            return Err(audit(
                &format!("logarithmic form for ε = {eps:?}"),
                "logarithmic",
                "not logarithmic",
            ));
        }
    }
    Ok(())
}

/// Rebuilds the space from the prompt `Q·M`, checking that its forms are
/// the old basis times `(M^{-1})^t` and that the pole set is unchanged.
pub fn change_basis(s: &LSpace, m: &[Vec<i64>]) -> Result<LSpace> {
    let p = s.p() as i64;
    let n = s.n();
    let q2 = s.prompt.apply_matrix(m)?;
    let s2 = build_space(&q2)?;
    let minv = linalg::inverse_mod_p(p, m)?;
    for j in 0..n {
        let eps: Vec<i64> = (0..n).map(|i| minv[j][i]).collect();
        let expect = s.form(&eps)?;
        if s2.forms[j] != expect {
            return Err(Error::internal(format!(
                "change of basis: form {} is not the transformed form",
                j + 1
            )));
        }
    }
    if s2.poles != s.poles {
        return Err(Error::internal("change of basis moved the pole set"));
    }
    Ok(s2)
}

/// Applies Frobenius to the prompt coefficients; the poles of the result
/// are the p-th powers of the old poles.
pub fn frobenius_twist(s: &LSpace) -> Result<LSpace> {
    let t = build_space(&s.prompt.frobenius())?;
    let f = s.field();
    let mut expect: Vec<Fe> = s.poles.iter().map(|&x| f.frob(x, 1)).collect();
    expect.sort();
    if t.poles != expect {
        return Err(Error::internal("twisted poles are not the p-th powers"));
    }
    Ok(t)
}

/// Prompt of the étale pullback along `X ↦ S(X)`: `(ηQ_1(S), …, ηQ_n(S))`
/// with `η^{p^{n-1}} = 1/S'`.  Also checks `Δ_n(new) = η^{1+…+p^{n-1}}·P(S)`.
pub fn pullback_prompt(q: &Prompt, s: &Poly) -> Result<(Prompt, Fe)> {
    let f = q.field();
    let ds = s.derivative();
    let c = match ds.as_constant() {
        Some(c) if !c.is_zero() && s.deg().unwrap_or(0) >= 1 => c,
        _ => return Err(Error::NonEtaleS),
    };
    let eta = f.inv_frob_iter(f.inv(c)?, q.n() as u32 - 1);
    let new = q.compose(s, eta)?;
    let ring = PolyRing::new(f);
    let lhs = moore::moore_det(&ring, new.q())?;
    let old = moore::moore_det(&ring, q.q())?;
    let scale = f.pow_u(eta, moore::geometric(q.p() as u64, q.n() as i64 - 1));
    if lhs != old.compose(s).scale(scale) {
        return Err(Error::internal("pulled-back Moore determinant is not P(S)"));
    }
    Ok((new, eta))
}

/// Étale pullback of a built space; the pole set of the result is the
/// preimage of the old pole set under `S`.
pub fn etale_pullback(sp: &LSpace, s: &Poly) -> Result<LSpace> {
    let (q, _) = pullback_prompt(&sp.prompt, s)?;
    let out = build_space(&q)?;
    let old: HashSet<Fe> = sp.poles.iter().copied().collect();
    let pre: Vec<Fe> = sp
        .field()
        .elements()
        .filter(|&a| old.contains(&s.eval(a)))
        .collect();
    if pre != out.poles {
        return Err(Error::internal("pullback poles are not the preimage"));
    }
    if out.lambda() != sp.lambda() * s.deg().unwrap_or(0) {
        return Err(Error::internal("pullback degree law violated"));
    }
    Ok(out)
}

/// Necessary condition for one space to be an étale pullback of spaces of
/// both parameters `λ1 < λ2`: p must divide `λ2`.
pub fn etale_lambda_compatible(p: u32, lambda1: usize, lambda2: usize) -> bool {
    lambda1 >= lambda2 || lambda2 % p as usize == 0
}

/// Affine maps `x ↦ a·x + b` carrying one finite set onto another, searched
/// exhaustively by sending two fixed points of the first set to every
/// ordered pair of the second.  The identity is tried first.
pub fn affine_witness(f: &Field, poles1: &[Fe], poles2: &[Fe]) -> Result<Option<(Fe, Fe)>> {
    if poles1.len() != poles2.len() {
        return Ok(None);
    }
    let set2: HashSet<Fe> = poles2.iter().copied().collect();
    let maps = |a: Fe, b: Fe| poles1.iter().all(|&x| set2.contains(&f.add(f.mul(a, x), b)));
    if maps(Fe::ONE, Fe::ZERO) {
        return Ok(Some((Fe::ONE, Fe::ZERO)));
    }
    if poles1.len() < 2 {
        return Ok(poles1
            .first()
            .map(|&x| (Fe::ONE, f.sub(poles2[0], x))));
    }
    let (x0, x1) = (poles1[0], poles1[1]);
    let dx = f.inv(f.sub(x1, x0))?;
    for &y0 in poles2 {
        for &y1 in poles2 {
            if y0 == y1 {
                continue;
            }
            let a = f.mul(f.sub(y1, y0), dx);
            let b = f.sub(y0, f.mul(a, x0));
            if maps(a, b) {
                return Ok(Some((a, b)));
            }
        }
    }
    Ok(None)
}

/// Equivalence witness for two spaces over the same field:
/// `P(s2) = a·P(s1) + b`.
pub fn equivalence_witness(s1: &LSpace, s2: &LSpace) -> Result<Option<(Fe, Fe)>> {
    if s1.field() != s2.field() {
        return Err(Error::SpecMismatch);
    }
    affine_witness(s1.field(), &s1.poles, &s2.poles)
}

/// A field containing both inputs, with embeddings of each.
pub fn common_field(f1: &Field, f2: &Field) -> Result<(Field, crate::ff::Embedding, crate::ff::Embedding)> {
    if f1.p() != f2.p() {
        return Err(Error::SpecMismatch);
    }
    let k = lcm(f1.k(), f2.k());
    let target = if k == f1.k() {
        f1.clone()
    } else if k == f2.k() {
        f2.clone()
    } else {
        Field::new(crate::ff::FieldSpec::with_default_modulus(f1.p(), k)?)?
    };
    let e1 = f1.embedding_into(&target)?;
    let e2 = f2.embedding_into(&target)?;
    Ok((target, e1, e2))
}

fn lcm(a: u32, b: u32) -> u32 {
    a / crate::ff::gcd_u64(a as u64, b as u64) as u32 * b
}

/// Equivalence witness for spaces over possibly different fields of the
/// same characteristic, computed inside a common extension.
pub fn equivalence_witness_across(s1: &LSpace, s2: &LSpace) -> Result<Option<(Field, Fe, Fe)>> {
    if s1.field() == s2.field() {
        return Ok(equivalence_witness(s1, s2)?.map(|(a, b)| (s1.field().clone(), a, b)));
    }
    let (t, e1, e2) = common_field(s1.field(), s2.field())?;
    let p1: Vec<Fe> = s1.poles.iter().map(|&x| e1.map(x)).collect();
    let p2: Vec<Fe> = s2.poles.iter().map(|&x| e2.map(x)).collect();
    Ok(affine_witness(&t, &p1, &p2)?.map(|(a, b)| (t, a, b)))
}

/// Prompt of the standard space on an independent tuple:
/// `Q_i = μ(a_i X^{p-1} - a_i^p)` with `μ^{p^{n-1}} = -1/Δ_n(a)^{p-1}`.
pub fn standard_prompt(f: &Field, a: &[Fe]) -> Result<Prompt> {
    let dn = moore::moore_det(f, a)?;
    if dn.is_zero() {
        return Err(Error::DependentTuple);
    }
    let p = f.p() as u64;
    let rhs = f.neg(f.inv(f.pow_u(dn, p - 1))?);
    let mu = f.inv_frob_iter(rhs, a.len() as u32 - 1);
    let q = a
        .iter()
        .map(|&ai| {
            Poly::new(
                f,
                {
                    let mut c = vec![Fe::ZERO; p as usize];
                    c[0] = f.neg(f.mul(mu, f.pow_u(ai, p)));
                    c[p as usize - 1] = f.add(c[p as usize - 1], f.mul(mu, ai));
                    c
                },
            )
        })
        .collect();
    Prompt::new(q)
}

/// The standard space on `a`: poles are the nonzero vectors of the span and
/// the residue of `ω_i` at `Σ ε_j a_j` is `ε_i` (both checked).
pub fn standard_space(f: &Field, a: &[Fe]) -> Result<LSpace> {
    let q = standard_prompt(f, a)?;
    let s = build_space(&q)?;
    let mut expect: HashMap<Fe, Vec<u32>> = HashMap::new();
    for (eps, v) in moore::span(f, a) {
        if !v.is_zero() {
            expect.insert(v, eps.iter().map(|&e| e as u32).collect());
        }
    }
    if expect.len() != s.poles.len() {
        return Err(Error::internal("standard space pole count"));
    }
    for (x, r) in s.poles.iter().zip(&s.res) {
        if expect.get(x) != Some(r) {
            return Err(Error::internal("standard space residue pairing"));
        }
    }
    Ok(s)
}

/// Data exhibiting the span of the last `t` basis forms of a standard space
/// as an étale pullback of a smaller standard space.
#[derive(Clone, Debug)]
pub struct SubspaceWitness {
    /// Structural polynomial `P_A` of the span of the first `n-t` entries.
    pub structural: Poly,
    /// `η` with `η^{p^{t-1}} = 1/P_A'`.
    pub eta: Fe,
    /// `ã_i = P_A(a_i)` for the last `t` entries.
    pub a_tilde: Vec<Fe>,
    /// The t-dimensional standard prompt on `ã`.
    pub small_prompt: Prompt,
    /// `(P_{Q_{n-t}}(Q_i))_{i > n-t}`.
    pub sub_prompt: Prompt,
}

/// `P_V(T)` for `V = span(Q_1..Q_m)` evaluated at `T = Q_i`:
/// `Δ_{m+1}(Q_1, …, Q_m, Q_i) / Δ_m(Q_1, …, Q_m)`.
pub fn structural_at(q: &[Poly], target: &Poly) -> Result<Poly> {
    let ring = PolyRing::new(target.field());
    let mut t = q.to_vec();
    let den = moore::moore_det(&ring, &t)?;
    t.push(target.clone());
    moore::moore_det(&ring, &t)?.div_exact(&den)
}

/// Realises the span of the last `t` forms of the standard space on `a` as
/// the pullback of the standard space on `ã` along `P_A`, checking
/// `(-1)^{n-t} η Q̃_i(P_A) = P_{Q_{n-t}}(Q_i)` and that the sub-prompt's
/// poles are the subspace poles.
pub fn standard_subspace(f: &Field, a: &[Fe], t: usize) -> Result<(LSpace, SubspaceWitness)> {
    let n = a.len();
    if t == 0 || t > n {
        return Err(Error::MalformedInput(format!("t must lie in [1, {n}]")));
    }
    let big = standard_space(f, a)?;
    let m = n - t;
    let structural = if m == 0 {
        Poly::x(f)
    } else {
        moore::structural_poly(f, &a[..m])?
    };
    let ds = structural
        .derivative()
        .as_constant()
        .filter(|c| !c.is_zero())
        .ok_or_else(|| Error::internal("structural polynomial is not étale"))?;
    let eta = f.inv_frob_iter(f.inv(ds)?, t as u32 - 1);
    let a_tilde: Vec<Fe> = a[m..].iter().map(|&x| structural.eval(x)).collect();
    let small_prompt = standard_prompt(f, &a_tilde)?;
    let q = big.prompt().q();
    let sub: Vec<Poly> = if m == 0 {
        q.to_vec()
    } else {
        q[m..]
            .iter()
            .map(|qi| structural_at(&q[..m], qi))
            .collect::<Result<_>>()?
    };
    let sign = if m % 2 == 1 { f.neg(Fe::ONE) } else { Fe::ONE };
    for (qt, rhs) in small_prompt.q().iter().zip(&sub) {
        let lhs = qt.compose(&structural).scale(f.mul(sign, eta));
        if &lhs != rhs {
            return Err(Error::internal(
                "subspace prompt differs from the pulled-back standard prompt",
            ));
        }
    }
    let sub_prompt = Prompt::new(sub)?;
    let sub_space = build_space(&sub_prompt)?;
    let expect: Vec<Fe> = big
        .poles
        .iter()
        .zip(&big.res)
        .filter(|(_, r)| r[m..].iter().any(|&v| v != 0))
        .map(|(&x, _)| x)
        .collect();
    if sub_space.poles != expect {
        return Err(Error::internal("subspace poles differ from the span's poles"));
    }
    Ok((
        sub_space,
        SubspaceWitness {
            structural,
            eta,
            a_tilde,
            small_prompt,
            sub_prompt,
        },
    ))
}

/// Reduced rational-function view of `ω_i` for external callers.
pub fn form_function(s: &LSpace, i: usize) -> &RatFun {
    s.forms[i].f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_standard_space_has_three_poles() {
        let f = Field::parse("2^2/1,1,1").unwrap();
        let s = standard_space(&f, &[Fe::ONE, f.mu().unwrap()]).unwrap();
        assert_eq!(s.poles().len(), 3);
    }

    #[test]
    fn lambda_one_pair_over_f3_fails() {
        let f = Field::prime(3).unwrap();
        let q = Prompt::new(vec![
            Poly::from_i64s(&f, &[0, 1]),
            Poly::from_i64s(&f, &[1, 1]),
        ]);
        assert!(matches!(q, Err(Error::DependentLeadingCoeffs)));
    }
}
