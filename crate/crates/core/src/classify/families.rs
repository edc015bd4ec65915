//! Explicit two-dimensional families in characteristic 3: the λ = 4 family
//! parametrised by `a`, and the two λ = 5 spaces over F_27 and F_81 with
//! their reference residue tables.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ff::{Fe, Field};
use crate::lspace::{
    build_space, equivalence_witness_across, frobenius_twist, solve_scaling, verify_prompt,
    verify_prompt_coeff, LSpace, Prompt, Scaling,
};
use crate::poly::Poly;

/// `((Q_1^3 − Q_1 Q_2^2)^2)''` for a pair in characteristic 3.  The pair is
/// logarithmic-generating after scaling exactly when this is a nonzero
/// constant, and verified as it stands when it equals −1.  It coincides
/// with the coefficient criterion of the swapped pair `(Q_2, Q_1)`.
pub fn cubic_criterion(q1: &Poly, q2: &Poly) -> Result<Poly> {
    let f = q1.field();
    if f.p() != 3 {
        return Err(Error::WrongCharacteristic(3));
    }
    if q2.field() != f {
        return Err(Error::SpecMismatch);
    }
    let inner = &q1.pow(3) - &(q1 * &q2.pow(2));
    let direct = inner.pow(2).derivative_k(2);
    if let Ok(swapped) = Prompt::new(vec![q2.clone(), q1.clone()]) {
        if verify_prompt_coeff(&swapped)?.criterion != direct {
            return Err(Error::internal(
                "cubic criterion disagrees with the coefficient criterion",
            ));
        }
    }
    Ok(direct)
}

/// One member of the λ = 4 family together with its criterion value.
#[derive(Clone, Debug)]
pub struct L12Member {
    pub a: Fe,
    /// `Q_1 = X^4 − (a^4+a^2−1)X^2 + 1`.
    pub q1: Poly,
    /// `Q_2 = a(X^4 + (a^4−a^2−1)X^2 + a^8)`.
    pub q2: Poly,
    /// `((Q_1^3 − Q_1Q_2^2)^2)''`, asserted to equal `expected`.
    pub criterion: Poly,
    /// `−(a^3−a)^{10}(a^2+1)^5`.
    pub expected: Fe,
}

impl L12Member {
    /// The pair as a prompt; fails with `DependentLeadingCoeffs` for
    /// `a ∈ F_3`.
    pub fn prompt(&self) -> Result<Prompt> {
        Prompt::new(vec![self.q1.clone(), self.q2.clone()])
    }

    /// True when `a^2 ∉ F_3`, the condition for a genuine space.
    pub fn is_admissible(&self, f: &Field) -> bool {
        f.to_prime(f.mul(self.a, self.a)).is_none()
    }

    pub fn to_json(&self, f: &Field) -> Value {
        json!({
            "a": crate::poly::elem_to_json(f, self.a),
            "a_text": f.fmt_elem(self.a),
            "q": [self.q1.to_json(), self.q2.to_json()],
            "criterion": self.criterion.to_json(),
            "expected": crate::poly::elem_to_json(f, self.expected),
            "admissible": self.is_admissible(f),
        })
    }
}

/// The λ = 4 family member at `a` (characteristic 3 only).  The criterion
/// value is computed and checked against `−(a^3−a)^{10}(a^2+1)^5`.
pub fn l12_family(f: &Field, a: Fe) -> Result<L12Member> {
    if f.p() != 3 {
        return Err(Error::WrongCharacteristic(3));
    }
    let a2 = f.mul(a, a);
    let a4 = f.mul(a2, a2);
    let a8 = f.mul(a4, a4);
    let one = Fe::ONE;
    let t = f.neg(f.sub(f.add(a4, a2), one));
    let s = f.sub(f.sub(a4, a2), one);
    let q1 = Poly::new(f, vec![one, Fe::ZERO, t, Fe::ZERO, one]);
    let q2 = Poly::new(f, vec![a8, Fe::ZERO, s, Fe::ZERO, one]).scale(a);
    let criterion = cubic_criterion(&q1, &q2)?;
    let a3a = f.sub(f.mul(a2, a), a);
    let expected = f.neg(f.mul(f.pow_u(a3a, 10), f.pow_u(f.add(a2, one), 5)));
    if criterion != Poly::constant(f, expected) {
        return Err(Error::internal(format!(
            "family criterion at a = {} is {}, expected {}",
            f.fmt_elem(a),
            criterion,
            f.fmt_elem(expected)
        )));
    }
    Ok(L12Member {
        a,
        q1,
        q2,
        criterion,
        expected,
    })
}

/// A family member scaled to a verified space.
#[derive(Clone, Debug)]
pub struct L12Space {
    pub member: L12Member,
    pub scaling: Scaling,
    pub space: LSpace,
}

/// Scales the family member at `a` and builds its space.  Fails with
/// `DependentLeadingCoeffs` for `a ∈ F_3`, `ZeroCriterion` for `a^2 = −1`,
/// and `RequiresExtension`/`PolesOutsideField` when the working field is too
/// small for the scaling constant or the poles.
pub fn l12_space(f: &Field, a: Fe) -> Result<L12Space> {
    let member = l12_family(f, a)?;
    let prompt = member.prompt()?;
    let scaling = solve_scaling(&prompt)?;
    let space = build_space(&scaling.prompt)?;
    Ok(L12Space {
        member,
        scaling,
        space,
    })
}

/// Which of the two λ = 5 reference spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum L15Which {
    F27,
    F81,
}

impl L15Which {
    pub fn name(self) -> &'static str {
        match self {
            L15Which::F27 => "F27",
            L15Which::F81 => "F81",
        }
    }

    /// The field the reference data is written in (μ a root of the given
    /// modulus).
    pub fn field_spec(self) -> &'static str {
        match self {
            L15Which::F27 => "3^3/1,2,0,1",
            L15Which::F81 => "3^4/2,2,2,1,1",
        }
    }

    pub fn field(self) -> Result<Field> {
        Field::parse(self.field_spec())
    }

    /// Reference table rows `(pole exponent, col 1, col 2)`, the pole being
    /// `μ^e` (or 0 for `None`) and column `i` the residue of `Q_i/P dX`.
    pub fn table(self) -> &'static [(Option<u32>, i8, i8); 20] {
        match self {
            L15Which::F27 => &F27_TABLE,
            L15Which::F81 => &F81_TABLE,
        }
    }
}

const F27_TABLE: [(Option<u32>, i8, i8); 20] = [
    (Some(4), 1, 0),
    (Some(9), 1, 0),
    (Some(19), 1, 0),
    (Some(1), -1, 0),
    (None, -1, 0),
    (Some(5), 1, -1),
    (Some(15), -1, 1),
    (Some(24), -1, 1),
    (Some(8), -1, 1),
    (Some(21), -1, 1),
    (Some(25), -1, -1),
    (Some(13), 1, 1),
    (Some(18), -1, -1),
    (Some(12), 1, 1),
    (Some(17), -1, -1),
    (Some(10), 0, 1),
    (Some(3), 0, 1),
    (Some(2), 0, -1),
    (Some(7), 0, -1),
    (Some(22), 0, 1),
];

const F81_TABLE: [(Option<u32>, i8, i8); 20] = [
    (Some(7), -1, 0),
    (Some(30), -1, 0),
    (Some(51), -1, 0),
    (Some(59), -1, 0),
    (Some(63), -1, 0),
    (Some(26), -1, 1),
    (Some(50), 1, -1),
    (Some(52), 1, -1),
    (Some(68), 1, -1),
    (Some(74), -1, 1),
    (Some(34), -1, -1),
    (Some(60), 1, 1),
    (Some(66), -1, -1),
    (Some(70), 1, 1),
    (None, 1, 1),
    (Some(10), 0, 1),
    (Some(11), 0, 1),
    (Some(19), 0, 1),
    (Some(20), 0, 1),
    (Some(40), 0, -1),
];

fn roots_poly(f: &Field, exps: &[u32], with_zero: bool) -> Result<Poly> {
    let mu = f.mu().ok_or_else(|| Error::FieldTooSmall("field has no generator μ".into()))?;
    let mut r: Vec<Fe> = exps.iter().map(|&e| f.pow_u(mu, e as u64)).collect();
    if with_zero {
        r.push(Fe::ZERO);
    }
    Ok(Poly::from_roots(f, &r))
}

/// The reference prompt `(Q_1, Q_2) = (−c·P_∞, a·c·P_0)` of a λ = 5 space.
pub fn l15_prompt(which: L15Which) -> Result<Prompt> {
    let f = which.field()?;
    let mu = f.mu().ok_or_else(|| Error::FieldTooSmall("field has no generator μ".into()))?;
    let (q1, q2) = match which {
        L15Which::F27 => {
            let pinf = roots_poly(&f, &[10, 3, 2, 7, 22], false)?;
            let p0 = roots_poly(&f, &[4, 9, 19, 1], true)?;
            let c2 = f.sub(f.sub(f.mul(mu, mu), mu), Fe::ONE);
            (pinf.scale(f.neg(mu)), p0.scale(c2))
        }
        L15Which::F81 => {
            let pinf = roots_poly(&f, &[10, 11, 19, 20, 40], false)?;
            let p0 = roots_poly(&f, &[7, 30, 51, 59, 63], false)?;
            let a = f.neg(f.pow_u(mu, 20));
            (pinf.scale(f.neg(f.add(a, Fe::ONE))), p0.scale(a))
        }
    };
    Prompt::new(vec![q1, q2])
}

/// Residue of `Q_i/P dX` at every pole, as signed integers in `{−1,0,1}`
/// (for p = 3); column `i` of the result is `Q_{i+1}`.  Since
/// `ω_1 = Q_2/P` and `ω_2 = −Q_1/P`, this is `(−res ω_2, res ω_1)`.
pub fn q_over_p_residues(s: &LSpace) -> Result<Vec<(Fe, i64, i64)>> {
    if s.n() != 2 {
        return Err(Error::PrecondViolation("two-dimensional space required".into()));
    }
    let p = s.p() as i64;
    let signed = |v: i64| {
        let v = v.rem_euclid(p);
        if v > p / 2 {
            v - p
        } else {
            v
        }
    };
    Ok(s.poles()
        .iter()
        .zip(s.residue_matrix())
        .map(|(&x, r)| (x, signed(-(r[1] as i64)), signed(r[0] as i64)))
        .collect())
}

/// Row-by-row comparison of a space with a reference table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableMatch {
    pub rows: usize,
    pub matched: usize,
    /// Rows that differ, as `(pole, expected, actual)` text.
    pub mismatches: Vec<String>,
}

impl TableMatch {
    pub fn is_exact(&self) -> bool {
        self.matched == self.rows && self.mismatches.is_empty()
    }
}

/// Compares the `Q_i/P` residues of `s` with a reference table; the pole
/// sets must coincide too.
pub fn match_table(s: &LSpace, table: &[(Option<u32>, i8, i8)]) -> Result<TableMatch> {
    let f = s.field();
    let mu = f.mu().ok_or_else(|| Error::FieldTooSmall("field has no generator μ".into()))?;
    let actual = q_over_p_residues(s)?;
    let mut mismatches = Vec::new();
    let mut matched = 0;
    for &(e, c1, c2) in table {
        let x = e.map_or(Fe::ZERO, |e| f.pow_u(mu, e as u64));
        match actual.iter().find(|&&(y, _, _)| y == x) {
            Some(&(_, r1, r2)) if r1 == c1 as i64 && r2 == c2 as i64 => matched += 1,
            Some(&(_, r1, r2)) => mismatches.push(format!(
                "{}: expected ({c1},{c2}), got ({r1},{r2})",
                f.fmt_power(x)
            )),
            None => mismatches.push(format!("{}: not a pole", f.fmt_power(x))),
        }
    }
    if actual.len() != table.len() {
        mismatches.push(format!(
            "space has {} poles, table has {} rows",
            actual.len(),
            table.len()
        ));
    }
    Ok(TableMatch {
        rows: table.len(),
        matched,
        mismatches,
    })
}

/// A replayed λ = 5 space (possibly Frobenius-twisted).
#[derive(Clone, Debug)]
pub struct L15Space {
    pub which: L15Which,
    pub frob_iterate: u32,
    /// The cubic criterion of the untwisted prompt (asserted −1).
    pub criterion: Poly,
    pub space: LSpace,
    /// Comparison with the reference table; only for the untwisted space.
    pub table: Option<TableMatch>,
}

/// Builds the reference space and its `frob_iterate`-th Frobenius twist.
pub fn l15_examples(which: L15Which, frob_iterate: u32) -> Result<L15Space> {
    let q = l15_prompt(which)?;
    let f = q.field().clone();
    let criterion = cubic_criterion(&q.q()[0], &q.q()[1])?;
    if criterion != Poly::constant(&f, f.neg(Fe::ONE)) {
        return Err(Error::internal(format!(
            "reference criterion is {criterion}, expected −1"
        )));
    }
    if !verify_prompt(&q)?.holds {
        return Err(Error::internal("reference prompt does not verify"));
    }
    let base = build_space(&q)?;
    let table = match_table(&base, which.table())?;
    if !table.is_exact() {
        return Err(Error::internal(format!(
            "reference table mismatch: {:?}",
            table.mismatches
        )));
    }
    let mut space = base;
    for _ in 0..frob_iterate {
        space = frobenius_twist(&space)?;
    }
    Ok(L15Space {
        which,
        frob_iterate,
        criterion,
        table: (frob_iterate == 0).then_some(table),
        space,
    })
}

/// The five λ = 5 spaces `Ω_1, ΦΩ_1, Φ²Ω_1, Ω_2, ΦΩ_2`, labelled.
pub fn l15_five() -> Result<Vec<(String, LSpace)>> {
    let spec = [
        (L15Which::F27, 0),
        (L15Which::F27, 1),
        (L15Which::F27, 2),
        (L15Which::F81, 0),
        (L15Which::F81, 1),
    ];
    spec.iter()
        .map(|&(w, k)| {
            let s = l15_examples(w, k)?;
            Ok((format!("{}^{}", w.name(), k), s.space))
        })
        .collect()
}

/// Pairwise equivalence search among labelled spaces: `(i, j, witness
/// found)` for all `i < j`.
pub fn pairwise_equivalences(spaces: &[(String, LSpace)]) -> Result<Vec<(usize, usize, bool)>> {
    let mut out = Vec::new();
    for i in 0..spaces.len() {
        for j in i + 1..spaces.len() {
            let w = equivalence_witness_across(&spaces[i].1, &spaces[j].1)?;
            out.push((i, j, w.is_some()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f27_reference_table_matches() {
        let s = l15_examples(L15Which::F27, 0).unwrap();
        assert_eq!(s.space.poles().len(), 20);
        assert!(s.table.unwrap().is_exact());
    }

    #[test]
    fn family_rejects_prime_field_parameter() {
        let f = Field::parse("3^2").unwrap();
        let m = l12_family(&f, Fe::ONE).unwrap();
        assert_eq!(m.prompt().unwrap_err(), Error::DependentLeadingCoeffs);
    }
}
