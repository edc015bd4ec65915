//! Classification toolkit for two-dimensional spaces: explicit families,
//! pencil power sums, pencil discriminants and exhaustive searches, plus
//! the replay documents used by the command-line tool.

pub mod families;
pub mod newton;
pub mod pencil;
pub mod search;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ff::{Fe, Field};
use crate::lspace::{audit_pole_combinatorics, standard_space};
use crate::poly::elem_to_json;

pub use families::{
    cubic_criterion, l12_family, l12_space, l15_examples, l15_five, l15_prompt, match_table,
    pairwise_equivalences, q_over_p_residues, L12Member, L12Space, L15Space, L15Which, TableMatch,
};
pub use newton::{gcdex_leading_check, newton_toolkit, GcdexCheck, NewtonReport, PencilData};
pub use pencil::{disc_pencil_pt, pencil_disc, PencilDisc, PencilDiscT};
pub use search::{brute_search, gl2_closed, Normalization, SearchConfig, SearchResult};

/// Parameters for the λ = 4 replay: the elements of the degree-4 subfield
/// when the field contains one, otherwise every element.
pub fn l12_parameters(f: &Field) -> Result<Vec<Fe>> {
    if f.k() % 4 == 0 {
        f.subfield_elements(4)
    } else {
        f.enumerate()
    }
}

/// Replays the λ = 4 family over `f` at the given parameters.  Each entry
/// records the criterion value and either the built space's pole
/// statistics or the reason it fails; `all_consistent` is true when exactly
/// the parameters with `a^2 ∉ F_3` give spaces.
pub fn replay_l12(f: &Field, params: &[Fe]) -> Result<Value> {
    let mut rows = Vec::new();
    let mut consistent = true;
    let mut built = 0usize;
    for &a in params {
        let member = l12_family(f, a)?;
        let admissible = member.is_admissible(f);
        let mut row = json!({
            "a": f.fmt_elem(a),
            "admissible": admissible,
            "criterion": elem_to_json(f, member.expected),
        });
        match l12_space(f, a) {
            Ok(s) => {
                let audit = audit_pole_combinatorics(&s.space)?;
                let fibers = s.space.fibers();
                let sizes: Vec<usize> = fibers.values().map(Vec::len).collect();
                let both = s
                    .space
                    .residue_matrix()
                    .iter()
                    .filter(|r| r.iter().all(|&v| v != 0))
                    .count();
                row["scaling"] = elem_to_json(f, s.scaling.c);
                row["poles"] = json!(s.space.poles().len());
                row["fiber_sizes"] = json!(sizes);
                row["common_poles"] = json!(both);
                row["audit_pole_count"] = json!(audit.pole_count);
                consistent &= admissible;
                built += 1;
            }
            Err(e) if e.is_internal() => return Err(e),
            Err(e) => {
                row["error"] = json!(e.to_string());
                consistent &= !admissible
                    || matches!(e, Error::RequiresExtension(_) | Error::PolesOutsideField { .. });
            }
        }
        rows.push(row);
    }
    Ok(json!({
        "schema": "lform.replay.l12/1",
        "field": f.spec().to_string(),
        "parameters": params.len(),
        "spaces_built": built,
        "all_consistent": consistent,
        "members": rows,
    }))
}

/// Replays one of the λ = 5 reference spaces and its Frobenius twists.
pub fn replay_l15(which: L15Which) -> Result<Value> {
    let base = l15_examples(which, 0)?;
    let f = base.space.field().clone();
    let k = f.k();
    let mut twists = Vec::new();
    for it in 1..k {
        let t = l15_examples(which, it)?;
        twists.push(json!({"iterate": it, "poles": t.space.poles().iter().map(|&x| f.fmt_power(x)).collect::<Vec<_>>()}));
    }
    let table = base.table.clone().unwrap_or(TableMatch {
        rows: 0,
        matched: 0,
        mismatches: vec![],
    });
    Ok(json!({
        "schema": "lform.replay.l15/1",
        "example": which.name(),
        "criterion": base.criterion.to_json(),
        "table_rows": table.rows,
        "table_matched": table.matched,
        "table_exact": table.is_exact(),
        "space": base.space.to_json(),
        "twists": twists,
    }))
}

/// Pairwise equivalence search among the five λ = 5 spaces.
pub fn replay_l15_classes() -> Result<Value> {
    let five = l15_five()?;
    let pairs = pairwise_equivalences(&five)?;
    Ok(json!({
        "schema": "lform.replay.l15-classes/1",
        "spaces": five.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        "pairs": pairs.iter().map(|&(i, j, eq)| json!({"a": five[i].0, "b": five[j].0, "equivalent": eq})).collect::<Vec<_>>(),
        "pairwise_inequivalent": pairs.iter().all(|&(_, _, eq)| !eq),
    }))
}

/// The p = 5 standard two-dimensional space on `(1, μ)` over F_25 and the
/// power-sum report of its pencil (sums up to `r = 60`).
pub fn replay_l20() -> Result<(Value, NewtonReport)> {
    let f = Field::parse("5^2")?;
    let mu = f
        .mu()
        .ok_or_else(|| Error::FieldTooSmall("field has no generator μ".into()))?;
    let space = standard_space(&f, &[Fe::ONE, mu])?;
    let pencil = PencilData::from_prompt(space.prompt())?;
    let report = newton_toolkit(&pencil, Some(60))?;
    let leading_zero = report
        .members
        .iter()
        .all(|m| m.sums[..3].iter().all(|x| x.is_zero()) && !m.sums[3].is_zero());
    let lambda = pencil.lambda();
    let biquadratic = report
        .members
        .iter()
        .all(|m| (1..=3).all(|k| m.member.coeff(lambda - k).is_zero()));
    let doc = json!({
        "schema": "lform.replay.l20/1",
        "field": f.spec().to_string(),
        "lambda": space.lambda(),
        "poles": space.poles().len(),
        "pencil": pencil.to_json(),
        "first_sums_vanish": leading_zero,
        "e1_e2_e3_vanish": biquadratic,
        "theta_degree": pencil.theta().degree_signed(),
        "newton": report.to_json(&f),
    });
    Ok((doc, report))
}
