//! Exhaustive search for two-dimensional prompts with coefficients in a
//! small field, under a chosen normalization.
//!
//! Candidates are pairs `(Q_1, Q_2) = (monic, a·monic)` with `a ∉ F_p`;
//! every prompt can be brought to this shape by the `GL_2(F_p)` action and
//! an overall scalar, which do not affect whether the determinant criterion
//! is a nonzero constant.  A candidate is a hit when that value is a
//! nonzero constant, i.e. when some scalar multiple of it verifies (possibly
//! over an extension containing the scaling constant).

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ff::{Fe, Field};
use crate::linalg::det_mod_p;
use crate::lspace::{verify_prompt_det, Prompt};
use crate::poly::{elem_to_json, Poly};

/// Default bound on the number of candidate pairs.
pub const DEFAULT_MAX_SPACE: u64 = 100_000_000;

/// Coordinate normalizations of the search space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// `Q_1` monic, `Q_2 = a·(monic)`, all lower coefficients free.
    None,
    /// Additionally the `X^{λ−1}` coefficients of both vanish (translation).
    S1T1Zero,
    /// Additionally the `X^{λ−3}` coefficient of `Q_2/a` is −1 (scaling of
    /// the coordinate); needs λ ≥ 3.
    S3One,
    /// λ = 4 only: `Q_1 = X^4 + tX^2 + 1`, `Q_2 = a(X^4 + sX^2 + u)`.
    Biquadratic,
}

impl Normalization {
    pub fn name(self) -> &'static str {
        match self {
            Normalization::None => "none",
            Normalization::S1T1Zero => "s1t1zero",
            Normalization::S3One => "s3one",
            Normalization::Biquadratic => "biquadratic",
        }
    }

    fn describe(self, lambda: usize) -> String {
        match self {
            Normalization::None => format!(
                "Q1 = X^{lambda} + lower terms, Q2 = a·(X^{lambda} + lower terms), a outside F_p"
            ),
            Normalization::S1T1Zero => format!(
                "as 'none' with vanishing X^{} coefficients in Q1 and Q2/a",
                lambda as i64 - 1
            ),
            Normalization::S3One => format!(
                "as 's1t1zero' with X^{} coefficient of Q2/a equal to -1",
                lambda as i64 - 3
            ),
            Normalization::Biquadratic => {
                "Q1 = X^4 + tX^2 + 1, Q2 = a·(X^4 + sX^2 + u), a outside F_p".into()
            }
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Normalization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Normalization::None),
            "s1t1zero" => Ok(Normalization::S1T1Zero),
            "s3one" => Ok(Normalization::S3One),
            "biquadratic" => Ok(Normalization::Biquadratic),
            _ => Err(Error::MalformedInput(format!("unknown normalization `{s}`"))),
        }
    }
}

/// Search parameters.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub field: Field,
    pub lambda: usize,
    pub normalization: Normalization,
    pub max_space: u64,
    /// Worker threads; 0 or 1 runs on the calling thread.
    pub jobs: usize,
}

impl SearchConfig {
    pub fn new(field: Field, lambda: usize, normalization: Normalization) -> Self {
        SearchConfig {
            field,
            lambda,
            normalization,
            max_space: DEFAULT_MAX_SPACE,
            jobs: 1,
        }
    }
}

/// One hit: the candidate index in enumeration order, the pair and the
/// constant criterion value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hit {
    pub index: u64,
    pub prompt: Prompt,
    pub value: Fe,
}

/// Result of [`brute_search`].
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub field: Field,
    pub lambda: usize,
    pub normalization: Normalization,
    pub candidates: u64,
    pub hits: Vec<Hit>,
}

impl SearchResult {
    /// The certificate statement.
    pub fn statement(&self) -> String {
        let f = &self.field;
        if self.hits.is_empty() {
            format!(
                "no prompt of degree {} with coefficients in F_{}^{} under normalization {}",
                self.lambda,
                f.p(),
                f.k(),
                self.normalization
            )
        } else {
            format!(
                "{} prompts of degree {} with coefficients in F_{}^{} under normalization {}",
                self.hits.len(),
                self.lambda,
                f.p(),
                f.k(),
                self.normalization
            )
        }
    }

    pub fn to_json(&self) -> Value {
        let f = &self.field;
        json!({
            "schema": "lform.search/1",
            "field": f.spec().to_string(),
            "p": f.p(),
            "n": 2,
            "lambda": self.lambda,
            "normalization": self.normalization.name(),
            "search_space": self.normalization.describe(self.lambda),
            "candidates": self.candidates,
            "hit_count": self.hits.len(),
            "statement": self.statement(),
            "hits": self.hits.iter().map(|h| json!({
                "index": h.index,
                "q": h.prompt.q().iter().map(Poly::to_json).collect::<Vec<_>>(),
                "value": elem_to_json(f, h.value),
            })).collect::<Vec<_>>(),
        })
    }
}

struct Layout {
    elems: Vec<Fe>,
    ratios: Vec<Fe>,
    /// Free coefficient positions of `Q_1` and `Q_2/a`.
    free1: Vec<usize>,
    free2: Vec<usize>,
    fixed1: Vec<(usize, Fe)>,
    fixed2: Vec<(usize, Fe)>,
}

fn layout(cfg: &SearchConfig) -> Result<Layout> {
    let f = &cfg.field;
    let l = cfg.lambda;
    if l == 0 {
        return Err(Error::DegreeTooSmall);
    }
    let q = f.order();
    let inner_bound = cfg.max_space.max(1);
    if q > inner_bound {
        return Err(Error::SearchSpaceTooLarge {
            size: q,
            bound: cfg.max_space,
        });
    }
    let elems = f.enumerate_bounded(inner_bound)?;
    let ratios: Vec<Fe> = elems
        .iter()
        .copied()
        .filter(|&x| f.to_prime(x).is_none())
        .collect();
    if ratios.is_empty() {
        return Err(Error::FieldTooSmall(
            "a two-dimensional prompt needs a field larger than F_p".into(),
        ));
    }
    let all: Vec<usize> = (0..l).collect();
    let minus_one = f.neg(Fe::ONE);
    let (free1, free2, fixed1, fixed2) = match cfg.normalization {
        Normalization::None => (all.clone(), all, vec![], vec![]),
        Normalization::S1T1Zero => {
            let fr: Vec<usize> = (0..l - 1).collect();
            (fr.clone(), fr, vec![], vec![])
        }
        Normalization::S3One => {
            if l < 3 {
                return Err(Error::PrecondViolation("normalization s3one needs λ ≥ 3".into()));
            }
            let fr1: Vec<usize> = (0..l - 1).collect();
            let fr2: Vec<usize> = (0..l - 1).filter(|&i| i != l - 3).collect();
            (fr1, fr2, vec![], vec![(l - 3, minus_one)])
        }
        Normalization::Biquadratic => {
            if l != 4 {
                return Err(Error::PrecondViolation(
                    "biquadratic normalization needs λ = 4".into(),
                ));
            }
            (vec![2], vec![0, 2], vec![(0, Fe::ONE)], vec![])
        }
    };
    Ok(Layout {
        elems,
        ratios,
        free1,
        free2,
        fixed1,
        fixed2,
    })
}

fn checked_pow(base: u64, e: usize) -> Option<u64> {
    (0..e).try_fold(1u64, |acc, _| acc.checked_mul(base))
}

fn assemble(f: &Field, l: usize, free: &[usize], fixed: &[(usize, Fe)], elems: &[Fe], mut idx: u64) -> Poly {
    let q = elems.len() as u64;
    let mut c = vec![Fe::ZERO; l + 1];
    c[l] = Fe::ONE;
    for &(i, v) in fixed {
        c[i] = v;
    }
    for &i in free {
        c[i] = elems[(idx % q) as usize];
        idx /= q;
    }
    Poly::new(f, c)
}

/// Number of candidate pairs the configuration enumerates.
pub fn search_space_size(cfg: &SearchConfig) -> Result<u64> {
    let lay = layout(cfg)?;
    let q = lay.elems.len() as u64;
    let too_large = || Error::SearchSpaceTooLarge {
        size: u64::MAX,
        bound: cfg.max_space,
    };
    let outer = checked_pow(q, lay.free1.len()).ok_or_else(too_large)?;
    let inner = checked_pow(q, lay.free2.len())
        .and_then(|x| x.checked_mul(lay.ratios.len() as u64))
        .ok_or_else(too_large)?;
    outer.checked_mul(inner).ok_or_else(too_large)
}

/// Enumerates the normalized pairs, sharded over the coefficients of `Q_1`
/// and merged in shard order, and records every hit.
pub fn brute_search(cfg: &SearchConfig) -> Result<SearchResult> {
    let f = &cfg.field;
    let l = cfg.lambda;
    let total = search_space_size(cfg)?;
    if total > cfg.max_space {
        return Err(Error::SearchSpaceTooLarge {
            size: total,
            bound: cfg.max_space,
        });
    }
    let lay = layout(cfg)?;
    let q = lay.elems.len() as u64;
    let outer = checked_pow(q, lay.free1.len()).unwrap_or(0);
    let inner2 = checked_pow(q, lay.free2.len()).unwrap_or(0);
    let per_shard = inner2 * lay.ratios.len() as u64;

    let shard = |s: u64| -> Result<Vec<Hit>> {
        let q1 = assemble(f, l, &lay.free1, &lay.fixed1, &lay.elems, s);
        let mut hits = Vec::new();
        for (ai, &a) in lay.ratios.iter().enumerate() {
            for v in 0..inner2 {
                let q2 = assemble(f, l, &lay.free2, &lay.fixed2, &lay.elems, v).scale(a);
                let prompt = Prompt::new(vec![q1.clone(), q2])?;
                let verdict = verify_prompt_det(&prompt)?;
                if let Some(c) = verdict.value.as_constant() {
                    if !c.is_zero() {
                        hits.push(Hit {
                            index: s * per_shard + ai as u64 * inner2 + v,
                            prompt,
                            value: c,
                        });
                    }
                }
            }
        }
        Ok(hits)
    };

    let shards: Vec<Result<Vec<Hit>>> = if cfg.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::internal(format!("thread pool: {e}")))?;
        pool.install(|| (0..outer).into_par_iter().map(shard).collect())
    } else {
        (0..outer).map(shard).collect()
    };
    let mut hits = Vec::new();
    for s in shards {
        hits.extend(s?);
    }
    Ok(SearchResult {
        field: f.clone(),
        lambda: l,
        normalization: cfg.normalization,
        candidates: total,
        hits,
    })
}

/// All invertible 2×2 matrices over F_p.
pub fn gl2(p: u32) -> Vec<Vec<Vec<i64>>> {
    let p = p as i64;
    let mut out = Vec::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    let m = vec![vec![a, b], vec![c, d]];
                    if det_mod_p(p, &m) != 0 {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// Brings a pair to the search shape `(monic, a·monic)` by an overall
/// scalar.
pub fn normalize_pair(q: &Prompt) -> Result<Prompt> {
    let f = q.field();
    let inv = f.inv(q.q()[0].lc())?;
    q.scale(inv)
}

/// Checks that the hit set of a search under [`Normalization::None`] is
/// closed under the `GL_2(F_p)` action followed by [`normalize_pair`].
pub fn gl2_closed(r: &SearchResult) -> Result<bool> {
    if r.normalization != Normalization::None {
        return Err(Error::PrecondViolation(
            "closure check needs the unnormalized search".into(),
        ));
    }
    let set: HashSet<Vec<Poly>> = r.hits.iter().map(|h| h.prompt.q().to_vec()).collect();
    for h in &r.hits {
        for m in gl2(r.field.p()) {
            let img = normalize_pair(&h.prompt.apply_matrix(&m)?)?;
            if !set.contains(img.q()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
