//! `lform`: command-line front end for the lform-core library.
//!
//! Exit codes: 0 success / verdict true, 1 verdict false, 2 usage or input
//! error, 3 internal inconsistency (a proven identity failed).

use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use lform_core::cartier::{is_logarithmic, poles_and_residues, DiffForm};
use lform_core::char2::{general_construct, predicted_lambda, WTuple};
use lform_core::classify::{
    brute_search, l12_parameters, replay_l12, replay_l15, replay_l15_classes, replay_l20,
    L15Which, Normalization, SearchConfig,
};
use lform_core::identities::run_identities;
use lform_core::lspace::{
    build_space, equivalence_witness_across, etale_pullback, frobenius_twist, solve_scaling,
    standard_space, verify_prompt, LSpace, Prompt,
};
use lform_core::poly::{elem_from_json, elem_to_json};
use lform_core::{Error, Field, Poly};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "lform", version, about = "Exact computations with F_p-spaces of logarithmic differential forms")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Working field: `p`, `p^k` (default modulus) or `p^k/m0,…,mk`.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for `search`.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Bound on the number of search candidates.
    #[arg(long = "max-space", global = true, default_value_t = lform_core::classify::search::DEFAULT_MAX_SPACE)]
    max_space: u64,
    /// Trials for randomized commands.
    #[arg(long, global = true, default_value_t = 200)]
    trials: usize,
    /// Also write a run manifest (command, field, seed, version, elapsed
    /// time, verdict) to this path.
    #[arg(long, global = true)]
    manifest: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the prompt criteria (coefficient and determinant forms).
    Verify {
        /// Prompt: JSON inline or `@file.json`.
        #[arg(long = "Q")]
        q: String,
    },
    /// Build the space of a prompt and print its residue table.
    Build {
        #[arg(long = "Q")]
        q: String,
        /// Rescale the prompt first when its criterion is a nonzero constant.
        #[arg(long)]
        scale: bool,
    },
    /// Poles and residues of the form `num/den dX`, with the logarithmic
    /// verdict.
    Residues {
        /// Numerator coefficients (low degree first), JSON or `@file`.
        #[arg(long)]
        num: String,
        /// Denominator coefficients (low degree first), JSON or `@file`.
        #[arg(long)]
        den: String,
    },
    /// The standard space whose poles are the nonzero vectors of the span
    /// of the given elements.
    Standard {
        /// JSON list of field elements, e.g. `["1","mu"]`.
        #[arg(long)]
        basis: String,
    },
    /// Étale pullback of a space along `X ↦ S(X)`.
    Pullback {
        #[arg(long = "Q")]
        q: String,
        /// Coefficients of `S` (low degree first); `S'` must be constant.
        #[arg(long = "S")]
        s: String,
    },
    /// Frobenius twist of a space.
    Twist {
        #[arg(long = "Q")]
        q: String,
        /// Number of Frobenius applications.
        #[arg(long, default_value_t = 1)]
        iterate: u32,
    },
    /// Search for an affine coordinate change identifying two spaces.
    Equiv {
        #[arg(long = "Q1")]
        q1: String,
        #[arg(long = "Q2")]
        q2: String,
    },
    /// Characteristic-2 construction from parameters `(W, R)`.
    Char2 {
        /// JSON list of the `W_i` coefficient lists.
        #[arg(long = "W")]
        w: String,
        /// Coefficients of `R`.
        #[arg(long = "R")]
        r: String,
    },
    /// Replay a reference family or example.
    Replay {
        #[arg(value_enum)]
        target: ReplayTarget,
    },
    /// Exhaustive normalized search for two-dimensional prompts.
    Search {
        /// Characteristic (checked against --field).
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        lambda: usize,
        #[arg(long, default_value = "none")]
        normalization: String,
    },
    /// Randomized Moore/Dickson identity suite.
    Identities {
        /// Tuple sizes, comma separated.
        #[arg(long, default_value = "2,3")]
        sizes: String,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ReplayTarget {
    L12,
    #[value(name = "l15-f27")]
    L15F27,
    #[value(name = "l15-f81")]
    L15F81,
    #[value(name = "l15-classes")]
    L15Classes,
    L20,
}

/// Command outcome: document, text rendering and verdict.
struct Outcome {
    doc: Value,
    text: String,
    verdict: bool,
}

/// Exit code for an error: 3 for internal inconsistencies, 1 for errors
/// that are mathematical verdicts about well-formed input, 2 otherwise.
fn exit_code(e: &Error) -> u8 {
    if e.is_internal() {
        return 3;
    }
    match e {
        Error::NotVerified(_)
        | Error::NotConstantCriterion
        | Error::ZeroCriterion
        | Error::NonSimplePole(_)
        | Error::PoleOutsideField
        | Error::PolesOutsideField { .. }
        | Error::NonSimpleRoot
        | Error::RequiresExtension(_)
        | Error::NonSplitPencil
        | Error::RepeatedRoot
        | Error::DegreeDrop => 1,
        _ => 2,
    }
}

fn read_arg(text: &str) -> Result<Value, Error> {
    let body = match text.strip_prefix('@') {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| Error::MalformedInput(format!("cannot read {path}: {e}")))?,
        None => text.to_string(),
    };
    serde_json::from_str(&body).map_err(|e| Error::MalformedInput(format!("invalid JSON: {e}")))
}

fn field_opt(g: &Global) -> Result<Option<Field>, Error> {
    g.field.as_deref().map(Field::parse).transpose()
}

fn field_req(g: &Global) -> Result<Field, Error> {
    field_opt(g)?.ok_or_else(|| Error::MalformedInput("--field is required".into()))
}

fn parse_prompt(g: &Global, text: &str) -> Result<Prompt, Error> {
    let v = read_arg(text)?;
    let f = field_opt(g)?;
    Prompt::from_json(&v, f.as_ref())
}

fn parse_poly(f: &Field, text: &str) -> Result<Poly, Error> {
    Poly::from_json(&read_arg(text)?, Some(f))
}

fn space_outcome(s: &LSpace, extra: Value) -> Outcome {
    let mut doc = s.to_json();
    if let (Some(m), Some(e)) = (doc.as_object_mut(), extra.as_object()) {
        for (k, v) in e {
            m.insert(k.clone(), v.clone());
        }
    }
    let text = format!(
        "field {}  p {}  n {}  lambda {}  poles {}\n{}",
        s.field().spec(),
        s.p(),
        s.n(),
        s.lambda(),
        s.poles().len(),
        s.residue_text()
    );
    Outcome {
        doc,
        text,
        verdict: true,
    }
}

fn cmd_verify(g: &Global, q: &str) -> Result<Outcome, Error> {
    let prompt = match parse_prompt(g, q) {
        Ok(p) => p,
        Err(e @ (Error::DependentLeadingCoeffs | Error::DegreeMismatch(_) | Error::TupleTooSmall(_))) => {
            return Ok(Outcome {
                doc: json!({"schema": "lform.verify/1", "holds": false, "reason": e.to_string()}),
                text: format!("holds: false\nreason: {e}\n"),
                verdict: false,
            })
        }
        Err(e) => return Err(e),
    };
    let r = verify_prompt(&prompt)?;
    let doc = json!({
        "schema": "lform.verify/1",
        "prompt": prompt.to_json(),
        "holds": r.holds,
        "coefficient_criterion": r.coeff.criterion.to_json(),
        "determinant_value": r.det.value.to_json(),
    });
    let text = format!(
        "holds: {}\ncoefficient criterion: {}\ndeterminant value: {}\n",
        r.holds, r.coeff.criterion, r.det.value
    );
    Ok(Outcome {
        doc,
        text,
        verdict: r.holds,
    })
}

fn cmd_build(g: &Global, q: &str, scale: bool) -> Result<Outcome, Error> {
    let mut prompt = parse_prompt(g, q)?;
    let mut extra = json!({});
    if scale && !verify_prompt(&prompt)?.holds {
        let s = solve_scaling(&prompt)?;
        extra = json!({"scaling": elem_to_json(prompt.field(), s.c)});
        prompt = s.prompt;
    }
    let s = build_space(&prompt)?;
    Ok(space_outcome(&s, extra))
}

fn cmd_residues(g: &Global, num: &str, den: &str) -> Result<Outcome, Error> {
    let f = field_req(g)?;
    let w = DiffForm::from_parts(parse_poly(&f, num)?, parse_poly(&f, den)?)?;
    let v = is_logarithmic(&w)?;
    let table = poles_and_residues(&w);
    let mut text = format!(
        "logarithmic: {}\nderivative test: {}\nresidue test: {}\n",
        v.logarithmic,
        v.derivative_route,
        v.residue_route.map_or("unavailable".into(), |b| b.to_string())
    );
    let table_json = match &table {
        Ok(t) => {
            text.push_str("pole\tres\n");
            for &(x, r) in &t.entries {
                let rs = f.to_signed(r).map_or_else(|| f.fmt_elem(r), |v| v.to_string());
                text.push_str(&format!("{}\t{}\n", f.fmt_power(x), rs));
            }
            t.to_json(&f)
        }
        Err(e) => {
            text.push_str(&format!("residue table unavailable: {e}\n"));
            json!(e.to_string())
        }
    };
    Ok(Outcome {
        doc: json!({
            "schema": "lform.residues/1",
            "form": w.to_json(),
            "logarithmic": v.logarithmic,
            "derivative_route": v.derivative_route,
            "residue_route": v.residue_route,
            "residues": table_json,
        }),
        text,
        verdict: v.logarithmic,
    })
}

fn cmd_standard(g: &Global, basis: &str) -> Result<Outcome, Error> {
    let f = field_req(g)?;
    let v = read_arg(basis)?;
    let arr = v
        .as_array()
        .ok_or_else(|| Error::MalformedInput("basis must be a JSON list".into()))?;
    let a = arr
        .iter()
        .map(|e| elem_from_json(&f, e))
        .collect::<Result<Vec<_>, _>>()?;
    let s = standard_space(&f, &a)?;
    Ok(space_outcome(&s, json!({})))
}

fn cmd_pullback(g: &Global, q: &str, s: &str) -> Result<Outcome, Error> {
    let prompt = parse_prompt(g, q)?;
    let sp = build_space(&prompt)?;
    let sx = parse_poly(prompt.field(), s)?;
    let out = etale_pullback(&sp, &sx)?;
    Ok(space_outcome(&out, json!({"S": sx.to_json()})))
}

fn cmd_twist(g: &Global, q: &str, iterate: u32) -> Result<Outcome, Error> {
    let prompt = parse_prompt(g, q)?;
    let mut sp = build_space(&prompt)?;
    for _ in 0..iterate {
        sp = frobenius_twist(&sp)?;
    }
    Ok(space_outcome(&sp, json!({"iterate": iterate})))
}

fn cmd_equiv(g: &Global, q1: &str, q2: &str) -> Result<Outcome, Error> {
    let s1 = build_space(&parse_prompt(g, q1)?)?;
    let s2 = build_space(&parse_prompt(g, q2)?)?;
    let w = equivalence_witness_across(&s1, &s2)?;
    let (doc, text) = match &w {
        Some((t, a, b)) => (
            json!({"schema": "lform.equiv/1", "equivalent": true, "field": t.spec().to_string(),
                   "a": elem_to_json(t, *a), "b": elem_to_json(t, *b)}),
            format!(
                "equivalent: true\nwitness over {}: x ↦ ({})·x + ({})\n",
                t.spec(),
                t.fmt_elem(*a),
                t.fmt_elem(*b)
            ),
        ),
        None => (
            json!({"schema": "lform.equiv/1", "equivalent": false}),
            "equivalent: false\n".to_string(),
        ),
    };
    Ok(Outcome {
        doc,
        text,
        verdict: w.is_some(),
    })
}

fn cmd_char2(g: &Global, w: &str, r: &str) -> Result<Outcome, Error> {
    let f = field_req(g)?;
    let wv = read_arg(w)?;
    let ws = wv
        .as_array()
        .ok_or_else(|| Error::MalformedInput("W must be a JSON list of polynomials".into()))?
        .iter()
        .map(|e| Poly::from_json(e, Some(&f)))
        .collect::<Result<Vec<_>, _>>()?;
    let wt = WTuple::new(ws)?;
    let rp = parse_poly(&f, r)?;
    let c = general_construct(&wt, &rp)?;
    let predicted = predicted_lambda(wt.n(), wt.d(), &rp);
    let mut doc = c.to_json();
    doc["predicted_lambda"] = json!(predicted);
    let text = format!(
        "n {}  d {}  lambda {} (predicted {})\nQ:\n{}",
        wt.n(),
        wt.d(),
        c.lambda(),
        predicted,
        c.prompt
            .q()
            .iter()
            .map(|q| format!("  {q}\n"))
            .collect::<String>()
    );
    Ok(Outcome {
        doc,
        text,
        verdict: true,
    })
}

fn cmd_replay(g: &Global, target: ReplayTarget) -> Result<Outcome, Error> {
    let doc = match target {
        ReplayTarget::L12 => {
            let f = match field_opt(g)? {
                Some(f) => f,
                None => Field::parse("3^8")?,
            };
            let params = l12_parameters(&f)?;
            replay_l12(&f, &params)?
        }
        ReplayTarget::L15F27 => replay_l15(L15Which::F27)?,
        ReplayTarget::L15F81 => replay_l15(L15Which::F81)?,
        ReplayTarget::L15Classes => replay_l15_classes()?,
        ReplayTarget::L20 => replay_l20()?.0,
    };
    let (verdict, text) = match target {
        ReplayTarget::L12 => {
            let ok = doc["all_consistent"].as_bool().unwrap_or(false);
            let mut t = format!(
                "field {}  parameters {}  spaces built {}  consistent {}\n",
                doc["field"].as_str().unwrap_or(""),
                doc["parameters"],
                doc["spaces_built"],
                ok
            );
            for m in doc["members"].as_array().into_iter().flatten() {
                t.push_str(&format!(
                    "a = {}\tadmissible {}\t{}\n",
                    m["a"].as_str().unwrap_or(""),
                    m["admissible"],
                    m.get("poles").map_or_else(
                        || m["error"].as_str().unwrap_or("").to_string(),
                        |p| format!("poles {p} fibers {} common {}", m["fiber_sizes"], m["common_poles"])
                    )
                ));
            }
            (ok, t)
        }
        ReplayTarget::L15F27 | ReplayTarget::L15F81 => {
            let which = if target == ReplayTarget::L15F27 { L15Which::F27 } else { L15Which::F81 };
            let s = lform_core::classify::l15_examples(which, 0)?;
            let ok = doc["table_exact"].as_bool().unwrap_or(false);
            let mut t = format!(
                "example {}  poles {}  criterion {}  table {}/{} rows match\n",
                which.name(),
                s.space.poles().len(),
                s.criterion,
                doc["table_matched"],
                doc["table_rows"]
            );
            t.push_str("pole\tQ1/P\tQ2/P\n");
            for (x, r1, r2) in lform_core::classify::q_over_p_residues(&s.space)? {
                t.push_str(&format!("{}\t{}\t{}\n", s.space.field().fmt_power(x), r1, r2));
            }
            (ok, t)
        }
        ReplayTarget::L15Classes => {
            let ok = doc["pairwise_inequivalent"].as_bool().unwrap_or(false);
            let mut t = String::new();
            for pr in doc["pairs"].as_array().into_iter().flatten() {
                t.push_str(&format!(
                    "{} ~ {}: {}\n",
                    pr["a"].as_str().unwrap_or(""),
                    pr["b"].as_str().unwrap_or(""),
                    pr["equivalent"]
                ));
            }
            t.push_str(&format!("pairwise inequivalent: {ok}\n"));
            (ok, t)
        }
        ReplayTarget::L20 => {
            let ok = doc["newton"]["all_hold"].as_bool().unwrap_or(false)
                && doc["first_sums_vanish"].as_bool().unwrap_or(false);
            let mut t = format!(
                "field {}  lambda {}  poles {}\nfirst sums vanish: {}\ne1 = e2 = e3 = 0: {}\n",
                doc["field"].as_str().unwrap_or(""),
                doc["lambda"],
                doc["poles"],
                doc["first_sums_vanish"],
                doc["e1_e2_e3_vanish"]
            );
            for c in doc["newton"]["checks"].as_array().into_iter().flatten() {
                t.push_str(&format!("{}: {}\n", c["name"].as_str().unwrap_or(""), c["holds"]));
            }
            (ok, t)
        }
    };
    Ok(Outcome { doc, text, verdict })
}

fn cmd_search(g: &Global, p: Option<u32>, lambda: usize, normalization: &str) -> Result<Outcome, Error> {
    let f = field_req(g)?;
    if let Some(p) = p {
        if p != f.p() {
            return Err(Error::MalformedInput(format!(
                "--p {p} does not match the field characteristic {}",
                f.p()
            )));
        }
    }
    let norm: Normalization = normalization.parse()?;
    let mut cfg = SearchConfig::new(f.clone(), lambda, norm);
    cfg.max_space = g.max_space;
    cfg.jobs = g.jobs;
    let r = brute_search(&cfg)?;
    let mut text = format!("{}\ncandidates: {}\n", r.statement(), r.candidates);
    for h in &r.hits {
        text.push_str(&format!(
            "#{}\tQ1 = {}\tQ2 = {}\tvalue {}\n",
            h.index,
            h.prompt.q()[0],
            h.prompt.q()[1],
            f.fmt_elem(h.value)
        ));
    }
    Ok(Outcome {
        doc: r.to_json(),
        text,
        verdict: true,
    })
}

fn cmd_identities(g: &Global, sizes: &str) -> Result<Outcome, Error> {
    let f = field_req(g)?;
    let sizes = sizes
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::MalformedInput(format!("bad size `{s}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let r = run_identities(&f, &sizes, g.trials, &mut rng)?;
    if !r.all_pass() {
        return Err(Error::InternalInconsistency(format!(
            "identity suite failed:\n{}",
            r.to_text()
        )));
    }
    Ok(Outcome {
        doc: r.to_json(),
        text: r.to_text(),
        verdict: true,
    })
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Verify { q } => cmd_verify(g, q),
        Cmd::Build { q, scale } => cmd_build(g, q, *scale),
        Cmd::Residues { num, den } => cmd_residues(g, num, den),
        Cmd::Standard { basis } => cmd_standard(g, basis),
        Cmd::Pullback { q, s } => cmd_pullback(g, q, s),
        Cmd::Twist { q, iterate } => cmd_twist(g, q, *iterate),
        Cmd::Equiv { q1, q2 } => cmd_equiv(g, q1, q2),
        Cmd::Char2 { w, r } => cmd_char2(g, w, r),
        Cmd::Replay { target } => cmd_replay(g, *target),
        Cmd::Search {
            p,
            lambda,
            normalization,
        } => cmd_search(g, *p, *lambda, normalization),
        Cmd::Identities { sizes } => cmd_identities(g, sizes),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli);
    let (code, verdict) = match &result {
        Ok(o) => {
            if cli.global.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&o.doc).expect("JSON serialization")
                );
            } else {
                print!("{}", o.text);
            }
            (if o.verdict { 0 } else { 1 }, json!(o.verdict))
        }
        Err(e) => {
            let code = exit_code(e);
            if cli.global.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({"error": e.to_string(), "exit_code": code}))
                        .expect("JSON serialization")
                );
            }
            eprintln!("error: {e}");
            (code, json!(null))
        }
    };
    if let Some(path) = &cli.global.manifest {
        let m = json!({
            "schema": "lform.manifest/1",
            "command": std::env::args().collect::<Vec<_>>(),
            "field": cli.global.field,
            "seed": cli.global.seed,
            "version": VERSION,
            "elapsed_ms": start.elapsed().as_millis() as u64,
            "verdict": verdict,
            "exit_code": code,
        });
        if let Err(e) = fs::write(path, serde_json::to_string_pretty(&m).expect("JSON serialization")) {
            eprintln!("error: cannot write manifest {path}: {e}");
        }
    }
    ExitCode::from(code)
}
