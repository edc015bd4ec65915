//! Randomized exact checks of the Moore-determinant and Dickson identities.
//!
//! Every identity below is a polynomial identity in the tuple entries, so a
//! single failure on any input is a bug in the arithmetic kernel.  The suite
//! is used both as a regression oracle in the tests and by the `identities`
//! subcommand of the command-line tool.

use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ff::{Fe, Field};
use crate::linalg::{cofactor_mod_p, det_mod_p};
use crate::moore::{
    apply_matrix, dickson, geometric, is_independent, minor_map, moore_det, moore_det_product,
    structural_from_dickson, structural_poly, MAX_TUPLE,
};

/// Names of the identities, in report order.
pub const IDENTITY_NAMES: [&str; 8] = [
    "moore_product",
    "minor_map_determinant",
    "minor_map_square",
    "nested_moore",
    "structural_factorization",
    "minor_map_equivariance",
    "dickson_ratio",
    "dickson_structural",
];

/// Outcome of one identity over all trials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: String,
    pub trials: usize,
    pub passed: usize,
    /// Description of the first failing input, if any.
    pub first_failure: Option<String>,
}

impl IdentityCheck {
    fn new(name: &str) -> Self {
        IdentityCheck {
            name: name.to_string(),
            trials: 0,
            passed: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.trials += 1;
        if ok {
            self.passed += 1;
        } else if self.first_failure.is_none() {
            self.first_failure = Some(what());
        }
    }

    pub fn all_pass(&self) -> bool {
        self.passed == self.trials
    }
}

/// Results of [`run_identities`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub field: String,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(IdentityCheck::all_pass)
    }

    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": "lform.identities/1",
            "field": self.field,
            "sizes": self.sizes,
            "trials": self.trials,
            "all_pass": self.all_pass(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "trials": c.trials,
                "passed": c.passed,
                "first_failure": c.first_failure,
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "field {}  sizes {:?}  trials {}\n",
            self.field, self.sizes, self.trials
        );
        for c in &self.checks {
            s.push_str(&format!(
                "{:<26} {:>6}/{:<6} {}\n",
                c.name,
                c.passed,
                c.trials,
                if c.all_pass() { "ok" } else { "FAIL" }
            ));
            if let Some(w) = &c.first_failure {
                s.push_str(&format!("    first failure: {w}\n"));
            }
        }
        s
    }
}

fn random_tuple<R: Rng + ?Sized>(f: &Field, n: usize, rng: &mut R) -> Vec<Fe> {
    (0..n).map(|_| f.random(rng)).collect()
}

/// A uniformly random F_p-independent tuple (rejection sampling).
pub fn random_independent<R: Rng + ?Sized>(f: &Field, n: usize, rng: &mut R) -> Result<Vec<Fe>> {
    if n > f.k() as usize {
        return Err(Error::FieldTooSmall(format!(
            "no {n} F_p-independent elements in {}",
            f.spec()
        )));
    }
    loop {
        let t = random_tuple(f, n, rng);
        if is_independent(f, &t)? {
            return Ok(t);
        }
    }
}

/// A uniformly random invertible matrix over F_p with entries in `[0,p)`.
pub fn random_gl<R: Rng + ?Sized>(p: u32, n: usize, rng: &mut R) -> Vec<Vec<i64>> {
    loop {
        let m: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(0..p as i64)).collect())
            .collect();
        if det_mod_p(p as i64, &m) != 0 {
            return m;
        }
    }
}

fn show(f: &Field, t: &[Fe]) -> String {
    let parts: Vec<String> = t.iter().map(|&x| f.fmt_elem(x)).collect();
    format!("[{}]", parts.join(", "))
}

/// Runs every identity `trials` times for each tuple size in `sizes`
/// (sizes must be at least 2; the nested identity uses the fixed shapes
/// (n,m) ∈ {(2,1),(2,2),(3,1)} once per trial).  Identities that need an
/// independent tuple are only exercised for sizes up to the field degree.
pub fn run_identities<R: Rng + ?Sized>(
    f: &Field,
    sizes: &[usize],
    trials: usize,
    rng: &mut R,
) -> Result<IdentityReport> {
    let p = f.p();
    let pu = p as u64;
    if let Some(&n) = sizes.iter().find(|&&n| !(2..=MAX_TUPLE - 1).contains(&n)) {
        return Err(if n < 2 {
            Error::TupleTooSmall(2)
        } else {
            Error::TupleTooLarge(MAX_TUPLE - 1)
        });
    }
    let mut checks: Vec<IdentityCheck> = IDENTITY_NAMES.iter().map(|n| IdentityCheck::new(n)).collect();
    for _ in 0..trials {
        for &n in sizes {
            // Identities valid for arbitrary tuples.
            let a = random_tuple(f, n, rng);
            let dn = moore_det(f, &a)?;
            checks[0].record(moore_det_product(f, &a) == dn, || show(f, &a));

            let phi = minor_map(f, &a)?;
            let lhs = moore_det(f, &phi)?;
            let rhs = f.pow_u(dn, geometric(pu, n as i64 - 2));
            checks[1].record(lhs == rhs, || show(f, &a));

            let phi2 = minor_map(f, &phi)?;
            let mut c = f.pow_u(dn, geometric(pu, n as i64 - 3));
            if n % 2 == 0 {
                c = f.neg(c);
            }
            let expect: Vec<Fe> = a
                .iter()
                .map(|&x| f.mul(c, f.pow_u(x, pu.pow(n as u32 - 2))))
                .collect();
            checks[2].record(phi2 == expect, || show(f, &a));

            let m = random_gl(p, n, rng);
            let cof = cofactor_mod_p(p as i64, &m);
            let lhs = minor_map(f, &apply_matrix(f, &a, &m))?;
            let rhs = apply_matrix(f, &phi, &cof);
            checks[5].record(lhs == rhs, || format!("{} with M = {m:?}", show(f, &a)));

            // Identities needing an independent tuple; a field of degree k
            // over F_p holds none of length n > k.
            if n > f.k() as usize {
                continue;
            }
            let a = random_independent(f, n, rng)?;
            for t in 0..=n {
                let head = &a[..n - t];
                let pv = structural_poly(f, head)?;
                let images: Vec<Fe> = a[n - t..].iter().map(|&x| pv.eval(x)).collect();
                let rhs = f.mul(moore_det(f, head)?, moore_det(f, &images)?);
                checks[4].record(moore_det(f, &a)? == rhs, || format!("{} t={t}", show(f, &a)));
            }

            let cn = dickson(f, &a)?;
            let cm = dickson(f, &a[..n - 1])?;
            let ratio = f.div(moore_det(f, &a)?, moore_det(f, &a[..n - 1])?)?;
            let lhs = f.pow_u(ratio, pu - 1);
            let rhs = f.sub(cn[n - 1], f.pow_u(cm[n - 2], pu));
            checks[6].record(lhs == rhs, || show(f, &a));

            checks[7].record(structural_from_dickson(f, &cn) == structural_poly(f, &a)?, || show(f, &a));
        }
        for &(n, m) in &[(2usize, 1usize), (2, 2), (3, 1)] {
            let y = random_tuple(f, n, rng);
            let x = random_tuple(f, m, rng);
            let inner: Vec<Fe> = y
                .iter()
                .map(|&yi| {
                    let mut t = vec![yi];
                    t.extend_from_slice(&x);
                    moore_det(f, &t)
                })
                .collect::<Result<_>>()?;
            let lhs = moore_det(f, &inner)?;
            let mut yx = y.clone();
            yx.extend_from_slice(&x);
            let e = geometric(pu, n as i64 - 1) - 1;
            let rhs = f.mul(f.pow_u(moore_det(f, &x)?, e), moore_det(f, &yx)?);
            checks[3].record(lhs == rhs, || format!("Y={} X={}", show(f, &y), show(f, &x)));
        }
    }
    Ok(IdentityReport {
        field: f.spec().to_string(),
        sizes: sizes.to_vec(),
        trials,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn suite_passes_over_f9() {
        let f = Field::parse("3^2").unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let r = run_identities(&f, &[2, 3], 5, &mut rng).unwrap();
        assert!(r.all_pass(), "{}", r.to_text());
    }
}
