//! The `verify` grid: closed form against both engines, cell by cell, plus
//! seeded random checks of the derivation rule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{random_homogeneous, Context, Degree, Element};
use crate::error::Result;
use crate::milnor::{self, closed_form_with, iterated_q, monomial_count, Engine, SignRule};
use crate::obstruction::q_degree_sum;

/// Which cells to run.
#[derive(Debug, Clone)]
pub struct Grid {
    pub primes: Vec<u32>,
    pub levels: Vec<u32>,
    /// Fixed class length; otherwise `1..=n+3`.
    pub m: Option<usize>,
    /// Fixed generator count; otherwise `k = m`.
    pub k: Option<usize>,
    pub exp_cap: Option<u32>,
    pub recursion_cap: Option<u32>,
    pub sign_rule: SignRule,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckFailure {
    pub check: String,
    pub detail: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellReport {
    pub p: u32,
    pub n: u32,
    pub m: usize,
    pub k: usize,
    pub terms: usize,
    pub passed: bool,
    pub failures: Vec<CheckFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleReport {
    pub p: u32,
    pub n: u32,
    pub samples: usize,
    pub passed: bool,
    pub failures: Vec<CheckFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub cells: Vec<CellReport>,
    pub samples: Vec<SampleReport>,
    pub passed: bool,
}

fn context(grid: &Grid, p: u32, k: usize) -> Result<Context> {
    let mut ctx = Context::new(p, k)?;
    if let Some(cap) = grid.exp_cap {
        ctx = ctx.with_exp_cap(cap);
    }
    if let Some(cap) = grid.recursion_cap {
        ctx = ctx.with_recursion_cap(cap);
    }
    Ok(ctx)
}

fn diff(label_a: &str, a: &Element, label_b: &str, b: &Element) -> Vec<String> {
    let delta = a.sub(b).map(|d| d.to_string()).unwrap_or_default();
    vec![
        format!("{label_a}: {a}"),
        format!("{label_b}: {b}"),
        format!("difference: {delta}"),
    ]
}

fn run_cell(grid: &Grid, p: u32, n: u32, m: usize, k: usize) -> Result<CellReport> {
    let ctx = context(grid, p, k)?;
    let x = Element::x_product(&ctx, m)?;
    let closed = closed_form_with(n as i64, m, &ctx, grid.sign_rule)?;
    let by_derivation = iterated_q(n, &x, Engine::Derivation)?;
    let by_recursion = iterated_q(n, &x, Engine::Recursive)?;

    let mut failures = Vec::new();
    let mut check = |name: &str, ok: bool, detail: Vec<String>| {
        if !ok {
            failures.push(CheckFailure {
                check: name.to_string(),
                detail,
            });
        }
    };
    check(
        "closed-form = derivation",
        closed == by_derivation,
        diff("closed-form", &closed, "derivation", &by_derivation),
    );
    check(
        "closed-form = recursive",
        closed == by_recursion,
        diff("closed-form", &closed, "recursive", &by_recursion),
    );
    let should_vanish = m <= n as usize;
    check(
        "vanishing threshold",
        by_derivation.is_zero() == should_vanish && closed.is_zero() == should_vanish,
        vec![format!(
            "expected {} for m = {m}, n = {n}",
            if should_vanish { "zero" } else { "nonzero" }
        )],
    );
    check(
        "coefficients are +-1",
        closed.has_unit_sign_coefficients(),
        vec![format!("closed-form: {closed}")],
    );
    let expected_terms = monomial_count(n as i64, m);
    check(
        "term count",
        closed.len() as u64 == expected_terms,
        vec![format!("{} terms, expected {expected_terms}", closed.len())],
    );
    if !by_derivation.is_zero() {
        let expected = m as u64 + q_degree_sum(p, n as i64);
        let got = by_derivation.degree()?;
        check(
            "degree",
            got == Degree::Homogeneous(expected as u32),
            vec![format!("degree {got}, expected {expected}")],
        );
    }
    Ok(CellReport {
        p,
        n,
        m,
        k,
        terms: closed.len(),
        passed: failures.is_empty(),
        failures,
    })
}

/// Deterministic per-(p, n) stream derived from the run seed.
fn sample_rng(seed: u64, p: u32, n: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((p as u64) << 32) | n as u64);
    rng
}

/// `Q_n(ab) = Q_n(a) b + (-1)^{|a|} a Q_n(b)` for one engine.
fn leibniz_defect(n: u32, a: &Element, b: &Element, engine: Engine) -> Result<Option<Vec<String>>> {
    let q = |e: &Element| match engine {
        Engine::Derivation => milnor::milnor_q_derivation(n, e),
        Engine::Recursive => crate::steenrod::milnor_q_recursive(n, e),
    };
    let lhs = q(&a.mul(b)?)?;
    let first = q(a)?.mul(b)?;
    let second = a.mul(&q(b)?)?;
    let odd_a = matches!(a.degree()?, Degree::Homogeneous(d) if d % 2 == 1);
    let sign_matters = a.context().is_odd() && odd_a;
    let rhs = if sign_matters {
        first.sub(&second)?
    } else {
        first.add(&second)?
    };
    Ok((lhs != rhs).then(|| {
        let mut d = vec![format!("engine {engine}: a = {a}, b = {b}")];
        d.extend(diff("Q(ab)", &lhs, "Q(a)b +- aQ(b)", &rhs));
        d
    }))
}

fn run_samples(grid: &Grid, p: u32, n: u32) -> Result<SampleReport> {
    let ctx = context(grid, p, 3)?;
    let mut rng = sample_rng(grid.seed, p, n);
    let mut failures = Vec::new();
    for _ in 0..grid.samples {
        let da = rand::Rng::gen_range(&mut rng, 1..=4);
        let db = rand::Rng::gen_range(&mut rng, 1..=4);
        let a = random_homogeneous(&ctx, da, 3, &mut rng);
        let b = random_homogeneous(&ctx, db, 3, &mut rng);
        for engine in [Engine::Derivation, Engine::Recursive] {
            if let Some(detail) = leibniz_defect(n, &a, &b, engine)? {
                failures.push(CheckFailure {
                    check: "derivation rule".into(),
                    detail,
                });
            }
        }
        let der = milnor::milnor_q_derivation(n, &a)?;
        let rec = crate::steenrod::milnor_q_recursive(n, &a)?;
        if der != rec {
            failures.push(CheckFailure {
                check: "engines agree".into(),
                detail: diff("derivation", &der, "recursive", &rec),
            });
        }
    }
    Ok(SampleReport {
        p,
        n,
        samples: grid.samples,
        passed: failures.is_empty(),
        failures,
    })
}

/// Run every cell of the grid in a fixed order.
pub fn run_grid(grid: &Grid) -> Result<VerifyReport> {
    let mut cells = Vec::new();
    let mut samples = Vec::new();
    for &p in &grid.primes {
        for &n in &grid.levels {
            let lengths: Vec<usize> = match grid.m {
                Some(m) => vec![m],
                None => (1..=n as usize + 3).collect(),
            };
            for m in lengths {
                let k = grid.k.unwrap_or(m);
                if m > k {
                    continue;
                }
                cells.push(run_cell(grid, p, n, m, k)?);
            }
            if grid.samples > 0 {
                samples.push(run_samples(grid, p, n)?);
            }
        }
    }
    let passed = cells.iter().all(|c| c.passed) && samples.iter().all(|s| s.passed);
    Ok(VerifyReport {
        cells,
        samples,
        passed,
    })
}

impl VerifyReport {
    pub fn failure_count(&self) -> usize {
        self.cells.iter().map(|c| c.failures.len()).sum::<usize>()
            + self.samples.iter().map(|s| s.failures.len()).sum::<usize>()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            out.push_str(&format!(
                "cell p={} n={} m={} k={} terms={} {}\n",
                c.p,
                c.n,
                c.m,
                c.k,
                c.terms,
                if c.passed { "PASS" } else { "FAIL" }
            ));
            render_failures(&mut out, &c.failures);
        }
        for s in &self.samples {
            out.push_str(&format!(
                "samples p={} n={} count={} {}\n",
                s.p,
                s.n,
                s.samples,
                if s.passed { "PASS" } else { "FAIL" }
            ));
            render_failures(&mut out, &s.failures);
        }
        out.push_str(&format!(
            "summary: {} cells, {} sample sets, {} failures\n",
            self.cells.len(),
            self.samples.len(),
            self.failure_count()
        ));
        out
    }
}

fn render_failures(out: &mut String, failures: &[CheckFailure]) {
    for f in failures {
        out.push_str(&format!("  failed: {}\n", f.check));
        for line in &f.detail {
            out.push_str(&format!("    {line}\n"));
        }
    }
}
