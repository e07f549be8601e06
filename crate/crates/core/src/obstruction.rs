//! Degree bookkeeping for the Brown-Peterson tower and non-liftability
//! certificates.
//!
//! If `Q_{n+1} ··· Q_0 (x) ≠ 0` in mod-p cohomology then `q_n ··· q_0 (x)` is a
//! nonzero class in `BP<n>` that does not lift to `BP<n+1>`, and on a suitable
//! Godeaux-Serre variety it is not in the image of the cycle map. The spectra
//! never appear here as objects: a [`Certificate`] records the mod-p witness
//! together with the degrees in which each piece of that argument lives, and
//! can be re-checked from its own contents.

use serde::{Deserialize, Serialize};

use crate::algebra::{parse, Context, Degree, Element};
use crate::error::{Error, Result};
use crate::milnor::{iterated_q, Engine};

/// Schema tag written into every serialized certificate.
pub const CERT_SCHEMA: &str = "cert-v1";

fn pow(p: u32, i: u32) -> u64 {
    (p as u64)
        .checked_pow(i)
        .unwrap_or_else(|| panic!("{p}^{i} overflows u64"))
}

/// `w(n) = p^n + ... + p + 1`, with `w(-1) = 0`.
pub fn w(p: u32, n: i64) -> u64 {
    assert!(n >= -1, "w(n) is defined for n >= -1");
    (0..=n).map(|i| pow(p, i as u32)).sum()
}

/// `|Q_i| = 2p^i - 1`.
pub fn q_op_degree(p: u32, i: u32) -> u64 {
    2 * pow(p, i) - 1
}

/// `Σ_{i=0}^{n} |Q_i|`, summed term by term. Equals `2w(n) - n - 1`.
pub fn q_degree_sum(p: u32, n: i64) -> u64 {
    (0..=n).map(|i| q_op_degree(p, i as u32)).sum()
}

/// A record that `q_n ··· q_0 (source_class)` does not lift from `BP<n>` to `BP<n+1>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub p: u32,
    pub n: u32,
    pub k: usize,
    pub m: usize,
    pub source_class: Element,
    pub witness: Element,
    pub source_degree: u64,
    pub bp_degree: u64,
    pub witness_degree: u64,
    pub wilson_bound: u64,
    pub variety_dimension: u64,
    pub statement: String,
}

/// Flat serialized form of a [`Certificate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub schema: String,
    pub p: u32,
    pub n: u32,
    pub k: usize,
    pub m: usize,
    pub source_class: String,
    pub witness: String,
    pub source_degree: u64,
    pub bp_degree: u64,
    pub witness_degree: u64,
    pub wilson_bound: u64,
    pub variety_dimension: u64,
    pub statement: String,
}

/// The degree fields implied by `(p, n, source_degree)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Degrees {
    bp: u64,
    witness: u64,
    wilson: u64,
    variety: u64,
}

impl Degrees {
    fn derive(p: u32, n: u32, source_degree: u64) -> Self {
        let n = n as i64;
        let witness = source_degree + 2 * w(p, n + 1) - n as u64 - 2;
        Degrees {
            bp: source_degree + 2 * w(p, n) - n as u64 - 1,
            witness,
            wilson: 2 * w(p, n),
            // The classifying map has to be connected through the witness degree.
            variety: (2 * w(p, n + 1) + 1).max(witness),
        }
    }
}

fn composite_name(letter: char, top: u32) -> String {
    if top == 0 {
        format!("{letter}_0")
    } else {
        format!("{letter}_{top}...{letter}_0")
    }
}

fn statement(p: u32, n: u32, k: usize, d: &Degrees) -> String {
    format!(
        "{big}(x) is nonzero in H^{wd}((Z/{p})^{k}; F_{p}). Hence {small}(x) is a \
         nonzero class in BP<{n}>^{bp}(B(Z/{p})^{k}) outside the image of BP<{n1}> -> BP<{n}>, \
         while BP -> BP<{n}> is onto only through degree {wb}. Pulled back to a smooth \
         projective variety of dimension {dim} with a {dim}-connected map to \
         B(Z/{p})^{k} x K(Z,2), the class stays outside the image of BP<{n1}> and is not in \
         the image of the cycle map cl_{n}, because the mod-{p} cycle map factors through \
         BP^*(X) tensor Z/{p}.",
        n1 = n + 1,
        big = composite_name('Q', n + 1),
        small = composite_name('q', n),
        wd = d.witness,
        bp = d.bp,
        wb = d.wilson,
        dim = d.variety,
    )
}

fn support_size(x: &Element) -> usize {
    let mut used = 0u64;
    for (m, _) in x.terms() {
        used |= m.ext_mask();
        for (i, &e) in m.exponents().iter().enumerate() {
            if e > 0 {
                used |= 1 << i;
            }
        }
    }
    used.count_ones() as usize
}

/// `Q_{n+1} ··· Q_0 (x)` by both engines; an error if they differ.
pub fn witness(n: u32, x: &Element) -> Result<Element> {
    let by_derivation = iterated_q(n + 1, x, Engine::Derivation)?;
    let by_recursion = iterated_q(n + 1, x, Engine::Recursive)?;
    if by_derivation != by_recursion {
        return Err(Error::EngineDisagreement {
            input: format!("Q_{}...Q_0({x})", n + 1),
            derivation: by_derivation.to_string(),
            recursive: by_recursion.to_string(),
        });
    }
    Ok(by_derivation)
}

/// Certificate for `x` at level `n`, or `None` when `Q_{n+1} ··· Q_0 (x) = 0`.
pub fn detect_nonliftable(n: u32, x: &Element) -> Result<Option<Certificate>> {
    let source_degree = match x.degree()? {
        Degree::Homogeneous(d) => d as u64,
        Degree::Mixed => {
            return Err(Error::MixedDegree {
                op: "detect_nonliftable",
            })
        }
    };
    let wit = witness(n, x)?;
    if wit.is_zero() {
        return Ok(None);
    }
    let ctx = x.context();
    let degrees = Degrees::derive(ctx.p(), n, source_degree);
    let cert = Certificate {
        p: ctx.p(),
        n,
        k: ctx.k(),
        m: support_size(x),
        source_class: x.clone(),
        witness: wit,
        source_degree,
        bp_degree: degrees.bp,
        witness_degree: degrees.witness,
        wilson_bound: degrees.wilson,
        variety_dimension: degrees.variety,
        statement: statement(ctx.p(), n, ctx.k(), &degrees),
    };
    cert.check_degrees()?;
    Ok(Some(cert))
}

/// The certificate for `x_1 ··· x_{n+3}` in `(Z/p)^{n+3}`, with default caps.
pub fn minimal_example(p: u32, n: u32) -> Result<Certificate> {
    minimal_example_in(&Context::new(p, 1)?, n)
}

/// [`minimal_example`] using the prime and caps of `base`.
pub fn minimal_example_in(base: &Context, n: u32) -> Result<Certificate> {
    let m = n as usize + 3;
    let ctx = base.with_k(m)?;
    let x = Element::x_product(&ctx, m)?;
    let cert = detect_nonliftable(n, &x)?.ok_or_else(|| {
        Error::Assertion(format!(
            "Q_{}...Q_0(x1...x{m}) vanished at p = {}",
            n + 1,
            ctx.p()
        ))
    })?;
    let p = ctx.p();
    let wn = w(p, n as i64);
    let ensure = |ok: bool, what: String| {
        if ok {
            Ok(())
        } else {
            Err(Error::Assertion(what))
        }
    };
    ensure(
        cert.source_degree == m as u64,
        format!("source degree {} != {m}", cert.source_degree),
    )?;
    ensure(
        cert.bp_degree == 2 * wn + 2,
        format!("bp_degree {} != 2w(n)+2 = {}", cert.bp_degree, 2 * wn + 2),
    )?;
    ensure(
        cert.bp_degree == cert.wilson_bound + 2,
        format!(
            "bp_degree {} != wilson bound {} + 2",
            cert.bp_degree, cert.wilson_bound
        ),
    )?;
    ensure(
        cert.variety_dimension == 2 * w(p, n as i64 + 1) + 1,
        format!("variety dimension {}", cert.variety_dimension),
    )?;
    if p == 2 {
        ensure(
            cert.bp_degree == 1 << (n + 2),
            format!("bp_degree {} != 2^(n+2)", cert.bp_degree),
        )?;
    }
    Ok(cert)
}

impl Certificate {
    /// The degree ledger, re-derived from `(p, n, source_degree)` and compared.
    pub fn check_degrees(&self) -> Result<()> {
        let d = Degrees::derive(self.p, self.n, self.source_degree);
        let n = self.n as i64;
        let mismatch = |field: &str, got: u64, want: u64| {
            Err(Error::Certificate(format!(
                "{field} is {got}, expected {want}"
            )))
        };
        if self.bp_degree != d.bp {
            return mismatch("bp_degree", self.bp_degree, d.bp);
        }
        if self.witness_degree != d.witness {
            return mismatch("witness_degree", self.witness_degree, d.witness);
        }
        if self.wilson_bound != d.wilson {
            return mismatch("wilson_bound", self.wilson_bound, d.wilson);
        }
        if self.variety_dimension != d.variety {
            return mismatch("variety_dimension", self.variety_dimension, d.variety);
        }
        // Independent route: the same shifts as sums of |Q_i|.
        if self.bp_degree - self.source_degree != q_degree_sum(self.p, n)
            || self.witness_degree - self.source_degree != q_degree_sum(self.p, n + 1)
        {
            return Err(Error::Certificate(
                "degree shifts disagree with the sum of |Q_i|".into(),
            ));
        }
        if self.source_class.degree() != Ok(Degree::Homogeneous(self.source_degree as u32)) {
            return Err(Error::Certificate(format!(
                "source class does not have degree {}",
                self.source_degree
            )));
        }
        if self.witness.degree() != Ok(Degree::Homogeneous(self.witness_degree as u32)) {
            return Err(Error::Certificate(format!(
                "witness does not have degree {}",
                self.witness_degree
            )));
        }
        Ok(())
    }

    /// Re-check everything: degrees, statement, and the witness recomputed by both engines.
    pub fn verify(&self) -> Result<()> {
        self.check_degrees()?;
        let d = Degrees::derive(self.p, self.n, self.source_degree);
        if self.statement != statement(self.p, self.n, self.k, &d) {
            return Err(Error::Certificate("statement text does not match".into()));
        }
        if self.m != support_size(&self.source_class) {
            return Err(Error::Certificate(format!(
                "m = {} but the source class involves {} generators",
                self.m,
                support_size(&self.source_class)
            )));
        }
        let recomputed = witness(self.n, &self.source_class)?;
        if recomputed.is_zero() {
            return Err(Error::Certificate("the witness vanishes".into()));
        }
        if recomputed != self.witness {
            return Err(Error::Certificate(format!(
                "recorded witness differs from recomputed {recomputed}"
            )));
        }
        Ok(())
    }

    pub fn to_doc(&self) -> CertificateDoc {
        CertificateDoc {
            schema: CERT_SCHEMA.to_string(),
            p: self.p,
            n: self.n,
            k: self.k,
            m: self.m,
            source_class: self.source_class.to_string(),
            witness: self.witness.to_string(),
            source_degree: self.source_degree,
            bp_degree: self.bp_degree,
            witness_degree: self.witness_degree,
            wilson_bound: self.wilson_bound,
            variety_dimension: self.variety_dimension,
            statement: self.statement.clone(),
        }
    }

    /// Rebuild from the serialized form, using default caps for the context.
    pub fn from_doc(doc: &CertificateDoc) -> Result<Certificate> {
        if doc.schema != CERT_SCHEMA {
            return Err(Error::Certificate(format!(
                "unknown schema '{}'",
                doc.schema
            )));
        }
        let ctx = Context::new(doc.p, doc.k)?;
        Ok(Certificate {
            p: doc.p,
            n: doc.n,
            k: doc.k,
            m: doc.m,
            source_class: parse(&doc.source_class, &ctx)?,
            witness: parse(&doc.witness, &ctx)?,
            source_degree: doc.source_degree,
            bp_degree: doc.bp_degree,
            witness_degree: doc.witness_degree,
            wilson_bound: doc.wilson_bound,
            variety_dimension: doc.variety_dimension,
            statement: doc.statement.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Certificate> {
        let doc: CertificateDoc =
            serde_json::from_str(text).map_err(|e| Error::Certificate(e.to_string()))?;
        Self::from_doc(&doc)
    }
}

/// One row of the tower degree table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerRow {
    pub n: u32,
    pub q_degree: u64,
    pub v_shift: u64,
    pub w: u64,
    pub wilson_bound: u64,
    pub bp_degree: u64,
    pub variety_dimension: u64,
}

/// Degree data for levels `0..=n_max`.
pub fn tower_degree_table(p: u32, n_max: u32) -> Vec<TowerRow> {
    (0..=n_max)
        .map(|n| {
            let wn = w(p, n as i64);
            TowerRow {
                n,
                q_degree: q_op_degree(p, n),
                v_shift: 2 * (pow(p, n) - 1),
                w: wn,
                wilson_bound: 2 * wn,
                bp_degree: 2 * wn + 2,
                variety_dimension: 2 * w(p, n as i64 + 1) + 1,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w_values() {
        assert_eq!(w(2, 2), 7);
        assert_eq!(w(3, 1), 4);
        for p in [2, 3, 5, 7] {
            assert_eq!(w(p, 0), 1);
            assert_eq!(w(p, -1), 0);
        }
    }

    #[test]
    fn q_degrees() {
        assert_eq!(q_op_degree(2, 0), 1);
        assert_eq!(q_op_degree(2, 2), 7);
        assert_eq!(q_op_degree(3, 1), 5);
        for p in [2u32, 3, 5, 7, 11] {
            for n in -1i64..8 {
                assert_eq!(q_degree_sum(p, n), 2 * w(p, n) - (n + 1) as u64);
            }
        }
        // At p = 2: 2^{n+2} - 3 - n.
        for n in 0..10i64 {
            assert_eq!(q_degree_sum(2, n) as i64, (1i64 << (n + 2)) - 3 - n);
        }
    }

    #[test]
    fn detect_x1x2x3_at_level_zero() {
        let ctx = Context::new(2, 3).unwrap();
        let x = Element::x_product(&ctx, 3).unwrap();
        let cert = detect_nonliftable(0, &x).unwrap().unwrap();
        assert_eq!(cert.bp_degree, 4);
        assert_eq!(cert.witness_degree, 3 + 2 * w(2, 1) - 2);
        assert_eq!(cert.witness_degree, 7);
        assert_eq!(cert.m, 3);
        cert.verify().unwrap();
    }

    #[test]
    fn detect_absent_cases() {
        let ctx = Context::new(2, 1).unwrap();
        let x = Element::x(&ctx, 1).unwrap();
        assert_eq!(detect_nonliftable(1, &x).unwrap(), None);
        let ctx = Context::new(3, 4).unwrap();
        let x = Element::x_product(&ctx, 4).unwrap();
        assert!(detect_nonliftable(0, &x).unwrap().is_some());
    }

    #[test]
    fn detect_rejects_bad_inputs() {
        let ctx = Context::new(3, 2).unwrap();
        assert_eq!(
            detect_nonliftable(0, &Element::zero(&ctx)),
            Err(Error::ZeroDegree)
        );
        let mixed = parse("x1 + y1", &ctx).unwrap();
        assert!(matches!(
            detect_nonliftable(0, &mixed),
            Err(Error::MixedDegree { .. })
        ));
        let capped = Context::new(3, 3).unwrap().with_recursion_cap(0);
        let x = Element::x_product(&capped, 3).unwrap();
        assert!(matches!(
            detect_nonliftable(0, &x),
            Err(Error::RecursionCap { .. })
        ));
    }

    #[test]
    fn minimal_examples() {
        let c = minimal_example(2, 0).unwrap();
        assert_eq!((c.bp_degree, c.variety_dimension, c.k, c.m), (4, 7, 3, 3));
        assert_eq!(c.source_class.to_string(), "x1*x2*x3");
        assert_eq!(minimal_example(2, 1).unwrap().bp_degree, 8);
        let c = minimal_example(3, 0).unwrap();
        assert_eq!((c.bp_degree, c.variety_dimension), (4, 9));
        let c = minimal_example(5, 0).unwrap();
        assert_eq!((c.bp_degree, c.k), (4, 3));
    }

    #[test]
    fn json_round_trip_and_tamper_detection() {
        let cert = minimal_example(3, 1).unwrap();
        let json = cert.to_json();
        assert!(json.contains("\"schema\": \"cert-v1\""));
        let back = Certificate::from_json(&json).unwrap();
        assert_eq!(back, cert);
        back.verify().unwrap();

        let mut doc = cert.to_doc();
        doc.bp_degree += 2;
        let tampered = Certificate::from_doc(&doc).unwrap();
        assert!(matches!(tampered.verify(), Err(Error::Certificate(_))));

        let mut doc = cert.to_doc();
        doc.witness = "y1^3*y2*y3*x4".into();
        let tampered = Certificate::from_doc(&doc).unwrap();
        assert!(tampered.verify().is_err());

        let mut doc = cert.to_doc();
        doc.schema = "cert-v0".into();
        assert!(Certificate::from_doc(&doc).is_err());
        assert!(Certificate::from_json("{\"schema\": \"cert-v1\"}").is_err());
    }

    #[test]
    fn table_rows() {
        let rows = tower_degree_table(2, 1);
        assert_eq!(
            rows[1],
            TowerRow {
                n: 1,
                q_degree: 3,
                v_shift: 2,
                w: 3,
                wilson_bound: 6,
                bp_degree: 8,
                variety_dimension: 15
            }
        );
        let rows = tower_degree_table(3, 0);
        assert_eq!(
            rows,
            vec![TowerRow {
                n: 0,
                q_degree: 1,
                v_shift: 0,
                w: 1,
                wilson_bound: 2,
                bp_degree: 4,
                variety_dimension: 9
            }]
        );
        for p in [2, 3, 5] {
            assert_eq!(tower_degree_table(p, 4)[0].v_shift, 0);
        }
    }
}
