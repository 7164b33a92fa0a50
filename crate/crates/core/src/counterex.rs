//! Counterexample reports over the family `d(α) = 360(10α² + α) + 15`.
//!
//! For each eligible ring the pipeline takes the D(2) quadruple at
//! `m = k = 0`, scales it by `ε^t` to get property D(2ε^{2t}), and attaches
//! the certificate that `2ε^{2t}` is not a difference of two squares.

use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{
    construct_quadruple, scale_quadruple, unit_power, verify_quadruple, FactorizationChoice,
    Quadruple, QuadrupleDoc,
};
use crate::pellsolve::norm6_hypotheses;
use crate::quadring::{is_square_free, QuadInt, RingCtx};
use crate::repr::{certify_nonrepresentable, NonRepCertificate};

pub const DEFAULT_T_CAP: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CounterexError {
    #[error("empty range: alpha_lo = {lo} > alpha_hi = {hi}")]
    EmptyRange { lo: i64, hi: i64 },
    #[error("t = {0} must be nonnegative")]
    NegativeT(i64),
    #[error("t = {t} exceeds the cap {cap}")]
    TCapExceeded { t: u64, cap: u64 },
    #[error("{stage}: {message}")]
    Stage {
        stage: &'static str,
        message: String,
    },
    #[error("report JSON: {0}")]
    Json(String),
}

fn stage(stage: &'static str) -> impl FnOnce(String) -> CounterexError {
    move |message| CounterexError::Stage { stage, message }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DCandidate {
    pub alpha: i64,
    #[serde(with = "crate::quadring::dec_string")]
    pub d: BigInt,
    /// `60α + 3`, with `x² − d = −6`.
    #[serde(with = "crate::quadring::dec_string")]
    pub x: BigInt,
    pub square_free: bool,
}

pub fn family_d(alpha: i64) -> DCandidate {
    let a = BigInt::from(alpha);
    let d = (&a * &a * 10 + &a) * 360 + 15;
    let x = &a * 60 + 3;
    assert_eq!(&x * &x - &d, BigInt::from(-6));
    let square_free = is_square_free(&d);
    DCandidate {
        alpha,
        d,
        x,
        square_free,
    }
}

/// All candidates for `alpha_lo ≤ α ≤ alpha_hi`, in order of `α`.
pub fn enumerate_counterexample_rings(
    alpha_lo: i64,
    alpha_hi: i64,
) -> Result<Vec<DCandidate>, CounterexError> {
    if alpha_lo > alpha_hi {
        return Err(CounterexError::EmptyRange {
            lo: alpha_lo,
            hi: alpha_hi,
        });
    }
    Ok((alpha_lo..=alpha_hi)
        .into_par_iter()
        .map(family_d)
        .collect())
}

#[derive(Debug, Clone, Copy)]
pub struct ReportOptions {
    pub t_cap: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            t_cap: DEFAULT_T_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterexampleReport {
    pub d: BigInt,
    pub t: u64,
    pub n: QuadInt,
    pub quadruple: Quadruple,
    pub certificate: Option<NonRepCertificate>,
    pub verified: bool,
    pub notes: Vec<String>,
}

pub fn build_report(ctx: &RingCtx, t: i64) -> Result<CounterexampleReport, CounterexError> {
    build_report_with(ctx, t, &ReportOptions::default())
}

pub fn build_report_with(
    ctx: &RingCtx,
    t: i64,
    opts: &ReportOptions,
) -> Result<CounterexampleReport, CounterexError> {
    let t = u64::try_from(t).map_err(|_| CounterexError::NegativeT(t))?;
    if t > opts.t_cap {
        return Err(CounterexError::TCapExceeded { t, cap: opts.t_cap });
    }
    if !ctx.square_free() {
        return Err(stage("eligibility")(format!(
            "d = {} is not square-free",
            ctx.d()
        )));
    }
    norm6_hypotheses(ctx).map_err(|e| stage("eligibility")(e.to_string()))?;

    let eps_t = unit_power(ctx, t);
    let n = ctx.square(&eps_t).scale(&BigInt::from(2));
    let (base, trace) = construct_quadruple(ctx, 0, 0, 0, FactorizationChoice::First)
        .map_err(|e| stage("construct")(e.to_string()))?;
    let quadruple =
        scale_quadruple(ctx, &base, &eps_t).map_err(|e| stage("scale")(e.to_string()))?;
    if quadruple.n != n {
        return Err(stage("scale")(format!(
            "scaled shift ({}) differs from 2ε^(2t) = ({n})",
            quadruple.n
        )));
    }
    let certificate = certify_nonrepresentable(ctx, &n);
    if certificate.is_none() {
        return Err(stage("certify")(format!("no certificate for n = ({n})")));
    }
    let verified = verify_quadruple(ctx, &quadruple).all_pass;

    let eps = ctx.fundamental_unit().as_quad();
    let notes = vec![
        format!("fundamental unit ({eps})"),
        format!(
            "base D(2) quadruple from (gamma,delta) = ({}), a = ({}), unit index {}",
            trace.gamma_delta, trace.unit_a, trace.unit_index
        ),
        format!("scaled by ({eps})^{t}"),
    ];
    Ok(CounterexampleReport {
        d: ctx.d().clone(),
        t,
        n,
        quadruple,
        certificate,
        verified,
        notes,
    })
}

/// A report for each eligible candidate, in candidate order; ineligible
/// ones map to `None`.
pub fn build_reports(
    candidates: &[DCandidate],
    t: i64,
    opts: &ReportOptions,
) -> Vec<Option<Result<CounterexampleReport, CounterexError>>> {
    candidates
        .par_iter()
        .map(|c| {
            if !c.square_free {
                return None;
            }
            Some(
                RingCtx::new(c.d.clone())
                    .map_err(|e| stage("ring")(e.to_string()))
                    .and_then(|ctx| build_report_with(&ctx, t, opts)),
            )
        })
        .collect()
}

/// Serialized report: `{"d", "t", "n", "quadruple", "certificate",
/// "verified", "notes"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub d: String,
    pub t: u64,
    pub n: QuadInt,
    pub quadruple: QuadrupleDoc,
    pub certificate: Option<NonRepCertificate>,
    pub verified: bool,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl CounterexampleReport {
    pub fn to_doc(&self) -> ReportDoc {
        let ctx =
            RingCtx::allowing_non_square_free(self.d.clone()).expect("report rings are valid");
        ReportDoc {
            d: self.d.to_string(),
            t: self.t,
            n: self.n.clone(),
            quadruple: self.quadruple.to_document(&ctx),
            certificate: self.certificate.clone(),
            verified: self.verified,
            notes: self.notes.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("report serializes")
    }
}

/// Outcome of checking a serialized report with no pipeline state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Recheck {
    pub square_free: bool,
    pub quadruple_ok: bool,
    pub n_matches_unit_power: bool,
    pub certificate_ok: bool,
}

impl Recheck {
    pub fn passes(&self) -> bool {
        self.square_free && self.quadruple_ok && self.n_matches_unit_power && self.certificate_ok
    }
}

impl ReportDoc {
    pub fn recheck(&self) -> Result<Recheck, CounterexError> {
        let d: BigInt = self
            .d
            .parse()
            .map_err(|_| CounterexError::Json(format!("bad d {:?}", self.d)))?;
        if self.quadruple.d != self.d {
            return Err(CounterexError::Json(
                "quadruple ring differs from report ring".into(),
            ));
        }
        let ctx = RingCtx::allowing_non_square_free(d)
            .map_err(|e| CounterexError::Json(e.to_string()))?;
        let quadruple = self
            .quadruple
            .to_quadruple()
            .map_err(|e| CounterexError::Json(e.to_string()))?;
        let report = verify_quadruple(&ctx, &quadruple);
        let quadruple_ok = quadruple.n == self.n
            && report.all_pass
            && report.pairs.iter().all(|p| p.witness_ok != Some(false));
        let n_matches_unit_power = ctx
            .square(&unit_power(&ctx, self.t))
            .scale(&BigInt::from(2))
            == self.n;
        let certificate_ok = self
            .certificate
            .as_ref()
            .is_some_and(|c| c.n == self.n && c.recheck(&ctx));
        Ok(Recheck {
            square_free: ctx.square_free(),
            quadruple_ok,
            n_matches_unit_power,
            certificate_ok,
        })
    }
}

pub fn write_jsonl<W: Write>(mut out: W, reports: &[CounterexampleReport]) -> std::io::Result<()> {
    for r in reports {
        writeln!(out, "{}", r.to_json())?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<ReportDoc>, CounterexError> {
    input
        .lines()
        .map(|l| l.map_err(|e| CounterexError::Json(e.to_string())))
        .filter(|l| !matches!(l, Ok(s) if s.trim().is_empty()))
        .map(|l| {
            l.and_then(|s| {
                serde_json::from_str(&s).map_err(|e| CounterexError::Json(e.to_string()))
            })
        })
        .collect()
}

/// Decimal digit count of the larger coordinate of `x`.
pub fn digit_count(x: &QuadInt) -> usize {
    let m = x.a.abs().max(x.b.abs());
    if m.is_zero() {
        1
    } else {
        m.to_string().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> QuadInt {
        QuadInt::new(a, b)
    }

    #[test]
    fn family_examples() {
        let c = family_d(0);
        assert_eq!(
            (c.d.clone(), c.x.clone(), c.square_free),
            (15.into(), 3.into(), true)
        );
        let c = family_d(1);
        assert_eq!((c.d.clone(), c.x.clone()), (3975.into(), 63.into()));
        assert!(!c.square_free);
        let c = family_d(-1);
        assert_eq!((c.d, c.x), (3255.into(), BigInt::from(-57)));
    }

    #[test]
    fn enumeration() {
        let ds: Vec<BigInt> = enumerate_counterexample_rings(0, 3)
            .unwrap()
            .into_iter()
            .map(|c| c.d)
            .collect();
        assert_eq!(ds, vec![15.into(), 3975.into(), 15135.into(), 33495.into()]);
        assert_eq!(enumerate_counterexample_rings(0, 0).unwrap().len(), 1);
        assert!(matches!(
            enumerate_counterexample_rings(1, 0),
            Err(CounterexError::EmptyRange { .. })
        ));
    }

    #[test]
    fn base_report() {
        let r = RingCtx::new(15).unwrap();
        let rep = build_report(&r, 0).unwrap();
        assert_eq!(rep.n, q(2, 0));
        assert_eq!(
            rep.quadruple.elements,
            [q(4, 1), q(8, -2), q(8, -1), q(28, -7)]
        );
        assert_eq!(rep.certificate.as_ref().unwrap().u, q(1, 0));
        assert!(rep.verified);
        let rep = build_report(&r, 1).unwrap();
        assert_eq!(rep.n, q(62, 16));
        assert!(rep.verified);
    }

    #[test]
    fn report_errors() {
        let r = RingCtx::new(15).unwrap();
        assert!(matches!(
            build_report(&r, -1),
            Err(CounterexError::NegativeT(-1))
        ));
        let tight = ReportOptions { t_cap: 2 };
        assert!(matches!(
            build_report_with(&r, 3, &tight),
            Err(CounterexError::TCapExceeded { .. })
        ));
        let r3975 = RingCtx::allowing_non_square_free(3975).unwrap();
        assert!(matches!(
            build_report(&r3975, 0),
            Err(CounterexError::Stage {
                stage: "eligibility",
                ..
            })
        ));
        let r13 = RingCtx::new(13).unwrap();
        assert!(matches!(
            build_report(&r13, 0),
            Err(CounterexError::Stage {
                stage: "eligibility",
                ..
            })
        ));
    }

    #[test]
    fn json_round_trip_and_recheck() {
        let r = RingCtx::new(15).unwrap();
        let reports: Vec<_> = (0..3).map(|t| build_report(&r, t).unwrap()).collect();
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &reports).unwrap();
        let docs = read_jsonl(buf.as_slice()).unwrap();
        assert_eq!(docs.len(), 3);
        for (doc, rep) in docs.iter().zip(&reports) {
            assert_eq!(*doc, rep.to_doc());
            assert!(doc.recheck().unwrap().passes());
        }
        let line = reports[0].to_json();
        assert!(line.starts_with(r#"{"d":"15","t":0,"n":{"a":"2","b":"0"},"quadruple":{"d":"15""#));

        let mut tampered = docs[1].clone();
        tampered.quadruple.elements[2].b += 1;
        assert!(!tampered.recheck().unwrap().quadruple_ok);
        let mut tampered = docs[1].clone();
        tampered.t = 2;
        assert!(!tampered.recheck().unwrap().n_matches_unit_power);
    }

    #[test]
    fn batch_keeps_alpha_order() {
        let cands = enumerate_counterexample_rings(-1, 2).unwrap();
        let out = build_reports(&cands, 0, &ReportOptions::default());
        let ds: Vec<Option<BigInt>> = out
            .iter()
            .map(|o| o.as_ref().map(|r| r.as_ref().unwrap().d.clone()))
            .collect();
        assert_eq!(
            ds,
            vec![Some(3255.into()), Some(15.into()), None, Some(15135.into())]
        );
    }
}
