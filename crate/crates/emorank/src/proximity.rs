//! Semantic proximity measures over co-occurrence counts: Confidence,
//! PMI, NGD, and the context-normalized PMING, behind one interface.
//!
//! Raw measures keep their native orientation and range (PMI is an
//! association in bits, NGD and PMING are distances). [`proximity`]
//! converts any of them to a nonnegative proximity score used for vector
//! assembly, mapping all undefined/zero-co-occurrence signals to 0.

use crate::freqsource::FrequencyTriple;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Confidence,
    Pmi,
    Ngd,
    Pming,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 4] =
        [MeasureKind::Confidence, MeasureKind::Pmi, MeasureKind::Ngd, MeasureKind::Pming];

    pub fn as_str(&self) -> &'static str {
        match self {
            MeasureKind::Confidence => "confidence",
            MeasureKind::Pmi => "pmi",
            MeasureKind::Ngd => "ngd",
            MeasureKind::Pming => "pming",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MeasureKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "confidence" | "conf" => Ok(MeasureKind::Confidence),
            "pmi" => Ok(MeasureKind::Pmi),
            "ngd" => Ok(MeasureKind::Ngd),
            "pming" => Ok(MeasureKind::Pming),
            other => Err(format!("unknown measure `{other}` (expected confidence|pmi|ngd|pming)")),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MeasureError {
    /// The formula has no value for these counts (e.g. a zero single count).
    #[error("measure undefined: {0}")]
    Undefined(&'static str),
    /// f(x,y) = 0: no observed co-occurrence (PMI -> -inf, NGD -> +inf).
    #[error("no observed co-occurrence")]
    ZeroCooccurrence,
    #[error("PMING requires an evaluation context")]
    MissingContext,
    #[error("invalid PMING context: {0}")]
    InvalidContext(String),
}

/// Context maxima for PMING over a pair set W: mu1 = max PMI, mu2 = max NGD,
/// plus the mixing weight rho. Maxima start at zero and only grow, per the
/// two-pass evaluation protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PmingContext {
    pub mu1: f64,
    pub mu2: f64,
    pub rho: f64,
}

impl PmingContext {
    pub fn new(mu1: f64, mu2: f64, rho: f64) -> Result<Self, MeasureError> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(MeasureError::InvalidContext(format!("rho {rho} outside [0, 1]")));
        }
        if !mu1.is_finite() || !mu2.is_finite() || mu1 < 0.0 || mu2 < 0.0 {
            return Err(MeasureError::InvalidContext(format!(
                "context maxima must be finite and nonnegative, got mu1={mu1}, mu2={mu2}"
            )));
        }
        Ok(PmingContext { mu1, mu2, rho })
    }
}

/// Confidence in the rule x -> y: the fraction of x-documents that also
/// contain y. Asymmetric.
pub fn confidence(t: &FrequencyTriple) -> Result<f64, MeasureError> {
    if t.fx() == 0 {
        return Err(MeasureError::Undefined("f(x) = 0"));
    }
    Ok(t.fxy() as f64 / t.fx() as f64)
}

/// Pointwise mutual information in base-2: log2(f(x,y) * M / (f(x) * f(y))).
/// Symmetric; 0 at statistical independence.
pub fn pmi(t: &FrequencyTriple) -> Result<f64, MeasureError> {
    if t.fx() == 0 || t.fy() == 0 {
        return Err(MeasureError::Undefined("f(x) or f(y) = 0"));
    }
    if t.fxy() == 0 {
        return Err(MeasureError::ZeroCooccurrence);
    }
    let joint = t.fxy() as f64 * t.m() as f64;
    let independent = t.fx() as f64 * t.fy() as f64;
    Ok((joint / independent).log2())
}

/// Normalized web distance:
/// (max(log f(x), log f(y)) - log f(x,y)) / (log M - min(log f(x), log f(y))).
/// Symmetric, base-invariant, 0 for identical terms.
pub fn ngd(t: &FrequencyTriple) -> Result<f64, MeasureError> {
    if t.fx() == 0 || t.fy() == 0 {
        return Err(MeasureError::Undefined("f(x) or f(y) = 0"));
    }
    if t.fxy() == 0 {
        return Err(MeasureError::ZeroCooccurrence);
    }
    let (lx, ly) = ((t.fx() as f64).ln(), (t.fy() as f64).ln());
    let denominator = (t.m() as f64).ln() - lx.min(ly);
    if denominator <= 0.0 {
        return Err(MeasureError::Undefined("M <= min(f(x), f(y))"));
    }
    Ok((lx.max(ly) - (t.fxy() as f64).ln()) / denominator)
}

/// PMING distance: rho * (1 - PMI/mu1) + (1 - rho) * NGD/mu2, with the
/// constituent measures locally normalized by the context maxima.
///
/// The defining formula assumes f(x) >= f(y); arguments are swapped
/// internally when needed. A zero maximum means every pair in the context
/// sits at that measure's degenerate point, and the affected term takes its
/// limit: 0 for the NGD term, rho for the PMI term.
pub fn pming(t: &FrequencyTriple, ctx: &PmingContext) -> Result<f64, MeasureError> {
    let oriented = if t.fx() >= t.fy() { *t } else { t.swapped() };
    let p = pmi(&oriented)?;
    let n = ngd(&oriented)?;
    let pmi_term = if ctx.mu1 > 0.0 { ctx.rho * (1.0 - p / ctx.mu1) } else { ctx.rho };
    let ngd_term = if ctx.mu2 > 0.0 { (1.0 - ctx.rho) * (n / ctx.mu2) } else { 0.0 };
    Ok(pmi_term + ngd_term)
}

/// Two-pass context construction: maxima initialized to zero, then one
/// sweep over all pairs in the evaluation context.
pub fn build_pming_context<'a, I>(triples: I, rho: f64) -> Result<PmingContext, MeasureError>
where
    I: IntoIterator<Item = &'a FrequencyTriple>,
{
    if !(0.0..=1.0).contains(&rho) {
        return Err(MeasureError::InvalidContext(format!("rho {rho} outside [0, 1]")));
    }
    let mut mu1 = 0.0f64;
    let mut mu2 = 0.0f64;
    let mut any_defined = false;
    for t in triples {
        if let Ok(p) = pmi(t) {
            mu1 = mu1.max(p);
            any_defined = true;
        }
        if let Ok(n) = ngd(t) {
            mu2 = mu2.max(n);
            any_defined = true;
        }
    }
    if !any_defined {
        return Err(MeasureError::InvalidContext(
            "no pair in the context has a defined PMI or NGD".into(),
        ));
    }
    PmingContext::new(mu1, mu2, rho)
}

/// Convert a raw measure to proximity orientation in [0, 1].
///
/// Confidence passes through; PMI is clipped at zero and scaled by its
/// maximum attainable value log2(M) (the scale cancels under the L1 vector
/// normalization that follows); NGD and PMING distances map through
/// 1 - value, clipped to [0, 1]. Undefined and zero-co-occurrence signals
/// all map to 0.
pub fn proximity(
    kind: MeasureKind,
    t: &FrequencyTriple,
    ctx: Option<&PmingContext>,
) -> Result<f64, MeasureError> {
    let value = match kind {
        MeasureKind::Confidence => confidence(t).unwrap_or(0.0),
        MeasureKind::Pmi => match pmi(t) {
            Ok(raw) => {
                let scale = (t.m() as f64).log2();
                if scale > 0.0 {
                    (raw.max(0.0) / scale).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            }
            Err(_) => 0.0,
        },
        MeasureKind::Ngd => match ngd(t) {
            Ok(raw) => (1.0 - raw).clamp(0.0, 1.0),
            Err(_) => 0.0,
        },
        MeasureKind::Pming => {
            let ctx = ctx.ok_or(MeasureError::MissingContext)?;
            match pming(t, ctx) {
                Ok(raw) => (1.0 - raw).clamp(0.0, 1.0),
                Err(MeasureError::InvalidContext(e)) => {
                    return Err(MeasureError::InvalidContext(e))
                }
                Err(_) => 0.0,
            }
        }
    };
    Ok(value)
}

/// All measure values for one (term, emotion) pair, as persisted in the
/// measures dump. Undefined signals become nulls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureCell {
    pub confidence: Option<f64>,
    pub pmi_raw: Option<f64>,
    pub ngd_raw: Option<f64>,
    pub pming: Option<f64>,
    /// Proximity of the measure selected for the run.
    pub proximity: f64,
}

/// Evaluate every measure on one triple; `kind` selects which proximity
/// goes into the vector.
pub fn measure_cell(
    kind: MeasureKind,
    t: &FrequencyTriple,
    ctx: Option<&PmingContext>,
) -> Result<MeasureCell, MeasureError> {
    Ok(MeasureCell {
        confidence: confidence(t).ok(),
        pmi_raw: pmi(t).ok(),
        ngd_raw: ngd(t).ok(),
        pming: ctx.and_then(|c| pming(t, c).ok()),
        proximity: proximity(kind, t, ctx)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triple(fx: u64, fy: u64, fxy: u64, m: u64) -> FrequencyTriple {
        FrequencyTriple::new(fx, fy, fxy, m).unwrap()
    }

    const TIGHT: f64 = 1e-12;

    #[test]
    fn confidence_is_the_conditional_fraction() {
        assert_eq!(confidence(&triple(10, 7, 5, 100)).unwrap(), 0.5);
        assert_eq!(confidence(&triple(10, 10, 10, 100)).unwrap(), 1.0);
        assert_eq!(confidence(&triple(10, 10, 0, 100)).unwrap(), 0.0);
        assert_eq!(
            confidence(&triple(0, 10, 0, 100)),
            Err(MeasureError::Undefined("f(x) = 0"))
        );
    }

    #[test]
    fn confidence_is_asymmetric() {
        // 5/10 one way, 5/7 the other
        let t = triple(10, 7, 5, 100);
        let forward = confidence(&t).unwrap();
        let backward = confidence(&t.swapped()).unwrap();
        assert!((forward - 0.5).abs() < TIGHT);
        assert!((backward - 5.0 / 7.0).abs() < TIGHT);
        assert!(forward != backward);
    }

    #[test]
    fn pmi_matches_hand_evaluations() {
        // independence
        assert!(pmi(&triple(10, 10, 1, 100)).unwrap().abs() < TIGHT);
        // perfect co-occurrence
        assert!((pmi(&triple(10, 10, 10, 100)).unwrap() - 10f64.log2()).abs() < TIGHT);
        // log2(10 * 1000 / (50 * 40)) = log2 5
        assert!((pmi(&triple(50, 40, 10, 1000)).unwrap() - 5f64.log2()).abs() < TIGHT);
    }

    /// Cross-check PMI against probabilities measured on a synthetic corpus
    /// realizing the counts.
    #[test]
    fn pmi_agrees_with_corpus_probabilities() {
        use crate::freqsource::{build_index, CountProvider};
        // 20 docs: x in 4, y in 5, both in 2.
        let docs: Vec<(String, String)> = (0..20)
            .map(|i| {
                let text = match i {
                    0 | 1 => "x y",
                    2 | 3 => "x",
                    4..=6 => "y",
                    _ => "filler",
                };
                (format!("d{i}"), text.to_string())
            })
            .collect();
        let idx = build_index(docs).unwrap();
        let t = triple(
            idx.count_single("x").unwrap(),
            idx.count_single("y").unwrap(),
            idx.count_pair("x", "y").unwrap().used(),
            idx.corpus_size(),
        );
        let (px, py, pxy) = (4.0f64 / 20.0, 5.0 / 20.0, 2.0 / 20.0);
        let expected = (pxy / (px * py)).log2();
        assert!((pmi(&t).unwrap() - expected).abs() < TIGHT);
    }

    #[test]
    fn ngd_matches_hand_evaluations() {
        assert!(ngd(&triple(7, 7, 7, 100)).unwrap().abs() < TIGHT);
        assert!((ngd(&triple(10, 10, 1, 100)).unwrap() - 1.0).abs() < TIGHT);
        assert!((ngd(&triple(100, 10, 10, 10000)).unwrap() - 1.0 / 3.0).abs() < TIGHT);
    }

    #[test]
    fn ngd_is_base_invariant() {
        let t = triple(100, 10, 5, 10000);
        let with_ln = ngd(&t).unwrap();
        let base10 = |v: u64| (v as f64).log10();
        let with_log10 = (base10(t.fx()).max(base10(t.fy())) - base10(t.fxy()))
            / (base10(t.m()) - base10(t.fx()).min(base10(t.fy())));
        assert!((with_ln - with_log10).abs() < TIGHT);
    }

    #[test]
    fn ngd_zero_for_identical_terms() {
        for fx in [1u64, 3, 50, 99] {
            let t = triple(fx, fx, fx, 100);
            assert!(ngd(&t).unwrap().abs() < TIGHT, "fx = {fx}");
        }
    }

    #[test]
    fn ngd_signals() {
        assert_eq!(ngd(&triple(10, 10, 0, 100)), Err(MeasureError::ZeroCooccurrence));
        // M = min(fx, fy): denominator 0
        assert!(matches!(ngd(&triple(100, 100, 10, 100)), Err(MeasureError::Undefined(_))));
    }

    #[test]
    fn pmi_and_ngd_are_symmetric() {
        let cases = [(50u64, 40, 10, 1000u64), (3, 90, 2, 200), (7, 7, 1, 50)];
        for (fx, fy, fxy, m) in cases {
            let t = triple(fx, fy, fxy, m);
            let s = t.swapped();
            let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
            assert!(rel(pmi(&t).unwrap(), pmi(&s).unwrap()) < TIGHT);
            assert!(rel(ngd(&t).unwrap(), ngd(&s).unwrap()) < TIGHT);
        }
    }

    #[test]
    fn pmi_zero_exactly_at_independence() {
        // fxy * m == fx * fy
        let t = triple(20, 10, 2, 100);
        assert!(pmi(&t).unwrap().abs() < TIGHT);
        let t = triple(20, 10, 3, 100);
        assert!(pmi(&t).unwrap().abs() > 1e-6);
    }

    #[test]
    fn pming_decomposes_at_extreme_rho() {
        let triples =
            [triple(50, 40, 10, 1000), triple(10, 10, 2, 1000), triple(30, 5, 4, 1000)];
        let ctx1 = build_pming_context(triples.iter(), 1.0).unwrap();
        let ctx0 = build_pming_context(triples.iter(), 0.0).unwrap();
        for t in &triples {
            let p = pmi(t).unwrap();
            let n = ngd(t).unwrap();
            assert!((pming(t, &ctx1).unwrap() - (1.0 - p / ctx1.mu1)).abs() < TIGHT);
            assert!((pming(t, &ctx0).unwrap() - n / ctx0.mu2).abs() < TIGHT);
        }
    }

    #[test]
    fn pming_boundary_pair_scores_half_at_even_weight() {
        // A context where one pair attains both maxima simultaneously.
        let shared = triple(10, 10, 5, 1000);
        let ctx = build_pming_context([shared].iter(), 0.5).unwrap();
        assert!((ctx.mu1 - pmi(&shared).unwrap()).abs() < TIGHT);
        assert!((ctx.mu2 - ngd(&shared).unwrap()).abs() < TIGHT);
        // rho*(1 - 1) + (1-rho)*1 = 0.5
        assert!((pming(&shared, &ctx).unwrap() - 0.5).abs() < TIGHT);
    }

    /// Two-pass oracle over a small fixture pair set: maxima and PMING
    /// values recomputed independently in the test.
    #[test]
    fn pming_matches_two_pass_oracle_on_fixture_pairs() {
        let pairs = [
            triple(40, 30, 12, 2000),
            triple(25, 60, 3, 2000),
            triple(90, 15, 15, 2000),
            triple(8, 200, 1, 2000),
        ];
        let rho = 0.5;

        // Oracle pass 1: raw values by direct formula arithmetic.
        let raw: Vec<(f64, f64)> = pairs
            .iter()
            .map(|t| {
                let (fx, fy, fxy, m) =
                    (t.fx() as f64, t.fy() as f64, t.fxy() as f64, t.m() as f64);
                let p = (fxy * m / (fx * fy)).log2();
                let n = (fx.ln().max(fy.ln()) - fxy.ln()) / (m.ln() - fx.ln().min(fy.ln()));
                (p, n)
            })
            .collect();
        let mu1 = raw.iter().map(|(p, _)| *p).fold(0.0f64, f64::max);
        let mu2 = raw.iter().map(|(_, n)| *n).fold(0.0f64, f64::max);

        let ctx = build_pming_context(pairs.iter(), rho).unwrap();
        assert!((ctx.mu1 - mu1).abs() < TIGHT);
        assert!((ctx.mu2 - mu2).abs() < TIGHT);

        // Oracle pass 2: PMING per pair from the raw values.
        for (t, (p, n)) in pairs.iter().zip(&raw) {
            let expected = rho * (1.0 - p / mu1) + (1.0 - rho) * (n / mu2);
            assert!((pming(t, &ctx).unwrap() - expected).abs() < TIGHT);
        }
    }

    #[test]
    fn context_maxima_select_the_largest_values() {
        let low = triple(20, 10, 2, 100); // PMI = 0
        let high = triple(10, 10, 10, 100); // PMI = log2 10, NGD = 0
        let mid = triple(10, 10, 2, 100); // NGD > 0
        let ctx = build_pming_context([low, high, mid].iter(), 0.5).unwrap();
        let expected_mu1 =
            [&low, &high, &mid].iter().map(|t| pmi(t).unwrap()).fold(0.0f64, f64::max);
        let expected_mu2 =
            [&low, &high, &mid].iter().map(|t| ngd(t).unwrap()).fold(0.0f64, f64::max);
        assert!((ctx.mu1 - expected_mu1).abs() < TIGHT);
        assert!((ctx.mu2 - expected_mu2).abs() < TIGHT);
    }

    #[test]
    fn single_self_pair_context_falls_back_on_zero_mu2() {
        let t = triple(10, 10, 10, 100);
        let ctx = build_pming_context([t].iter(), 0.5).unwrap();
        assert!((ctx.mu1 - 10f64.log2()).abs() < TIGHT);
        assert_eq!(ctx.mu2, 0.0);
        // second term drops to its limit 0; first term is rho * (1 - 1) = 0
        assert!(pming(&t, &ctx).unwrap().abs() < TIGHT);
    }

    #[test]
    fn degenerate_context_is_rejected() {
        let undefined = [triple(10, 10, 0, 100), triple(5, 8, 0, 100)];
        assert!(matches!(
            build_pming_context(undefined.iter(), 0.5),
            Err(MeasureError::InvalidContext(_))
        ));
        assert!(matches!(
            build_pming_context([triple(10, 10, 5, 100)].iter(), 1.5),
            Err(MeasureError::InvalidContext(_))
        ));
    }

    #[test]
    fn pming_swaps_arguments_internally() {
        let t = triple(10, 90, 5, 1000);
        let ctx = build_pming_context([t].iter(), 0.3).unwrap();
        assert!((pming(&t, &ctx).unwrap() - pming(&t.swapped(), &ctx).unwrap()).abs() < TIGHT);
    }

    #[test]
    fn pming_is_monotone_nonincreasing_in_fxy() {
        let grids = [(40u64, 30u64, 2000u64), (100, 100, 5000), (12, 90, 500)];
        for (fx, fy, m) in grids {
            let ctx_source: Vec<FrequencyTriple> =
                (1..=fx.min(fy)).map(|fxy| triple(fx, fy, fxy, m)).collect();
            let ctx = build_pming_context(ctx_source.iter(), 0.5).unwrap();
            let mut previous = f64::INFINITY;
            for t in &ctx_source {
                let value = pming(t, &ctx).unwrap();
                assert!(
                    value <= previous + TIGHT,
                    "pming increased at fxy={} for ({fx},{fy},m={m})",
                    t.fxy()
                );
                previous = value;
            }
        }
    }

    #[test]
    fn proximity_orientation() {
        // NGD distance 0 -> proximity 1
        assert_eq!(proximity(MeasureKind::Ngd, &triple(7, 7, 7, 100), None).unwrap(), 1.0);
        // anti-correlated PMI clips to 0: fxy*m < fx*fy
        let anti = triple(50, 40, 1, 100);
        assert!(pmi(&anti).unwrap() < 0.0);
        assert_eq!(proximity(MeasureKind::Pmi, &anti, None).unwrap(), 0.0);
        // confidence passes through
        assert_eq!(proximity(MeasureKind::Confidence, &triple(10, 7, 5, 100), None).unwrap(), 0.5);
        // zero co-occurrence yields 0 for every kind
        let zero = triple(10, 10, 0, 100);
        let ctx = PmingContext::new(1.0, 1.0, 0.5).unwrap();
        for kind in MeasureKind::ALL {
            assert_eq!(proximity(kind, &zero, Some(&ctx)).unwrap(), 0.0, "{kind}");
        }
    }

    #[test]
    fn pming_proximity_requires_context() {
        assert_eq!(
            proximity(MeasureKind::Pming, &triple(10, 10, 5, 100), None),
            Err(MeasureError::MissingContext)
        );
    }

    #[test]
    fn measure_cell_reports_signals_as_none() {
        let zero = triple(10, 10, 0, 100);
        let cell = measure_cell(MeasureKind::Pmi, &zero, None).unwrap();
        assert_eq!(cell.confidence, Some(0.0));
        assert_eq!(cell.pmi_raw, None);
        assert_eq!(cell.ngd_raw, None);
        assert_eq!(cell.pming, None);
        assert_eq!(cell.proximity, 0.0);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_triple() -> impl Strategy<Value = FrequencyTriple> {
            (1u64..1_000_000_000)
                .prop_flat_map(|m| (Just(m), 1..=m, 1..=m))
                .prop_flat_map(|(m, fx, fy)| (Just(m), Just(fx), Just(fy), 0..=fx.min(fy)))
                .prop_map(|(m, fx, fy, fxy)| FrequencyTriple::new(fx, fy, fxy, m).unwrap())
        }

        fn arb_positive_triple() -> impl Strategy<Value = FrequencyTriple> {
            (2u64..1_000_000_000)
                .prop_flat_map(|m| (Just(m), 1..=m, 1..=m))
                .prop_flat_map(|(m, fx, fy)| (Just(m), Just(fx), Just(fy), 1..=fx.min(fy)))
                .prop_map(|(m, fx, fy, fxy)| FrequencyTriple::new(fx, fy, fxy, m).unwrap())
        }

        proptest! {
            #[test]
            fn proximity_is_in_unit_interval(t in arb_triple(), anchor in arb_positive_triple(), rho in 0.0f64..=1.0) {
                let ctx = build_pming_context([t, anchor].iter(), rho).ok();
                for kind in MeasureKind::ALL {
                    if kind == MeasureKind::Pming && ctx.is_none() {
                        continue;
                    }
                    let v = proximity(kind, &t, ctx.as_ref()).unwrap();
                    prop_assert!((0.0..=1.0).contains(&v), "{kind} produced {v} for {t:?}");
                }
            }

            #[test]
            fn pmi_ngd_symmetry_fuzzed(t in arb_positive_triple()) {
                let s = t.swapped();
                let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
                prop_assert!(rel(pmi(&t).unwrap(), pmi(&s).unwrap()) < 1e-12);
                if let (Ok(a), Ok(b)) = (ngd(&t), ngd(&s)) {
                    prop_assert!(rel(a, b) < 1e-12);
                }
            }
        }
    }
}
