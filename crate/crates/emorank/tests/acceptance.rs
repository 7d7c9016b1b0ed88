//! Acceptance suite: every criterion asserts at its stated tolerance and
//! prints one PASS line. Run it with:
//!   cargo test -p emorank --test acceptance -- --nocapture

use emorank::emomodel::builtin_model;
use emorank::freqsource::{
    fetch_triples, load_corpus_ndjson, CorpusIndex, CountProvider, CountingProvider,
    FrequencyTriple, PairCount, ProviderError,
};
use emorank::pipeline::{
    fixture_from_run, run_batch, AggregateChoice, ProviderSpec, RunConfig,
};
use emorank::preprocess::{preprocess, tokenize, LanguageProfile, RemovalReason};
use emorank::proximity::{build_pming_context, confidence, ngd, pmi, pming, MeasureKind};
use emorank::radar::{emit_radar, full_radius, polygon_vertices, vertex_radius};
use emorank::ranking::{process_sentence, Aggregate, EmotionVector};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

fn demo_asset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("assets/demo").join(name)
}

fn demo_corpus() -> CorpusIndex {
    let text = std::fs::read_to_string(demo_asset("corpus.ndjson")).unwrap();
    load_corpus_ndjson(text.as_bytes()).unwrap()
}

fn demo_docs() -> Vec<(String, String)> {
    std::fs::read_to_string(demo_asset("corpus.ndjson"))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            (v["id"].as_str().unwrap().to_string(), v["text"].as_str().unwrap().to_string())
        })
        .collect()
}

fn pass(n: usize, what: &str) {
    println!("ACCEPTANCE {n}: PASS - {what}");
}

/// Criterion 1: index counts equal a brute-force scan oracle on the
/// bundled 20-document corpus, and the four measures match direct formula
/// evaluations to 1e-9 absolute, in under a second.
#[test]
fn criterion_1_measure_oracle_equivalence() {
    let started = Instant::now();
    let docs = demo_docs();
    assert_eq!(docs.len(), 20, "bundled synthetic corpus is 20 documents");
    let index = demo_corpus();

    let tokenized: Vec<BTreeSet<String>> =
        docs.iter().map(|(_, text)| tokenize(text).into_iter().collect()).collect();
    let scan_single =
        |term: &str| tokenized.iter().filter(|doc| doc.contains(term)).count() as u64;
    let scan_pair = |x: &str, y: &str| {
        tokenized.iter().filter(|doc| doc.contains(x) && doc.contains(y)).count() as u64
    };

    let mut vocabulary: BTreeSet<String> = tokenized.iter().flatten().cloned().collect();
    vocabulary.insert("unseen-term".into());
    for x in &vocabulary {
        assert_eq!(index.df(x), scan_single(x), "df({x})");
        for y in &vocabulary {
            assert_eq!(index.df_pair(x, y), scan_pair(x, y), "df({x},{y})");
        }
    }

    // measures against direct formula arithmetic on all word-emotion pairs
    let m = index.doc_count();
    let emotions = builtin_model("ekman").unwrap().labels.clone();
    let mut triples = Vec::new();
    for x in &vocabulary {
        for e in &emotions {
            let (fx, fe, fxy) = (index.df(x), index.df(e), index.df_pair(x, e));
            if fx > 0 && fe > 0 {
                triples.push(FrequencyTriple::new(fx, fe, fxy, m).unwrap());
            }
        }
    }
    let tolerance = 1e-9;
    for t in &triples {
        let (fx, fy, fxy, m) = (t.fx() as f64, t.fy() as f64, t.fxy() as f64, t.m() as f64);
        assert!((confidence(t).unwrap() - fxy / fx).abs() < tolerance);
        if t.fxy() > 0 {
            let direct_pmi = (fxy * m / (fx * fy)).log2();
            assert!((pmi(t).unwrap() - direct_pmi).abs() < tolerance);
            let direct_ngd =
                (fx.ln().max(fy.ln()) - fxy.ln()) / (m.ln() - fx.ln().min(fy.ln()));
            assert!((ngd(t).unwrap() - direct_ngd).abs() < tolerance);
        }
    }
    let rho = 0.5;
    let ctx = build_pming_context(triples.iter(), rho).unwrap();
    let direct = |t: &FrequencyTriple| {
        let (fx, fy, fxy, m) = (t.fx() as f64, t.fy() as f64, t.fxy() as f64, t.m() as f64);
        let p = (fxy * m / (fx * fy)).log2();
        let n = (fx.ln().max(fy.ln()) - fxy.ln()) / (m.ln() - fx.ln().min(fy.ln()));
        rho * (1.0 - p / ctx.mu1) + (1.0 - rho) * (n / ctx.mu2)
    };
    for t in triples.iter().filter(|t| t.fxy() > 0) {
        assert!((pming(t, &ctx).unwrap() - direct(t)).abs() < tolerance);
    }

    assert!(started.elapsed().as_secs_f64() < 1.0, "runtime bound");
    pass(1, "index counts equal brute-force scans; measures match direct formulas to 1e-9");
}

/// Criterion 2: every non-degenerate emitted emotion vector is
/// L1-normalized to 1 +- 1e-6, across the whole fixture batch, in under a
/// second.
#[test]
fn criterion_2_vector_normalization() {
    let started = Instant::now();
    let index = demo_corpus();
    let model = builtin_model("ekman").unwrap();
    let profile = LanguageProfile::english();
    let sentences = std::fs::read_to_string(demo_asset("sentences.txt")).unwrap();

    let mut checked = 0usize;
    for line in sentences.lines().filter(|l| !l.trim().is_empty()) {
        let (id, text) = line.split_once('@').unwrap();
        let result =
            process_sentence(id, text, &index, MeasureKind::Pmi, &model, &profile, 0.5).unwrap();
        let mut vectors: Vec<&EmotionVector> = result.term_vectors.values().collect();
        vectors.push(&result.avg_vector);
        vectors.push(&result.max_vector);
        for vector in vectors {
            if !vector.is_zero() {
                let sum: f64 = vector.values().iter().sum();
                assert!((sum - 1.0).abs() <= 1e-6, "vector sums to {sum}");
                checked += 1;
            }
        }
    }
    assert!(checked >= 30, "batch produced {checked} non-degenerate vectors");
    assert!(started.elapsed().as_secs_f64() < 1.0, "runtime bound");
    pass(2, "every non-degenerate emitted vector sums to 1 +- 1e-6");
}

fn permutations(n: usize) -> Vec<Vec<f64>> {
    fn heap(k: usize, items: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if k <= 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k.is_multiple_of(2) {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    let mut items: Vec<f64> = (1..=n).map(|v| v as f64).collect();
    let mut out = Vec::new();
    heap(n, &mut items, &mut out);
    out
}

fn tau_b_pair_count_oracle(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    let (mut concordant, mut discordant, mut tied_x, mut tied_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 {
                tied_x += 1;
            }
            if dy == 0.0 {
                tied_y += 1;
            }
            if dx != 0.0 && dy != 0.0 {
                if (dx > 0.0) == (dy > 0.0) {
                    concordant += 1;
                } else {
                    discordant += 1;
                }
            }
        }
    }
    let total = (n * (n - 1) / 2) as i64;
    if total == tied_x || total == tied_y {
        return None;
    }
    let denominator = (((total - tied_x) as f64) * ((total - tied_y) as f64)).sqrt();
    Some((concordant - discordant) as f64 / denominator)
}

/// Criterion 3: Kendall tau-b equals the exhaustive pair-count oracle for
/// all pairs of permutations of n <= 5 exactly; Spearman matches the
/// closed form on tie-free data to 1e-12; Pearson matches an independent
/// two-pass computation to 1e-12. Under 10 seconds.
#[test]
fn criterion_3_correlation_correctness() {
    let started = Instant::now();

    for n in 2..=5 {
        let perms = permutations(n);
        for a in &perms {
            for b in &perms {
                let implementation = emorank::evaluate::kendall(a, b).unwrap();
                let oracle = tau_b_pair_count_oracle(a, b);
                assert_eq!(implementation, oracle, "tau-b exact equality for a={a:?} b={b:?}");
            }
        }
    }

    // Spearman closed form on tie-free data: 1 - 6*sum(d^2)/(n(n^2-1))
    for n in 3..=5 {
        let perms = permutations(n);
        for a in perms.iter().take(24) {
            for b in perms.iter().take(24) {
                let ranks_a = emorank::evaluate::average_ranks(a);
                let ranks_b = emorank::evaluate::average_ranks(b);
                let d2: f64 =
                    ranks_a.iter().zip(&ranks_b).map(|(p, q)| (p - q) * (p - q)).sum();
                let len = a.len() as f64;
                let closed_form = 1.0 - 6.0 * d2 / (len * (len * len - 1.0));
                let implementation = emorank::evaluate::spearman(a, b).unwrap().unwrap();
                assert!(
                    (implementation - closed_form).abs() < 1e-12,
                    "spearman closed form for a={a:?} b={b:?}"
                );
            }
        }
    }

    // Pearson against an independently written two-pass mean/covariance
    let two_pass = |x: &[f64], y: &[f64]| -> Option<f64> {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let mut cov = 0.0;
        let mut vx = 0.0;
        let mut vy = 0.0;
        for i in 0..x.len() {
            cov += (x[i] - mx) * (y[i] - my);
            vx += (x[i] - mx) * (x[i] - mx);
            vy += (y[i] - my) * (y[i] - my);
        }
        if vx == 0.0 || vy == 0.0 {
            return None;
        }
        Some(cov / (vx * vy).sqrt())
    };
    let cases: [(&[f64], &[f64]); 4] = [
        (&[1.0, 2.0, 3.0, 4.0], &[2.0, 4.0, 5.0, 4.0]),
        (&[0.385232, 0.0, 0.479536, 0.0, 0.0, 0.135232], &[30.0, 12.0, 52.0, 0.0, 40.0, 8.0]),
        (&[5.0, 5.0, 5.0], &[1.0, 2.0, 3.0]),
        (&[-3.0, 7.5, 0.25, 11.0, -2.0], &[4.0, -1.0, 3.5, 9.0, 2.0]),
    ];
    for (x, y) in cases {
        let implementation = emorank::evaluate::pearson(x, y).unwrap();
        match (implementation, two_pass(x, y)) {
            (Some(i), Some(o)) => assert!((i - o).abs() < 1e-12, "pearson for {x:?}"),
            (i, o) => assert_eq!(i, o),
        }
    }
    // frozen value from the closed-form computation:
    // r = 3.5 / sqrt(5 * 4.75)
    assert!(
        (emorank::evaluate::pearson(&[1.0, 2.0, 3.0, 4.0], &[2.0, 4.0, 5.0, 4.0])
            .unwrap()
            .unwrap()
            - 0.7181848464596079)
            .abs()
            < 1e-12
    );

    assert!(started.elapsed().as_secs_f64() < 10.0, "runtime bound");
    pass(3, "tau-b exact vs pair-count oracle (n<=5); spearman closed form and pearson to 1e-12");
}

/// Criterion 4: with K=6 emotions and W=4 kept words under dual-direction
/// pair accounting, recorded lookups equal T = K + W + 2KW = 58.
#[test]
fn criterion_4_query_budget() {
    let started = Instant::now();

    struct DualDirectionMock;
    impl CountProvider for DualDirectionMock {
        fn name(&self) -> &str {
            "dual-mock"
        }
        fn corpus_size(&self) -> u64 {
            1_000_000
        }
        fn count_single(&self, _term: &str) -> Result<u64, ProviderError> {
            Ok(1000)
        }
        fn count_pair(&self, _x: &str, _y: &str) -> Result<PairCount, ProviderError> {
            // both directed queries issued, each counted
            Ok(PairCount { forward: 25, backward: 30, lookups: 2 })
        }
    }

    let provider = CountingProvider::new(DualDirectionMock);
    let model = builtin_model("ekman").unwrap();
    let profile = LanguageProfile::english();
    let words = preprocess("Gunmen kill 11 in Iraq TV raid", &profile);
    assert_eq!(words.tokens.len(), 4, "W = 4 kept words");

    let result = fetch_triples(&provider, &words, &model).unwrap();
    assert_eq!(result.stats.budget.k, 6);
    assert_eq!(result.stats.budget.w, 4);
    assert_eq!(result.stats.budget.total, 58, "T = 6 + 4 + 2*6*4");
    assert_eq!(result.stats.lookups, 58, "recorded lookups equal the budget");
    assert_eq!(provider.lookups(), 58, "independently counted lookups agree");

    assert!(started.elapsed().as_secs_f64() < 1.0, "runtime bound");
    pass(4, "dual-direction accounting records exactly T = K + W + 2KW = 58 lookups");
}

/// Criterion 5: the four removal rules on the sample title, with the
/// stated per-token attributions.
#[test]
fn criterion_5_preprocessing_rules() {
    let started = Instant::now();
    let profile = LanguageProfile::english();
    let list = preprocess("Gunmen kill 11 in Iraq TV raid", &profile);
    assert_eq!(list.tokens, vec!["gunmen", "kill", "iraq", "raid"]);
    let reason_of = |token: &str| {
        list.removed
            .iter()
            .find(|r| r.token == token)
            .unwrap_or_else(|| panic!("{token} should be removed"))
            .reason
    };
    assert_eq!(reason_of("11"), RemovalReason::Cardinal);
    assert_eq!(reason_of("in"), RemovalReason::Stopword);
    assert_eq!(reason_of("tv"), RemovalReason::Length);
    assert_eq!(list.removed.len(), 3);

    assert!(started.elapsed().as_secs_f64() < 1.0, "runtime bound");
    pass(5, "title keeps {gunmen, kill, iraq, raid}; removals attributed cardinal/stopword/length");
}

/// Criterion 6: PMING decomposes at the extreme weights to 1e-12, and the
/// context maxima equal exhaustive recomputation under the two-pass
/// protocol.
#[test]
fn criterion_6_pming_decomposition() {
    let triple = |fx, fy, fxy, m| FrequencyTriple::new(fx, fy, fxy, m).unwrap();
    let fixture_pairs = [
        triple(40, 30, 12, 2000),
        triple(25, 60, 3, 2000),
        triple(90, 15, 15, 2000),
        triple(8, 200, 1, 2000),
        triple(12, 12, 12, 2000),
        triple(500, 2, 1, 2000),
    ];

    // exhaustive recomputation of the maxima, zero-initialized
    let mut mu1 = 0.0f64;
    let mut mu2 = 0.0f64;
    for t in &fixture_pairs {
        if let Ok(p) = pmi(t) {
            mu1 = mu1.max(p);
        }
        if let Ok(n) = ngd(t) {
            mu2 = mu2.max(n);
        }
    }

    let ctx1 = build_pming_context(fixture_pairs.iter(), 1.0).unwrap();
    let ctx0 = build_pming_context(fixture_pairs.iter(), 0.0).unwrap();
    assert!((ctx1.mu1 - mu1).abs() < 1e-12, "mu1 equals exhaustive recomputation");
    assert!((ctx1.mu2 - mu2).abs() < 1e-12, "mu2 equals exhaustive recomputation");

    for t in &fixture_pairs {
        let p = pmi(t).unwrap();
        let n = ngd(t).unwrap();
        assert!((pming(t, &ctx1).unwrap() - (1.0 - p / mu1)).abs() < 1e-12, "rho=1 reduces to 1 - PMI/mu1");
        assert!((pming(t, &ctx0).unwrap() - n / mu2).abs() < 1e-12, "rho=0 reduces to NGD/mu2");
    }

    pass(6, "PMING decomposes at rho=1 and rho=0 to 1e-12; maxima match exhaustive recomputation");
}

fn demo_run_config(out_dir: &Path) -> RunConfig {
    RunConfig {
        model: "ekman".into(),
        measure: MeasureKind::Pmi,
        rho: 0.5,
        profile: "english".into(),
        provider: ProviderSpec::Corpus(demo_asset("corpus.ndjson")),
        sentences: demo_asset("sentences.txt"),
        truth: Some((demo_asset("truth_headlines.txt"), demo_asset("truth_scores.txt"))),
        out_dir: out_dir.to_path_buf(),
        aggregate: AggregateChoice::Both,
        workers: Some(2),
        fail_fast: false,
        assets_dir: None,
        pming_scope: Default::default(),
    }
}

/// Criterion 7: the full batch is byte-deterministic across runs, and
/// replaying the persisted occurrence dumps through the fixture provider
/// reproduces measures.json byte for byte. Under 5 seconds.
#[test]
fn criterion_7_determinism_and_replay() {
    let started = Instant::now();
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    run_batch(&demo_run_config(first.path())).unwrap();
    run_batch(&demo_run_config(second.path())).unwrap();
    for file in [
        "emotions.json",
        "words.json",
        "pairs.json",
        "measures.json",
        "words.csv",
        "sentences.csv",
        "evaluation.csv",
        "summary.json",
        "run-metadata.json",
    ] {
        assert_eq!(
            std::fs::read(first.path().join(file)).unwrap(),
            std::fs::read(second.path().join(file)).unwrap(),
            "{file} is not byte-identical across runs"
        );
    }

    let fixture = fixture_from_run(first.path()).unwrap();
    let fixture_path = first.path().join("replay-fixture.json");
    std::fs::write(&fixture_path, serde_json::to_string(&fixture).unwrap()).unwrap();
    let replay = tempfile::tempdir().unwrap();
    let mut config = demo_run_config(replay.path());
    config.provider = ProviderSpec::Fixture(fixture_path);
    run_batch(&config).unwrap();
    assert_eq!(
        std::fs::read(first.path().join("measures.json")).unwrap(),
        std::fs::read(replay.path().join("measures.json")).unwrap(),
        "dump replay deviates from the original measures"
    );

    assert!(started.elapsed().as_secs_f64() < 5.0, "runtime bound");
    pass(7, "byte-identical outputs across runs; dump replay reproduces measures.json");
}

/// Criterion 8: a result vector proportional to the ground-truth scores
/// reaches Pearson = Spearman = Kendall = 1.
#[test]
fn criterion_8_perfect_agreement_ceiling() {
    use emorank::evaluate::{score_sentence, GroundTruthRecord};

    let index = demo_corpus();
    let model = builtin_model("ekman").unwrap();
    let profile = LanguageProfile::english();
    let mut result = process_sentence(
        "168",
        "Growing Unarmed Battalion in Qaeda Army Is Using Internet to Get the Message Out",
        &index,
        MeasureKind::Pmi,
        &model,
        &profile,
        0.5,
    )
    .unwrap();

    let truth = GroundTruthRecord {
        sentence_id: "168".into(),
        text: "Growing Unarmed Battalion in Qaeda Army Is Using Internet to Get the Message Out"
            .into(),
        scores: vec![20, 10, 55, 5, 18, 40],
    };
    // proportional: the L1 normalization of the scores themselves
    let raw: Vec<f64> = truth.scores.iter().map(|s| *s as f64).collect();
    result.avg_vector = EmotionVector::from_raw(Arc::clone(&model), raw).unwrap();

    let report = score_sentence(&result, &truth, Aggregate::Average).unwrap();
    for (name, value) in [
        ("pearson", report.pearson),
        ("spearman", report.spearman),
        ("kendall", report.kendall),
    ] {
        let value = value.unwrap_or_else(|| panic!("{name} undefined"));
        assert!((value - 1.0).abs() < 1e-12, "{name} = {value}, expected 1.0");
    }

    pass(8, "proportional result vector reaches Pearson = Spearman = Kendall = 1.0");
}

/// Minimal XML well-formedness check: tag balance, matching names, quoted
/// attributes, no stray '<' or '>'.
fn assert_well_formed_xml(text: &str) {
    let mut stack: Vec<String> = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find('<') {
        let before = &rest[..open];
        assert!(!before.contains('>'), "stray '>' in text content");
        let close = rest[open..].find('>').expect("unclosed tag") + open;
        let tag = &rest[open + 1..close];
        assert!(!tag.contains('<'), "nested '<' inside tag: {tag}");
        assert_eq!(tag.matches('"').count() % 2, 0, "unbalanced quotes in: {tag}");
        if let Some(name) = tag.strip_prefix('/') {
            let expected = stack.pop().unwrap_or_else(|| panic!("unmatched closer {name}"));
            assert_eq!(expected, name.trim(), "mismatched closing tag");
        } else if !tag.ends_with('/') && !tag.starts_with('?') && !tag.starts_with('!') {
            let name = tag.split_whitespace().next().unwrap().to_string();
            stack.push(name);
        }
        rest = &rest[close + 1..];
    }
    assert!(stack.is_empty(), "unclosed tags: {stack:?}");
}

/// Criterion 9: every radar SVG is well-formed XML with exactly n polygon
/// vertices; a uniform vector renders a regular n-gon with vertex radii
/// equal to 1e-9 relative.
#[test]
fn criterion_9_svg_validity() {
    let model = builtin_model("ekman").unwrap();
    let profile = LanguageProfile::english();

    // all demo sentences: well-formed, polygon vertex count = n
    let index = demo_corpus();
    let sentences = std::fs::read_to_string(demo_asset("sentences.txt")).unwrap();
    for line in sentences.lines().filter(|l| !l.trim().is_empty()) {
        let (id, text) = line.split_once('@').unwrap();
        let result =
            process_sentence(id, text, &index, MeasureKind::Pmi, &model, &profile, 0.5).unwrap();
        for how in [Aggregate::Average, Aggregate::Max] {
            let svg = emit_radar(&result, how);
            assert_well_formed_xml(&svg);
            let marker = "class=\"emotion-load\" points=\"";
            let start = svg.find(marker).expect("polygon present") + marker.len();
            let end = svg[start..].find('"').unwrap() + start;
            let vertex_count = svg[start..end].split(' ').count();
            assert_eq!(vertex_count, model.len(), "polygon has n vertices");
        }
    }

    // uniform vector: regular n-gon at full radius, 1e-9 relative
    for n in [6usize, 8] {
        let labels: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
        let uniform_model =
            Arc::new(emorank::EmotionModel::new("uniform", labels).unwrap());
        let vector =
            EmotionVector::from_raw(Arc::clone(&uniform_model), vec![0.25; n]).unwrap();
        let vertices = polygon_vertices(&vector).expect("uniform vector draws a polygon");
        assert_eq!(vertices.len(), n);
        for point in vertices {
            let radius = vertex_radius(point);
            assert!(
                ((radius - full_radius()) / full_radius()).abs() < 1e-9,
                "vertex radius {radius} deviates from {}",
                full_radius()
            );
        }
    }

    // degenerate: still well-formed, no polygon, notice present
    let degenerate =
        process_sentence("d", "the of in", &index, MeasureKind::Pmi, &model, &profile, 0.5)
            .unwrap();
    let svg = emit_radar(&degenerate, Aggregate::Average);
    assert_well_formed_xml(&svg);
    assert!(!svg.contains("emotion-load"));
    assert!(svg.contains("class=\"notice\""));

    pass(9, "radar SVGs are well-formed with n vertices; uniform vector is a regular n-gon");
}
