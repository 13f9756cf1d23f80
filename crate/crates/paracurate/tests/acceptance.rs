//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Oracles here are written independently of the pipeline: filters,
//! predicates, prefixes and split points are recomputed by brute force from
//! the bundled fixture and compared byte for byte.

use std::collections::HashMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use paracurate::corpus::ingest_documents;
use paracurate_core::pack::PARAGRAPH_SEPARATOR;
use paracurate_core::{
    build_prompt, pack_article, parse_llm_response, Annotation, Article, DatasetManifest, DocumentType, DomainLabel,
    EducationalScore, License, Paragraph, TrainingDocument, WhitespaceCounter,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

const BUDGET: usize = 8192;
const FACTOR: u32 = 10;
const THRESHOLD: u8 = 3;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($msg)+));
        }
    };
}

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn cli(args: &[&str]) -> i32 {
    paracurate::cli::run(["paracurate", "--quiet"].into_iter().chain(args.iter().copied()))
}

fn step(args: &[&str]) -> Result<(), String> {
    match cli(args) {
        0 => Ok(()),
        code => Err(format!("`{}` exited {code}", args.join(" "))),
    }
}

/// JSONL records of every `.jsonl` file in `dir`, in file-name order.
fn records<T: serde::de::DeserializeOwned>(dir: &Path) -> Vec<T> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    files.sort();
    files
        .iter()
        .flat_map(|f| {
            fs::read_to_string(f)
                .unwrap()
                .lines()
                .map(str::to_string)
                .collect::<Vec<_>>()
        })
        .map(|l| serde_json::from_str(&l).unwrap())
        .collect()
}

fn shard_bytes(dir: &Path) -> Vec<u8> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    files.sort();
    files.iter().flat_map(|f| fs::read(f).unwrap()).collect()
}

fn manifest(dir: &Path) -> DatasetManifest {
    serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap()
}

fn words(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Ingested fixture corpus plus its annotations, shared by several checks.
struct Fixture {
    _tmp: TempDir,
    corpus_dir: PathBuf,
    corpus: Vec<Article>,
    labels: HashMap<String, Annotation>,
}

impl Fixture {
    fn load() -> Result<Self, String> {
        let tmp = TempDir::new().unwrap();
        let corpus_dir = tmp.path().join("corpus");
        step(&["ingest", "--input", s(&fixture("jats")), "--output", s(&corpus_dir)])?;
        let corpus = records(&corpus_dir);
        let labels = records::<Annotation>(&fixture("annotations"))
            .into_iter()
            .map(|a| (a.paragraph_id.clone(), a))
            .collect();
        Ok(Fixture {
            _tmp: tmp,
            corpus_dir,
            corpus,
            labels,
        })
    }

    fn build(&self, variant: &str, out: &Path) -> Result<(), String> {
        step(&[
            "build",
            "--variant",
            variant,
            "--corpus",
            s(&self.corpus_dir),
            "--annotations",
            s(&fixture("annotations")),
            "--output",
            s(out),
        ])
    }

    fn label(&self, p: &Paragraph) -> &Annotation {
        &self.labels[&p.paragraph_id]
    }
}

/// (predominantly clinical, has clinical case, has French) over `paragraphs`.
fn predicates(fx: &Fixture, paragraphs: &[Paragraph]) -> (bool, bool, bool) {
    let labels: Vec<&Annotation> = paragraphs.iter().map(|p| fx.label(p)).collect();
    let clinical = labels.iter().filter(|a| a.domain == DomainLabel::Clinical).count();
    (
        !labels.is_empty() && 2 * clinical > labels.len(),
        labels.iter().any(|a| a.doc_type == DocumentType::ClinicalCase),
        labels.iter().any(|a| a.language == "fr"),
    )
}

fn jsonl<T: serde::Serialize>(docs: &[T]) -> Vec<u8> {
    docs.iter()
        .flat_map(|d| {
            let mut line = serde_json::to_vec(d).unwrap();
            line.push(b'\n');
            line
        })
        .collect()
}

fn end_to_end() -> Check {
    let tmp = TempDir::new().unwrap();
    let d = |n: &str| tmp.path().join(n);
    let started = Instant::now();
    step(&[
        "--jobs",
        "1",
        "ingest",
        "--input",
        s(&fixture("jats")),
        "--output",
        s(&d("corpus")),
    ])?;
    step(&["validate", s(&d("corpus"))])?;
    step(&["validate", s(&fixture("annotations"))])?;
    step(&[
        "build",
        "--variant",
        "be-all",
        "--corpus",
        s(&d("corpus")),
        "--annotations",
        s(&fixture("annotations")),
        "--output",
        s(&d("be_all")),
    ])?;
    step(&["validate", s(&d("be_all"))])?;
    step(&[
        "pack",
        "--input",
        s(&d("be_all")),
        "--context",
        "8192",
        "--output",
        s(&d("packed")),
    ])?;
    step(&["validate", s(&d("packed"))])?;
    step(&[
        "stats",
        "--annotations",
        s(&fixture("annotations")),
        "--by",
        "domain",
        "--output",
        s(&d("report.json")),
    ])?;
    let elapsed = started.elapsed();
    for record in [
        "corpus/run-record.json",
        "be_all/run-record.json",
        "packed/run-record.json",
        "report.json.run-record.json",
    ] {
        ensure!(d(record).is_file(), "missing {record}");
    }
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("exit 0 at every stage in {:.2} s", elapsed.as_secs_f64()))
}

fn educational_exactness(fx: &Fixture) -> Check {
    let out = TempDir::new().unwrap();
    fx.build("be-educational", out.path())?;
    let mut expected = Vec::new();
    for article in &fx.corpus {
        let mut a = article.clone();
        a.paragraphs.retain(|p| fx.label(p).edu_score.get() >= THRESHOLD);
        if !a.paragraphs.is_empty() {
            expected.push(a);
        }
    }
    let actual = shard_bytes(out.path());
    ensure!(actual == jsonl(&expected), "shards differ from the brute-force filter");
    Ok(format!("{} articles, {} bytes identical", expected.len(), actual.len()))
}

fn replication_exactness(fx: &Fixture) -> Check {
    let mut summary = Vec::new();
    for (variant, pick) in [("be-clinical", 0), ("be-clinicalcase", 1), ("be-french", 2)] {
        let out = TempDir::new().unwrap();
        fx.build(variant, out.path())?;
        let m = manifest(out.path());
        let mut qualifying = 0;
        ensure!(
            m.entries.len() == fx.corpus.len(),
            "{variant}: {} entries",
            m.entries.len()
        );
        for (entry, article) in m.entries.iter().zip(&fx.corpus) {
            let p = predicates(fx, &article.paragraphs);
            let holds = [p.0, p.1, p.2][pick];
            qualifying += usize::from(holds);
            let want = if holds { FACTOR } else { 1 };
            ensure!(
                entry.article_id == article.article_id && entry.replication_count == want,
                "{variant}: {} x{} but oracle says {} x{want}",
                entry.article_id,
                entry.replication_count,
                article.article_id
            );
        }
        let docs: Vec<Article> = records(out.path());
        let recount: u64 = docs
            .iter()
            .flat_map(|d| &d.paragraphs)
            .map(|p| words(&p.text) as u64)
            .sum();
        ensure!(
            recount == m.total_tokens,
            "{variant}: recount {recount} vs manifest {}",
            m.total_tokens
        );
        let copies: u32 = m.entries.iter().map(|e| e.replication_count).sum();
        ensure!(
            docs.len() as u32 == copies,
            "{variant}: {} documents for {copies} copies",
            docs.len()
        );
        summary.push(format!("{variant} {qualifying}x10"));
    }
    Ok(summary.join(", "))
}

fn prefix_line(a: &Annotation) -> String {
    format!(
        "<type={}|domain={}|edu={}|lang={}>",
        a.doc_type.as_str(),
        a.domain.as_str(),
        a.edu_score.get(),
        a.language
    )
}

fn be_all_composition(fx: &Fixture) -> Check {
    let out = TempDir::new().unwrap();
    fx.build("be-all", out.path())?;
    let mut expected = Vec::new();
    let mut counts = HashMap::new();
    for article in &fx.corpus {
        let survivors: Vec<Paragraph> = article
            .paragraphs
            .iter()
            .filter(|p| fx.label(p).edu_score.get() >= THRESHOLD)
            .cloned()
            .collect();
        if survivors.is_empty() {
            continue;
        }
        let (c, k, f) = predicates(fx, &survivors);
        let copies = if c || k || f { FACTOR } else { 1 };
        let paragraphs = survivors
            .iter()
            .map(|p| {
                let text = format!("{}\n{}", prefix_line(fx.label(p)), p.text);
                Paragraph {
                    token_count: words(&text),
                    text,
                    ..p.clone()
                }
            })
            .collect();
        let doc = Article {
            paragraphs,
            ..article.clone()
        };
        counts.insert(article.article_id.clone(), copies);
        expected.extend(std::iter::repeat(doc).take(copies as usize));
    }
    ensure!(
        shard_bytes(out.path()) == jsonl(&expected),
        "be_all shards differ from the oracle"
    );
    let m = manifest(out.path());
    for e in &m.entries {
        ensure!(
            counts.get(&e.article_id) == Some(&e.replication_count),
            "{} count",
            e.article_id
        );
    }
    ensure!(
        m.entries.len() == counts.len(),
        "manifest has {} entries",
        m.entries.len()
    );

    // Engineered cases, spelled out.
    let id = |n: u32| format!("PMC{}", 9_000_000 + n);
    ensure!(counts[&id(48)] == FACTOR, "three predicates must not stack");
    for n in [19, 20, 21] {
        ensure!(
            counts[&id(n)] == 1,
            "{}: filtered-out clinical case still upsampled",
            id(n)
        );
    }
    for n in [33, 34] {
        ensure!(
            counts[&id(n)] == 1,
            "{}: filtered-out French paragraph still upsampled",
            id(n)
        );
    }
    ensure!(counts[&id(46)] == 1, "clinical majority must be judged after filtering");
    ensure!(
        !counts.contains_key(&id(47)),
        "article with no surviving paragraph kept"
    );
    Ok(format!(
        "{} articles, {} documents match",
        m.entries.len(),
        expected.len()
    ))
}

fn response_text(score: &str, domain: &str, doc_type: &str) -> String {
    format!("Explanation: Clear and well structured.\nEducational score: {score}\nDomain: {domain}\nDocument type: {doc_type}")
}

fn fuzz_string(rng: &mut ChaCha8Rng) -> String {
    const PIECES: &[&str] = &[
        "Educational score:",
        "Domain:",
        "Document type:",
        "Explanation:",
        "**",
        "\n",
        "\r\n",
        ": ",
        "clinical",
        "Clinical case",
        "biomedical",
        "study",
        "review",
        "other",
        "0",
        "3",
        "5",
        "6",
        "-1",
        "4/5",
        "18446744073709551616",
        "1.",
        "é",
        "\u{0}",
        "\u{FEFF}",
        "😀",
        "   ",
    ];
    if rng.gen_bool(0.4) {
        return mutated_response(rng, PIECES);
    }
    let mut out = String::new();
    for _ in 0..rng.gen_range(0..24) {
        if rng.gen_bool(0.8) {
            out.push_str(PIECES[rng.gen_range(0..PIECES.len())]);
        } else {
            out.push(char::from_u32(rng.gen_range(0..0x3000)).unwrap_or('?'));
        }
    }
    out
}

/// A well-formed response with a few random edits: truncation, insertion
/// or deletion at a random character boundary.
fn mutated_response(rng: &mut ChaCha8Rng, pieces: &[&str]) -> String {
    let score = rng.gen_range(0..8).to_string();
    let domain = ["clinical", "Biomedical", "other", "veterinary"][rng.gen_range(0..4)];
    let doc_type = ["Clinical case", "study", "Review", "other", "letter"][rng.gen_range(0..5)];
    let mut text: Vec<char> = response_text(&score, domain, doc_type).chars().collect();
    for _ in 0..rng.gen_range(0..3) {
        let at = rng.gen_range(0..=text.len());
        match rng.gen_range(0..3) {
            0 => text.truncate(at),
            1 => {
                let piece = pieces[rng.gen_range(0..pieces.len())];
                text.splice(at..at, piece.chars());
            }
            _ => {
                let end = (at + rng.gen_range(1..6)).min(text.len());
                text.drain(at..end);
            }
        }
    }
    text.into_iter().collect()
}

fn prompt_round_trip() -> Check {
    let mut combos = 0;
    for score in EducationalScore::all() {
        for domain in DomainLabel::ALL {
            for doc_type in DocumentType::ALL {
                let extract = format!("Extract for {score} {} {}.", domain.as_str(), doc_type.as_str());
                let prompt = build_prompt(&extract).map_err(|e| e.to_string())?;
                ensure!(prompt.contains(&extract), "prompt lost the extract");
                // Domains as the model tends to write them, capitalized.
                let domain_text = format!("{}{}", domain.as_str()[..1].to_uppercase(), &domain.as_str()[1..]);
                let text = response_text(&score.to_string(), &domain_text, doc_type.display_name());
                let a = parse_llm_response(&text, "P-p00000").map_err(|e| format!("{text:?}: {e}"))?;
                ensure!(
                    (a.edu_score, a.domain, a.doc_type) == (score, domain, doc_type),
                    "{text:?} parsed to the wrong triple"
                );
                combos += 1;
            }
        }
    }
    ensure!(combos == 60, "{combos} combinations");

    let mut rng = ChaCha8Rng::seed_from_u64(0xF00D);
    let (mut ok, mut errors) = (0, 0);
    for i in 0..10_000 {
        let text = fuzz_string(&mut rng);
        match catch_unwind(|| parse_llm_response(&text, "F-p00000")) {
            Ok(Ok(a)) => {
                ensure!((1..=5).contains(&a.edu_score.get()), "fuzz {i}: score escaped range");
                ok += 1;
            }
            Ok(Err(_)) => errors += 1,
            Err(_) => return Err(format!("fuzz {i} panicked on {text:?}")),
        }
    }
    ensure!(ok > 0 && errors > 0, "fuzz reached only one outcome ({ok} parsed)");
    Ok(format!(
        "60/60 triples exact; 10000 fuzz strings: {ok} parsed, {errors} structured errors, 0 panics"
    ))
}

enum Unit {
    Whole(String),
    Piece(Vec<String>),
}

/// What the windows of one article must contain, in order: whole
/// paragraphs, or budget-sized token runs of paragraphs over budget.
fn expected_units(paragraphs: &[Paragraph]) -> Vec<Unit> {
    let mut units = Vec::new();
    for p in paragraphs {
        let tokens: Vec<String> = p.text.split_whitespace().map(str::to_string).collect();
        if tokens.len() <= BUDGET {
            units.push(Unit::Whole(p.text.clone()));
        } else {
            units.extend(tokens.chunks(BUDGET).map(|c| Unit::Piece(c.to_vec())));
        }
    }
    units
}

fn check_windows(article_id: &str, paragraphs: &[Paragraph], windows: &[&TrainingDocument]) -> Result<usize, String> {
    let mut actual = Vec::new();
    for (i, w) in windows.iter().enumerate() {
        ensure!(
            w.window_index == i,
            "{article_id}: window {} at position {i}",
            w.window_index
        );
        ensure!(w.token_count <= BUDGET, "{article_id}#{i}: {} tokens", w.token_count);
        ensure!(w.token_count == words(&w.text), "{article_id}#{i}: stale token_count");
        actual.extend(w.text.split(PARAGRAPH_SEPARATOR));
    }
    let expected = expected_units(paragraphs);
    ensure!(
        actual.len() == expected.len(),
        "{article_id}: {} units, expected {}",
        actual.len(),
        expected.len()
    );
    let mut pieces = 0;
    for (a, e) in actual.iter().zip(&expected) {
        match e {
            Unit::Whole(text) => ensure!(a == text, "{article_id}: paragraph split or reordered"),
            Unit::Piece(tokens) => {
                ensure!(
                    a.split_whitespace().eq(tokens.iter().map(String::as_str)),
                    "{article_id}: bad hard split"
                );
                pieces += 1;
            }
        }
    }
    Ok(pieces)
}

fn random_article(rng: &mut ChaCha8Rng, n: usize) -> Article {
    let id = format!("FUZZ{n:04}");
    let paragraphs = (0..rng.gen_range(1..12))
        .map(|i| {
            let len = if rng.gen_bool(0.03) {
                rng.gen_range(BUDGET + 1..3 * BUDGET)
            } else {
                rng.gen_range(1..1500)
            };
            let text = (0..len).map(|w| format!("t{w}")).collect::<Vec<_>>().join(" ");
            Paragraph {
                paragraph_id: format!("{id}-p{i:05}"),
                token_count: len,
                section_path: vec![],
                text,
            }
        })
        .collect();
    Article {
        article_id: id,
        license: License::Unknown,
        title: String::new(),
        paragraphs,
    }
}

fn packing(fx: &Fixture) -> Check {
    let tmp = TempDir::new().unwrap();
    let variant = tmp.path().join("be_all");
    let packed = tmp.path().join("packed");
    fx.build("be-all", &variant)?;
    step(&[
        "pack",
        "--input",
        s(&variant),
        "--context",
        "8192",
        "--output",
        s(&packed),
    ])?;
    let docs: Vec<Article> = records(&variant);
    let windows: Vec<TrainingDocument> = records(&packed);

    // Replicated copies are adjacent, and their windows number on.
    let mut fixture_pieces = 0;
    let mut start = 0;
    while start < docs.len() {
        let id = &docs[start].article_id;
        let end = docs[start..]
            .iter()
            .position(|d| &d.article_id != id)
            .map_or(docs.len(), |n| start + n);
        let paragraphs: Vec<Paragraph> = docs[start..end].iter().flat_map(|d| d.paragraphs.clone()).collect();
        let mine: Vec<&TrainingDocument> = windows.iter().filter(|w| &w.article_id == id).collect();
        fixture_pieces += check_windows(id, &paragraphs, &mine)?;
        start = end;
    }
    ensure!(fixture_pieces >= 2, "fixture oversized paragraph was not split");

    let mut rng = ChaCha8Rng::seed_from_u64(8192);
    let mut fuzz_pieces = 0;
    for n in 0..1000 {
        let article = random_article(&mut rng, n);
        let windows = pack_article(&article, BUDGET, &WhitespaceCounter);
        let refs: Vec<&TrainingDocument> = windows.iter().collect();
        fuzz_pieces += check_windows(&article.article_id, &article.paragraphs, &refs)?;
    }
    ensure!(fuzz_pieces > 0, "fuzz never produced an oversized paragraph");
    Ok(format!(
        "{} fixture windows, 1000 fuzzed articles; {} hard-split pieces, all windows <= 8192",
        windows.len(),
        fixture_pieces + fuzz_pieces
    ))
}

/// (group, population, counts of 1..=5, mean, median), computed by hand
/// from the fixture annotations.
type Expected = (&'static str, u64, [u64; 5], (u64, u64), (u64, u64));

const STATS_NONE: &[Expected] = &[("all", 185, [16, 45, 41, 39, 44], (121, 37), (3, 1))];
const STATS_DOMAIN: &[Expected] = &[
    ("clinical", 59, [0, 17, 15, 14, 13], (200, 59), (3, 1)),
    ("biomedical", 114, [12, 20, 26, 25, 31], (385, 114), (3, 1)),
    ("other", 12, [4, 8, 0, 0, 0], (5, 3), (2, 1)),
];
const STATS_DOC_TYPE: &[Expected] = &[
    ("clinical_case", 13, [0, 3, 3, 3, 4], (47, 13), (4, 1)),
    ("study", 113, [9, 24, 28, 28, 24], (373, 113), (3, 1)),
    ("review", 47, [3, 10, 10, 8, 16], (165, 47), (4, 1)),
    ("other", 12, [4, 8, 0, 0, 0], (5, 3), (2, 1)),
];

fn stats() -> Check {
    let tmp = TempDir::new().unwrap();
    let mut worst_sum_error: f64 = 0.0;
    for (by, expected) in [
        ("none", STATS_NONE),
        ("domain", STATS_DOMAIN),
        ("doc_type", STATS_DOC_TYPE),
    ] {
        let out = tmp.path().join(format!("{by}.json"));
        step(&[
            "stats",
            "--annotations",
            s(&fixture("annotations")),
            "--by",
            by,
            "--output",
            s(&out),
        ])?;
        let report: Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
        let groups = report["distributions"].as_array().unwrap();
        ensure!(groups.len() == expected.len(), "{by}: {} groups", groups.len());
        for (g, (key, population, counts, mean, median)) in groups.iter().zip(expected) {
            ensure!(
                g["group_key"] == *key && g["population"] == *population,
                "{by}/{key}: population"
            );
            let mut share_sum = 0.0;
            for (score, &count) in (1..=5).zip(counts) {
                let k = score.to_string();
                ensure!(g["counts"][&k] == count, "{by}/{key}: count of {k}");
                let share = g["shares"][&k].as_f64().unwrap();
                ensure!(
                    (share - count as f64 / *population as f64).abs() < 1e-12,
                    "{by}/{key}: share of {k}"
                );
                share_sum += share;
            }
            worst_sum_error = worst_sum_error.max((share_sum - 1.0).abs());
            ensure!((share_sum - 1.0).abs() <= 1e-9, "{by}/{key}: shares sum to {share_sum}");
            for (name, (num, den)) in [("mean", mean), ("median", median)] {
                ensure!(
                    g[name]["numerator"] == *num && g[name]["denominator"] == *den,
                    "{by}/{key}: {name} {} != {num}/{den}",
                    g[name]
                );
            }
        }
    }
    Ok(format!(
        "3 groupings exact; max |sum(shares) - 1| = {worst_sum_error:.1e}"
    ))
}

fn determinism() -> Check {
    let mut hashes = Vec::new();
    let mut shards = Vec::new();
    for jobs in ["1", "4"] {
        let tmp = TempDir::new().unwrap();
        let corpus = tmp.path().join("corpus");
        let out = tmp.path().join("be_all");
        step(&[
            "--jobs",
            jobs,
            "ingest",
            "--input",
            s(&fixture("jats")),
            "--output",
            s(&corpus),
        ])?;
        step(&[
            "--jobs",
            jobs,
            "build",
            "--variant",
            "be-all",
            "--corpus",
            s(&corpus),
            "--annotations",
            s(&fixture("annotations")),
            "--output",
            s(&out),
        ])?;
        hashes.push(manifest(&out).content_hash);
        shards.push(shard_bytes(&out));
    }
    ensure!(hashes[0] == hashes[1], "content hashes differ: {hashes:?}");
    ensure!(shards[0] == shards[1], "shard bytes differ");
    Ok(format!("content_hash {} on both runs", &hashes[0][..16]))
}

const VOCAB: &[&str] = &[
    "patient",
    "cells",
    "expression",
    "treatment",
    "protein",
    "clinical",
    "analysis",
    "tumor",
    "response",
    "dose",
    "mice",
    "signaling",
    "receptor",
    "outcome",
    "cohort",
    "risk",
    "gene",
    "tissue",
    "infection",
    "therapy",
    "the",
    "of",
    "and",
    "in",
    "with",
    "was",
    "were",
    "a",
    "to",
    "by",
];

fn synthetic_jats(rng: &mut ChaCha8Rng, n: usize) -> Vec<(String, Vec<u8>)> {
    (0..n)
        .map(|i| {
            let mut body = String::new();
            for s in 0..5 {
                body.push_str(&format!("<sec><title>Section {s}</title>"));
                for _ in 0..10 {
                    let len = rng.gen_range(66..110);
                    let text: Vec<&str> = (0..len).map(|_| VOCAB[rng.gen_range(0..VOCAB.len())]).collect();
                    body.push_str(&format!("<p>{} <italic>x</italic>.</p>", text.join(" ")));
                }
                body.push_str("</sec>");
            }
            let xml = format!(
                "<article><front><article-meta><article-id pub-id-type=\"pmcid\">PMC{}</article-id>\
                 <title-group><article-title>T{i}</article-title></title-group></article-meta></front>\
                 <body>{body}</body></article>",
                5_000_000 + i
            );
            (format!("a{i}.xml"), xml.into_bytes())
        })
        .collect()
}

/// Returns (check result, whether a failure is only the host's CPU count).
fn throughput() -> (Check, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let docs = synthetic_jats(&mut rng, 1000);
    let time = |jobs| {
        let started = Instant::now();
        let articles = ingest_documents(&docs, 64, &WhitespaceCounter, jobs).unwrap();
        (
            started.elapsed(),
            articles.iter().map(|a| a.paragraphs.len()).sum::<usize>(),
        )
    };
    let (single, paragraphs) = time(1);
    let (parallel, parallel_paragraphs) = time(8);
    let speedup = single.as_secs_f64() / parallel.as_secs_f64();
    let cpus = std::thread::available_parallelism().map_or(1, |n| n.get());
    let detail = format!(
        "1000 articles / {paragraphs} paragraphs: {:.2} s on 1 worker, {:.2} s on 8 ({speedup:.2}x, host has {cpus} CPUs)",
        single.as_secs_f64(),
        parallel.as_secs_f64()
    );
    if paragraphs != 50_000 || parallel_paragraphs != paragraphs {
        return (Err(format!("{detail}; expected 50000 paragraphs on both runs")), false);
    }
    if single >= Duration::from_secs(10) {
        return (Err(format!("{detail}; single-threaded limit is 10 s")), false);
    }
    if speedup < 3.0 {
        return (Err(format!("{detail}; needs >= 3x")), cpus < 8);
    }
    (Ok(detail), false)
}

fn report(name: &str, outcome: std::thread::Result<Check>) -> bool {
    match outcome {
        Ok(Ok(detail)) => {
            println!("PASS  {name}: {detail}");
            true
        }
        Ok(Err(reason)) => {
            println!("FAIL  {name}: {reason}");
            false
        }
        Err(_) => {
            println!("FAIL  {name}: panicked");
            false
        }
    }
}

fn main() {
    // `cargo test -- --list` and filters are not meaningful for this target.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let fx = catch_unwind(Fixture::load);
    let mut failures = 0;
    let mut host_limited = 0;
    let mut run = |name: &str, outcome: std::thread::Result<Check>| {
        if !report(name, outcome) {
            failures += 1;
        }
    };

    run("fixture_end_to_end", catch_unwind(end_to_end));
    match &fx {
        Ok(Ok(fx)) => {
            run(
                "educational_filter_exact",
                catch_unwind(AssertUnwindSafe(|| educational_exactness(fx))),
            );
            run(
                "replication_exact",
                catch_unwind(AssertUnwindSafe(|| replication_exactness(fx))),
            );
            run(
                "be_all_composition",
                catch_unwind(AssertUnwindSafe(|| be_all_composition(fx))),
            );
            run("prompt_parse_round_trip", catch_unwind(prompt_round_trip));
            run("packing", catch_unwind(AssertUnwindSafe(|| packing(fx))));
        }
        _ => {
            for name in [
                "educational_filter_exact",
                "replication_exact",
                "be_all_composition",
                "packing",
            ] {
                run(name, Ok(Err("fixture ingest failed".into())));
            }
            run("prompt_parse_round_trip", catch_unwind(prompt_round_trip));
        }
    }
    run("stats_exact", catch_unwind(stats));
    run("determinism", catch_unwind(determinism));
    match catch_unwind(throughput) {
        Ok((outcome, limited)) => {
            if limited {
                host_limited += 1;
            }
            run("ingest_throughput", Ok(outcome));
        }
        Err(e) => run("ingest_throughput", Err(e)),
    }

    let counted = failures - host_limited;
    println!(
        "\n{} criteria, {failures} failed{}",
        9,
        if host_limited > 0 {
            format!(
                " ({host_limited} only because this host has fewer than 8 CPUs; not counted toward the exit status)"
            )
        } else {
            String::new()
        }
    );
    if counted > 0 {
        std::process::exit(1);
    }
}
