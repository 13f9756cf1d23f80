use std::fs;
use std::path::{Path, PathBuf};

use paracurate::corpus::{ingest_dir, ingest_documents};
use paracurate::jats::parse_article;
use paracurate_core::{License, WhitespaceCounter};
use proptest::prelude::*;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

#[test]
fn fixture_corpus_shape() {
    let articles = ingest_dir(&fixture("jats"), 64, &WhitespaceCounter, 1).unwrap();
    assert_eq!(articles.len(), 49);
    assert!(
        articles.iter().all(|a| a.article_id != "PMC9000045"),
        "all-short article kept"
    );
    assert!(articles.windows(2).all(|w| w[0].article_id < w[1].article_id));

    let count = |l| articles.iter().filter(|a| a.license == l).count();
    assert!(count(License::CommercialOk) > 0 && count(License::NonCommercial) > 0 && count(License::Unknown) > 0);

    for a in &articles {
        for p in &a.paragraphs {
            assert!(p.token_count >= 64);
            assert!(
                !p.text.contains("This abstract summarizes"),
                "{}: abstract leaked",
                p.paragraph_id
            );
            assert!(
                !p.text.contains("Representative image"),
                "{}: figure caption leaked",
                p.paragraph_id
            );
            assert!(
                !p.text.contains('<') || p.text.contains("p < 0.05"),
                "{}: markup",
                p.paragraph_id
            );
        }
    }
    let nested = articles.iter().find(|a| a.article_id == "PMC9000049").unwrap();
    assert_eq!(
        nested.paragraphs[1].section_path,
        ["Introduction", "Laboratory findings"]
    );
}

#[test]
fn worker_count_does_not_change_output() {
    let docs: Vec<(PathBuf, Vec<u8>)> = fs::read_dir(fixture("jats"))
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    let one = ingest_documents(&docs, 64, &WhitespaceCounter, 1).unwrap();
    let four = ingest_documents(&docs, 64, &WhitespaceCounter, 4).unwrap();
    assert_eq!(one, four);
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Escaped paragraph text survives the parser up to whitespace
    /// normalization, in document order.
    #[test]
    fn paragraph_text_round_trips(paragraphs in prop::collection::vec("[a-zA-Z0-9 <>&;.,%éü\t\n-]{1,80}", 1..8)) {
        let body: String = paragraphs.iter().map(|p| format!("<p>{}</p>", escape(p))).collect();
        let xml = format!(
            "<article><front><article-meta><article-id pub-id-type=\"pmcid\">PMC1</article-id></article-meta></front><body>{body}</body></article>"
        );
        let article = parse_article(xml.as_bytes()).unwrap();
        let expected: Vec<String> = paragraphs
            .iter()
            .map(|p| p.split_whitespace().collect::<Vec<_>>().join(" "))
            .filter(|p| !p.is_empty())
            .collect();
        let actual: Vec<String> = article.paragraphs.into_iter().map(|p| p.text).collect();
        prop_assert_eq!(actual, expected);
    }
}
