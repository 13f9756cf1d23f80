//! JATS article XML to [`Article`].
//!
//! Handles the subset of JATS that carries text: `front/article-meta`
//! (accession id, title, license) and `body` (sections, titles, paragraphs).
//! Tables, figures, captions, display formulas, reference lists,
//! acknowledgments and supplementary material are skipped wholesale. Inline
//! markup (italics, inline formulas, cross references) contributes its text.

use std::borrow::Cow;

use paracurate_core::article::paragraph_id;
use paracurate_core::{Article, License, Paragraph, TokenCounter, WhitespaceCounter};
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JatsError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("no PMC accession id in article-meta")]
    MissingIdentifier,
}

/// Elements whose whole subtree is not paragraph text.
const SKIPPED: &[&[u8]] = &[
    b"table-wrap",
    b"table-wrap-group",
    b"table",
    b"fig",
    b"fig-group",
    b"caption",
    b"graphic",
    b"media",
    b"disp-formula",
    b"disp-formula-group",
    b"ref-list",
    b"ack",
    b"supplementary-material",
    b"fn-group",
    b"label",
    b"alternatives",
    b"array",
    b"chem-struct-wrap",
    b"code",
    b"preformat",
];

/// Elements that separate words when nested inside a paragraph.
const BLOCK_BREAKS: &[&[u8]] = &[b"p", b"list", b"list-item", b"disp-quote", b"def-item", b"break"];

const PMC_ID_TYPES: &[&str] = &["pmc", "pmcid", "pmcaid"];

fn local(name: &[u8]) -> &[u8] {
    match name.iter().rposition(|&b| b == b':') {
        Some(i) => &name[i + 1..],
        None => name,
    }
}

fn attr(e: &BytesStart<'_>, key: &[u8]) -> Option<String> {
    e.attributes().flatten().find_map(|a| {
        (local(a.key.as_ref()) == key).then(|| {
            a.unescape_value()
                .map(Cow::into_owned)
                .unwrap_or_else(|_| String::from_utf8_lossy(&a.value).into_owned())
        })
    })
}

/// Collapses every whitespace run to one space and trims.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn resolve_entity(name: &str) -> Option<&'static str> {
    if let Some(predefined) = quick_xml::escape::resolve_predefined_entity(name) {
        return Some(predefined);
    }
    Some(match name {
        "nbsp" => " ",
        "ndash" => "–",
        "mdash" => "—",
        "hellip" => "…",
        "plusmn" => "±",
        "times" => "×",
        "deg" => "°",
        "micro" => "µ",
        "lsquo" | "rsquo" => "'",
        "ldquo" | "rdquo" => "\"",
        _ => return None,
    })
}

#[derive(Default)]
struct State {
    stack: Vec<Vec<u8>>,
    body_depth: usize,
    skip_depth: usize,
    front_depth: usize,
    paragraph_depth: usize,
    paragraph: String,
    sections: Vec<Option<String>>,
    title_capture: Option<String>,
    article_title: Option<String>,
    article_title_capture: Option<String>,
    id_capture: Option<String>,
    article_id: Option<String>,
    license_ref_capture: Option<String>,
    license_descriptors: Vec<String>,
    paragraphs: Vec<(String, Vec<String>)>,
}

impl State {
    fn parent(&self) -> Option<&[u8]> {
        self.stack.last().map(Vec::as_slice)
    }

    fn in_meta(&self) -> bool {
        self.front_depth > 0 && self.stack.iter().any(|n| n == b"article-meta")
    }

    fn open(&mut self, e: &BytesStart<'_>, empty: bool) {
        let name = local(e.name().as_ref()).to_vec();
        if name == b"license" && self.in_meta() {
            self.license_descriptors.extend(attr(e, b"href"));
            self.license_descriptors.extend(attr(e, b"license-type"));
        }
        if empty {
            if self.paragraph_depth > 0 && BLOCK_BREAKS.contains(&name.as_slice()) {
                self.paragraph.push(' ');
            }
            return;
        }

        match name.as_slice() {
            b"front" => self.front_depth += 1,
            b"body" => self.body_depth += 1,
            _ => {}
        }
        if self.body_depth > 0 && self.skip_depth == 0 {
            if SKIPPED.contains(&name.as_slice()) {
                self.skip_depth = 1;
            } else if name == b"sec" {
                self.sections.push(None);
            } else if name == b"title" && self.parent() == Some(b"sec") && self.paragraph_depth == 0 {
                self.title_capture = Some(String::new());
            } else if name == b"p" {
                if self.paragraph_depth == 0 {
                    self.paragraph.clear();
                } else {
                    self.paragraph.push(' ');
                }
                self.paragraph_depth += 1;
            } else if self.paragraph_depth > 0 && BLOCK_BREAKS.contains(&name.as_slice()) {
                self.paragraph.push(' ');
            }
        } else if self.skip_depth > 0 {
            self.skip_depth += 1;
        }

        if self.in_meta() {
            match name.as_slice() {
                b"article-id" if self.article_id.is_none() => {
                    let kind = attr(e, b"pub-id-type").unwrap_or_default().to_ascii_lowercase();
                    if PMC_ID_TYPES.contains(&kind.as_str()) {
                        self.id_capture = Some(String::new());
                    }
                }
                b"article-title" if self.article_title.is_none() && self.parent() == Some(b"title-group") => {
                    self.article_title_capture = Some(String::new());
                }
                b"license_ref" | b"license-p" => self.license_ref_capture = Some(String::new()),
                _ => {}
            }
        }
        self.stack.push(name);
    }

    fn close(&mut self, name: &[u8]) -> Result<(), JatsError> {
        let name = local(name);
        match self.stack.pop() {
            Some(open) if open == name => {}
            Some(open) => {
                return Err(JatsError::MalformedXml(format!(
                    "</{}> closes <{}>",
                    String::from_utf8_lossy(name),
                    String::from_utf8_lossy(&open)
                )))
            }
            None => {
                return Err(JatsError::MalformedXml(format!(
                    "unmatched </{}>",
                    String::from_utf8_lossy(name)
                )))
            }
        }

        if self.skip_depth > 0 {
            self.skip_depth -= 1;
        } else if self.body_depth > 0 {
            match name {
                b"sec" => {
                    self.sections.pop();
                }
                b"title" if self.title_capture.is_some() => {
                    let title = normalize_whitespace(&self.title_capture.take().unwrap_or_default());
                    if let Some(top) = self.sections.last_mut() {
                        *top = (!title.is_empty()).then_some(title);
                    }
                }
                b"p" if self.paragraph_depth > 0 => {
                    self.paragraph_depth -= 1;
                    if self.paragraph_depth == 0 {
                        let text = normalize_whitespace(&self.paragraph);
                        if !text.is_empty() {
                            let path = self.sections.iter().flatten().cloned().collect();
                            self.paragraphs.push((text, path));
                        }
                    } else {
                        self.paragraph.push(' ');
                    }
                }
                _ if self.paragraph_depth > 0 && BLOCK_BREAKS.contains(&name) => self.paragraph.push(' '),
                _ => {}
            }
        }

        match name {
            b"front" => self.front_depth = self.front_depth.saturating_sub(1),
            b"body" => self.body_depth = self.body_depth.saturating_sub(1),
            b"article-id" => {
                if let Some(id) = self.id_capture.take() {
                    let id = id.trim();
                    if !id.is_empty() {
                        self.article_id = Some(if id.bytes().all(|b| b.is_ascii_digit()) {
                            format!("PMC{id}")
                        } else {
                            id.to_string()
                        });
                    }
                }
            }
            b"article-title" => {
                if let Some(t) = self.article_title_capture.take() {
                    self.article_title = Some(normalize_whitespace(&t));
                }
            }
            b"license_ref" | b"license-p" => {
                if let Some(t) = self.license_ref_capture.take() {
                    self.license_descriptors.push(normalize_whitespace(&t));
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn text(&mut self, text: &str) {
        if let Some(c) = self.id_capture.as_mut() {
            c.push_str(text);
        }
        if let Some(c) = self.article_title_capture.as_mut() {
            c.push_str(text);
        }
        if let Some(c) = self.license_ref_capture.as_mut() {
            c.push_str(text);
        }
        if self.body_depth == 0 || self.skip_depth > 0 {
            return;
        }
        if let Some(c) = self.title_capture.as_mut() {
            c.push_str(text);
        } else if self.paragraph_depth > 0 {
            self.paragraph.push_str(text);
        }
    }
}

/// Parses one article with the default whitespace token counter.
pub fn parse_article(xml: &[u8]) -> Result<Article, JatsError> {
    parse_article_with(xml, &WhitespaceCounter)
}

/// Parses one article. Paragraph ids are provisional ordinals over all body
/// paragraphs; [`paracurate_core::segment_and_filter`] reassigns them.
pub fn parse_article_with(xml: &[u8], counter: &dyn TokenCounter) -> Result<Article, JatsError> {
    let mut reader = Reader::from_reader(xml);
    reader.config_mut().check_end_names = false;
    let mut state = State::default();
    let mut saw_root = false;
    let malformed = |e: quick_xml::Error, pos: u64| JatsError::MalformedXml(format!("{e} at byte {pos}"));

    loop {
        let event = reader
            .read_event()
            .map_err(|e| malformed(e, reader.buffer_position()))?;
        match event {
            Event::Start(e) => {
                saw_root = true;
                state.open(&e, false);
            }
            Event::Empty(e) => {
                saw_root = true;
                state.open(&e, true);
            }
            Event::End(e) => state.close(e.name().as_ref())?,
            Event::Text(t) => {
                let text = t
                    .unescape_with(resolve_entity)
                    .map_err(|e| malformed(e, reader.buffer_position()))?;
                state.text(&text);
            }
            Event::CData(c) => {
                let raw = c.into_inner();
                let text = std::str::from_utf8(&raw)
                    .map_err(|e| JatsError::MalformedXml(format!("CDATA is not UTF-8: {e}")))?;
                state.text(text);
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if !saw_root {
        return Err(JatsError::MalformedXml("no root element".into()));
    }
    if let Some(open) = state.stack.last() {
        return Err(JatsError::MalformedXml(format!(
            "document ends inside <{}>",
            String::from_utf8_lossy(open)
        )));
    }

    let article_id = state.article_id.ok_or(JatsError::MissingIdentifier)?;
    let license = License::classify_all(state.license_descriptors.iter().map(String::as_str));
    let paragraphs = state
        .paragraphs
        .into_iter()
        .enumerate()
        .map(|(i, (text, path))| {
            let mut p = Paragraph::unassigned(text, path, counter);
            p.paragraph_id = paragraph_id(&article_id, i);
            p
        })
        .collect();
    Ok(Article {
        article_id,
        license,
        title: state.article_title.unwrap_or_default(),
        paragraphs,
    })
}
