//! Gloss annotation grammar.
//!
//! An annotated sentence is a `/`-separated sequence of elements. Each
//! element is either an iconic feature written in parentheses,
//! `(vomiting action)`, or a manual gloss optionally followed by one or more
//! non-manual signal tags in brackets, `want?[BE]`.
//!
//! The characters `( ) [ ] / { }` are reserved. Braces never appear in a
//! surface annotation; they are used only by the `{ICON}` placeholder of the
//! layer skeleton (see [`crate::layers`]).
//!
//! ```
//! use signgloss::annotation::{parse_annotation, NmsRegistry};
//!
//! let registry = NmsRegistry::with_defaults();
//! let sentence = parse_annotation("(vomiting action)/want? [BE]", &registry, true).unwrap();
//! assert_eq!(sentence.len(), 2);
//! assert_eq!(sentence.to_string(), "(vomiting action) / want?[BE]");
//! ```

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Characters with grammatical meaning; never part of a surface text.
pub const RESERVED: [char; 7] = ['(', ')', '[', ']', '/', '{', '}'];

/// Elements longer than this many words get a lint warning.
pub const LINT_MAX_ELEMENT_WORDS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnotationError {
    #[error("annotation is empty")]
    EmptyInput,
    #[error("unbalanced mark '{mark}' at column {column}")]
    UnbalancedMark { mark: char, column: usize },
    #[error("mark opened inside another mark at column {column}")]
    NestedMark { column: usize },
    #[error("empty element at column {column}")]
    EmptyElement { column: usize },
    #[error("non-manual tag at column {column} is not attached to a gloss")]
    DanglingNms { column: usize },
    #[error("two elements without a '/' separator at column {column}")]
    MissingSeparator { column: usize },
    #[error("reserved character '{ch}' at column {column}")]
    ReservedCharacter { ch: char, column: usize },
    #[error("unknown non-manual code '{code}'")]
    UnknownNmsCode { code: String },
    #[error("invalid non-manual code '{code}'")]
    InvalidNmsCode { code: String },
    #[error("invalid element text '{text}'")]
    InvalidText { text: String },
    #[error("duplicate non-manual code '{code}'")]
    DuplicateCode { code: String },
    #[error("registry line {line}: {message}")]
    RegistryLine { line: usize, message: String },
    #[error("cannot read registry: {0}")]
    Io(String),
}

fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// True when `text` is usable as a gloss surface or icon description.
pub fn is_valid_text(text: &str) -> bool {
    !text.is_empty() && !text.contains(RESERVED) && collapse_whitespace(text) == text
}

/// True when `code` is usable as a non-manual signal code.
pub fn is_valid_code(code: &str) -> bool {
    !code.is_empty() && !code.contains(RESERVED) && !code.chars().any(char::is_whitespace)
}

/// An abbreviated non-manual signal, e.g. `BE` for "Bigger Eyes".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NmsTag {
    code: String,
    description: String,
}

impl NmsTag {
    pub fn new(code: impl Into<String>, description: impl Into<String>) -> Result<Self, AnnotationError> {
        let code = code.into();
        if !is_valid_code(&code) {
            return Err(AnnotationError::InvalidNmsCode { code });
        }
        Ok(Self {
            code,
            description: description.into(),
        })
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

/// Known non-manual signal codes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NmsRegistry {
    entries: Vec<NmsTag>,
    index: HashMap<String, usize>,
}

impl NmsRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding only `BE` (Bigger Eyes).
    pub fn with_defaults() -> Self {
        let mut registry = Self::new();
        registry
            .insert(NmsTag::new("BE", "Bigger Eyes").expect("valid code"))
            .expect("empty registry");
        registry
    }

    pub fn insert(&mut self, tag: NmsTag) -> Result<(), AnnotationError> {
        if self.index.contains_key(tag.code()) {
            return Err(AnnotationError::DuplicateCode { code: tag.code.clone() });
        }
        self.index.insert(tag.code.clone(), self.entries.len());
        self.entries.push(tag);
        Ok(())
    }

    pub fn get(&self, code: &str) -> Option<&NmsTag> {
        self.index.get(code).map(|&i| &self.entries[i])
    }

    pub fn contains(&self, code: &str) -> bool {
        self.index.contains_key(code)
    }

    pub fn iter(&self) -> impl Iterator<Item = &NmsTag> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parses the `code<TAB>description` registry format. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn from_tsv(text: &str) -> Result<Self, AnnotationError> {
        let mut registry = Self::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (code, description) = line.split_once('\t').ok_or_else(|| AnnotationError::RegistryLine {
                line: line_no,
                message: "expected code<TAB>description".into(),
            })?;
            let tag = NmsTag::new(code.trim(), description.trim()).map_err(|e| AnnotationError::RegistryLine {
                line: line_no,
                message: e.to_string(),
            })?;
            registry.insert(tag).map_err(|e| AnnotationError::RegistryLine {
                line: line_no,
                message: e.to_string(),
            })?;
        }
        Ok(registry)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, AnnotationError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| AnnotationError::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_tsv(&text)
    }

    pub fn to_tsv(&self) -> String {
        self.entries
            .iter()
            .map(|t| format!("{}\t{}\n", t.code, t.description))
            .collect()
    }
}

/// One `/`-delimited unit of an annotated sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AnnotationElement {
    Icon { description: String },
    Gloss { surface: String, nms: Vec<String> },
}

impl AnnotationElement {
    pub fn icon(description: impl Into<String>) -> Result<Self, AnnotationError> {
        let description = description.into();
        if !is_valid_text(&description) {
            return Err(AnnotationError::InvalidText { text: description });
        }
        Ok(Self::Icon { description })
    }

    pub fn gloss<I, S>(surface: impl Into<String>, nms: I) -> Result<Self, AnnotationError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let surface = surface.into();
        if !is_valid_text(&surface) {
            return Err(AnnotationError::InvalidText { text: surface });
        }
        let nms = nms.into_iter().map(Into::into).collect::<Vec<String>>();
        if let Some(bad) = nms.iter().find(|c| !is_valid_code(c)) {
            return Err(AnnotationError::InvalidNmsCode { code: bad.clone() });
        }
        Ok(Self::Gloss { surface, nms })
    }

    fn validate(&self) -> Result<(), AnnotationError> {
        match self {
            Self::Icon { description } => Self::icon(description.clone()).map(|_| ()),
            Self::Gloss { surface, nms } => Self::gloss(surface.clone(), nms.iter().cloned()).map(|_| ()),
        }
    }

    pub fn is_icon(&self) -> bool {
        matches!(self, Self::Icon { .. })
    }

    /// Non-manual codes carried by this element; always empty for icons.
    pub fn nms(&self) -> &[String] {
        match self {
            Self::Icon { .. } => &[],
            Self::Gloss { nms, .. } => nms,
        }
    }

    /// The surface text or the icon description.
    pub fn text(&self) -> &str {
        match self {
            Self::Icon { description } => description,
            Self::Gloss { surface, .. } => surface,
        }
    }
}

impl fmt::Display for AnnotationElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Icon { description } => write!(f, "({description})"),
            Self::Gloss { surface, nms } => {
                f.write_str(surface)?;
                for code in nms {
                    write!(f, "[{code}]")?;
                }
                Ok(())
            }
        }
    }
}

/// A non-empty, validated sequence of annotation elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AnnotatedSentence {
    elements: Vec<AnnotationElement>,
}

impl AnnotatedSentence {
    pub fn new(elements: Vec<AnnotationElement>) -> Result<Self, AnnotationError> {
        if elements.is_empty() {
            return Err(AnnotationError::EmptyInput);
        }
        for element in &elements {
            element.validate()?;
        }
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[AnnotationElement] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<AnnotationElement> {
        self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Canonical text; identical to `to_string()`.
    pub fn serialize(&self) -> String {
        serialize_annotation(self)
    }
}

impl fmt::Display for AnnotatedSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, element) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(" / ")?;
            }
            write!(f, "{element}")?;
        }
        Ok(())
    }
}

impl FromStr for AnnotatedSentence {
    type Err = AnnotationError;

    /// Permissive parse: unknown codes are accepted.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_annotation(s, &NmsRegistry::new(), false)
    }
}

impl Serialize for AnnotatedSentence {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AnnotatedSentence {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for AnnotationElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AnnotationElement {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        let sentence: AnnotatedSentence = text.parse().map_err(serde::de::Error::custom)?;
        let mut elements = sentence.into_elements();
        if elements.len() != 1 {
            return Err(serde::de::Error::custom(format!("expected one element, got '{text}'")));
        }
        Ok(elements.pop().expect("length checked"))
    }
}

#[derive(Debug)]
enum Part {
    Text { text: String, column: usize },
    Icon { text: String, column: usize },
    Tag { text: String, column: usize },
}

impl Part {
    fn column(&self) -> usize {
        match self {
            Part::Text { column, .. } | Part::Icon { column, .. } | Part::Tag { column, .. } => *column,
        }
    }
}

struct Segment {
    parts: Vec<Part>,
    /// Column of the `/` that opened this segment (or 1 for the first).
    column: usize,
}

/// Splits the line into segments of marks and free text, checking mark
/// balance. No element-level validation happens here.
fn scan(text: &str) -> Result<Vec<Segment>, AnnotationError> {
    let mut segments = vec![Segment {
        parts: Vec::new(),
        column: 1,
    }];
    let mut buf = String::new();
    let mut buf_column = 1;
    let mut open: Option<(char, usize)> = None;

    fn flush_text(segments: &mut [Segment], buf: &mut String, column: usize) {
        if !buf.trim().is_empty() {
            segments.last_mut().unwrap().parts.push(Part::Text {
                text: std::mem::take(buf),
                column,
            });
        }
        buf.clear();
    }

    for (i, ch) in text.chars().enumerate() {
        let column = i + 1;
        match open {
            Some((opener, open_column)) => match ch {
                ')' if opener == '(' => {
                    let part = Part::Icon {
                        text: std::mem::take(&mut buf),
                        column: open_column,
                    };
                    segments.last_mut().unwrap().parts.push(part);
                    open = None;
                }
                ']' if opener == '[' => {
                    let part = Part::Tag {
                        text: std::mem::take(&mut buf),
                        column: open_column,
                    };
                    segments.last_mut().unwrap().parts.push(part);
                    open = None;
                }
                '(' | '[' => return Err(AnnotationError::NestedMark { column }),
                '{' | '}' => return Err(AnnotationError::ReservedCharacter { ch, column }),
                ')' | ']' | '/' => {
                    return Err(AnnotationError::UnbalancedMark {
                        mark: opener,
                        column: open_column,
                    })
                }
                _ => buf.push(ch),
            },
            None => match ch {
                '(' | '[' => {
                    flush_text(&mut segments, &mut buf, buf_column);
                    open = Some((ch, column));
                }
                ')' | ']' => return Err(AnnotationError::UnbalancedMark { mark: ch, column }),
                '{' | '}' => return Err(AnnotationError::ReservedCharacter { ch, column }),
                '/' => {
                    flush_text(&mut segments, &mut buf, buf_column);
                    segments.push(Segment {
                        parts: Vec::new(),
                        column,
                    });
                }
                _ => {
                    if buf.is_empty() {
                        buf_column = column;
                    }
                    buf.push(ch);
                }
            },
        }
    }
    if let Some((mark, column)) = open {
        return Err(AnnotationError::UnbalancedMark { mark, column });
    }
    flush_text(&mut segments, &mut buf, buf_column);
    Ok(segments)
}

fn element_from_segment(
    segment: Segment,
    registry: &NmsRegistry,
    strict: bool,
) -> Result<AnnotationElement, AnnotationError> {
    let mut parts = segment.parts.into_iter();
    let first = parts
        .next()
        .ok_or(AnnotationError::EmptyElement { column: segment.column })?;
    match first {
        Part::Tag { column, .. } => Err(AnnotationError::DanglingNms { column }),
        Part::Icon { text, column } => {
            let description = collapse_whitespace(&text);
            if description.is_empty() {
                return Err(AnnotationError::EmptyElement { column });
            }
            match parts.next() {
                None => Ok(AnnotationElement::Icon { description }),
                Some(Part::Tag { column, .. }) => Err(AnnotationError::DanglingNms { column }),
                Some(other) => Err(AnnotationError::MissingSeparator { column: other.column() }),
            }
        }
        Part::Text { text, .. } => {
            let surface = collapse_whitespace(&text);
            let mut nms = Vec::new();
            for part in parts {
                match part {
                    Part::Tag { text, column } => {
                        let code = text.trim();
                        if code.is_empty() {
                            return Err(AnnotationError::EmptyElement { column });
                        }
                        if !is_valid_code(code) {
                            return Err(AnnotationError::InvalidNmsCode { code: code.to_string() });
                        }
                        if strict && !registry.contains(code) {
                            return Err(AnnotationError::UnknownNmsCode { code: code.to_string() });
                        }
                        nms.push(code.to_string());
                    }
                    other => return Err(AnnotationError::MissingSeparator { column: other.column() }),
                }
            }
            Ok(AnnotationElement::Gloss { surface, nms })
        }
    }
}

/// Parses one annotation line.
///
/// With `strict` set, tags whose code is missing from `registry` are an
/// error; otherwise they are accepted and only reported by
/// [`lint_annotation`].
pub fn parse_annotation(
    text: &str,
    registry: &NmsRegistry,
    strict: bool,
) -> Result<AnnotatedSentence, AnnotationError> {
    if text.trim().is_empty() {
        return Err(AnnotationError::EmptyInput);
    }
    let elements = scan(text)?
        .into_iter()
        .map(|segment| element_from_segment(segment, registry, strict))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AnnotatedSentence { elements })
}

pub fn serialize_annotation(sentence: &AnnotatedSentence) -> String {
    sentence.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LintWarning {
    /// The line does not parse at all.
    Fatal(AnnotationError),
    UnknownCode {
        code: String,
    },
    /// Whitespace between a gloss and its `[` tag.
    SpaceBeforeBracket {
        column: usize,
    },
    /// Spacing differs from the canonical form for another reason.
    NonCanonicalSpacing {
        canonical: String,
    },
    /// An element with many words, possibly a missed separator.
    LongElement {
        index: usize,
        words: usize,
    },
}

impl LintWarning {
    pub fn is_fatal(&self) -> bool {
        matches!(self, Self::Fatal(_))
    }
}

impl fmt::Display for LintWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fatal(e) => write!(f, "error: {e}"),
            Self::UnknownCode { code } => write!(f, "warning: unknown non-manual code '{code}'"),
            Self::SpaceBeforeBracket { column } => {
                write!(f, "warning: non-canonical space before bracket at column {column}")
            }
            Self::NonCanonicalSpacing { canonical } => {
                write!(f, "warning: non-canonical spacing, expected \"{canonical}\"")
            }
            Self::LongElement { index, words } => write!(
                f,
                "warning: element {index} has {words} words, possibly a missing separator"
            ),
        }
    }
}

/// Reports non-fatal problems in an annotation line. Parse failures come
/// back as a single [`LintWarning::Fatal`] entry.
pub fn lint_annotation(text: &str, registry: &NmsRegistry) -> Vec<LintWarning> {
    let sentence = match parse_annotation(text, registry, false) {
        Ok(s) => s,
        Err(e) => return vec![LintWarning::Fatal(e)],
    };
    let mut warnings = Vec::new();

    let chars: Vec<char> = text.chars().collect();
    let mut depth = false;
    let mut without_bracket_space = String::with_capacity(text.len());
    for (i, &ch) in chars.iter().enumerate() {
        match ch {
            '(' | '[' => depth = true,
            ')' | ']' => depth = false,
            _ => {}
        }
        if ch.is_whitespace() && !depth {
            let next = chars[i..].iter().find(|c| !c.is_whitespace());
            let prev = chars[..i].iter().rev().find(|c| !c.is_whitespace());
            if next == Some(&'[') && prev.is_some_and(|&p| p != '/') {
                if chars.get(i.wrapping_sub(1)).is_none_or(|c| !c.is_whitespace()) {
                    warnings.push(LintWarning::SpaceBeforeBracket { column: i + 1 });
                }
                continue;
            }
        }
        without_bracket_space.push(ch);
    }

    let canonical = sentence.to_string();
    if without_bracket_space != canonical {
        warnings.push(LintWarning::NonCanonicalSpacing { canonical });
    }

    for (index, element) in sentence.elements().iter().enumerate() {
        for code in element.nms() {
            if !registry.contains(code) {
                warnings.push(LintWarning::UnknownCode { code: code.clone() });
            }
        }
        let words = element.text().split(' ').count();
        if words > LINT_MAX_ELEMENT_WORDS {
            warnings.push(LintWarning::LongElement { index, words });
        }
    }
    warnings
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gloss(surface: &str, nms: &[&str]) -> AnnotationElement {
        AnnotationElement::gloss(surface, nms.iter().copied()).unwrap()
    }

    fn icon(d: &str) -> AnnotationElement {
        AnnotationElement::icon(d).unwrap()
    }

    fn parse(text: &str) -> Result<AnnotatedSentence, AnnotationError> {
        parse_annotation(text, &NmsRegistry::with_defaults(), false)
    }

    #[test]
    fn table_example() {
        let s = parse("(vomiting action) / want?[BE]").unwrap();
        assert_eq!(s.elements(), &[icon("vomiting action"), gloss("want?", &["BE"])]);
        assert_eq!(s.to_string(), "(vomiting action) / want?[BE]");
    }

    #[test]
    fn bare_gloss() {
        let s = parse("hello").unwrap();
        assert_eq!(s.elements(), &[gloss("hello", &[])]);
        assert_eq!(s.to_string(), "hello");
    }

    #[test]
    fn unspaced_separator() {
        let s = parse("(blood extraction action)/test").unwrap();
        assert_eq!(s.elements(), &[icon("blood extraction action"), gloss("test", &[])]);
    }

    #[test]
    fn multiple_tags_in_order() {
        // Reference parse assembled by hand: surface up to the first '[',
        // then each bracket body in order.
        let text = "want?[BE][HF]";
        let open = text.find('[').unwrap();
        let surface = &text[..open];
        let codes: Vec<&str> = text[open..]
            .split(']')
            .filter(|s| !s.is_empty())
            .map(|s| s.trim_start_matches('['))
            .collect();
        let reference = AnnotatedSentence::new(vec![gloss(surface, &codes)]).unwrap();
        assert_eq!(parse(text).unwrap(), reference);
        assert_eq!(codes, ["BE", "HF"]);
    }

    #[test]
    fn error_paths() {
        assert!(matches!(
            parse("(open"),
            Err(AnnotationError::UnbalancedMark { mark: '(', column: 1 })
        ));
        assert!(matches!(
            parse("want?[BE"),
            Err(AnnotationError::UnbalancedMark { mark: '[', .. })
        ));
        assert!(matches!(
            parse("close)"),
            Err(AnnotationError::UnbalancedMark { mark: ')', .. })
        ));
        assert!(matches!(
            parse("(a (b))"),
            Err(AnnotationError::NestedMark { column: 4 })
        ));
        assert!(matches!(parse("x[a[b]]"), Err(AnnotationError::NestedMark { .. })));
        assert!(matches!(parse("a // b"), Err(AnnotationError::EmptyElement { .. })));
        assert!(matches!(parse("a / "), Err(AnnotationError::EmptyElement { .. })));
        assert!(matches!(parse("()"), Err(AnnotationError::EmptyElement { .. })));
        assert!(matches!(parse("x[]"), Err(AnnotationError::EmptyElement { .. })));
        assert!(matches!(parse("[BE]"), Err(AnnotationError::DanglingNms { column: 1 })));
        assert!(matches!(parse("a / [BE]"), Err(AnnotationError::DanglingNms { .. })));
        assert!(matches!(parse("(cry)[BE]"), Err(AnnotationError::DanglingNms { .. })));
        assert!(matches!(
            parse("{ICON} / a"),
            Err(AnnotationError::ReservedCharacter { ch: '{', .. })
        ));
        assert!(matches!(parse("(a) b"), Err(AnnotationError::MissingSeparator { .. })));
        assert!(matches!(
            parse("a[BE] b"),
            Err(AnnotationError::MissingSeparator { .. })
        ));
        assert!(matches!(
            parse("(a/b)"),
            Err(AnnotationError::UnbalancedMark { mark: '(', .. })
        ));
        assert!(matches!(parse("x[B E]"), Err(AnnotationError::InvalidNmsCode { .. })));
        assert!(matches!(parse("   "), Err(AnnotationError::EmptyInput)));
    }

    #[test]
    fn strict_flag_controls_unknown_codes() {
        let registry = NmsRegistry::with_defaults();
        assert!(parse_annotation("want?[XX]", &registry, false).is_ok());
        assert_eq!(
            parse_annotation("want?[XX]", &registry, true),
            Err(AnnotationError::UnknownNmsCode { code: "XX".into() })
        );
        assert!(parse_annotation("want?[BE]", &registry, true).is_ok());
    }

    #[test]
    fn whitespace_is_canonicalized() {
        let s = parse("  brother  /kidney   disease/ in-progress? ").unwrap();
        assert_eq!(s.to_string(), "brother / kidney disease / in-progress?");
        assert_eq!(s.elements()[1], gloss("kidney disease", &[]));
    }

    #[test]
    fn lint_space_before_bracket() {
        let warnings = lint_annotation("want? [BE]", &NmsRegistry::with_defaults());
        assert_eq!(warnings, vec![LintWarning::SpaceBeforeBracket { column: 6 }]);
    }

    #[test]
    fn lint_unknown_code() {
        let warnings = lint_annotation("want?[XX]", &NmsRegistry::with_defaults());
        assert_eq!(warnings, vec![LintWarning::UnknownCode { code: "XX".into() }]);
    }

    #[test]
    fn lint_canonical_is_clean() {
        let registry = NmsRegistry::with_defaults();
        assert!(lint_annotation("(vomiting action) / want?[BE]", &registry).is_empty());
        assert!(lint_annotation("hello", &registry).is_empty());
    }

    #[test]
    fn lint_other_spacing_and_length() {
        let registry = NmsRegistry::with_defaults();
        let w = lint_annotation("a/b", &registry);
        assert_eq!(
            w,
            vec![LintWarning::NonCanonicalSpacing {
                canonical: "a / b".into()
            }]
        );
        let w = lint_annotation("one two three four five six seven / end", &registry);
        assert_eq!(w, vec![LintWarning::LongElement { index: 0, words: 7 }]);
        let w = lint_annotation("(a", &registry);
        assert!(w[0].is_fatal());
    }

    #[test]
    fn registry_tsv() {
        let registry = NmsRegistry::from_tsv("# codes\nBE\tBigger Eyes\n\nHF\tHead Forward\n").unwrap();
        assert_eq!(registry.len(), 2);
        assert_eq!(registry.get("HF").unwrap().description(), "Head Forward");
        assert_eq!(NmsRegistry::from_tsv(&registry.to_tsv()).unwrap(), registry);
        assert!(matches!(
            NmsRegistry::from_tsv("BE\tx\nBE\ty\n"),
            Err(AnnotationError::RegistryLine { line: 2, .. })
        ));
        assert!(matches!(
            NmsRegistry::from_tsv("B(E\tx\n"),
            Err(AnnotationError::RegistryLine { line: 1, .. })
        ));
        assert!(matches!(
            NmsRegistry::from_tsv("BE\n"),
            Err(AnnotationError::RegistryLine { line: 1, .. })
        ));
    }

    #[test]
    fn constructors_reject_reserved() {
        assert!(AnnotationElement::icon("a(b").is_err());
        assert!(AnnotationElement::gloss("a/b", Vec::<String>::new()).is_err());
        assert!(AnnotationElement::gloss(" padded", Vec::<String>::new()).is_err());
        assert!(AnnotationElement::gloss("ok", ["B E"]).is_err());
        assert!(AnnotatedSentence::new(vec![]).is_err());
    }
}
