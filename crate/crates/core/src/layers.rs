//! Manual / iconic / non-manual layer separation.
//!
//! [`extract_layers`] replaces every icon with `{ICON}` and every non-manual
//! tag with `[NMS]`, moving the removed content into two positional lists.
//! [`merge_layers`] is its exact inverse.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::{AnnotatedSentence, AnnotationElement, AnnotationError};
use crate::tokenize::{SubwordModel, TokenizeError};

pub const ICON_MARKER: &str = "{ICON}";
pub const NMS_MARKER: &str = "[NMS]";
/// Separates consecutive icon descriptions in the icon stream.
pub const ICON_BOUNDARY: &str = "<sep>";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayerError {
    #[error("skeleton has {markers} {marker} marker(s) but the layer holds {entries}")]
    MarkerCountMismatch {
        marker: &'static str,
        markers: usize,
        entries: usize,
    },
    #[error("[NMS] marker in element {element} is not attached to a gloss")]
    DanglingNmsMarker { element: usize },
    #[error("non-manual layer entry {entry} points at element {expected}, marker sits on element {found}")]
    NmsIndexMismatch {
        entry: usize,
        expected: usize,
        found: usize,
    },
    #[error("skeleton element {element} carries a tag other than [NMS]")]
    UnexpectedTag { element: usize },
    #[error("invalid skeleton: {0}")]
    Skeleton(#[from] AnnotationError),
    #[error("tokenizer does not keep {0} atomic")]
    UnprotectedMarker(&'static str),
    #[error(transparent)]
    Tokenize(#[from] TokenizeError),
}

/// Manual skeleton plus positional iconic and non-manual layers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiLayerRecord {
    pub skeleton: String,
    pub icons: Vec<String>,
    /// `(code, element index)` in skeleton order.
    pub nms: Vec<(String, usize)>,
}

pub fn extract_layers(sentence: &AnnotatedSentence) -> MultiLayerRecord {
    let mut icons = Vec::new();
    let mut nms = Vec::new();
    let mut parts = Vec::with_capacity(sentence.len());
    for (index, element) in sentence.elements().iter().enumerate() {
        match element {
            AnnotationElement::Icon { description } => {
                icons.push(description.clone());
                parts.push(ICON_MARKER.to_string());
            }
            AnnotationElement::Gloss { surface, nms: codes } => {
                let mut part = surface.clone();
                for code in codes {
                    nms.push((code.clone(), index));
                    part.push_str(NMS_MARKER);
                }
                parts.push(part);
            }
        }
    }
    MultiLayerRecord {
        skeleton: parts.join(" / "),
        icons,
        nms,
    }
}

pub fn merge_layers(record: &MultiLayerRecord) -> Result<AnnotatedSentence, LayerError> {
    let icon_markers = record.skeleton.matches(ICON_MARKER).count();
    if icon_markers != record.icons.len() {
        return Err(LayerError::MarkerCountMismatch {
            marker: ICON_MARKER,
            markers: icon_markers,
            entries: record.icons.len(),
        });
    }
    let nms_markers = record.skeleton.matches(NMS_MARKER).count();
    if nms_markers != record.nms.len() {
        return Err(LayerError::MarkerCountMismatch {
            marker: NMS_MARKER,
            markers: nms_markers,
            entries: record.nms.len(),
        });
    }

    let mut icons = record.icons.iter();
    let mut nms = record.nms.iter().enumerate();
    let mut elements = Vec::new();
    for (index, segment) in record.skeleton.split('/').enumerate() {
        let segment = segment.trim();
        if let Some(rest) = segment.strip_prefix(ICON_MARKER) {
            if rest.trim_start().starts_with('[') {
                return Err(LayerError::DanglingNmsMarker { element: index });
            }
            if !rest.trim().is_empty() {
                return Err(AnnotationError::MissingSeparator { column: 0 }.into());
            }
            let description = icons.next().expect("count checked");
            elements.push(AnnotationElement::icon(description.clone())?);
            continue;
        }
        let parsed = match segment.parse::<AnnotatedSentence>() {
            Ok(p) => p,
            Err(AnnotationError::DanglingNms { .. }) => return Err(LayerError::DanglingNmsMarker { element: index }),
            Err(e) => return Err(e.into()),
        };
        let Some(AnnotationElement::Gloss { surface, nms: markers }) = parsed.into_elements().pop() else {
            return Err(AnnotationError::MissingSeparator { column: 0 }.into());
        };
        let mut codes = Vec::with_capacity(markers.len());
        for marker in markers {
            if marker != "NMS" {
                return Err(LayerError::UnexpectedTag { element: index });
            }
            let (entry, (code, at)) = nms.next().expect("count checked");
            if *at != index {
                return Err(LayerError::NmsIndexMismatch {
                    entry,
                    expected: *at,
                    found: index,
                });
            }
            codes.push(code.clone());
        }
        elements.push(AnnotationElement::gloss(surface, codes)?);
    }
    Ok(AnnotatedSentence::new(elements)?)
}

/// Three aligned streams for one record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelInput {
    pub manual: Vec<String>,
    pub nms_stream: Vec<String>,
    pub icon_stream: Vec<String>,
}

impl ModelInput {
    /// Marker counts in the manual stream match the other streams.
    pub fn is_aligned(&self) -> bool {
        let icons = self.manual.iter().filter(|p| p.as_str() == ICON_MARKER).count();
        let nms = self.manual.iter().filter(|p| p.as_str() == NMS_MARKER).count();
        let descriptions = if self.icon_stream.is_empty() {
            0
        } else {
            self.icon_stream.iter().filter(|p| p.as_str() == ICON_BOUNDARY).count() + 1
        };
        icons == descriptions && nms == self.nms_stream.len()
    }
}

/// Tokenizes the skeleton and icon descriptions with `tok`; non-manual codes
/// pass through as atomic tokens. The tokenizer must protect both markers.
pub fn to_model_input(record: &MultiLayerRecord, tok: &SubwordModel) -> Result<ModelInput, LayerError> {
    for marker in [ICON_MARKER, NMS_MARKER] {
        if !tok.is_protected(marker) {
            return Err(LayerError::UnprotectedMarker(marker));
        }
    }
    let manual = tok.encode_pieces(&record.skeleton);
    let mut icon_stream = Vec::new();
    for (i, description) in record.icons.iter().enumerate() {
        if i > 0 {
            icon_stream.push(ICON_BOUNDARY.to_string());
        }
        icon_stream.extend(tok.encode_pieces(description));
    }
    let nms_stream = record.nms.iter().map(|(code, _)| code.clone()).collect();
    Ok(ModelInput {
        manual,
        nms_stream,
        icon_stream,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenize::train_bpe;

    fn sentence(text: &str) -> AnnotatedSentence {
        text.parse().unwrap()
    }

    #[test]
    fn table_example_extracts() {
        let r = extract_layers(&sentence("(vomiting action) / want?[BE]"));
        assert_eq!(r.skeleton, "{ICON} / want?[NMS]");
        assert_eq!(r.icons, ["vomiting action"]);
        assert_eq!(r.nms, [("BE".to_string(), 1)]);
        assert_eq!(merge_layers(&r).unwrap().to_string(), "(vomiting action) / want?[BE]");
    }

    #[test]
    fn nothing_to_extract() {
        let r = extract_layers(&sentence("hello / doctor"));
        assert_eq!(r.skeleton, "hello / doctor");
        assert!(r.icons.is_empty() && r.nms.is_empty());
        assert_eq!(merge_layers(&r).unwrap(), sentence("hello / doctor"));
    }

    #[test]
    fn multi_icon_multi_tag() {
        let s = sentence("(cough action) / pain[BE][HF] / (point chest) / where?");
        let r = extract_layers(&s);
        assert_eq!(r.skeleton, "{ICON} / pain[NMS][NMS] / {ICON} / where?");
        assert_eq!(r.nms, [("BE".to_string(), 1), ("HF".to_string(), 1)]);
        assert_eq!(merge_layers(&r).unwrap(), s);
    }

    #[test]
    fn merge_errors() {
        let base = MultiLayerRecord {
            skeleton: "{ICON} / want?[NMS]".into(),
            icons: vec![],
            nms: vec![("BE".into(), 1)],
        };
        assert!(matches!(
            merge_layers(&base),
            Err(LayerError::MarkerCountMismatch {
                marker: ICON_MARKER,
                ..
            })
        ));

        let dangling = MultiLayerRecord {
            skeleton: "{ICON}[NMS] / want?".into(),
            icons: vec!["x".into()],
            nms: vec![("BE".into(), 0)],
        };
        assert_eq!(
            merge_layers(&dangling),
            Err(LayerError::DanglingNmsMarker { element: 0 })
        );

        let bare = MultiLayerRecord {
            skeleton: "a / [NMS]".into(),
            icons: vec![],
            nms: vec![("BE".into(), 1)],
        };
        assert_eq!(merge_layers(&bare), Err(LayerError::DanglingNmsMarker { element: 1 }));

        let wrong_index = MultiLayerRecord {
            skeleton: "a / b[NMS]".into(),
            icons: vec![],
            nms: vec![("BE".into(), 0)],
        };
        assert!(matches!(
            merge_layers(&wrong_index),
            Err(LayerError::NmsIndexMismatch { .. })
        ));

        let stray = MultiLayerRecord {
            skeleton: "a[BE]".into(),
            icons: vec![],
            nms: vec![],
        };
        assert_eq!(merge_layers(&stray), Err(LayerError::UnexpectedTag { element: 0 }));
    }

    #[test]
    fn model_input_streams() {
        let corpus = ["(vomiting action) / want?[BE]", "are you nauseous?"];
        let tok = train_bpe(&corpus, 200, &[ICON_MARKER, NMS_MARKER]).unwrap();
        let r = extract_layers(&sentence(corpus[0]));
        let input = to_model_input(&r, &tok).unwrap();
        assert_eq!(input.nms_stream, ["BE"]);
        assert!(!input.manual.is_empty() && !input.icon_stream.is_empty());
        assert!(input.is_aligned());
        assert_eq!(tok.decode_pieces(&input.manual), r.skeleton);

        let empty = to_model_input(&extract_layers(&sentence("want?")), &tok).unwrap();
        assert!(empty.icon_stream.is_empty() && empty.nms_stream.is_empty());

        let plain = train_bpe(&corpus, 200, &[]).unwrap();
        assert_eq!(
            to_model_input(&r, &plain),
            Err(LayerError::UnprotectedMarker(ICON_MARKER))
        );
    }
}
