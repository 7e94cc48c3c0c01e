//! Parse, lint and re-serialize annotation lines.
//!
//! cargo run --example annotate

use signgloss::annotation::{lint_annotation, parse_annotation, AnnotationElement, NmsRegistry, NmsTag};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut registry = NmsRegistry::with_defaults();
    registry.insert(NmsTag::new("HS", "Head Shake")?)?;

    let line = "brother / (hand on chest) / kidney disease[BE][HS] / in-progress?";
    let sentence = parse_annotation(line, &registry, true)?;
    for (i, e) in sentence.elements().iter().enumerate() {
        let kind = if e.is_icon() { "icon" } else { "gloss" };
        println!("{i}: {kind:5} {:?} nms={:?}", e.text(), e.nms());
    }
    assert_eq!(sentence.to_string(), line);

    // Loose spacing parses, but lint points out the canonical form.
    let sloppy = "brother/kidney disease [BE] /  in-progress?";
    let parsed = parse_annotation(sloppy, &registry, false)?;
    println!("\n{sloppy:?}\n  canonical: {parsed}");
    for w in lint_annotation(sloppy, &registry) {
        println!("  {w}");
    }

    for bad in ["brother / (unclosed", "pain[ZZ]", ""] {
        match parse_annotation(bad, &registry, true) {
            Ok(s) => println!("{bad:?} -> {s}"),
            Err(e) => println!("{bad:?} -> error: {e}"),
        }
    }

    let built = signgloss::annotation::AnnotatedSentence::new(vec![
        AnnotationElement::gloss("knee", ["HS"])?,
        AnnotationElement::icon("swelling shape")?,
    ])?;
    println!("\nbuilt: {built}");
    Ok(())
}
