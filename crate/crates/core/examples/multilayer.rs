//! Split an annotation into manual, iconic and non-manual layers and back.
//!
//! cargo run --example multilayer

use signgloss::annotation::{parse_annotation, NmsRegistry, NmsTag};
use signgloss::layers::{extract_layers, merge_layers, to_model_input, ICON_MARKER, NMS_MARKER};
use signgloss::tokenize::train_bpe;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut registry = NmsRegistry::with_defaults();
    registry.insert(NmsTag::new("HS", "Head Shake")?)?;
    let lines = [
        "your / (pointing at knee) / swollen?[BE]",
        "pain[HS] / (hand on chest) / (rubbing) / since / yesterday",
    ];
    let mut records = Vec::new();
    for line in lines {
        let sentence = parse_annotation(line, &registry, true)?;
        let record = extract_layers(&sentence);
        println!("{line}");
        println!("  skeleton: {}", record.skeleton);
        println!("  icons:    {:?}", record.icons);
        println!("  nms:      {:?}", record.nms);
        assert_eq!(merge_layers(&record)?, sentence);
        records.push(record);
    }

    let corpus: Vec<&str> = records
        .iter()
        .map(|r| r.skeleton.as_str())
        .chain(records.iter().flat_map(|r| r.icons.iter().map(String::as_str)))
        .collect();
    let tok = train_bpe(&corpus, 80, &[ICON_MARKER, NMS_MARKER, "/"])?;
    for record in &records {
        let input = to_model_input(record, &tok)?;
        println!(
            "\nmanual: {:?}\nnms:    {:?}\nicons:  {:?}",
            input.manual, input.nms_stream, input.icon_stream
        );
        assert!(input.is_aligned());
    }
    Ok(())
}
