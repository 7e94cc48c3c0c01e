//! Train the subword and cohesion tokenizers on the sample corpus and
//! compare how they cut the same lines.
//!
//! cargo run --example train_tokenizers

use std::path::Path;

use signgloss::augment::{self, DaDictionary};
use signgloss::tokenize::{train_bpe, CohesionTokenizer, TokenizerModel, UNK};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sample = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample");
    let dictionary = DaDictionary::load(sample.join("dictionary.tsv"))?;
    let templates = augment::load_templates(sample.join("templates.jsonl"))?;
    let (pairs, _) = augment::expand_corpus(&templates, &dictionary)?;
    let lines: Vec<String> = pairs
        .iter()
        .flat_map(|p| [p.source.clone(), p.target.to_string()])
        .collect();

    let bpe = train_bpe(&lines, 400, &["/", "(", ")"])?;
    let cohesion = CohesionTokenizer::train(&lines, 2, 6)?;
    println!("bpe vocab {} merges {}", bpe.vocab_len(), bpe.merges().len());
    println!("cohesion vocab {}", cohesion.vocab().len());

    for text in [
        "Does your knee hurt since yesterday?",
        "knee / pain / since / yesterday",
        "zebra xylophone",
    ] {
        let b = bpe.encode_pieces(text);
        let c = cohesion.encode_pieces(text);
        println!("\n{text}\n  bpe:      {}\n  cohesion: {}", b.join(" "), c.join(" "));
        let unk = b.iter().filter(|p| p.as_str() == UNK).count();
        if unk > 0 {
            println!("  ({unk} bpe pieces are {UNK})");
        } else {
            assert_eq!(bpe.decode_pieces(&b), text);
        }
    }

    // Model files carry a header, so one loader reads either kind.
    let restored = TokenizerModel::from_model_str(&cohesion.to_model_string())?;
    println!("\nreloaded a {} model", restored.kind());
    Ok(())
}
