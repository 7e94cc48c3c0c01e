//! Build a template memory from expanded pairs and translate held-out
//! combinations it never saw verbatim.
//!
//! cargo run --example translation_memory

use signgloss::augment::{expand_sr, parse_template, DaDictionary};
use signgloss::baseline::{abstract_source, build_memory};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dictionary = DaDictionary::from_tsv(
        "Body part\tknee\tknee\n\
         Body part\tchest\tchest\n\
         Body part\tlower back\tlower / back\n\
         Time\tyesterday\tyesterday\n\
         Time\tlast week\tlast / week\n",
    )?;
    let template = parse_template(
        "My [a_Body part_a] has hurt since [a_Time_a].",
        "[a_Time_a] / since / [a_Body part_a] / pain[HS]",
        "t1",
    )?;
    let pairs = expand_sr(&template, &dictionary)?;

    // Every term appears once in training, but most combinations do not.
    let (train, held_out): (Vec<_>, Vec<_>) = pairs.into_iter().enumerate().partition(|(i, _)| [0, 3, 4].contains(i));
    let train: Vec<_> = train.into_iter().map(|(_, p)| p).collect();
    let memory = build_memory(&train, &dictionary);
    println!("{} entry from {} training pairs", memory.len(), train.len());
    println!("pattern: {}", abstract_source(&dictionary, &train[0].source).pattern);

    for (_, p) in &held_out {
        let out = memory.translate(&p.source)?;
        let mark = if out == p.target { "ok" } else { "differs" };
        println!("{:40} => {out}  [{mark}]", p.source);
    }

    // Terms outside the training sources are not abstracted.
    match memory.translate("My wrist has hurt since yesterday.") {
        Ok(t) => println!("\nunexpected: {t}"),
        Err(e) => println!("\nno pattern: {e}"),
    }

    let restored = signgloss::baseline::TranslationMemory::from_json(&memory.to_json())?;
    assert_eq!(restored.len(), memory.len());
    Ok(())
}
