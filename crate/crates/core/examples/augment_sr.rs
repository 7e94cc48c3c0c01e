//! Template expansion by synonym replacement, then the seeded EDA operations.
//!
//! cargo run --example augment_sr

use signgloss::augment::{eda, expand_sr, parse_template, DaDictionary};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dictionary = DaDictionary::from_tsv(
        "Family member\tbrother\tbrother\n\
         Family member\tsister-in-law\tsister-in-law\n\
         Disease name\tkidney disease\tkidney disease\n\
         Disease name\tdiabetes\tdiabetes\n\
         Disease name\ta cold\tcold\n",
    )?;
    let template = parse_template(
        "Is my [a_Family member_a] suffering from [a_Disease name_a]?",
        "[a_Family member_a] / [a_Disease name_a] / in-progress?",
        "t01",
    )?;
    println!("expansion size: {}", template.expansion_size(&dictionary)?);

    let pairs = expand_sr(&template, &dictionary)?;
    for p in &pairs {
        println!("{:6} {:45} => {}", p.id, p.source, p.target);
    }

    let seed = 610;
    let first = &pairs[0];
    let swapped = eda::random_swap(first, 1, seed);
    let deleted = eda::random_deletion(first, 0.3, seed)?;
    let inserted = eda::random_insertion(first, &dictionary, 1, seed);
    println!("\nswap:   {} => {}", swapped.pair.source, swapped.pair.target);
    println!("delete: {} => {}", deleted.pair.source, deleted.pair.target);
    println!("insert: {} => {}", inserted.pair.source, inserted.pair.target);

    // Same seed, same output.
    assert_eq!(eda::random_swap(first, 1, seed), swapped);
    Ok(())
}
