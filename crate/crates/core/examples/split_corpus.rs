//! Expand the sample templates and split them by record and by template.
//!
//! cargo run --example split_corpus

use std::collections::BTreeSet;
use std::path::Path;

use signgloss::augment::{self, DaDictionary};
use signgloss::dataset::{self, CorpusRecord, Grouping, SplitSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sample = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample");
    let dictionary = DaDictionary::load(sample.join("dictionary.tsv"))?;
    let templates = augment::load_templates(sample.join("templates.jsonl"))?;
    let rules = dataset::parse_rules(&std::fs::read_to_string(sample.join("deny.txt"))?)?;

    let filtered = dataset::filter_by(&templates, &rules, |t| t.source.as_str());
    println!(
        "kept {} templates, removed {}",
        filtered.kept.len(),
        filtered.removed.len()
    );
    let (pairs, stats) = augment::expand_corpus(&filtered.kept, &dictionary)?;
    println!("{} pairs, factor {:.2}", stats.expanded, stats.factor);
    let corpus: Vec<CorpusRecord> = pairs.iter().map(CorpusRecord::from).collect();

    let spec = SplitSpec::with_seed(610);
    let by_record = dataset::split(&corpus, &spec)?;
    println!(
        "\nby record:   {:?} (quota {:?})",
        by_record.counts(),
        spec.counts(corpus.len())
    );

    let spec = SplitSpec {
        grouping: Grouping::ByTemplate,
        ..spec
    };
    let by_template = dataset::split(&corpus, &spec)?;
    println!("by template: {:?}", by_template.counts());
    let ids = |rs: &[CorpusRecord]| rs.iter().map(|r| r.template_id.clone()).collect::<BTreeSet<_>>();
    let (train, test) = (ids(&by_template.train), ids(&by_template.test));
    println!("test templates {test:?}");
    assert!(train.is_disjoint(&test));

    let s = dataset::stats(&corpus);
    println!("\n{}", serde_json::to_string_pretty(&s)?);
    Ok(())
}
