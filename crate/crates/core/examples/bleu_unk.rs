//! Corpus BLEU and how much of it comes from matching unknown tokens.
//!
//! cargo run --example bleu_unk

use signgloss::eval::{corpus_bleu, split_tokens, unk_diagnostic, Smoothing};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let refs = [
        "brother / kidney disease / in-progress?",
        "knee / pain / since / yesterday",
    ];
    let hyps = ["brother / kidney disease / in-progress?", "knee / pain / yesterday"];
    let r: Vec<Vec<&str>> = refs.iter().map(|s| split_tokens(s)).collect();
    let h: Vec<Vec<&str>> = hyps.iter().map(|s| split_tokens(s)).collect();

    let report = corpus_bleu(&r, &h, 4, Smoothing::None)?;
    println!(
        "BLEU {:.2}  precisions {:.3?}  BP {:.4}",
        report.score, report.precisions, report.brevity_penalty
    );
    println!("matches {:?} totals {:?}", report.matches, report.totals);

    // Short segments: orders with no hypothesis n-grams drop out of the mean.
    let short = corpus_bleu(&[vec!["a", "b"]], &[vec!["a", "b"]], 4, Smoothing::None)?;
    println!(
        "\ntwo-token exact match: {:.1} over {} orders",
        short.score, short.effective_order
    );

    // A tokenizer that maps everything unseen to <unk> scores well on noise.
    let r = vec![vec!["<unk>", "<unk>", "test"]];
    let h = vec![vec!["<unk>", "<unk>", "test"]];
    let d = unk_diagnostic(&r, &h, "<unk>", 4)?;
    println!("\nraw BLEU {:.1}", d.bleu_raw.score);
    println!(
        "unk tokens {:.3}, matches involving unk {}/{}",
        d.unk_token_fraction, d.unk_matches, d.total_matches
    );
    match &d.bleu_unk_masked {
        Some(m) => println!("masked BLEU {:.1}", m.score),
        None => println!("nothing left after masking"),
    }
    Ok(())
}
