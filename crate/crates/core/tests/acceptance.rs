//! Acceptance checks. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; exits non-zero on any failure.

mod common;

use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{ensure, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use signgloss::annotation::AnnotatedSentence;
use signgloss::augment::{expand_corpus, expand_sr, load_templates, DaDictionary};
use signgloss::baseline::{build_memory, BaselineError};
use signgloss::dataset::{self, CorpusRecord, SplitSpec};
use signgloss::eval::{corpus_bleu, split_tokens, unk_diagnostic, Smoothing, MAX_ORDER};
use signgloss::layers::{extract_layers, merge_layers, ICON_MARKER, NMS_MARKER};
use signgloss::pipeline::{first_entry_corpus, run_pipeline, PipelineConfig, RunOptions};
use signgloss::tokenize::{train_bpe, UNK};

fn records(n: usize) -> Vec<CorpusRecord> {
    (0..n)
        .map(|i| CorpusRecord {
            id: format!("r{i:06}"),
            template_id: format!("t{}", i % 610),
            source: "s".into(),
            target: "x".into(),
            bindings: vec![],
            split: Default::default(),
        })
        .collect()
}

fn within(start: Instant, limit: Duration) -> Result<()> {
    let took = start.elapsed();
    ensure!(took < limit, "took {took:?}, limit {limit:?}");
    Ok(())
}

fn split_arithmetic() -> Result<String> {
    let spec = SplitSpec::with_seed(42);
    let mut out = Vec::new();
    for (n, want) in [(40_558, (28_390, 8_111, 4_057)), (610, (427, 122, 61))] {
        let corpus = records(n);
        let start = Instant::now();
        let got = dataset::split(&corpus, &spec)?.counts();
        within(start, Duration::from_secs(1))?;
        ensure!(got == want, "N={n}: got {got:?}, want {want:?}");
        out.push(format!("{n} -> {}/{}/{}", got.0, got.1, got.2));
    }
    Ok(out.join(", "))
}

fn augmentation_counting() -> Result<String> {
    let pairs = expand_sr(&common::family_template(), &common::family_dictionary())?;
    ensure!(pairs.len() == 4, "family fixture gave {}", pairs.len());

    let (templates, dictionary) = common::synthetic_610();
    let start = Instant::now();
    let (expanded, stats) = expand_corpus(&templates, &dictionary)?;
    within(start, Duration::from_secs(10))?;
    ensure!(stats.original == 610 && expanded.len() == 40_558, "{stats:?}");
    let factor = 40_558.0 / 610.0;
    ensure!(stats.factor == factor, "factor {}", stats.factor);
    ensure!((stats.factor - 66.5).abs() < 0.05, "factor {}", stats.factor);
    Ok(format!(
        "family 4 pairs, 610 -> {} (factor {:.3})",
        expanded.len(),
        stats.factor
    ))
}

fn annotation_round_trip() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let start = Instant::now();
    let mut failures = 0;
    for _ in 0..10_000 {
        let s = common::random_sentence(&mut rng);
        let text = s.to_string();
        let parsed: AnnotatedSentence = text.parse()?;
        let layers = extract_layers(&s);
        if parsed != s || parsed.to_string() != text || merge_layers(&layers)? != s {
            failures += 1;
        }
    }
    within(start, Duration::from_secs(5))?;
    ensure!(failures == 0, "{failures} failures");
    Ok("10000 sentences, 0 failures".into())
}

fn table_pipeline() -> Result<String> {
    let text = "(vomiting action) / want?[BE]";
    let s: AnnotatedSentence = text.parse()?;
    ensure!(s.len() == 2, "{} elements", s.len());
    let r = extract_layers(&s);
    ensure!(r.skeleton == "{ICON} / want?[NMS]", "skeleton {}", r.skeleton);
    ensure!(r.icons == ["vomiting action"], "icons {:?}", r.icons);
    ensure!(r.nms == [("BE".to_string(), 1)], "nms {:?}", r.nms);
    let merged = merge_layers(&r)?.to_string();
    ensure!(merged == text, "merged {merged}");
    Ok(format!("{text} -> {}", r.skeleton))
}

/// Sentence BLEU from first principles: every hypothesis window is checked
/// against an explicit list of reference windows, each usable once.
fn brute_force_bleu(reference: &[&str], hypothesis: &[&str]) -> f64 {
    let mut log_sum = 0.0;
    let mut orders = 0;
    for n in 1..=MAX_ORDER {
        if hypothesis.len() < n {
            break;
        }
        let mut pool: Vec<&[&str]> = if reference.len() >= n {
            reference.windows(n).collect()
        } else {
            vec![]
        };
        let mut matched = 0;
        let total = hypothesis.len() - n + 1;
        for w in hypothesis.windows(n) {
            if let Some(pos) = pool.iter().position(|r| *r == w) {
                pool.swap_remove(pos);
                matched += 1;
            }
        }
        if matched == 0 {
            return 0.0;
        }
        log_sum += (matched as f64 / total as f64).ln();
        orders += 1;
    }
    if orders == 0 {
        return 0.0;
    }
    let (h, r) = (hypothesis.len() as f64, reference.len() as f64);
    let bp = if h < r { (1.0 - r / h).exp() } else { 1.0 };
    100.0 * bp * (log_sum / orders as f64).exp()
}

fn bleu_oracle() -> Result<String> {
    let fixtures = [
        ("the cat sat", "the cat"),
        ("the cat sat on the mat", "the cat sat on a mat"),
        ("a a a b", "a a b b"),
        (
            "brother / kidney disease / in-progress?",
            "brother / diabetes / in-progress?",
        ),
        ("x y z w v", "x y z w v u"),
        ("one two three four", "four three two one"),
        ("pain continue", "pain"),
    ];
    for (r, h) in fixtures {
        let (r, h) = (split_tokens(r), split_tokens(h));
        let got = corpus_bleu(
            std::slice::from_ref(&r),
            std::slice::from_ref(&h),
            MAX_ORDER,
            Smoothing::None,
        )?;
        let want = brute_force_bleu(&r, &h);
        ensure!(
            (got.score - want).abs() < 1e-9,
            "{r:?} / {h:?}: {} vs {want}",
            got.score
        );
        ensure!((got.reconstruct() - got.score).abs() < 1e-9, "report identity");
        let identity = corpus_bleu(
            std::slice::from_ref(&r),
            std::slice::from_ref(&r),
            MAX_ORDER,
            Smoothing::None,
        )?
        .score;
        ensure!((identity - 100.0).abs() < 1e-9, "BLEU(x,x) = {identity}");
    }
    Ok(format!("{} fixtures agree to 1e-9", fixtures.len()))
}

fn unk_inflation() -> Result<String> {
    let s = split_tokens("<unk> <unk> test");
    let r = unk_diagnostic(std::slice::from_ref(&s), std::slice::from_ref(&s), UNK, MAX_ORDER)?;
    ensure!((r.bleu_raw.score - 100.0).abs() < 1e-9, "raw {}", r.bleu_raw.score);
    ensure!(
        r.unk_match_fraction > 0.5,
        "unk-match fraction {}",
        r.unk_match_fraction
    );
    ensure!(
        (r.unk_matches, r.total_matches) == (5, 6),
        "{} / {}",
        r.unk_matches,
        r.total_matches
    );
    let masked = r.bleu_unk_masked.context("masked score missing")?;
    ensure!(
        masked.totals.iter().sum::<usize>() == 1,
        "masked totals {:?}",
        masked.totals
    );

    // Two different source words both became unk and "match".
    let refs = vec![split_tokens("<unk> / pain / <unk>"), split_tokens("head / <unk>")];
    let hyps = vec![split_tokens("<unk> / pain / <unk>"), split_tokens("head / <unk>")];
    let r2 = unk_diagnostic(&refs, &hyps, UNK, MAX_ORDER)?;
    let m2 = r2.bleu_unk_masked.context("masked score missing")?;
    let raw_ngrams: usize = r2.bleu_raw.totals.iter().sum();
    let masked_ngrams: usize = m2.totals.iter().sum();
    ensure!(
        masked_ngrams < raw_ngrams / 2,
        "masked scored {masked_ngrams} of {raw_ngrams} n-grams"
    );
    Ok(format!(
        "raw 100, unk-match {:.3}, masked over {} of {} n-grams",
        r.unk_match_fraction,
        masked.totals.iter().sum::<usize>(),
        r.bleu_raw.totals.iter().sum::<usize>()
    ))
}

fn da_generalization() -> Result<String> {
    let start = Instant::now();
    let dir = common::sample_dir();
    let dictionary = DaDictionary::load(dir.join("dictionary.tsv"))?;
    let rules = dataset::parse_rules(&std::fs::read_to_string(dir.join("deny.txt"))?)?;
    let templates = dataset::filter_by(&load_templates(dir.join("templates.jsonl"))?, &rules, |t| &t.source).kept;
    let (pairs, _) = expand_corpus(&templates, &dictionary)?;
    let corpus: Vec<CorpusRecord> = pairs.iter().map(CorpusRecord::from).collect();
    let split = dataset::split(&corpus, &SplitSpec::with_seed(11))?;

    let train: Vec<_> = split.train.iter().map(CorpusRecord::to_pair).collect();
    let da = build_memory(&train, &dictionary);
    let non_da_pairs = first_entry_corpus(&templates, &dictionary)?;
    let non_da = build_memory(&non_da_pairs, &dictionary);
    let seen: HashSet<(String, usize)> = non_da_pairs.iter().flat_map(|p| p.bindings.clone()).collect();

    let held_out: Vec<&CorpusRecord> = split.test.iter().filter(|r| !r.bindings.is_empty()).collect();
    let exact = held_out
        .iter()
        .filter(|r| da.translate(&r.source).map(|s| s.to_string()).as_deref() == Ok(r.target.as_str()))
        .count();
    let unseen: Vec<&&CorpusRecord> = held_out
        .iter()
        .filter(|r| r.bindings.iter().any(|b| !seen.contains(b)))
        .collect();
    let no_match = unseen
        .iter()
        .filter(|r| matches!(non_da.translate(&r.source), Err(BaselineError::NoMatch { .. })))
        .count();
    within(start, Duration::from_secs(30))?;
    let rate = exact as f64 / held_out.len() as f64;
    ensure!(
        !held_out.is_empty() && rate >= 0.95,
        "DA exact {exact}/{}",
        held_out.len()
    );
    ensure!(
        !unseen.is_empty() && no_match == unseen.len(),
        "non-DA NoMatch {no_match}/{}",
        unseen.len()
    );
    Ok(format!(
        "DA exact {exact}/{}, non-DA NoMatch {no_match}/{}",
        held_out.len(),
        unseen.len()
    ))
}

fn tokenizer_contracts() -> Result<String> {
    let alphabet: Vec<char> = "abcdefghijklmnopqrstuvwxyz?-/()가나다".chars().collect();
    let mut corpus: Vec<String> = vec![
        alphabet.iter().collect::<String>(),
        "brother kidney disease pain".into(),
    ];
    corpus.push(format!("{ICON_MARKER} / want?{NMS_MARKER}"));
    let protected = [ICON_MARKER, NMS_MARKER];
    let model = train_bpe(&corpus, 300, &protected)?;
    let again = train_bpe(&corpus, 300, &protected)?;
    ensure!(model.to_model_string() == again.to_model_string(), "model files differ");

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..10_000 {
        let words = rng.random_range(1..=6);
        let mut parts = Vec::new();
        for _ in 0..words {
            let len = rng.random_range(1..=8);
            let mut w: String = (0..len)
                .map(|_| alphabet[rng.random_range(0..alphabet.len())])
                .collect();
            match rng.random_range(0..6) {
                0 => w.push_str(NMS_MARKER),
                1 => w = ICON_MARKER.to_string(),
                _ => {}
            }
            parts.push(w);
        }
        let text = parts.join(" ");
        let pieces = model.encode_pieces(&text);
        ensure!(!pieces.iter().any(|p| p == UNK), "case {i}: unk in {text:?}");
        let decoded = model.decode(&model.encode(&text))?;
        ensure!(decoded == text, "case {i}: {text:?} -> {decoded:?}");
        for marker in protected {
            let want = text.matches(marker).count();
            let whole = pieces.iter().filter(|p| p.as_str() == marker).count();
            ensure!(whole == want, "case {i}: {marker} split in {pieces:?}");
        }
    }
    Ok("10000 strings round-trip, models identical, markers atomic".into())
}

fn tree(root: &Path) -> Result<BTreeMap<String, Vec<u8>>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root)?.display().to_string();
                files.insert(rel, std::fs::read(&path)?);
            }
        }
    }
    Ok(files)
}

fn determinism() -> Result<String> {
    let tmp = tempfile::tempdir()?;
    let mut trees = Vec::new();
    for run in ["a", "b"] {
        let mut config = PipelineConfig::load(common::sample_dir().join("pipeline.toml"))?;
        config.paths.output = tmp.path().join(run);
        run_pipeline(&config, &RunOptions::default())?;
        trees.push(tree(&config.paths.output)?);
    }
    ensure!(trees[0].len() > 5, "only {} files", trees[0].len());
    let differing: Vec<&String> = trees[0]
        .iter()
        .filter(|(k, v)| trees[1].get(*k) != Some(v))
        .map(|(k, _)| k)
        .collect();
    ensure!(
        trees[0].len() == trees[1].len() && differing.is_empty(),
        "differ: {differing:?}"
    );
    Ok(format!("{} files byte-identical", trees[0].len()))
}

type Criterion = (&'static str, fn() -> Result<String>);

fn main() {
    let criteria: [Criterion; 9] = [
        ("split arithmetic", split_arithmetic),
        ("augmentation counting", augmentation_counting),
        ("annotation round-trip", annotation_round_trip),
        ("layer pipeline example", table_pipeline),
        ("BLEU oracle", bleu_oracle),
        ("unk inflation", unk_inflation),
        ("DA generalization", da_generalization),
        ("tokenizer contracts", tokenizer_contracts),
        ("end-to-end determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let ms = start.elapsed().as_millis();
        match &result {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}) [{ms} ms]", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {e:#} [{ms} ms]", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
