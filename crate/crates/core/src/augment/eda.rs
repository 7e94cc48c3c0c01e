//! Random swap, deletion and insertion over parallel pairs.
//!
//! The spoken side works on whitespace tokens, the annotated side on whole
//! annotation elements, so an icon or a tagged gloss is never split. Every
//! operation is a pure function of its inputs and seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AugmentError, DaDictionary, ParallelPair};
use crate::annotation::{AnnotatedSentence, AnnotationElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Source,
    Target,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AugmentWarning {
    /// Fewer than two units; the side was left unchanged.
    DegenerateInput { side: Side, units: usize },
    /// No dictionary term occurs in the source; nothing inserted.
    NoDictionaryTerm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpOutcome {
    pub pair: ParallelPair,
    pub warnings: Vec<AugmentWarning>,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn source_tokens(pair: &ParallelPair) -> Vec<String> {
    pair.source.split_whitespace().map(str::to_string).collect()
}

fn rebuild(pair: &ParallelPair, tokens: Vec<String>, elements: Vec<AnnotationElement>) -> ParallelPair {
    ParallelPair {
        id: pair.id.clone(),
        template_id: pair.template_id.clone(),
        source: tokens.join(" "),
        target: AnnotatedSentence::new(elements).expect("elements come from a valid sentence"),
        bindings: pair.bindings.clone(),
    }
}

fn swap_n<T>(units: &mut [T], n: usize, rng: &mut ChaCha8Rng) {
    for _ in 0..n {
        let i = rng.random_range(0..units.len());
        let mut j = rng.random_range(0..units.len() - 1);
        if j >= i {
            j += 1;
        }
        units.swap(i, j);
    }
}

/// Performs `n` swaps of two distinct units on each side.
pub fn random_swap(pair: &ParallelPair, n: usize, seed: u64) -> OpOutcome {
    let mut rng = rng(seed);
    let mut warnings = Vec::new();
    let mut elements = pair.target.elements().to_vec();
    let mut tokens = source_tokens(pair);
    if n > 0 {
        if elements.len() < 2 {
            warnings.push(AugmentWarning::DegenerateInput {
                side: Side::Target,
                units: elements.len(),
            });
        } else {
            swap_n(&mut elements, n, &mut rng);
        }
        if tokens.len() < 2 {
            warnings.push(AugmentWarning::DegenerateInput {
                side: Side::Source,
                units: tokens.len(),
            });
        } else {
            swap_n(&mut tokens, n, &mut rng);
        }
    }
    OpOutcome {
        pair: rebuild(pair, tokens, elements),
        warnings,
    }
}

fn delete_with<T: Clone>(units: &[T], p: f64, rng: &mut ChaCha8Rng) -> Vec<T> {
    let kept: Vec<T> = units.iter().filter(|_| !rng.random_bool(p)).cloned().collect();
    if kept.is_empty() && !units.is_empty() {
        vec![units[rng.random_range(0..units.len())].clone()]
    } else {
        kept
    }
}

/// Deletes each unit independently with probability `p`. A side never
/// becomes empty: if every unit would go, one uniformly chosen unit stays.
pub fn random_deletion(pair: &ParallelPair, p: f64, seed: u64) -> Result<OpOutcome, AugmentError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(AugmentError::InvalidProbability(p));
    }
    let mut rng = rng(seed);
    let elements = delete_with(pair.target.elements(), p, &mut rng);
    let tokens = delete_with(&source_tokens(pair), p, &mut rng);
    Ok(OpOutcome {
        pair: rebuild(pair, tokens, elements),
        warnings: Vec::new(),
    })
}

/// `n` times: picks a dictionary term already present in the source, adds
/// its spoken form at a random source position and its sign form at a
/// random target position.
pub fn random_insertion(pair: &ParallelPair, dictionary: &DaDictionary, n: usize, seed: u64) -> OpOutcome {
    let mut rng = rng(seed);
    let mut tokens = source_tokens(pair);
    let mut elements = pair.target.elements().to_vec();
    for _ in 0..n {
        let current = tokens.join(" ");
        let matches = dictionary.find_terms(&current);
        if matches.is_empty() {
            return OpOutcome {
                pair: pair.clone(),
                warnings: vec![AugmentWarning::NoDictionaryTerm],
            };
        }
        let m = matches[rng.random_range(0..matches.len())];
        let entry = dictionary.entry(m.category, m.entry);

        let at = rng.random_range(0..=tokens.len());
        let spoken: Vec<String> = entry.spoken.split_whitespace().map(str::to_string).collect();
        tokens.splice(at..at, spoken);

        let at = rng.random_range(0..=elements.len());
        elements.splice(at..at, entry.sign_sentence().into_elements());
    }
    OpOutcome {
        pair: rebuild(pair, tokens, elements),
        warnings: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(source: &str, target: &str) -> ParallelPair {
        ParallelPair {
            id: "p".into(),
            template_id: "t".into(),
            source: source.into(),
            target: target.parse().unwrap(),
            bindings: vec![],
        }
    }

    #[test]
    fn swap_two_elements() {
        let p = pair("are you nauseous", "(vomiting action) / want?[BE]");
        let out = random_swap(&p, 1, 7);
        assert_eq!(out.pair.target.to_string(), "want?[BE] / (vomiting action)");
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn swap_zero_is_identity() {
        let p = pair("a b c", "x / y / z");
        assert_eq!(random_swap(&p, 0, 1).pair, p);
    }

    #[test]
    fn swap_degenerate_side() {
        let p = pair("hello there", "hello");
        let out = random_swap(&p, 3, 1);
        assert_eq!(out.pair.target, p.target);
        assert_eq!(
            out.warnings,
            vec![AugmentWarning::DegenerateInput {
                side: Side::Target,
                units: 1
            }]
        );
    }

    #[test]
    fn swap_is_deterministic_and_permutes() {
        let p = pair("one two three four five", "a / (b c) / d[BE] / e");
        let a = random_swap(&p, 5, 42);
        let b = random_swap(&p, 5, 42);
        assert_eq!(a, b);
        let mut before: Vec<String> = p.target.elements().iter().map(|e| e.to_string()).collect();
        let mut after: Vec<String> = a.pair.target.elements().iter().map(|e| e.to_string()).collect();
        before.sort();
        after.sort();
        assert_eq!(before, after);
    }

    #[test]
    fn deletion_extremes() {
        let p = pair("a b c d", "w / x / y / z");
        assert_eq!(random_deletion(&p, 0.0, 3).unwrap().pair, p);
        let all = random_deletion(&p, 1.0, 3).unwrap().pair;
        assert_eq!(all.target.len(), 1);
        assert_eq!(all.source.split_whitespace().count(), 1);
        assert!(random_deletion(&p, 1.5, 3).is_err());
    }

    #[test]
    fn deletion_survivors_follow_binomial_mean() {
        // Monte-Carlo oracle: survivors ~ Binomial(len, 1 - p) except for the
        // all-deleted safeguard, whose effect at these parameters is tiny
        // (P(all deleted) = 0.3^10).
        let p_del = 0.3;
        let len = 10usize;
        let target = (0..len).map(|i| format!("g{i}")).collect::<Vec<_>>().join(" / ");
        let p = pair("s", &target);
        let trials = 10_000u64;
        let total: usize = (0..trials)
            .map(|seed| random_deletion(&p, p_del, seed).unwrap().pair.target.len())
            .sum();
        let mean = total as f64 / trials as f64;
        let expected = (1.0 - p_del) * len as f64;
        let sd_of_mean = (len as f64 * p_del * (1.0 - p_del) / trials as f64).sqrt();
        assert!((mean - expected).abs() < 3.0 * sd_of_mean, "mean {mean} vs {expected}");
    }

    #[test]
    fn insertion() {
        let dict = DaDictionary::from_tsv("Disease name\tanemia\tanemia\nDisease name\tflu\tflu\n").unwrap();
        let p = pair("I have anemia .", "anemia / exist");
        assert_eq!(random_insertion(&p, &dict, 0, 1).pair, p);
        let out = random_insertion(&p, &dict, 1, 1);
        assert_eq!(out.pair.source.split_whitespace().count(), 5);
        assert_eq!(out.pair.target.len(), 3);
        assert_eq!(out, random_insertion(&p, &dict, 1, 1));

        let none = pair("I have a cough", "cough / exist");
        let out = random_insertion(&none, &dict, 2, 1);
        assert_eq!(out.pair, none);
        assert_eq!(out.warnings, vec![AugmentWarning::NoDictionaryTerm]);
    }
}
