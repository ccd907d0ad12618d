//! Seeded toy corpora for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Sentence, Token};
use crate::gazetteer::Gazetteer;

/// Words that are always part of a person name in [`names_corpus`].
pub const NAME_WORDS: [&str; 6] = ["Amit", "Rina", "Sourav", "Priya", "Kunal", "Maya"];

/// The remaining 14 words of the 20-word vocabulary, with their POS tags.
pub const OTHER_WORDS: [(&str, &str); 14] = [
    ("the", "DT"),
    ("a", "DT"),
    ("city", "NN"),
    ("river", "NN"),
    ("book", "NN"),
    ("market", "NN"),
    ("went", "VB"),
    ("saw", "VB"),
    ("reads", "VBZ"),
    ("in", "IN"),
    ("to", "IN"),
    ("with", "IN"),
    ("old", "JJ"),
    (".", "SYM"),
];

fn token(surface: &str, pos: &str, chunk: &str, ne: &str) -> Token {
    Token::new(surface, pos, chunk, Some(ne.to_string())).expect("generator emits valid tokens")
}

/// Sentences of 3 to 10 tokens where every name word is labeled `B-PER`/`I-PER`
/// (names come in runs of one or two) and every other word `O`.
pub fn names_corpus(sentences: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = (0..sentences)
        .map(|_| {
            let len = rng.gen_range(3..=10);
            let mut tokens = Vec::with_capacity(len + 1);
            while tokens.len() < len {
                let after_name = tokens
                    .last()
                    .is_some_and(|t: &Token| t.ne.as_deref() != Some("O"));
                if !after_name && rng.gen_bool(0.3) {
                    let run = rng.gen_range(1..=2);
                    for k in 0..run {
                        let name = NAME_WORDS.choose(&mut rng).unwrap();
                        let (chunk, ne) = if k == 0 { ("B-NP", "B-PER") } else { ("I-NP", "I-PER") };
                        tokens.push(token(name, "NNP", chunk, ne));
                    }
                } else {
                    let (w, pos) = OTHER_WORDS.choose(&mut rng).unwrap();
                    tokens.push(token(w, pos, "O", "O"));
                }
            }
            Sentence::new(tokens).unwrap()
        })
        .collect();
    Corpus::new(out)
}

const GAZ_LEFT: [&str; 5] = ["ka", "ke", "ki", "ko", "ku"];
const GAZ_RIGHT: [&str; 5] = ["ma", "me", "mi", "mo", "mu"];
const GAZ_FILLER: [&str; 5] = ["xa", "xe", "xi", "xo", "xu"];

/// The person list matching [`gazetteer_corpus`]: pairs `left[i] right[j]` with `i + j` even.
pub fn pair_gazetteer() -> Gazetteer {
    let mut lines = Vec::new();
    for (i, l) in GAZ_LEFT.iter().enumerate() {
        for (j, r) in GAZ_RIGHT.iter().enumerate() {
            if (i + j) % 2 == 0 {
                lines.push(format!("{l} {r}"));
            }
        }
    }
    Gazetteer::from_lines("person", lines, false).unwrap()
}

/// Sentences of filler words and two-word pairs. Every word occurs both inside and
/// outside names: a pair is a `B-PER I-PER` name exactly when it is listed in
/// [`pair_gazetteer`], which no additive function of the two words can decide.
pub fn gazetteer_corpus(sentences: usize, seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = (0..sentences)
        .map(|_| {
            let pairs = rng.gen_range(1..=3);
            let mut tokens = Vec::new();
            for _ in 0..pairs {
                for _ in 0..rng.gen_range(1..=2) {
                    let f = GAZ_FILLER.choose(&mut rng).unwrap();
                    tokens.push(token(f, "NN", "B-NP", "O"));
                }
                let i = rng.gen_range(0..GAZ_LEFT.len());
                let j = rng.gen_range(0..GAZ_RIGHT.len());
                let (b, inside) = if (i + j) % 2 == 0 { ("B-PER", "I-PER") } else { ("O", "O") };
                tokens.push(token(GAZ_LEFT[i], "NN", "B-NP", b));
                tokens.push(token(GAZ_RIGHT[j], "NN", "I-NP", inside));
            }
            let f = GAZ_FILLER.choose(&mut rng).unwrap();
            tokens.push(token(f, "NN", "B-NP", "O"));
            Sentence::new(tokens).unwrap()
        })
        .collect();
    Corpus::new(out)
}
