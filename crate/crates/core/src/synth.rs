//! Deterministic synthetic corpora for tests, benchmarks and experiments.
//!
//! Each built-in language couples a head of real function words with a
//! generated pseudo-word tail, sampled under a Zipf-like rank
//! distribution. Train and test material drawn with different seeds then
//! behaves like held-out text: same underlying frequencies, independent
//! sampling noise. Everything is seeded, so corpora are reproducible
//! byte for byte.

use rand::distr::{Distribution, Uniform};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const HEAD_EN: &[&str] = &[
    "the", "of", "and", "to", "in", "is", "was", "that", "for", "it", "with", "as", "his", "on",
    "be", "at", "by", "had", "not", "are", "but", "from", "or", "have", "an", "they", "which",
    "one", "you", "were", "her", "all", "she", "there", "would", "their", "we", "him", "been",
    "has",
];
const HEAD_DE: &[&str] = &[
    "der", "die", "und", "in", "den", "von", "zu", "das", "mit", "sich", "des", "auf", "für",
    "ist", "im", "dem", "nicht", "ein", "eine", "als", "auch", "es", "an", "werden", "aus", "er",
    "hat", "daß", "sie", "nach", "wird", "bei", "einer", "um", "am", "sind", "noch", "wie",
    "einem", "über",
];
const HEAD_FR: &[&str] = &[
    "de", "la", "le", "et", "les", "des", "en", "un", "du", "une", "que", "est", "pour", "qui",
    "dans", "par", "plus", "pas", "au", "sur", "ne", "se", "ce", "il", "sont", "aux", "avec",
    "son", "ses", "mais", "comme", "ou", "si", "nous", "vous", "leur", "dont", "cette", "fait",
    "elle",
];
const HEAD_ES: &[&str] = &[
    "de", "la", "que", "el", "en", "y", "a", "los", "del", "se", "las", "por", "un", "para",
    "con", "no", "una", "su", "al", "lo", "como", "más", "pero", "sus", "le", "ya", "o", "este",
    "porque", "esta", "entre", "cuando", "muy", "sin", "sobre", "también", "me", "hasta", "donde",
    "quien",
];
const HEAD_IT: &[&str] = &[
    "di", "e", "il", "la", "che", "in", "un", "per", "è", "non", "sono", "una", "con", "si",
    "del", "le", "i", "al", "lo", "gli", "nel", "come", "più", "ma", "se", "questo", "anche",
    "dei", "delle", "della", "alla", "da", "su", "ha", "sua", "era", "nella", "loro", "tra",
    "essere",
];
const HEAD_PT: &[&str] = &[
    "de", "a", "o", "que", "e", "do", "da", "em", "um", "para", "é", "com", "não", "uma", "os",
    "no", "se", "na", "por", "mais", "as", "dos", "como", "mas", "foi", "ao", "ele", "das",
    "tem", "à", "seu", "sua", "ou", "ser", "quando", "muito", "há", "nos", "já", "está",
];
const HEAD_FI: &[&str] = &[
    "on", "ja", "ei", "että", "se", "oli", "hän", "joka", "mutta", "niin", "kuin", "myös", "tai",
    "sen", "kun", "ovat", "ole", "jos", "sitä", "vain", "olla", "voi", "sekä", "mukaan", "hänen",
    "jo", "tämä", "sitten", "kaikki", "tässä", "ennen", "koska", "heidän", "mitä", "siitä",
    "nyt", "vielä", "jotka", "olen", "mikä",
];
const HEAD_NO: &[&str] = &[
    "og", "i", "det", "av", "som", "en", "til", "på", "er", "med", "for", "de", "at", "har",
    "om", "et", "men", "du", "den", "ikke", "seg", "så", "kan", "jeg", "vi", "han", "der",
    "hun", "skal", "vil", "fra", "eller", "var", "etter", "ble", "noen", "bare", "når", "hva",
    "mot",
];
const HEAD_PL: &[&str] = &[
    "w", "i", "z", "na", "do", "że", "się", "nie", "jest", "to", "jak", "przez", "dla", "oraz",
    "czy", "tylko", "tego", "przy", "już", "być", "może", "bardzo", "po", "co", "od", "ale",
    "są", "za", "także", "który", "była", "jego", "którzy", "ich", "pod", "będzie", "przed",
    "nad", "bez", "jednak",
];

/// Tags of the built-in synthetic languages.
pub const BUILTIN_TAGS: &[&str] = &["de", "en", "es", "fi", "fr", "it", "no", "pl", "pt"];

fn head_words(tag: &str) -> Option<&'static [&'static str]> {
    match tag {
        "en" => Some(HEAD_EN),
        "de" => Some(HEAD_DE),
        "fr" => Some(HEAD_FR),
        "es" => Some(HEAD_ES),
        "it" => Some(HEAD_IT),
        "pt" => Some(HEAD_PT),
        "fi" => Some(HEAD_FI),
        "no" => Some(HEAD_NO),
        "pl" => Some(HEAD_PL),
        _ => None,
    }
}

/// Per-language syllable inventories for the pseudo-word tails. The sets
/// differ enough that tails of different languages rarely collide.
fn syllable_parts(tag: &str) -> (&'static [&'static str], &'static [&'static str]) {
    match tag {
        "en" => (
            &["st", "br", "th", "wh", "gr", "pl", "cl", "str", "b", "d", "f", "h", "m", "r", "w"],
            &["a", "e", "i", "o", "u", "ee", "oo", "ai", "ou"],
        ),
        "de" => (
            &["sch", "st", "kr", "pf", "br", "gr", "tr", "b", "d", "g", "h", "k", "m", "w", "z"],
            &["a", "e", "i", "o", "u", "ä", "ö", "ü", "ei", "au"],
        ),
        "fr" => (
            &["ch", "br", "cr", "pr", "tr", "gn", "b", "c", "d", "g", "j", "l", "m", "n", "v"],
            &["a", "e", "i", "o", "u", "é", "è", "ai", "ou", "eau"],
        ),
        "es" => (
            &["br", "tr", "pr", "gu", "qu", "ll", "b", "c", "d", "g", "j", "m", "n", "r", "v"],
            &["a", "e", "i", "o", "u", "ía", "ue", "ió"],
        ),
        "it" => (
            &["br", "tr", "pr", "gl", "gn", "sc", "b", "c", "d", "f", "g", "m", "p", "r", "v"],
            &["a", "e", "i", "o", "u", "ia", "io", "ie"],
        ),
        "pt" => (
            &["br", "tr", "pr", "lh", "nh", "b", "c", "d", "f", "g", "m", "p", "r", "s", "v"],
            &["a", "e", "i", "o", "u", "ã", "õ", "ão", "ei"],
        ),
        "fi" => (
            &["k", "t", "p", "s", "h", "l", "m", "n", "r", "v", "j"],
            &["a", "e", "i", "o", "u", "y", "ä", "ö", "aa", "ii", "uo"],
        ),
        "no" => (
            &["kj", "skj", "fj", "kr", "gr", "b", "d", "f", "g", "h", "k", "l", "m", "s", "v"],
            &["a", "e", "i", "o", "u", "y", "æ", "ø", "å", "ei"],
        ),
        "pl" => (
            &["prz", "trz", "szcz", "cz", "sz", "rz", "dz", "b", "g", "k", "m", "p", "w", "z"],
            &["a", "e", "i", "o", "u", "y", "ą", "ę", "ó"],
        ),
        _ => (
            &["b", "d", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v"],
            &["a", "e", "i", "o", "u"],
        ),
    }
}

fn seed_for(tag: &str, salt: u64) -> u64 {
    // FNV-1a over the tag, mixed with the salt; stable across platforms.
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in tag.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash ^ salt.wrapping_mul(0x9e3779b97f4a7c15)
}

/// A synthetic language: a ranked vocabulary plus sampling weights.
#[derive(Debug, Clone)]
pub struct SynthLanguage {
    tag: String,
    words: Vec<String>,
    cumulative: Vec<f64>,
}

impl SynthLanguage {
    /// Builds a language from an explicit ranked vocabulary. Probability
    /// of rank r is proportional to `r^-zipf_exponent`.
    pub fn from_vocabulary(tag: &str, words: Vec<String>, zipf_exponent: f64) -> SynthLanguage {
        assert!(!words.is_empty(), "vocabulary must not be empty");
        let mut cumulative = Vec::with_capacity(words.len());
        let mut sum = 0.0;
        for rank in 1..=words.len() {
            sum += (rank as f64).powf(-zipf_exponent);
            cumulative.push(sum);
        }
        for c in &mut cumulative {
            *c /= sum;
        }
        SynthLanguage {
            tag: tag.to_string(),
            words,
            cumulative,
        }
    }

    /// One of the built-in languages: a real function-word head plus a
    /// generated pseudo-word tail of `tail_size` entries.
    pub fn builtin(tag: &str) -> Option<SynthLanguage> {
        let head = head_words(tag)?;
        let mut words: Vec<String> = head.iter().map(|w| w.to_string()).collect();
        words.extend(pseudo_words(tag, 2500, seed_for(tag, 7)));
        Some(SynthLanguage::from_vocabulary(tag, words, 1.0))
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// Vocabulary in rank order.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    fn sample_word<'a>(&'a self, rng: &mut ChaCha8Rng) -> &'a str {
        let u: f64 = rng.random();
        let idx = self
            .cumulative
            .partition_point(|&c| c < u)
            .min(self.words.len() - 1);
        &self.words[idx]
    }

    /// Generates at least `min_bytes` of sentence-shaped text:
    /// capitalized sentence heads, commas, full stops, occasional digits
    /// and line breaks. Deterministic in (`self`, `seed`).
    pub fn generate(&self, seed: u64, min_bytes: usize) -> String {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ seed_for(&self.tag, 0));
        let mut out = String::with_capacity(min_bytes + 128);
        let sentence_len = Uniform::new_inclusive(6, 14).unwrap();
        let mut sentences = 0usize;
        while out.len() < min_bytes {
            let words_in_sentence = sentence_len.sample(&mut rng);
            for position in 0..words_in_sentence {
                let word = self.sample_word(&mut rng);
                if position == 0 {
                    let mut chars = word.chars();
                    if let Some(first) = chars.next() {
                        out.extend(first.to_uppercase());
                        out.push_str(chars.as_str());
                    }
                } else {
                    out.push(' ');
                    if rng.random_ratio(1, 40) {
                        // stray number; a separator, not a token
                        out.push_str(&format!("{} ", rng.random_range(2..2000)));
                    }
                    out.push_str(word);
                    if position + 1 < words_in_sentence && rng.random_ratio(1, 9) {
                        out.push(',');
                    }
                }
            }
            out.push('.');
            sentences += 1;
            if sentences % 8 == 0 {
                out.push('\n');
            } else {
                out.push(' ');
            }
        }
        out.push('\n');
        out
    }
}

/// Deterministic pseudo-words from the language's syllable inventory,
/// distinct from every built-in head word and from each other.
fn pseudo_words(tag: &str, count: usize, seed: u64) -> Vec<String> {
    let (onsets, nuclei) = syllable_parts(tag);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::BTreeSet::new();
    for builtin in BUILTIN_TAGS {
        if let Some(head) = head_words(builtin) {
            seen.extend(head.iter().map(|w| w.to_string()));
        }
    }
    let mut words = Vec::with_capacity(count);
    while words.len() < count {
        let syllables = rng.random_range(2..=4);
        let mut word = String::new();
        for _ in 0..syllables {
            word.push_str(onsets[rng.random_range(0..onsets.len())]);
            word.push_str(nuclei[rng.random_range(0..nuclei.len())]);
        }
        if seen.insert(word.clone()) {
            words.push(word);
        }
    }
    words
}

/// Non-Latin noise text (pseudo-words over Cyrillic letters). Its tokens
/// are alphabetic but share nothing with any Latin-alphabet profile.
pub fn cyrillic_noise(seed: u64, min_bytes: usize) -> String {
    let syllables = [
        "ба", "во", "га", "де", "жи", "зо", "ка", "ле", "ми", "но", "пу", "ра", "се", "ти", "ху",
        "че", "шa", "ыр", "эн", "ют", "ям",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::with_capacity(min_bytes + 64);
    while out.len() < min_bytes {
        let syllable_count = rng.random_range(2..=4);
        let mut word = String::new();
        for _ in 0..syllable_count {
            word.push_str(syllables[rng.random_range(0..syllables.len())]);
        }
        out.push_str(&word);
        if rng.random_ratio(1, 12) {
            out.push_str(".\n");
        } else {
            out.push(' ');
        }
    }
    out
}

/// Interleaves `phrases` into `base` every `every_words` words, modelling
/// foreign text that quotes target-language material.
pub fn with_embedded_phrases(base: &str, phrases: &[&str], every_words: usize) -> String {
    assert!(every_words > 0);
    let mut out = String::with_capacity(base.len() * 2);
    let mut phrase_cursor = 0usize;
    for (i, word) in base.split_whitespace().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(word);
        if (i + 1) % every_words == 0 && !phrases.is_empty() {
            out.push(' ');
            out.push_str(phrases[phrase_cursor % phrases.len()]);
            phrase_cursor += 1;
        }
    }
    out
}
