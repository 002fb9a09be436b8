//! Seeded generator for the bundled fixture language.
//!
//! The language is a small romanized Persian fragment (consonant-skeleton
//! spellings, so several written forms are homographs) plus a tiny English
//! island around "read". Sentences follow
//!
//! ```text
//! S  := NP [NP rA] V
//! NP := N ADJ{0,2} POSS?
//! ```
//!
//! and every NP element followed by an adjective or possessive carries
//! Ezafe. Homograph occurrences draw their neighbours mostly from
//! per-variant cue lists.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ezafe::{EzafeCorpus, GlideRule, TaggedToken};
use crate::homograph::{AnnotatedCorpus, CorpusToken};
use crate::metrics::EvalCase;
use crate::phoneme::{parse_seq, PhonemeInventory};

type Entry = (&'static str, &'static str);

pub const NOUNS: &[Entry] = &[
    ("ktAb", "k e t A b"),
    ("mrd", "m a r d"),
    ("dxtr", "d o x t a r"),
    ("SAgrd", "S A g e r d"),
    ("dst", "d a s t"),
    ("dr", "d a r"),
    ("Shr", "S a h r"),
    ("bAq", "b A q"),
    ("drxt", "d e r a x t"),
    ("qlm", "q a l a m"),
    ("mAdr", "m A d a r"),
    ("pdr", "p e d a r"),
    ("dwst", "d u s t"),
    ("kwh", "k u h"),
    ("xAk", "x A k"),
    ("xdA", "x o d A"),
    ("kAx", "k A x"),
    ("zmyn", "z a m i n"),
    ("pwl", "p u l"),
    ("SAh", "S A h"),
    ("cAy", "c A y"),
    ("qnd", "q a n d"),
];

pub const ADJECTIVES: &[Entry] = &[
    ("bzrg", "b o z o r g"),
    ("kwck", "k u c e k"),
    ("xwb", "x u b"),
    ("bd", "b a d"),
    ("sbz", "s a b z"),
    ("sfyd", "s e f i d"),
    ("syAh", "s i y A h"),
    ("jdyd", "j a d i d"),
    ("qdym", "q a d i m"),
    ("zybA", "z i b A"),
    ("grAn", "g e r A n"),
    ("Syryn", "S i r i n"),
];

pub const POSSESSIVES: &[Entry] = &[
    ("mn", "m a n"),
    ("tw", "t o"),
    ("mA", "m A"),
    ("SmA", "S o m A"),
    ("AnhA", "A n h A"),
];

pub const VERBS: &[Entry] = &[
    ("dyd", "d i d"),
    ("xryd", "x a r i d"),
    ("brd", "b o r d"),
    ("dAd", "d A d"),
    ("Avrd", "A v a r d"),
    ("sAxt", "s A x t"),
    ("xwrd", "x o r d"),
    ("dAst", "d A S t"),
    ("frwxt", "f o r u x t"),
    ("gryft", "g e r e f t"),
    ("krd", "k a r d"),
];

/// Nouns kept out of the lexicon. Their spellings omit short vowels, so
/// the letter-to-sound fallback mispronounces them.
pub const RARE_NOUNS: &[Entry] = &[
    ("dAnSgAh", "d A n e S g A h"),
    ("bymArstAn", "b i m A r e s t A n"),
    ("frwdgAh", "f o r u d g A h"),
    ("AsmAn", "A s e m A n"),
    ("dftr", "d a f t a r"),
    ("xyAbAn", "x i y A b A n"),
];

pub const OBJECT_MARKER: Entry = ("rA", "r A");

pub const ENGLISH: &[Entry] = &[
    ("I", "a y"),
    ("you", "y u"),
    ("we", "w i"),
    ("they", "d e y"),
    ("will", "w ih l"),
    ("can", "k ae n"),
    ("must", "m a s t"),
    ("had", "h ae d"),
    ("has", "h ae z"),
    ("was", "w a z"),
    ("the", "d a"),
    ("book", "b uh k"),
    ("paper", "p e y p e r"),
    ("letter", "l e t e r"),
    ("news", "n u z"),
    ("it", "ih t"),
];

const EN_SUBJECTS: &[&str] = &["I", "you", "we", "they"];
const EN_OBJECTS: &[&str] = &["book", "paper", "letter", "news", "it"];

/// One pronunciation of a homograph with its generation parameters.
#[derive(Debug)]
pub struct VariantSpec {
    pub phonemes: &'static str,
    /// Prior count written to the lexicon.
    pub prior: u64,
    /// Relative frequency in generated text.
    pub weight: u32,
    pub nouns: &'static [&'static str],
    pub adjectives: &'static [&'static str],
    pub verbs: &'static [&'static str],
}

#[derive(Debug)]
pub struct HomographSpec {
    pub word: &'static str,
    /// Ordered by descending prior, so position equals variant id.
    pub variants: &'static [VariantSpec],
}

pub const HOMOGRAPHS: &[HomographSpec] = &[
    HomographSpec {
        word: "krm",
        variants: &[
            VariantSpec {
                phonemes: "k e r m",
                prior: 12,
                weight: 55,
                nouns: &["bAq", "drxt", "xAk"],
                adjectives: &["kwck", "syAh", "sbz"],
                verbs: &["dyd", "xwrd"],
            },
            VariantSpec {
                phonemes: "k a r a m",
                prior: 10,
                weight: 45,
                nouns: &["pdr", "dwst", "xdA"],
                adjectives: &["bzrg", "xwb"],
                verbs: &["dAd", "dAst"],
            },
        ],
    },
    HomographSpec {
        word: "mlk",
        variants: &[
            VariantSpec {
                phonemes: "m a l e k",
                prior: 20,
                weight: 50,
                nouns: &["Shr", "kAx"],
                adjectives: &["bzrg", "qdym"],
                verbs: &["Avrd", "sAxt"],
            },
            VariantSpec {
                phonemes: "m e l k",
                prior: 15,
                weight: 35,
                nouns: &["zmyn", "pwl"],
                adjectives: &["grAn", "jdyd"],
                verbs: &["xryd", "frwxt"],
            },
            VariantSpec {
                phonemes: "m o l k",
                prior: 5,
                weight: 15,
                nouns: &["SAh"],
                adjectives: &["zybA"],
                verbs: &["gryft"],
            },
        ],
    },
    HomographSpec {
        word: "Skr",
        variants: &[
            VariantSpec {
                phonemes: "S o k r",
                prior: 11,
                weight: 50,
                nouns: &["xdA", "dwst"],
                adjectives: &["xwb"],
                verbs: &["krd"],
            },
            VariantSpec {
                phonemes: "S e k a r",
                prior: 9,
                weight: 50,
                nouns: &["cAy", "qnd"],
                adjectives: &["Syryn", "sfyd"],
                verbs: &["xwrd", "xryd"],
            },
        ],
    },
];

/// English "read": present (id 0) after modals, past (id 1) after auxiliaries.
pub const READ: HomographSpec = HomographSpec {
    word: "read",
    variants: &[
        VariantSpec {
            phonemes: "r iy d",
            prior: 10,
            weight: 60,
            nouns: &[],
            adjectives: &[],
            verbs: &["will", "can", "must"],
        },
        VariantSpec {
            phonemes: "r eh d",
            prior: 7,
            weight: 40,
            nouns: &[],
            adjectives: &[],
            verbs: &["had", "has", "was"],
        },
    ],
};

/// Share of slots filled from a variant's cue lists.
pub const CUE_RATE: f64 = 0.85;

fn all_plain() -> impl Iterator<Item = &'static Entry> {
    NOUNS
        .iter()
        .chain(ADJECTIVES)
        .chain(POSSESSIVES)
        .chain(VERBS)
        .chain(std::iter::once(&OBJECT_MARKER))
        .chain(ENGLISH)
}

fn pron_of(surface: &str) -> &'static str {
    all_plain()
        .find(|(w, _)| *w == surface)
        .map(|(_, p)| *p)
        .unwrap_or_else(|| panic!("fixture word {surface:?} has no pronunciation"))
}

/// Lexicon text for the fixture language.
pub fn lexicon_tsv() -> String {
    let mut out = String::from("# word\tphonemes\tprior count\n");
    for (w, p) in all_plain() {
        out.push_str(&format!("{w}\t{p}\n"));
    }
    for h in HOMOGRAPHS.iter().chain(std::iter::once(&READ)) {
        for v in h.variants {
            out.push_str(&format!("{}\t{}\t{}\n", h.word, v.phonemes, v.prior));
        }
    }
    out
}

/// Letter-to-sound rules covering the romanization alphabet.
pub fn lts_tsv() -> String {
    let mut out = String::from("# grapheme\tphonemes\n");
    for c in "abcdefghijklmnopqrstuvxyz".chars() {
        out.push_str(&format!("{c}\t{c}\n"));
    }
    out.push_str("w\tv\nA\tA\nS\tS\nZ\tZ\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenWord {
    pub surface: String,
    pub phonemes: Vec<String>,
    pub variant: Option<u32>,
    pub ezafe: bool,
}

impl GenWord {
    fn plain(surface: &str) -> Self {
        Self::with_pron(surface, pron_of(surface))
    }

    fn with_pron(surface: &str, pron: &str) -> Self {
        GenWord {
            surface: surface.to_string(),
            phonemes: pron.split_whitespace().map(str::to_string).collect(),
            variant: None,
            ezafe: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub words: Vec<GenWord>,
}

impl Sentence {
    pub fn text(&self) -> String {
        let w: Vec<&str> = self.words.iter().map(|w| w.surface.as_str()).collect();
        w.join(" ")
    }

    /// `word#id` for homographs.
    pub fn annotated_line(&self) -> String {
        let w: Vec<String> = self
            .words
            .iter()
            .map(|w| match w.variant {
                Some(v) => format!("{}#{v}", w.surface),
                None => w.surface.clone(),
            })
            .collect();
        w.join(" ")
    }

    /// `word=e` for Ezafe-bearing words.
    pub fn ezafe_line(&self) -> String {
        let w: Vec<String> = self
            .words
            .iter()
            .map(|w| {
                if w.ezafe {
                    format!("{}=e", w.surface)
                } else {
                    w.surface.clone()
                }
            })
            .collect();
        w.join(" ")
    }

    /// Gold phoneme text: each word's pronunciation, then (when tagged) the
    /// glide if the word ends in a trigger, then the Ezafe phoneme.
    pub fn reference_text(&self, ezafe: &str, glide: Option<&GlideRule>) -> String {
        let words: Vec<String> = self
            .words
            .iter()
            .map(|w| {
                let mut p = w.phonemes.clone();
                if w.ezafe {
                    if let Some(g) = glide {
                        if p.last().is_some_and(|l| g.triggers.contains(l)) {
                            p.push(g.label.clone());
                        }
                    }
                    p.push(ezafe.to_string());
                }
                p.join(" ")
            })
            .collect();
        words.join(" | ")
    }

    pub fn phoneme_count(&self) -> usize {
        self.words
            .iter()
            .map(|w| w.phonemes.len() + usize::from(w.ezafe))
            .sum()
    }

    pub fn eval_case(&self, inv: &PhonemeInventory, glide: Option<&GlideRule>) -> EvalCase {
        let reference = parse_seq(&self.reference_text(inv.ezafe_symbol(), glide), inv)
            .and_then(|s| s.align_by_boundaries())
            .expect("generated reference is well formed");
        EvalCase {
            text: self.text(),
            reference,
            gold_choices: self
                .words
                .iter()
                .enumerate()
                .filter_map(|(i, w)| w.variant.map(|v| (i, v)))
                .collect(),
            gold_tags: self.words.iter().map(|w| w.ezafe).collect(),
        }
    }

    fn extend(&mut self, other: Sentence) {
        self.words.extend(other.words);
    }
}

/// Deterministic sentence source.
#[derive(Debug, Clone)]
pub struct Generator {
    rng: ChaCha8Rng,
    rare_rate: f64,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            rare_rate: 0.0,
        }
    }

    /// Makes a share of plain noun slots use [`RARE_NOUNS`].
    pub fn with_rare_nouns(mut self, rate: f64) -> Self {
        self.rare_rate = rate;
        self
    }

    fn pick(&mut self, list: &[Entry]) -> &'static str {
        list.choose(&mut self.rng).expect("non-empty list").0
    }

    fn pick_cue(&mut self, cues: &[&'static str], fallback: &[Entry]) -> &'static str {
        if !cues.is_empty() && self.rng.gen_bool(CUE_RATE) {
            cues.choose(&mut self.rng).copied().expect("non-empty")
        } else {
            self.pick(fallback)
        }
    }

    fn variant_of(&mut self, spec: &HomographSpec) -> u32 {
        let total: u32 = spec.variants.iter().map(|v| v.weight).sum();
        let mut x = self.rng.gen_range(0..total);
        for (i, v) in spec.variants.iter().enumerate() {
            if x < v.weight {
                return i as u32;
            }
            x -= v.weight;
        }
        unreachable!("weights sum to total")
    }

    /// NP with the given head; modifiers come from `cues` when set.
    fn np(&mut self, head: GenWord, cues: Option<&VariantSpec>) -> Vec<GenWord> {
        let mut np = vec![head];
        let n_adj = self.rng.gen_range(0..=2);
        for _ in 0..n_adj {
            let adj = match cues {
                Some(v) => self.pick_cue(v.adjectives, ADJECTIVES),
                None => self.pick(ADJECTIVES),
            };
            np.push(GenWord::plain(adj));
        }
        if self.rng.gen_bool(0.4) {
            np.push(GenWord::plain(self.pick(POSSESSIVES)));
        }
        let last = np.len() - 1;
        for w in &mut np[..last] {
            w.ezafe = true;
        }
        np
    }

    fn plain_noun(&mut self, cues: Option<&VariantSpec>) -> GenWord {
        if self.rare_rate > 0.0 && self.rng.gen_bool(self.rare_rate) {
            let (w, p) = *RARE_NOUNS.choose(&mut self.rng).expect("non-empty");
            return GenWord::with_pron(w, p);
        }
        let n = match cues {
            Some(v) => self.pick_cue(v.nouns, NOUNS),
            None => self.pick(NOUNS),
        };
        GenWord::plain(n)
    }

    fn build(&mut self, homograph: Option<(&HomographSpec, u32)>) -> Sentence {
        let cues = homograph.map(|(h, v)| &h.variants[v as usize]);
        let head = homograph.map(|(h, v)| {
            let mut w = GenWord::with_pron(h.word, h.variants[v as usize].phonemes);
            w.variant = Some(v);
            w
        });
        let homograph_is_object = head.is_some() && self.rng.gen_bool(0.5);
        let has_object = homograph_is_object || self.rng.gen_bool(0.7);

        let mut words = Vec::new();
        let subj_head = match (&head, homograph_is_object) {
            (Some(h), false) => h.clone(),
            _ => self.plain_noun(cues),
        };
        words.extend(self.np(subj_head, cues));
        if has_object {
            let obj_head = match (&head, homograph_is_object) {
                (Some(h), true) => h.clone(),
                _ => self.plain_noun(cues),
            };
            words.extend(self.np(obj_head, cues));
            words.push(GenWord::plain(OBJECT_MARKER.0));
        }
        let verb = match cues {
            Some(v) => self.pick_cue(v.verbs, VERBS),
            None => self.pick(VERBS),
        };
        words.push(GenWord::plain(verb));
        Sentence { words }
    }

    pub fn plain_sentence(&mut self) -> Sentence {
        self.build(None)
    }

    pub fn homograph_sentence(&mut self) -> Sentence {
        let spec = HOMOGRAPHS.choose(&mut self.rng).expect("non-empty");
        let v = self.variant_of(spec);
        self.build(Some((spec, v)))
    }

    /// `SUBJ AUX read [the] OBJ`.
    pub fn english_sentence(&mut self) -> Sentence {
        let v = self.variant_of(&READ);
        let cue = &READ.variants[v as usize];
        let mut words = vec![GenWord::plain(
            EN_SUBJECTS.choose(&mut self.rng).expect("non-empty"),
        )];
        words.push(GenWord::plain(cue.verbs.choose(&mut self.rng).expect("non-empty")));
        let mut read = GenWord::with_pron(READ.word, cue.phonemes);
        read.variant = Some(v);
        words.push(read);
        let obj = *EN_OBJECTS.choose(&mut self.rng).expect("non-empty");
        if obj != "it" {
            words.push(GenWord::plain("the"));
        }
        words.push(GenWord::plain(obj));
        Sentence { words }
    }

    /// 60% plain, 30% Persian homograph, 10% English.
    pub fn mixed_sentence(&mut self) -> Sentence {
        match self.rng.gen_range(0..10) {
            0..=5 => self.plain_sentence(),
            6..=8 => self.homograph_sentence(),
            _ => self.english_sentence(),
        }
    }

    /// A word spelled from the romanization alphabet that is not in the
    /// lexicon, so the letter-to-sound fallback handles it.
    pub fn oov_word(&mut self) -> String {
        const LETTERS: &[u8] = b"bdfghjklmnpqrstxzAS";
        loop {
            let len = self.rng.gen_range(2..=5);
            let w: String = (0..len)
                .map(|_| *LETTERS.choose(&mut self.rng).expect("non-empty") as char)
                .collect();
            let known = all_plain().any(|(s, _)| *s == w)
                || HOMOGRAPHS.iter().any(|h| h.word == w);
            if !known {
                return w;
            }
        }
    }

    /// Raw text: mixed sentences, sometimes with an out-of-lexicon noun or
    /// trailing punctuation.
    pub fn utterance(&mut self) -> String {
        let s = self.mixed_sentence();
        let mut words: Vec<String> = s.words.iter().map(|w| w.surface.clone()).collect();
        if self.rng.gen_bool(0.2) {
            let i = self.rng.gen_range(0..words.len());
            words[i] = self.oov_word();
        }
        let mut text = words.join(" ");
        if self.rng.gen_bool(0.3) {
            text.push('.');
        }
        text
    }

    /// Consecutive mixed sentences joined until at least `min_phonemes`.
    pub fn long_sentence(&mut self, min_phonemes: usize) -> Sentence {
        let mut s = self.mixed_sentence();
        while s.phoneme_count() < min_phonemes {
            let next = self.mixed_sentence();
            s.extend(next);
        }
        s
    }
}

pub fn homograph_corpus(seed: u64, n: usize) -> AnnotatedCorpus {
    let mut g = Generator::new(seed);
    let utterances = (0..n)
        .map(|i| {
            let s = if i % 5 == 4 {
                g.english_sentence()
            } else {
                g.homograph_sentence()
            };
            s.words
                .into_iter()
                .map(|w| CorpusToken {
                    surface: w.surface,
                    variant: w.variant,
                })
                .collect()
        })
        .collect();
    AnnotatedCorpus { utterances }
}

pub fn ezafe_corpus(seed: u64, n: usize) -> EzafeCorpus {
    let mut g = Generator::new(seed);
    let utterances = (0..n)
        .map(|_| {
            g.mixed_sentence()
                .words
                .into_iter()
                .map(|w| TaggedToken {
                    surface: w.surface,
                    ezafe: w.ezafe,
                })
                .collect()
        })
        .collect();
    EzafeCorpus { utterances }
}

/// Share of noun slots in evaluation text filled from [`RARE_NOUNS`].
pub const EVAL_RARE_RATE: f64 = 0.15;

pub fn eval_cases(
    seed: u64,
    n: usize,
    inv: &PhonemeInventory,
    glide: Option<&GlideRule>,
) -> Vec<EvalCase> {
    let mut g = Generator::new(seed).with_rare_nouns(EVAL_RARE_RATE);
    (0..n).map(|_| g.mixed_sentence().eval_case(inv, glide)).collect()
}

pub fn long_eval_cases(
    seed: u64,
    n: usize,
    min_phonemes: usize,
    inv: &PhonemeInventory,
    glide: Option<&GlideRule>,
) -> Vec<EvalCase> {
    let mut g = Generator::new(seed).with_rare_nouns(EVAL_RARE_RATE);
    (0..n)
        .map(|_| g.long_sentence(min_phonemes).eval_case(inv, glide))
        .collect()
}

pub fn random_utterances(seed: u64, n: usize) -> Vec<String> {
    let mut g = Generator::new(seed);
    (0..n).map(|_| g.utterance()).collect()
}

/// A two-variant homograph whose contexts come from disjoint vocabularies.
#[derive(Debug, Clone)]
pub struct SeparableSet {
    pub word: &'static str,
    pub lexicon_tsv: String,
    pub train: AnnotatedCorpus,
    /// `(tokens, homograph index, gold variant)`.
    pub test: Vec<(Vec<String>, usize, u32)>,
}

pub const SEPARABLE_WORD: &str = "bnd";
pub const SEPARABLE_CUES: [&[&str]; 2] = [
    &["ab", "ad", "af", "ag", "ah", "aj", "ak", "al"],
    &["ob", "od", "of", "og", "oh", "oj", "ok", "ol"],
];

/// Occurrences of [`SEPARABLE_WORD`], variant 0 with probability
/// `p_first`, surrounded by 1 to 4 cue words of the chosen variant.
pub fn separable_set(seed: u64, n_train: usize, n_test: usize, p_first: f64) -> SeparableSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let occurrence = |rng: &mut ChaCha8Rng| {
        let v = if rng.gen_bool(p_first) { 0u32 } else { 1 };
        let cues = SEPARABLE_CUES[v as usize];
        let before = rng.gen_range(0..=2);
        let after = rng.gen_range(usize::from(before == 0)..=2);
        let mut tokens: Vec<String> = Vec::new();
        for _ in 0..before {
            tokens.push(cues.choose(rng).expect("non-empty").to_string());
        }
        let idx = tokens.len();
        tokens.push(SEPARABLE_WORD.to_string());
        for _ in 0..after {
            tokens.push(cues.choose(rng).expect("non-empty").to_string());
        }
        (tokens, idx, v)
    };
    let train = (0..n_train)
        .map(|_| {
            let (tokens, idx, v) = occurrence(&mut rng);
            tokens
                .into_iter()
                .enumerate()
                .map(|(i, surface)| CorpusToken {
                    surface,
                    variant: (i == idx).then_some(v),
                })
                .collect()
        })
        .collect();
    let test = (0..n_test).map(|_| occurrence(&mut rng)).collect();
    SeparableSet {
        word: SEPARABLE_WORD,
        lexicon_tsv: format!("{SEPARABLE_WORD}\tb a n d\t2\n{SEPARABLE_WORD}\tb o n d\t1\n"),
        train: AnnotatedCorpus { utterances: train },
        test,
    }
}

pub const HOMOGRAPH_CORPUS_SEED: u64 = 11;
pub const EZAFE_CORPUS_SEED: u64 = 12;
pub const EVAL_SEED: u64 = 13;

/// Config shipped next to the bundled fixtures.
pub const FIXTURE_CONFIG: &str = "\
# Fixture configuration. Paths are relative to this file.
inventory=inventory.txt
lexicon=lexicon.tsv
lts=lts.tsv
homograph_db=homograph_db.tsv
ezafe_model=ezafe_model.tsv
mode=service
transport=stdio
load_delay_s=0
";

/// The same artifacts with refinement switched off.
pub const FIXTURE_BASE_CONFIG: &str = "\
# Base phonemizer only: no homograph or Ezafe refinement.
inventory=inventory.txt
lexicon=lexicon.tsv
lts=lts.tsv
mode=direct_warm
refine=false
";

/// Every bundled fixture file as `(name, contents)`, built from the
/// generator and the default inventory.
pub fn fixture_files() -> Vec<(&'static str, String)> {
    let inv = PhonemeInventory::default_inventory();
    let lexicon = lexicon_tsv();
    let lex = crate::lexicon::Lexicon::parse(&lexicon, &inv).expect("fixture lexicon parses");
    let hcorpus = homograph_corpus(HOMOGRAPH_CORPUS_SEED, 600);
    let ecorpus = ezafe_corpus(EZAFE_CORPUS_SEED, 500);
    let db = crate::homograph::build_db(
        &hcorpus,
        &lex,
        crate::homograph::DEFAULT_WINDOW,
        crate::homograph::DEFAULT_ALPHA,
    )
    .expect("fixture db builds");
    let model = crate::ezafe::train(&ecorpus, crate::ezafe::DEFAULT_EPOCHS).expect("fixture model trains");
    let cases = eval_cases(EVAL_SEED, 100, &inv, None);
    vec![
        ("lexicon.tsv", lexicon),
        ("lts.tsv", lts_tsv()),
        ("homograph_corpus.txt", hcorpus.to_text()),
        ("ezafe_corpus.txt", ecorpus.to_text()),
        ("eval_cases.tsv", crate::metrics::cases_to_text(&cases)),
        ("homograph_db.tsv", db.to_tsv()),
        ("ezafe_model.tsv", model.to_tsv()),
        ("config.txt", FIXTURE_CONFIG.to_string()),
        ("config_base.txt", FIXTURE_BASE_CONFIG.to_string()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{Lexicon, LtsTable};

    fn inv() -> PhonemeInventory {
        PhonemeInventory::default_inventory()
    }

    #[test]
    fn lexicon_ids_match_spec_order() {
        let lex = Lexicon::parse(&lexicon_tsv(), &inv()).unwrap();
        for h in HOMOGRAPHS.iter().chain(std::iter::once(&READ)) {
            for (i, v) in h.variants.iter().enumerate() {
                let got = lex.variant(h.word, i as u32).unwrap();
                assert_eq!(got.phonemes.join(" "), v.phonemes, "{} #{i}", h.word);
            }
        }
        LtsTable::parse(&lts_tsv(), &inv()).unwrap();
    }

    #[test]
    fn surfaces_are_unique() {
        let mut seen = std::collections::HashSet::new();
        for (w, _) in all_plain().chain(RARE_NOUNS) {
            assert!(seen.insert(*w), "duplicate {w}");
        }
        for h in HOMOGRAPHS {
            assert!(seen.insert(h.word));
            for v in h.variants {
                for c in v.nouns.iter().chain(v.adjectives).chain(v.verbs) {
                    pron_of(c);
                }
            }
        }
    }

    #[test]
    fn ezafe_follows_the_grammar() {
        let mut g = Generator::new(5);
        let modifier = |w: &GenWord| {
            ADJECTIVES.iter().chain(POSSESSIVES).any(|(s, _)| *s == w.surface)
        };
        for _ in 0..300 {
            let s = g.mixed_sentence();
            for (i, w) in s.words.iter().enumerate() {
                let next_mod = s.words.get(i + 1).is_some_and(modifier);
                assert_eq!(w.ezafe, next_mod, "{}", s.ezafe_line());
            }
        }
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        assert_eq!(random_utterances(3, 20), random_utterances(3, 20));
        assert_ne!(random_utterances(3, 20), random_utterances(4, 20));
    }

    #[test]
    fn references_render_ezafe_and_glide() {
        let s = Sentence {
            words: vec![
                {
                    let mut w = GenWord::plain("zybA");
                    w.ezafe = true;
                    w
                },
                GenWord::plain("mn"),
            ],
        };
        assert_eq!(s.reference_text("e", None), "z i b A e | m a n");
        let glide = GlideRule::new("y", ["A"]);
        assert_eq!(s.reference_text("e", Some(&glide)), "z i b A y e | m a n");
        let case = s.eval_case(&inv(), None);
        assert_eq!(case.gold_tags, [true, false]);
        assert_eq!(s.phoneme_count(), 8);
    }

    #[test]
    fn long_sentences_meet_minimum() {
        let cases = long_eval_cases(1, 10, 40, &inv(), None);
        assert!(cases.iter().all(|c| c.reference.phoneme_count() >= 40));
    }

    #[test]
    fn separable_vocabularies_are_disjoint() {
        let set = separable_set(1, 50, 20, 0.6);
        for utt in &set.train.utterances {
            let v = utt.iter().find_map(|t| t.variant).unwrap();
            for t in utt.iter().filter(|t| t.variant.is_none()) {
                assert!(SEPARABLE_CUES[v as usize].contains(&t.surface.as_str()));
            }
        }
        assert!(set.test.iter().all(|(t, i, _)| t[*i] == SEPARABLE_WORD && t.len() >= 2));
    }
}
