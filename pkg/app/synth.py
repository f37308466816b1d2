"""Seeded generator for a small synthetic corpus.

Every language lexicalizes every concept with its own lemma. On top of
that a fixed set of candidate concept pairs is colexified language by
language, with probability ``COLEX_BASE * exp(-COLEX_DECAY * d)`` where
``d`` is the concreteness gap of the pair, so pairs closer in concreteness
colexify in more languages. Languages of one family borrow each other's
lemma for a pair at ``LOAN_RATE`` and a colexifying language coins a second
lemma for the pair at ``SYNONYM_RATE``, so colexification, lemma and
language counts drift apart. A few lemmas also pick up non-first senses.
"""
import logging
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from app.ingest import format_lexicon, format_pronunciations, \
    format_ratings, format_feature_table, \
    format_language_metadata
from app.models import FEATURE_NAMES, SynsetId, LexEntry, LanguageInfo, \
    PronEntry, RatingRecord, FeatureTable

log = logging.getLogger(__name__)

FAMILIES = (
    ('Atlantic', 'Africa'),
    ('Boreal', 'Eurasia'),
    ('Coastal', 'Papunesia'),
    ('Highland', 'South America'),
    ('Riverine', 'North America'),
    ('Steppe', 'Eurasia'),
)
CONSONANTS = ('p', 'b', 't', 'd', 'k', 'g', 'm', 'n', 'ŋ', 'f', 'v', 's',
              'z', 'ʃ', 'h', 'l', 'r', 'j', 'w', 'tʃ')
VOWELS = ('a', 'e', 'i', 'o', 'u', 'ə', 'ɛ', 'ɔ', 'aː', 'iː')

COLEX_BASE = 0.8
COLEX_DECAY = 1.5
LOAN_RATE = 0.4
SYNONYM_RATE = 0.15


@dataclass
class SynthCorpus:
    entries: list = field(default_factory=list)
    prons: list = field(default_factory=list)
    concreteness: list = field(default_factory=list)
    affect: list = field(default_factory=list)
    table: FeatureTable = None
    languages: list = field(default_factory=list)


def _feature_table(rng):
    table = FeatureTable()
    syl, cons = FEATURE_NAMES.index('syl'), FEATURE_NAMES.index('cons')
    for segment in CONSONANTS + VOWELS:
        values = [rng.choice((-1, 0, 1)) for _ in FEATURE_NAMES]
        vowel = segment in VOWELS
        values[syl] = 1 if vowel else -1
        values[cons] = -1 if vowel else 1
        table.rows[segment] = tuple(values)
    return table


def _word(rng, consonants, vowels, syllables):
    return tuple(s for _ in range(syllables)
                 for s in (rng.choice(consonants), rng.choice(vowels)))


def _concepts(rng, count):
    words = set()
    while len(words) < count:
        segments = _word(rng, 'bdfgklmnprstvz', 'aeiou', rng.randint(2, 3))
        words.add(''.join(segments))
    return sorted(words)


class _Language:
    def __init__(self, rng, code):
        self.rng = rng
        self.code = code
        self.consonants = sorted(rng.sample(CONSONANTS, rng.randint(10, 14)))
        self.vowels = sorted(rng.sample(VOWELS, rng.randint(4, 6)))
        self.lemmas = {}

    def new_lemma(self):
        while True:
            segments = _word(self.rng, self.consonants, self.vowels,
                             self.rng.randint(1, 3))
            lemma = ''.join(segments)
            if lemma not in self.lemmas:
                self.lemmas[lemma] = segments
                return lemma

    def adopt(self, lemma, segments):
        if lemma in self.lemmas:
            return False
        self.lemmas[lemma] = segments
        return True


def generate_corpus(seed=0, n_languages=14, n_concepts=150, n_pairs=400,
                    pron_coverage=0.85, extra_senses=10):
    rng = random.Random(seed)
    n_pairs = min(n_pairs, n_concepts * (n_concepts - 1) // 2)
    extra_senses = min(extra_senses, n_concepts)
    corpus = SynthCorpus(table=_feature_table(rng))
    words = _concepts(rng, n_concepts)
    concreteness = {w: round(rng.uniform(1.0, 5.0), 2) for w in words}
    for word in words:
        if rng.random() < 0.9:
            corpus.concreteness.append(
                RatingRecord(word, concreteness=concreteness[word]))
        if rng.random() < 0.8:
            corpus.affect.append(RatingRecord(
                word, valence=round(rng.uniform(1.0, 9.0), 2),
                arousal=round(rng.uniform(1.0, 9.0), 2),
                dominance=round(rng.uniform(1.0, 9.0), 2)))

    candidates = set()
    while len(candidates) < n_pairs:
        a, b = rng.sample(words, 2)
        candidates.add((min(a, b), max(a, b)))
    candidates = sorted(candidates)

    languages = []
    family_lemmas = {}
    for i in range(n_languages):
        family, macroarea = FAMILIES[i % len(FAMILIES)]
        info = LanguageInfo(f'l{i + 1:02d}', family, macroarea)
        corpus.languages.append(info)
        languages.append(_Language(rng, info.code))
    families = {info.code: info.family for info in corpus.languages}

    for language in languages:
        for word in words:
            corpus.entries.append(LexEntry(
                language.code, language.new_lemma(), SynsetId(word, 'n', 1)))
        for a, b in candidates:
            gap = abs(concreteness[a] - concreteness[b])
            if rng.random() < COLEX_BASE * math.exp(-COLEX_DECAY * gap):
                loans = family_lemmas.setdefault(
                    (families[language.code], a, b), [])
                lemmas = []
                if loans and rng.random() < LOAN_RATE:
                    lemma, segments = rng.choice(loans)
                    if language.adopt(lemma, segments):
                        lemmas.append(lemma)
                if not lemmas:
                    lemma = language.new_lemma()
                    loans.append((lemma, language.lemmas[lemma]))
                    lemmas.append(lemma)
                if rng.random() < SYNONYM_RATE:
                    lemmas.append(language.new_lemma())
                for lemma in lemmas:
                    for word in (a, b):
                        corpus.entries.append(LexEntry(
                            language.code, lemma, SynsetId(word, 'n', 1)))
        for word in rng.sample(words, extra_senses):
            lemma = next(e.lemma for e in corpus.entries
                         if e.language == language.code
                         and e.synset.sense_word == word)
            other = rng.choice(words)
            corpus.entries.append(LexEntry(
                language.code, lemma,
                SynsetId(other, 'n', rng.randint(2, 4))))
        for lemma, segments in sorted(language.lemmas.items()):
            if rng.random() < pron_coverage:
                corpus.prons.append(PronEntry(language.code, lemma, segments))
    corpus.entries = sorted(set(corpus.entries))
    log.info('synthesized %d entries, %d pronunciations over %d languages',
             len(corpus.entries), len(corpus.prons), len(corpus.languages))
    return corpus


def _write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(text)


def write_corpus(corpus, directory):
    """Write the corpus as input files plus a ``corpus.cfg`` that points
    ``flask build --config`` at them. Returns the config file path."""
    directory = Path(directory).resolve()
    _write(directory / 'lexicon.tsv', format_lexicon(corpus.entries))
    for info in corpus.languages:
        _write(directory / 'pronunciations' / f'{info.code}.tsv',
               format_pronunciations(
                   [p for p in corpus.prons if p.language == info.code]))
    _write(directory / 'concreteness.csv',
           format_ratings(corpus.concreteness, 'concreteness'))
    _write(directory / 'affect.csv', format_ratings(corpus.affect, 'affect'))
    _write(directory / 'features.csv', format_feature_table(corpus.table))
    _write(directory / 'languages.csv',
           format_language_metadata(corpus.languages))
    config = directory / 'corpus.cfg'
    _write(config, ''.join(f'{key}={directory / name}\n' for key, name in (
        ('lexicon', 'lexicon.tsv'),
        ('pronunciations', 'pronunciations'),
        ('concreteness', 'concreteness.csv'),
        ('affect', 'affect.csv'),
        ('feature-table', 'features.csv'),
        ('languages', 'languages.csv'),
    )))
    return config
