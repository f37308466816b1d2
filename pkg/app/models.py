from dataclasses import dataclass, field
from typing import Optional

POS_TAGS = ('n', 'v', 'a', 'r', 's')

FEATURE_NAMES = (
    'syl', 'son', 'cons', 'cont', 'delrel', 'lat', 'nas', 'strid', 'voi',
    'sg', 'cg', 'ant', 'cor', 'distr', 'lab', 'hi', 'lo', 'back', 'round',
    'velaric', 'tense', 'long', 'hitone', 'hireg',
)

RATING_DIMS = ('concreteness', 'valence', 'arousal', 'dominance')
DISTANCE_NAMES = ('conc_dist', 'v_dist', 'a_dist', 'd_dist')
COUNT_NAMES = ('n_colex', 'n_lemmas', 'n_languages')
POSITIONS = ('initial', 'last')


@dataclass(frozen=True, order=True)
class SynsetId:
    sense_word: str
    pos: str
    sense_number: int

    def __str__(self):
        return f'{self.sense_word}#{self.pos}#{self.sense_number}'

    def __repr__(self):
        return f'<SynsetId {self}>'

    @property
    def is_first_sense(self):
        return self.sense_number == 1


@dataclass(frozen=True, order=True)
class LexEntry:
    language: str
    lemma: str
    synset: SynsetId


@dataclass(frozen=True, order=True)
class LanguageInfo:
    code: str
    family: str
    macroarea: Optional[str] = None


@dataclass(frozen=True, order=True)
class PronEntry:
    language: str
    word: str
    segments: tuple


@dataclass(frozen=True, order=True)
class RatingRecord:
    concept: str
    concreteness: Optional[float] = None
    valence: Optional[float] = None
    arousal: Optional[float] = None
    dominance: Optional[float] = None

    def get(self, dim):
        return getattr(self, dim)


@dataclass(frozen=True)
class SegmentFeatures:
    values: tuple

    def __getitem__(self, name):
        return self.values[FEATURE_NAMES.index(name)]


@dataclass
class FeatureTable:
    feature_names: tuple = FEATURE_NAMES
    rows: dict = field(default_factory=dict)

    def __contains__(self, segment):
        return segment in self.rows

    def __len__(self):
        return len(self.rows)

    def get(self, segment):
        values = self.rows.get(segment)
        return None if values is None else SegmentFeatures(values)

    @property
    def max_segment_length(self):
        return max((len(s) for s in self.rows), default=0)


@dataclass(frozen=True)
class PhonemeSeq:
    segments: tuple

    def __post_init__(self):
        if not self.segments:
            raise ValueError('a phoneme sequence needs at least one segment')

    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __str__(self):
        return ' '.join(self.segments)

    def initial(self):
        return self.segments[0]

    def last(self):
        return self.segments[-1]

    def at(self, position):
        return self.initial() if position == 'initial' else self.last()


@dataclass(frozen=True)
class LemmaFeatureProfile:
    counts: tuple

    def __add__(self, other):
        return LemmaFeatureProfile(
            tuple(a + b for a, b in zip(self.counts, other.counts)))

    def __getitem__(self, name):
        return self.counts[FEATURE_NAMES.index(name)]


@dataclass(frozen=True)
class PhonoMetrics:
    ttr: float
    seg_len: int
    distinct: int


@dataclass(frozen=True, order=True)
class Concept:
    """A first-sense synset reduced to its sense word; POS keeps unrelated
    senses with the same spelling apart."""
    word: str
    pos: str

    def __str__(self):
        return self.word


@dataclass(frozen=True)
class ColexEdge:
    pair: tuple
    witnesses: frozenset

    @property
    def s1(self):
        return self.pair[0]

    @property
    def s2(self):
        return self.pair[1]


@dataclass(frozen=True)
class ConceptPairRecord:
    concept1: Concept
    concept2: Concept
    synset1: SynsetId
    synset2: SynsetId
    witnesses: frozenset

    @property
    def key(self):
        return (self.concept1.word, self.concept2.word,
                self.concept1.pos, self.concept2.pos)

    @property
    def n_colex(self):
        return len(self.witnesses)

    @property
    def n_lemmas(self):
        return len({lemma for lemma, _ in self.witnesses})

    @property
    def n_languages(self):
        return len({lang for _, lang in self.witnesses})

    def count(self, name):
        return getattr(self, name)

    def sorted_witnesses(self):
        return sorted(f'{lemma}:{lang}' for lemma, lang in self.witnesses)

    def to_dict(self):
        return {'concept_1': str(self.concept1),
                'concept_2': str(self.concept2),
                'synset_1': str(self.synset1), 'synset_2': str(self.synset2),
                'n_colex': self.n_colex, 'n_lemmas': self.n_lemmas,
                'n_languages': self.n_languages,
                'witnesses': self.sorted_witnesses()}


@dataclass(frozen=True)
class ConceptRatings:
    concept: Concept
    concreteness: Optional[float] = None
    valence: Optional[float] = None
    arousal: Optional[float] = None
    dominance: Optional[float] = None

    def get(self, dim):
        return getattr(self, dim)

    @property
    def has_affect(self):
        return any(self.get(d) is not None for d in RATING_DIMS[1:])

    @property
    def is_rated(self):
        return any(self.get(d) is not None for d in RATING_DIMS)


@dataclass(frozen=True)
class PairDistances:
    conc_dist: Optional[float] = None
    v_dist: Optional[float] = None
    a_dist: Optional[float] = None
    d_dist: Optional[float] = None

    def get(self, name):
        return getattr(self, name)

    def values(self):
        return tuple(self.get(name) for name in DISTANCE_NAMES)


@dataclass(frozen=True)
class ColexRecord:
    lemma: str
    language: str
    phonemes: Optional[PhonemeSeq]
    synset1: SynsetId
    synset2: SynsetId
    concept1: Concept
    concept2: Concept
    distances: PairDistances

    @property
    def sort_key(self):
        return (self.concept1.word, self.concept2.word, self.language,
                self.lemma)


@dataclass(frozen=True)
class LemmaSample:
    """One rated (language, lemma, concept) observation."""
    language: str
    lemma: str
    concept: Concept
    phonemes: PhonemeSeq
    ratings: ConceptRatings

    @property
    def key(self):
        return (self.language, self.lemma, self.concept)


@dataclass(frozen=True)
class PhonemeRating:
    phoneme: str
    language: str
    position: str
    mean_concreteness: Optional[float]
    mean_valence: Optional[float]
    mean_arousal: Optional[float]
    mean_dominance: Optional[float]
    n: int

    def mean(self, dim):
        return getattr(self, f'mean_{dim}')


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    p: float
    n: int


@dataclass(frozen=True)
class CorrelationReport:
    group: str
    variable_x: str
    variable_y: str
    result: CorrelationResult
    alpha: float = 0.05
    divisor: int = 1
    threshold: float = 0.1
    significant: bool = False

    @property
    def reported(self):
        return self.significant and abs(self.result.r) > self.threshold

    def to_dict(self):
        return {'family': self.group, 'variable_x': self.variable_x,
                'variable_y': self.variable_y, 'n': self.result.n,
                'r': self.result.r, 'p': self.result.p,
                'divisor': self.divisor, 'significant': self.significant,
                'reported': self.reported}


@dataclass(frozen=True)
class Diagnostic:
    group: str
    variable_x: str
    variable_y: str
    reason: str

    def to_dict(self):
        return {'family': self.group, 'variable_x': self.variable_x,
                'variable_y': self.variable_y, 'reason': self.reason}


@dataclass(frozen=True)
class GroupInfo:
    group: str
    n_languages: int
    n_samples: int
    n_phonemes: Optional[int] = None

    def to_dict(self):
        return {'family': self.group, 'n_languages': self.n_languages,
                'n_samples': self.n_samples, 'n_phonemes': self.n_phonemes}


@dataclass
class Analysis:
    name: str
    reports: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    groups: list = field(default_factory=list)
    matrix: Optional[list] = None

    def reported(self):
        return [r for r in self.reports if r.reported]

    def to_dict(self):
        return {'analysis': self.name,
                'groups': [g.to_dict() for g in self.groups],
                'reports': [r.to_dict() for r in self.reports],
                'diagnostics': [d.to_dict() for d in self.diagnostics],
                'matrix': self.matrix}


@dataclass(frozen=True)
class SummaryTable:
    entries: int = 0
    colex_patterns: int = 0
    synsets: int = 0
    lexicalizations: int = 0
    phoneme_lemma_pairs: int = 0
    concepts: int = 0
    concepts_with_affect: int = 0
    concepts_with_concreteness: int = 0
    synset_pairs: int = 0
    languages: int = 0
    families: int = 0
    median_phoneme_inventory: float = 0

    def to_dict(self):
        return {name: getattr(self, name)
                for name in self.__dataclass_fields__}


@dataclass(frozen=True)
class LanguageCount:
    language: str
    family: Optional[str]
    macroarea: Optional[str]
    n_concepts: int
    n_lemmas: int
    n_phoneme_lemmas: int
