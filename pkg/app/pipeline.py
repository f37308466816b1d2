"""Stage orchestration behind the ``build``, ``analyze``, ``subgraph`` and
``summary`` commands."""
import hashlib
import logging
import time
from dataclasses import dataclass, field, fields, asdict
from pathlib import Path
from typing import Optional

from app import __version__
from app import export
from app.colexgraph import construct_graph, derive_concept_graph, \
    export_dot, summary_stats, language_counts
from app.exceptions import ConfigError, IoError, MissingArtifact, \
    SegmentationError, UnknownSegment
from app.ingest import IngestReport, ingest_lexicon, ingest_pronunciations, \
    ingest_pronunciation_dir, ingest_ratings, ingest_feature_table, \
    ingest_language_metadata, format_language_metadata, \
    pronunciation_language
from app.models import POSITIONS, RATING_DIMS, PronEntry
from app.phonology import attach_phonemes, lemma_profile, phoneme_index, \
    segment_fallback
from app.ratings import attach_ratings, build_dataset, lemma_samples, \
    phoneme_level_ratings, record_distances
from app import stats

log = logging.getLogger(__name__)

MODES = ('strict', 'lenient')
ANALYSES = ('colex-distance', 'distance-matrix', 'phoneme-position',
            'features', 'ttr-len')

# config-file key -> RunConfig field
FILE_KEYS = {
    'lexicon': 'lexicon',
    'pronunciations': 'pronunciations',
    'concreteness': 'concreteness',
    'affect': 'affect',
    'feature-table': 'feature_table',
    'languages': 'languages',
    'mode': 'mode',
    'alpha': 'alpha',
    'report-threshold': 'report_threshold',
    'out-dir': 'out_dir',
    'normalize-underscores': 'normalize_underscores',
    'resegment': 'resegment',
}
_INPUTS = ('lexicon', 'pronunciations', 'concreteness', 'affect',
           'feature_table', 'languages')
_FLAGS = ('normalize_underscores', 'resegment')
_FLOATS = ('alpha', 'report_threshold', 'affect_min', 'affect_max')


def _to_bool(value):
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ('1', 'true', 't', 'yes', 'y')


@dataclass
class RunConfig:
    lexicon: Optional[str] = None
    pronunciations: Optional[str] = None
    concreteness: Optional[str] = None
    affect: Optional[str] = None
    feature_table: Optional[str] = None
    languages: Optional[str] = None
    mode: str = 'strict'
    alpha: float = 0.05
    report_threshold: float = 0.1
    out_dir: str = 'output'
    normalize_underscores: bool = False
    resegment: bool = False
    affect_min: float = 1.0
    affect_max: float = 9.0

    @classmethod
    def from_app_config(cls, config):
        return cls(
            lexicon=config.get('LEXICON_PATH'),
            pronunciations=config.get('PRONUNCIATIONS_DIR'),
            concreteness=config.get('CONCRETENESS_PATH'),
            affect=config.get('AFFECT_PATH'),
            feature_table=config.get('FEATURE_TABLE_PATH'),
            languages=config.get('LANGUAGES_PATH'),
            mode=config.get('PARSE_MODE', 'strict'),
            alpha=config.get('ALPHA', 0.05),
            report_threshold=config.get('REPORT_THRESHOLD', 0.1),
            out_dir=config.get('OUT_DIR', 'output'),
            normalize_underscores=config.get('NORMALIZE_UNDERSCORES', False),
            resegment=config.get('RESEGMENT', False),
            affect_min=config.get('AFFECT_MIN', 1.0),
            affect_max=config.get('AFFECT_MAX', 9.0))

    def update(self, values, source):
        """Apply ``{field: value}``; ``None`` values are left out."""
        known = {f.name for f in fields(self)}
        for name, value in values.items():
            if value is None:
                continue
            if name not in known:
                raise ConfigError(f'unknown setting {name!r}', path=source)
            try:
                if name in _FLAGS:
                    value = _to_bool(value)
                elif name in _FLOATS:
                    value = float(value)
                else:
                    value = str(value).strip()
            except ValueError:
                raise ConfigError(f'{name}: {value!r} is not a number',
                                  path=source) from None
            setattr(self, name, value)
        return self

    def update_from_file(self, path, values):
        unknown = sorted(set(values) - set(FILE_KEYS))
        if unknown:
            raise ConfigError(f'unknown keys {", ".join(unknown)}', path=path)
        return self.update({FILE_KEYS[k]: v for k, v in values.items()},
                           source=path)

    @property
    def strict(self):
        return self.mode == 'strict'

    def validate(self, inputs=True):
        if self.mode not in MODES:
            raise ConfigError(f'mode must be strict or lenient, got '
                              f'{self.mode!r}')
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f'alpha must lie in (0, 1), got {self.alpha}')
        if self.report_threshold < 0:
            raise ConfigError('report threshold must not be negative')
        if self.affect_min >= self.affect_max:
            raise ConfigError('affect range is empty')
        if not inputs:
            return self
        if not self.lexicon:
            raise ConfigError('no lexicon given (--lexicon or COLEX_LEXICON)')
        for name in _INPUTS:
            path = getattr(self, name)
            if path and not Path(path).exists():
                raise ConfigError(f'{name.replace("_", "-")} path does not '
                                  f'exist', path=path)
        if self.resegment and not self.feature_table:
            raise ConfigError('--resegment needs a feature table')
        return self

    def to_dict(self):
        return asdict(self)


def _digest(path):
    sha = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 16), b''):
            sha.update(chunk)
    return sha.hexdigest()


def input_digests(config):
    digests = {}
    for name in _INPUTS:
        path = getattr(config, name)
        if not path:
            continue
        path = Path(path)
        files = sorted(path.glob('*.tsv')) if path.is_dir() else [path]
        for file in files:
            digests[str(file)] = _digest(file)
    return digests


@dataclass
class BuildState:
    """Everything the build computes before anything is written."""
    config: RunConfig
    reports: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    entries: list = field(default_factory=list)
    prons: list = field(default_factory=list)
    ratings: list = field(default_factory=list)
    table: object = None
    languages: list = field(default_factory=list)
    graph: object = None
    records: list = field(default_factory=list)
    joined: list = field(default_factory=list)
    phonemes: dict = field(default_factory=dict)
    profiles: dict = field(default_factory=dict)
    ratings_map: dict = field(default_factory=dict)
    dataset: list = field(default_factory=list)
    samples: list = field(default_factory=list)
    phoneme_ratings: dict = field(default_factory=dict)
    summary: object = None
    language_rows: list = field(default_factory=list)

    def counts(self):
        return {
            'entries': len(self.entries),
            'pronunciations': len(self.prons),
            'synsets': len(self.graph.nodes),
            'synset_pairs': len(self.graph),
            'witnesses': self.graph.witness_total(),
            'concept_pairs': len(self.records),
            'concept_pair_witnesses': sum(r.n_colex for r in self.records),
            'dataset_rows': len(self.dataset),
            'phoneme_lemmas': len(self.phonemes),
            'concepts': len(self.ratings_map),
            'lemma_samples': len(self.samples),
        }


class _Stage:
    def __init__(self, state, name):
        self.state = state
        self.name = name

    def __enter__(self):
        self.start = time.perf_counter()
        log.info('stage %s started', self.name)
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        self.state.timings[self.name] = round(elapsed, 6)
        if exc_type is None:
            log.info('stage %s done in %.3fs', self.name, elapsed)
        return False


def _resegment(prons, table):
    out = []
    for pron in prons:
        if len(pron.segments) == 1 and pron.segments[0] not in table:
            try:
                seq = segment_fallback(pron.segments[0], table)
            except SegmentationError as e:
                raise SegmentationError(
                    f"{pron.language} {pron.word!r}: {e.message}", e.offset
                ) from None
            pron = PronEntry(pron.language, pron.word, seq.segments)
        out.append(pron)
    return out


def _ingest(state):
    config = state.config
    strict = config.strict

    def report(path, kind):
        r = IngestReport(str(path), kind)
        state.reports.append(r)
        return r

    state.entries = ingest_lexicon(config.lexicon, strict,
                                   report(config.lexicon, 'lexicon'))
    if config.pronunciations:
        if Path(config.pronunciations).is_dir():
            state.prons = ingest_pronunciation_dir(
                config.pronunciations, strict, reports=state.reports)
        else:
            state.prons = ingest_pronunciations(
                config.pronunciations, strict=strict,
                report=report(config.pronunciations, 'pronunciations'))
    if config.concreteness:
        state.ratings += ingest_ratings(
            config.concreteness, 'concreteness', strict,
            report(config.concreteness, 'concreteness'))
    if config.affect:
        state.ratings += ingest_ratings(
            config.affect, 'affect', strict, report(config.affect, 'affect'),
            affect_range=(config.affect_min, config.affect_max))
    if config.feature_table:
        state.table = ingest_feature_table(
            config.feature_table, strict,
            report(config.feature_table, 'feature_table'))
    if config.languages:
        state.languages = ingest_language_metadata(
            config.languages, strict, report(config.languages, 'languages'))
    if config.resegment:
        state.prons = _resegment(state.prons, state.table)


def _pronunciation_source(config, language):
    path = Path(config.pronunciations)
    if path.is_dir():
        for file in sorted(path.glob('*.tsv')):
            if pronunciation_language(file) == language:
                return str(file)
    return str(path)


def _profiles(state):
    profiles = {}
    for (language, lemma), seq in sorted(state.phonemes.items()):
        try:
            profiles[(language, lemma)] = lemma_profile(
                seq, state.table, state.config.strict)
        except UnknownSegment as e:
            raise UnknownSegment(
                f'{language} {lemma!r} /{seq}/: {e.message} '
                f'({state.config.feature_table})',
                path=_pronunciation_source(state.config, language)
            ) from None
    return profiles


def run_stages(config):
    """Ingest, graph, phonology, ratings and summary, all in memory."""
    state = BuildState(config)
    with _Stage(state, 'ingest'):
        _ingest(state)
    with _Stage(state, 'graph'):
        state.graph = construct_graph(state.entries)
        state.records = derive_concept_graph(
            state.graph, normalize_underscores=config.normalize_underscores)
    with _Stage(state, 'phonology'):
        state.joined = attach_phonemes(
            state.entries, state.prons,
            normalize_underscores=config.normalize_underscores)
        state.phonemes = phoneme_index(state.joined)
        if state.table is not None:
            state.profiles = _profiles(state)
    with _Stage(state, 'ratings'):
        state.ratings_map = attach_ratings(state.records, state.ratings)
        state.dataset = build_dataset(state.records, state.ratings_map,
                                      state.phonemes)
        state.samples = lemma_samples(state.records, state.ratings_map,
                                      state.phonemes)
        state.phoneme_ratings = {
            position: phoneme_level_ratings(state.samples, position)
            for position in POSITIONS}
    with _Stage(state, 'summary'):
        state.summary = summary_stats(state.entries, state.graph,
                                      state.records, state.joined,
                                      state.ratings_map, state.languages)
        state.language_rows = language_counts(state.records, state.joined,
                                              state.languages)
    return state


def _artifacts(state):
    files = {
        export.GRAPH_FILE: export.format_graph(state.records),
        export.DATASET_FILE: export.format_dataset(state.dataset),
        export.PHONOLOGY_FILE: export.format_phonology(state.joined,
                                                       state.profiles),
        export.CONCEPTS_FILE: export.format_concepts(state.ratings_map),
        export.SUMMARY_FILE: export.format_summary(state.summary),
        export.LANGUAGE_COUNTS_FILE: export.format_language_counts(
            state.language_rows),
    }
    if state.languages:
        files[export.LANGUAGES_FILE] = format_language_metadata(
            state.languages)
    for position, ratings in state.phoneme_ratings.items():
        files[f'phoneme_ratings_{position}.tsv'] = \
            export.format_phoneme_ratings(ratings)
    return files


def manifest(state):
    return {
        'version': __version__,
        'config': state.config.to_dict(),
        'inputs': input_digests(state.config),
        'ingest': [r.to_dict() for r in state.reports],
        'counts': state.counts(),
        'wall_clock': dict(state.timings),
    }


def build(config):
    """Run every stage and write the artifacts; on any failure the files
    this run wrote are removed again."""
    config.validate()
    start = time.perf_counter()
    state = run_stages(config)
    out_dir = Path(config.out_dir)
    written = []
    try:
        stale = out_dir / export.LANGUAGES_FILE
        if not state.languages and stale.is_file():
            try:
                stale.unlink()
            except OSError as e:
                raise IoError(e.strerror or str(e), path=str(stale)) from e
            log.info('removed %s left by an earlier build', stale)
        for name, text in _artifacts(state).items():
            written.append(export.write_text(out_dir / name, text))
        written.append(export.write_json(out_dir / export.SUMMARY_JSON,
                                         state.summary.to_dict()))
        state.timings['total'] = round(time.perf_counter() - start, 6)
        written.append(export.write_json(out_dir / export.MANIFEST_FILE,
                                         manifest(state)))
    except BaseException:
        for path in written:
            path.unlink(missing_ok=True)
        raise
    log.info('build finished: %d dataset rows, %d concept pairs',
             len(state.dataset), len(state.records))
    return state


def _load_languages(out_dir):
    path = Path(out_dir) / export.LANGUAGES_FILE
    if not path.is_file():
        raise MissingArtifact('no language metadata in the build, rebuild '
                              'with --languages', path=str(path))
    return ingest_language_metadata(path)


def analyze(config, name, position='initial', rating='concreteness'):
    if name not in ANALYSES:
        raise ConfigError(f'unknown analysis {name!r}')
    if position not in POSITIONS:
        raise ConfigError(f'unknown position {position!r}')
    if rating not in RATING_DIMS:
        raise ConfigError(f'unknown rating dimension {rating!r}')
    config.validate(inputs=False)
    out_dir = Path(config.out_dir)
    records = export.read_graph(out_dir / export.GRAPH_FILE)
    ratings_map = export.read_concepts(out_dir / export.CONCEPTS_FILE)
    options = {'alpha': config.alpha, 'threshold': config.report_threshold}
    if name == 'colex-distance':
        analysis = stats.analyze_colex_distance(
            records, record_distances(records, ratings_map), **options)
    elif name == 'distance-matrix':
        analysis = stats.analyze_distance_matrix(
            record_distances(records, ratings_map), **options)
    else:
        phonemes, profiles = export.read_phonology(
            out_dir / export.PHONOLOGY_FILE)
        languages = _load_languages(out_dir)
        samples = lemma_samples(records, ratings_map, phonemes)
        if name == 'phoneme-position':
            analysis = stats.analyze_phoneme_position(
                samples, languages, rating, position, **options)
        elif name == 'features':
            if not profiles:
                raise MissingArtifact('no feature counts in the build, '
                                      'rebuild with --feature-table')
            analysis = stats.analyze_features(samples, profiles, languages,
                                              rating, **options)
        else:
            analysis = stats.analyze_ttr_len(samples, languages, rating,
                                             **options)
    paths = export.write_report(out_dir, analysis)
    log.info('%s: %d reports, %d reported, %d skipped', analysis.name,
             len(analysis.reports), len(analysis.reported()),
             len(analysis.diagnostics))
    return analysis, paths


def subgraph(config, concept, depth, max_penwidth=8.0, output=None):
    config.validate(inputs=False)
    out_dir = Path(config.out_dir)
    records = export.read_graph(out_dir / export.GRAPH_FILE)
    dot = export_dot(records, concept, depth, max_penwidth=max_penwidth)
    if output is None:
        stem = '_'.join(concept.strip().lower().split())
        output = out_dir / f'subgraph_{stem}_{depth}.dot'
    return dot, export.write_text(output, dot)
