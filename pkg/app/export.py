"""Artifact writers and readers.

Everything under the output directory is UTF-8 with LF line endings. Floats
in the dataset and phoneme-rating tables carry 4 decimals rounded
half-to-even; report TSVs carry r to 6 decimals and p in scientific
notation; JSON files are written with sorted keys so reruns are
byte-identical.
"""
import csv
import io
import json
import logging
from decimal import Decimal, ROUND_HALF_EVEN
from pathlib import Path

from app.exceptions import IoError, MissingArtifact, ParseError
from app.ingest import parse_synset_id
from app.models import FEATURE_NAMES, RATING_DIMS, Concept, \
    ConceptPairRecord, ConceptRatings, PhonemeSeq, LemmaFeatureProfile

log = logging.getLogger(__name__)

ABSENT = '-'
GRAPH_FILE = 'graph.tsv'
DATASET_FILE = 'dataset.tsv'
PHONOLOGY_FILE = 'phonology.tsv'
CONCEPTS_FILE = 'concepts.tsv'
LANGUAGES_FILE = 'languages.csv'
SUMMARY_FILE = 'summary.tsv'
SUMMARY_JSON = 'summary.json'
LANGUAGE_COUNTS_FILE = 'language_counts.tsv'
MANIFEST_FILE = 'manifest.json'
REPORTS_DIR = 'reports'

DATASET_HEADER = ('Sense Lemma', 'Language', 'Phonemes', 'Synset 1',
                  'Synset 2', 'Concept 1', 'Concept 2', 'Conc.Dist',
                  'V.Dist', 'A.Dist', 'D.Dist')
GRAPH_HEADER = ('concept_1', 'concept_2', 'n_colex', 'n_lemmas',
                'n_languages', 'witnesses', 'synset_1', 'synset_2')
PHONOLOGY_HEADER = ('language', 'lemma', 'segments', 'seg_len', 'ttr',
                    'initial', 'last') + FEATURE_NAMES
CONCEPTS_HEADER = ('concept', 'pos') + RATING_DIMS
PHONEME_RATINGS_HEADER = ('phoneme', 'language', 'position') + tuple(
    f'mean_{dim}' for dim in RATING_DIMS) + ('n',)
REPORT_HEADER = ('family', 'variable_x', 'variable_y', 'n', 'r', 'p',
                 'divisor', 'significant', 'reported')

_FOUR_PLACES = Decimal('0.0001')


def fixed4(value):
    if value is None:
        return ABSENT
    return str(Decimal(str(value)).quantize(_FOUR_PLACES,
                                            rounding=ROUND_HALF_EVEN))


def _exact(value):
    return ABSENT if value is None else repr(value)


def _optional_float(cell):
    return None if cell == ABSENT else float(cell)


def tsv(rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, delimiter='\t', lineterminator='\n',
                        quoting=csv.QUOTE_NONE, escapechar='\\')
    writer.writerows(rows)
    return buffer.getvalue()


def write_text(path, text):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
    except OSError as e:
        raise IoError(e.strerror or str(e), path=str(path)) from e
    log.info('wrote %s', path)
    return path


def write_json(path, data):
    return write_text(path, json.dumps(data, indent=2, sort_keys=True,
                                       ensure_ascii=False) + '\n')


def _read_rows(path, header):
    path = Path(path)
    if not path.is_file():
        raise MissingArtifact(f'{path.name} not found, run "flask build" '
                              f'first', path=str(path))
    try:
        with open(path, encoding='utf-8', newline='') as f:
            rows = list(csv.reader(f, delimiter='\t', quoting=csv.QUOTE_NONE,
                                   escapechar='\\'))
    except (OSError, UnicodeDecodeError) as e:
        raise IoError(str(e), path=str(path)) from e
    except csv.Error as e:
        raise ParseError(str(e), path=str(path)) from None
    if not rows or tuple(rows[0]) != tuple(header):
        raise ParseError('unexpected header', path=str(path), line=1)
    return rows[1:]


def read_json(path):
    path = Path(path)
    if not path.is_file():
        raise MissingArtifact(f'{path.name} not found', path=str(path))
    try:
        with open(path, encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path=str(path), line=e.lineno) from None
    except (OSError, UnicodeDecodeError) as e:
        raise IoError(str(e), path=str(path)) from e


def format_dataset(rows):
    lines = [DATASET_HEADER]
    for row in rows:
        lines.append((row.lemma, row.language,
                      ABSENT if row.phonemes is None else str(row.phonemes),
                      str(row.synset1), str(row.synset2),
                      str(row.concept1), str(row.concept2))
                     + tuple(fixed4(v) for v in row.distances.values()))
    return tsv(lines)


def format_graph(records):
    lines = [GRAPH_HEADER]
    for r in records:
        lines.append((str(r.concept1), str(r.concept2), r.n_colex,
                      r.n_lemmas, r.n_languages,
                      ';'.join(r.sorted_witnesses()), str(r.synset1),
                      str(r.synset2)))
    return tsv(lines)


def read_graph(path):
    records = []
    for number, row in enumerate(_read_rows(path, GRAPH_HEADER), start=2):
        try:
            s1, s2 = parse_synset_id(row[6]), parse_synset_id(row[7])
            witnesses = frozenset(
                tuple(w.rsplit(':', 1)) for w in row[5].split(';'))
        except (IndexError, ValueError, ParseError) as e:
            raise ParseError(f'bad graph row: {e}', path=str(path),
                             line=number)
        records.append(ConceptPairRecord(
            Concept(row[0], s1.pos), Concept(row[1], s2.pos), s1, s2,
            witnesses))
    return records


def format_phonology(joined, profiles):
    """One row per distinct (language, lemma) with phonemes; the count
    columns are "-" when no feature table was given."""
    lines = [PHONOLOGY_HEADER]
    seen = set()
    for entry, seq in sorted(((e, p) for e, p in joined if p is not None),
                             key=lambda item: (item[0].language,
                                               item[0].lemma)):
        key = (entry.language, entry.lemma)
        if key in seen:
            continue
        seen.add(key)
        profile = profiles.get(key)
        counts = profile.counts if profile else (ABSENT,) * len(FEATURE_NAMES)
        distinct = len(set(seq.segments))
        lines.append((entry.language, entry.lemma, str(seq), len(seq),
                      repr(distinct / len(seq)), seq.initial(), seq.last())
                     + tuple(counts))
    return tsv(lines)


def read_phonology(path):
    """Returns ((language, lemma) -> PhonemeSeq, (language, lemma) ->
    LemmaFeatureProfile)."""
    phonemes, profiles = {}, {}
    for number, row in enumerate(_read_rows(path, PHONOLOGY_HEADER),
                                 start=2):
        if len(row) != len(PHONOLOGY_HEADER):
            raise ParseError('wrong column count', path=str(path),
                             line=number)
        key = (row[0], row[1])
        try:
            phonemes[key] = PhonemeSeq(tuple(row[2].split(' ')))
            if row[7] != ABSENT:
                profiles[key] = LemmaFeatureProfile(
                    tuple(int(c) for c in row[7:]))
        except ValueError as e:
            raise ParseError(f'bad phonology row: {e}', path=str(path),
                             line=number) from None
    return phonemes, profiles


def format_concepts(ratings_map):
    lines = [CONCEPTS_HEADER]
    for concept, ratings in sorted(ratings_map.items()):
        lines.append((concept.word, concept.pos)
                     + tuple(_exact(ratings.get(d)) for d in RATING_DIMS))
    return tsv(lines)


def read_concepts(path):
    ratings_map = {}
    for number, row in enumerate(_read_rows(path, CONCEPTS_HEADER),
                                 start=2):
        if len(row) != len(CONCEPTS_HEADER):
            raise ParseError('wrong column count', path=str(path),
                             line=number)
        concept = Concept(row[0], row[1])
        try:
            values = [_optional_float(c) for c in row[2:]]
        except ValueError as e:
            raise ParseError(f'bad rating: {e}', path=str(path),
                             line=number) from None
        ratings_map[concept] = ConceptRatings(concept, *values)
    return ratings_map


def format_summary(summary):
    return tsv([('statistic', 'value')] + list(summary.to_dict().items()))


def format_language_counts(rows):
    lines = [('language', 'family', 'macroarea', 'n_concepts', 'n_lemmas',
              'n_phoneme_lemmas')]
    for r in rows:
        lines.append((r.language, r.family or ABSENT, r.macroarea or ABSENT,
                      r.n_concepts, r.n_lemmas, r.n_phoneme_lemmas))
    return tsv(lines)


def format_phoneme_ratings(ratings):
    lines = [PHONEME_RATINGS_HEADER]
    for r in ratings:
        lines.append((r.phoneme, r.language, r.position)
                     + tuple(fixed4(r.mean(d)) for d in RATING_DIMS)
                     + (r.n,))
    return tsv(lines)


def report_stem(name):
    return name.replace(':', '_')


def format_report(analysis):
    lines = [REPORT_HEADER]
    for report in analysis.reports:
        lines.append((report.group, report.variable_x, report.variable_y,
                      report.result.n, f'{report.result.r:.6f}',
                      f'{report.result.p:.5e}', report.divisor,
                      str(report.significant).lower(),
                      str(report.reported).lower()))
    return tsv(lines)


def write_report(out_dir, analysis):
    """Writes ``reports/<name>.tsv`` and ``reports/<name>.json``."""
    stem = Path(out_dir) / REPORTS_DIR / report_stem(analysis.name)
    tsv_path = write_text(stem.with_suffix('.tsv'), format_report(analysis))
    json_path = write_json(stem.with_suffix('.json'), analysis.to_dict())
    return tsv_path, json_path
