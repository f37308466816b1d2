"""Parsers for every external file the pipeline reads.

All inputs are UTF-8, skip blank lines and lines starting with ``#``, and
report problems with 1-based line numbers. In strict mode the first problem
aborts the file; in lenient mode offending lines are skipped, logged and
collected on the :class:`IngestReport`.
"""
import csv
import io
import logging
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

from app.exceptions import ColexError, IoError, ParseError, \
    MalformedSynsetId, EmptyPronunciation, RangeError, DuplicateConcept, \
    WrongColumnCount, InvalidFeatureValue, DuplicateLanguageCode
from app.models import POS_TAGS, FEATURE_NAMES, SynsetId, LexEntry, \
    LanguageInfo, PronEntry, RatingRecord, FeatureTable

log = logging.getLogger(__name__)

CONCRETENESS_RANGE = (1.0, 5.0)
DEFAULT_AFFECT_RANGE = (1.0, 9.0)
FEATURE_VALUES = {'+': 1, '-': -1, '0': 0}
FEATURE_SYMBOLS = {v: k for k, v in FEATURE_VALUES.items()}
LANGUAGES_HEADER = ('code', 'family', 'macroarea')

_SENSE_NUMBER = re.compile(r'[1-9][0-9]*')


@dataclass
class IngestReport:
    path: str
    kind: str
    lines: int = 0
    records: int = 0
    duplicates: int = 0
    errors: list = field(default_factory=list)

    def to_dict(self):
        return {'path': self.path, 'kind': self.kind, 'lines': self.lines,
                'records': self.records, 'duplicates': self.duplicates,
                'errors': [e.to_dict() for e in self.errors]}


class _Collector:
    def __init__(self, path, kind, strict, report):
        self.path = str(path)
        self.strict = strict
        self.report = report if report is not None else IngestReport(
            self.path, kind)

    def fail(self, exc, line):
        exc.at(path=self.path, line=line)
        if self.strict:
            raise exc
        self.report.errors.append(exc)
        log.warning('skipping line: %s', exc)

    def finish(self, records):
        self.report.records = len(records)
        log.info('%s: %d lines, %d records, %d duplicates, %d skipped',
                 self.path, self.report.lines, self.report.records,
                 self.report.duplicates, len(self.report.errors))
        return records


def normalize_form(text, underscores=False):
    """NFC-normalize and trim a lemma or word; optionally read underscores
    as spaces (multiword lemmas)."""
    text = unicodedata.normalize('NFC', text).strip()
    if underscores:
        text = ' '.join(text.replace('_', ' ').split())
    return text


def _content_lines(path):
    try:
        with open(path, encoding='utf-8', newline='') as f:
            raw = f.read()
    except FileNotFoundError as e:
        raise IoError('no such file', path=str(path)) from e
    except UnicodeDecodeError as e:
        raise IoError(f'not valid UTF-8 ({e.reason})', path=str(path)) from e
    except OSError as e:
        raise IoError(e.strerror or str(e), path=str(path)) from e
    for number, line in enumerate(raw.split('\n'), start=1):
        line = line.rstrip('\r')
        if not line.strip() or line.startswith('#'):
            continue
        yield number, line


def _csv_cells(line):
    return next(csv.reader([line]))


def _dedup(items, report):
    seen = set()
    unique = []
    for item in items:
        if item in seen:
            report.duplicates += 1
            continue
        seen.add(item)
        unique.append(item)
    return unique


def parse_synset_id(text):
    """Parse ``word#pos#k``; the result formats back to exactly ``text``."""
    parts = text.split('#')
    if len(parts) != 3:
        raise MalformedSynsetId(
            f'expected word#pos#sense, got {text!r}')
    word, pos, number = parts
    if not word or any(ch.isspace() for ch in word):
        raise MalformedSynsetId(f'bad sense word in {text!r}')
    if pos not in POS_TAGS:
        raise MalformedSynsetId(f'unknown part-of-speech tag {pos!r}')
    if not _SENSE_NUMBER.fullmatch(number):
        raise MalformedSynsetId(f'bad sense number {number!r}')
    return SynsetId(word, pos, int(number))


def ingest_lexicon(path, strict=True, report=None):
    collector = _Collector(path, 'lexicon', strict, report)
    entries = []
    for number, line in _content_lines(path):
        collector.report.lines += 1
        fields = line.split('\t')
        if len(fields) != 3:
            collector.fail(ParseError(
                f'expected 3 tab-separated fields, got {len(fields)}'),
                number)
            continue
        if [f.strip() for f in fields] == ['language', 'lemma', 'synset_id']:
            continue
        language, lemma, synset = (f.strip() for f in fields)
        lemma = normalize_form(lemma)
        if not language or not lemma:
            collector.fail(ParseError('empty language or lemma'), number)
            continue
        try:
            entries.append(LexEntry(language, lemma, parse_synset_id(synset)))
        except ColexError as e:
            collector.fail(e, number)
    return collector.finish(_dedup(entries, collector.report))


def _segments(pronunciation, number, collector):
    segments = [unicodedata.normalize('NFC', s)
                for s in pronunciation.split(' ') if s]
    for segment in segments:
        if any(ch.isspace() for ch in segment):
            collector.fail(ParseError(
                f'segment {segment!r} contains whitespace'), number)
            return None
    return tuple(segments)


def ingest_pronunciations(path, language=None, strict=True, report=None):
    """Read a WikiPron-style TSV: ``word<TAB>p r o n``, or the 3-column
    variant with a leading language column."""
    collector = _Collector(path, 'pronunciations', strict, report)
    entries = []
    for number, line in _content_lines(path):
        collector.report.lines += 1
        fields = line.split('\t')
        if len(fields) == 3:
            lang, word, pronunciation = fields
            lang = lang.strip()
        elif len(fields) == 2 and language is not None:
            lang = language
            word, pronunciation = fields
        else:
            collector.fail(ParseError(
                f'expected 2 or 3 tab-separated fields, got {len(fields)}'
                if language is not None else
                'expected 3 tab-separated fields (no language given)'),
                number)
            continue
        word = normalize_form(word)
        pronunciation = pronunciation.strip()
        if not word or not lang:
            collector.fail(ParseError('empty word or language'), number)
            continue
        if not pronunciation:
            collector.fail(EmptyPronunciation(
                f'empty pronunciation for {word!r}'), number)
            continue
        segments = _segments(pronunciation, number, collector)
        if segments is not None:
            entries.append(PronEntry(lang, word, segments))
    return collector.finish(_dedup(entries, collector.report))


def pronunciation_language(path):
    """``fa.tsv`` and ``fa_broad.tsv`` both hold language ``fa``."""
    return Path(path).stem.split('_', 1)[0]


def ingest_pronunciation_dir(path, strict=True, reports=None):
    directory = Path(path)
    if not directory.is_dir():
        raise IoError('not a directory', path=str(directory))
    entries = []
    for file in sorted(directory.glob('*.tsv')):
        report = IngestReport(str(file), 'pronunciations')
        entries.extend(ingest_pronunciations(
            file, language=pronunciation_language(file), strict=strict,
            report=report))
        if reports is not None:
            reports.append(report)
    return entries


def _rating_value(cell, bounds, column):
    cell = cell.strip()
    if not cell:
        return None
    try:
        value = float(cell)
    except ValueError:
        raise ParseError(f'{column}: {cell!r} is not a number') from None
    low, high = bounds
    if not low <= value <= high:
        raise RangeError(f'{column}: {value} outside [{low:g}, {high:g}]',
                         column=column)
    return value


def _is_header(cells, names):
    return tuple(c.strip().lower() for c in cells) == tuple(names)


def ingest_ratings(path, kind, strict=True, report=None,
                   affect_range=DEFAULT_AFFECT_RANGE):
    """Read a norms CSV.

    ``kind='concreteness'`` expects ``word,conc_mean``; ``kind='affect'``
    expects ``word,valence_mean,arousal_mean,dominance_mean``.
    """
    if kind == 'concreteness':
        columns = ('conc_mean',)
        dims = ('concreteness',)
        bounds = (CONCRETENESS_RANGE,)
    elif kind == 'affect':
        columns = ('valence_mean', 'arousal_mean', 'dominance_mean')
        dims = ('valence', 'arousal', 'dominance')
        bounds = (tuple(affect_range),) * 3
    else:
        raise ValueError(f'unknown ratings kind {kind!r}')
    collector = _Collector(path, kind, strict, report)
    records = []
    seen = set()
    for index, (number, line) in enumerate(_content_lines(path)):
        collector.report.lines += 1
        cells = _csv_cells(line)
        if index == 0 and _is_header(cells, ('word',) + columns):
            continue
        if len(cells) != 1 + len(columns):
            collector.fail(WrongColumnCount(
                f'expected {1 + len(columns)} columns, got {len(cells)}'),
                number)
            continue
        concept = normalize_form(cells[0]).lower()
        if not concept:
            collector.fail(ParseError('empty word'), number)
            continue
        try:
            values = [_rating_value(cell, b, column)
                      for cell, b, column in zip(cells[1:], bounds, columns)]
        except ColexError as e:
            collector.fail(e, number)
            continue
        if all(v is None for v in values):
            collector.fail(ParseError(f'no rating given for {concept!r}'),
                           number)
            continue
        if concept in seen:
            collector.fail(DuplicateConcept(
                f'{concept!r} rated more than once'), number)
            continue
        seen.add(concept)
        records.append(RatingRecord(concept, **dict(zip(dims, values))))
    return collector.finish(records)


def ingest_feature_table(path, strict=True, report=None):
    """Read a PanPhon-style segment table: a segment column followed by the
    24 feature columns, cells ``+``, ``-`` or ``0``."""
    collector = _Collector(path, 'feature_table', strict, report)
    rows = {}
    order = None
    for number, line in _content_lines(path):
        collector.report.lines += 1
        cells = [c.strip() for c in _csv_cells(line)]
        if order is None:
            names = cells[1:]
            if len(names) != len(FEATURE_NAMES):
                raise WrongColumnCount(
                    f'header names {len(names)} features, expected '
                    f'{len(FEATURE_NAMES)}', path=collector.path,
                    line=number)
            if set(names) != set(FEATURE_NAMES):
                unknown = sorted(set(names) - set(FEATURE_NAMES))
                raise ParseError(f'unknown feature columns {unknown}',
                                 path=collector.path, line=number)
            order = [names.index(name) for name in FEATURE_NAMES]
            continue
        if len(cells) != len(FEATURE_NAMES) + 1:
            collector.fail(WrongColumnCount(
                f'expected {len(FEATURE_NAMES) + 1} columns, '
                f'got {len(cells)}'), number)
            continue
        segment = unicodedata.normalize('NFC', cells[0])
        raw = cells[1:]
        values = []
        for name, index in zip(FEATURE_NAMES, order):
            value = FEATURE_VALUES.get(raw[index])
            if value is None:
                collector.fail(InvalidFeatureValue(
                    f'segment {segment!r}, feature {name}: {raw[index]!r}'),
                    number)
                break
            values.append(value)
        else:
            if not segment:
                collector.fail(ParseError('empty segment'), number)
            elif segment in rows:
                collector.fail(ParseError(
                    f'segment {segment!r} listed twice'), number)
            else:
                rows[segment] = tuple(values)
    if order is None:
        raise WrongColumnCount('missing header row', path=collector.path)
    collector.finish(list(rows))
    return FeatureTable(FEATURE_NAMES, rows)


def ingest_language_metadata(path, strict=True, report=None):
    collector = _Collector(path, 'languages', strict, report)
    infos = []
    codes = set()
    for index, (number, line) in enumerate(_content_lines(path)):
        collector.report.lines += 1
        cells = [c.strip() for c in _csv_cells(line)]
        if index == 0 and _is_header(
                cells, LANGUAGES_HEADER[:max(len(cells), 2)]):
            continue
        if len(cells) not in (2, 3):
            collector.fail(WrongColumnCount(
                f'expected 3 columns, got {len(cells)}'), number)
            continue
        code, family = cells[0], cells[1]
        macroarea = cells[2] if len(cells) == 3 and cells[2] else None
        if not code or not family:
            collector.fail(ParseError('empty code or family'), number)
            continue
        if code in codes:
            collector.fail(DuplicateLanguageCode(
                f'language {code!r} listed twice'), number)
            continue
        codes.add(code)
        infos.append(LanguageInfo(code, family, macroarea))
    return collector.finish(infos)


def _write_csv(rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerows(rows)
    return buffer.getvalue()


def _number(value):
    return '' if value is None else repr(value)


def format_lexicon(entries):
    return ''.join(f'{e.language}\t{e.lemma}\t{e.synset}\n' for e in entries)


def format_pronunciations(entries):
    return ''.join(f'{e.language}\t{e.word}\t{" ".join(e.segments)}\n'
                   for e in entries)


def format_ratings(records, kind):
    if kind == 'concreteness':
        rows = [('word', 'conc_mean')]
        rows += [(r.concept, _number(r.concreteness)) for r in records]
    else:
        rows = [('word', 'valence_mean', 'arousal_mean', 'dominance_mean')]
        rows += [(r.concept, _number(r.valence), _number(r.arousal),
                  _number(r.dominance)) for r in records]
    return _write_csv(rows)


def format_feature_table(table):
    rows = [('segment',) + tuple(table.feature_names)]
    for segment, values in table.rows.items():
        rows.append((segment,) + tuple(FEATURE_SYMBOLS[v] for v in values))
    return _write_csv(rows)


def format_language_metadata(infos):
    rows = [LANGUAGES_HEADER]
    rows += [(i.code, i.family, i.macroarea or '') for i in infos]
    return _write_csv(rows)
