import logging

from app.exceptions import UnknownSegment, SegmentationError
from app.ingest import normalize_form
from app.models import FEATURE_NAMES, PhonemeSeq, SegmentFeatures, \
    LemmaFeatureProfile, PhonoMetrics

log = logging.getLogger(__name__)

_ZERO = SegmentFeatures((0,) * len(FEATURE_NAMES))


def attach_phonemes(entries, prons, normalize_underscores=False):
    """Join lexicon entries to pronunciations on (language, normalized form).

    Entries without a pronunciation come back with ``None``. When a word
    has several pronunciations the first one in file order wins.
    """
    index = {}
    for pron in prons:
        key = (pron.language,
               normalize_form(pron.word, underscores=normalize_underscores))
        if key in index:
            if index[key].segments != pron.segments:
                log.warning('%s %r: keeping pronunciation /%s/, ignoring '
                            '/%s/', key[0], key[1], ' '.join(index[key]),
                            ' '.join(pron.segments))
            continue
        index[key] = PhonemeSeq(pron.segments)
    joined = []
    for entry in entries:
        key = (entry.language,
               normalize_form(entry.lemma, underscores=normalize_underscores))
        joined.append((entry, index.get(key)))
    return joined


def features_of(segment, table, strict=True):
    features = table.get(segment)
    if features is not None:
        return features
    if strict:
        raise UnknownSegment(f'segment {segment!r} is not in the feature '
                             f'table')
    log.warning('segment %r is not in the feature table, using zeros',
                segment)
    return _ZERO


def lemma_profile(seq, table, strict=True):
    """Per feature, the number of segments carrying the value +1."""
    counts = [0] * len(FEATURE_NAMES)
    for segment in seq:
        for i, value in enumerate(features_of(segment, table, strict).values):
            if value == 1:
                counts[i] += 1
    return LemmaFeatureProfile(tuple(counts))


def metrics_of(seq):
    distinct = len(set(seq.segments))
    return PhonoMetrics(distinct / len(seq), len(seq), distinct)


def segment_fallback(raw, table):
    """Tile an unsegmented IPA string with the table's segments, taking the
    longest match at each position from the left."""
    if not raw:
        raise ValueError('nothing to segment')
    longest = table.max_segment_length
    segments = []
    i = 0
    while i < len(raw):
        for size in range(min(longest, len(raw) - i), 0, -1):
            candidate = raw[i:i + size]
            if candidate in table:
                segments.append(candidate)
                i += size
                break
        else:
            offset = len(raw[:i].encode('utf-8'))
            raise SegmentationError(
                f'no segment matches {raw[i:]!r} at byte {offset}', offset)
    return PhonemeSeq(tuple(segments))


def phoneme_index(joined):
    """(language, lemma) -> PhonemeSeq for the joined entries that have
    one."""
    return {(entry.language, entry.lemma): phonemes
            for entry, phonemes in joined if phonemes is not None}
