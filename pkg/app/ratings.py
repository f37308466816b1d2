import logging
import math
from collections import defaultdict

from app.models import RATING_DIMS, DISTANCE_NAMES, ConceptRatings, \
    PairDistances, ColexRecord, LemmaSample, PhonemeRating

log = logging.getLogger(__name__)


def attach_ratings(records, ratings):
    """Give every concept of the concept graph the ratings its sense word
    has in the norm lists. POS is ignored: norms are keyed by word."""
    by_word = defaultdict(dict)
    for record in ratings:
        for dim in RATING_DIMS:
            value = record.get(dim)
            if value is not None:
                by_word[record.concept].setdefault(dim, value)
    concepts = sorted({c for r in records for c in (r.concept1, r.concept2)})
    ratings_map = {c: ConceptRatings(c, **by_word.get(c.word, {}))
                   for c in concepts}
    log.info('ratings attached: %d of %d concepts rated',
             sum(1 for r in ratings_map.values() if r.is_rated),
             len(ratings_map))
    return ratings_map


def pair_distances(r1, r2):
    distances = {}
    for dim, name in zip(RATING_DIMS, DISTANCE_NAMES):
        a, b = r1.get(dim), r2.get(dim)
        distances[name] = None if a is None or b is None else abs(a - b)
    return PairDistances(**distances)


def _ratings_for(ratings_map, concept):
    return ratings_map.get(concept) or ConceptRatings(concept)


def record_distances(records, ratings_map):
    """Distances for each concept pair, in record order."""
    return [pair_distances(_ratings_for(ratings_map, r.concept1),
                           _ratings_for(ratings_map, r.concept2))
            for r in records]


def build_dataset(records, ratings_map, phonemes):
    """One row per (concept pair, witness), sorted by concepts, language
    and lemma; ``phonemes`` maps (language, lemma) to a PhonemeSeq."""
    rows = []
    for record, distances in zip(records,
                                 record_distances(records, ratings_map)):
        for lemma, language in record.witnesses:
            rows.append(ColexRecord(
                lemma, language, phonemes.get((language, lemma)),
                record.synset1, record.synset2, record.concept1,
                record.concept2, distances))
    rows.sort(key=lambda row: row.sort_key)
    return rows


def lemma_samples(records, ratings_map, phonemes):
    """Distinct (language, lemma, concept) triples of the concept graph
    whose lemma has phonemes and whose concept carries any rating."""
    samples = {}
    for record in records:
        for lemma, language in record.witnesses:
            seq = phonemes.get((language, lemma))
            if seq is None:
                continue
            for concept in (record.concept1, record.concept2):
                ratings = ratings_map.get(concept)
                if ratings is None or not ratings.is_rated:
                    continue
                sample = LemmaSample(language, lemma, concept, seq, ratings)
                samples.setdefault(sample.key, sample)
    return [samples[key] for key in sorted(samples)]


def _mean(values):
    return math.fsum(values) / len(values) if values else None


def phoneme_level_ratings(samples, position):
    """Average concept ratings per (phoneme at ``position``, language).
    Each concept counts once per group however many lemmas bring it in."""
    groups = defaultdict(dict)
    for sample in samples:
        key = (sample.phonemes.at(position), sample.language)
        groups[key].setdefault(sample.concept, sample.ratings)
    out = []
    for (phoneme, language), concepts in sorted(groups.items()):
        means = {}
        for dim in RATING_DIMS:
            values = [r.get(dim) for r in concepts.values()
                      if r.get(dim) is not None]
            means[f'mean_{dim}'] = _mean(values)
        out.append(PhonemeRating(phoneme, language, position,
                                 n=len(concepts), **means))
    return out
