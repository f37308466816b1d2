"""Pearson correlation with two-sided p-values, Bonferroni correction and
the grouped analyses run over the built dataset.

The p-value of a correlation r over n samples is the two-sided Student t
tail with n - 2 degrees of freedom, evaluated as the regularized incomplete
beta function I_{1-r^2}((n-2)/2, 1/2). The incomplete beta uses the
continued fraction expansion (modified Lentz), iterating until successive
convergents agree to ``BETACF_EPSILON`` or failing after
``BETACF_MAX_ITERATIONS`` steps.
"""
import logging
import math
from collections import defaultdict
from dataclasses import replace

import numpy as np

from app.exceptions import StatsError, LengthMismatch, \
    TooFewSamples, ZeroVariance, DegenerateIndicator
from app.models import FEATURE_NAMES, DISTANCE_NAMES, COUNT_NAMES, \
    CorrelationResult, CorrelationReport, Diagnostic, GroupInfo, Analysis
from app.phonology import metrics_of

log = logging.getLogger(__name__)

BETACF_MAX_ITERATIONS = 10_000
BETACF_EPSILON = 1e-15
_TINY = 1e-300

ALL = 'ALL'


def _betacf(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, BETACF_MAX_ITERATIONS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < BETACF_EPSILON:
            return h
    raise StatsError(f'incomplete beta did not converge for a={a}, b={b}, '
                     f'x={x} in {BETACF_MAX_ITERATIONS} iterations')


def betainc(a, b, x):
    """Regularized incomplete beta function I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f'x={x} outside [0, 1]')
    if x == 0.0 or x == 1.0:
        return float(x)
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _betacf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _betacf(b, a, 1.0 - x) / b


def pearson_pvalue(r, n):
    """Two-sided p-value of a Pearson coefficient ``r`` over ``n`` samples."""
    if n < 3:
        raise TooFewSamples(f'{n} samples, at least 3 needed')
    if abs(r) >= 1.0:
        return 0.0
    p = betainc((n - 2) / 2.0, 0.5, (1.0 - r) * (1.0 + r))
    return min(max(p, 0.0), 1.0)


def pearson_r(xs, ys):
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise LengthMismatch(f'{x.size} x values against {y.size} y values')
    n = len(x)
    if n < 3:
        raise TooFewSamples(f'{n} samples, at least 3 needed')
    if x.min() == x.max() or y.min() == y.max():
        raise ZeroVariance('constant input')
    dx = x - math.fsum(x) / n
    dy = y - math.fsum(y) / n
    sxy = math.fsum(dx * dy)
    r = sxy / math.sqrt(math.fsum(dx * dx) * math.fsum(dy * dy))
    r = min(max(r, -1.0), 1.0)
    return CorrelationResult(r, pearson_pvalue(r, n), n)


def point_biserial(indicator, ys):
    flags = np.asarray(indicator, dtype=bool)
    if len(flags) < 3:
        raise TooFewSamples(f'{len(flags)} samples, at least 3 needed')
    if flags.all() or not flags.any():
        raise DegenerateIndicator('indicator takes a single value')
    return pearson_r(flags.astype(float), ys)


def bonferroni(reports, alpha, divisor):
    """Mark each report significant when p < alpha / divisor."""
    if divisor < 1:
        raise ValueError('divisor must be at least 1')
    if not 0.0 < alpha < 1.0:
        raise ValueError('alpha must lie in (0, 1)')
    threshold = alpha / divisor
    return [replace(r, alpha=alpha, divisor=divisor,
                    significant=r.result.p < threshold) for r in reports]


class _Runner:
    """Collects reports and skipped cells for one analysis."""

    def __init__(self, name, alpha, threshold):
        self.analysis = Analysis(name)
        self.alpha = alpha
        self.threshold = threshold

    def correlate(self, group, x_name, y_name, xs, ys, divisor=1,
                  method=pearson_r):
        try:
            result = method(xs, ys)
        except StatsError as e:
            self.analysis.diagnostics.append(
                Diagnostic(group, x_name, y_name, f'{e.code}: {e.message}'))
            return None
        report = CorrelationReport(group, x_name, y_name, result,
                                   threshold=self.threshold)
        report = bonferroni([report], self.alpha, divisor)[0]
        self.analysis.reports.append(report)
        return report

    def skip(self, group, x_name, y_name, reason):
        self.analysis.diagnostics.append(
            Diagnostic(group, x_name, y_name, reason))


def analyze_colex_distance(records, distances, alpha=0.05, threshold=0.1):
    """Correlate each colexification count of a concept pair with each
    rating distance, one sample per concept pair."""
    runner = _Runner('colex-distance', alpha, threshold)
    languages = {lang for r in records for _, lang in r.witnesses}
    runner.analysis.groups.append(GroupInfo(ALL, len(languages),
                                            len(records)))
    for count in COUNT_NAMES:
        for name in DISTANCE_NAMES:
            pairs = [(record.count(count), d.get(name))
                     for record, d in zip(records, distances)
                     if d.get(name) is not None]
            runner.correlate(ALL, count, name, [p[0] for p in pairs],
                             [p[1] for p in pairs])
    return runner.analysis


def analyze_distance_matrix(distances, alpha=0.05, threshold=0.1):
    """Pairwise correlations among the four rating distances; each cell uses
    the pairs where both distances are present."""
    runner = _Runner('distance-matrix', alpha, threshold)
    size = len(DISTANCE_NAMES)
    cells = [[None] * size for _ in range(size)]
    for i, a in enumerate(DISTANCE_NAMES):
        for j in range(i, size):
            b = DISTANCE_NAMES[j]
            pairs = [(d.get(a), d.get(b)) for d in distances
                     if d.get(a) is not None and d.get(b) is not None]
            if i == j:
                if len(pairs) < 3:
                    runner.skip(ALL, a, b, f'too_few_samples: {len(pairs)}')
                    continue
                cells[i][j] = CorrelationResult(1.0, 0.0, len(pairs))
                continue
            try:
                cells[i][j] = cells[j][i] = pearson_r(
                    [p[0] for p in pairs], [p[1] for p in pairs])
            except StatsError as e:
                runner.skip(ALL, a, b, f'{e.code}: {e.message}')
    for i, a in enumerate(DISTANCE_NAMES):
        for j, b in enumerate(DISTANCE_NAMES):
            if cells[i][j] is not None:
                report = CorrelationReport(ALL, a, b, cells[i][j],
                                           threshold=threshold)
                runner.analysis.reports.extend(
                    bonferroni([report], alpha, 1))
    runner.analysis.groups.append(GroupInfo(ALL, 0, len(distances)))
    runner.analysis.matrix = [[None if c is None else c.r for c in row]
                              for row in cells]
    return runner.analysis


def _by_family(samples, languages, rating_dim, runner):
    family_of = {info.code: info.family for info in languages}
    families = defaultdict(list)
    unknown = set()
    for sample in samples:
        if sample.ratings.get(rating_dim) is None:
            continue
        family = family_of.get(sample.language)
        if family is None:
            unknown.add(sample.language)
            continue
        families[family].append(sample)
    for code in sorted(unknown):
        log.warning('language %r has no metadata, its samples are left out',
                    code)
        runner.skip(code, '-', rating_dim, 'unknown language code')
    return {family: sorted(group, key=lambda s: s.key)
            for family, group in sorted(families.items())}


def analyze_phoneme_position(samples, languages, rating_dim='concreteness',
                             position='initial', alpha=0.05, threshold=0.1):
    """Per family and per phoneme seen at ``position``: point-biserial
    correlation between "lemma has this phoneme there" and the rating.
    The Bonferroni divisor is the number of languages in the family."""
    runner = _Runner(f'phoneme-position:{position}:{rating_dim}', alpha,
                     threshold)
    for family, group in _by_family(samples, languages, rating_dim,
                                    runner).items():
        divisor = len({s.language for s in group})
        ys = [s.ratings.get(rating_dim) for s in group]
        observed = [s.phonemes.at(position) for s in group]
        inventory = sorted(set(observed))
        runner.analysis.groups.append(
            GroupInfo(family, divisor, len(group), len(inventory)))
        for phoneme in inventory:
            runner.correlate(family, f'{position}:{phoneme}', rating_dim,
                             [o == phoneme for o in observed], ys,
                             divisor=divisor, method=point_biserial)
    return runner.analysis


def analyze_features(samples, profiles, languages,
                     rating_dim='concreteness', alpha=0.05, threshold=0.1):
    """Per family and per articulatory feature: correlation between how
    many segments of a lemma carry the feature and the rating."""
    runner = _Runner(f'features:{rating_dim}', alpha, threshold)
    for family, group in _by_family(samples, languages, rating_dim,
                                    runner).items():
        group = [s for s in group if (s.language, s.lemma) in profiles]
        divisor = len({s.language for s in group})
        runner.analysis.groups.append(GroupInfo(family, divisor, len(group)))
        ys = [s.ratings.get(rating_dim) for s in group]
        counts = [profiles[(s.language, s.lemma)].counts for s in group]
        for i, feature in enumerate(FEATURE_NAMES):
            runner.correlate(family, feature, rating_dim,
                             [c[i] for c in counts], ys, divisor=divisor)
    return runner.analysis


def analyze_ttr_len(samples, languages, rating_dim='concreteness',
                    alpha=0.05, threshold=0.1):
    runner = _Runner(f'ttr-len:{rating_dim}', alpha, threshold)
    for family, group in _by_family(samples, languages, rating_dim,
                                    runner).items():
        divisor = len({s.language for s in group})
        runner.analysis.groups.append(GroupInfo(family, divisor, len(group)))
        ys = [s.ratings.get(rating_dim) for s in group]
        metrics = [metrics_of(s.phonemes) for s in group]
        runner.correlate(family, 'ttr', rating_dim,
                         [m.ttr for m in metrics], ys, divisor=divisor)
        runner.correlate(family, 'seg_len', rating_dim,
                         [m.seg_len for m in metrics], ys, divisor=divisor)
    return runner.analysis
