#!/usr/bin/env python
from decimal import Decimal, localcontext
from fractions import Fraction
import json
import os
from pathlib import Path
import random
import shutil
import subprocess
import sys
import tempfile
import time
import unittest

import numpy as np
from scipy import stats as scipy_stats

from app import create_app
from app.colexgraph import ColexGraph, construct_graph, \
    construct_by_language, brute_force_colex, derive_concept_graph, \
    neighborhood, export_dot
from app.exceptions import ParseError, MalformedSynsetId, \
    EmptyPronunciation, RangeError, DuplicateConcept, WrongColumnCount, \
    InvalidFeatureValue, DuplicateLanguageCode, UnknownConcept, \
    UnknownSegment, SegmentationError, OracleScaleExceeded, LengthMismatch, \
    TooFewSamples, ZeroVariance, DegenerateIndicator, ConfigError
from app.ingest import IngestReport, parse_synset_id, ingest_lexicon, \
    ingest_pronunciations, ingest_pronunciation_dir, pronunciation_language, \
    ingest_ratings, ingest_feature_table, ingest_language_metadata, \
    format_lexicon, format_ratings, format_feature_table, \
    format_pronunciations, format_language_metadata
from app.models import SynsetId, LexEntry, LanguageInfo, PronEntry, \
    RatingRecord, FeatureTable, PhonemeSeq, Concept, ConceptRatings, \
    LemmaSample, LemmaFeatureProfile, PairDistances, CorrelationResult, \
    CorrelationReport, DISTANCE_NAMES, FEATURE_NAMES
from app.phonology import attach_phonemes, features_of, lemma_profile, \
    metrics_of, segment_fallback
from app.pipeline import RunConfig, run_stages
from app.ratings import attach_ratings, pair_distances, build_dataset, \
    phoneme_level_ratings
from app.stats import betainc, pearson_pvalue, pearson_r, point_biserial, \
    bonferroni, analyze_distance_matrix, analyze_phoneme_position, \
    analyze_features, analyze_ttr_len
from app.synth import generate_corpus
from config import Config, basedir

FIXTURES = Path(basedir) / 'fixtures'
TABLE1 = FIXTURES / 'table1'


class TestConfig(Config):
    TESTING = True
    LEXICON_PATH = None
    PRONUNCIATIONS_DIR = None
    CONCRETENESS_PATH = None
    AFFECT_PATH = None
    FEATURE_TABLE_PATH = None
    LANGUAGES_PATH = None
    PARSE_MODE = 'strict'
    ALPHA = 0.05
    REPORT_THRESHOLD = 0.1
    NORMALIZE_UNDERSCORES = False
    RESEGMENT = False


def lex(language, lemma, synset):
    return LexEntry(language, lemma, parse_synset_id(synset))


def table1_inputs():
    return ['--lexicon', str(TABLE1 / 'lexicon.tsv'),
            '--pronunciations', str(TABLE1 / 'pronunciations'),
            '--concreteness', str(TABLE1 / 'concreteness.csv'),
            '--affect', str(TABLE1 / 'affect.csv'),
            '--feature-table', str(TABLE1 / 'features.csv'),
            '--languages', str(TABLE1 / 'languages.csv'),
            '--normalize-underscores']


def table1_config(out_dir):
    return RunConfig(
        lexicon=str(TABLE1 / 'lexicon.tsv'),
        pronunciations=str(TABLE1 / 'pronunciations'),
        concreteness=str(TABLE1 / 'concreteness.csv'),
        affect=str(TABLE1 / 'affect.csv'),
        feature_table=str(TABLE1 / 'features.csv'),
        languages=str(TABLE1 / 'languages.csv'),
        out_dir=str(out_dir), normalize_underscores=True)


def random_entries(rng, max_languages=8, max_lemmas=60, max_synsets=40,
                   max_entries=120):
    languages = [f'l{i}' for i in range(rng.randint(1, max_languages))]
    lemmas = [f'w{i}' for i in range(rng.randint(1, max_lemmas))]
    synsets = [SynsetId(f's{i}', 'n', rng.randint(1, 2))
               for i in range(rng.randint(1, max_synsets))]
    return [LexEntry(rng.choice(languages), rng.choice(lemmas),
                     rng.choice(synsets))
            for _ in range(rng.randint(0, max_entries))]


class AppCase(unittest.TestCase):
    def setUp(self):
        self.tmp = Path(tempfile.mkdtemp())
        self.app = create_app(TestConfig)
        self.app.config['OUT_DIR'] = str(self.tmp / 'output')
        self.app_context = self.app.app_context()
        self.app_context.push()

    def tearDown(self):
        self.app_context.pop()
        shutil.rmtree(self.tmp, ignore_errors=True)

    def write(self, name, text):
        path = self.tmp / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
        return path


class ImportCase(unittest.TestCase):
    def test_fresh_interpreter(self):
        env = dict(os.environ, LOG_TO_STDOUT='1')
        for module in ('colexphon', 'app.exceptions', 'app.colexgraph',
                       'app.ingest', 'app.pipeline', 'app.errors',
                       'app.api'):
            result = subprocess.run([sys.executable, '-c', f'import {module}'],
                                    cwd=basedir, env=env, capture_output=True,
                                    text=True)
            self.assertEqual(result.returncode, 0,
                             f'import {module}: {result.stderr}')


class IngestCase(AppCase):
    def test_synset_id(self):
        s = parse_synset_id('dad#n#1')
        self.assertEqual(s, SynsetId('dad', 'n', 1))
        self.assertEqual(str(parse_synset_id('Santa_Claus#n#1')),
                         'Santa_Claus#n#1')
        self.assertTrue(s.is_first_sense)
        self.assertFalse(parse_synset_id('knot#n#4').is_first_sense)
        for bad in ('dad#n', 'dad#x#1', 'dad#n#0', 'dad#n#01', '#n#1',
                    'dad#n#1#2'):
            with self.assertRaises(MalformedSynsetId):
                parse_synset_id(bad)

    def test_lexicon_fixture(self):
        report = IngestReport('lexicon', 'lexicon')
        entries = ingest_lexicon(TABLE1 / 'lexicon.tsv', report=report)
        self.assertEqual(len(entries), 10)
        self.assertEqual(entries[0], lex('fa', 'pāp', 'dad#n#1'))
        self.assertEqual(report.records, 10)
        self.assertEqual(report.errors, [])

    def test_lexicon_strict_and_lenient(self):
        path = self.write('lex.tsv', 'fa\tpāp\tdad#n#1\nfa\tpāp\n'
                                     'fa\tpāp\tpope#n#1\n')
        with self.assertRaises(ParseError) as cm:
            ingest_lexicon(path)
        self.assertEqual(cm.exception.line, 2)
        self.assertEqual(cm.exception.path, str(path))
        report = IngestReport(str(path), 'lexicon')
        entries = ingest_lexicon(path, strict=False, report=report)
        self.assertEqual(len(entries), 2)
        self.assertEqual(len(report.errors), 1)
        self.assertEqual(report.errors[0].line, 2)

    def test_lexicon_nfc_and_duplicates(self):
        path = self.write('lex.tsv', 'fa\tpāp\tdad#n#1\n'
                                     'fa\tpāp\tdad#n#1\n')
        report = IngestReport(str(path), 'lexicon')
        entries = ingest_lexicon(path, report=report)
        self.assertEqual(entries, [lex('fa', 'pāp', 'dad#n#1')])
        self.assertEqual(report.duplicates, 1)

    def test_pronunciations(self):
        path = self.write('fa_broad.tsv', 'pāp\tp ɑː p\npapa\tp a p ə\n')
        prons = ingest_pronunciations(path, language='fa')
        self.assertEqual(prons[0], PronEntry('fa', 'pāp', ('p', 'ɑː', 'p')))
        self.assertEqual(len(prons[1].segments), 4)
        self.assertEqual(pronunciation_language(path), 'fa')
        empty = self.write('es.tsv', 'pare\t  \n')
        with self.assertRaises(EmptyPronunciation):
            ingest_pronunciations(empty, language='es')

    def test_pronunciation_dir(self):
        prons = ingest_pronunciation_dir(TABLE1 / 'pronunciations')
        self.assertEqual(sorted({p.language for p in prons}),
                         ['ar', 'es', 'fa', 'ru'])

    def test_ratings(self):
        records = ingest_ratings(TABLE1 / 'concreteness.csv', 'concreteness')
        self.assertEqual(records[0], RatingRecord('dad', concreteness=4.5))
        self.assertIn('santa claus', [r.concept for r in records])
        path = self.write('conc.csv', 'word,conc_mean\nmoon,5.5\n')
        with self.assertRaises(RangeError):
            ingest_ratings(path, 'concreteness')
        path = self.write('dup.csv', 'Moon,4.1\nmoon,4.2\n')
        with self.assertRaises(DuplicateConcept) as cm:
            ingest_ratings(path, 'concreteness')
        self.assertEqual(cm.exception.line, 2)
        path = self.write('cols.csv', 'moon,4.1,2.0\n')
        with self.assertRaises(WrongColumnCount):
            ingest_ratings(path, 'concreteness')

    def test_affect_range(self):
        path = self.write('affect.csv', 'joy,8.5,6.0,7.0\n')
        self.assertEqual(len(ingest_ratings(path, 'affect')), 1)
        with self.assertRaises(RangeError):
            ingest_ratings(path, 'affect', affect_range=(1.0, 7.0))

    def test_feature_table(self):
        table = ingest_feature_table(TABLE1 / 'features.csv')
        self.assertEqual(len(table), 7)
        self.assertEqual(table.get('p')['syl'], -1)
        self.assertEqual(table.get('a')['syl'], 1)
        self.assertEqual(table.get('a')['cons'], -1)
        header = open(TABLE1 / 'features.csv', encoding='utf-8').readline()
        short = self.write('short.csv', header.rsplit(',', 1)[0] + '\n')
        with self.assertRaises(WrongColumnCount):
            ingest_feature_table(short)
        bad = self.write('bad.csv', header + 'p' + ',x' * 24 + '\n')
        with self.assertRaises(InvalidFeatureValue):
            ingest_feature_table(bad)

    def test_language_metadata(self):
        infos = ingest_language_metadata(TABLE1 / 'languages.csv')
        self.assertEqual(infos[0], LanguageInfo('ar', 'Afro-Asiatic',
                                                'Eurasia'))
        path = self.write('langs.csv', 'fa,Indo-European\nfa,Iranian\n')
        with self.assertRaises(DuplicateLanguageCode):
            ingest_language_metadata(path)

    def test_round_trips(self):
        entries = ingest_lexicon(TABLE1 / 'lexicon.tsv')
        path = self.write('lex.tsv', format_lexicon(entries))
        self.assertEqual(ingest_lexicon(path), entries)
        table = ingest_feature_table(TABLE1 / 'features.csv')
        path = self.write('features.csv', format_feature_table(table))
        self.assertEqual(ingest_feature_table(path).rows, table.rows)
        records = ingest_ratings(TABLE1 / 'affect.csv', 'affect')
        path = self.write('affect.csv', format_ratings(records, 'affect'))
        self.assertEqual(ingest_ratings(path, 'affect'), records)

    def test_more_round_trips(self):
        prons = ingest_pronunciation_dir(TABLE1 / 'pronunciations')
        path = self.write('prons.tsv', format_pronunciations(prons))
        self.assertEqual(sorted(ingest_pronunciations(path)), sorted(prons))
        records = ingest_ratings(TABLE1 / 'concreteness.csv', 'concreteness')
        path = self.write('conc.csv', format_ratings(records, 'concreteness'))
        self.assertEqual(ingest_ratings(path, 'concreteness'), records)
        infos = ingest_language_metadata(TABLE1 / 'languages.csv') + \
            [LanguageInfo('xx', 'Isolate')]
        path = self.write('langs.csv', format_language_metadata(infos))
        self.assertEqual(ingest_language_metadata(path), infos)

    def test_line_order_does_not_matter(self):
        rng = random.Random(47)
        for _ in range(50):
            entries = random_entries(rng)
            lines = format_lexicon(entries).splitlines(keepends=True)
            rng.shuffle(lines)
            path = self.write('shuffled.tsv', ''.join(lines))
            self.assertEqual(set(ingest_lexicon(path)), set(entries))
        header, *rows = (TABLE1 / 'affect.csv').read_text(
            encoding='utf-8').splitlines()
        expected = set(ingest_ratings(TABLE1 / 'affect.csv', 'affect'))
        for _ in range(10):
            rng.shuffle(rows)
            path = self.write('affect.csv',
                              '\n'.join([header] + rows) + '\n')
            self.assertEqual(set(ingest_ratings(path, 'affect')), expected)

    def test_header_needs_every_column(self):
        path = self.write('conc.csv', 'word,4.2\nmoon,3.0\n')
        self.assertEqual([r.concept for r in
                          ingest_ratings(path, 'concreteness')],
                         ['word', 'moon'])
        path = self.write('conc.csv', 'Word,Conc_Mean\nmoon,3.0\n')
        self.assertEqual(len(ingest_ratings(path, 'concreteness')), 1)
        path = self.write('langs.csv', 'code,Isolate\nfa,Indo-European\n')
        self.assertEqual(ingest_language_metadata(path)[0],
                         LanguageInfo('code', 'Isolate'))
        path = self.write('langs.csv', 'code,family\nfa,Indo-European\n')
        self.assertEqual(ingest_language_metadata(path),
                         [LanguageInfo('fa', 'Indo-European')])


class ColexGraphCase(unittest.TestCase):
    def test_persian_example(self):
        graph = construct_graph([lex('fa', 'pāp', 'dad#n#1'),
                                 lex('fa', 'pāp', 'pope#n#1')])
        self.assertEqual(len(graph), 1)
        edge = graph.edge(parse_synset_id('pope#n#1'),
                          parse_synset_id('dad#n#1'))
        self.assertEqual(edge.pair, (parse_synset_id('dad#n#1'),
                                     parse_synset_id('pope#n#1')))
        self.assertEqual(edge.witnesses, frozenset({('pāp', 'fa')}))

    def test_single_and_triple_synsets(self):
        self.assertEqual(len(construct_graph([lex('fa', 'x', 'a#n#1')])), 0)
        graph = construct_graph([lex('fa', 'x', 'a#n#1'),
                                 lex('fa', 'x', 'b#n#1'),
                                 lex('fa', 'x', 'c#n#1')])
        self.assertEqual(len(graph), 3)
        for edge in graph.edges.values():
            self.assertEqual(edge.witnesses, frozenset({('x', 'fa')}))
        self.assertEqual(len(construct_graph([])), 0)

    def test_same_lemma_other_language(self):
        graph = construct_graph([lex('fa', 'x', 'a#n#1'),
                                 lex('ar', 'x', 'b#n#1')])
        self.assertEqual(len(graph), 0)

    def test_oracle_equivalence(self):
        rng = random.Random(1234)
        start = time.perf_counter()
        for _ in range(1000):
            entries = random_entries(rng)
            self.assertEqual(construct_graph(entries).witness_relation(),
                             brute_force_colex(entries))
        self.assertLess(time.perf_counter() - start, 30)
        self.assertEqual(brute_force_colex([]), set())

    def test_oracle_scale(self):
        entries = [lex('fa', f'w{i}', 'a#n#1') for i in range(10_001)]
        with self.assertRaises(OracleScaleExceeded):
            brute_force_colex(entries)

    def test_monotonicity(self):
        rng = random.Random(7)
        for _ in range(200):
            entries = random_entries(rng, max_lemmas=10, max_synsets=8)
            before = construct_graph(entries).witness_relation()
            extra = random_entries(rng, max_lemmas=10, max_synsets=8,
                                   max_entries=5)
            after = construct_graph(entries + extra).witness_relation()
            self.assertLessEqual(before, after)

    def test_language_partition(self):
        rng = random.Random(11)
        for _ in range(200):
            entries = random_entries(rng, max_lemmas=15, max_synsets=10)
            merged = ColexGraph.merge(construct_by_language(entries).values())
            self.assertEqual(merged.witness_relation(),
                             construct_graph(entries).witness_relation())

    def test_concept_graph(self):
        graph = construct_graph([
            lex('fa', 'pāp', 'dad#n#1'), lex('fa', 'pāp', 'pope#n#1'),
            lex('ar', 'bābā', 'dad#n#1'), lex('ar', 'bābā', 'pope#n#1'),
            lex('en', 'tie', 'knot#n#4'), lex('en', 'tie', 'tie#n#1'),
        ])
        records = derive_concept_graph(graph)
        self.assertEqual(len(records), 1)
        record = records[0]
        self.assertEqual((str(record.concept1), str(record.concept2)),
                         ('dad', 'pope'))
        self.assertEqual((record.n_colex, record.n_lemmas,
                          record.n_languages), (2, 2, 2))

    def test_concept_graph_permutation(self):
        rng = random.Random(3)
        for _ in range(50):
            entries = random_entries(rng, max_lemmas=10, max_synsets=8)
            shuffled = list(entries)
            rng.shuffle(shuffled)
            self.assertEqual(
                [r.to_dict() for r in derive_concept_graph(
                    construct_graph(entries))],
                [r.to_dict() for r in derive_concept_graph(
                    construct_graph(shuffled))])

    def test_counts_invariant(self):
        rng = random.Random(5)
        graph = construct_graph(random_entries(rng, max_entries=400))
        for record in derive_concept_graph(graph):
            self.assertGreaterEqual(record.n_colex, record.n_lemmas)
            self.assertGreaterEqual(record.n_colex, record.n_languages)
            self.assertGreaterEqual(min(record.n_lemmas,
                                        record.n_languages), 1)


class Table1Case(AppCase):
    def setUp(self):
        super().setUp()
        self.state = run_stages(table1_config(self.tmp / 'output'))

    def test_concept_pairs(self):
        self.assertEqual(
            [(str(r.concept1), str(r.concept2)) for r in self.state.records],
            [('dad', 'pope'), ('dad', 'sire'), ('santa claus', 'dad')])

    def test_summary(self):
        summary = self.state.summary
        self.assertEqual(summary.entries, 10)
        self.assertEqual(summary.colex_patterns, 5)
        self.assertEqual(summary.synsets, 4)
        self.assertEqual(summary.lexicalizations, 5)
        self.assertEqual(summary.phoneme_lemma_pairs, 4)
        self.assertEqual(summary.concepts, 4)
        self.assertEqual(summary.concepts_with_affect, 3)
        self.assertEqual(summary.concepts_with_concreteness, 3)
        self.assertEqual(summary.synset_pairs, 3)
        self.assertEqual(summary.languages, 5)
        self.assertEqual(summary.families, 2)
        self.assertEqual(summary.median_phoneme_inventory, 2.5)

    def test_dataset_rows(self):
        dataset = self.state.dataset
        self.assertEqual(len(dataset), sum(r.n_colex
                                           for r in self.state.records))
        far = [row for row in dataset if row.language == 'da'][0]
        self.assertIsNone(far.phonemes)
        self.assertIsNone(far.distances.conc_dist)
        self.assertAlmostEqual(far.distances.v_dist, 0.74)

    def test_neighborhood_and_dot(self):
        records = self.state.records
        one = set(neighborhood(records, 'dad', 1).nodes)
        self.assertEqual(one, {'dad', 'pope', 'sire', 'santa claus'})
        self.assertLessEqual(one, set(neighborhood(records, 'dad', 2).nodes))
        dot = export_dot(records, 'dad', 1)
        self.assertEqual(dot, export_dot(records, 'dad', 1))
        self.assertNotIn('->', dot)
        for name in ('dad', 'pope', 'sire', 'santa claus'):
            self.assertIn(name, dot)
        self.assertRegex(dot, r'penwidth="?8\.00"?')
        self.assertIn('doublecircle', dot)
        with self.assertRaises(UnknownConcept):
            export_dot(records, 'zzz', 1)
        with self.assertRaises(ValueError):
            export_dot(records, 'dad', 0)

    def test_phoneme_level_ratings(self):
        initial = self.state.phoneme_ratings['initial']
        p_fa = [r for r in initial
                if r.phoneme == 'p' and r.language == 'fa'][0]
        self.assertEqual(p_fa.n, 2)
        self.assertAlmostEqual(p_fa.mean_concreteness, (4.5 + 4.92) / 2)


class PhonologyCase(unittest.TestCase):
    def setUp(self):
        self.table = ingest_feature_table(TABLE1 / 'features.csv')

    def test_attach_phonemes(self):
        entries = ingest_lexicon(TABLE1 / 'lexicon.tsv')
        prons = ingest_pronunciation_dir(TABLE1 / 'pronunciations')
        joined = dict(((e.language, e.lemma), p)
                      for e, p in attach_phonemes(entries, prons))
        self.assertEqual(joined[('fa', 'pāp')].segments, ('p', 'ɑː', 'p'))
        self.assertIsNone(joined[('da', 'far')])
        self.assertTrue(all(p is None
                            for _, p in attach_phonemes(entries, [])))

    def test_first_pronunciation_wins(self):
        entries = [lex('fa', 'pāp', 'dad#n#1')]
        prons = [PronEntry('fa', 'pāp', ('p', 'ɑː', 'p')),
                 PronEntry('fa', 'pāp', ('p', 'a', 'p'))]
        with self.assertLogs('app.phonology', level='WARNING'):
            joined = attach_phonemes(entries, prons)
        self.assertEqual(joined[0][1].segments, ('p', 'ɑː', 'p'))

    def test_features_of(self):
        self.assertEqual(features_of('a', self.table).values,
                         self.table.rows['a'])
        with self.assertRaises(UnknownSegment):
            features_of('ʘ̃ˤ', self.table)
        with self.assertLogs('app.phonology', level='WARNING'):
            zeros = features_of('ʘ̃ˤ', self.table, strict=False)
        self.assertEqual(zeros.values, (0,) * 24)

    def test_lemma_profile(self):
        profile = lemma_profile(PhonemeSeq(('p', 'ɑː', 'p')), self.table)
        self.assertEqual(profile['syl'], 1)
        self.assertEqual(profile['lab'], 2)
        self.assertEqual(lemma_profile(PhonemeSeq(('a', 'a')),
                                       self.table)['son'], 2)

    def test_metrics(self):
        m = metrics_of(PhonemeSeq(('p', 'a', 'p', 'a')))
        self.assertEqual((m.ttr, m.seg_len), (0.5, 4))
        m = metrics_of(PhonemeSeq(('p', 'ɑː', 'p')))
        self.assertEqual(m.ttr, 2 / 3)
        self.assertEqual(metrics_of(PhonemeSeq(('k',))).ttr, 1.0)
        with self.assertRaises(ValueError):
            PhonemeSeq(())

    def test_metric_and_profile_properties(self):
        rng = random.Random(17)
        table = generate_corpus(seed=1, n_languages=1, n_concepts=5).table
        inventory = sorted(table.rows)
        for _ in range(10_000):
            a = tuple(rng.choice(inventory)
                      for _ in range(rng.randint(1, 12)))
            b = tuple(rng.choice(inventory)
                      for _ in range(rng.randint(1, 12)))
            m = metrics_of(PhonemeSeq(a))
            self.assertEqual(m.distinct, len(set(a)))
            self.assertEqual(Fraction(m.distinct, m.seg_len),
                             Fraction(len(set(a)), len(a)))
            self.assertEqual(m.ttr, m.distinct / m.seg_len)
            self.assertTrue(0 < m.ttr <= 1)
            self.assertEqual(m.ttr == 1, len(set(a)) == len(a))
            shuffled = list(a)
            rng.shuffle(shuffled)
            self.assertEqual(lemma_profile(PhonemeSeq(a), table),
                             lemma_profile(PhonemeSeq(tuple(shuffled)),
                                           table))
            self.assertEqual(lemma_profile(PhonemeSeq(a + b), table),
                             lemma_profile(PhonemeSeq(a), table)
                             + lemma_profile(PhonemeSeq(b), table))

    def test_segment_fallback(self):
        def table(*segments):
            return FeatureTable(rows={s: (0,) * 24 for s in segments})

        self.assertEqual(segment_fallback('papa', table('p', 'a')).segments,
                         ('p', 'a', 'p', 'a'))
        self.assertEqual(
            segment_fallback('tʃa', table('t', 'tʃ', 'a')).segments,
            ('tʃ', 'a'))
        with self.assertRaises(SegmentationError) as cm:
            segment_fallback('q', table('p', 'a'))
        self.assertEqual(cm.exception.offset, 0)
        with self.assertRaises(SegmentationError) as cm:
            segment_fallback('ɑːq', table('ɑː'))
        self.assertEqual(cm.exception.offset, 4)

    def test_segment_fallback_against_tilings(self):
        def tilings(text, inventory):
            if not text:
                return [()]
            out = []
            for segment in inventory:
                if text.startswith(segment):
                    out += [(segment,) + rest for rest in
                            tilings(text[len(segment):], inventory)]
            return out

        rng = random.Random(23)
        inventory = ('t', 'ʃ', 'tʃ', 'a', 'aː', 'ː', 'ab', 'b', 'bc')
        table = FeatureTable(rows={s: (0,) * 24 for s in inventory})
        alphabet = 'tʃaːbcq'
        for _ in range(2000):
            text = ''.join(rng.choice(alphabet)
                           for _ in range(rng.randint(1, 7)))
            options = tilings(text, inventory)
            try:
                result = segment_fallback(text, table).segments
            except SegmentationError:
                result = None
            if result is not None:
                self.assertIn(result, options)
                self.assertEqual(''.join(result), text)
            if not options:
                self.assertIsNone(result)


class RatingsCase(unittest.TestCase):
    def test_pair_distances(self):
        c1, c2 = Concept('a', 'n'), Concept('b', 'n')
        d = pair_distances(ConceptRatings(c1, concreteness=3.0),
                           ConceptRatings(c2, concreteness=3.42))
        self.assertAlmostEqual(d.conc_dist, 0.42)
        self.assertIsNone(d.v_dist)
        same = ConceptRatings(c1, 2.0, 5.0, 5.0, 5.0)
        self.assertEqual(pair_distances(same, same).values(), (0.0,) * 4)
        d = pair_distances(ConceptRatings(c1, 3.0, 5.0, 4.0, 6.0),
                           ConceptRatings(c2, None, 5.74, 4.05, 6.57))
        self.assertIsNone(d.conc_dist)
        self.assertAlmostEqual(d.v_dist, 0.74)

    def test_metric_properties(self):
        rng = random.Random(29)

        def rated(i):
            return ConceptRatings(
                Concept(f'c{i}', 'n'),
                *(rng.uniform(1, 9) if rng.random() < 0.9 else None
                  for _ in range(4)))

        for i in range(100_000):
            a, b, c = rated(1), rated(2), rated(3)
            ab, ba = pair_distances(a, b), pair_distances(b, a)
            self.assertEqual(ab, ba)
            bc, ac = pair_distances(b, c), pair_distances(a, c)
            for name in DISTANCE_NAMES:
                x, y, z = ab.get(name), bc.get(name), ac.get(name)
                if x is not None:
                    self.assertGreaterEqual(x, 0.0)
                if None not in (x, y, z):
                    self.assertLessEqual(z, x + y + 1e-12)

    def test_attach_ratings(self):
        graph = construct_graph(ingest_lexicon(TABLE1 / 'lexicon.tsv'))
        records = derive_concept_graph(graph, normalize_underscores=True)
        ratings = ingest_ratings(TABLE1 / 'concreteness.csv',
                                 'concreteness') + \
            ingest_ratings(TABLE1 / 'affect.csv', 'affect')
        ratings_map = attach_ratings(records, ratings)
        dad = ratings_map[Concept('dad', 'n')]
        self.assertTrue(all(dad.get(d) is not None for d in
                            ('concreteness', 'valence', 'arousal',
                             'dominance')))
        self.assertIsNone(ratings_map[Concept('sire', 'n')].concreteness)
        self.assertFalse(any(r.is_rated for r in
                             attach_ratings(records, []).values()))
        rows = build_dataset(records, attach_ratings(records, []), {})
        self.assertEqual(len(rows), 5)
        self.assertTrue(all(row.distances.values() == (None,) * 4
                            for row in rows))

    def test_phoneme_level_means(self):
        def sample(word, conc, valence=None, language='fa'):
            concept = Concept(word, 'n')
            return LemmaSample(language, word, concept,
                               PhonemeSeq(('p', 'a')),
                               ConceptRatings(concept, conc, valence))

        ratings = phoneme_level_ratings([sample('x', 2.0), sample('y', 4.0),
                                         sample('z', 3.0, language='ar')],
                                        'initial')
        fa = [r for r in ratings if r.language == 'fa'][0]
        self.assertEqual((fa.mean_concreteness, fa.n), (3.0, 2))
        self.assertIsNone(fa.mean_valence)
        self.assertEqual(len(ratings), 2)


def exact_r(xs, ys):
    with localcontext() as ctx:
        ctx.prec = 60
        xs = [Decimal(x) for x in xs]
        ys = [Decimal(y) for y in ys]
        n = len(xs)
        mx, my = sum(xs) / n, sum(ys) / n
        sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
        sxx = sum((x - mx) ** 2 for x in xs)
        syy = sum((y - my) ** 2 for y in ys)
        return float(sxy / (sxx * syy).sqrt())


class StatsCase(unittest.TestCase):
    def test_pearson_examples(self):
        x = [1.0, 2.0, 3.0, 4.0, 5.0]
        result = pearson_r(x, [2 * v + 1 for v in x])
        self.assertEqual((result.r, result.p, result.n), (1.0, 0.0, 5))
        self.assertEqual(pearson_r(x, [-v for v in x]).r, -1.0)
        with self.assertRaises(LengthMismatch):
            pearson_r(x, x[:4])
        with self.assertRaises(TooFewSamples):
            pearson_r([1.0, 2.0], [2.0, 1.0])
        with self.assertRaises(ZeroVariance):
            pearson_r(x, [3.0] * 5)

    def test_betainc_edges(self):
        self.assertEqual(betainc(2.0, 0.5, 0.0), 0.0)
        self.assertEqual(betainc(2.0, 0.5, 1.0), 1.0)
        self.assertAlmostEqual(betainc(1.0, 1.0, 0.3), 0.3, places=14)
        with self.assertRaises(ValueError):
            betainc(1.0, 1.0, 1.5)

    def test_pvalue_oracle_table(self):
        with open(FIXTURES / 'pearson_pvalues.tsv', encoding='utf-8') as f:
            rows = [line.rstrip('\n').split('\t') for line in f][1:]
        self.assertGreater(len(rows), 40)
        for n, r, p in rows:
            expected = Decimal(p)
            got = pearson_pvalue(float(r), int(n))
            if expected < Decimal('1e-300'):
                self.assertEqual(got, 0.0)
                continue
            self.assertLessEqual(abs(Decimal(got) - expected) / expected,
                                 Decimal('1e-10'), f'n={n} r={r}')

    def test_random_vector_oracle(self):
        with open(FIXTURES / 'pearson_random.tsv', encoding='utf-8') as f:
            rows = [line.rstrip('\n').split('\t') for line in f][1:]
        self.assertEqual(len(rows), 200)
        for i, (n, r, p, xs, ys) in enumerate(rows):
            xs = [float(v) for v in xs.split(',')]
            ys = [float(v) for v in ys.split(',')]
            self.assertEqual(len(xs), int(n))
            result = pearson_r(xs, ys)
            self.assertEqual(result.n, int(n))
            self.assertLessEqual(abs(Decimal(result.r) - Decimal(r)),
                                 Decimal('1e-12'), f'row {i}')
            expected = Decimal(p)
            self.assertLessEqual(abs(Decimal(result.p) - expected) / expected,
                                 Decimal('1e-10'), f'row {i}: n={n} r={r}')

    def test_random_vectors(self):
        rng = np.random.default_rng(31)
        for i in range(200):
            n = int(rng.choice([3, 4, 5, 10, 50, 200, 1000, 10_000]))
            x = rng.normal(size=n)
            y = rng.uniform(-1, 1) * x + rng.normal(size=n)
            result = pearson_r(x, y)
            self.assertLessEqual(abs(result.r - exact_r(x, y)), 1e-12)
            _, expected = scipy_stats.pearsonr(x, y)
            if expected > 1e-250:
                self.assertLessEqual(abs(result.p - expected) / expected,
                                     1e-9)
            else:
                self.assertLess(result.p, 1e-240)

    def test_affine_invariance(self):
        rng = np.random.default_rng(37)
        for _ in range(100):
            x, y = rng.normal(size=30), rng.normal(size=30)
            r = pearson_r(x, y).r
            a, b = rng.uniform(0.1, 10), rng.uniform(-5, 5)
            self.assertAlmostEqual(pearson_r(a * x + b, y).r, r, places=12)
            self.assertAlmostEqual(pearson_r(-a * x + b, y).r, -r,
                                   places=12)

    def test_point_biserial(self):
        result = point_biserial([1, 1, 0, 0], [5.0, 4.0, 2.0, 1.0])
        self.assertGreater(result.r, 0.9)
        with self.assertRaises(DegenerateIndicator):
            point_biserial([1, 1, 1], [1.0, 2.0, 3.0])
        with self.assertRaises(ZeroVariance):
            point_biserial([0, 0, 0], [1.0, 2.0, 3.0])

    def test_point_biserial_is_pearson(self):
        rng = np.random.default_rng(53)
        for _ in range(50):
            n = int(rng.integers(3, 200))
            flags = rng.random(n) < rng.uniform(0.1, 0.9)
            flags[0], flags[1] = True, False
            ys = rng.normal(size=n) + flags * rng.uniform(-2, 2)
            got = point_biserial(flags, ys)
            expected = pearson_r(flags.astype(float), ys)
            self.assertAlmostEqual(got.r, expected.r, places=14)
            self.assertEqual(got.n, expected.n)
            self.assertLessEqual(abs(got.p - expected.p),
                                 1e-12 * max(expected.p, 1e-300))

    def test_bonferroni_subsets(self):
        rng = random.Random(41)
        for _ in range(200):
            reports = [CorrelationReport('g', f'x{i}', 'y', CorrelationResult(
                rng.uniform(-1, 1), rng.random() ** 3, 10))
                for i in range(rng.randint(1, 30))]

            def significant(divisor):
                return {r.variable_x for r in bonferroni(reports, 0.05,
                                                         divisor)
                        if r.significant}

            self.assertLessEqual(significant(10), significant(5))
            self.assertLessEqual(significant(5), significant(1))
        with self.assertRaises(ValueError):
            bonferroni([], 0.05, 0)

    def test_reported_needs_threshold(self):
        weak = CorrelationReport('g', 'x', 'y', CorrelationResult(0.05, 1e-9,
                                                                  10000))
        [weak] = bonferroni([weak], 0.05, 1)
        self.assertTrue(weak.significant)
        self.assertFalse(weak.reported)

    def test_distance_matrix(self):
        rng = random.Random(43)
        distances = [PairDistances(*(rng.random() for _ in range(4)))
                     for _ in range(30)]
        analysis = analyze_distance_matrix(distances)
        self.assertEqual(len(analysis.reports), 16)
        for i in range(4):
            self.assertEqual(analysis.matrix[i][i], 1.0)
            for j in range(4):
                self.assertEqual(analysis.matrix[i][j], analysis.matrix[j][i])

    def test_distance_matrix_identical_columns(self):
        rng = random.Random(59)
        distances = []
        for _ in range(40):
            conc, v, a = rng.random(), rng.random(), rng.random()
            distances.append(PairDistances(conc, v, a, v))
        analysis = analyze_distance_matrix(distances)
        v, d = DISTANCE_NAMES.index('v_dist'), DISTANCE_NAMES.index('d_dist')
        self.assertAlmostEqual(analysis.matrix[v][d], 1.0, places=12)
        [cell] = [r for r in analysis.reports
                  if (r.variable_x, r.variable_y) == ('v_dist', 'd_dist')]
        self.assertLess(cell.result.p, 1e-100)
        self.assertTrue(cell.reported)

    def samples(self):
        out = []
        plan = [('x1', 'p', 4.5), ('x1', 'p', 4.0), ('x1', 'b', 1.5),
                ('x2', 'p', 4.2), ('x2', 'b', 2.0), ('x2', 'b', 1.0),
                ('zz', 'p', 3.0)]
        for i, (language, initial, conc) in enumerate(plan):
            concept = Concept(f'c{i}', 'n')
            out.append(LemmaSample(language, f'w{i}', concept,
                                   PhonemeSeq((initial, 'a')),
                                   ConceptRatings(concept, conc)))
        return out

    def test_phoneme_position(self):
        languages = [LanguageInfo('x1', 'Fam'), LanguageInfo('x2', 'Fam')]
        with self.assertLogs('app.stats', level='WARNING'):
            analysis = analyze_phoneme_position(self.samples(), languages)
        self.assertEqual([g.group for g in analysis.groups], ['Fam'])
        self.assertEqual(analysis.groups[0].n_samples, 6)
        self.assertEqual(analysis.groups[0].n_phonemes, 2)
        by_phoneme = {r.variable_x: r for r in analysis.reports}
        self.assertEqual(set(by_phoneme), {'initial:p', 'initial:b'})
        self.assertEqual(by_phoneme['initial:p'].divisor, 2)
        self.assertGreater(by_phoneme['initial:p'].result.r, 0.8)
        self.assertAlmostEqual(by_phoneme['initial:p'].result.r,
                               -by_phoneme['initial:b'].result.r, places=12)
        self.assertIn('unknown language code',
                      [d.reason for d in analysis.diagnostics])

    def test_ttr_len_zero_variance(self):
        languages = [LanguageInfo('x1', 'Fam'), LanguageInfo('x2', 'Fam')]
        with self.assertLogs('app.stats', level='WARNING'):
            analysis = analyze_ttr_len(self.samples(), languages)
        self.assertEqual(analysis.reports, [])
        self.assertEqual(len(analysis.diagnostics), 3)
        self.assertTrue(any(d.reason.startswith('zero_variance')
                            for d in analysis.diagnostics))

    def test_features_affine_in_rating(self):
        languages = [LanguageInfo('x1', 'Fam'), LanguageInfo('x2', 'Fam')]
        son, voi = FEATURE_NAMES.index('son'), FEATURE_NAMES.index('voi')
        samples, profiles = [], {}
        for k in range(9):
            concept = Concept(f'c{k}', 'n')
            language = 'x1' if k % 2 else 'x2'
            samples.append(LemmaSample(language, f'w{k}', concept,
                                       PhonemeSeq(('p', 'a')),
                                       ConceptRatings(concept, 1.0 + 0.5 * k)))
            if k == 8:
                continue
            counts = [0] * len(FEATURE_NAMES)
            counts[son], counts[voi] = 2 * k + 1, 10 - k
            profiles[(language, f'w{k}')] = LemmaFeatureProfile(tuple(counts))
        analysis = analyze_features(samples, profiles, languages)
        self.assertEqual(analysis.groups[0].n_samples, 8)
        by_feature = {r.variable_x: r for r in analysis.reports}
        self.assertEqual(set(by_feature), {'son', 'voi'})
        self.assertAlmostEqual(by_feature['son'].result.r, 1.0, places=12)
        self.assertAlmostEqual(by_feature['voi'].result.r, -1.0, places=12)
        self.assertEqual(by_feature['son'].divisor, 2)
        self.assertTrue(by_feature['son'].reported)
        self.assertEqual(len(analysis.diagnostics), len(FEATURE_NAMES) - 2)

    def test_ttr_len_length_falls_with_rating(self):
        languages = [LanguageInfo('x1', 'Fam')]
        samples = []
        for length in range(2, 9):
            concept = Concept(f'c{length}', 'n')
            segments = tuple('abcdefghij'[:length])
            samples.append(LemmaSample(
                'x1', f'w{length}', concept, PhonemeSeq(segments),
                ConceptRatings(concept, 5.0 - 0.5 * length)))
        analysis = analyze_ttr_len(samples, languages)
        [report] = analysis.reports
        self.assertEqual(report.variable_x, 'seg_len')
        self.assertAlmostEqual(report.result.r, -1.0, places=12)
        self.assertEqual(report.result.n, 7)
        [skipped] = analysis.diagnostics
        self.assertEqual(skipped.variable_x, 'ttr')
        self.assertTrue(skipped.reason.startswith('zero_variance'))


class RunConfigCase(AppCase):
    def test_validation(self):
        with self.assertRaises(ConfigError):
            RunConfig().validate()
        with self.assertRaises(ConfigError):
            table1_config(self.tmp).update({'alpha': '1.5'}, 'cli').validate()
        with self.assertRaises(ConfigError):
            RunConfig(lexicon=str(self.tmp / 'missing.tsv')).validate()
        with self.assertRaises(ConfigError):
            RunConfig(mode='sloppy').validate(inputs=False)
        self.assertIs(table1_config(self.tmp).validate().strict, True)

    def test_config_file_keys(self):
        config = RunConfig().update_from_file(
            'run.cfg', {'alpha': '0.01', 'normalize-underscores': 'true',
                        'mode': 'lenient'})
        self.assertEqual(config.alpha, 0.01)
        self.assertTrue(config.normalize_underscores)
        self.assertFalse(config.strict)
        with self.assertRaises(ConfigError):
            RunConfig().update_from_file('run.cfg', {'colour': 'blue'})


class CliTestCase(AppCase):
    def setUp(self):
        super().setUp()
        self.runner = self.app.test_cli_runner()
        self.out = str(self.tmp / 'output')

    def invoke(self, *args):
        return self.runner.invoke(args=list(args))

    def build_table1(self, *extra):
        result = self.invoke('build', *table1_inputs(), '--out-dir', self.out,
                             *extra)
        self.assertEqual(result.exit_code, 0, result.output)
        return result


class CliCase(CliTestCase):
    def test_build_golden(self):
        self.build_table1()
        out = Path(self.out)
        self.assertEqual((out / 'dataset.tsv').read_bytes(),
                         (TABLE1 / 'golden_dataset.tsv').read_bytes())
        manifest = json.loads((out / 'manifest.json').read_text())
        counts = manifest['counts']
        self.assertEqual(counts['dataset_rows'],
                         counts['concept_pair_witnesses'])
        self.assertEqual(counts['dataset_rows'], 5)
        self.assertEqual(len(manifest['inputs']), 9)
        for name in ('graph.tsv', 'phonology.tsv', 'concepts.tsv',
                     'summary.tsv', 'summary.json', 'language_counts.tsv',
                     'phoneme_ratings_initial.tsv',
                     'phoneme_ratings_last.tsv', 'languages.csv'):
            self.assertTrue((out / name).is_file(), name)

    def test_build_from_config_file(self):
        lines = ['lexicon', 'pronunciations', 'concreteness', 'affect',
                 'feature-table', 'languages']
        args = table1_inputs()
        config = self.write('run.cfg', ''.join(
            f'{key}={args[args.index("--" + key) + 1]}\n' for key in lines)
            + 'normalize-underscores=true\n')
        result = self.invoke('build', '--config', str(config),
                             '--out-dir', self.out)
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual((Path(self.out) / 'dataset.tsv').read_bytes(),
                         (TABLE1 / 'golden_dataset.tsv').read_bytes())

    def test_build_deterministic(self):
        self.build_table1()
        out = Path(self.out)
        first = {p.name: p.read_bytes() for p in out.iterdir()
                 if p.name != 'manifest.json'}
        manifest = json.loads((out / 'manifest.json').read_text())
        self.build_table1()
        second = {p.name: p.read_bytes() for p in out.iterdir()
                  if p.name != 'manifest.json'}
        self.assertEqual(first, second)
        again = json.loads((out / 'manifest.json').read_text())
        manifest.pop('wall_clock')
        again.pop('wall_clock')
        self.assertEqual(manifest, again)

    def test_missing_lexicon(self):
        result = self.invoke('build', '--lexicon',
                             str(self.tmp / 'nope.tsv'), '--out-dir',
                             self.out)
        self.assertEqual(result.exit_code, 2)
        self.assertIn('error[config_error]', result.output)
        self.assertFalse(Path(self.out).exists())

    def test_strict_and_lenient(self):
        dirty = (TABLE1 / 'lexicon.tsv').read_text(encoding='utf-8') + \
            'fa\tpāp\tdad#x#1\n'
        path = self.write('dirty.tsv', dirty)
        args = table1_inputs()
        args[args.index('--lexicon') + 1] = str(path)
        result = self.invoke('build', *args, '--out-dir', self.out)
        self.assertEqual(result.exit_code, 1)
        self.assertIn(f'error[malformed_synset_id] {path}:13',
                      result.output)
        self.assertFalse((Path(self.out) / 'dataset.tsv').exists())
        result = self.invoke('build', *args, '--out-dir', self.out,
                             '--lenient')
        self.assertEqual(result.exit_code, 0, result.output)
        manifest = json.loads((Path(self.out) / 'manifest.json').read_text())
        self.assertEqual(len(manifest['ingest'][0]['errors']), 1)
        self.assertEqual((Path(self.out) / 'dataset.tsv').read_bytes(),
                         (TABLE1 / 'golden_dataset.tsv').read_bytes())

    def test_summary_command(self):
        result = self.invoke('summary', *table1_inputs(), '--json')
        self.assertEqual(result.exit_code, 0, result.output)
        output = result.output
        stats = json.loads(output[output.index('{'):output.rindex('}') + 1])
        self.assertEqual(stats['entries'], 10)
        self.assertEqual(stats['colex_patterns'], 5)
        result = self.invoke('summary', *table1_inputs())
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn('colex patterns', result.output)
        self.assertFalse(Path(self.out).exists())

    def test_analyze(self):
        result = self.invoke('analyze', 'colex-distance', '--out-dir',
                             self.out)
        self.assertEqual(result.exit_code, 2)
        self.assertIn('error[missing_artifact]', result.output)
        self.build_table1()
        result = self.invoke('analyze', 'colex-distance', '--out-dir',
                             self.out)
        self.assertEqual(result.exit_code, 0, result.output)
        report = json.loads((Path(self.out) / 'reports'
                             / 'colex-distance.json').read_text())
        self.assertEqual(report['reports'], [])
        self.assertEqual(len(report['diagnostics']), 12)
        result = self.invoke('analyze', 'phoneme-position', '--position',
                             'initial', '--rating', 'valence', '--out-dir',
                             self.out)
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertTrue((Path(self.out) / 'reports' /
                         'phoneme-position_initial_valence.tsv').is_file())

    def test_analyze_unknown(self):
        result = self.invoke('analyze', 'tea-leaves', '--out-dir', self.out)
        self.assertEqual(result.exit_code, 2)

    def test_rebuild_without_languages(self):
        self.build_table1()
        languages = Path(self.out) / 'languages.csv'
        self.assertTrue(languages.is_file())
        args = table1_inputs()
        i = args.index('--languages')
        del args[i:i + 2]
        result = self.invoke('build', *args, '--out-dir', self.out)
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertFalse(languages.exists())
        result = self.invoke('analyze', 'ttr-len', '--out-dir', self.out)
        self.assertEqual(result.exit_code, 2)
        self.assertIn(f'error[missing_artifact] {languages}', result.output)

    def test_unwritable_out_dir(self):
        blocker = self.write('blocker', 'a file, not a directory\n')
        result = self.invoke('build', *table1_inputs(), '--out-dir',
                             str(blocker))
        self.assertEqual(result.exit_code, 1)
        self.assertIn(f'error[io_error] {blocker / "graph.tsv"}',
                      result.output)
        self.assertNotIn('Traceback', result.output)

    def corrupt(self, name, line, edit):
        path = Path(self.out) / name
        lines = path.read_text(encoding='utf-8').split('\n')
        cells = lines[line - 1].split('\t')
        lines[line - 1] = '\t'.join(edit(cells))
        path.write_text('\n'.join(lines), encoding='utf-8')
        return path

    def assert_parse_error(self, location, *analysis):
        result = self.invoke('analyze', *analysis, '--out-dir', self.out)
        self.assertEqual(result.exit_code, 1)
        self.assertIn(f'error[parse_error] {location}', result.output)
        self.assertNotIn('Traceback', result.output)

    def test_corrupt_artifacts(self):
        self.build_table1()
        path = self.corrupt('concepts.tsv', 2,
                            lambda cells: cells[:2] + ['abc'] + cells[3:])
        self.assert_parse_error(f'{path}:2', 'colex-distance')
        self.build_table1()
        path = self.corrupt('concepts.tsv', 3, lambda cells: cells[:-1])
        self.assert_parse_error(f'{path}:3', 'distance-matrix')
        self.build_table1()
        path = self.corrupt('phonology.tsv', 2,
                            lambda cells: cells[:7] + ['x'] + cells[8:])
        self.assert_parse_error(f'{path}:2', 'features')
        self.build_table1()
        (Path(self.out) / 'graph.tsv').write_bytes(b'\xff\xfe\n')
        result = self.invoke('analyze', 'colex-distance', '--out-dir',
                             self.out)
        self.assertEqual(result.exit_code, 1)
        self.assertIn('error[io_error]', result.output)

    def test_unknown_segment_context(self):
        features = (TABLE1 / 'features.csv').read_text(encoding='utf-8')
        path = self.write('features.csv', ''.join(
            line for line in features.splitlines(keepends=True)
            if not line.startswith('ɾ,')))
        args = table1_inputs()
        args[args.index('--feature-table') + 1] = str(path)
        result = self.invoke('build', *args, '--out-dir', self.out)
        self.assertEqual(result.exit_code, 1)
        source = TABLE1 / 'pronunciations' / 'es_broad.tsv'
        self.assertIn(f'error[unknown_segment] {source}', result.output)
        self.assertIn("es 'pare'", result.output)
        self.assertIn(str(path), result.output)
        result = self.invoke('build', *args, '--out-dir', self.out,
                             '--lenient')
        self.assertEqual(result.exit_code, 0, result.output)

    def test_subgraph(self):
        self.build_table1()
        result = self.invoke('subgraph', 'dad', '--depth', '1', '--out-dir',
                             self.out)
        self.assertEqual(result.exit_code, 0, result.output)
        dot = (Path(self.out) / 'subgraph_dad_1.dot').read_text()
        for name in ('pope', 'sire', 'santa claus'):
            self.assertIn(name, dot)
        result = self.invoke('subgraph', 'zzz', '--out-dir', self.out)
        self.assertEqual(result.exit_code, 1)
        self.assertIn('error[unknown_concept]', result.output)
        result = self.invoke('subgraph', 'dad', '--depth', '0',
                             '--out-dir', self.out)
        self.assertEqual(result.exit_code, 2)


class SynthCorpusCase(CliTestCase):
    analyses = [
        ('colex-distance',),
        ('distance-matrix',),
        ('phoneme-position', '--position', 'initial'),
        ('phoneme-position', '--position', 'last', '--rating', 'valence'),
        ('features', '--rating', 'arousal'),
        ('ttr-len',),
    ]

    def synthesize(self):
        corpus_dir = self.tmp / 'corpus'
        result = self.invoke('synthesize', str(corpus_dir), '--seed', '3')
        self.assertEqual(result.exit_code, 0, result.output)
        return corpus_dir / 'corpus.cfg'

    def run_all(self, config):
        result = self.invoke('build', '--config', str(config), '--out-dir',
                             self.out)
        self.assertEqual(result.exit_code, 0, result.output)
        for args in self.analyses:
            result = self.invoke('analyze', *args, '--out-dir', self.out)
            self.assertEqual(result.exit_code, 0, result.output)
        return {str(p.relative_to(self.out)): p.read_bytes()
                for p in sorted(Path(self.out).rglob('*'))
                if p.is_file() and p.name != 'manifest.json'}

    def test_corpus_shape(self):
        corpus = generate_corpus(seed=3)
        self.assertGreaterEqual(len(corpus.entries), 2000)
        self.assertGreaterEqual(len(corpus.languages), 12)
        self.assertGreaterEqual(len({i.family for i in corpus.languages}), 5)
        self.assertEqual(corpus.entries, generate_corpus(seed=3).entries)

    def test_counts_drift_apart(self):
        corpus = generate_corpus(seed=3)
        records = derive_concept_graph(construct_graph(corpus.entries))
        self.assertTrue(any(r.n_lemmas < r.n_languages for r in records))
        self.assertTrue(any(r.n_colex > r.n_languages for r in records))
        self.assertTrue(any(r.n_colex > r.n_lemmas for r in records))
        self.assertFalse(all(r.n_colex == r.n_lemmas == r.n_languages
                             for r in records))

    def test_end_to_end_determinism(self):
        config = self.synthesize()
        first = self.run_all(config)
        self.assertIn('reports/features_arousal.json', first)
        shutil.rmtree(self.out)
        self.assertEqual(first, self.run_all(config))

    def test_sign_recovery(self):
        config = self.synthesize()
        start = time.perf_counter()
        self.run_all(config)
        self.assertLess(time.perf_counter() - start, 10)
        report = json.loads((Path(self.out) / 'reports'
                             / 'colex-distance.json').read_text())
        [cell] = [r for r in report['reports']
                  if r['variable_x'] == 'n_colex'
                  and r['variable_y'] == 'conc_dist']
        self.assertLess(cell['r'], -0.3)
        self.assertLess(cell['p'], 0.01)
        self.assertTrue(cell['reported'])


class ApiCase(CliTestCase):
    def setUp(self):
        super().setUp()
        self.client = self.app.test_client()

    def test_before_build(self):
        response = self.client.get('/api/summary')
        self.assertEqual(response.status_code, 404)
        self.assertEqual(response.get_json()['code'], 'missing_artifact')

    def test_routes(self):
        self.build_table1()
        summary = self.client.get('/api/summary').get_json()
        self.assertEqual(summary['entries'], 10)
        data = self.client.get('/api/concepts/dad/neighbors').get_json()
        self.assertEqual([n['concept'] for n in data['neighbors']],
                         ['pope', 'santa claus', 'sire'])
        self.assertEqual(data['edges'][0], {'concept_1': 'dad',
                                            'concept_2': 'pope',
                                            'n_colex': 3})
        response = self.client.get('/api/concepts/zzz/neighbors')
        self.assertEqual(response.status_code, 404)
        self.assertEqual(response.get_json()['code'], 'unknown_concept')
        response = self.client.get('/api/concepts/dad/neighbors?depth=9')
        self.assertEqual(response.status_code, 400)
        response = self.client.get('/api/concepts/dad/subgraph')
        self.assertEqual(response.status_code, 200)
        self.assertIn('pope', response.get_data(as_text=True))
        self.invoke('analyze', 'ttr-len', '--out-dir', self.out)
        report = self.client.get('/api/reports/ttr-len_concreteness')
        self.assertEqual(report.status_code, 200)
        self.assertEqual(report.get_json()['analysis'],
                         'ttr-len:concreteness')
        self.assertEqual(self.client.get('/api/reports/nope').status_code,
                         404)


@unittest.skipUnless(os.environ.get('COLEX_PERF_TESTS') == '1',
                     'set COLEX_PERF_TESTS=1 to run')
class PerformanceCase(unittest.TestCase):
    def test_million_entries(self):
        rng = random.Random(47)
        synsets = [SynsetId(f's{i}', 'n', 1) for i in range(50_000)]
        entries = [LexEntry(f'l{rng.randrange(100)}',
                            f'w{rng.randrange(200_000)}',
                            rng.choice(synsets))
                   for _ in range(1_000_000)]
        start = time.perf_counter()
        graph = construct_graph(entries)
        self.assertLess(time.perf_counter() - start, 60)
        self.assertGreater(len(graph), 0)


if __name__ == '__main__':
    unittest.main(verbosity=2)
