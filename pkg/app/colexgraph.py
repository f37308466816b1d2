"""Colexification graph over synsets and the first-sense concept graph."""
import itertools
import logging
import statistics
from collections import defaultdict

import networkx as nx

from app.exceptions import OracleScaleExceeded, UnknownConcept
from app.ingest import normalize_form
from app.models import ColexEdge, Concept, ConceptPairRecord, SummaryTable, \
    LanguageCount

log = logging.getLogger(__name__)

ORACLE_MAX_ENTRIES = 10_000


class ColexGraph:
    """Synset nodes joined by edges that remember every (lemma, language)
    witnessing the colexification.

    ``edges`` maps each colexified synset pair to its witnesses. Pairs are
    stored as ``(s1, s2)`` with ``s1 < s2``.
    """

    def __init__(self):
        self.nodes = set()
        self._witnesses = defaultdict(set)
        self._edges = None

    @staticmethod
    def canonical(a, b):
        return (a, b) if a <= b else (b, a)

    def add(self, s1, s2, witness):
        if s1 == s2:
            raise ValueError(f'self-colexification of {s1}')
        self._witnesses[self.canonical(s1, s2)].add(witness)
        self.nodes.update((s1, s2))
        self._edges = None

    @property
    def edges(self):
        if self._edges is None:
            self._edges = {pair: ColexEdge(pair, frozenset(ws))
                           for pair, ws in sorted(self._witnesses.items())}
        return self._edges

    def edge(self, a, b):
        return self.edges.get(self.canonical(a, b))

    def __len__(self):
        return len(self._witnesses)

    def __repr__(self):
        return f'<ColexGraph {len(self.nodes)} synsets, {len(self)} pairs>'

    def witness_relation(self):
        return {(pair, w) for pair, ws in self._witnesses.items() for w in ws}

    def witness_total(self):
        return sum(len(ws) for ws in self._witnesses.values())

    @classmethod
    def merge(cls, graphs):
        merged = cls()
        for graph in graphs:
            for pair, ws in graph._witnesses.items():
                merged._witnesses[pair].update(ws)
            merged.nodes.update(graph.nodes)
        return merged


def _vocabularies(entries):
    vocab = defaultdict(set)
    for entry in entries:
        vocab[(entry.language, entry.lemma)].add(entry.synset)
    return vocab


def construct_graph(entries):
    """Every lemma of a language that names two or more synsets joins each
    2-subset of them, with (lemma, language) as witness."""
    graph = ColexGraph()
    for (language, lemma), synsets in _vocabularies(entries).items():
        if len(synsets) < 2:
            continue
        for s1, s2 in itertools.combinations(sorted(synsets), 2):
            graph.add(s1, s2, (lemma, language))
    log.info('colexification graph: %d synsets, %d pairs, %d witnesses',
             len(graph.nodes), len(graph), graph.witness_total())
    return graph


def construct_by_language(entries):
    """One graph per language; ``ColexGraph.merge`` of the values equals
    ``construct_graph(entries)``."""
    shards = defaultdict(list)
    for entry in entries:
        shards[entry.language].append(entry)
    return {language: construct_graph(shard)
            for language, shard in sorted(shards.items())}


def brute_force_colex(entries):
    """Quadratic reference for ``construct_graph``'s witness relation."""
    entries = list(entries)
    if len(entries) > ORACLE_MAX_ENTRIES:
        raise OracleScaleExceeded(
            f'{len(entries)} entries exceed the oracle limit of '
            f'{ORACLE_MAX_ENTRIES}')
    relation = set()
    for i, a in enumerate(entries):
        for b in entries[i + 1:]:
            if a.language == b.language and a.lemma == b.lemma \
                    and a.synset != b.synset:
                relation.add((ColexGraph.canonical(a.synset, b.synset),
                              (a.lemma, a.language)))
    return relation


def concept_of(synset, normalize_underscores=False):
    word = normalize_form(synset.sense_word, underscores=normalize_underscores)
    return Concept(word.lower(), synset.pos)


def derive_concept_graph(graph, normalize_underscores=False):
    """Keep the edges joining two first senses and name their endpoints by
    sense word. A concept pair keeps the orientation of its (canonically
    ordered) synset pair."""
    pairs = {}
    dropped = 0
    for (s1, s2), edge in graph.edges.items():
        if not (s1.is_first_sense and s2.is_first_sense):
            dropped += 1
            continue
        c1 = concept_of(s1, normalize_underscores)
        c2 = concept_of(s2, normalize_underscores)
        if c1 == c2:
            log.warning('%s and %s name the same concept %r, edge skipped',
                        s1, s2, c1.word)
            continue
        key = frozenset((c1, c2))
        if key in pairs:
            pairs[key][4].update(edge.witnesses)
        else:
            pairs[key] = [c1, c2, s1, s2, set(edge.witnesses)]
    records = [ConceptPairRecord(c1, c2, s1, s2, frozenset(ws))
               for c1, c2, s1, s2, ws in pairs.values()]
    records.sort(key=lambda r: r.key)
    log.info('concept graph: %d pairs kept, %d non-first-sense edges dropped',
             len(records), dropped)
    return records


def concept_network(records):
    """Undirected networkx view of the concept graph keyed by display word;
    edge attribute ``n_colex`` sums pairs that share a display form."""
    network = nx.Graph()
    for record in records:
        u, v = str(record.concept1), str(record.concept2)
        if network.has_edge(u, v):
            network[u][v]['n_colex'] += record.n_colex
        else:
            network.add_edge(u, v, n_colex=record.n_colex)
    return network


def neighborhood(records, focus, depth):
    if depth < 1:
        raise ValueError('depth must be at least 1')
    network = concept_network(records)
    focus = focus.strip().lower()
    if focus not in network:
        raise UnknownConcept(f'concept {focus!r} is not in the concept graph')
    return nx.ego_graph(network, focus, radius=depth)


def export_dot(records, focus, depth, max_penwidth=8.0):
    """Render the breadth-first neighborhood of ``focus`` as undirected DOT;
    pen widths scale with the number of colexifications."""
    sub = neighborhood(records, focus, depth)
    focus = focus.strip().lower()
    heaviest = max((d['n_colex'] for _, _, d in sub.edges(data=True)),
                   default=1)
    ordered = nx.Graph(name='colexification')
    for node in sorted(sub.nodes):
        if node == focus:
            ordered.add_node(node, shape='doublecircle')
        else:
            ordered.add_node(node)
    for u, v in sorted(tuple(sorted(e)) for e in sub.edges):
        weight = sub[u][v]['n_colex']
        ordered.add_edge(u, v, weight=weight,
                         penwidth=f'{max_penwidth * weight / heaviest:.2f}')
    return nx.nx_pydot.to_pydot(ordered).to_string()


def _median_inventory(phoneme_join):
    inventories = defaultdict(set)
    for entry, phonemes in phoneme_join:
        if phonemes is not None:
            inventories[entry.language].update(phonemes.segments)
    if not inventories:
        return 0
    return statistics.median(len(s) for s in inventories.values())


def summary_stats(entries, graph, records, phoneme_join, ratings_map,
                  languages=None):
    """Dataset statistics in the column order of the published summary
    table, plus the synset-pair, language and inventory figures."""
    concepts = {c for r in records for c in (r.concept1, r.concept2)}
    rated = [ratings_map[c] for c in concepts if c in ratings_map]
    joined = {(e.language, e.lemma) for e, p in phoneme_join if p is not None}
    codes = {e.language for e in entries}
    families = {i.family for i in (languages or []) if i.code in codes}
    return SummaryTable(
        entries=len(entries),
        colex_patterns=graph.witness_total(),
        synsets=len(graph.nodes),
        lexicalizations=len({e.lemma for e in entries}),
        phoneme_lemma_pairs=len(joined),
        concepts=len(concepts),
        concepts_with_affect=sum(1 for r in rated if r.has_affect),
        concepts_with_concreteness=sum(
            1 for r in rated if r.concreteness is not None),
        synset_pairs=len(graph),
        languages=len(codes),
        families=len(families),
        median_phoneme_inventory=_median_inventory(phoneme_join),
    )


def language_counts(records, phoneme_join, languages):
    """Per-language concept/lemma coverage with family and macroarea."""
    info = {i.code: i for i in languages}
    concepts = defaultdict(set)
    lemmas = defaultdict(set)
    for record in records:
        for lemma, language in record.witnesses:
            concepts[language].update((record.concept1, record.concept2))
            lemmas[language].add(lemma)
    with_phonemes = defaultdict(set)
    for entry, phonemes in phoneme_join:
        if phonemes is not None and entry.lemma in lemmas[entry.language]:
            with_phonemes[entry.language].add(entry.lemma)
    rows = []
    for language in sorted(concepts):
        meta = info.get(language)
        rows.append(LanguageCount(
            language, meta.family if meta else None,
            meta.macroarea if meta else None, len(concepts[language]),
            len(lemmas[language]), len(with_phonemes[language])))
    return rows
