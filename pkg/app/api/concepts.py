from pathlib import Path

import networkx as nx
from flask import current_app, request

from app import export
from app.api import bp
from app.api.errors import bad_request
from app.colexgraph import neighborhood, export_dot


def _records():
    return export.read_graph(Path(current_app.config['OUT_DIR'])
                             / export.GRAPH_FILE)


def _depth():
    depth = request.args.get('depth', 1, type=int)
    if not 1 <= depth <= current_app.config['NEIGHBORS_MAX_DEPTH']:
        return None
    return depth


@bp.route('/concepts/<concept>/neighbors', methods=['GET'])
def get_neighbors(concept):
    depth = _depth()
    if depth is None:
        return bad_request('depth must be between 1 and {}'.format(
            current_app.config['NEIGHBORS_MAX_DEPTH']))
    sub = neighborhood(_records(), concept, depth)
    focus = concept.strip().lower()
    hops = nx.single_source_shortest_path_length(sub, focus)
    return {
        'concept': focus,
        'depth': depth,
        'neighbors': [{'concept': node, 'hops': hops[node]}
                      for node in sorted(sub.nodes) if node != focus],
        'edges': [{'concept_1': u, 'concept_2': v,
                   'n_colex': sub[u][v]['n_colex']}
                  for u, v in sorted(tuple(sorted(e)) for e in sub.edges)],
    }


@bp.route('/concepts/<concept>/subgraph', methods=['GET'])
def get_subgraph(concept):
    depth = _depth()
    if depth is None:
        return bad_request('depth must be between 1 and {}'.format(
            current_app.config['NEIGHBORS_MAX_DEPTH']))
    dot = export_dot(_records(), concept, depth,
                     max_penwidth=current_app.config['DOT_MAX_PENWIDTH'])
    return dot, 200, {'Content-Type': 'text/vnd.graphviz; charset=utf-8'}
