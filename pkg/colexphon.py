from app import create_app
from app import colexgraph, ingest, phonology, pipeline, ratings, stats

app = create_app()


@app.shell_context_processor
def make_shell_context():
    return {'ingest': ingest, 'colexgraph': colexgraph,
            'phonology': phonology, 'ratings': ratings, 'stats': stats,
            'pipeline': pipeline}
