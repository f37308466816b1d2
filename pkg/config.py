import os
from dotenv import load_dotenv

basedir = os.path.abspath(os.path.dirname(__file__))
load_dotenv(os.path.join(basedir, '.env'))

def str_to_bool(value: str, default=False):
    if value is None:
        return default
    return value.strip().lower() in ("1", "true", "t", "yes", "y")


class Config:
    LOG_TO_STDOUT = os.environ.get('LOG_TO_STDOUT')

    # --- Pipeline inputs ---
    LEXICON_PATH = os.environ.get('COLEX_LEXICON')
    PRONUNCIATIONS_DIR = os.environ.get('COLEX_PRONUNCIATIONS')
    CONCRETENESS_PATH = os.environ.get('COLEX_CONCRETENESS')
    AFFECT_PATH = os.environ.get('COLEX_AFFECT')
    FEATURE_TABLE_PATH = os.environ.get('COLEX_FEATURE_TABLE')
    LANGUAGES_PATH = os.environ.get('COLEX_LANGUAGES')

    # --- Pipeline behaviour ---
    PARSE_MODE = os.environ.get('COLEX_MODE', 'strict')
    ALPHA = float(os.environ.get('COLEX_ALPHA', 0.05))
    REPORT_THRESHOLD = float(os.environ.get('COLEX_REPORT_THRESHOLD', 0.1))
    OUT_DIR = os.environ.get('COLEX_OUT_DIR') or os.path.join(basedir, 'output')
    NORMALIZE_UNDERSCORES = str_to_bool(
        os.environ.get('COLEX_NORMALIZE_UNDERSCORES'), default=False)
    RESEGMENT = str_to_bool(os.environ.get('COLEX_RESEGMENT'), default=False)
    AFFECT_MIN = float(os.environ.get('COLEX_AFFECT_MIN', 1.0))
    AFFECT_MAX = float(os.environ.get('COLEX_AFFECT_MAX', 9.0))

    DOT_MAX_PENWIDTH = float(os.environ.get('COLEX_DOT_MAX_PENWIDTH', 8.0))
    NEIGHBORS_MAX_DEPTH = 3
