import re
from pathlib import Path

from flask import current_app

from app import export
from app.api import bp
from app.api.errors import bad_request

_REPORT_NAME = re.compile(r'[A-Za-z0-9_-]+')


def _out_dir():
    return Path(current_app.config['OUT_DIR'])


@bp.route('/summary', methods=['GET'])
def get_summary():
    return export.read_json(_out_dir() / export.SUMMARY_JSON)


@bp.route('/reports/<name>', methods=['GET'])
def get_report(name):
    if not _REPORT_NAME.fullmatch(name):
        return bad_request('bad report name')
    return export.read_json(_out_dir() / export.REPORTS_DIR / f'{name}.json')
