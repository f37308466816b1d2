from flask import current_app
from app.errors import bp
from app.exceptions import ColexError
from app.api.errors import error_response


@bp.app_errorhandler(ColexError)
def colex_error(error):
    return error_response(error.http_status, error.message, code=error.code)


@bp.app_errorhandler(404)
def not_found_error(error):
    return error_response(404)


@bp.app_errorhandler(500)
def internal_error(error):
    current_app.logger.error('unhandled error: %s', error)
    return error_response(500)
