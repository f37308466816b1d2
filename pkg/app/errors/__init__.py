"""JSON error handlers for the exceptions in app.exceptions."""
from flask import Blueprint

bp = Blueprint('errors', __name__)

from app.errors import handlers
