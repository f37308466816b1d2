class ColexError(Exception):
    """Base class for every failure the toolkit reports.

    ``code`` is the machine-readable token printed on the first stderr line,
    ``exit_code`` the process status the CLI exits with.
    """
    code = 'colex_error'
    exit_code = 1
    http_status = 400

    def __init__(self, message, path=None, line=None):
        super().__init__(message)
        self.message = message
        self.path = path
        self.line = line

    @property
    def location(self):
        if self.path is None:
            return '-'
        if self.line is None:
            return str(self.path)
        return f'{self.path}:{self.line}'

    def at(self, path=None, line=None):
        """Attach file/line context (used when an error bubbles up from a
        parser that doesn't know where its text came from)."""
        if path is not None and self.path is None:
            self.path = path
        if line is not None and self.line is None:
            self.line = line
        return self

    def __str__(self):
        if self.path is None and self.line is None:
            return self.message
        if self.path is None:
            return f'line {self.line}: {self.message}'
        return f'{self.location}: {self.message}'

    def to_dict(self):
        return {'code': self.code, 'message': self.message,
                'path': None if self.path is None else str(self.path),
                'line': self.line}


class IoError(ColexError):
    code = 'io_error'


class ParseError(ColexError):
    code = 'parse_error'


class MalformedSynsetId(ParseError):
    code = 'malformed_synset_id'


class EmptyPronunciation(ParseError):
    code = 'empty_pronunciation'


class RangeError(ParseError):
    code = 'range_error'

    def __init__(self, message, path=None, line=None, column=None):
        super().__init__(message, path=path, line=line)
        self.column = column


class DuplicateConcept(ParseError):
    code = 'duplicate_concept'


class WrongColumnCount(ParseError):
    code = 'wrong_column_count'


class InvalidFeatureValue(ParseError):
    code = 'invalid_feature_value'


class DuplicateLanguageCode(ParseError):
    code = 'duplicate_language_code'


class UnknownConcept(ColexError):
    code = 'unknown_concept'
    http_status = 404


class UnknownSegment(ColexError):
    code = 'unknown_segment'


class SegmentationError(ColexError):
    code = 'segmentation_error'

    def __init__(self, message, offset, path=None, line=None):
        super().__init__(message, path=path, line=line)
        self.offset = offset


class OracleScaleExceeded(ColexError):
    code = 'oracle_scale_exceeded'


class StatsError(ColexError):
    code = 'stats_error'


class LengthMismatch(StatsError):
    code = 'length_mismatch'


class TooFewSamples(StatsError):
    code = 'too_few_samples'


class ZeroVariance(StatsError):
    code = 'zero_variance'


class DegenerateIndicator(ZeroVariance):
    code = 'degenerate_indicator'


class ConfigError(ColexError):
    code = 'config_error'
    exit_code = 2


class MissingArtifact(ColexError):
    code = 'missing_artifact'
    exit_code = 2
    http_status = 404
