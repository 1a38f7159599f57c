import json
import sys
import warnings
from pathlib import Path


class GroupSpecError(ValueError):
    """Malformed group description, or a group too large to enumerate."""


class PreconditionError(ValueError):
    """An operation was called outside the range its guarantee covers."""


class InvariantError(RuntimeError):
    """An internal invariant failed. This always signals a bug."""


class SearchBudgetError(RuntimeError):
    """An exhaustive search would exceed its node or evaluation budget."""


def warn_outside_precondition(extra_text=''):
    warnings.warn('Running outside the proven/conjectured range.' + extra_text,
                  RuntimeWarning)


def load_json_arg(text):
    """Decode a JSON command-line value.

    `@path` reads the file, `-` reads standard input, anything else is
    parsed inline.
    """
    if text == '-':
        raw = sys.stdin.read()
    elif text.startswith('@'):
        raw = Path(text[1:]).read_text()
    else:
        raw = text
    try:
        return json.loads(raw)
    except json.JSONDecodeError as error:
        raise PreconditionError(f'Invalid JSON input: {error}') from error


def popcount(v):
    return bin(v).count('1')
