import logging
from functools import wraps

import click

from main.errors import WitnessError

logger = logging.getLogger(__name__)

EXIT_ERROR = 1


def handles_witness_errors(func):
    """
    Turn toolkit and I/O errors raised inside a command into a logged diagnostic and exit code 1.
    """
    @wraps(func)
    def decorated(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (WitnessError, OSError) as e:
            logger.error(f"{func.__name__}: {e}")
            click.echo(f"Error: {e}", err=True)
            raise SystemExit(EXIT_ERROR)
    return decorated
