"""
Status output for the CLI and scripts.

Lines go to stderr so stdout can carry JSON. Library modules only call
progress(), which is a no-op unless the CLI turned on --verbose.
"""

import sys

from tqdm import tqdm

_state = {'quiet': False, 'verbose': False}


def configure(quiet: bool = False, verbose: bool = False):
    _state['quiet'] = quiet
    _state['verbose'] = verbose


def _emit(line: str):
    if not _state['quiet']:
        print(line, file=sys.stderr)


def info(message: str):
    _emit(message)


def ok(message: str):
    _emit(f"  ✓ {message}")


def warn(message: str):
    _emit(f"  ⚠ {message}")


def fail(message: str):
    # failures are shown even with --quiet
    print(f"❌ {message}", file=sys.stderr)


def progress(iterable, desc: str = '', total=None):
    """tqdm over iterable when --verbose is on, plain iterable otherwise."""
    if not _state['verbose'] or _state['quiet']:
        return iterable
    return tqdm(iterable, desc=desc, total=total, file=sys.stderr, leave=False)
