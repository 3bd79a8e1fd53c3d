"""
Data module

Locations and environment overrides for cached data and working precision
"""
__author__ = "J.R. Versteegh"
__copyright__ = "2024, Orca Software"
__contact__ = "j.r.versteegh@orca-st.com"
__version__ = "0.1"
__license__ = "GPL"

import os

import appdirs


DEFAULT_PRECISION_START = 256
DEFAULT_PRECISION_CAP = 1 << 20


def get_cache_dir():
    try:
        return os.environ['LUCASREP_CACHE_DIR']
    except KeyError:
        return appdirs.user_cache_dir('lucasrep')


def _get_int(name, default):
    try:
        return int(os.environ[name])
    except (KeyError, ValueError):
        return default


def get_precision_start():
    return _get_int('LUCASREP_PRECISION_START', DEFAULT_PRECISION_START)


def get_precision_cap():
    return _get_int('LUCASREP_PRECISION_CAP', DEFAULT_PRECISION_CAP)
