"""
Classes module

Generic base classes and the package error hierarchy
"""
__author__ = "J.R. Versteegh"
__copyright__ = "2024, Orca Software"
__contact__ = "j.r.versteegh@orca-st.com"
__version__ = "0.1"
__license__ = "GPL"

import logging
from datetime import datetime

from dateutil import tz as tzone


class Object(object):
    '''Base class with generic constructor'''
    # Define slot to avoid dictionary creation
    __slots__ = []

    def __init__(self, *args, **kwargs):
        super(Object, self).__init__()



class Logable(Object):
    '''Generic class with log property'''

    def __init__(self, *args, **kwargs):
        super(Logable, self).__init__(*args, **kwargs)
        cls = self.__class__
        self._log = logging.getLogger('%s.%s' % (cls.__module__, cls.__name__))

    @property
    def log(self):
        return self._log



class LucasrepError(Exception):
    pass


class ArithError(LucasrepError):
    pass


class PrecisionError(ArithError):
    pass


class DomainError(ArithError):
    pass


class UndecidableError(ArithError):
    '''Enclosure too wide to decide; retry at higher precision'''
    pass


class SequenceError(LucasrepError):
    pass


class BoundError(LucasrepError):
    pass


class ContFracError(LucasrepError):
    pass


class CacheError(ContFracError):
    pass


class ReductionError(LucasrepError):
    pass


class PipelineError(LucasrepError):
    pass


# Failures of the certified arithmetic rather than of the inputs or the proof
CERTIFICATION_ERRORS = (ArithError, ContFracError, ReductionError)


_tzutc = tzone.tzutc()


def utcnow():
    """Timezone aware 'now', used to stamp reports"""
    return datetime.now(tz=_tzutc)
