"""Core modules for Histoseg"""

from .enums import *
from .exceptions import *
from .interfaces import *
from .models import *
