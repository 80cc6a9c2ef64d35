# -*- coding: utf-8 -*-

from ._base import *
from ._io import *
from . import _validator as validator
