# -*- coding: utf-8 -*-

from ._base import *
from ._lab import *
from ._main import *
