# -*- coding: utf-8 -*-

from ._base import *
from ._error_code import *
