#!/usr/bin/env python
# -*- coding: utf-8 -*-

## Internal modules
from lab.cli import main


if __name__ == "__main__":
    raise SystemExit(main())
