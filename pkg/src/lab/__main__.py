# -*- coding: utf-8 -*-

from lab.cli import main


if __name__ == "__main__":
    raise SystemExit(main())
