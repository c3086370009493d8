# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


import sys

from .harness.cli import main


sys.exit(main())
