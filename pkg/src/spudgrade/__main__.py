import sys

from spudgrade.cli import main

sys.exit(main())
