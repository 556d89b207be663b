import sys

from qxir.cli import main

sys.exit(main())
