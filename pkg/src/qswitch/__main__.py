import sys

from qswitch.cli import main

sys.exit(main())
