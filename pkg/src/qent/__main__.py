import sys

from qent.cli import main

sys.exit(main())
