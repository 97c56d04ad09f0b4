import sys

from oect_rc.cli import main

sys.exit(main())
