import sys

from servmine.harness.cli import main

sys.exit(main())
