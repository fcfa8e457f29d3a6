import sys

from peakkit.cli.main import main

sys.exit(main())
