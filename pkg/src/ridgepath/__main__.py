import sys

from ridgepath.cli import main

sys.exit(main())
