import sys

from ddqpc.cli import main

sys.exit(main())
