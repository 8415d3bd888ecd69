import sys

from thetalink.cli import main

sys.exit(main())
