import sys

from corecommittee.cli import main

sys.exit(main())
