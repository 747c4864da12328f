import sys

from mcqdisent.cli import main

sys.exit(main())
