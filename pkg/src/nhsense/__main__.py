import sys

from nhsense.cli import main

sys.exit(main())
