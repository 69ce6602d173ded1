import sys

from attrition.cli import main

sys.exit(main())
