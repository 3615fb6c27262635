import sys

from nystromlab.cli import main

sys.exit(main())
