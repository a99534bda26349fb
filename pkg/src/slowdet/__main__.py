import sys

from slowdet.cli import main

sys.exit(main())
