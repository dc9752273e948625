import sys

from blowuplab.cli.main import main

sys.exit(main())
