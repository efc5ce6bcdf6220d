import sys

from allocgame.cli import main

sys.exit(main())
