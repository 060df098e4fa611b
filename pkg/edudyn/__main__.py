"""``python -m edudyn``."""

from edudyn.cla import main

raise SystemExit(main())
