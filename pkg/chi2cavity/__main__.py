from chi2cavity.cli import main

raise SystemExit(main())
