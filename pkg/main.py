# ============================================================================
# MAIN APPLICATION - SPECROUND
# ============================================================================
# Entry point for `python main.py <subcommand>`; the same interface is
# installed as the `specround` script.

import sys

from cli.app import main

# Run the application when executed directly
if __name__ == "__main__":
    sys.exit(main())
