# ============================================================================
# CLI PACKAGE
# ============================================================================
# This package contains the command-line front end.
#
# Key components:
# - app.py: argparse parser, logging setup and exit-code mapping (main)
# - commands.py: gen, eigen, cluster, sweep, eval and replay handlers
# - records.py: Input hashing, RunRecord persistence and replay checks
# - plots.py: SVG scatter and eigenvector plots (matplotlib, Agg backend)
#
# Connections:
# - Drives rounding/ end to end on inputs from datasets/
# - Serializes models/schemas.py types as JSON
# - main.py and the `specround` script call app.main
