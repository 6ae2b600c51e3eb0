# ============================================================================
# MODELS PACKAGE
# ============================================================================
# This package contains the data models used throughout the application.
#
# Key components:
# - schemas.py: Pydantic models for every JSON artefact (results, run records,
#   metric reports, sweep rows, synthetic shape specifications)
#
# Connections:
# - Used by cli/ for writing results and run records and for replay
# - Used by rounding/metrics.py for MetricReport
# - Used by datasets/ for ShapeSpec
