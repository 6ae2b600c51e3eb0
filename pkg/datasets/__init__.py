# ============================================================================
# DATASETS PACKAGE
# ============================================================================
# This package produces and persists the data the pipeline clusters.
#
# Key components:
# - generator.py: Samples labelled blobs, rings and crescents; noise ladders
# - presets.py: Named ideal-case layouts and the noisy ladder, each with its
#   default similarity function
# - csv_io.py: CSV readers and writers for points, similarity matrices,
#   eigen tables and cluster assignments
#
# Connections:
# - Uses models/schemas.py for ShapeSpec and rounding/graph.py for DataSet
# - Used by cli/commands.py and the test fixtures
