# ============================================================================
# CONFIG PACKAGE
# ============================================================================
# This package contains configuration settings for the application.
#
# Key components:
# - settings.py: Defines the pipeline settings loaded from SPECROUND_* variables
#
# Connections:
# - Read by every rounding/ module for default tunables (delta, K, smoothing, ...)
# - Overridden by cli/app.py from command-line flags
