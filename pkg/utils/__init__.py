# ============================================================================
# UTILS PACKAGE
# ============================================================================
# This package contains utility functions and helpers used throughout the application.
#
# Key components:
# - logger.py: Shared application logger and handler setup (text or JSON)
#
# Connections:
# - Imported by rounding/, datasets/ and cli/ for consistent logging
# - setup_logging() is called once by cli/app.py
