# ============================================================================
# ROUNDING PACKAGE
# ============================================================================
# This package contains the spectral clustering pipeline and its rounding
# methods.
#
# Key components:
# - graph.py: Data sets, k-NN / Gaussian similarity, L_rw, connected components
# - spectra.py: Leading eigenpairs of L_rw with a deterministic sign convention
# - partition.py: Canonically labelled partitions
# - binarize.py: Eigenvector binarization and partition overlay
# - naive.py: Overlay rounding, the containment test and q selection by it
# - lcm.py: Latent class model (EM, posterior, hard assignment, BIC, k selection)
# - ltm.py: Latent tree extension, its BIC and the ltm_rounding driver
# - baseline.py: K-means rounding on the leading-eigenvector embedding
# - metrics.py: Rand index and variation of information
# - errors.py: Exception hierarchy shared by every module
#
# Connections:
# - Uses config/settings.py for default tunables and utils/logger.py for logging
# - Used by cli/commands.py, which drives the pipeline end to end
