"""Site-suitability analysis for EV charging infrastructure planning.

The package covers the full chain from raw inputs to deliverables: raster
and vector ingest, distance/normalization preprocessing, region
classification, per-region weighted-overlay models with four-level output,
parking-based refinement, image-quality metrics, and paired-tile dataset
export for image-to-image model training.
"""

__version__ = "0.1.0"
