"""Noise-robust prediction of phone-call behavior from categorical context data.

Naive Bayes scores flag mislabelled training instances below a data-driven
threshold; a C4.5-style tree is then grown on what remains.
"""

from .model import AttributeSchema, Dataset, Instance, class_counts, validate

__all__ = ["AttributeSchema", "Dataset", "Instance", "class_counts", "validate"]
__version__ = "0.1.0"
