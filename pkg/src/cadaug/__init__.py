"""cadaug: CAD variable-ordering selection with symmetry-based data augmentation."""

__version__ = "0.1.0"
