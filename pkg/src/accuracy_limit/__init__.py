"""Classification accuracy limits for overlapping Gaussian classes, the
classifiers compared against them, and layer-wise class separability (GDV)
of trained networks."""

__version__ = "0.1.0"

from .errors import (AccuracyLimitError, ConfigurationError, CoverageError, DomainError, FitError,
                     FormatError, InputError, NumericError, ShapeError)
from .density_limit import (GaussianClassDensity, GridSpec, MixtureProblem, accuracy_from_confusion,
                            confusion_grid, confusion_mc, limit_curve, two_class_problem)
from .dsc import DscControl, generate
from .classifiers import evaluate, fit_classifier, fit_rde
from .metrics import gdv, gdv_sweep
from .features import Epoch, FeatureSpec, apply_transform, extract_features
from .embeddings import classical_mds, layer_gdv_profile
from .neuralnet import LayerSpec, TrainConfig, init_model, train
from .dataset import LabeledDataset, split_dataset
