"""Eight binary IQ-plane discriminators behind one fit / predict interface."""

from .base import (DISPLAY_NAMES, ClassifierSpec, Kind, Model, TrainedModel, fit, load_model,
                   predict, predict_proba, save_model)
from . import adaboost, fidelity, forest, gp, naive_bayes, nn, svm  # noqa: F401  (registration)
from .adaboost import AdaBoost, fit_adaboost
from .fidelity import FidelityFit, FidelityFitParams, fit_fidelity, fit_fidelity_params
from .forest import RandomForest, fit_random_forest
from .gp import GaussianProcessClassifier, fit_gp
from .naive_bayes import GaussianNB, fit_naive_bayes
from .nn import MLP, NeuralNet, fit_nn
from .svm import LinearSVM, RbfSVM, fit_linear_svm, fit_rbf_svm, rbf_kernel

ALL_KINDS = tuple(Kind)

__all__ = [
    "ALL_KINDS", "DISPLAY_NAMES", "AdaBoost", "ClassifierSpec", "FidelityFit", "FidelityFitParams",
    "GaussianNB", "GaussianProcessClassifier", "Kind", "LinearSVM", "MLP", "Model", "NeuralNet",
    "RandomForest", "RbfSVM", "TrainedModel", "fit", "fit_adaboost", "fit_fidelity",
    "fit_fidelity_params", "fit_gp", "fit_linear_svm", "fit_naive_bayes", "fit_nn",
    "fit_random_forest", "fit_rbf_svm", "load_model", "predict", "predict_proba", "rbf_kernel",
    "save_model",
]
