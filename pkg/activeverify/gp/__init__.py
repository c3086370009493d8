# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from .kernel import KernelParams, kernel_eval, kernel_matrix
from .model import (
    GpModel,
    PredictiveDistribution,
    TrainingSet,
    factorize,
    fit,
    posterior_variance,
    predict,
    predict_many,
)
from .likelihood import log_marginal_likelihood
from .optimize import OptimizationResult, initial_params, maximize_likelihood, optimize_hyperparams
from .probability import prob_satisfaction, prob_satisfaction_moments
