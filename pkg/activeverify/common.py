# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


class Strategy:
    """
    Acquisition strategy names, as written in experiment configs.
    Every strategy is scored so that larger is more informative.
    """

    ENTROPY = 'entropy'
    """Binary classification entropy of the satisfaction probability."""

    VARIANCE = 'variance'
    """Posterior variance."""

    EMC = 'emc'
    """Closeness to the predicted boundary, scored as `-|mu|`."""

    RANDOM = 'random'
    """I.i.d. uniform scores from the run's strategy stream."""

    ALL = (ENTROPY, VARIANCE, EMC, RANDOM)


class BatchMethod:
    """How a batch of `M` locations is chosen from the current model."""

    KDPP = 'kdpp'
    """Importance draws from the scores, thinned by a k-DPP."""

    APPROX_ENTROPY = 'approx_entropy'
    """Greedy selection with covariance-only updates for pending points."""

    PLAIN_ARGMAX = 'plain_argmax'
    """Top-M scores, no diversity mechanism."""

    ALL = (KDPP, APPROX_ENTROPY, PLAIN_ARGMAX)


class HyperMode:
    """When kernel hyperparameters are re-estimated."""

    OPTIMIZE_EACH_BATCH = 'optimize_each_batch'
    """Maximize the marginal likelihood after every batch, warm-started."""

    STATIC = 'static'
    """Keep the initial hyperparameters for the whole run."""

    ALL = (OPTIMIZE_EACH_BATCH, STATIC)


class Column:
    """Fixed column order of the per-batch run CSV."""

    RUNS = (
        'run_id',
        'strategy',
        'batch_index',
        'training_size',
        'error',
        'filtered_error',
        'coverage',
        'signal_variance',
        'lengthscales',
        'seconds',
    )

    AGGREGATE = (
        'strategy',
        'batch_index',
        'training_size',
        'runs',
        'error_mean',
        'error_std',
        'filtered_error_mean',
        'filtered_error_std',
        'coverage_mean',
    )

    WINRATE = ('competitor', 'batch_index', 'training_size', 'runs', 'win_rate')
