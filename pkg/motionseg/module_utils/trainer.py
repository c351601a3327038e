# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

"""Mutual learning of the two layers, restarts and best-run selection."""

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import copy
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from operator import itemgetter

import numpy as np

from motionseg.module_utils.checkpoint import TrainedModel, save_checkpoint
from motionseg.module_utils.common import (
    MODES,
    ConfigError,
    DataError,
    InfeasibleLatticeError,
    NumericError,
    display,
    make_rng,
)
from motionseg.module_utils.emission import element_prior
from motionseg.module_utils.lower import (
    ElementPrior,
    LowerModel,
    backward_sample,
    forward_filter,
    random_segmentation,
    resample_sequence,
)
from motionseg.module_utils.model import unit_context
from motionseg.module_utils.upper import (
    UpperModel,
    resample_unit_sequence,
    unit_backward_sample,
    unit_forward_filter,
)

LOWER_STREAM, UPPER_STREAM = 0, 1


def _check_corpus(corpus):
    if not corpus:
        raise DataError("Corpus is empty")
    dims = set(s.dim for s in corpus)
    if len(dims) != 1:
        raise DataError("Corpus mixes dimensions %s" % sorted(dims))
    ids = [s.id for s in corpus]
    if len(set(ids)) != len(ids):
        raise DataError("Corpus has duplicate sequence ids")
    return dims.pop()


def train(corpus, h, mode, seed=None, checkpoint_path=None, freeze_prior=False):
    """Run mutual learning for h.iterations iterations from one seed.

    Every iteration resamples the element segmentation of each series in
    corpus order, then (unless mode is lower-only) the unit segmentation of
    each element sequence, and finally rebuilds the element prior P(c | b)
    from the unit statistics. Lower and upper draws use separate RNG streams.

    Arguments:
        corpus {list} -- TimeSeries
        h {Hyperparams} -- validated hyperparameters
        mode {str} -- ws, meu, meb or lower-only
        seed {int} -- run seed, defaults to h.seed
        checkpoint_path {str} -- overwritten after every iteration when set
        freeze_prior {bool} -- keep P(c | b) uniform even with an upper layer

    Returns:
        TrainedModel
    """
    if mode not in MODES:
        raise ConfigError("Unknown mode %s, expected one of %s" % (mode, ", ".join(MODES)))
    dim = _check_corpus(corpus)
    seed = h.seed if seed is None else seed
    lower = LowerModel(h, dim, make_rng(seed, 0, LOWER_STREAM))
    upper = None if mode == 'lower-only' else UpperModel(h, mode)
    prior = ElementPrior.uniform_prior(h.n_element_classes)
    run = TrainedModel(seed=seed, mode=mode, hyperparams=h, lower=lower, upper=upper, prior=prior)

    init_rng = make_rng(seed, 0, UPPER_STREAM)
    for series in corpus:
        lower.add(series, random_segmentation(series, h.n_element_classes,
                                              h.element_duration_mean, h.max_element_len,
                                              init_rng))

    for m in range(1, h.iterations + 1):
        lower_rng = make_rng(seed, m, LOWER_STREAM)
        upper_rng = make_rng(seed, m, UPPER_STREAM)
        loglik = 0.0
        elem_segs = []
        for series in corpus:
            context = None
            if upper is not None and not run.prior.uniform:
                context = unit_context(lower.assignments.get(series.id),
                                       upper.segmentation(series.id), series.length)
            try:
                seg, score = resample_sequence(series, lower, lower_rng,
                                               prior=run.prior, context=context)
            except InfeasibleLatticeError as e:
                raise e.locate(sequence_id=series.id, iteration=m)
            elem_segs.append(seg)
            loglik += score

        unit_segs = [None] * len(corpus)
        if upper is not None:
            for i, (series, seg) in enumerate(zip(corpus, elem_segs)):
                try:
                    unit_segs[i], score = resample_unit_sequence(series.id, seg.labels, upper, upper_rng)
                except InfeasibleLatticeError as e:
                    raise e.locate(sequence_id=series.id, iteration=m)
                loglik += score
            if not freeze_prior:
                run.prior = element_prior(upper.counts)

        if not np.isfinite(loglik):
            raise NumericError("Joint log-likelihood is not finite at iteration %d (seed %d)"
                               % (m, seed))
        run.element_segmentations = elem_segs
        run.unit_segmentations = unit_segs
        run.trace.append(float(loglik))
        run.iteration = m
        display.v("MOTIONSEG-TRAIN-DEBUG: seed %d mode %s iteration %d/%d loglik %.3f units %d"
                  % (seed, mode, m, h.iterations, loglik, run.distinct_units()))
        if checkpoint_path:
            save_checkpoint(checkpoint_path, run)
    empty = [c for c, gp in enumerate(lower.gps) if len(gp) == 0]
    if empty:
        display.warning("Seed %d ended with empty element classes %s" % (seed, empty))
    return run


def _train_one(args):
    corpus, h, mode, seed, checkpoint_path, freeze_prior = args
    return seed, train(corpus, h, mode, seed=seed, checkpoint_path=checkpoint_path,
                       freeze_prior=freeze_prior)


def train_restarts(corpus, h, mode, n_jobs=1, checkpoint_dir=None, freeze_prior=False):
    """Train h.n_restarts runs with seeds h.seed, h.seed + 1, ...

    Runs are returned in seed order whatever n_jobs is.
    """
    seeds = [h.seed + r for r in range(h.n_restarts)]
    jobs = []
    for seed in seeds:
        path = None
        if checkpoint_dir:
            path = os.path.join(checkpoint_dir, "%s-seed%d.json" % (mode, seed))
        jobs.append((corpus, h, mode, seed, path, freeze_prior))
    if n_jobs is None or n_jobs <= 1:
        results = [_train_one(job) for job in jobs]
    else:
        results = []
        with ProcessPoolExecutor(max_workers=n_jobs) as executor:
            wait_for = [executor.submit(_train_one, job) for job in jobs]
            for completed in as_completed(wait_for):
                results.append(completed.result())
    return [run for _, run in sorted(results, key=itemgetter(0))]


def select_best(runs):
    """Run with the highest final joint log-likelihood; ties go to the lowest seed."""
    runs = list(runs)
    if not runs:
        raise ValueError("select_best needs at least one run")
    return max(runs, key=lambda run: (run.final_loglik, -run.seed))


def segment(model, corpus, seed=0):
    """Segment series with a trained model without updating it.

    One lower pass with a uniform prior, one upper pass, then, when the
    model has an upper layer, a second lower pass under the learned prior
    with the first pass as unit context, followed by a final upper pass.

    Returns:
        tuple -- (element segmentations, unit segmentations)
    """
    lower, upper = model.lower, model.upper
    # unseen WS strings get ids in a private vocabulary
    counts = copy.deepcopy(upper.counts) if upper is not None else None
    uniform = ElementPrior.uniform_prior(model.hyperparams.n_element_classes)
    rng = make_rng(seed, 0)
    elem_segs, unit_segs = [], []
    for series in corpus:
        if series.dim != lower.dim:
            raise DataError("Series %s has dimension %d, model expects %d"
                            % (series.id, series.dim, lower.dim))
        lattice = forward_filter(series, lower.gps, lower.trans, lower.dur, prior=uniform)
        elem_seg = backward_sample(lattice, rng, series.id)
        unit_seg = None
        if upper is not None:
            unit_seg = _sample_units(series.id, elem_seg.labels, upper, counts, rng)
            context = unit_context(elem_seg, unit_seg, series.length)
            lattice = forward_filter(series, lower.gps, lower.trans, lower.dur,
                                     prior=model.prior, unit_context=context,
                                     seg_ll=lattice.seg_ll)
            elem_seg = backward_sample(lattice, rng, series.id)
            unit_seg = _sample_units(series.id, elem_seg.labels, upper, counts, rng)
        elem_segs.append(elem_seg)
        unit_segs.append(unit_seg)
        display.vvv("MOTIONSEG-SEGMENT-DEBUG: %s -> %d elements" % (series.id, len(elem_seg)))
    return elem_segs, unit_segs


def _sample_units(series_id, labels, upper, counts, rng):
    lattice = unit_forward_filter(labels, counts, upper.trans, upper.dur, series_id=series_id)
    unit_seg, _ = unit_backward_sample(lattice, rng, series_id, em=counts, c_seq=labels)
    return unit_seg
