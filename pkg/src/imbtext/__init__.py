"""Resampling methods and a bag-of-n-grams pipeline for imbalanced text classification."""

from ._accel import backend
from .adapt import DecompositionRun, apply_oversampler, decompose, ratio_sweep, run_plan
from .classify import LinearModel, SupportSet, predict, train_binary_with_support, train_multiclass
from .evaluate import ConfusionMatrix, MetricsReport, aggregate_folds, confusion, metrics
from .igselect import IgRanking, information_gain, rank_features, select_top
from .neighbors import DistanceIndex, tomek_links
from .resample import (ResamplePlan, ResampleResult, SamplerError, adasyn, condensed_nn, edited_nn,
                       near_miss1, neighborhood_cleaning, one_sided_selection, random_over,
                       random_under, repeated_edited_nn, smote, smote_enn, smote_tomek)
from .textprep import RawDocument, normalize, tokenize
from .vectorize import Dataset, Vocabulary, build_dataset, build_vocabulary, stratified_kfold, stratified_split

__version__ = "0.1.0"
