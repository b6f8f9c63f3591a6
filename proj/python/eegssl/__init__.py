# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The eegssl Authors

"""Self-supervised graph pretraining for multichannel seizure detection."""

from ._core import (
    IoError,
    NonFiniteError,
    auroc,
    channel_names,
    cli,
    correlation_graph,
    corrupt,
    default_config,
    distance_graph,
    featurize,
    run_arm,
    standard_layout,
    strategies,
    synth_corpus,
    transitions,
)

__all__ = [
    "IoError",
    "NonFiniteError",
    "auroc",
    "channel_names",
    "cli",
    "correlation_graph",
    "corrupt",
    "default_config",
    "distance_graph",
    "featurize",
    "run_arm",
    "standard_layout",
    "strategies",
    "synth_corpus",
    "transitions",
]
__version__ = "0.1.0"
