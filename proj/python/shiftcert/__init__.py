# Copyright 2026 The shiftcert Authors
# SPDX-License-Identifier: Apache-2.0
"""Certified accuracy under Wasserstein distribution shifts."""

from shiftcert._core import (  # noqa: F401
    Classifier,
    Dataset,
    Error,
    certify,
    clopper_pearson_lower,
    color_shift,
    generate_synthetic,
    hoeffding_lower,
    hsv_to_rgb,
    hue_shift,
    load_classifier,
    max_normalize,
    psi,
    read_dataset,
    rgb_to_hsv,
    run_cli,
    sv_shift,
    train,
    tv_oracle,
)

__version__ = "0.1.0"
