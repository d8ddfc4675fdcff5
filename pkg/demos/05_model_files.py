"""Saving, loading and sizing trained models.

The model file stores the quantizer calibration, the flip budgets, the
bit-packed level table, the integer class encoders and the label names.
Storage grows linearly in the hypervector dimension D, which is the whole
point of searching for small-D encodings.
"""

import os
import tempfile

import numpy as np

from hvdesign import (
    confusion_matrix,
    fit_baseline,
    generate_motivational,
    load_model,
    predict_batch,
    save_model,
    total_accuracy,
)

data = generate_motivational(grid_per_axis=25, seed=3)

print(f"{'D':>6}  {'bytes':>8}  {'trainAcc':>8}")
with tempfile.TemporaryDirectory() as tmp:
    for dim in (32, 64, 256, 1024, 2048):
        model = fit_baseline(data, dim, levels=20, seed=0)
        path = os.path.join(tmp, f"model-{dim}.hdcm")
        save_model(model, path)
        acc = total_accuracy(
            confusion_matrix(data.labels, predict_batch(data.features, model), 4)
        )
        print(f"{dim:>6}  {os.path.getsize(path):>8}  {acc:>8.4f}")

    # Round trip: the loaded model is bit-for-bit the one we saved, and the
    # level table is rebuilt from (seed, budget) and verified on load.
    path = os.path.join(tmp, "model-64.hdcm")
    loaded = load_model(path)
    model = fit_baseline(data, 64, levels=20, seed=0)
    same = np.array_equal(
        predict_batch(data.features, loaded), predict_batch(data.features, model)
    )
    print(f"\nround-trip predictions identical: {same}")
