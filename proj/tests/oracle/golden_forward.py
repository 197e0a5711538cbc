#!/usr/bin/env python3
"""Computes fixtures/golden_forward.json: an independent forward pass
(numpy matrix arithmetic) through a small fixed encoder-decoder, frozen as
expected values for the C++ implementation. Rerun only to regenerate."""
import json
import os

import numpy as np

EPS_ACTIVE = 1e-6


def main():
    rng = np.random.default_rng(20240817)
    n, m = 6, 4
    w1 = rng.uniform(-0.9, 0.9, size=(m, n))
    b1 = rng.uniform(-0.5, 0.5, size=m)
    w2 = rng.uniform(-0.9, 0.9, size=(n, m))
    b2 = rng.uniform(-0.5, 0.5, size=n)
    x = rng.uniform(0.0, 1.0, size=n)

    pre1 = w1 @ x + b1
    z = np.maximum(pre1, 0.0)
    pre2 = w2 @ z + b2
    xhat = 1.0 / (1.0 + np.exp(-pre2))

    doc = {
        "input_dim": n,
        "hidden_dim": m,
        "w1": w1.tolist(),
        "b1": b1.tolist(),
        "w2": w2.tolist(),
        "b2": b2.tolist(),
        "x": x.tolist(),
        "latent": z.tolist(),
        "reconstruction": xhat.tolist(),
        "reconstruction_error": float(np.sum((x - xhat) ** 2)),
        "sparsity_value": float(np.count_nonzero(z > EPS_ACTIVE)) / m,
        "eps_active": EPS_ACTIVE,
    }
    out = os.path.join(os.path.dirname(__file__), "..", "fixtures",
                       "golden_forward.json")
    with open(out, "w") as f:
        json.dump(doc, f, indent=1)
    print(f"wrote {out}: sparsity={doc['sparsity_value']}, "
          f"err={doc['reconstruction_error']:.6f}")


if __name__ == "__main__":
    main()
