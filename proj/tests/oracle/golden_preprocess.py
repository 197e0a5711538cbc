#!/usr/bin/env python3
"""Computes the frozen expected vectors in fixtures/golden_preprocess.json.

Independent numpy implementation of the encoding pipeline: one-hot blocks
(protocol order seeded icmp/udp/tcp, others first-seen), population-std
standardization, min-max scaling over the standardized training set, with
test-time clamping to [0,1]. Rerun only to regenerate the fixture.
"""
import json
import os

import numpy as np

NUMERIC_COUNT = 38

TRAIN = [
    # (duration, proto, service, flag, a few numerics spread over the range)
    (0, "tcp", "http", "SF", [181, 5450, 0, 0, 1, 0.0, 9]),
    (2, "udp", "domain_u", "SF", [44, 133, 0, 1, 2, 0.05, 1]),
    (0, "tcp", "http", "S0", [0, 0, 1, 0, 123, 1.0, 255]),
    (1, "icmp", "ecr_i", "SF", [1032, 0, 0, 0, 511, 0.61, 255]),
    (0, "tcp", "smtp", "SF", [950, 327, 0, 0, 4, 0.25, 79]),
    (5, "tcp", "ftp_data", "SF", [12983, 0, 0, 0, 1, 0.13, 3]),
    (0, "udp", "private", "SF", [105, 147, 0, 0, 2, 0.0, 254]),
    (0, "tcp", "http", "REJ", [0, 0, 0, 0, 229, 0.94, 255]),
    (3, "tcp", "telnet", "SF", [129, 174, 0, 2, 1, 0.5, 9]),
    (0, "icmp", "eco_i", "SF", [8, 0, 0, 0, 1, 0.0, 1]),
    (0, "tcp", "http", "SF", [239, 486, 0, 0, 8, 0.07, 19]),
    (60, "udp", "domain_u", "SF", [146, 105, 0, 0, 1, 0.0, 2]),
]

PROBES = [
    (0, "tcp", "http", "SF", [200, 1000, 0, 0, 5, 0.1, 100]),
    # unseen service and flag -> zero blocks, oov counted
    (1, "udp", "ntp_u", "SH", [44, 133, 0, 0, 2, 0.0, 1]),
    # duration and src_bytes above every training value -> clamp to 1
    (100, "icmp", "ecr_i", "SF", [99999, 0, 0, 0, 511, 1.0, 255]),
]


def numerics(row):
    duration, _, _, _, extras = row
    out = np.zeros(NUMERIC_COUNT)
    out[0] = duration
    # Scatter the interesting values over fixed numeric slots; the rest stay 0.
    slots = [1, 2, 5, 10, 22, 28, 31]
    for slot, value in zip(slots, extras):
        out[slot] = value
    return out


def to_csv(row):
    def fmt(v):
        v = float(v)
        return str(int(v)) if v == int(v) else repr(v)

    vals = numerics(row)
    fields = [fmt(vals[0]), row[1], row[2], row[3]]
    fields += [fmt(v) for v in vals[1:]]
    fields += ["normal", "0"]
    return ",".join(fields)


def fit_vocabs(rows):
    seeded = ["icmp", "udp", "tcp"]
    protocols = [p for p in seeded if any(r[1] == p for r in rows)]
    for r in rows:
        if r[1] not in protocols:
            protocols.append(r[1])
    services, flags = [], []
    for r in rows:
        if r[2] not in services:
            services.append(r[2])
        if r[3] not in flags:
            flags.append(r[3])
    return protocols, services, flags


def one_hot(row, protocols, services, flags):
    v = np.zeros(len(protocols) + len(services) + len(flags) + NUMERIC_COUNT)
    if row[1] in protocols:
        v[protocols.index(row[1])] = 1.0
    if row[2] in services:
        v[len(protocols) + services.index(row[2])] = 1.0
    if row[3] in flags:
        v[len(protocols) + len(services) + flags.index(row[3])] = 1.0
    v[len(protocols) + len(services) + len(flags):] = numerics(row)
    return v


def main():
    protocols, services, flags = fit_vocabs(TRAIN)
    x = np.stack([one_hot(r, protocols, services, flags) for r in TRAIN])

    mean = x.mean(axis=0)
    std = x.std(axis=0)  # population form
    std_safe = np.where(std > 0, std, 1.0)
    standardized = np.where(std > 0, (x - mean) / std_safe, 0.0)

    lo = standardized.min(axis=0)
    hi = standardized.max(axis=0)
    span = hi - lo

    def transform(row):
        v = one_hot(row, protocols, services, flags)
        s = np.where(std > 0, (v - mean) / std_safe, 0.0)
        n = np.where(span > 0, (s - lo) / np.where(span > 0, span, 1.0), 0.0)
        return np.clip(n, 0.0, 1.0)

    doc = {
        "train_csv": [to_csv(r) for r in TRAIN],
        "probe_csv": [to_csv(r) for r in PROBES],
        "protocol_vocab": protocols,
        "service_vocab": services,
        "flag_vocab": flags,
        "dimension": int(x.shape[1]),
        "train_vectors": [transform(r).tolist() for r in TRAIN],
        "probe_vectors": [transform(r).tolist() for r in PROBES],
    }
    out = os.path.join(os.path.dirname(__file__), "..", "fixtures",
                       "golden_preprocess.json")
    with open(out, "w") as f:
        json.dump(doc, f, indent=1)
    print(f"wrote {out}: dim={doc['dimension']}")


if __name__ == "__main__":
    main()
