#!/usr/bin/env python3
"""Generates the committed 2000-record fixture pair (fixture_train.csv /
fixture_test.csv) in NSL-KDD layout: 41 attributes, label, difficulty.

Synthetic but shaped like the real traffic mix: normal records are a blend of
web/mail/dns sessions, anomalies are syn-flood, sweep and password-guessing
caricatures whose numeric profiles differ from normal traffic. The training
half carries every protocol (3), service (70) and flag (11) token at least
once so a transform fitted on it has the full 122-column layout. The test
half includes attack names absent from the mapping file and service tokens
never seen in training, to exercise the unknown-category and
out-of-vocabulary paths. Deterministic; rerun only to regenerate.
"""
import os
import random

SERVICES = [
    "aol", "auth", "bgp", "courier", "csnet_ns", "ctf", "daytime", "discard",
    "domain", "domain_u", "echo", "eco_i", "ecr_i", "efs", "exec", "finger",
    "ftp", "ftp_data", "gopher", "harvest", "hostnames", "http", "http_2784",
    "http_443", "http_8001", "imap4", "IRC", "iso_tsap", "klogin", "kshell",
    "ldap", "link", "login", "mtp", "name", "netbios_dgm", "netbios_ns",
    "netbios_ssn", "netstat", "nnsp", "nntp", "ntp_u", "other", "pm_dump",
    "pop_2", "pop_3", "printer", "private", "red_i", "remote_job", "rje",
    "shell", "smtp", "sql_net", "ssh", "sunrpc", "supdup", "systat", "telnet",
    "tftp_u", "tim_i", "time", "urh_i", "urp_i", "uucp", "uucp_path", "vmnet",
    "whois", "X11", "Z39_50",
]
FLAGS = ["OTH", "REJ", "RSTO", "RSTOS0", "RSTR", "S0", "S1", "S2", "S3", "SF", "SH"]
COMMON_SERVICES = ["http", "smtp", "ftp_data", "domain_u", "other", "private",
                   "telnet", "pop_3", "ftp", "finger"]

N_NUMERIC = 38  # duration + 37 trailing numeric columns


def zeros():
    return [0.0] * N_NUMERIC


# Numeric slot indices (within the 38-vector: 0 = duration, 1 = src_bytes,
# 2 = dst_bytes, ... following the NSL-KDD column order).
DUR, SRC, DST = 0, 1, 2
LAND, WRONG_FRAG, URGENT, HOT, FAILED_LOGINS, LOGGED_IN = 3, 4, 5, 6, 7, 8
NUM_COMPROMISED = 9
COUNT, SRV_COUNT = 19, 20
SERROR, SRV_SERROR, RERROR, SRV_RERROR = 21, 22, 23, 24
SAME_SRV, DIFF_SRV, SRV_DIFF_HOST = 25, 26, 27
DH_COUNT, DH_SRV_COUNT, DH_SAME_SRV, DH_DIFF_SRV = 28, 29, 30, 31
DH_SAME_SRC_PORT, DH_SRV_DIFF_HOST, DH_SERROR = 32, 33, 34
DH_SRV_SERROR, DH_RERROR, DH_SRV_RERROR = 35, 36, 37


def r2(v):
    return round(v, 2)


def normal_record(rng):
    v = zeros()
    v[DUR] = rng.choice([0, 0, 0, 1, 2, rng.randint(0, 40)])
    v[SRC] = rng.randint(40, 2500)
    v[DST] = rng.choice([0, rng.randint(50, 4000)])
    v[LOGGED_IN] = rng.choice([0, 1, 1])
    v[COUNT] = rng.randint(1, 25)
    v[SRV_COUNT] = max(1, int(v[COUNT] * rng.uniform(0.5, 1.0)))
    v[SAME_SRV] = r2(rng.uniform(0.7, 1.0))
    v[DIFF_SRV] = r2(rng.uniform(0.0, 0.08))
    v[DH_COUNT] = rng.randint(1, 90)
    v[DH_SRV_COUNT] = rng.randint(1, 90)
    v[DH_SAME_SRV] = r2(rng.uniform(0.5, 1.0))
    v[DH_SAME_SRC_PORT] = r2(rng.uniform(0.0, 0.15))
    proto = rng.choices(["tcp", "udp", "icmp"], weights=[8, 3, 1])[0]
    service = rng.choice(COMMON_SERVICES if proto == "tcp" else ["domain_u", "ntp_u", "eco_i", "other"])
    flag = rng.choices(["SF", "REJ", "RSTO", "S1"], weights=[20, 1, 1, 1])[0]

    # Minority modes keep every column alive in normal traffic: failed
    # connections, benign multi-service chatter, NAT-style port reuse.
    mode = rng.random()
    if mode < 0.12:  # refused / timed-out sessions
        flag = rng.choice(["REJ", "S0", "RSTO", "RSTR"])
        v[SRC] = rng.choice([0, rng.randint(0, 200)])
        v[DST] = 0
        v[LOGGED_IN] = 0
        if flag in ("S0", "RSTR"):
            v[SERROR] = r2(rng.uniform(0.1, 0.7))
            v[SRV_SERROR] = r2(rng.uniform(0.1, 0.7))
            v[DH_SERROR] = r2(rng.uniform(0.0, 0.5))
            v[DH_SRV_SERROR] = r2(rng.uniform(0.0, 0.5))
        else:
            v[RERROR] = r2(rng.uniform(0.1, 0.7))
            v[SRV_RERROR] = r2(rng.uniform(0.1, 0.7))
            v[DH_RERROR] = r2(rng.uniform(0.0, 0.5))
            v[DH_SRV_RERROR] = r2(rng.uniform(0.0, 0.5))
    elif mode < 0.22:  # multi-service clients
        v[DIFF_SRV] = r2(rng.uniform(0.1, 0.5))
        v[SAME_SRV] = r2(rng.uniform(0.3, 0.8))
        v[SRV_DIFF_HOST] = r2(rng.uniform(0.0, 0.4))
        v[DH_DIFF_SRV] = r2(rng.uniform(0.1, 0.4))
        v[DH_COUNT] = rng.randint(50, 200)
    elif mode < 0.30:  # NAT / proxy port reuse
        v[DH_SAME_SRC_PORT] = r2(rng.uniform(0.3, 0.8))
        v[DH_COUNT] = rng.randint(80, 255)
        v[DH_SRV_COUNT] = rng.randint(80, 255)
        v[COUNT] = rng.randint(10, 90)
        v[SRV_COUNT] = rng.randint(10, 90)
    return v, proto, service, flag, "normal"


def attack_base(rng):
    """Attacks ride on ordinary session structure plus an extreme overlay."""
    v, _, _, _, _ = normal_record(rng)
    return v


def syn_flood(rng):  # neptune-like: the whole serror family pegged high
    v = attack_base(rng)
    v[COUNT] = rng.randint(350, 511)
    v[SRV_COUNT] = rng.randint(200, 511)
    v[SERROR] = r2(rng.uniform(0.95, 1.0))
    v[SRV_SERROR] = r2(rng.uniform(0.95, 1.0))
    v[DH_COUNT] = 255
    v[DH_SRV_COUNT] = rng.randint(180, 255)
    v[DH_SERROR] = r2(rng.uniform(0.95, 1.0))
    v[DH_SRV_SERROR] = r2(rng.uniform(0.95, 1.0))
    return v, "tcp", rng.choice(["private", "http", "telnet"]), rng.choice(["S0", "REJ"]), \
        rng.choice(["neptune", "neptune", "back"])


def flood_icmp(rng):  # smurf-like: bulk echo replies from the whole subnet
    v = attack_base(rng)
    v[SRC] = rng.choice([520, 1032]) * rng.randint(4, 30)
    v[COUNT] = rng.randint(400, 511)
    v[SRV_COUNT] = v[COUNT]
    v[SAME_SRV] = 1.0
    v[SRV_DIFF_HOST] = r2(rng.uniform(0.6, 1.0))
    v[DH_COUNT] = 255
    v[DH_SRV_COUNT] = 255
    v[DH_SAME_SRV] = 1.0
    v[DH_SAME_SRC_PORT] = 1.0
    v[DH_SRV_DIFF_HOST] = r2(rng.uniform(0.5, 1.0))
    return v, "icmp", "ecr_i", "SF", "smurf"


def sweep(rng):  # portsweep/satan-like: rejects across many services/hosts
    v = attack_base(rng)
    v[COUNT] = rng.randint(150, 511)
    v[RERROR] = r2(rng.uniform(0.85, 1.0))
    v[SRV_RERROR] = r2(rng.uniform(0.85, 1.0))
    v[DIFF_SRV] = r2(rng.uniform(0.7, 1.0))
    v[SRV_DIFF_HOST] = r2(rng.uniform(0.5, 1.0))
    v[DH_COUNT] = 255
    v[DH_SRV_COUNT] = rng.randint(150, 255)
    v[DH_DIFF_SRV] = r2(rng.uniform(0.7, 1.0))
    v[DH_SAME_SRC_PORT] = r2(rng.uniform(0.7, 1.0))
    v[DH_RERROR] = r2(rng.uniform(0.85, 1.0))
    v[DH_SRV_RERROR] = r2(rng.uniform(0.85, 1.0))
    proto = rng.choice(["tcp", "icmp"])
    service = "eco_i" if proto == "icmp" else rng.choice(["private", "netstat", "systat"])
    flag = "SF" if proto == "icmp" else rng.choice(["REJ", "RSTR", "SH"])
    return v, proto, service, flag, rng.choice(["ipsweep", "portsweep", "satan", "nmap"])


def password_guess(rng):  # guess_passwd-like (R2L): bursts of failed logins
    v = attack_base(rng)
    v[DST] = rng.randint(200, 500)
    v[FAILED_LOGINS] = rng.randint(3, 5)
    v[HOT] = rng.randint(1, 4)
    v[COUNT] = rng.randint(80, 300)
    v[SRV_COUNT] = v[COUNT]
    v[SAME_SRV] = 1.0
    v[DH_COUNT] = 255
    v[DH_SRV_COUNT] = rng.randint(150, 255)
    v[DH_SAME_SRC_PORT] = r2(rng.uniform(0.4, 0.9))
    v[DH_RERROR] = r2(rng.uniform(0.4, 1.0))
    return v, "tcp", rng.choice(["ftp", "telnet", "pop_3"]), rng.choice(["SF", "RSTO"]), \
        rng.choice(["guess_passwd", "ftp_write", "warezclient"])


def overflow(rng):  # buffer_overflow-like (U2R, rare): long shell sessions
    v = attack_base(rng)
    v[DUR] = rng.randint(600, 3000)
    v[SRC] = rng.randint(4000, 10000)
    v[DST] = rng.randint(2000, 8000)
    v[HOT] = rng.randint(10, 30)
    v[NUM_COMPROMISED] = rng.randint(1, 10)
    v[LOGGED_IN] = 1
    v[SAME_SRV] = 1.0
    return v, "tcp", rng.choice(["telnet", "ftp_data"]), "SF", \
        rng.choice(["buffer_overflow", "rootkit", "loadmodule"])


ANOMALY_MAKERS = [syn_flood, flood_icmp, sweep, password_guess, overflow]
ANOMALY_WEIGHTS = [10, 5, 6, 3, 1]


def format_record(v, proto, service, flag, label, difficulty):
    fields = []
    for x in [v[0]]:
        fields.append(str(int(x)) if float(x) == int(x) else repr(float(x)))
    fields += [proto, service, flag]
    for x in v[1:]:
        fields.append(str(int(x)) if float(x) == int(x) else repr(float(x)))
    fields += [label, str(difficulty)]
    return ",".join(fields)


def vocabulary_sprinkle(rng):
    """Normal one-liners covering every service and flag token."""
    lines = []
    for service in SERVICES:
        v = zeros()
        v[SRC] = rng.randint(40, 2000)
        v[COUNT] = rng.randint(1, 10)
        v[SRV_COUNT] = v[COUNT]
        v[SAME_SRV] = 1.0
        v[DH_COUNT] = rng.randint(1, 100)
        proto = "udp" if service in ("domain_u", "ntp_u", "tftp_u") else \
            "icmp" if service in ("eco_i", "ecr_i", "tim_i", "urh_i", "urp_i", "red_i") else "tcp"
        lines.append((v, proto, service, rng.choice(["SF", "REJ"]), "normal"))
    for flag in FLAGS:
        v = zeros()
        v[SRC] = rng.randint(0, 500)
        v[COUNT] = rng.randint(1, 10)
        v[DH_COUNT] = rng.randint(1, 100)
        lines.append((v, "tcp", "http", flag, "normal"))
    return lines


def main():
    rng = random.Random(20250809)
    here = os.path.join(os.path.dirname(__file__), "..", "fixtures")

    # Training half: 900 normal (including the vocabulary sprinkle), 300 anomalies.
    train = vocabulary_sprinkle(rng)  # 81 records
    while len(train) < 900:
        train.append(normal_record(rng))
    for _ in range(300):
        maker = rng.choices(ANOMALY_MAKERS, weights=ANOMALY_WEIGHTS)[0]
        train.append(maker(rng))
    rng.shuffle(train)

    # Test half: 500 normal, 300 anomalies, including unseen-service normals,
    # attack names outside the mapping file, and a heavier hard-attack share.
    test = []
    for _ in range(495):
        test.append(normal_record(rng))
    for _ in range(5):
        v, _, _, flag, label = normal_record(rng)
        test.append((v, "tcp", rng.choice(["mystery_svc", "shadow_port"]), flag, label))
    for _ in range(280):
        maker = rng.choices(ANOMALY_MAKERS, weights=[8, 4, 7, 6, 2])[0]
        test.append(maker(rng))
    for _ in range(20):
        v, proto, service, flag, _ = rng.choice([syn_flood(rng), sweep(rng)])
        test.append((v, proto, service, flag, rng.choice(["zeroday_flood", "novel_scan"])))
    rng.shuffle(test)

    for name, rows in [("fixture_train.csv", train), ("fixture_test.csv", test)]:
        path = os.path.join(here, name)
        with open(path, "w") as f:
            for row in rows:
                f.write(format_record(*row, difficulty=rng.randint(0, 21)) + "\n")
        print(f"wrote {path}: {len(rows)} records")


if __name__ == "__main__":
    main()
