#!/usr/bin/env python3
"""Exhaustive placement search over a scenario file, written independently
of the Rust code. Prints the scenario fingerprint, the number of feasible
complete placements and the optimal objective at one packet size.

    python3 scripts/oracle_check.py scenarios/paper.toml 1000000
"""
import hashlib
import itertools
import sys
try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib


def main(path, beta):
    raw = open(path, "rb").read()
    sc = tomllib.loads(raw.decode())
    nodes = sc["node"]
    vnfs = {v["name"]: v for v in sc["vnf"]}
    slots = [(c["name"], p, name) for c in sc["chain"] for p, name in enumerate(c["vnfs"])]
    share = {}
    for link in sc.get("link", []):
        for a in link.get("allocation", []):
            share[(link["from"], a["from_vnf"], link["to"], a["to_vnf"])] = a["capacity"]

    feasible = 0
    best = None
    for assign in itertools.product(range(len(nodes)), repeat=len(slots)):
        load = [[0.0, 0.0, 0.0] for _ in nodes]
        for (_, _, name), i in zip(slots, assign):
            v = vnfs[name]
            for r, key in enumerate(("compute", "storage", "transmission")):
                load[i][r] += v[key]
        if any(load[i][r] > nodes[i][key] for i in range(len(nodes)) for r, key in enumerate(("compute", "storage", "transmission"))):
            continue
        total = 0.0
        ok = True
        for s, ((chain, p, name), i) in enumerate(zip(slots, assign)):
            total += vnfs[name]["compute"] * beta / nodes[i]["processing_capacity"]
            if p > 0:
                j = assign[s - 1]
                if j != i:
                    key = (nodes[j]["name"], slots[s - 1][2], nodes[i]["name"], name)
                    if key not in share:
                        ok = False
                        break
                    total += vnfs[slots[s - 1][2]]["transmission"] * beta / share[key]
        if not ok:
            continue
        feasible += 1
        if best is None or total < best:
            best = total
    print(f"fingerprint {hashlib.sha256(raw).hexdigest()}")
    print(f"feasible {feasible}")
    print(f"optimum {best!r}")


if __name__ == "__main__":
    main(sys.argv[1], float(sys.argv[2]))
