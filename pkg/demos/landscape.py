"""Walk the reference path for J=3.8, h=1 and show where the energy peaks.

    python demos/landscape.py [--out profile.csv]
"""

import argparse

from hexmeta.energy import ModelParams
from hexmeta.harness import write_profile_csv
from hexmeta.refpath import barrier, build_reference_path, hexagon_heights, segment_max
from hexmeta.theory import theory_values


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--J", type=float, default=3.8)
    ap.add_argument("--h", type=float, default=1.0)
    ap.add_argument("--out", default=None)
    a = ap.parse_args()

    params = ModelParams(a.J, a.h)
    tv = theory_values(params)
    path = build_reference_path(params)
    m, idx = barrier(path, params)
    print(f"torus L={path.start.topo.L}, {len(path)} flips, standard phase {path.standard_length} flips")
    print(f"path maximum {m:.6g} at area {sorted(idx)}; closed form {tv.gamma_hex:.6g} at A*={tv.a_star}")

    for r, (hm, where) in hexagon_heights(path, params).items():
        tag = "  <- global" if abs(hm - m) < 1e-9 else ""
        print(f"  E({r}) -> E({r + 1}): max {hm:9.4f} at area {where[0]}{tag}")

    wrap, _ = segment_max(path, params, path.standard_length, len(path))
    print(f"wrap-phase maximum {wrap:.4g} stays below the barrier")
    if a.out:
        write_profile_csv(path, params, a.out)
        print(f"profile written to {a.out}")


if __name__ == "__main__":
    main()
