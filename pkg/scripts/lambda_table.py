"""Ground-state excitation number lambda0 for the discrete couplings of the fig8/fig9 presets."""
import argparse
import time

from tcground import PRESETS, compare_point


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("presets", nargs="*", default=["fig8", "fig9"])
    args = ap.parse_args()
    print("preset,n_atoms,delta,gamma,region,lambda_sc,lambda_q,e_q,fidelity,seconds")
    for name in args.presets:
        preset = PRESETS[name]
        for g in preset.gammas:
            t0 = time.perf_counter()
            rec = compare_point(preset.params(g))
            dt = time.perf_counter() - t0
            print(f"{name},{preset.n_atoms},{preset.delta:g},{g:g},{rec.region},"
                  f"{rec.lambda_sc:.6f},{rec.lambda_q:g},{rec.e_q:.12g},{rec.fidelity:.6f},{dt:.3f}")


if __name__ == "__main__":
    main()
