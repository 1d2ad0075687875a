"""Write the gamma sweeps behind the N=6 figures (energies, inversion, fidelity) to CSV files."""
import argparse
import pathlib

from tcground import cli

RUNS = {
    "fig5_delta0.csv": ["--preset", "fig5"],
    "fig6_delta0.2.csv": ["--preset", "fig6"],
    "fig7_delta0.2.csv": ["--preset", "fig7"],
    "fig7_delta0.csv": ["--preset", "fig7", "--delta", "0"],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", nargs="?", default="sweeps")
    args = ap.parse_args()
    out = pathlib.Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for name, extra in RUNS.items():
        code = cli.main(["sweep", *extra, "--output", str(out / name)])
        print(f"{out / name}: exit {code}")


if __name__ == "__main__":
    main()
