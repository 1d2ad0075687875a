"""Trial state projected on one lambda sector against the exact sector ground state."""
import argparse

from tcground import PRESETS, find_ground, reduced_distributions, restricted_trial, trial_coefficients


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="fig12")
    args = ap.parse_args()
    preset = PRESETS[args.preset]
    params = preset.params()

    gs = find_ground(params)
    lam = preset.lam if preset.lam is not None else gs.lam
    r = restricted_trial(trial_coefficients(params), lam)
    photon_q, _ = reduced_distributions(gs)
    q = dict(zip(photon_q.index.tolist(), photon_q.weights))

    print("nu,trial_restricted,quantum")
    for nu, p in zip(r.photon_probs.index, r.photon_probs.weights):
        print(f"{nu:g},{p:.12g},{q.get(int(nu), 0.0):.12g}")
    print(f"# lambda {lam:g} (exact ground lambda {gs.lam:g}); trial weight {r.weight:.5f}")
    print(f"# mean photons: restricted trial {r.photon_probs.mean():.4f}, exact {photon_q.mean():.4f}")


if __name__ == "__main__":
    main()
