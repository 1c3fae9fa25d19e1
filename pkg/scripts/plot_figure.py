"""Plot sqrt(estimate / analytic variance) per DGP from a summary.csv.

Needs matplotlib, which is not a package dependency.

    python scripts/plot_figure.py results/reference/summary.csv [-o figure.png]
"""

import argparse
import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("summary")
    parser.add_argument("-o", "--output", default="figure.png")
    args = parser.parse_args()

    with open(args.summary, newline="") as fh:
        rows = list(csv.DictReader(fh))

    fig, ax = plt.subplots(figsize=(6, 0.9 * len(rows) + 1.2))
    for i, row in enumerate(rows):
        y = len(rows) - 1 - i
        for offset, key, colour, name in ((0.12, "naive", "tab:red", "naive"), (-0.12, "unbiased", "tab:blue", "unbiased")):
            mean = float(row[f"sqrt_ratio_{key}_bb_mean"])
            lo = float(row[f"sqrt_ratio_{key}_bb_lo"])
            hi = float(row[f"sqrt_ratio_{key}_bb_hi"])
            ax.errorbar(mean, y + offset, xerr=[[mean - lo], [hi - mean]], fmt="o", color=colour,
                        capsize=3, label=name if i == 0 else None)
        ax.plot(float(row["sqrt_ratio_analytic_expected_naive"]), y + 0.12, "x", color="k",
                label="E[naive] (analytic)" if i == 0 else None)
    ax.axvline(1.0, color="grey", lw=1, ls="--")
    ax.set_yticks(range(len(rows)), [r["dgp"] for r in reversed(rows)])
    ax.set_xlabel("sqrt(estimate / analytic variance)")
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)
    print("wrote", args.output)


if __name__ == "__main__":
    main()
