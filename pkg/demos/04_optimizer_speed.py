"""Per-step cost of the two manifold optimizers.

The homogeneous-space baseline pays for an N x (N - n) QR factorization every
step; the direct Stiefel update only touches N x n quantities, so its cost
scales linearly in N.
"""

from sympmor.cli import speed_test


def main():
    rows = speed_test([(500, 10), (1000, 10), (2000, 10)])
    rows += speed_test([(4000, 10)], optimizers=("stiefel_decay",))
    print(f"{'optimizer':<16}{'N':>6}{'n':>4}{'seconds/step':>14}")
    for name, N, n, seconds in rows:
        print(f"{name:<16}{N:>6}{n:>4}{seconds:>14.5f}")


if __name__ == "__main__":
    main()
