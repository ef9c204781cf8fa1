"""Reduce elliptic webs to the non-elliptic basis with the skein relations."""
import random

from annular_webs.cli import random_elliptic_webs
from annular_webs.sl3_webs import reduce_web


def main():
    for w in random_elliptic_webs(5, seed=11):
        ref = reduce_web(w)
        rng = random.Random(0)
        same = all(reduce_web(w, rng=rng) == ref for _ in range(5))
        print(f"web with {len(w.inner_vertices())} vertices -> {len(ref)} basis terms, "
              f"order independent: {same}")
        for (signs, states), coeff in sorted(ref.items()):
            print(f"    {''.join(signs)} {states}: {coeff}")


if __name__ == "__main__":
    main()
