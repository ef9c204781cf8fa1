"""Compute annular Khovanov homology for a few small diagrams."""
from annular_webs import complex as cx


def show(name, diagram):
    print(name)
    for (h, q, a), (free, torsion) in sorted(cx.homology(diagram).items()):
        tors = "".join(f" + Z/{t}" for t in torsion)
        print(f"  h={h:>2} q={q:>3} a={a:>2}: Z^{free}{tors}")


def main():
    show("contractible unknot", cx.unknot())
    show("essential unknot", cx.essential_unknot())
    show("Hopf link", cx.hopf_link(-1))
    show("right-handed trefoil", cx.trefoil(1))
    show("closure of the 2-braid sigma^2", cx.annular_closure(2, [(0, 1), (0, 1)]))


if __name__ == "__main__":
    main()
