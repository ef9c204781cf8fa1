"""Build the smallest annular arc algebra and print its multiplication table."""
from annular_webs.algebra import ArcAlgebra
from annular_webs.cli import h1_named_elements


def main():
    alg, named = h1_named_elements(ArcAlgebra(1))
    print(f"H^1 has {len(alg.basis)} basis elements")
    for a in named:
        for b in named:
            prod = named[a] * named[b]
            if not prod.is_zero():
                print(f"  {a} * {b} = {prod}")


if __name__ == "__main__":
    main()
