"""Grow SL(3) webs from state strings and recover the states by minimal cut paths."""
from annular_webs.sl3_paths import enumerate_states, honeycomb_count
from annular_webs.sl3_webs import face_depths, grow, is_nonelliptic, min_cut_states


def main():
    for signs in ("+-", "+++", "+-+-"):
        states = enumerate_states(signs)
        print(f"signs {signs}: {len(states)} admissible state strings")
        for j in states:
            w = grow(signs, j)
            back = min_cut_states(w)[1]
            depths = sorted(f.depth for f in face_depths(w))
            print(f"  J={j} vertices={len(w.inner_vertices())} face depths={depths} "
                  f"non-elliptic={is_nonelliptic(w)[0]} recovered={back == j}")
    print("honeycomb counts:", [honeycomb_count(n) for n in range(1, 6)])


if __name__ == "__main__":
    main()
