"""Command-line front end: JSON in and out, plus the verification suites.

    annular-webs sl2 matchings --n 2
    annular-webs sl2 algebra --n 1 --table
    annular-webs sl2 bimodule tangle.json [other.json] [--twist K]
    annular-webs sl2 homology diagram.json --specialize 0,0
    annular-webs sl3 paths --signs "+-+-" [--states "1,0,-1,0"]
    annular-webs sl3 count --signs "+-+-"
    annular-webs sl3 grow --signs "+++" --states "-1,0,1"
    annular-webs sl3 mincut web.json
    annular-webs sl3 enumerate --signs "+-+-"
    annular-webs sl3 reduce web.json
    annular-webs check <suite> [--seed N] [--max-len L] [--n N]

Usage errors exit with status 2, failed checks with status 1.  Every JSON
document carries ``"schema": "annular-webs/v1"``.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from math import comb

from . import complex as cx
from .algebra import (
    ArcAlgebra,
    Bimodule,
    certify_all,
    composition_check,
    relations_suite,
    twist_check,
)
from .curves import (
    FlatTangle,
    count_matchings,
    enumerate_matchings,
    random_flat_tangle,
    turnback_corpus,
)
from .rings import A1, A2, ONE, ZERO, PolyAlpha, alpha, render_laurent, render_poly
from .sl3_paths import (
    PathError,
    all_sign_strings,
    count_closed_paths,
    enumerate_states,
    honeycomb_count,
    hull_count,
    is_admissible,
    n_minus,
    n_plus,
    parse_signs,
    parse_states,
    path_of,
    render_signs,
    signs_admissible,
)
from .sl3_webs import (
    UnsupportedRelation,
    Web,
    WebError,
    canonical_form,
    enumerate_webs,
    grow,
    is_nonelliptic,
    min_cut_states,
    order_independence_check,
    random_web,
    reduce_web,
)
from .tqft import DOT, UNIT, tau

SCHEMA = "annular-webs/v1"
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


# verification suites


class CheckReport:
    """Per-instance pass/fail record of one suite."""

    def __init__(self, suite):
        self.suite = suite
        self.results = []
        self.start = time.perf_counter()
        self.seconds = 0.0

    def record(self, name, ok, detail=None):
        self.results.append((str(name), bool(ok), detail))

    def finish(self):
        self.seconds = time.perf_counter() - self.start
        return self

    @property
    def failures(self):
        return [(n, d) for n, ok, d in self.results if not ok]

    @property
    def ok(self):
        return bool(self.results) and not self.failures

    def to_json(self):
        return {
            "schema": SCHEMA,
            "suite": self.suite,
            "instances": len(self.results),
            "passed": sum(1 for _, ok, _ in self.results if ok),
            "failed": len(self.failures),
            "failures": [{"instance": n, "detail": None if d is None else str(d)} for n, d in self.failures],
            "seconds": round(self.seconds, 3),
        }


def check_matchings(max_n=6, **_):
    rep = CheckReport("matchings")
    for n in range(max_n + 1):
        rep.record(f"n={n}", count_matchings(n) == comb(2 * n, n) == len(set(enumerate_matchings(n))))
    return rep.finish()


def h1_named_elements(alg=None):
    """The basis of H^1 under the names 1_r, x_r and y^i_{r,s} (r, s in {0, 1})."""
    alg = alg or ArcAlgebra(1)
    names = {}
    for r in (0, 1):
        (key,) = alg.closure(r, r).keys
        names[f"1_{r}"] = alg.element((r, r, ((key, UNIT),)))
        names[f"x_{r}"] = alg.element((r, r, ((key, DOT),)))
        s = 1 - r
        (key,) = alg.closure(r, s).keys
        for i in (1, 2):
            names[f"y{i}_{r}{s}"] = alg.element((r, s, ((key, i),)))
    return alg, names


def h1_expected_products():
    """The multiplication table of H^1 in the named basis, as (x, y, expected x*y)."""
    out = []
    for r in (0, 1):
        s = 1 - r
        one, x = f"1_{r}", f"x_{r}"
        out.append((one, one, {one: ONE}))
        out.append((one, x, {x: ONE}))
        out.append((x, one, {x: ONE}))
        out.append((x, x, {x: A1 + A2, one: -(A1 * A2)}))
        for i in (1, 2):
            y = f"y{i}_{r}{s}"
            out.append((one, y, {y: ONE}))
            out.append((y, f"1_{s}", {y: ONE}))
            out.append((x, y, {y: alpha(tau(i))}))
            out.append((y, f"x_{s}", {y: alpha(tau(i))}))
            for j in (1, 2):
                back = f"y{j}_{s}{r}"
                out.append((back, y, {f"x_{s}": ONE, f"1_{s}": -alpha(i)} if i == j else {}))
    return out


def check_table(**_):
    rep = CheckReport("table")
    alg, named = h1_named_elements()
    rep.record("basis size 8", len(alg.basis) == 8 and len(named) == 8)
    seen = set()
    for a, b, expect in h1_expected_products():
        want = alg.zero()
        for name, c in expect.items():
            want = want + named[name] * c
        rep.record(f"{a}*{b}", named[a] * named[b] == want, named[a] * named[b])
        seen.add((a, b))
    # every remaining pair of basis elements multiplies to zero (idempotents do not match)
    for a in named:
        for b in named:
            if (a, b) not in seen:
                rep.record(f"{a}*{b}=0", (named[a] * named[b]).is_zero())
    return rep.finish()


def check_axioms(max_n=2, samples=10000, seed=DEFAULT_SEED, random_n=3, **_):
    rep = CheckReport("axioms")
    for n in range(max_n + 1):
        alg = ArcAlgebra(n)
        one = alg.unit()
        elems = [alg.element(k) for k in alg.basis]
        unit_ok = all(one * e == e and e * one == e for e in elems)
        rep.record(f"unit n={n}", unit_ok)
        bad = 0
        for x in elems:
            for y in elems:
                xy = x * y
                for z in elems:
                    if (xy * z) != (x * (y * z)):
                        bad += 1
        rep.record(f"associativity n={n} ({len(elems) ** 3} triples)", bad == 0, bad)
    if samples and random_n is not None:
        rng = random.Random(seed)
        alg = ArcAlgebra(random_n)
        keys = alg.basis
        one = alg.unit()
        bad = 0
        for _ in range(samples):
            x, y, z = (alg.element(rng.choice(keys)) for _ in range(3))
            if (x * y) * z != x * (y * z) or one * x != x or x * one != x:
                bad += 1
        rep.record(f"associativity n={random_n} ({samples} random triples)", bad == 0, bad)
    return rep.finish()


def check_frobenius(max_n=2, **_):
    rep = CheckReport("frobenius")
    from .linalg import poly_det

    for n in range(max_n + 1):
        alg = ArcAlgebra(n)
        elems = {k: alg.element(k) for k in alg.basis}
        sym = all(alg.pairing(elems[a], elems[b]) == alg.pairing(elems[b], elems[a]) for a in alg.basis for b in alg.basis)
        rep.record(f"trace symmetric n={n}", sym)
        nondeg = True
        for key, (rows, cols, mat) in alg.gram_blocks().items():
            if not rows:
                continue
            det = poly_det(mat)
            if not (det.is_constant() and det.constant() in (1, -1)):
                nondeg = False
        rep.record(f"gram nondegenerate n={n}", nondeg)
        dual = alg.dual_basis()
        counit = True
        for k, e in elems.items():
            d = alg.comultiply(e, dual)
            if alg.counit_left(d) != e or alg.counit_right(d) != e:
                counit = False
        rep.record(f"counit laws n={n}", counit)
    return rep.finish()


def check_generation(max_n=3, **_):
    rep = CheckReport("generation")
    for n in range(max_n + 1):
        alg = ArcAlgebra(n)
        certs, failures = certify_all(alg)
        rep.record(f"n={n} ({len(certs)} certificates)", not failures and len(certs) == len(alg.basis), failures[:3])
    return rep.finish()


def check_relations(max_n=3, **_):
    rep = CheckReport("relations")
    for n in range(1, max_n + 1):
        alg = ArcAlgebra(n)
        for inst in relations_suite(alg):
            rep.record(f"n={n} {inst.family} {inst.where}", inst.holds)
    return rep.finish()


def random_composable_pairs(count=20, seed=DEFAULT_SEED):
    """Pairs (T2, T1) alternating between (2,1)/(1,2) and (1,2)/(2,1) shapes."""
    rng = random.Random(seed)
    out = []
    for k in range(count):
        if k % 2 == 0:
            t1, t2 = random_flat_tangle(rng, 4, 2), random_flat_tangle(rng, 2, 4)
        else:
            t1, t2 = random_flat_tangle(rng, 2, 4), random_flat_tangle(rng, 4, 2)
        out.append((t2, t1))
    return out


def check_bimodule(seed=DEFAULT_SEED, random_pairs=20, **_):
    rep = CheckReport("bimodule")
    algebras = {}
    corpus = turnback_corpus()
    for i, t1 in enumerate(corpus):
        for j, t2 in enumerate(corpus):
            r = composition_check(t2, t1, seed=seed, algebras=algebras)
            rep.record(f"compose turnback[{j}] o turnback[{i}]", r.ok, r.failures[:2])
    for k, (t2, t1) in enumerate(random_composable_pairs(random_pairs, seed)):
        r = composition_check(t2, t1, seed=seed, algebras=algebras)
        rep.record(f"compose random pair {k}", r.ok, r.failures[:2])
    for i, t in enumerate(corpus):
        for p in (1, -1):
            fails = twist_check(t, p, algebras=algebras)
            rep.record(f"twist^{p} turnback[{i}]", not fails, fails[:2])
    for k, (t2, t1) in enumerate(random_composable_pairs(random_pairs, seed)):
        for t in (t1, t2):
            fails = twist_check(t, 1, algebras=algebras)
            rep.record(f"twist random pair {k} {t.top}x{t.bottom}", not fails, fails[:2])
    return rep.finish()


def check_homology(**_):
    rep = CheckReport("homology")
    h = cx.homology(cx.unknot())
    rep.record("contractible unknot", h == {(0, -1, 0): (1, []), (0, 1, 0): (1, [])}, h)
    h = cx.homology(cx.essential_unknot())
    rep.record("essential unknot", h == {(0, 0, -1): (1, []), (0, 0, 1): (1, [])}, h)
    cache = {}

    def hom(d):
        if d not in cache:
            c = cx.cube(d)
            if not c.d_squared_zero():
                raise AssertionError("d^2 != 0")
            cache[d] = c.specialize().homology()
        return cache[d]

    for name, d1, d2 in cx.reidemeister_corpus():
        rep.record(name, hom(d1) == hom(d2))
    return rep.finish()


def admissible_pairs(max_len):
    for length in range(1, max_len + 1):
        for signs in all_sign_strings(length):
            for states in enumerate_states(signs):
                yield signs, states


def check_bijection(max_len=5, **_):
    rep = CheckReport("bijection")
    for signs, states in admissible_pairs(max_len):
        w = grow(signs, states)
        back = min_cut_states(w)
        rep.record(f"M(G({render_signs(signs)},{states}))", back == (signs, states), back)
    for length in range(1, max_len + 1):
        for signs in all_sign_strings(length):
            for states, w in enumerate_webs(signs).items():
                s2, j2 = min_cut_states(w)
                rep.record(f"G(M(web {render_signs(signs)},{states}))",
                           canonical_form(grow(s2, j2)) == canonical_form(w))
    return rep.finish()


def check_counting(max_len=6, **_):
    rep = CheckReport("counting")
    rep.record("|B(+-)| = 3", len(enumerate_webs("+-")) == 3)
    rep.record("|B(+++)| = 6", len(enumerate_webs("+++")) == 6)
    for length in range(1, max_len + 1):
        for signs in all_sign_strings(length):
            n_enum = len(enumerate_states(signs))
            rep.record(f"count {render_signs(signs)}", n_enum == hull_count(n_plus(signs), n_minus(signs)), n_enum)
    for n, want in ((1, 3), (2, 15), (3, 93)):
        rep.record(f"honeycomb n={n}", honeycomb_count(n) == want == count_closed_paths("+-" * n))
    return rep.finish()


def check_growth(max_len=5, trials=10, seed=DEFAULT_SEED, **_):
    rep = CheckReport("growth")
    for k, (signs, states) in enumerate(admissible_pairs(max_len)):
        w = grow(signs, states)
        ok, witness = is_nonelliptic(w)
        rep.record(f"non-elliptic {render_signs(signs)},{states}", ok, witness)
        rep.record(f"order independent {render_signs(signs)},{states}",
                   order_independence_check(signs, states, trials=trials, seed=seed + k))
    return rep.finish()


def random_elliptic_webs(count=200, seed=DEFAULT_SEED, max_len=4):
    """Random elliptic webs whose reduction needs no essential circle value."""
    rng = random.Random(seed)
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 100 * count:
            raise RuntimeError("could not generate enough random webs")
        length = rng.randint(0, max_len)
        signs = tuple(rng.choice("+-") for _ in range(length))
        try:
            w = random_web(rng, signs, extra_moves=rng.randint(1, 5))
        except WebError:
            continue
        if is_nonelliptic(w)[0]:
            continue
        try:
            reduce_web(w)
        except UnsupportedRelation:
            continue
        out.append(w)
    return out


def check_confluence(count=200, seed=DEFAULT_SEED, orders=5, **_):
    rep = CheckReport("confluence")
    for k, w in enumerate(random_elliptic_webs(count, seed)):
        ref = reduce_web(w)
        rng = random.Random(seed * 7919 + k)
        same = all(reduce_web(w, rng=rng) == ref for _ in range(orders))
        rep.record(f"web {k}", same)
    return rep.finish()


SUITES = {
    "matchings": check_matchings,
    "table": check_table,
    "axioms": check_axioms,
    "frobenius": check_frobenius,
    "generation": check_generation,
    "relations": check_relations,
    "bimodule": check_bimodule,
    "homology": check_homology,
    "bijection": check_bijection,
    "counting": check_counting,
    "growth": check_growth,
    "confluence": check_confluence,
}


# command implementations


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}")


def _signs(args, required=True):
    if args.signs is None:
        if required:
            raise UsageError("--signs is required")
        return None
    return parse_signs(args.signs)


def cmd_sl2_matchings(args):
    n = 1 if args.n is None else args.n
    ms = enumerate_matchings(n)
    return {"schema": SCHEMA, "n": n, "count": len(ms), "matchings": [m.to_json() for m in ms]}, 0


def cmd_sl2_algebra(args):
    n = 1 if args.n is None else args.n
    alg = ArcAlgebra(n)
    basis = [{"name": alg.name(k), "qdeg": alg.qdeg(k), "adeg": alg.adeg(k)} for k in alg.basis]
    out = {"schema": SCHEMA, "n": n, "rank": render_laurent(alg.rank()), "size": len(basis), "basis": basis,
           "matchings": [m.to_json() for m in alg.matchings]}
    if args.table:
        table = []
        for x in alg.basis:
            for y in alg.basis:
                if x[1] != y[0]:
                    continue
                p = alg.element(x) * alg.element(y)
                table.append({"left": alg.name(x), "right": alg.name(y),
                              "product": {alg.name(k): render_poly(v) for k, v in sorted(p.terms.items())}})
        out["table"] = table
    return out, 0


def cmd_sl2_bimodule(args):
    if not args.files:
        raise UsageError("bimodule needs one or two tangle files")
    tangles = [FlatTangle.from_json(_load(f)) for f in args.files]
    if len(tangles) == 1:
        t = tangles[0]
        m = Bimodule(t)
        out = {"schema": SCHEMA, "tangle": t.to_json(), "rank": render_laurent(m.rank()), "size": len(m.basis)}
        status = 0
        if args.twist:
            fails = twist_check(t, args.twist)
            out["twist"] = {"power": args.twist, "ok": not fails, "failures": [str(f) for f in fails[:10]]}
            status = 0 if not fails else 1
        return out, status
    if len(tangles) != 2:
        raise UsageError("bimodule takes at most two tangles (upper then lower)")
    t2, t1 = tangles
    if t2.bottom != t1.top:
        raise UsageError("tangles are not composable")
    seed = DEFAULT_SEED if args.seed is None else args.seed
    rep = composition_check(t2, t1, seed=seed)
    out = {
        "schema": SCHEMA,
        "ok": rep.ok,
        "projective_left": rep.projective_left,
        "projective_right": rep.projective_right,
        "balanced": rep.balanced,
        "balanced_checks": rep.balanced_checks,
        "invertible": rep.invertible,
        "graded": rep.graded,
        "blocks": rep.blocks,
        "failures": [str(f) for f in rep.failures[:10]],
    }
    return out, 0 if rep.ok else 1


def _parse_specialize(text):
    if text is None:
        return 0, 0
    try:
        a1, a2 = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError("--specialize takes two integers: a1,a2")
    return a1, a2


def cmd_sl2_homology(args):
    if len(args.files) != 1:
        raise UsageError("homology needs exactly one diagram file")
    try:
        d = cx.AnnularDiagram.from_json(_load(args.files[0]))
    except (cx.DiagramError, KeyError, TypeError) as exc:
        raise UsageError(f"malformed diagram: {exc}")
    if not d.closed:
        raise UsageError("homology is computed for closed diagrams")
    a1, a2 = _parse_specialize(args.specialize)
    rep = cx.homology_report(d, a1, a2)
    return rep, 0 if rep["d_squared_zero"] else 1


def cmd_sl3_paths(args):
    signs = _signs(args)
    if args.states is not None:
        states = parse_states(args.states)
        if len(states) != len(signs):
            raise UsageError("sign and state strings have different lengths")
        return {"schema": SCHEMA, "signs": render_signs(signs), "states": list(states),
                "path": [list(p) for p in path_of(signs, states)], "admissible": is_admissible(signs, states)}, 0
    states = enumerate_states(signs)
    return {"schema": SCHEMA, "signs": render_signs(signs), "count": len(states),
            "states": [list(j) for j in states]}, 0


def cmd_sl3_count(args):
    signs = _signs(args)
    return {"schema": SCHEMA, "signs": render_signs(signs), "admissible": signs_admissible(signs),
            "count": count_closed_paths(signs)}, 0


def cmd_sl3_grow(args):
    signs = _signs(args)
    if args.states is None:
        raise UsageError("--states is required")
    states = parse_states(args.states)
    rng = random.Random(args.seed) if args.seed is not None else None
    try:
        w = grow(signs, states, rng=rng)
    except WebError as exc:
        raise UsageError(str(exc))
    return w.to_json(), 0


def _load_web(args):
    if len(args.files) != 1:
        raise UsageError("expected one web file")
    try:
        return Web.from_json(_load(args.files[0]))
    except (WebError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed web: {exc}")


def cmd_sl3_mincut(args):
    w = _load_web(args)
    ok, witness = is_nonelliptic(w)
    if not ok:
        return {"schema": SCHEMA, "nonelliptic": False, "witness": [str(x) for x in witness]}, 1
    signs, states = min_cut_states(w)
    return {"schema": SCHEMA, "nonelliptic": True, "signs": render_signs(signs), "states": list(states)}, 0


def cmd_sl3_enumerate(args):
    signs = _signs(args)
    webs = enumerate_webs(signs)
    return {"schema": SCHEMA, "signs": render_signs(signs), "count": len(webs),
            "webs": [{"states": list(j), "web": w.to_json()} for j, w in webs.items()]}, 0


def cmd_sl3_reduce(args):
    w = _load_web(args)
    rng = random.Random(args.seed) if args.seed is not None else None
    try:
        vec = reduce_web(w, rng=rng)
    except UnsupportedRelation as exc:
        return {"schema": SCHEMA, "error": str(exc)}, 1
    terms = [{"signs": render_signs(s), "states": list(j), "coefficient": render_laurent(c)}
             for (s, j), c in sorted(vec.items())]
    return {"schema": SCHEMA, "terms": terms}, 0


def cmd_check(args):
    if args.list:
        return {"schema": SCHEMA, "suites": sorted(SUITES)}, 0
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(sorted(SUITES))}")
    kwargs = {"seed": DEFAULT_SEED if args.seed is None else args.seed}
    if args.max_len is not None:
        kwargs["max_len"] = args.max_len
    if args.n is not None:
        kwargs["max_n"] = args.n
    rep = SUITES[args.suite](**kwargs)
    return rep.to_json(), 0 if rep.ok else 1


SL2 = {"matchings": cmd_sl2_matchings, "algebra": cmd_sl2_algebra,
       "bimodule": cmd_sl2_bimodule, "homology": cmd_sl2_homology}
SL3 = {"paths": cmd_sl3_paths, "count": cmd_sl3_count, "grow": cmd_sl3_grow,
       "mincut": cmd_sl3_mincut, "enumerate": cmd_sl3_enumerate, "reduce": cmd_sl3_reduce}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="annular-webs", description="Annular SL(2) arc algebras and SL(3) webs.")
    sub = p.add_subparsers(dest="group")

    def common(sp):
        sp.add_argument("--out", help="write JSON here instead of stdout")
        sp.add_argument("--seed", type=int, default=None, help=f"random seed (default {DEFAULT_SEED} for checks)")

    s2 = sub.add_parser("sl2", help="SL(2) arc algebras, bimodules and homology")
    s2.add_argument("command", choices=sorted(SL2))
    s2.add_argument("files", nargs="*")
    s2.add_argument("--n", type=int)
    s2.add_argument("--table", action="store_true", help="include the multiplication table")
    s2.add_argument("--twist", type=int, default=0, help="check invariance under this Dehn twist power")
    s2.add_argument("--specialize", help="a1,a2 integer values (default 0,0)")
    common(s2)

    s3 = sub.add_parser("sl3", help="SL(3) paths and webs")
    s3.add_argument("command", choices=sorted(SL3))
    s3.add_argument("files", nargs="*")
    s3.add_argument("--signs")
    s3.add_argument("--states")
    common(s3)

    ck = sub.add_parser("check", help="run a verification suite")
    ck.add_argument("suite", nargs="?")
    ck.add_argument("--max-len", type=int, dest="max_len")
    ck.add_argument("--n", type=int)
    ck.add_argument("--list", action="store_true")
    common(ck)
    return p


def _join_negative_values(argv):
    """Let state strings such as '-1,0,1' follow --states without being read as flags."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in ("--states", "--signs", "--specialize"):
            val = next(it, None)
            out.append(tok if val is None else f"{tok}={val}")
        else:
            out.append(tok)
    return out


def run(argv=None, stdout=None):
    """Run the CLI; returns the exit status."""
    stdout = stdout or sys.stdout
    argv = _join_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = build_parser().parse_args(argv)
        if args.group is None:
            raise UsageError("choose one of: sl2, sl3, check")
        if args.group == "sl2":
            out, status = SL2[args.command](args)
        elif args.group == "sl3":
            out, status = SL3[args.command](args)
        else:
            if args.suite is None and not args.list:
                raise UsageError("check needs a suite name (or --list)")
            out, status = cmd_check(args)
    except (UsageError, PathError) as exc:
        print(f"annular-webs: error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(out, indent=2, sort_keys=False)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        stdout.write(text + "\n")
    return status


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
