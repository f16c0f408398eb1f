"""Master run, configuration and exports; ``kleinian`` command line entry point.

Exit codes: 0 success, 2 budget exceeded (partial result written),
3 precision failure, 4 configuration error.
"""
import argparse
from dataclasses import dataclass, field as dc_field
import json
import logging
import math
from pathlib import Path
import sys
import time

import numpy as np

from . import errors
from .ball import Isometry, ball_to_klein, boost, classify, klein_to_ball
from .basis import (Diagnostics, generators_is_full_group, normalized_basis, presentation,
                    word_enumerator, word_to_text)
from .enumeration import EnumSchedule, Enumerator
from .field import dedekind_zeta_2, parse_field
from .poly import edge_cycles, inverse_map, tangency_cycles
from .quat import covolume, make_splitting, matrix_order, parse_algebra, parse_order
from .reduce import GroupContext, PrecisionBudget
from .vol import polyhedron_volume

log = logging.getLogger("kleinian")

SCHEMA_VERSION = 1

EXIT_OK, EXIT_BUDGET, EXIT_PRECISION, EXIT_CONFIG = 0, 2, 3, 4

_CONFIG_ERRORS = (errors.ConfigError, errors.NotATR, errors.ReduciblePoly, errors.IndexPrimeUnspecified,
                  errors.NotMaximal, errors.NotKleinian)
_PRECISION_ERRORS = (errors.PrecisionExhausted, errors.NonFiniteOrder, errors.NotPositiveDefinite,
                     errors.DegenerateBasePoint, errors.DegenerateIncidence, errors.NotPaired)


@dataclass
class JobConfig:
    raw: dict
    field: object = None
    algebra: object = None
    order: object = None
    generators: list = None      # explicit matrix generators (non-arithmetic path)
    budget: PrecisionBudget = None
    backend: str = "det"
    enum_params: dict = dc_field(default_factory=dict)
    seed: int = 0
    max_rounds: int = 12
    routine_passes: int = 25
    base_point_retries: int = 5
    base_point: tuple = None
    prime_bound: int = 20000
    alt_pairing: bool = False
    name: str = "job"

    @classmethod
    def load(cls, path):
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise errors.ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(raw, name=Path(path).stem)

    @classmethod
    def from_dict(cls, raw, name="job"):
        if not isinstance(raw, dict):
            raise errors.ConfigError("config must be a JSON object")
        cfg = cls(raw=raw, name=raw.get("name", name))
        try:
            cfg.budget = PrecisionBudget.from_config(raw.get("precision"))
            en = raw.get("enumeration", {})
            cfg.backend = en.get("backend", "det")
            if cfg.backend not in ("det", "prob"):
                raise errors.ConfigError("enumeration.backend must be 'det' or 'prob'")
            cfg.enum_params = {k: float(en[k]) for k in ("alpha", "beta", "gamma", "eta", "eps") if k in en}
            cfg.seed = int(raw.get("seed", 0))
            b = raw.get("budget", {})
            cfg.max_rounds = int(b.get("max_rounds", 12))
            cfg.routine_passes = int(b.get("routine_passes", 25))
            cfg.base_point_retries = int(b.get("base_point_retries", 5))
            cfg.alt_pairing = bool(b.get("alt_pairing", False))
            bp = raw.get("base_point")
            cfg.base_point = None if bp is None else tuple(float(x) for x in bp)
            cfg.prime_bound = int(raw.get("zeta", {}).get("prime_bound", 20000))
            if "generators" in raw:
                cfg.generators = [Isometry(_parse_matrix(m)) for m in raw["generators"]]
                return cfg
            if "field" not in raw or "order" not in raw:
                raise errors.ConfigError("config needs 'field' and 'order' blocks (or 'generators')")
            cfg.field = parse_field(raw["field"])
            if raw["order"].get("type") == "matrix":
                cfg.order = matrix_order(cfg.field)
                cfg.algebra = cfg.order.alg
            else:
                if "algebra" not in raw:
                    raise errors.ConfigError("config needs an 'algebra' block")
                cfg.algebra = parse_algebra(cfg.field, raw["algebra"])
                cfg.order = parse_order(cfg.algebra, raw["order"])
        except (KeyError, TypeError, ValueError) as exc:
            raise errors.ConfigError(f"bad config value: {exc}") from exc
        return cfg

    @property
    def disc_B_norm(self):
        return int(np.prod(self.order.ramified_prime_norms)) if self.order.ramified_prime_norms else 1


def _parse_complex(v):
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", "").replace("i", "j"))
    return complex(v)


def _parse_matrix(m):
    if len(m) == 4:
        m = [m[:2], m[2:]]
    return np.array([[_parse_complex(x) for x in row] for row in m], dtype=complex)


@dataclass
class RunResult:
    config: JobConfig
    basis: object              # GeneratorSet
    domain: object             # ExteriorDomain
    presentation: object
    covolume: float
    covolume_err: float
    volume: float
    is_full: bool
    conjugator: np.ndarray
    attempts: int
    diagnostics: Diagnostics
    zeta: tuple = None

    @property
    def ratio(self):
        return self.volume / self.covolume if self.covolume else math.nan


def is_full_group(S, covol):
    """Measured volume of Ext(S) below twice the covolume (unbounded -> False)."""
    E = S.domain()
    if not E.finite_volume:
        return False
    return polyhedron_volume(E) < 2 * covol


def _random_conjugator(rng, scale=0.03):
    p = rng.normal(size=3)
    p *= scale * rng.uniform(0.3, 1.0) / np.linalg.norm(p)
    return boost(p).m


def _check_final(E, ctx):
    for c in edge_cycles(E, ctx=ctx):
        if c.kind == "elliptic" and c.length > 1:
            raise errors.DegenerateBasePoint("elliptic cycle of length > 1")


def run_master(cfg, say=None):
    """Normalized basis, domain, presentation and volumes for a job."""
    say = say or (lambda msg: log.info(msg))
    diag = Diagnostics()
    t0 = time.perf_counter()
    zeta = None
    if cfg.generators is not None:
        covol, covol_err = math.nan, math.nan
    else:
        zeta = dedekind_zeta_2(cfg.field, cfg.prime_bound)
        covol, _ = covolume(cfg.order, cfg.prime_bound, zeta=zeta[0])
        covol_err = covol * zeta[1] / zeta[0]
        say(f"covolume {covol:.10f} (+- {covol_err:.1e})")
    diag.add_time("zeta_covolume", time.perf_counter() - t0)
    rng = np.random.default_rng([cfg.seed, 1])
    conj = np.eye(2, dtype=complex) if cfg.base_point is None else boost(np.array(cfg.base_point)).m
    last = None
    for attempt in range(cfg.base_point_retries + 1):
        try:
            S = _attempt(cfg, conj, covol, diag, say)
            E = S.domain()
            _check_final(E, S.ctx)
            break
        except errors.DegenerateBasePoint as exc:
            last = exc
            diag.bump("base_point_restarts")
            say(f"base point degenerate ({exc}); conjugating and restarting")
            conj = _random_conjugator(rng) @ conj
    else:
        raise errors.DegenerateBasePoint(f"gave up after {cfg.base_point_retries} restarts: {last}")
    t = time.perf_counter()
    vol = polyhedron_volume(E)
    diag.add_time("volume", time.perf_counter() - t)
    t = time.perf_counter()
    P = presentation(S)
    diag.add_time("presentation", time.perf_counter() - t)
    diag.add_time("total", time.perf_counter() - t0)
    full = vol < 2 * covol if cfg.generators is None else True
    return RunResult(cfg, S, E, P, covol, covol_err, vol, full, conj, attempt + 1, diag, zeta)


def _attempt(cfg, conj, covol, diag, say):
    if cfg.generators is not None:
        gens = [Isometry(conj @ g.m @ np.linalg.inv(conj)) for g in cfg.generators]
        ctx = GroupContext()
        return normalized_basis(word_enumerator(gens, ctx), generators_is_full_group(gens), ctx=ctx,
                                budget=cfg.budget, max_outer=cfg.max_rounds,
                                routine_passes=cfg.routine_passes, use_alt_pairing=cfg.alt_pairing,
                                diag=diag, log=say)
    s = make_splitting(cfg.algebra, conjugator=conj)
    sch = EnumSchedule(cfg.field.degree, covol, cfg.field.disc, cfg.disc_B_norm, **cfg.enum_params)
    en = Enumerator(cfg.order, s, sch, np.random.default_rng(cfg.seed))
    ctx = GroupContext(cfg.order, en.mats)
    raw = en.deterministic if cfg.backend == "det" else en.probabilistic

    def enumerate_fn(n):
        out = raw(n)
        diag.counts["scanned"] = en.scanned
        if en.stabilizer_hits:
            raise errors.DegenerateBasePoint(f"{len(en.stabilizer_hits)} enumerated elements fix the base point")
        return out

    return normalized_basis(enumerate_fn, lambda S: is_full_group(S, covol), ctx=ctx, budget=cfg.budget,
                            max_outer=cfg.max_rounds, routine_passes=cfg.routine_passes,
                            use_alt_pairing=cfg.alt_pairing, diag=diag, log=say)


# ---------------------------------------------------------------------------
# exports

def _cplx(z):
    return [float(z.real), float(z.imag)]


def _mat(m):
    return [[_cplx(z) for z in row] for row in m]


def to_json_dict(r):
    """Everything needed to rebuild the result, without timings (deterministic)."""
    E, P = r.domain, r.presentation
    inv = inverse_map(E)
    faces = E.sphere_faces
    idx = {l: i for i, l in enumerate(faces)}
    used = sorted({v for l in faces for v in E.faces[l]})
    vmap = {v: i for i, v in enumerate(used)}
    cycles = edge_cycles(E, inv=inv, ctx=r.basis.ctx)
    tcyc, _ = tangency_cycles(E, inv=inv, ctx=r.basis.ctx)
    edge_ids = {}
    edges_out = []
    for e, (a, b, f1, f2) in enumerate(E.edges):
        edge_ids[e] = len(edges_out)
        edges_out.append({"vertices": [vmap[a], vmap[b]], "faces": [idx[f1], idx[f2]],
                          "angle": E.dihedral_angle(e)})
    elements = []
    for l in faces:
        g = E.elements[l]
        c, rad = E.centers[l], E.radii[l]
        elements.append({
            "matrix": _mat(g.m),
            "coords": None if g.coords is None else list(g.coords),
            "inverse": idx[inv[l]] if inv[l] is not None else None,
            "sphere": {"center": [float(x) for x in c], "radius": float(rad)},
            "loop": [vmap[v] for v in E.faces[l]],
            "letter": P.face_letter[idx[l]],
        })
    return {
        "schema_version": SCHEMA_VERSION,
        "name": r.config.name,
        "config": r.config.raw,
        "covolume": r.covolume,
        "covolume_error": r.covolume_err,
        "volume": r.volume,
        "ratio": r.ratio,
        "is_full_group": bool(r.is_full),
        "base_point_conjugator": _mat(r.conjugator),
        "attempts": r.attempts,
        "domain": {
            "bounded": bool(E.finite_volume),
            "vertices": [{"klein": [float(x) for x in E.vertices[v]],
                          "ball": [float(x) for x in klein_to_ball(E.vertices[v])],
                          "ideal": bool(E.ideal[v])} for v in used],
            "faces": elements,
            "edges": edges_out,
            "edge_cycles": [{"edges": [edge_ids[e] for e in c.edges],
                             "faces": [idx[f] for f in c.transformations],
                             "angle": c.angle, "order": None if c.nu == math.inf else int(c.nu),
                             "kind": c.kind} for c in cycles],
            "tangency_cycles": [{"faces": [idx[f] for f in t.transformations],
                                 "trace": _cplx(t.h.trace)} for t in tcyc],
        },
        "presentation": {
            "generators": [{"matrix": _mat(g.m), "coords": None if g.coords is None else list(g.coords),
                            "kind": k} for g, k in zip(P.generators, P.kinds)],
            "relations": [list(w) for w in P.relations],
        },
    }


def export_json(r, path):
    text = json.dumps(to_json_dict(r), indent=1, sort_keys=True) + "\n"
    Path(path).write_text(text)
    return text


def load_json(path):
    return json.loads(Path(path).read_text())


def off_mesh(E, model="ball"):
    """OFF text of the fan-triangulated boundary (sphere faces only)."""
    tris = E.triangles()
    used = sorted({v for t in tris for v in t})
    vmap = {v: i for i, v in enumerate(used)}
    pts = E.vertices[used]
    if model == "ball":
        pts = klein_to_ball(pts)
    lines = ["OFF", f"{len(used)} {len(tris)} 0"]
    lines += [" ".join(f"{x:.12g}" for x in p) for p in pts]
    lines += [f"3 {vmap[a]} {vmap[b]} {vmap[c]}" for a, b, c in tris]
    return "\n".join(lines) + "\n"


def parse_off(text):
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    assert lines[0].strip() == "OFF"
    nv, nf, _ = (int(x) for x in lines[1].split())
    V = np.array([[float(x) for x in lines[2 + i].split()] for i in range(nv)])
    Fc = [tuple(int(x) for x in lines[2 + nv + i].split()[1:]) for i in range(nf)]
    return V, Fc


def export_text(r):
    P = r.presentation
    head = [f"# {r.config.name}: {len(P.generators)} generators, {len(P.relations)} relations",
            f"# volume {r.volume:.10f} covolume {r.covolume:.10f}"]
    return "\n".join(head) + "\n" + P.to_text()


def write_outputs(r, outdir, formats=("json", "off", "text")):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    if "json" in formats:
        p = out / f"{r.config.name}.json"
        export_json(r, p)
        paths.append(p)
    if "off" in formats:
        p = out / f"{r.config.name}.off"
        p.write_text(off_mesh(r.domain))
        paths.append(p)
    if "text" in formats:
        p = out / f"{r.config.name}.txt"
        p.write_text(export_text(r))
        paths.append(p)
    return paths


def summary(r):
    E = r.domain
    V = len({v for l in E.sphere_faces for v in E.faces[l]})
    lines = [
        f"faces {len(E.sphere_faces)}  edges {len(E.edges)}  vertices {V}  bounded {E.finite_volume}",
        f"volume {r.volume:.10f}",
    ]
    if not math.isnan(r.covolume):
        lines.append(f"covolume {r.covolume:.10f} +- {r.covolume_err:.1e}  ratio {r.ratio:.8f}  full group {r.is_full}")
    lines.append(f"generators {len(r.presentation.generators)}  relations {len(r.presentation.relations)}"
                 f"  base point restarts {r.attempts - 1}")
    return "\n".join(lines)


def timings_text(diag):
    items = sorted(diag.timings.items(), key=lambda kv: -kv[1])
    return "timings: " + ", ".join(f"{k} {v:.3f}s" for k, v in items)


# ---------------------------------------------------------------------------
# command line

def _parse_word_arg(s):
    return tuple(int(x) for x in s.replace(",", " ").split())


def build_parser():
    p = argparse.ArgumentParser(prog="kleinian", description="Dirichlet domains and presentations of arithmetic Kleinian groups")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp):
        sp.add_argument("config", help="JSON job configuration")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--enum", choices=["det", "prob"])
        sp.add_argument("--max-rounds", type=int)
        return sp

    sp = common(sub.add_parser("domain", help="compute the Dirichlet domain"))
    sp.add_argument("-o", "--outdir", default=None, help="write JSON/OFF/text here")
    common(sub.add_parser("presentation", help="print the presentation"))
    sp = common(sub.add_parser("reduce", help="write a group element as a word in the generators"))
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--matrix", help="a,b,c,d (complex numbers, e.g. 1+2j)")
    g.add_argument("--coords", help="integer coordinates on the order basis")
    common(sub.add_parser("volume", help="covolume formula and measured domain volume"))
    sp = sub.add_parser("zeta", help="Dedekind zeta value at 2")
    sp.add_argument("config")
    sp.add_argument("--prime-bound", type=int, default=None)
    sp = common(sub.add_parser("export", help="write exports"))
    sp.add_argument("--format", choices=["json", "off", "text", "all"], default="all")
    sp.add_argument("-o", "--outdir", default="out")
    return p


def _load(args):
    cfg = JobConfig.load(args.config)
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "enum", None):
        cfg.backend = args.enum
    if getattr(args, "max_rounds", None):
        cfg.max_rounds = args.max_rounds
    return cfg


def _run(args):
    cfg = _load(args)
    if args.cmd == "zeta":
        if cfg.field is None:
            raise errors.ConfigError("zeta needs a field block")
        t = time.perf_counter()
        val, err = dedekind_zeta_2(cfg.field, args.prime_bound or cfg.prime_bound)
        print(f"zeta_F(2) = {val:.12f} +- {err:.1e}  ({time.perf_counter() - t:.2f}s)")
        return EXIT_OK
    try:
        r = run_master(cfg)
    except errors.BudgetExceeded as exc:
        S = exc.partial
        if S is not None and args.cmd in ("domain", "export") and getattr(args, "outdir", None):
            out = Path(args.outdir)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"{cfg.name}.partial.json").write_text(json.dumps(
                {"schema_version": SCHEMA_VERSION, "partial": True, "message": str(exc),
                 "elements": [{"matrix": _mat(g.m), "coords": None if g.coords is None else list(g.coords)}
                              for g in S.elements]}, indent=1, sort_keys=True) + "\n")
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if args.cmd == "domain":
        print(summary(r))
        if args.outdir:
            for pth in write_outputs(r, args.outdir):
                print(f"wrote {pth}")
    elif args.cmd == "presentation":
        print(export_text(r), end="")
    elif args.cmd == "volume":
        print(f"covolume (formula) {r.covolume:.10f} +- {r.covolume_err:.1e}")
        print(f"volume (domain)    {r.volume:.10f}")
        print(f"ratio              {r.ratio:.8f}")
    elif args.cmd == "reduce":
        if args.matrix:
            gamma = Isometry(_parse_matrix([x for x in args.matrix.split(",")]))
            # the domain lives in the conjugated picture
            h = r.conjugator
            gamma = Isometry(h @ gamma.m @ np.linalg.inv(h))
        else:
            c = np.array(_parse_word_arg(args.coords), dtype=np.int64)
            if cfg.order is None or len(c) != cfg.order.rank:
                raise errors.ConfigError("--coords needs one integer per order basis element")
            if not cfg.order.is_norm_one(c[None, :])[0]:
                raise errors.ConfigError("element does not have reduced norm 1")
            gamma = r.basis.ctx.from_coords(c)
        word = r.presentation.word_of(gamma, budget=cfg.budget)
        if word is None:
            print("element is not in the group generated by the domain")
            return EXIT_OK
        resid = np.linalg.inv(r.presentation.evaluate(word).m) @ gamma.m
        print(f"word: {word_to_text(word)}")
        print(f"length {len(word)}  residual distance to +-1: "
              f"{min(np.linalg.norm(resid - np.eye(2)), np.linalg.norm(resid + np.eye(2))):.2e}")
    elif args.cmd == "export":
        fmts = ("json", "off", "text") if args.format == "all" else (args.format,)
        for pth in write_outputs(r, args.outdir, fmts):
            print(f"wrote {pth}")
    print(timings_text(r.diagnostics), file=sys.stderr)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return _run(args)
    except _CONFIG_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _PRECISION_ERRORS as exc:
        print(f"precision failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except errors.BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
