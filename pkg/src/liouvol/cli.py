"""Command-line front end.

Subcommands: action, grunsky, surface, volume, verify-identity, flow.
Every run writes its artifacts plus a manifest.json carrying the config
hash and a content hash per output file. Exit codes: 0 success, 1 input
error, 2 numerical contract failure.
"""

import argparse
import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .action import grunsky_gap, liouville_action
from .curves import CurveSpec
from .errors import ContractError, InputError
from .flow import run_flow
from .mapping import conformal_map_pair
from .meshing import (aligned_surface_meshes, mesh_surface,
                      surface_separation, write_obj, write_vertex_csv)
from .quadrature import QuadratureGrid
from .volume import renormalized_volume

FIXTURE_DIR = Path(__file__).parent / "fixtures"


@dataclass
class RunConfig:
    command: str
    curve: str
    out: str = "."
    series_order: int = 128
    grid: str = "20x8x256"
    eps_schedule: list | None = None  # None: auto-scaled to the curve
    steps: int = 50
    tol: float = 0.01
    seed: int = 0
    trace: bool = False
    mesh: str = "64x64"
    r_max: float = 1.0 - 2.0 ** -10
    obj_every: int = 0
    dump_obj: bool = False

    def canonical_json(self):
        # the output location is not part of the experiment identity
        payload = {k: v for k, v in asdict(self).items() if k != "out"}
        return json.dumps(payload, sort_keys=True)

    def config_hash(self):
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]

    def validate(self):
        if self.series_order < 8 or self.series_order > 2048:
            raise InputError("series order must be within [8, 2048]")
        if self.steps < 0 or self.steps > 10000:
            raise InputError("step count must be within [0, 10000]")
        if not (0 < self.tol <= 1):
            raise InputError("tolerance must be in (0, 1]")
        if self.eps_schedule is not None \
                and any(e <= 0 for e in self.eps_schedule):
            raise InputError("eps schedule must be positive")
        levels, per, ang = self.parse_grid()
        if not (2 <= levels <= 40 and 2 <= per <= 64 and 32 <= ang <= 8192):
            raise InputError(f"grid {self.grid} outside supported ranges")
        rn, an = self.parse_mesh()
        if rn < 8 or an < 8:
            raise InputError("mesh resolution must be at least 8x8")
        return self

    def parse_grid(self):
        try:
            levels, per, ang = (int(p) for p in self.grid.split("x"))
        except ValueError as exc:
            raise InputError(f"bad grid spec {self.grid!r}") from exc
        return levels, per, ang

    def parse_mesh(self):
        try:
            rn, an = (int(p) for p in self.mesh.split("x"))
        except ValueError as exc:
            raise InputError(f"bad mesh spec {self.mesh!r}") from exc
        return rn, an


class ArtifactWriter:
    """Deterministic JSON/CSV output plus a hash manifest."""

    def __init__(self, out_dir, config):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.config = config
        self.files = {}

    def _register(self, path):
        digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
        self.files[Path(path).name] = digest

    def write_json(self, name, payload):
        path = self.out_dir / name
        body = {"config_hash": self.config.config_hash(), **payload}
        path.write_text(json.dumps(body, sort_keys=True, indent=2,
                                   allow_nan=True) + "\n")
        self._register(path)
        return path

    def write_csv(self, name, header, rows):
        path = self.out_dir / name
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(repr(float(v)) for v in row))
        path.write_text("\n".join(lines) + "\n")
        self._register(path)
        return path

    def register_external(self, path):
        self._register(path)

    def finish(self):
        manifest = {
            "version": __version__,
            "config": json.loads(self.config.canonical_json()),
            "config_hash": self.config.config_hash(),
            "outputs": self.files,
        }
        path = self.out_dir / "manifest.json"
        path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
        return path


def load_curve(spec):
    """Resolve a curve argument: bundled fixture name or a JSON file path."""
    candidate = FIXTURE_DIR / f"{spec}.json"
    path = candidate if candidate.exists() else Path(spec)
    if not path.exists():
        raise InputError(f"curve file not found: {spec}")
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"cannot parse curve JSON {path}: {exc}") from exc
    return CurveSpec.from_json(payload)


def _grid_from(config):
    levels, per, ang = config.parse_grid()
    return QuadratureGrid.disk(levels, per, ang)


def cmd_action(config, writer):
    curve = load_curve(config.curve)
    grid = _grid_from(config)
    f, g = conformal_map_pair(curve, order=config.series_order)
    report = liouville_action(f, g, grid)
    writer.write_json("action.json", report.as_dict())
    if config.trace:
        rows = []
        for per in sorted({max(2, config.parse_grid()[1] // 2 ** k)
                           for k in range(3)}):
            sub = QuadratureGrid.disk(config.parse_grid()[0], per,
                                      config.parse_grid()[2])
            rep = liouville_action(f, g, sub)
            rows.append((per, rep.interior_term, rep.exterior_term,
                         rep.total))
        writer.write_csv("action_trace.csv",
                         ["nodes_per_level", "interior", "exterior", "total"],
                         rows)
    return 0


def cmd_grunsky(config, writer):
    curve = load_curve(config.curve)
    grid = _grid_from(config)
    f, g = conformal_map_pair(curve, order=config.series_order)
    gap = grunsky_gap(f, g, grid)
    gap["gap"] = gap["rhs"] - gap["lhs"]
    writer.write_json("grunsky.json", gap)
    if gap["lhs"] > gap["rhs"] + 1e-6:
        raise ContractError(
            f"area inequality violated: lhs {gap['lhs']} > rhs {gap['rhs']}")
    return 0


def cmd_surface(config, writer):
    curve = load_curve(config.curve)
    f, g = conformal_map_pair(curve, order=config.series_order)
    rn, an = config.parse_mesh()
    mesh_in = mesh_surface(f, rn, an, config.r_max)
    mesh_out = mesh_surface(g, rn, an, config.r_max)
    for name, mesh in (("surface_in", mesh_in), ("surface_out", mesh_out)):
        obj = writer.out_dir / f"{name}.obj"
        write_obj(obj, mesh, comment=f"{name} {config.config_hash()}")
        writer.register_external(obj)
        csv = writer.out_dir / f"{name}.csv"
        write_vertex_csv(csv, mesh)
        writer.register_external(csv)
    # innermost parameter radius from which the outer annulus stays an
    # immersion (Schwarzian norm below 1) on the sampled grid
    radii = np.abs(mesh_in.source[1:]).reshape(rn, an)
    ring_max = mesh_in.theta_norm[1:].reshape(rn, an).max(axis=1)
    immersed_from = None
    for i in range(rn - 1, -1, -1):
        if ring_max[i] >= 1.0:
            break
        immersed_from = float(radii[i, 0])
    writer.write_json("surface.json", {
        "separation": surface_separation(mesh_in, mesh_out),
        "max_schwarzian_norm_in": float(np.max(mesh_in.theta_norm)),
        "max_schwarzian_norm_out": float(np.max(mesh_out.theta_norm[1:])),
        "immersed_annulus_from_radius": immersed_from,
        "vertices_per_sheet": int(mesh_in.n_vertices),
    })
    return 0


def cmd_volume(config, writer):
    from .volume import cap_annulus, clip_mesh_above

    curve = load_curve(config.curve)
    grid = _grid_from(config)
    f, g = conformal_map_pair(curve, order=config.series_order)
    report = renormalized_volume(f, g, grid=grid,
                                 eps_schedule=config.eps_schedule)
    writer.write_json("volume.json", report.as_dict())
    if config.dump_obj:
        eps = report.epsilon_samples[-1][0]
        mi, mo = aligned_surface_meshes(f, g, n_ang=256, per_octave=8,
                                        interior_rings=24)
        loops = []
        for name, mesh in (("volume_in_clipped", mi),
                           ("volume_out_clipped", mo)):
            verts, faces, loop = clip_mesh_above(mesh, eps)
            loops.append(loop)
            obj = writer.out_dir / f"{name}.obj"
            _write_soup_obj(obj, verts, faces, name)
            writer.register_external(obj)
        cap_v, cap_f = cap_annulus(*loops)
        obj = writer.out_dir / "volume_cap.obj"
        _write_soup_obj(obj, cap_v, cap_f, "cap")
        writer.register_external(obj)
    return 0


def _write_soup_obj(path, verts, faces, comment):
    lines = [f"# {comment}"]
    for v in verts:
        lines.append("v %.17g %.17g %.17g" % (v[0], v[2], v[1]))
    for tri in faces:
        lines.append("f %d %d %d" % (tri[0] + 1, tri[1] + 1, tri[2] + 1))
    Path(path).write_text("\n".join(lines) + "\n")


def cmd_verify_identity(config, writer):
    curve = load_curve(config.curve)
    grid = _grid_from(config)
    f, g = conformal_map_pair(curve, order=config.series_order)
    report = renormalized_volume(f, g, grid=grid,
                                 eps_schedule=config.eps_schedule)
    tol = max(config.tol * abs(report.action_total), 5e-4)
    ok = abs(report.identity_residual) <= tol
    writer.write_json("verify_identity.json", {
        **report.as_dict(),
        "tolerance": tol,
        "passed": bool(ok),
    })
    if not ok:
        raise ContractError(
            f"identity residual {report.identity_residual:.3e} exceeds "
            f"tolerance {tol:.3e}")
    return 0


def cmd_flow(config, writer):
    curve = load_curve(config.curve)
    grid = _grid_from(config)
    states = run_flow(curve, max_steps=config.steps, grid=grid,
                      order=config.series_order)
    rows = [(s.step, s.action, s.grad_wp_norm_sq, s.step_size, s.roundness)
            for s in states]
    writer.write_csv("flow.csv",
                     ["step", "action", "grad_wp_norm_sq", "step_size",
                      "roundness"], rows)
    if config.obj_every > 0:
        for s in states:
            if s.step % config.obj_every == 0:
                f, g = conformal_map_pair(s.curve, order=config.series_order)
                mi, mo = aligned_surface_meshes(f, g, n_ang=256,
                                                interior_rings=24)
                for name, mesh in ((f"flow_{s.step:04d}_in", mi),
                                   (f"flow_{s.step:04d}_out", mo)):
                    obj = writer.out_dir / f"{name}.obj"
                    write_obj(obj, mesh, comment=name)
                    writer.register_external(obj)
    writer.write_json("flow.json", {
        "steps_accepted": len(states) - 1,
        "initial_action": states[0].action,
        "final_action": states[-1].action,
        "final_roundness": states[-1].roundness,
        "monotone": bool(all(b.action <= a.action
                             for a, b in zip(states, states[1:]))),
    })
    return 0


COMMANDS = {
    "action": cmd_action,
    "grunsky": cmd_grunsky,
    "surface": cmd_surface,
    "volume": cmd_volume,
    "verify-identity": cmd_verify_identity,
    "flow": cmd_flow,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="liouvol",
        description="Liouville action, envelope surfaces and renormalized "
                    "volume of Jordan curves")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--curve", required=True,
                       help="bundled fixture name or curve JSON path")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--series-order", type=int, default=128)
        p.add_argument("--grid", default="20x8x256",
                       help="levels x nodes-per-level x angular")
        p.add_argument("--eps-schedule", type=float, nargs="+", default=None)
        p.add_argument("--steps", type=int, default=50)
        p.add_argument("--tol", type=float, default=0.01)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trace", action="store_true")
        p.add_argument("--mesh", default="64x64")
        p.add_argument("--r-max", type=float, default=1.0 - 2.0 ** -10)
        p.add_argument("--obj-every", type=int, default=0)
        p.add_argument("--dump-obj", action="store_true")
    return parser


def config_from_args(args):
    cfg = RunConfig(
        command=args.command,
        curve=args.curve,
        out=args.out,
        series_order=args.series_order,
        grid=args.grid,
        steps=args.steps,
        tol=args.tol,
        seed=args.seed,
        trace=args.trace,
        mesh=args.mesh,
        r_max=args.r_max,
        obj_every=args.obj_every,
        dump_obj=args.dump_obj,
    )
    if args.eps_schedule is not None:
        cfg.eps_schedule = list(args.eps_schedule)
    return cfg.validate()


def run(config):
    """Execute one configured command; returns the process exit code."""
    np.random.seed(config.seed)
    writer = ArtifactWriter(config.out, config)
    try:
        code = COMMANDS[config.command](config, writer)
    except ContractError as exc:
        writer.write_json("diagnostic.json",
                          {"error": type(exc).__name__, "detail": str(exc)})
        writer.finish()
        print(f"numerical contract failed: {exc}", file=sys.stderr)
        return 2
    writer.finish()
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = config_from_args(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    try:
        return run(config)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
