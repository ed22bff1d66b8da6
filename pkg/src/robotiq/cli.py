"""Command-line entry point: serve / repl / bench / train / eval / transfer."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .assets import resolve_map_path
from .env import EnvConfig, NavEnv
from .errors import RobotIQError
from .rl import Checkpoint, TrainConfig, evaluate, train, transfer_eval
from .service import ServerDefaults, create_app, run_bench, run_repl, write_cdf_csv, write_metrics_csv
from .skills import SkillConfig
from .world import load_world_file


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _env_config(cfg: dict, overrides: dict | None = None) -> EnvConfig:
    merged = dict(cfg.get("env", {}))
    merged.update(overrides or {})
    return EnvConfig.from_dict(merged)


def cmd_train(args) -> int:
    cfg = _load_config(args.config)
    map_path = resolve_map_path(args.map or cfg.get("map", "obstacle_room"))
    world = load_world_file(map_path)
    env_cfg = _env_config(cfg)
    train_dict = dict(cfg.get("train", {}))
    if args.algo:
        train_dict["algorithm"] = args.algo
    if args.seeds:
        train_dict["seeds"] = [int(s) for s in args.seeds.split(",")]
    if args.epochs is not None:
        train_dict["epochs"] = args.epochs
    tcfg = TrainConfig.from_dict(train_dict)

    def factory(seed):
        return NavEnv(world, env_cfg, seed=seed)

    def progress(info):
        print(f"[seed {info['seed']}] epoch {info['epoch']:>4}  "
              f"score {info['mean_score']:.3f}  success {info['success_rate']:.2f}",
              file=sys.stderr)

    result = train(factory, tcfg, progress=progress if args.verbose else None)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    curves_path = out_dir / f"curves_{tcfg.algorithm}.csv"
    with open(curves_path, "w", encoding="utf-8", newline="") as fh:
        result.curve.to_csv(fh)
    best_path = out_dir / f"best_{tcfg.algorithm}.json"
    result.best.save(best_path)
    print(json.dumps({
        "algorithm": tcfg.algorithm,
        "best_epoch": result.best.epoch,
        "best_seed": result.best.seed,
        "best_mean_score": result.best.mean_score,
        "curves": str(curves_path),
        "checkpoint": str(best_path),
    }, indent=2))
    return 0


def cmd_eval(args) -> int:
    cfg = _load_config(args.config)
    checkpoint = Checkpoint.load(args.checkpoint)
    world = load_world_file(resolve_map_path(args.map))
    env = NavEnv(world, _env_config(cfg), seed=args.seed)
    out = evaluate(checkpoint, env, episodes=args.episodes)
    print(json.dumps({
        "success_rate": out["success_rate"],
        "mean_score": out["mean_score"],
        "mean_steps_to_goal": out["mean_steps_to_goal"],
    }, indent=2))
    return 0


def cmd_transfer(args) -> int:
    cfg = _load_config(args.config)
    checkpoint = Checkpoint.load(args.checkpoint)
    world = load_world_file(resolve_map_path(args.map))
    overrides = {}
    if args.goal:
        x, y = (float(v) for v in args.goal.split(","))
        overrides["goal"] = (x, y)
    env = NavEnv(world, _env_config(cfg, overrides), seed=args.seed)
    out = transfer_eval(checkpoint, env, episodes=args.episodes)
    print(json.dumps(out, indent=2))
    return 0


def cmd_bench(args) -> int:
    world = load_world_file(resolve_map_path(args.map))
    commands = []
    for line in Path(args.script).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            commands.append(line)
    checkpoint = Checkpoint.load(args.checkpoint) if args.checkpoint else None
    backend_factory = None
    if args.backend == "llm":
        from .planner import external_backend_from_env

        backend_factory = external_backend_from_env
    report, rows = run_bench(
        world, commands, trials=args.trials, seed=args.seed,
        backend_factory=backend_factory, navigator=args.navigator,
        checkpoint=checkpoint, voice_latency=args.voice_latency,
    )
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        write_metrics_csv(rows, fh)
    cdf_path = args.cdf_out or str(Path(args.out).with_name(Path(args.out).stem + "_cdf.csv"))
    with open(cdf_path, "w", encoding="utf-8", newline="") as fh:
        write_cdf_csv(report, fh)
    print(json.dumps({"metrics_csv": args.out, "cdf_csv": cdf_path,
                      "report": report.to_dict()}, indent=2))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    defaults = ServerDefaults(
        map_path=str(resolve_map_path(args.map)),
        backend=args.backend,
        navigator=args.navigator,
        checkpoint_path=args.checkpoint,
        pacing=args.pacing,
        prompt_template_path=args.template,
        skill_cfg=SkillConfig(),
    )
    app = create_app(defaults)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_repl(args) -> int:
    run_repl(str(resolve_map_path(args.map)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robotiq",
        description="Simulated mobile manipulator: language commands, RL navigation, benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the HTTP/WebSocket service")
    p.add_argument("--map", default="demo_home")
    p.add_argument("--backend", choices=["rule", "llm"], default="rule")
    p.add_argument("--navigator", choices=["fallback", "policy"], default="fallback")
    p.add_argument("--checkpoint")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--pacing", type=float, default=1.0,
                   help="wall seconds per simulated second while executing (0 = flat out)")
    p.add_argument("--template", help="prompt template file for the llm backend")
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("repl", help="interactive text loop")
    p.add_argument("--map", default="demo_home")
    p.set_defaults(fn=cmd_repl)

    p = sub.add_parser("bench", help="run the scripted benchmark")
    p.add_argument("--map", required=True)
    p.add_argument("--script", required=True, help="text file, one command per line")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="metrics.csv")
    p.add_argument("--cdf-out")
    p.add_argument("--backend", choices=["rule", "llm"], default="rule")
    p.add_argument("--navigator", choices=["fallback", "policy"], default="fallback")
    p.add_argument("--checkpoint")
    p.add_argument("--voice-latency", type=float, default=0.0)
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("train", help="train a navigation policy")
    p.add_argument("--config", help="JSON run config with map/env/train sections")
    p.add_argument("--map")
    p.add_argument("--algo", choices=["ppo", "vpg"])
    p.add_argument("--seeds", help="comma-separated list, e.g. 0,1,2")
    p.add_argument("--epochs", type=int)
    p.add_argument("--out-dir", default="runs")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--map", required=True)
    p.add_argument("--episodes", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("transfer", help="zero-shot transfer evaluation")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--map", required=True)
    p.add_argument("--goal", help="relocated goal as 'x,y'")
    p.add_argument("--episodes", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config")
    p.set_defaults(fn=cmd_transfer)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except RobotIQError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
