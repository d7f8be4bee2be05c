"""Command-line entry points: maze generation, experiments, play service."""

import sys
from pathlib import Path

import click

from .agents import AgentKind
from .game import DEFAULT_STEP_CAP, GameConfig, GridPos, PlayerId, oracle_episode_length
from .harness import AgentSpec, ExperimentSpec, emit_results, run_experiment
from .mcts import PlannerParams, RewardScheme
from . import mazefile, mazegen


@click.group()
def main():
    """Two-player shared-control maze coordination toolkit."""


def _parse_size(size: str):
    try:
        width, height = (int(x) for x in size.lower().split("x"))
        return width, height
    except ValueError:
        raise click.BadParameter(f"size must look like 9x9, got {size!r}")


@main.command("gen-mazes")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--count", type=int, default=3, show_default=True)
@click.option("--size", default="9x9", show_default=True)
@click.option("--density", type=float, default=mazegen.DEFAULT_WALL_DENSITY, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
def gen_mazes(seed, count, size, density, out):
    """Generate COUNT solvable maze pairs and write them as JSON files."""
    width, height = _parse_size(size)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i in range(count):
        pair = mazegen.generate_maze_pair(seed + i, width, height, density)
        path = out_dir / f"maze_{seed + i:04d}.json"
        mazefile.save_maze(pair, path)
        click.echo(f"wrote {path}")


@main.command()
@click.option("--maze", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--init", nargs=2, type=int, required=True)
@click.option("--goal", nargs=2, type=int, required=True)
@click.option("--start", type=click.Choice(["E", "H"]), default="E", show_default=True)
@click.option("--min-over-start", is_flag=True, help="Take the better of both starting controllers.")
def oracle(maze, init, goal, start, min_over_start):
    """Print the fewest moves+switches for one configuration."""
    pair = mazefile.load_maze(maze)
    config = GameConfig(GridPos(*init), GridPos(*goal), PlayerId(start))
    click.echo(oracle_episode_length(pair, config, minimize_over_start=min_over_start))


def _resolve_mazes(mazes: str, size: str, density: float):
    if mazes.startswith("gen:"):
        try:
            seed_s, count_s = mazes[4:].split(",")
            seed, count = int(seed_s), int(count_s)
        except ValueError:
            raise click.BadParameter("--mazes gen form is gen:SEED,COUNT")
        width, height = _parse_size(size)
        return [
            (f"gen-{seed + i}", mazegen.generate_maze_pair(seed + i, width, height, density))
            for i in range(count)
        ]
    out = []
    for token in mazes.split(","):
        path = Path(token)
        if not path.is_file():
            raise click.BadParameter(f"maze file {token!r} not found")
        out.append((path.stem, mazefile.load_maze(path)))
    return out


def _parse_agents(tokens):
    kinds = {}
    for token in tokens:
        try:
            player, kind = token.split("=")
            kinds[player.strip().upper()] = AgentKind(kind.strip())
        except ValueError:
            raise click.BadParameter(f"agent spec must look like E=mcts-intent, got {token!r}")
    missing = {"E", "H"} - kinds.keys()
    if missing:
        raise click.BadParameter(f"--agents must cover both players, missing {sorted(missing)}")
    return kinds


@main.command()
@click.option("--mazes", required=True, help="Comma-separated maze files, or gen:SEED,COUNT.")
@click.option("--agents", nargs=2, default=("E=mcts-intent", "H=mcts-intent"), show_default=True)
@click.option("--scheme", type=click.Choice([s.value for s in RewardScheme]), default="discounted", show_default=True)
@click.option("--trials", type=int, default=10, show_default=True)
@click.option("--configs", default="all", show_default=True, help="all or sample:K.")
@click.option("--cap", type=int, default=DEFAULT_STEP_CAP, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--size", default="9x9", show_default=True, help="Grid size for gen: mazes.")
@click.option("--density", type=float, default=mazegen.DEFAULT_WALL_DENSITY, show_default=True)
@click.option("--iterations", type=int, default=100, show_default=True)
def simulate(mazes, agents, scheme, trials, configs, cap, seed, out, workers, size, density, iterations):
    """Run a seeded agent-vs-agent experiment sweep and emit results."""
    kinds = _parse_agents(agents)
    planner = PlannerParams(iterations=iterations, scheme=RewardScheme(scheme))
    spec = ExperimentSpec(
        mazes=_resolve_mazes(mazes, size, density),
        agent_e=AgentSpec(kinds["E"], planner=planner),
        agent_h=AgentSpec(kinds["H"], planner=planner),
        configs=configs,
        trials=trials,
        cap=cap,
        base_seed=seed,
        workers=workers,
    )
    records, stats = run_experiment(spec)
    csv_path, json_path = emit_results(records, stats, out)
    overall = stats["overall"]
    click.echo(f"{len(records)} episodes -> {csv_path} / {json_path}")
    click.echo(
        f"success {overall['success_rate']:.3f} | steps geo-mean {overall['steps']['geo_mean']:.2f} "
        f"± {overall['steps']['geo_std']:.2f}"
    )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--log-dir", type=click.Path(file_okay=False), default=None)
@click.option("--fixtures", type=click.Path(file_okay=False), default=None)
@click.option("--ui", type=click.Path(file_okay=False), default=None,
              help="Directory with the built browser client (frontend/, after npm run build).")
def serve(host, port, log_dir, fixtures, ui):
    """Run the live human-vs-agent play service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(log_dir=log_dir, fixtures_dir=fixtures, ui_dir=ui), host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())
