"""
stirlingblocks command line

Exit codes: 0 success, 1 verification or internal failure, 2 usage error.
Data goes to standard output; diagnostics and logs go to standard error.
"""

import functools
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, NoReturn, Optional, Sequence, Tuple

import click
import pandas as pd

from ..config.settings import Settings, load_settings
from ..core.errors import (
    ConfigurationError,
    DomainError,
    StirlingBlocksError,
    VerificationError,
)
from ..core.patterns import VincularPattern
from ..core.stirling import KStirlingWord, block_decompose, group_pattern_count
from ..core.trees import format_tree, parse_tree, phi, phi_inverse
from ..services.enumeration import (
    GPoly,
    PatternSequence,
    bundled_spec,
    generate,
    generate_avoiding,
    load_spec,
)
from ..services.generating_functions import (
    ROUTES,
    g_poly_by_route,
    g_series_theorem,
    series_to_gpoly,
)
from ..services.verification import VerificationBattery
from ..utils.logger import configure_logging

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "pretty")


@dataclass
class RunConfig:
    """Everything one command invocation needs"""

    command: str
    orders: List[int] = field(default_factory=list)
    k: int = 2
    spec_path: Optional[str] = None
    spec: Optional[PatternSequence] = None
    truncation: Optional[int] = None
    fmt: str = "json"
    jobs: int = 1
    max_order: int = 9

    def validate(self) -> List[str]:
        """Violated invariants, empty when the config is usable"""
        problems = []
        if any(n < 0 for n in self.orders):
            problems.append("orders must be nonnegative")
        if self.k < 2:
            problems.append(f"k must be at least 2, got {self.k}")
        if self.jobs < 1:
            problems.append(f"--jobs must be at least 1, got {self.jobs}")
        if self.orders and max(self.orders) > self.max_order:
            problems.append(
                f"order {max(self.orders)} exceeds STIRLINGBLOCKS_MAX_ORDER={self.max_order}"
            )
        if self.truncation is not None:
            if self.truncation < 0:
                problems.append(f"truncation must be nonnegative, got {self.truncation}")
            elif self.orders and self.truncation < max(self.orders):
                problems.append(
                    f"truncation {self.truncation} is below the requested order {max(self.orders)}"
                )
        if self.spec is not None and self.spec.k != self.k:
            problems.append(f"spec {self.spec_path} is for k = {self.spec.k}, not k = {self.k}")
        if self.fmt not in FORMATS:
            problems.append(f"format must be one of {FORMATS}")
        return problems


class OrderRange(click.ParamType):
    """``5`` or ``1..5``"""

    name = "order"

    def convert(self, value: Any, param: Optional[click.Parameter], ctx: Optional[click.Context]) -> List[int]:
        if isinstance(value, list):
            return value
        text = str(value).strip()
        try:
            if ".." in text:
                low, high = (int(part) for part in text.split("..", 1))
                if low > high:
                    self.fail(f"empty range {text!r}", param, ctx)
                return list(range(low, high + 1))
            return [int(text)]
        except ValueError:
            self.fail(f"{text!r} is not an integer or a..b range", param, ctx)


ORDER = OrderRange()


def _usage_error(message: str) -> NoReturn:
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def handle_errors(fn: Callable[..., Any]) -> Callable[..., Any]:
    """Map the exception hierarchy onto the exit-code contract"""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except (DomainError, ConfigurationError) as exc:
            _usage_error(str(exc))
        except VerificationError as exc:
            click.echo(f"verification failed: {exc}", err=True)
            sys.exit(1)
        except StirlingBlocksError as exc:
            logger.error("internal failure: %s", exc)
            click.echo(f"internal error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def resolve_spec(value: Optional[str]) -> Optional[PatternSequence]:
    """A path to a JSON document, or the name of a bundled spec"""
    if value is None:
        return None
    path = Path(value)
    if path.is_file():
        return load_spec(path)
    return bundled_spec(path.stem if path.suffix == ".json" else value)


def checked(config: RunConfig) -> RunConfig:
    problems = config.validate()
    if problems:
        _usage_error("; ".join(problems))
    return config


def emit_table(rows: Sequence[Dict[str, Any]], fmt: str) -> None:
    if fmt == "json":
        click.echo(json.dumps(list(rows), indent=2))
        return
    frame = pd.DataFrame(list(rows))
    if fmt == "csv":
        click.echo(frame.to_csv(index=False), nl=False)
    else:
        click.echo(frame.to_string(index=False) if not frame.empty else "(empty)")


def _settings(ctx: click.Context) -> Settings:
    return ctx.obj["settings"]


def _jobs(ctx: click.Context, jobs: Optional[int]) -> int:
    return jobs if jobs is not None else _settings(ctx).jobs


order_option = click.option("-n", "--order", "orders", type=ORDER, required=True, help="Order n or range a..b")
k_option = click.option("-k", "--multiplicity", "k", type=int, default=2, show_default=True, help="Copies of each letter")
jobs_option = click.option("--jobs", type=int, default=None, help="Worker threads [env STIRLINGBLOCKS_JOBS]")
spec_option = click.option("--spec", "spec_path", default=None, help="PatternSequence JSON file or bundled spec name")


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], case_sensitive=False),
    default=None,
    help="Override STIRLINGBLOCKS_LOG_LEVEL",
)
@click.option("--log-format", type=click.Choice(["plain", "structured"]), default=None)
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str], log_format: Optional[str]) -> None:
    """Stirling permutations, block patterns and their generating functions."""
    try:
        settings = load_settings()
    except ConfigurationError as exc:
        _usage_error(str(exc))
    configure_logging(log_level or settings.log_level, log_format or settings.log_format)
    ctx.ensure_object(dict)
    ctx.obj["settings"] = settings


@cli.command("enumerate")
@order_option
@k_option
@spec_option
@jobs_option
@click.option("--format", "fmt", type=click.Choice(FORMATS + ("lines",)), default="lines", show_default=True)
@click.pass_context
@handle_errors
def cmd_enumerate(ctx: click.Context, orders: List[int], k: int, spec_path: Optional[str], jobs: Optional[int], fmt: str) -> None:
    """List the words of Q_{n,k}, optionally filtered by a spec."""
    spec = resolve_spec(spec_path)
    config = checked(
        RunConfig("enumerate", orders, k, spec_path, spec, None, "json" if fmt == "lines" else fmt,
                  _jobs(ctx, jobs), _settings(ctx).max_order)
    )
    rows = []
    for n in config.orders:
        words = generate(n, k) if spec is None else generate_avoiding(n, k, spec, config.jobs)
        for sigma in words:
            if fmt == "lines":
                click.echo(str(sigma))
            else:
                rows.append({"n": n, "word": str(sigma)})
    if fmt != "lines":
        emit_table(rows, fmt)


def stats_report(
    sigma: KStirlingWord,
    patterns: Sequence[VincularPattern],
    level: Optional[int] = None,
    type_: Optional[int] = None,
) -> Dict[str, Any]:
    """Block values per level, block counts, height and pattern counts"""
    forest = block_decompose(sigma)
    height = forest.height
    levels = [level] if level is not None else list(range(1, height + 1))
    report: Dict[str, Any] = {
        "word": str(sigma),
        "n": sigma.n,
        "k": sigma.k,
        "height": height,
        "levels": {f"level{lvl}": values for lvl, values in sorted(forest.levels().items())},
        "blocks": {f"level{lvl}": forest.block_count(lvl, type_ if lvl > 1 else None) for lvl in levels},
    }
    if sigma.k >= 3:
        report["types"] = {
            f"level{b.level}": {} for b in forest.blocks.values() if b.level > 1
        }
        for b in forest.blocks.values():
            if b.level > 1:
                bucket = report["types"][f"level{b.level}"]
                bucket[str(b.type)] = bucket.get(str(b.type), 0) + 1
    counts: Dict[str, Dict[str, int]] = {}
    for p in patterns:
        counts[str(p)] = {
            f"level{lvl}": sum(
                group_pattern_count(group, p)
                for group in forest.groups(lvl, type_ if lvl > 1 else None)
            )
            for lvl in levels
        }
    report["patterns"] = counts
    return report


@cli.command("stats")
@click.argument("word")
@click.option("-k", "--multiplicity", "k", type=int, default=None, help="Defaults to the copies of 1 in WORD")
@click.option("--pattern", "patterns", multiple=True, help="Block pattern to count, e.g. 2,1 or 2~1")
@click.option("--level", type=int, default=None)
@click.option("--type", "type_", type=int, default=None, help="Block type (k >= 3)")
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="json", show_default=True)
@handle_errors
def cmd_stats(word: str, k: Optional[int], patterns: Tuple[str, ...], level: Optional[int], type_: Optional[int], fmt: str) -> None:
    """Block decomposition report for one word."""
    sigma = KStirlingWord.parse(word, k)
    parsed = [VincularPattern.parse(text) for text in patterns]
    if level is not None and level < 1:
        raise DomainError(f"levels start at 1, got {level}")
    if type_ is not None and not 1 <= type_ < sigma.k:
        raise DomainError(f"type must be in 1..{sigma.k - 1}, got {type_}")
    report = stats_report(sigma, parsed, level, type_)
    if fmt == "json":
        if len(parsed) == 1:
            report["counts"] = report["patterns"][str(parsed[0])]
        click.echo(json.dumps(report, indent=2))
        return
    rows = [
        {"pattern": p, "level": int(lvl[len("level"):]), "count": c}
        for p, by_level in report["patterns"].items()
        for lvl, c in by_level.items()
    ]
    if not rows:
        rows = [{"level": int(lvl[len("level"):]), "blocks": c} for lvl, c in report["blocks"].items()]
    emit_table(rows, fmt)


def _parse_assignments(assignments: Sequence[str]) -> Dict[str, int]:
    values = {}
    for item in assignments:
        name, sep, value = item.partition("=")
        if not sep:
            raise DomainError(f"--set expects VAR=VALUE, got {item!r}")
        try:
            values[name.strip()] = int(value)
        except ValueError as exc:
            raise DomainError(f"--set value must be an integer: {item!r}") from exc
    return values


def _gpoly_rows(n: int, route: str, poly: GPoly) -> List[Dict[str, Any]]:
    rows = []
    for term in poly.to_json()["terms"]:
        monomial = "*".join(name if e == 1 else f"{name}^{e}" for name, e in term["exps"].items()) or "1"
        rows.append({"n": n, "route": route, "monomial": monomial, "coeff": term["coeff"]})
    return rows


@cli.command("poly")
@order_option
@spec_option
@click.option("--route", type=click.Choice(ROUTES + ("all",)), default="brute", show_default=True)
@click.option("-N", "--truncation", type=int, default=None, help="Series truncation order")
@click.option("--set", "assignments", multiple=True, help="Project by substituting VAR=VALUE")
@jobs_option
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="json", show_default=True)
@click.pass_context
@handle_errors
def cmd_poly(
    ctx: click.Context,
    orders: List[int],
    spec_path: Optional[str],
    route: str,
    truncation: Optional[int],
    assignments: Tuple[str, ...],
    jobs: Optional[int],
    fmt: str,
) -> None:
    """g_n polynomials by one route, or all routes with a match flag."""
    spec = resolve_spec(spec_path) or PatternSequence()
    config = checked(
        RunConfig("poly", orders, spec.k, spec_path, spec, truncation, fmt, _jobs(ctx, jobs), _settings(ctx).max_order)
    )
    values = _parse_assignments(assignments)
    routes = list(ROUTES) if route == "all" else [route]
    if route == "all" and spec.k != 2:
        routes.remove("recursive")
        logger.warning("skipping the recursive route: it needs k = 2, spec %s has k = %d", spec.name or spec_path, spec.k)

    series = None
    if "series" in routes:
        series = g_series_theorem(spec, config.truncation if config.truncation is not None else max(config.orders))

    results: List[Dict[str, Any]] = []
    rows: List[Dict[str, Any]] = []
    mismatch: Optional[str] = None
    for n in config.orders:
        by_route: Dict[str, GPoly] = {}
        for name in routes:
            poly = series_to_gpoly(series, n, spec) if name == "series" else g_poly_by_route(name, n, spec, config.jobs)
            by_route[name] = poly.project(values) if values else poly
        entry: Dict[str, Any] = {"n": n}
        for name, poly in by_route.items():
            entry[name] = poly.to_json()
            rows.extend(_gpoly_rows(n, name, poly))
        if route == "all":
            first = by_route[routes[0]]
            entry["match"] = all(poly == first for poly in by_route.values())
            if not entry["match"] and mismatch is None:
                diff = {name: str(poly) for name, poly in by_route.items()}
                mismatch = f"spec {spec.name or spec_path} n={n}: " + json.dumps(diff)
        results.append(entry)

    if fmt == "json":
        click.echo(json.dumps({"spec": spec.name or spec_path, "route": route, "results": results}, indent=2))
    else:
        emit_table(rows, fmt)
    if mismatch is not None:
        raise VerificationError(f"routes disagree for {mismatch}")


@cli.command("series")
@spec_option
@click.option("-N", "--truncation", type=int, default=None, help="Truncation order [env STIRLINGBLOCKS_DEFAULT_TRUNCATION]")
@click.pass_context
@handle_errors
def cmd_series(ctx: click.Context, spec_path: Optional[str], truncation: Optional[int]) -> None:
    """Truncated G series by the composition route, as JSON."""
    spec = resolve_spec(spec_path) or PatternSequence()
    order = truncation if truncation is not None else _settings(ctx).default_truncation
    checked(RunConfig("series", [], spec.k, spec_path, spec, order, "json", 1, _settings(ctx).max_order))
    click.echo(json.dumps(g_series_theorem(spec, order).to_json(), indent=2))


@cli.command("phi")
@click.argument("text")
@handle_errors
def cmd_phi(text: str) -> None:
    """Map a tree like (0,((1,3),2)) to its word, or a word (k=2) to its tree."""
    if text.strip().startswith("("):
        click.echo(str(phi(parse_tree(text))))
    else:
        click.echo(format_tree(phi_inverse(KStirlingWord.parse(text, 2))))


@cli.command("verify")
@click.option("-n", "--order", "max_order", type=int, default=6, show_default=True, help="Largest order checked")
@click.option(
    "--suite",
    "suites",
    multiple=True,
    type=click.Choice(VerificationBattery.SUITES + ("all",)),
    help="Suites to run (repeatable, default all)",
)
@jobs_option
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="pretty", show_default=True)
@click.pass_context
@handle_errors
def cmd_verify(ctx: click.Context, max_order: int, suites: Tuple[str, ...], jobs: Optional[int], fmt: str) -> None:
    """Run the verification battery; exit 1 on the first mismatch."""
    config = checked(RunConfig("verify", [max_order], 2, None, None, None, fmt, _jobs(ctx, jobs), _settings(ctx).max_order))
    battery = VerificationBattery(max_order=max_order, jobs=config.jobs)
    report = battery.run(suites or ("all",))
    if fmt == "json":
        click.echo(json.dumps({"passed": report.passed, "summary": report.summary(), "results": report.rows()}, indent=2))
    else:
        emit_table(report.rows(), fmt)
        if fmt == "pretty":
            passed = sum(1 for r in report.results if r.passed)
            click.echo(f"{passed} passed, {len(report.results) - passed} failed in {report.elapsed:.1f}s")
    failure = report.first_failure
    if failure is not None:
        click.echo(f"first failure: {failure.describe()}", err=True)
        sys.exit(1)


def main() -> None:
    cli(prog_name="stirlingblocks")


if __name__ == "__main__":
    main()
