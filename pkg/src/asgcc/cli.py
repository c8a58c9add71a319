"""Command-line front end: ``asgcc check|parse|render``.

Artifacts (dumps, geometry) go to standard output or ``-o``; diagnostics go
to standard error as ``file:line:col: error[code]: message``.
"""

from __future__ import annotations

import argparse
import importlib
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import TextIO

from . import __version__
from .errors import AmbiguityError, AsgError, ConstraintViolation, EvaluationError, ModelError, SourceError, line_col
from .instantiate import UnknownConstraint, missing_constraints
from .model import validate_model
from .modelfile import ASM_VERSION, element_lines, loads
from .pipeline import Language

EXIT_OK = 0
EXIT_SOURCE = 1
EXIT_SEMANTIC = 2
EXIT_MODEL = 3
EXIT_USAGE = 64

BUILTIN = "scene3d"
DUMPS = ("tokens", "grammar", "forest", "tree", "asg-json", "asg-dot")


@dataclass
class RunConfig:
    command: str
    model: str = BUILTIN
    input_path: str | None = None
    output_path: str | None = None
    dumps: tuple[str, ...] = ()
    strict: bool = False
    format: str = "obj"
    scoped_color: bool = False
    hooks: tuple[str, ...] = field(default_factory=tuple)


class _Failure(Exception):
    def __init__(self, status: int, line: str, notes: tuple[str, ...] = ()):
        super().__init__(line)
        self.status = status
        self.line = line
        self.notes = notes


def _diag(path: str, line: int, col: int, code: str, message: str, severity: str = "error") -> str:
    return f"{path}:{line}:{col}: {severity}[{code}]: {message}"


class _Run:
    def __init__(self, config: RunConfig, stdout: TextIO, stderr: TextIO):
        self.config = config
        self.stdout = stdout
        self.stderr = stderr
        self._out: TextIO | None = None

    # -- output -------------------------------------------------------------

    def emit(self, text: str) -> None:
        if self._out is None:
            if self.config.output_path and self.config.command == "parse":
                self._out = open(self.config.output_path, "w", encoding="utf-8", newline="\n")
            else:
                self._out = self.stdout
        self._out.write(text if text.endswith("\n") else text + "\n")

    def close(self) -> None:
        if self._out is not None and self._out is not self.stdout:
            self._out.close()

    def dump(self, name: str, produce) -> None:
        if name in self.config.dumps:
            self.emit(produce())

    # -- stages -------------------------------------------------------------

    def load_model(self):
        from .scene3d import model_file_text  # registers the scene3d hooks

        for module in self.config.hooks:
            try:
                importlib.import_module(module)
            except ImportError as exc:
                raise _Failure(EXIT_MODEL, _diag(module, 1, 1, "hook-module", str(exc)))
        if self.config.model == BUILTIN:
            path, text = f"<{BUILTIN}>", model_file_text()
        else:
            path = self.config.model
            try:
                text = Path(path).read_text(encoding="utf-8")
            except OSError as exc:
                raise _Failure(EXIT_MODEL, _diag(path, 1, 1, "io", exc.strerror or str(exc)))
        try:
            model = loads(text)
        except ModelError as exc:
            raise _Failure(EXIT_MODEL, _diag(path, 1, 1, exc.code, str(exc)))
        return path, text, model

    def language(self) -> Language:
        path, text, model = self.load_model()
        lines = element_lines(text)
        report = validate_model(model)
        for w in report.warnings:
            self.stderr.write(_diag(path, lines.get(w.element, 1), 1, w.code, str(w), "warning") + "\n")
        if report.errors:
            first, *rest = report.errors
            raise _Failure(
                EXIT_MODEL,
                _diag(path, lines.get(first.element, 1), 1, "model", str(first)),
                tuple(_diag(path, lines.get(e.element, 1), 1, "model", str(e)) for e in rest),
            )
        missing = missing_constraints(model)
        if missing:
            raise _Failure(
                EXIT_MODEL, _diag(path, 1, 1, UnknownConstraint.code, f"no hook registered for {', '.join(missing)}")
            )
        lang = Language(model)
        self.dump("grammar", lang.grammar.dump)
        return lang

    def parse(self, lang: Language, path: str, text: str):
        from .earley import disambiguate
        from .instantiate import build_instances, check_constraints, resolve_references

        try:
            lattice = lang.scan(text)
            self.dump("tokens", lattice.dump)
            forest = lang.parser.parse(lattice)
            self.dump("forest", forest.dump)
            tree = disambiguate(forest, lang.grammar)
            self.dump("tree", tree.dump)
            graph, table = build_instances(tree, lang.model, text)
            graph = resolve_references(graph, table)
        except SourceError as exc:
            status = EXIT_SEMANTIC if exc.code == "unresolved-reference" else EXIT_SOURCE
            notes = ()
            if isinstance(exc, AmbiguityError):
                notes = tuple(f"  note: candidate {a}" for a in exc.alternatives)
            raise _Failure(status, _diag(path, exc.line, exc.column, exc.code, exc.message), notes)
        self.dump("asg-json", graph.to_json)
        self.dump("asg-dot", graph.to_dot)
        for w in graph.warnings:
            line, col = line_col(text, w.offset)
            if self.config.strict:
                raise _Failure(EXIT_SEMANTIC, _diag(path, line, col, w.code, w.message))
            self.stderr.write(_diag(path, line, col, w.code, w.message, "warning") + "\n")
        report = check_constraints(graph, lang.model)
        if not report.ok:
            lines = []
            for v in report.violations:
                line, col = line_col(text, v.span[0])
                lines.append(_diag(path, line, col, ConstraintViolation.code, f"{v.constraint}: {v.message}"))
            raise _Failure(EXIT_SEMANTIC, lines[0], tuple("  note: " + s for s in lines[1:]))
        return graph

    def render(self, graph, path: str) -> None:
        from .scene3d import evaluate, json_text, obj_text

        try:
            cubes = evaluate(graph, scoped_color=self.config.scoped_color)
        except EvaluationError as exc:
            raise _Failure(EXIT_SEMANTIC, _diag(path, 1, 1, exc.code, str(exc)))
        data = json_text(cubes) if self.config.format == "json" else obj_text(cubes)
        if self.config.output_path:
            with open(self.config.output_path, "w", encoding="utf-8", newline="\n") as f:
                f.write(data)
        else:
            self.stdout.write(data)

    def run(self) -> int:
        c = self.config
        if c.command == "render" and c.model != BUILTIN:
            raise _Failure(EXIT_USAGE, _diag(c.model, 1, 1, "usage", f"render needs --model {BUILTIN}"))
        lang = self.language()
        if c.command == "check":
            return EXIT_OK
        if c.input_path is None:
            raise _Failure(EXIT_USAGE, _diag("<args>", 1, 1, "usage", f"{c.command} needs an input file"))
        try:
            text = Path(c.input_path).read_text(encoding="utf-8")
        except OSError as exc:
            raise _Failure(EXIT_SOURCE, _diag(c.input_path, 1, 1, "io", exc.strerror or str(exc)))
        graph = self.parse(lang, c.input_path, text)
        if c.command == "render":
            self.render(graph, c.input_path)
        return EXIT_OK


def run(config: RunConfig, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    """Execute one command and return its exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    r = _Run(config, stdout, stderr)
    try:
        return r.run()
    except _Failure as f:
        stderr.write(f.line + "\n")
        for note in f.notes:
            stderr.write(note + "\n")
        return f.status
    except AsgError as exc:  # anything a stage did not map itself
        stderr.write(_diag(config.input_path or config.model, 1, 1, exc.code, str(exc)) + "\n")
        return EXIT_MODEL if isinstance(exc, ModelError) else EXIT_SEMANTIC
    finally:
        r.close()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="asgcc", description="Parse model-defined languages into abstract syntax graphs.")
    p.add_argument("--version", action="version", version=f"asgcc {__version__} (asm-version {ASM_VERSION})")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--model", default=BUILTIN, help=f"built-in name ({BUILTIN}) or a model description file")
        sp.add_argument("--hooks", action="append", default=[], metavar="MODULE",
                        help="import MODULE to register constraint hooks (repeatable)")
        sp.add_argument("--dump-grammar", action="store_true", help="print the synthesized grammar")

    check = sub.add_parser("check", help="validate a model")
    common(check)
    for name, help_text in (("parse", "parse a source file into an ASG"), ("render", "parse and evaluate a scene")):
        sp = sub.add_parser(name, help=help_text)
        common(sp)
        sp.add_argument("input", help="source file")
        sp.add_argument("-o", "--output", help="write artifacts here instead of standard output")
        sp.add_argument("--strict", action="store_true", help="treat duplicate-ID warnings as errors")
        for d in DUMPS[:1] + DUMPS[2:]:
            sp.add_argument(f"--dump-{d}", action="store_true")
        if name == "render":
            sp.add_argument("--format", choices=("obj", "json"), default="obj")
            sp.add_argument("--scoped-color", action="store_true", help="restore the colour when a {} scope ends")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    dumps = tuple(d for d in DUMPS if getattr(ns, "dump_" + d.replace("-", "_"), False))
    return RunConfig(
        command=ns.command,
        model=ns.model,
        input_path=getattr(ns, "input", None),
        output_path=getattr(ns, "output", None),
        dumps=dumps,
        strict=getattr(ns, "strict", False),
        format=getattr(ns, "format", "obj"),
        scoped_color=getattr(ns, "scoped_color", False),
        hooks=tuple(ns.hooks),
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # keep usage errors apart from exit 2
        return EXIT_USAGE if exc.code not in (0, None) else 0
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
