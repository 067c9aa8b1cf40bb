"""Objectives evaluated by an external program.

Protocol: the command receives one line of space-separated coordinates on
stdin and prints a single finite number on stdout. A non-zero exit status,
unparseable output or a timeout raises :class:`ObjectiveError`, which the
optimizer treats as a rejected evaluation. A command that cannot be
started at all raises ``OSError``.
"""

from __future__ import annotations

import shlex
import subprocess

import numpy as np

from ..exceptions import ObjectiveError

DEFAULT_TIMEOUT = 3600.0


class ExternalObjective:
    def __init__(self, command, timeout=DEFAULT_TIMEOUT):
        self.command = command
        self.argv = shlex.split(command) if isinstance(command, str) else list(command)
        if not self.argv:
            raise ValueError("empty objective command")
        self.timeout = timeout

    def __repr__(self):
        return f"ExternalObjective({self.command!r}, timeout={self.timeout})"

    def __call__(self, x):
        line = " ".join(format(float(v), ".17g") for v in np.ravel(x)) + "\n"
        try:
            proc = subprocess.run(
                self.argv,
                input=line,
                capture_output=True,
                text=True,
                timeout=self.timeout,
            )
        except subprocess.TimeoutExpired:
            raise ObjectiveError(f"{self.argv[0]}: timed out after {self.timeout} s") from None
        if proc.returncode != 0:
            detail = proc.stderr.strip().splitlines()[-1:] or [""]
            raise ObjectiveError(f"{self.argv[0]}: exit status {proc.returncode} {detail[0]}".rstrip())
        text = proc.stdout.strip()
        try:
            return float(text)
        except ValueError:
            raise ObjectiveError(f"{self.argv[0]}: cannot parse output {text[:80]!r}") from None


def external_objective(command, timeout=DEFAULT_TIMEOUT):
    return ExternalObjective(command, timeout)
