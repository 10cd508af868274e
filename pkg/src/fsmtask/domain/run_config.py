"""Run metadata record written beside every CLI output."""

import platform
from dataclasses import dataclass, field

import numpy as np

from .. import __version__

META_FILE = "run.meta"
ARG_PREFIX = "arg."
VERSION_PREFIX = "version."


def versions() -> dict[str, str]:
    return {
        "fsmtask": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
    }


@dataclass
class RunConfig:
    """Everything needed to replay a CLI run.

    ``args`` maps argparse destinations to their string values; flags
    are stored as ``"true"``/``"false"``.
    """

    subcommand: str
    seed: int = 0
    out_dir: str = "."
    args: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_metadata(cls, text: str) -> "RunConfig":
        """Parse a ``key=value`` metadata record.

        Raises:
            ValueError: If a line is malformed or the subcommand is missing
        """
        record: dict[str, str] = {}
        for number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"line {number}: expected key=value, got {line!r}")
            record[key.strip()] = value.strip()

        if "subcommand" not in record:
            raise ValueError("subcommand is required")

        return cls(
            subcommand=record["subcommand"],
            seed=int(record.get("seed", 0)),
            out_dir=record.get("out", "."),
            args={
                key.removeprefix(ARG_PREFIX): value
                for key, value in record.items()
                if key.startswith(ARG_PREFIX)
            },
        )

    def to_metadata(self) -> str:
        record = {
            "subcommand": self.subcommand,
            "seed": str(self.seed),
            "out": self.out_dir,
        }
        record.update({ARG_PREFIX + key: value for key, value in self.args.items()})
        record.update({VERSION_PREFIX + key: value for key, value in versions().items()})
        return "".join(f"{key}={record[key]}\n" for key in sorted(record))

    def to_argv(self, out_dir: str | None = None) -> list[str]:
        """Rebuild the command line this record was written for."""
        argv = [self.subcommand, "--seed", str(self.seed), "--out", out_dir or self.out_dir]
        for key in sorted(self.args):
            value = self.args[key]
            flag = "--" + key.replace("_", "-")
            if value == "true":
                argv.append(flag)
            elif value != "false":
                argv.extend([flag, value])
        return argv
