# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/main.py

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .infrastructure.config import settings
from .presentation.commands import lab
from .presentation.handlers.exceptions import register_exception_handlers
from .presentation.router import CommandLineApp


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def create_app() -> CommandLineApp:
    app = CommandLineApp(
        prog="eplab",
        description="Critical-threshold laboratory for the attractive Euler-Poisson system.",
    )
    app.add_global_argument("--out-dir", dest="out_dir", type=Path,
                            help="Output directory (default: EPLAB_OUT_DIR or ./eplab_out).")
    app.add_global_argument("--seed", type=int, help="Seed for randomized data.")
    app.add_global_argument("--threads", type=_positive_int, help="Worker processes for sweeps.")

    # Register the mapping from application errors to exit codes
    register_exception_handlers(app)

    # Include commands
    app.include_router(lab.router)
    return app


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    app = create_app()
    try:
        args = app.parse(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return app.dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
