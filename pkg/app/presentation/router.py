# =====================================
# This file is part of the CodeDev project
# Author: Ricel Quispe
# =====================================

# eplab/app/presentation/router.py

"""
Minimal command routing on top of argparse: routers collect commands,
the application mounts routers and maps exceptions to exit codes.
"""
import argparse
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Type

logger = logging.getLogger(__name__)

Handler = Callable[[argparse.Namespace], int]
ExceptionHandler = Callable[[Exception], int]


def arg(*flags: str, **kwargs: Any) -> Tuple[Tuple[str, ...], Dict[str, Any]]:
    """Declares one argparse argument of a command."""
    return flags, kwargs


@dataclass
class Command:
    name: str
    help: str
    handler: Handler
    arguments: List[Tuple[Tuple[str, ...], Dict[str, Any]]] = field(default_factory=list)


class CommandRouter:
    def __init__(self):
        self.commands: List[Command] = []

    def command(self, name: str, help: str, arguments: Sequence = ()):
        def decorator(handler: Handler) -> Handler:
            self.commands.append(Command(name, help, handler, list(arguments)))
            return handler
        return decorator


class CommandLineApp:
    """
    The command-line application: global options, mounted commands and
    registered exception handlers.
    """

    def __init__(self, prog: str, description: str):
        self.parser = argparse.ArgumentParser(prog=prog, description=description)
        self._subparsers = self.parser.add_subparsers(dest="command", required=True)
        self._exception_handlers: Dict[Type[Exception], ExceptionHandler] = {}

    def add_global_argument(self, *flags: str, **kwargs: Any) -> None:
        self.parser.add_argument(*flags, **kwargs)

    def include_router(self, router: CommandRouter) -> None:
        for command in router.commands:
            sub = self._subparsers.add_parser(command.name, help=command.help)
            for flags, kwargs in command.arguments:
                sub.add_argument(*flags, **kwargs)
            sub.set_defaults(_handler=command.handler)

    def exception_handler(self, exc_type: Type[Exception]):
        def decorator(handler: ExceptionHandler) -> ExceptionHandler:
            self._exception_handlers[exc_type] = handler
            return handler
        return decorator

    def _find_handler(self, exc: Exception) -> Optional[ExceptionHandler]:
        for klass in type(exc).__mro__:
            if klass in self._exception_handlers:
                return self._exception_handlers[klass]
        return None

    def parse(self, argv: Optional[Sequence[str]]) -> argparse.Namespace:
        return self.parser.parse_args(argv)

    def dispatch(self, args: argparse.Namespace) -> int:
        try:
            return args._handler(args)
        except Exception as exc:
            handler = self._find_handler(exc)
            if handler is None:
                raise
            return handler(exc)
