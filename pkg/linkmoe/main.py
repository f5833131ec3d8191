import logging
from typing import Optional, Sequence

from linkmoe.cli.commands.common import build_run_config
from linkmoe.cli.middleware.error_handler import cli_error_handler
from linkmoe.cli.middleware.run_context import RunContext
from linkmoe.cli.router import build_parser
from linkmoe.core.config import settings
from linkmoe.core.logging import configure_logging

logger = logging.getLogger(__name__)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(settings.LOG_LEVEL, settings.LOG_JSON)
    ctx: Optional[RunContext] = None
    try:
        cfg = build_run_config(args)
        ctx = RunContext(args.command, cfg)
        args.handler(args, cfg, ctx)
        ctx.finish()
    except Exception as exc:  # noqa: BLE001
        return cli_error_handler(exc, ctx)
    return 0
