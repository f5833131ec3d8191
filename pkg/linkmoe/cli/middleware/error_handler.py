from __future__ import annotations

import logging
import sys
from typing import Optional

from linkmoe.cli.middleware.run_context import RunContext
from linkmoe.core.errors import LinkMoeError

logger = logging.getLogger(__name__)

EXIT_DOMAIN_ERROR = 2
EXIT_UNEXPECTED = 1


def cli_error_handler(exc: Exception, ctx: Optional[RunContext] = None) -> int:
    """Report a failed run, drop its partial outputs and pick the exit status."""
    if ctx is not None:
        ctx.cleanup()
    if isinstance(exc, LinkMoeError):
        logger.error(f"{exc.code}: {exc.detail}", extra={"code": str(exc.code), "context": exc.context})
        print(f"error[{exc.code}]: {exc.message}", file=sys.stderr)
        return EXIT_DOMAIN_ERROR
    logger.exception(f"Unhandled error: {exc}")
    print(f"error: {exc}", file=sys.stderr)
    return EXIT_UNEXPECTED
