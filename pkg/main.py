"""
SXI++ pipeline command-line entry point
Sets up logging and maps pipeline errors to exit codes
"""
import logging
import sys

import click

from pipeline.router import cli
from utils.config import LOG_FILE, LOG_LEVEL
from utils.errors import SxiError

# Configure logging
logging.basicConfig(
    level=getattr(logging, LOG_LEVEL, logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.StreamHandler(),
        logging.FileHandler(LOG_FILE)
    ]
)
logger = logging.getLogger(__name__)


def main(argv=None) -> int:
    """Run one CLI command and return its exit code: 0 ok, 1 usage, 2 data, 3 internal"""
    try:
        cli.main(args=argv, prog_name="sxi", standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        logger.info("Stopped by interrupt")
        return 1
    except click.ClickException as e:
        e.show()
        return 1
    except SxiError as e:
        logger.error(f"❌ {e}")
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        return 3


if __name__ == "__main__":
    sys.exit(main())
