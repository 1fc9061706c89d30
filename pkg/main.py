#!/usr/bin/env python3
"""
brickdual - brick-work circuit entanglement lab

Main entry point. Dispatches to the typer application that runs the
oracle, space-time dual and stabilizer pipelines.
"""
import logging
import signal
import sys
import traceback

from src.infrastructure.ui.command_line_interface import app


def setup_signal_handlers() -> None:
    """Exit cleanly on SIGTERM."""
    def signal_handler(sig, frame):
        logging.info("Termination signal received. Shutting down...")
        sys.exit(0)

    signal.signal(signal.SIGTERM, signal_handler)


def main():
    """Run the brickdual command line."""
    setup_signal_handlers()
    try:
        app()
    except KeyboardInterrupt:
        logging.info("Interrupted by user.")
        sys.exit(1)
    except SystemExit:
        raise
    except Exception as e:
        logging.error(f"Fatal error: {e}")
        logging.error(traceback.format_exc())
        print(f"\nFATAL ERROR: {e}")
        print("Check the logs for details.")
        sys.exit(1)
    finally:
        logging.debug("brickdual finished.")


if __name__ == "__main__":
    main()
