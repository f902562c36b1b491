"""chunkvc CLI entry point."""

from chunkvc.cli.main import app

if __name__ == "__main__":
    app()
